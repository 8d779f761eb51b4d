#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace qb {

struct QRDesign {
    Eigen::VectorXd y;
    Eigen::MatrixXd X;  // regressors, intercept excluded
    double tau = 0.5;
    bool include_intercept = true;
    Eigen::VectorXd weights;  // optional positive observation weights; empty means unit weights

    Eigen::MatrixXd full() const;  // intercept column first when requested
    int p() const { return static_cast<int>(X.cols()) + (include_intercept ? 1 : 0); }
    void validate() const;
};

struct QRFit {
    Eigen::VectorXd beta;  // intercept first
    double loss = 0;
    double r1 = 0;
    std::optional<Eigen::MatrixXd> cov_boot;
    std::optional<double> wald_p;
    int n_obs = 0;
    int iterations = 0;
    bool exhaustive = false;
};

struct QROptions {
    int max_iter = 100;
    double gap_tol = 1e-12;
};

QRFit qr_fit(const QRDesign& design, const QROptions& opt = {});

// Enumerates every p-subset of observations (n <= 30). Ties go to the smallest ||beta||.
QRFit qr_fit_exhaustive(const QRDesign& design);

double qr_loss(const QRDesign& design, const Eigen::VectorXd& beta);

// Mean of 1{R < Q} - tau, in percent.
double hit_statistic(const std::vector<double>& returns, const std::vector<double>& quantiles, double tau);

// Out-of-sample R^1 against the rolling historical tau-quantile of the previous `window` returns.
double r1_oos(const std::vector<double>& returns, const std::vector<double>& forecast, int window, double tau);

// Wald p-value for A beta = b using fit.cov_boot.
double wald_test(const QRFit& fit, const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

// Forecasts for t >= initial_window from fits on rows [0, t); earlier entries are NaN.
std::vector<double> expanding_forecast(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, int initial_window,
                                       double tau, int cadence = 1);

// Share of (t, adjacent tau pair) where the predicted quantile decreases in tau.
// preds[j][t] holds the prediction for taus[j] (taus increasing).
double crossing_rate(const std::vector<std::vector<double>>& preds);

}  // namespace qb
