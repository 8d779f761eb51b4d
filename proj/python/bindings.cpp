// Thin Python surface over the C++ core.
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qbound/bounds.hpp"
#include "qbound/error.hpp"
#include "qbound/models.hpp"
#include "qbound/numerics.hpp"
#include "qbound/qr.hpp"
#include "qbound/riskadjust.hpp"
#include "qbound/rnd.hpp"
#include "qbound/simulate.hpp"

namespace py = pybind11;
using namespace qb;

namespace {

py::dict bounds_dict(const ModelBounds& b) {
    py::dict d;
    d["taus"] = b.odc.taus;
    d["phi"] = b.odc.phi;
    d["local"] = b.local.values;
    d["hj"] = b.hj;
    d["sdf_vol"] = b.sdf_vol;
    d["equity_premium"] = b.equity_premium;
    return d;
}

std::vector<double> taus_or_default(const std::optional<std::vector<double>>& t) {
    return t ? *t : default_tau_grid();
}

}  // namespace

PYBIND11_MODULE(_qbound, m) {
    m.doc() = "quantile-based SDF bounds";

    static py::exception<Error> err(m, "QboundError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = err;
            py::object inst = exc(e.what());
            inst.attr("code") = errc_name(e.code());
            PyErr_SetObject(err.ptr(), inst.ptr());
        }
    });

    py::enum_<Measure>(m, "Measure").value("physical", Measure::Physical).value("risk_neutral", Measure::RiskNeutral);

    py::class_<DistributionEstimate>(m, "Distribution")
        .def_readonly("grid", &DistributionEstimate::grid)
        .def_readonly("cdf", &DistributionEstimate::cdf)
        .def_readonly("pdf", &DistributionEstimate::pdf)
        .def_readonly("horizon_days", &DistributionEstimate::horizon_days)
        .def_readonly("rf_gross", &DistributionEstimate::rf_gross)
        .def("cdf_at", &DistributionEstimate::cdf_at)
        .def("pdf_at", &DistributionEstimate::pdf_at)
        .def("quantile", [](const DistributionEstimate& d, double tau) { return d.quantile(tau); })
        .def("invariant_violations", &DistributionEstimate::invariant_violations);

    m.def(
        "lognormal_distribution",
        [](double mean_log, double sd_log, double lo, double hi, std::size_t n, int horizon_days, double rf) {
            return lognormal_distribution(mean_log, sd_log, {lo, hi, n}, Measure::RiskNeutral, horizon_days, rf);
        },
        py::arg("mean_log"), py::arg("sd_log"), py::arg("lo") = 0.3, py::arg("hi") = 2.0, py::arg("n") = 2001,
        py::arg("horizon_days") = 30, py::arg("rf") = 1.0);

    m.def(
        "fit_black_scholes_chain",
        [](double sigma, double r, int days, int n_strikes, double k_lo, double k_hi) {
            BsPeriod law{r, sigma, r, days / 365.0};
            return fit_rn_distribution(synthetic_chain(law, Date::parse("2000-01-03"), days, n_strikes, k_lo, k_hi));
        },
        "risk-neutral distribution extracted from an exact Black-Scholes chain", py::arg("sigma"), py::arg("r"),
        py::arg("days"), py::arg("n_strikes") = 100, py::arg("k_lo") = 0.4, py::arg("k_hi") = 1.8);

    m.def(
        "qr_fit",
        [](const Eigen::VectorXd& y, const Eigen::MatrixXd& X, double tau, bool intercept) {
            QRDesign d;
            d.y = y;
            d.X = X;
            d.tau = tau;
            d.include_intercept = intercept;
            auto f = qr_fit(d);
            py::dict out;
            out["beta"] = f.beta;
            out["loss"] = f.loss;
            out["r1"] = f.r1;
            out["n_obs"] = f.n_obs;
            return out;
        },
        py::arg("y"), py::arg("X"), py::arg("tau"), py::arg("intercept") = true);

    m.def(
        "kernel_cdf",
        [](const std::vector<double>& returns, std::optional<double> bandwidth) {
            auto k = kernel_cdf(returns, bandwidth);
            return py::make_tuple(k.dist, k.bandwidth);
        },
        py::arg("returns"), py::arg("bandwidth") = py::none());

    m.def("hj_bound", &hj_bound, py::arg("mean"), py::arg("sd"), py::arg("rf"));

    m.def(
        "dominance_test",
        [](const std::vector<double>& returns, const std::vector<DistributionEstimate>& dists, double tau_star,
           double rf, int n_boot, std::uint64_t seed, int block_length) {
            DominanceOptions opt;
            opt.n_boot = n_boot;
            opt.seed = seed;
            opt.block_length = block_length;
            auto r = dominance_test(returns, dists, tau_star, rf, opt);
            py::dict d;
            d["T"] = r.T_stat;
            d["p_value"] = r.p_value;
            d["local"] = r.local;
            d["hj"] = r.hj;
            d["bandwidth"] = r.bandwidth;
            return d;
        },
        py::arg("returns"), py::arg("dists"), py::arg("tau_star") = 0.046, py::arg("rf") = 1.0,
        py::arg("n_boot") = 1000, py::arg("seed") = 0, py::arg("block_length") = 12);

    m.def("feasible_lb", py::overload_cast<const DistributionEstimate&, double, double>(&feasible_lb),
          py::arg("dist"), py::arg("rf"), py::arg("tau"));

    m.def(
        "risk_adjustment",
        [](const DistributionEstimate& d, double tau, double h) {
            auto r = risk_adjustment(d, tau, h);
            py::dict out;
            out["q_tilde"] = r.q_tilde;
            out["lb"] = r.lb;
            out["ra"] = r.ra;
            out["q_hat"] = r.q_hat;
            out["pdf_at_q"] = r.pdf_at_q;
            return out;
        },
        py::arg("dist"), py::arg("tau"), py::arg("h") = 0.001);

    m.def("crash_prob_log_utility", &crash_prob_log_utility, py::arg("dist"), py::arg("rf"), py::arg("tau"));

    m.def(
        "joint_normal_bounds",
        [](double sigma_R, double rf, double sigma_M, double rho, std::optional<std::vector<double>> taus) {
            return bounds_dict(model_local_and_hj(JointNormal::priced(sigma_R, rf, sigma_M, rho), taus_or_default(taus)));
        },
        py::arg("sigma_R"), py::arg("rf"), py::arg("sigma_M"), py::arg("rho"), py::arg("taus") = py::none());

    m.def(
        "lognormal_efficiency",
        [](double sigma_R, double r_f, double sigma_M, double rho, double lambda) {
            return lognormal_efficiency(Lognormal::priced(sigma_R, r_f, sigma_M, rho, lambda));
        },
        py::arg("sigma_R"), py::arg("r_f"), py::arg("sigma_M"), py::arg("rho"), py::arg("lambda_"));

    m.def(
        "pareto_bounds",
        [](double beta, double equity_premium, double rf, std::optional<std::vector<double>> taus) {
            return bounds_dict(model_local_and_hj(Pareto::calibrate(beta, equity_premium, rf), taus_or_default(taus)));
        },
        py::arg("beta") = 0.33, py::arg("equity_premium") = 0.08, py::arg("rf") = 1.0, py::arg("taus") = py::none());

    m.def(
        "disaster_bounds",
        [](double gamma, bool tilt_diffusion, std::optional<std::vector<double>> taus) {
            Disaster d;
            d.gamma = gamma;
            d.tilt_diffusion = tilt_diffusion;
            return bounds_dict(model_local_and_hj(d, taus_or_default(taus)));
        },
        py::arg("gamma") = 5.19, py::arg("tilt_diffusion") = false, py::arg("taus") = py::none());

    m.def("default_tau_grid", &default_tau_grid);
}
