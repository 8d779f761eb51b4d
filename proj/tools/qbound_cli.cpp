#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "io.hpp"
#include "qbound/black_scholes.hpp"
#include "qbound/bootstrap.hpp"
#include "qbound/bounds.hpp"
#include "qbound/error.hpp"
#include "qbound/market_data.hpp"
#include "qbound/models.hpp"
#include "qbound/numerics.hpp"
#include "qbound/qr.hpp"
#include "qbound/riskadjust.hpp"
#include "qbound/rnd.hpp"
#include "qbound/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using qb::Errc;
using qb::Error;
using qbio::fmt;

namespace {

// Config file values overridden by any flag given on the command line.
struct Settings {
    std::map<std::string, std::string> kv;

    bool has(const std::string& k) const { return kv.count(k) && !kv.at(k).empty(); }
    std::string str(const std::string& k, const std::string& def = "") const { return has(k) ? kv.at(k) : def; }
    std::string path(const std::string& k) const {
        if (!has(k)) throw Error(Errc::InvalidArgument, "missing required setting '" + k + "'");
        return kv.at(k);
    }
    double num(const std::string& k, double def) const { return has(k) ? qbio::to_double(kv.at(k), k) : def; }
    int integer(const std::string& k, int def) const { return has(k) ? qbio::to_int(kv.at(k), k) : def; }
    bool flag(const std::string& k) const {
        auto v = str(k, "0");
        return v == "1" || v == "true" || v == "yes";
    }
    std::uint64_t seed() const {
        if (!has("seed")) throw Error(Errc::InvalidArgument, "a seed is required for this command");
        return std::stoull(kv.at("seed"));
    }
    std::vector<double> taus(const std::vector<double>& def) const {
        auto t = has("taus") ? qbio::parse_list(kv.at("taus")) : def;
        for (double v : t)
            if (!(v > 0 && v < 1)) throw Error(Errc::InvalidArgument, "taus must lie in (0,1)");
        return t;
    }
    int jobs() const { return std::max(1, integer("jobs", 1)); }
    fs::path out() const {
        fs::path p = str("out", ".");
        fs::create_directories(p);
        return p;
    }
};

json plan_json(const qb::ResamplePlan& p) {
    return {{"scheme", qb::scheme_name(p.scheme)},
            {"block_length", p.block_length},
            {"n_replicates", p.n_replicates},
            {"seed", p.seed},
            {"taper", p.taper}};
}

json with_schema(json j) {
    j["schema_version"] = qbio::kSchemaVersion;
    return j;
}

// Fits the target horizon on one date from the chains that bracket it.
qb::DistributionEstimate fit_horizon(const std::vector<const qb::OptionChain*>& chains, int horizon) {
    const qb::OptionChain* below = nullptr;
    const qb::OptionChain* above = nullptr;
    for (const auto* c : chains) {
        if (c->maturity_days == horizon) return qb::fit_rn_distribution(*c);
        if (c->maturity_days < horizon && (!below || c->maturity_days > below->maturity_days)) below = c;
        if (c->maturity_days > horizon && (!above || c->maturity_days < above->maturity_days)) above = c;
    }
    if (!below || !above) throw Error(Errc::BracketingError, "no maturities on both sides of the horizon");
    return qb::interpolate_maturity(qb::fit_rn_distribution(*below), qb::fit_rn_distribution(*above), horizon);
}

int cmd_rnd_extract(const Settings& s) {
    const int h = s.integer("horizon", 30);
    auto taus = s.taus(qb::default_tau_grid());
    std::vector<qb::DroppedGroup> dropped_groups;
    auto chains = qb::clean_quotes(qbio::read_options(s.path("options")), {}, &dropped_groups);

    std::map<qb::Date, std::vector<const qb::OptionChain*>> by_date;
    for (const auto& c : chains) by_date[c.observation_date].push_back(&c);
    std::vector<qb::Date> dates;
    for (const auto& [d, _] : by_date) dates.push_back(d);

    std::vector<std::optional<qb::DistributionEstimate>> fits(dates.size());
    std::vector<std::string> reasons(dates.size());
    qb::parallel_for(dates.size(), s.jobs(), [&](std::size_t i) {
        try {
            fits[i] = fit_horizon(by_date[dates[i]], h);
        } catch (const Error& e) {
            reasons[i] = qb::errc_name(e.code());
        }
    });

    auto out = s.out();
    std::ofstream rnq(out / "rnq.csv");
    rnq << "date,horizon,tau,q_tilde,truncated\n";
    qbio::DistFile df;
    df.horizon_days = h;
    json dropped = json::array();
    for (const auto& g : dropped_groups)
        dropped.push_back({{"date", g.observation_date.iso()}, {"expiry", g.expiry_date.iso()}, {"reason", g.reason}});
    for (std::size_t i = 0; i < dates.size(); ++i) {
        if (!fits[i]) {
            dropped.push_back({{"date", dates[i].iso()}, {"reason", reasons[i]}});
            continue;
        }
        for (double t : taus) {
            bool tr = false;
            double q = fits[i]->quantile(t, &tr);
            rnq << dates[i].iso() << ',' << h << ',' << fmt(t) << ',' << fmt(q) << ',' << (tr ? 1 : 0) << '\n';
        }
        df.dists.push_back(*fits[i]);
    }
    qbio::write_dists((out / "dist.json").string(), df, {{"dropped", dropped}});
    std::printf("rnd-extract: fitted %zu dates, dropped %zu\n", df.dists.size(), dates.size() - df.dists.size());
    return 0;
}

struct RnqData {
    std::vector<qb::Date> dates;
    std::map<double, std::map<qb::Date, double>> q;  // tau -> date -> value
};

RnqData read_rnq(const std::string& path) {
    auto t = qbio::read_csv(path);
    int cd = t.col("date"), ct = t.col("tau"), cq = t.col("q_tilde");
    RnqData r;
    std::set<qb::Date> ds;
    for (const auto& row : t.rows) {
        auto d = qb::Date::parse(row[cd]);
        ds.insert(d);
        r.q[qbio::to_double(row[ct], "tau")][d] = qbio::to_double(row[cq], "q_tilde");
    }
    r.dates.assign(ds.begin(), ds.end());
    return r;
}

// Extra regressors keyed by date; columns after the first are regressors.
std::map<qb::Date, std::vector<double>> read_extra(const std::string& path, std::vector<std::string>& names) {
    auto t = qbio::read_csv(path);
    int cd = t.col("date");
    for (std::size_t i = 0; i < t.header.size(); ++i)
        if (static_cast<int>(i) != cd) names.push_back(t.header[i]);
    std::map<qb::Date, std::vector<double>> out;
    for (const auto& row : t.rows) {
        std::vector<double> v;
        for (std::size_t i = 0; i < row.size(); ++i)
            if (static_cast<int>(i) != cd) v.push_back(qbio::to_double(row[i], t.header[i]));
        out[qb::Date::parse(row[cd])] = v;
    }
    return out;
}

json fit_json(const qb::QRFit& f) {
    json j;
    j["beta"] = std::vector<double>(f.beta.data(), f.beta.data() + f.beta.size());
    j["loss"] = f.loss;
    j["r1"] = f.r1;
    j["n_obs"] = f.n_obs;
    if (f.wald_p) j["wald_p"] = *f.wald_p;
    if (f.cov_boot) {
        std::vector<double> se;
        for (Eigen::Index i = 0; i < f.cov_boot->rows(); ++i) se.push_back(std::sqrt((*f.cov_boot)(i, i)));
        j["se_boot"] = se;
    }
    return j;
}

// Refits with a bootstrap covariance and tests the first two coefficients against [0, 1].
void add_wald(qb::QRFit& fit, const qb::QRDesign& d, const qb::ResamplePlan& plan, int jobs) {
    auto bc = qb::qr_boot_cov(d, plan, jobs);
    fit.cov_boot = bc.cov;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, fit.beta.size());
    A(0, 0) = 1;
    A(1, 1) = 1;
    Eigen::VectorXd b(2);
    b << 0, 1;
    try {
        fit.wald_p = qb::wald_test(fit, A, b);
    } catch (const Error& e) {
        if (e.code() != Errc::SingularCovariance) throw;
    }
}

qb::ResamplePlan boot_plan(const Settings& s, int horizon, std::size_t n) {
    qb::ResamplePlan plan;
    plan.scheme = qb::parse_scheme(s.str("scheme", "moving_block"));
    plan.block_length = std::min<int>(s.integer("block_length", qb::default_block_length(horizon)), static_cast<int>(n));
    plan.n_replicates = s.integer("n_boot", 1000);
    plan.seed = s.seed();
    plan.taper = s.num("taper", 0.0);
    return plan;
}

int cmd_qr(const Settings& s) {
    const int h = s.integer("horizon", 30);
    auto rnq = read_rnq(s.path("rnq"));
    auto rs = qb::build_returns(qbio::read_index(s.path("index")), h, true);
    std::map<qb::Date, double> ret;
    for (std::size_t i = 0; i < rs.dates.size(); ++i) ret[rs.dates[i]] = rs.values[i];
    std::vector<std::string> extra_names;
    std::map<qb::Date, std::vector<double>> extra;
    if (s.has("extra")) extra = read_extra(s.path("extra"), extra_names);

    std::vector<double> taus;
    for (const auto& [t, _] : rnq.q) taus.push_back(t);
    if (s.has("taus")) taus = s.taus({});
    const int window = s.integer("oos_window", 10 * h);

    json fits = json::array();
    std::optional<qb::ResamplePlan> plan_used;
    for (double tau : taus) {
        auto it = rnq.q.find(tau);
        if (it == rnq.q.end()) throw Error(Errc::AlignmentError, "tau " + fmt(tau) + " missing from rnq");
        std::vector<qb::Date> ds;
        for (const auto& [d, _] : it->second)
            if (ret.count(d) && (extra.empty() || extra.count(d))) ds.push_back(d);
        if (ds.size() < 10) throw Error(Errc::InsufficientData, "fewer than 10 aligned observations");
        qb::QRDesign d;
        d.tau = tau;
        d.y.resize(static_cast<Eigen::Index>(ds.size()));
        d.X.resize(static_cast<Eigen::Index>(ds.size()), 1 + static_cast<Eigen::Index>(extra_names.size()));
        std::vector<double> y, q;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            auto r = static_cast<Eigen::Index>(i);
            d.y(r) = ret[ds[i]];
            d.X(r, 0) = it->second.at(ds[i]);
            for (std::size_t k = 0; k < extra_names.size(); ++k) d.X(r, 1 + static_cast<Eigen::Index>(k)) = extra[ds[i]][k];
            y.push_back(d.y(r));
            q.push_back(d.X(r, 0));
        }
        auto fit = qb::qr_fit(d);
        auto plan = boot_plan(s, h, ds.size());
        add_wald(fit, d, plan, s.jobs());
        plan_used = plan;
        json j = fit_json(fit);
        j["tau"] = tau;
        j["hit"] = qb::hit_statistic(y, q, tau);
        if (static_cast<int>(ds.size()) > window) j["r1_oos"] = qb::r1_oos(y, q, window, tau);
        fits.push_back(j);
    }
    json out = with_schema({{"horizon_days", h}, {"regressors", json::array()}, {"fits", fits}});
    out["regressors"].push_back("q_tilde");
    for (auto& n : extra_names) out["regressors"].push_back(n);
    if (plan_used) out["bootstrap"] = plan_json(*plan_used);
    qbio::write_json((s.out() / "qrfit.json").string(), out);
    std::printf("qr: %zu fits\n", fits.size());
    return 0;
}

// Distributions and non-overlapping returns matched on observation date.
struct Aligned {
    std::vector<double> returns;
    std::vector<qb::DistributionEstimate> dists;
};

Aligned align(const qbio::DistFile& df, const qb::ReturnSeries& rs) {
    std::map<qb::Date, const qb::DistributionEstimate*> by_date;
    for (const auto& d : df.dists)
        if (d.date) by_date[*d.date] = &d;
    Aligned a;
    for (std::size_t i = 0; i < rs.dates.size(); ++i) {
        auto it = by_date.find(rs.dates[i]);
        if (it == by_date.end()) continue;
        a.returns.push_back(rs.values[i]);
        a.dists.push_back(*it->second);
    }
    return a;
}

int cmd_bounds(const Settings& s) {
    auto df = qbio::read_dists(s.path("dist"));
    const int h = s.integer("horizon", df.horizon_days ? df.horizon_days : 30);
    auto rs = qb::build_returns(qbio::read_index(s.path("index")), h, false);
    auto a = align(df, rs);
    if (a.returns.size() < 30) throw Error(Errc::TooFewObservations, "fewer than 30 aligned non-overlapping returns");

    const double eps = s.num("epsilon", 0.01);
    const double tau_star = s.num("tau_star", 0.046);
    auto taus = s.taus(qb::default_tau_grid());
    double rf = 0;
    for (const auto& d : a.dists) rf += d.rf_gross;
    rf /= static_cast<double>(a.dists.size());

    auto kc = qb::kernel_cdf(a.returns, std::nullopt, 2001, h);
    auto urn = qb::unconditional_rn_cdf(a.dists);
    auto qc = qb::rn_quantile_curve(urn, taus);
    kc.dist.horizon_days = qc.horizon_days;
    auto o = qb::odc(kc.dist, qc);
    auto loc = qb::local_bound(o, rf, eps);
    double hj = qb::hj_bound(qb::mean(a.returns), qb::sample_sd(a.returns), rf);

    std::optional<qb::BoundCurve> alt;
    if (s.has("alt_kind")) {
        auto kind = qb::parse_bound_kind(s.str("alt_kind"));
        double def = kind == qb::BoundKind::Snow ? 2.0 : -1.0;
        alt = qb::alt_bounds(o, qc, rf, kind, s.num("alt_param", def));
    }
    auto out = s.out();
    std::ofstream bc(out / "bounds.csv");
    bc << "tau,phi,local_bound,hj_bound" << (alt ? ",alt_kind,alt_value" : "") << '\n';
    std::map<double, double> alt_at;
    if (alt)
        for (std::size_t i = 0; i < alt->taus.size(); ++i) alt_at[alt->taus[i]] = alt->values[i];
    for (std::size_t i = 0; i < loc.taus.size(); ++i) {
        double t = loc.taus[i];
        auto k = static_cast<std::size_t>(std::find(o.taus.begin(), o.taus.end(), t) - o.taus.begin());
        bc << fmt(t) << ',' << fmt(o.phi[k]) << ',' << fmt(loc.values[i]) << ',' << fmt(hj);
        if (alt) {
            auto f = alt_at.find(t);
            bc << ',' << qb::bound_kind_name(alt->kind) << ',' << (f == alt_at.end() ? "" : fmt(f->second));
        }
        bc << '\n';
    }

    qb::DominanceOptions dopt;
    dopt.n_boot = s.integer("n_boot", 1000);
    dopt.seed = s.seed();
    dopt.block_length = s.integer("block_length", 12);
    dopt.epsilon = eps;
    dopt.jobs = s.jobs();
    dopt.bandwidth = kc.bandwidth;
    auto dr = qb::dominance_test(a.returns, a.dists, tau_star, rf, dopt);
    qbio::write_json((out / "dominance.json").string(),
                     with_schema({{"tau_star", dr.tau_star},
                                  {"T_stat", dr.T_stat},
                                  {"p_value", dr.p_value},
                                  {"n_boot", dr.n_boot},
                                  {"seed", dr.seed},
                                  {"block_length", dr.block_length},
                                  {"local", dr.local},
                                  {"hj", dr.hj},
                                  {"bandwidth", dr.bandwidth},
                                  {"n_obs", a.returns.size()},
                                  {"rf", rf}}));
    std::printf("bounds: %zu observations, local(%.4g)=%.4g hj=%.4g p=%.3f\n", a.returns.size(), tau_star, dr.local,
                dr.hj, dr.p_value);
    return 0;
}

int cmd_riskadjust(const Settings& s) {
    auto df = qbio::read_dists(s.path("dist"));
    const int h = s.integer("horizon", df.horizon_days ? df.horizon_days : 30);
    auto taus = s.taus({0.05, 0.1, 0.2});
    const double step = s.num("h", 0.001);

    std::vector<std::vector<qb::RiskAdjustment>> rows(df.dists.size());
    qb::parallel_for(df.dists.size(), s.jobs(), [&](std::size_t i) {
        for (double t : taus) rows[i].push_back(qb::risk_adjustment(df.dists[i], t, step));
    });
    auto out = s.out();
    std::ofstream ra(out / "ra.csv");
    ra << "date,horizon,tau,q_tilde,lb,pdf_at_q,ra,q_hat,lb_negative\n";
    std::size_t crossings = 0, negatives = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (qb::predictor_crossing_rate(rows[i]) > 0) ++crossings;
        for (const auto& r : rows[i]) {
            negatives += r.lb_negative();
            ra << (r.date ? r.date->iso() : "") << ',' << h << ',' << fmt(r.tau) << ',' << fmt(r.q_tilde) << ','
               << fmt(r.lb) << ',' << fmt(r.pdf_at_q) << ',' << fmt(r.ra) << ',' << fmt(r.q_hat) << ','
               << (r.lb_negative() ? 1 : 0) << '\n';
        }
    }
    double crossing_rate = rows.empty() ? 0.0 : static_cast<double>(crossings) / static_cast<double>(rows.size());

    if (s.has("index")) {
        auto rs = qb::build_returns(qbio::read_index(s.path("index")), h, true);
        std::map<qb::Date, double> ret;
        for (std::size_t i = 0; i < rs.dates.size(); ++i) ret[rs.dates[i]] = rs.values[i];
        json fits = json::array();
        std::optional<qb::ResamplePlan> plan_used;
        for (std::size_t k = 0; k < taus.size(); ++k) {
            std::vector<std::pair<double, double>> obs;  // (excess return, ra)
            for (const auto& rr : rows)
                if (rr[k].date && ret.count(*rr[k].date)) obs.emplace_back(ret[*rr[k].date] - rr[k].q_tilde, rr[k].ra);
            if (obs.size() < 10) throw Error(Errc::InsufficientData, "fewer than 10 aligned observations");
            qb::QRDesign d;
            d.tau = taus[k];
            d.y.resize(static_cast<Eigen::Index>(obs.size()));
            d.X.resize(static_cast<Eigen::Index>(obs.size()), 1);
            for (std::size_t i = 0; i < obs.size(); ++i) {
                d.y(static_cast<Eigen::Index>(i)) = obs[i].first;
                d.X(static_cast<Eigen::Index>(i), 0) = obs[i].second;
            }
            auto fit = qb::qr_fit(d);
            auto plan = boot_plan(s, h, obs.size());
            add_wald(fit, d, plan, s.jobs());
            plan_used = plan;
            json j = fit_json(fit);
            j["tau"] = taus[k];
            fits.push_back(j);
        }
        json o = with_schema({{"horizon_days", h}, {"regressors", {"ra"}}, {"dependent", "return_minus_q_tilde"}, {"fits", fits}});
        if (plan_used) o["bootstrap"] = plan_json(*plan_used);
        qbio::write_json((out / "qrfit_ra.json").string(), o);
    }
    qbio::write_json((out / "ra_summary.json").string(),
                     with_schema({{"dates", rows.size()},
                                  {"taus", taus},
                                  {"lb_negative_rows", negatives},
                                  {"crossing_rate", crossing_rate},
                                  {"first_order_approx", true},
                                  {"theta_source", "empirical_default"}}));
    std::printf("riskadjust: %zu dates, %zu negative bounds, crossing rate %.4f\n", rows.size(), negatives,
                crossing_rate);
    return 0;
}

qb::Utility parse_utility(const Settings& s) {
    qb::Utility u;
    auto k = s.str("utility", "log");
    if (k == "log")
        u.kind = qb::UtilityKind::Log;
    else if (k == "crra")
        u.kind = qb::UtilityKind::Crra;
    else if (k == "exponential")
        u.kind = qb::UtilityKind::Exponential;
    else
        throw Error(Errc::InvalidArgument, "unknown utility '" + k + "'");
    u.gamma = s.num("gamma", 1.0);
    return u;
}

qb::Disaster parse_disaster(const Settings& s) {
    qb::Disaster d;
    d.beta_discount = s.num("beta_discount", d.beta_discount);
    d.gamma = s.num("gamma", d.gamma);
    d.mu = s.num("mu", d.mu);
    d.sigma = s.num("sigma", d.sigma);
    d.theta = s.num("theta", d.theta);
    d.nu = s.num("nu", d.nu);
    d.kappa = s.num("kappa", d.kappa);
    d.leverage = s.num("leverage", d.leverage);
    d.j_max = s.integer("j_max", d.j_max);
    d.tilt_diffusion = s.flag("tilt_diffusion");
    return d;
}

qb::Pareto parse_pareto(const Settings& s) {
    qb::Pareto p;
    p.A = s.num("A", p.A);
    p.alpha = s.num("alpha", p.alpha);
    p.B = s.num("B", p.B);
    p.beta = s.num("beta", p.beta);
    return p;
}

qb::ModelSpec parse_model(const Settings& s) {
    auto v = s.str("variant", "");
    if (v == "joint_normal") {
        return qb::JointNormal::priced(s.num("sigma_R", 0.16), s.num("rf", 1.0), s.num("sigma_M", 0.4),
                                       s.num("rho", -0.5));
    }
    if (v == "lognormal") {
        return qb::Lognormal::priced(s.num("sigma_R", 0.2), s.num("r_f", 0.02), s.num("sigma_M", 0.4),
                                     s.num("rho", -0.5), s.num("lambda", 1.0));
    }
    if (v == "pareto") return parse_pareto(s);
    if (v == "disaster") return parse_disaster(s);
    if (v == "rep_agent") {
        qb::BsPeriod base{s.num("r", 0.02), s.num("sigma", 0.2), s.num("r", 0.02), s.num("years", 1.0)};
        qb::RepAgent ra{parse_utility(s), qb::bs_period_distribution(base, {0.2, 3.0, 4001})};
        return ra;
    }
    throw Error(Errc::InvalidArgument, "unknown model variant '" + v + "'");
}

int cmd_model(const Settings& s) {
    auto m = parse_model(s);
    auto taus = s.taus(qb::default_tau_grid());
    auto b = qb::model_local_and_hj(m, taus);
    double rf = qb::model_rf(m);
    auto out = s.out();
    std::ofstream mb(out / "model_bounds.csv");
    mb << "tau,phi,local_bound,hj_bound,sdf_vol,q_tilde,q_physical\n";
    std::size_t peak = 0;
    for (std::size_t i = 0; i < taus.size(); ++i) {
        if (b.local.values[i] > b.local.values[peak]) peak = i;
        mb << fmt(taus[i]) << ',' << fmt(b.odc.phi[i]) << ',' << fmt(b.local.values[i]) << ',' << fmt(b.hj) << ','
           << fmt(b.sdf_vol) << ',' << fmt(qb::model_quantile(m, qb::Measure::RiskNeutral, taus[i])) << ','
           << fmt(qb::model_quantile(m, qb::Measure::Physical, taus[i])) << '\n';
    }
    json j = with_schema({{"variant", qb::model_name(m)},
                          {"rf", rf},
                          {"hj", b.hj},
                          {"sdf_vol", b.sdf_vol},
                          {"equity_premium", b.equity_premium},
                          {"peak_tau", taus[peak]},
                          {"peak_local", b.local.values[peak]}});
    if (auto* l = std::get_if<qb::Lognormal>(&m)) {
        j["efficiency"] = qb::lognormal_efficiency(*l);
        j["efficiency_scan"] = qb::lognormal_efficiency_scan(*l, taus);
    }
    qbio::write_json((out / "model_summary.json").string(), j);
    std::printf("model %s: peak tau %.4g, local %.4g, hj %.4g\n", qb::model_name(m).c_str(), taus[peak],
                b.local.values[peak], b.hj);
    return 0;
}

// Daily calendar with a geometric Brownian index and Black-Scholes chains bracketing the horizon.
// With stochastic_vol the daily volatility is a persistent log AR(1) around sigma.
void write_chain_corpus(const Settings& s, const fs::path& out, int n_days, bool stochastic_vol) {
    const int h = s.integer("horizon", 30);
    const double sigma_bar = s.num("sigma", 0.2);
    qb::BsPeriod law{s.num("mu", 0.08), sigma_bar, s.num("r", 0.02), 1.0 / 365.0};
    double log_dev = 0;
    const int n_strikes = s.integer("n_strikes", 40);
    const double spread = s.num("spread", 0.01);  // relative to mid
    qb::Rng rng(qb::stream_seed(s.seed(), 0xC0FFEE));
    qb::Date d0 = qb::Date::parse(s.str("start", "2020-01-01"));
    std::vector<std::pair<qb::Date, double>> levels;
    std::vector<qb::RawOptionQuote> quotes;
    double S = 100;
    std::vector<int> mats = {std::max(2, h - 5), h + 7};
    for (int t = 0; t < n_days; ++t) {
        qb::Date d = d0 + t;
        levels.emplace_back(d, S);
        if (stochastic_vol) {
            log_dev = 0.98 * log_dev + 0.05 * rng.normal();
            law.sigma = sigma_bar * std::exp(log_dev);
        }
        for (int mat : mats) {
            auto c = qb::synthetic_chain(law, d, mat, n_strikes);
            for (const auto& q : c.quotes) {
                qb::RawOptionQuote r;
                r.observation_date = d;
                r.expiry_date = c.expiry_date;
                r.strike = q.strike * S;
                r.underlying = S;
                r.forward = c.forward * S;
                r.risk_free_gross = c.risk_free_gross;
                double mid = q.put_mid * S;
                if (q.from_call) {
                    r.flag = qb::OptionFlag::Call;
                    mid = qb::call_from_put(mid, *r.forward, r.strike, 1.0 / c.risk_free_gross);
                }
                if (!(mid > 0)) continue;
                r.bid = mid * (1 - spread / 2);
                r.ask = mid * (1 + spread / 2);
                quotes.push_back(r);
            }
        }
        S *= std::exp(law.log_mean(false) + law.log_sd() * rng.normal());
    }
    qbio::write_index((out / "index.csv").string(), levels);
    qbio::write_options((out / "options.csv").string(), quotes);
}

int cmd_simulate(const Settings& s) {
    auto kind = qb::parse_dgp(s.str("dgp", "bs_timevarying"));
    const int n = s.integer("n_periods", 3000);
    qb::DgpParams p;
    p.horizon_days = s.integer("horizon", 30);
    p.fixed = {s.num("mu", 0.08), s.num("sigma", 0.2), s.num("r", 0.02), p.horizon_days / 365.0};
    p.disaster = parse_disaster(s);
    p.pareto = parse_pareto(s);
    auto sim = qb::simulate_dgp(kind, p, n, s.seed());
    auto out = s.out();
    std::ofstream rc(out / "returns.csv");
    bool bs = !sim.periods.empty();
    rc << "t,return" << (bs ? ",mu,sigma,r,rf_gross" : "") << '\n';
    for (std::size_t t = 0; t < sim.returns.size(); ++t) {
        rc << t << ',' << fmt(sim.returns[t]);
        if (bs) {
            const auto& q = sim.periods[t];
            rc << ',' << fmt(q.mu) << ',' << fmt(q.sigma) << ',' << fmt(q.r) << ',' << fmt(q.rf());
        }
        rc << '\n';
    }
    if (s.flag("chains")) write_chain_corpus(s, out, n, kind != qb::DgpKind::BsFixed);
    std::printf("simulate %s: %d periods\n", qb::dgp_name(kind), n);
    return 0;
}

int emit_error(const std::string& code, const std::string& msg, int exit_code) {
    json j = with_schema({{"error", code}, {"message", msg}, {"exit_code", exit_code}});
    std::cerr << j.dump() << std::endl;
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantile-based SDF bounds and risk adjustments"};
    app.require_subcommand(1);
    app.fallthrough();

    std::map<std::string, std::string> flags;
    auto global = [&](const std::string& name, const std::string& key, const std::string& desc) {
        app.add_option_function<std::string>(name, [&flags, key](const std::string& v) { flags[key] = v; }, desc);
    };
    std::string config;
    app.add_option("--config", config, "key = value settings file; flags win");
    global("--seed", "seed", "master seed for stochastic commands");
    global("--out", "out", "output directory");
    global("--horizon", "horizon", "horizon in calendar days");
    global("--taus", "taus", "comma-separated quantile levels");
    global("--jobs", "jobs", "worker threads");

    struct Sub {
        const char* name;
        const char* help;
        int (*run)(const Settings&);
        std::vector<std::pair<std::string, std::string>> opts;  // flag, key
    };
    std::vector<Sub> subs = {
        {"rnd-extract", "fit risk-neutral distributions per date", cmd_rnd_extract, {{"--options", "options"}}},
        {"qr",
         "quantile regressions of returns on risk-neutral quantiles",
         cmd_qr,
         {{"--rnq", "rnq"}, {"--index", "index"}, {"--extra", "extra"}, {"--n-boot", "n_boot"},
          {"--block-length", "block_length"}, {"--scheme", "scheme"}, {"--taper", "taper"}, {"--oos-window", "oos_window"}}},
        {"bounds",
         "ordinal dominance curve, local and HJ bounds, dominance test",
         cmd_bounds,
         {{"--dist", "dist"}, {"--index", "index"}, {"--tau-star", "tau_star"}, {"--n-boot", "n_boot"},
          {"--block-length", "block_length"}, {"--epsilon", "epsilon"}, {"--alt-kind", "alt_kind"},
          {"--alt-param", "alt_param"}}},
        {"riskadjust",
         "lower bounds, risk adjustments and quantile predictors",
         cmd_riskadjust,
         {{"--dist", "dist"}, {"--index", "index"}, {"--n-boot", "n_boot"}, {"--block-length", "block_length"},
          {"--step", "h"}}},
        {"model", "analytic model bounds", cmd_model, {{"--variant", "variant"}}},
        {"simulate",
         "simulate a data-generating process",
         cmd_simulate,
         {{"--dgp", "dgp"}, {"--n-periods", "n_periods"}, {"--chains", "chains"}}},
    };
    std::vector<CLI::App*> subapps;
    for (auto& s : subs) {
        auto* sa = app.add_subcommand(s.name, s.help);
        for (auto& [flag, key] : s.opts) {
            std::string k = key;
            sa->add_option_function<std::string>(flag, [&flags, k](const std::string& v) { flags[k] = v; });
        }
        subapps.push_back(sa);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return emit_error("ParseError", e.what(), 2);
    }

    try {
        Settings s;
        if (!config.empty()) s.kv = qbio::read_config(config);
        for (auto& [k, v] : flags) s.kv[k] = v;
        for (std::size_t i = 0; i < subs.size(); ++i)
            if (subapps[i]->parsed()) return subs[i].run(s);
        return emit_error("InvalidArgument", "no command", 2);
    } catch (const Error& e) {
        return emit_error(qb::errc_name(e.code()), e.what(), qb::is_input_error(e.code()) ? 2 : 3);
    } catch (const std::exception& e) {
        return emit_error("InvalidArgument", e.what(), 2);
    }
}
