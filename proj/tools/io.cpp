#include "io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qbound/error.hpp"

namespace qbio {

using qb::Errc;
using qb::Error;

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, sep)) out.push_back(trim(cur));
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::InvalidArgument, "cannot open '" + path + "'");
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::InvalidArgument, "cannot write '" + path + "'");
    return out;
}

}  // namespace

int Table::col(const std::string& name, bool required) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    if (required) throw Error(Errc::ParseError, "missing column '" + name + "'");
    return -1;
}

Table read_csv(const std::string& path) {
    auto in = open_in(path);
    Table t;
    std::string line;
    if (!std::getline(in, line)) throw Error(Errc::ParseError, "'" + path + "' is empty");
    t.header = split(line, ',');
    std::size_t ln = 1;
    while (std::getline(in, line)) {
        ++ln;
        if (trim(line).empty()) continue;
        auto row = split(line, ',');
        if (row.size() != t.header.size())
            throw Error(Errc::ParseError, path + ":" + std::to_string(ln) + ": expected " +
                                              std::to_string(t.header.size()) + " fields");
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::map<std::string, std::string> read_config(const std::string& path) {
    auto in = open_in(path);
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        auto h = line.find('#');
        if (h != std::string::npos) line.resize(h);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw Error(Errc::ParseError, path + ":" + std::to_string(ln) + ": expected key = value");
        std::string v = trim(line.substr(eq + 1));
        if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
        out[trim(line.substr(0, eq))] = v;
    }
    return out;
}

double to_double(const std::string& s, const std::string& what) {
    double v = 0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw Error(Errc::ParseError, "bad number '" + s + "' for " + what);
    return v;
}

int to_int(const std::string& s, const std::string& what) {
    int v = 0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw Error(Errc::ParseError, "bad integer '" + s + "' for " + what);
    return v;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    for (auto& p : split(s, ','))
        if (!p.empty()) out.push_back(to_double(p, "list"));
    return out;
}

std::vector<qb::RawOptionQuote> read_options(const std::string& path) {
    auto t = read_csv(path);
    int cd = t.col("date"), ce = t.col("expiry"), ck = t.col("strike"), cf = t.col("flag"), cb = t.col("bid"),
        ca = t.col("ask"), cu = t.col("underlying"), cw = t.col("forward", false), cr = t.col("rf_gross");
    std::vector<qb::RawOptionQuote> out;
    out.reserve(t.rows.size());
    for (const auto& r : t.rows) {
        qb::RawOptionQuote q;
        q.observation_date = qb::Date::parse(r[cd]);
        q.expiry_date = qb::Date::parse(r[ce]);
        q.strike = to_double(r[ck], "strike");
        if (r[cf] == "P" || r[cf] == "p" || r[cf] == "put")
            q.flag = qb::OptionFlag::Put;
        else if (r[cf] == "C" || r[cf] == "c" || r[cf] == "call")
            q.flag = qb::OptionFlag::Call;
        else
            throw Error(Errc::ParseError, "bad option flag '" + r[cf] + "'");
        q.bid = to_double(r[cb], "bid");
        q.ask = to_double(r[ca], "ask");
        q.underlying = to_double(r[cu], "underlying");
        if (cw >= 0 && !r[cw].empty()) q.forward = to_double(r[cw], "forward");
        q.risk_free_gross = to_double(r[cr], "rf_gross");
        out.push_back(q);
    }
    return out;
}

void write_options(const std::string& path, const std::vector<qb::RawOptionQuote>& quotes) {
    auto out = open_out(path);
    out << "date,expiry,strike,flag,bid,ask,underlying,forward,rf_gross\n";
    for (const auto& q : quotes) {
        out << q.observation_date.iso() << ',' << q.expiry_date.iso() << ',' << fmt(q.strike) << ','
            << (q.flag == qb::OptionFlag::Put ? "P" : "C") << ',' << fmt(q.bid) << ',' << fmt(q.ask) << ','
            << fmt(q.underlying) << ',' << (q.forward ? fmt(*q.forward) : "") << ',' << fmt(q.risk_free_gross)
            << '\n';
    }
}

std::vector<std::pair<qb::Date, double>> read_index(const std::string& path) {
    auto t = read_csv(path);
    int cd = t.col("date"), cl = t.col("level");
    std::vector<std::pair<qb::Date, double>> out;
    for (const auto& r : t.rows) out.emplace_back(qb::Date::parse(r[cd]), to_double(r[cl], "level"));
    return out;
}

void write_index(const std::string& path, const std::vector<std::pair<qb::Date, double>>& levels) {
    auto out = open_out(path);
    out << "date,level\n";
    for (const auto& [d, v] : levels) out << d.iso() << ',' << fmt(v) << '\n';
}

nlohmann::json dist_to_json(const qb::DistributionEstimate& d) {
    nlohmann::json j;
    j["date"] = d.date ? d.date->iso() : "";
    j["horizon_days"] = d.horizon_days;
    j["rf_gross"] = d.rf_gross;
    j["measure"] = d.measure == qb::Measure::RiskNeutral ? "risk_neutral" : "physical";
    j["grid"] = {{"lo", d.grid.front()}, {"hi", d.grid.back()}, {"n", d.grid.size()}};
    j["cdf"] = d.cdf;
    j["pdf"] = d.pdf;
    return j;
}

qb::DistributionEstimate dist_from_json(const nlohmann::json& j) {
    try {
        qb::DistributionEstimate d;
        auto date = j.at("date").get<std::string>();
        if (!date.empty()) d.date = qb::Date::parse(date);
        d.horizon_days = j.at("horizon_days").get<int>();
        d.rf_gross = j.at("rf_gross").get<double>();
        d.measure = j.at("measure").get<std::string>() == "physical" ? qb::Measure::Physical : qb::Measure::RiskNeutral;
        const auto& g = j.at("grid");
        std::size_t n = g.at("n").get<std::size_t>();
        double lo = g.at("lo").get<double>(), hi = g.at("hi").get<double>();
        d.grid.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            d.grid[i] = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        d.cdf = j.at("cdf").get<std::vector<double>>();
        d.pdf = j.at("pdf").get<std::vector<double>>();
        if (d.cdf.size() != n || d.pdf.size() != n) throw Error(Errc::ParseError, "distribution arrays do not match grid");
        return d;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::ParseError, std::string("malformed distribution: ") + e.what());
    }
}

void write_dists(const std::string& path, const DistFile& f, const nlohmann::json& extra) {
    nlohmann::json j = extra.is_object() ? extra : nlohmann::json::object();
    j["schema_version"] = kSchemaVersion;
    j["horizon_days"] = f.horizon_days;
    j["dists"] = nlohmann::json::array();
    for (const auto& d : f.dists) j["dists"].push_back(dist_to_json(d));
    write_json(path, j);
}

DistFile read_dists(const std::string& path) {
    auto in = open_in(path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::ParseError, "'" + path + "' is not valid json");
    }
    DistFile f;
    f.horizon_days = j.value("horizon_days", 0);
    if (!j.contains("dists")) throw Error(Errc::ParseError, "'" + path + "' has no dists");
    for (const auto& d : j["dists"]) f.dists.push_back(dist_from_json(d));
    return f;
}

void write_json(const std::string& path, const nlohmann::json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace qbio
