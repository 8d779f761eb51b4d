#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qbound/market_data.hpp"
#include "qbound/rnd.hpp"

namespace qbio {

constexpr int kSchemaVersion = 1;

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    int col(const std::string& name, bool required = true) const;
};

Table read_csv(const std::string& path);

// key = value lines; '#' starts a comment.
std::map<std::string, std::string> read_config(const std::string& path);

double to_double(const std::string& s, const std::string& what);
int to_int(const std::string& s, const std::string& what);
std::vector<double> parse_list(const std::string& s);

// Columns: date,expiry,strike,flag,bid,ask,underlying,forward,rf_gross (forward may be blank).
std::vector<qb::RawOptionQuote> read_options(const std::string& path);
void write_options(const std::string& path, const std::vector<qb::RawOptionQuote>& quotes);

// Columns: date,level.
std::vector<std::pair<qb::Date, double>> read_index(const std::string& path);
void write_index(const std::string& path, const std::vector<std::pair<qb::Date, double>>& levels);

nlohmann::json dist_to_json(const qb::DistributionEstimate& d);
qb::DistributionEstimate dist_from_json(const nlohmann::json& j);

struct DistFile {
    int horizon_days = 0;
    std::vector<qb::DistributionEstimate> dists;
};
void write_dists(const std::string& path, const DistFile& f, const nlohmann::json& extra = {});
DistFile read_dists(const std::string& path);

void write_json(const std::string& path, const nlohmann::json& j);

std::string fmt(double v);

}  // namespace qbio
