#pragma once

#include <compare>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qb {

// Calendar date stored as days since 1970-01-01.
struct Date {
    int days = 0;

    static Date from_ymd(int y, unsigned m, unsigned d);
    static Date parse(const std::string& iso);  // YYYY-MM-DD
    void to_ymd(int& y, unsigned& m, unsigned& d) const;
    std::string iso() const;

    Date operator+(int n) const { return Date{days + n}; }
    int operator-(const Date& o) const { return days - o.days; }
    auto operator<=>(const Date&) const = default;
};

enum class OptionFlag { Put, Call };

struct RawOptionQuote {
    Date observation_date;
    Date expiry_date;
    double strike = 0;
    OptionFlag flag = OptionFlag::Put;
    double bid = 0;
    double ask = 0;
    double underlying = 0;
    std::optional<double> forward;
    double risk_free_gross = 1;
};

// One strike of a cleaned chain, expressed as an out-of-the-money-side put price.
struct ChainQuote {
    double strike = 0;
    double put_mid = 0;
    double spread = 0;
    bool from_call = false;
};

struct OptionChain {
    Date observation_date;
    Date expiry_date;
    int maturity_days = 0;
    double underlying = 0;
    double forward = 0;
    double risk_free_gross = 1;
    std::vector<ChainQuote> quotes;  // strictly increasing strikes

    double years() const { return maturity_days / 365.0; }
};

struct ReturnSeries {
    std::vector<Date> dates;
    int horizon_days = 0;
    std::vector<double> values;
    bool overlapping = true;
};

struct DroppedGroup {
    Date observation_date;
    Date expiry_date;
    std::string reason;
};

struct CleanOptions {
    int min_maturity_days = 7;
    int max_maturity_days = 500;
};

std::vector<OptionChain> clean_quotes(const std::vector<RawOptionQuote>& raw, const CleanOptions& opt = {},
                                      std::vector<DroppedGroup>* dropped = nullptr);

// Inverse of cleaning: each chain quote becomes a put quote with bid/ask around the midprice.
std::vector<RawOptionQuote> chains_to_quotes(const std::vector<OptionChain>& chains);

// Static no-arbitrage bounds at midprice.
bool put_within_bounds(double put, double S, double K, double Rf);
bool call_within_bounds(double call, double S, double K, double Rf);

ReturnSeries build_returns(const std::vector<std::pair<Date, double>>& levels, int horizon_days,
                           bool overlapping);

}  // namespace qb
