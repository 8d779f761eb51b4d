#include "qbound/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "qbound/black_scholes.hpp"
#include "qbound/error.hpp"

namespace qb {

Date Date::from_ymd(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return Date{era * 146097 + static_cast<int>(doe) - 719468};
}

void Date::to_ymd(int& y, unsigned& m, unsigned& d) const {
    int z = days + 719468;
    const int era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<int>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp < 10 ? mp + 3 : mp - 9;
    y += m <= 2;
}

Date Date::parse(const std::string& s) {
    int y = 0;
    unsigned m = 0, d = 0;
    char tail = 0;
    if (s.size() != 10 || std::sscanf(s.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3 || m < 1 || m > 12 ||
        d < 1 || d > 31)
        throw Error(Errc::ParseError, "bad date '" + s + "'");
    Date out = from_ymd(y, m, d);
    int y2;
    unsigned m2, d2;
    out.to_ymd(y2, m2, d2);
    if (y2 != y || m2 != m || d2 != d) throw Error(Errc::ParseError, "bad date '" + s + "'");
    return out;
}

std::string Date::iso() const {
    int y;
    unsigned m, d;
    to_ymd(y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", y, m, d);
    return buf;
}

bool put_within_bounds(double put, double S, double K, double Rf) {
    double pv = K / Rf;
    return put >= std::max(0.0, pv - S) && put <= pv;
}

bool call_within_bounds(double call, double S, double K, double Rf) {
    return call >= std::max(0.0, S - K / Rf) && call <= S;
}

std::vector<OptionChain> clean_quotes(const std::vector<RawOptionQuote>& raw, const CleanOptions& opt,
                                      std::vector<DroppedGroup>* dropped) {
    if (raw.empty()) throw Error(Errc::InsufficientData, "clean_quotes: no quotes");

    struct Group {
        std::vector<const RawOptionQuote*> kept;
        std::size_t seen = 0;
    };
    std::map<std::pair<Date, Date>, Group> groups;
    for (const auto& q : raw) {
        auto& g = groups[{q.observation_date, q.expiry_date}];
        ++g.seen;
        int mat = q.expiry_date - q.observation_date;
        if (mat <= 0 || mat < opt.min_maturity_days || mat > opt.max_maturity_days) continue;
        if (!(q.bid > 0) || q.ask < q.bid || !(q.underlying > 0) || !(q.risk_free_gross > 0) || !(q.strike > 0))
            continue;
        double mid = 0.5 * (q.bid + q.ask);
        bool ok = q.flag == OptionFlag::Put ? put_within_bounds(mid, q.underlying, q.strike, q.risk_free_gross)
                                            : call_within_bounds(mid, q.underlying, q.strike, q.risk_free_gross);
        if (ok) g.kept.push_back(&q);
    }

    std::vector<OptionChain> out;
    for (auto& [key, g] : groups) {
        auto drop = [&](const std::string& why) {
            if (dropped) dropped->push_back({key.first, key.second, why});
        };
        if (g.kept.empty()) {
            drop("EmptyAfterCleaning: all quotes filtered");
            continue;
        }
        const RawOptionQuote& first = *g.kept.front();
        OptionChain ch;
        ch.observation_date = key.first;
        ch.expiry_date = key.second;
        ch.maturity_days = key.second - key.first;
        ch.underlying = first.underlying;
        ch.risk_free_gross = first.risk_free_gross;
        ch.forward = first.underlying * first.risk_free_gross;
        for (const auto* q : g.kept)
            if (q->forward && *q->forward > 0) {
                ch.forward = *q->forward;
                break;
            }
        const double D = 1.0 / ch.risk_free_gross;

        // Best quote per (strike, side): tighter spread wins.
        std::map<double, std::pair<const RawOptionQuote*, const RawOptionQuote*>> by_strike;
        for (const auto* q : g.kept) {
            auto& slot = by_strike[q->strike];
            auto& cur = q->flag == OptionFlag::Put ? slot.first : slot.second;
            if (!cur || (q->ask - q->bid) < (cur->ask - cur->bid)) cur = q;
        }
        for (auto& [K, pc] : by_strike) {
            const RawOptionQuote* put = pc.first;
            const RawOptionQuote* call = pc.second;
            bool prefer_put = K < ch.forward;
            const RawOptionQuote* use = prefer_put ? (put ? put : call) : (call ? call : put);
            ChainQuote cq;
            cq.strike = K;
            cq.spread = use->ask - use->bid;
            double mid = 0.5 * (use->bid + use->ask);
            if (use->flag == OptionFlag::Call) {
                cq.put_mid = put_from_call(mid, ch.forward, K, D);
                cq.from_call = true;
            } else {
                cq.put_mid = mid;
            }
            if (!(cq.put_mid > 0) || !put_within_bounds(cq.put_mid, ch.underlying, K, ch.risk_free_gross)) continue;
            ch.quotes.push_back(cq);
        }
        if (ch.quotes.empty()) {
            drop("EmptyAfterCleaning: no quote survived parity conversion");
            continue;
        }
        out.push_back(std::move(ch));
    }
    return out;
}

std::vector<RawOptionQuote> chains_to_quotes(const std::vector<OptionChain>& chains) {
    std::vector<RawOptionQuote> out;
    for (const auto& ch : chains) {
        for (const auto& q : ch.quotes) {
            RawOptionQuote r;
            r.observation_date = ch.observation_date;
            r.expiry_date = ch.expiry_date;
            r.strike = q.strike;
            r.flag = OptionFlag::Put;
            r.bid = q.put_mid - 0.5 * q.spread;
            r.ask = q.put_mid + 0.5 * q.spread;
            r.underlying = ch.underlying;
            r.forward = ch.forward;
            r.risk_free_gross = ch.risk_free_gross;
            out.push_back(r);
        }
    }
    return out;
}

ReturnSeries build_returns(const std::vector<std::pair<Date, double>>& levels, int horizon_days,
                           bool overlapping) {
    if (horizon_days < 1) throw Error(Errc::InvalidArgument, "horizon must be positive");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (!(levels[i].second > 0)) throw Error(Errc::InvalidArgument, "index levels must be positive");
        if (i > 0 && !(levels[i - 1].first < levels[i].first))
            throw Error(Errc::InvalidArgument, "index dates must be strictly increasing");
    }
    ReturnSeries rs;
    rs.horizon_days = horizon_days;
    rs.overlapping = overlapping;

    auto end_index = [&](std::size_t i) -> std::ptrdiff_t {
        Date target = levels[i].first + horizon_days;
        auto it = std::lower_bound(levels.begin(), levels.end(), target,
                                   [](const auto& a, const Date& d) { return a.first < d; });
        if (it == levels.end() || it->first - target > 3) return -1;
        return it - levels.begin();
    };

    if (overlapping) {
        for (std::size_t i = 0; i < levels.size(); ++i) {
            auto j = end_index(i);
            if (j < 0) continue;
            rs.dates.push_back(levels[i].first);
            rs.values.push_back(levels[static_cast<std::size_t>(j)].second / levels[i].second);
        }
    } else {
        // Start at the first trading date on or after the 15th, then step at least N days.
        std::size_t i = 0;
        while (i < levels.size()) {
            int y;
            unsigned m, d;
            levels[i].first.to_ymd(y, m, d);
            if (d >= 15) break;
            ++i;
        }
        while (i < levels.size()) {
            auto j = end_index(i);
            if (j >= 0) {
                rs.dates.push_back(levels[i].first);
                rs.values.push_back(levels[static_cast<std::size_t>(j)].second / levels[i].second);
            }
            Date next = levels[i].first + horizon_days;
            auto it = std::lower_bound(levels.begin() + static_cast<std::ptrdiff_t>(i), levels.end(), next,
                                       [](const auto& a, const Date& dd) { return a.first < dd; });
            i = static_cast<std::size_t>(it - levels.begin());
        }
    }
    if (rs.values.empty()) throw Error(Errc::InsufficientData, "no date pair spans the horizon");
    return rs;
}

}  // namespace qb
