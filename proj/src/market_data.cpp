#include "qrm/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include <spdlog/spdlog.h>

#include "qrm/errors.hpp"
#include "qrm/rng.hpp"

namespace qrm::market {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

// Places bid/ask around `mid` so that ask / bid - 1 == spread.
std::pair<double, double> quote_around(double mid, double spread) {
    const double bid = 2.0 * mid / (2.0 + spread);
    return {bid, bid * (1.0 + spread)};
}

}  // namespace

const MarketSnapshot& validate_snapshot(const MarketSnapshot& raw) {
    auto fail = [&](const char* what) {
        throw InvalidQuote("option " + raw.option_id + " day " + std::to_string(raw.date) + ": " +
                           what);
    };
    if (!positive_finite(raw.s_b) || !positive_finite(raw.s_a)) fail("non-positive stock price");
    if (!positive_finite(raw.u_b) || !positive_finite(raw.u_a)) fail("non-positive option price");
    if (!positive_finite(raw.strike)) fail("non-positive strike");
    if (!positive_finite(raw.ivol)) fail("non-positive implied volatility");
    if (!(raw.s_b < raw.s_a)) fail("stock bid >= ask");
    if (!(raw.u_b < raw.u_a)) fail("option bid >= ask");
    return raw;
}

SpreadRatios spread_ratios(const MarketSnapshot& snap) {
    SpreadRatios r;
    r.f_s = snap.s_a / snap.s_b - 1.0;
    r.f_u = snap.u_a / snap.u_b - 1.0;
    r.outside_typical_range = r.f_s > kTypicalStockSpreadMax || r.f_u > kTypicalOptionSpreadMax;
    return r;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double bs_price(double s, double strike, double sigma, double tau) {
    if (!(s > 0.0) || !(strike > 0.0) || !(sigma > 0.0)) {
        throw DomainError("bs_price: s, strike and sigma must be positive");
    }
    if (!(tau >= 0.0)) throw DomainError("bs_price: tau must be >= 0");
    if (tau == 0.0) return std::max(s - strike, 0.0);

    const double vol_sqrt_t = sigma * std::sqrt(tau);
    const double log_moneyness = std::log(s / strike);
    const double theta_plus = (log_moneyness + 0.5 * vol_sqrt_t * vol_sqrt_t) / vol_sqrt_t;
    const double theta_minus = theta_plus - vol_sqrt_t;
    return s * normal_cdf(theta_plus) - strike * normal_cdf(theta_minus);
}

std::vector<MarketSnapshot> simulate_market(const SyntheticMarketConfig& cfg) {
    if (!(cfg.s0 > 0.0)) throw ConfigError("simulate_market: s0 must be positive");
    if (!(cfg.vol >= 0.0)) throw ConfigError("simulate_market: vol must be >= 0");
    if (!(cfg.effective_implied_vol() > 0.0)) {
        throw ConfigError("simulate_market: implied volatility must be positive");
    }
    if (cfg.n_days < 4) throw ConfigError("simulate_market: n_days must be >= 4");
    if (!(cfg.stock_spread > 0.0) || !(cfg.option_spread > 0.0)) {
        throw ConfigError("simulate_market: spreads must be positive");
    }
    if (!(cfg.strike > 0.0)) throw ConfigError("simulate_market: strike must be positive");
    if (cfg.stock_spread > kTypicalStockSpreadMax || cfg.option_spread > kTypicalOptionSpreadMax) {
        spdlog::warn("simulate_market: spread fractions outside the typical range");
    }

    Rng rng(cfg.seed);
    const double dt = 1.0 / kTradingDaysPerYear;
    const double step_drift = (cfg.drift - 0.5 * cfg.vol * cfg.vol) * dt;
    const double step_vol = cfg.vol * std::sqrt(dt);
    const double ivol = cfg.effective_implied_vol();

    std::vector<MarketSnapshot> out;
    out.reserve(static_cast<std::size_t>(cfg.n_days));
    double stock_mid = cfg.s0;
    for (int day = 0; day < cfg.n_days; ++day) {
        if (day > 0) stock_mid *= std::exp(step_drift + step_vol * rng.normal());
        const int remaining = std::max(cfg.maturity_days - day, 0);
        const double option_mid = std::max(
            bs_price(stock_mid, cfg.strike, ivol, remaining / kTradingDaysPerYear), kMinOptionMid);

        MarketSnapshot snap;
        snap.date = cfg.first_date + day;
        snap.option_id = cfg.option_id;
        snap.strike = cfg.strike;
        std::tie(snap.s_b, snap.s_a) = quote_around(stock_mid, cfg.stock_spread);
        std::tie(snap.u_b, snap.u_a) = quote_around(option_mid, cfg.option_spread);
        snap.ivol = ivol;
        out.push_back(std::move(snap));
    }
    return out;
}

}  // namespace qrm::market
