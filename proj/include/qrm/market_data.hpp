#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qrm::market {

/// Trading days per year; one trading day is 1/255 years.
inline constexpr double kTradingDaysPerYear = 255.0;

/// Upper ends of the spread ratios usually observed on real quotes.
inline constexpr double kTypicalStockSpreadMax = 0.003;
inline constexpr double kTypicalOptionSpreadMax = 0.27;

/// End-of-day quotes for one option on one trading day.
struct MarketSnapshot {
    int date = 0;  ///< consecutive trading-day index
    std::string option_id;
    std::string expiry;  ///< carried through from input files, not used in any computation
    double strike = 0.0;
    double s_b = 0.0;  ///< stock bid
    double s_a = 0.0;  ///< stock ask
    double u_b = 0.0;  ///< option bid
    double u_a = 0.0;  ///< option ask
    double ivol = 0.0;  ///< annualized implied volatility

    double stock_mid() const { return 0.5 * (s_a + s_b); }
    double option_mid() const { return 0.5 * (u_a + u_b); }
};

struct SpreadRatios {
    double f_s = 0.0;  ///< s_a / s_b - 1
    double f_u = 0.0;  ///< u_a / u_b - 1
    bool outside_typical_range = false;
};

/// Throws InvalidQuote unless bids are strictly below asks and every price
/// and the volatility are positive and finite.
const MarketSnapshot& validate_snapshot(const MarketSnapshot& raw);

SpreadRatios spread_ratios(const MarketSnapshot& snap);

/// Standard normal CDF, via erfc (absolute error well below 1e-12).
double normal_cdf(double x);

/// Black-Scholes call price with zero interest rate. `tau` is in years;
/// tau == 0 returns the payoff max(s - K, 0).
double bs_price(double s, double strike, double sigma, double tau);

struct SyntheticMarketConfig {
    std::uint64_t seed = 1;
    std::string option_id = "SYN";
    int n_days = 30;
    double s0 = 100.0;
    double drift = 0.0;  ///< annualized
    double vol = 0.3;  ///< annualized volatility of the stock path; may be 0
    /// Volatility quoted as ivol and used for pricing; <= 0 means "same as vol".
    double implied_vol = 0.0;
    double stock_spread = 0.002;  ///< s_a / s_b - 1
    double option_spread = 0.1;  ///< u_a / u_b - 1
    double strike = 100.0;
    int maturity_days = 120;
    int first_date = 0;

    double effective_implied_vol() const { return implied_vol > 0.0 ? implied_vol : vol; }
};

/// Minimum option mid emitted by the generator (one tick).
inline constexpr double kMinOptionMid = 0.01;

/// Geometric Brownian motion stock mid, option mid priced with bs_price on
/// the remaining maturity, and bid/ask placed so that the spread ratios
/// equal the configured fractions. Deterministic for a given seed.
std::vector<MarketSnapshot> simulate_market(const SyntheticMarketConfig& cfg);

}  // namespace qrm::market
