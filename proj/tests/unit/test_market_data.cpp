#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include "qrm/errors.hpp"
#include "qrm/market_data.hpp"

using namespace qrm;
using namespace qrm::market;

namespace {

MarketSnapshot quote(double s_b, double s_a, double u_b, double u_a, double ivol = 0.3) {
    MarketSnapshot s;
    s.option_id = "X";
    s.strike = 100.0;
    s.s_b = s_b;
    s.s_a = s_a;
    s.u_b = u_b;
    s.u_a = u_a;
    s.ivol = ivol;
    return s;
}

}  // namespace

TEST(ValidateSnapshot, AcceptsOrderedPositiveQuotes) {
    EXPECT_NO_THROW(validate_snapshot(quote(100.0, 100.1, 2.0, 2.2)));
}

TEST(ValidateSnapshot, RejectsCrossedOrLockedQuotes) {
    EXPECT_THROW(validate_snapshot(quote(100.1, 100.0, 2.0, 2.2)), InvalidQuote);
    EXPECT_THROW(validate_snapshot(quote(100.0, 100.0, 2.0, 2.2)), InvalidQuote);
    EXPECT_THROW(validate_snapshot(quote(100.0, 100.1, 2.2, 2.0)), InvalidQuote);
}

TEST(ValidateSnapshot, RejectsNonPositiveOrNonFinite) {
    EXPECT_THROW(validate_snapshot(quote(0.0, 100.1, 2.0, 2.2)), InvalidQuote);
    EXPECT_THROW(validate_snapshot(quote(100.0, 100.1, -1.0, 2.2)), InvalidQuote);
    EXPECT_THROW(validate_snapshot(quote(100.0, 100.1, 2.0, 2.2, 0.0)), InvalidQuote);
    EXPECT_THROW(validate_snapshot(quote(100.0, NAN, 2.0, 2.2)), InvalidQuote);
    auto bad_strike = quote(100.0, 100.1, 2.0, 2.2);
    bad_strike.strike = 0.0;
    EXPECT_THROW(validate_snapshot(bad_strike), InvalidQuote);
}

TEST(SpreadRatios, HandArithmetic) {
    const auto r = spread_ratios(quote(100.0, 100.1, 2.0, 2.2));
    EXPECT_NEAR(r.f_s, 0.001, 1e-12);
    EXPECT_NEAR(r.f_u, 0.1, 1e-12);
    EXPECT_FALSE(r.outside_typical_range);
}

TEST(SpreadRatios, TypicalRangeBoundary) {
    const auto at_edge = spread_ratios(quote(100.0, 100.0 * 1.003, 1.0, 1.2));
    EXPECT_NEAR(at_edge.f_s, 0.003, 1e-12);
    EXPECT_FALSE(at_edge.outside_typical_range);
    EXPECT_TRUE(spread_ratios(quote(100.0, 100.5, 1.0, 1.2)).outside_typical_range);
    EXPECT_TRUE(spread_ratios(quote(100.0, 100.1, 1.0, 1.3)).outside_typical_range);
}

TEST(NormalCdf, KnownValues) {
    EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
    EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-15);
    EXPECT_NEAR(normal_cdf(-1.0), 0.15865525393145705141, 1e-16);
    EXPECT_NEAR(normal_cdf(-10.0) / 7.6198530241605260660e-24, 1.0, 1e-12);
}

// Reference prices from tools/oracles/black_scholes.py (mpmath, 50 digits).
struct BsCase {
    double s, k, sigma, tau, price;
};

class BsOracle : public ::testing::TestWithParam<BsCase> {};

TEST_P(BsOracle, MatchesHighPrecisionReference) {
    const auto c = GetParam();
    EXPECT_NEAR(bs_price(c.s, c.k, c.sigma, c.tau), c.price, 1e-12 * std::max(1.0, c.price));
}

INSTANTIATE_TEST_SUITE_P(Reference, BsOracle,
                         ::testing::Values(BsCase{100, 100, 0.2, 0.25, 3.9877611676744925404},
                                           BsCase{100, 90, 0.3, 0.5, 13.989833297212049543},
                                           BsCase{100, 130, 0.3, 120.0 / 255, 1.122590735785105395},
                                           BsCase{50, 55, 0.45, 10.0 / 255, 0.34023839402532608697},
                                           BsCase{100, 100, 0.2, 1.0 / 255, 0.49965142775881954964}),
                         [](const auto& info) { return "case" + std::to_string(info.index); });

TEST(BsPrice, ZeroMaturityIsPayoff) {
    EXPECT_DOUBLE_EQ(bs_price(110.0, 100.0, 0.2, 0.0), 10.0);
    EXPECT_DOUBLE_EQ(bs_price(90.0, 100.0, 0.2, 0.0), 0.0);
}

TEST(BsPrice, RejectsBadInputs) {
    EXPECT_THROW(bs_price(-1.0, 100.0, 0.2, 0.25), DomainError);
    EXPECT_THROW(bs_price(100.0, 0.0, 0.2, 0.25), DomainError);
    EXPECT_THROW(bs_price(100.0, 100.0, 0.0, 0.25), DomainError);
    EXPECT_THROW(bs_price(100.0, 100.0, 0.2, -0.1), DomainError);
}

TEST(BsPrice, NoArbitrageBoundsAndMonotonicity) {
    for (double s : {60.0, 90.0, 100.0, 120.0, 200.0}) {
        double prev = 0.0;
        for (double tau : {0.01, 0.1, 0.5, 1.0, 2.0}) {
            const double c = bs_price(s, 100.0, 0.3, tau);
            EXPECT_GE(c, std::max(s - 100.0, 0.0) - 1e-12);
            EXPECT_LE(c, s);
            EXPECT_GE(c, prev);  // increasing in maturity
            prev = c;
        }
    }
    EXPECT_LT(bs_price(100.0, 110.0, 0.3, 0.5), bs_price(100.0, 100.0, 0.3, 0.5));
}

TEST(SimulateMarket, DeterministicForSeed) {
    SyntheticMarketConfig cfg;
    cfg.seed = 99;
    const auto a = simulate_market(cfg);
    const auto b = simulate_market(cfg);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_EQ(a[k].s_b, b[k].s_b);
        EXPECT_EQ(a[k].u_a, b[k].u_a);
    }
    cfg.seed = 100;
    EXPECT_NE(simulate_market(cfg)[5].s_b, a[5].s_b);
}

TEST(SimulateMarket, SpreadsAndValidity) {
    SyntheticMarketConfig cfg;
    cfg.stock_spread = 0.002;
    cfg.option_spread = 0.1;
    const auto snaps = simulate_market(cfg);
    ASSERT_EQ(static_cast<int>(snaps.size()), cfg.n_days);
    for (std::size_t k = 0; k < snaps.size(); ++k) {
        EXPECT_NO_THROW(validate_snapshot(snaps[k]));
        const auto r = spread_ratios(snaps[k]);
        EXPECT_NEAR(r.f_s, 0.002, 1e-12);
        EXPECT_NEAR(r.f_u, 0.1, 1e-12);
        EXPECT_EQ(snaps[k].date, static_cast<int>(k));
    }
}

TEST(SimulateMarket, ZeroVolIsDeterministicDriftPath) {
    SyntheticMarketConfig cfg;
    cfg.vol = 0.0;
    cfg.implied_vol = 0.25;
    cfg.drift = 0.1;
    const auto snaps = simulate_market(cfg);
    for (std::size_t k = 0; k < snaps.size(); ++k) {
        const double expected = cfg.s0 * std::exp(cfg.drift * static_cast<double>(k) / kTradingDaysPerYear);
        EXPECT_NEAR(snaps[k].stock_mid() / expected, 1.0, 1e-12);
        EXPECT_DOUBLE_EQ(snaps[k].ivol, 0.25);
    }
}

TEST(SimulateMarket, OptionMidIsBlackScholesOnRemainingMaturity) {
    SyntheticMarketConfig cfg;
    cfg.strike = 95.0;
    const auto snaps = simulate_market(cfg);
    for (const auto& s : snaps) {
        const double tau = (cfg.maturity_days - s.date) / kTradingDaysPerYear;
        EXPECT_NEAR(s.option_mid(), bs_price(s.stock_mid(), cfg.strike, cfg.vol, tau), 1e-10);
    }
}

TEST(SimulateMarket, RejectsBadConfig) {
    SyntheticMarketConfig cfg;
    cfg.vol = 0.0;  // no implied vol to fall back on
    EXPECT_THROW(simulate_market(cfg), ConfigError);
    cfg = {};
    cfg.n_days = 3;
    EXPECT_THROW(simulate_market(cfg), ConfigError);
    cfg = {};
    cfg.option_spread = 0.0;
    EXPECT_THROW(simulate_market(cfg), ConfigError);
    cfg = {};
    cfg.s0 = -1.0;
    EXPECT_THROW(simulate_market(cfg), ConfigError);
}
