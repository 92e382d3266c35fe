#include <gtest/gtest.h>

#include "qrm/errors.hpp"
#include "qrm/market_data.hpp"
#include "qrm/preprocess.hpp"
#include "qrm/rng.hpp"

using namespace qrm;
using namespace qrm::prep;

namespace {

market::MarketSnapshot day(int date, double u_b, double u_a, double ivol = 0.3) {
    market::MarketSnapshot s;
    s.option_id = "OPT";
    s.date = date;
    s.strike = 100.0;
    s.s_b = 100.0;
    s.s_a = 101.0;
    s.u_b = u_b;
    s.u_a = u_a;
    s.ivol = ivol;
    return s;
}

}  // namespace

TEST(FitQuadratic, SymmetricParabolaHandSolved) {
    const auto q = fit_quadratic({1.0, 0.0, 1.0});
    EXPECT_NEAR(extrapolate(q, kTau), 4.0, 1e-12);
    EXPECT_NEAR(extrapolate(q, 2 * kTau), 9.0, 1e-12);
    EXPECT_NEAR(extrapolate(q, -kTau), 0.0, 1e-12);
}

TEST(FitQuadratic, InterpolatesItsSamples) {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const std::array<double, 3> v{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
        const auto q = fit_quadratic(v);
        EXPECT_NEAR(q(-2 * kTau), v[0], 1e-11);
        EXPECT_NEAR(q(-kTau), v[1], 1e-11);
        EXPECT_NEAR(q(0.0), v[2], 1e-11);
    }
}

TEST(FitQuadratic, ReproducesQuadraticsExactly) {
    // Any quadratic sampled at the three nodes is recovered everywhere.
    auto f = [](double t) { return 2.0 - 30.0 * t + 4000.0 * t * t; };
    const auto q = fit_quadratic({f(-2 * kTau), f(-kTau), f(0.0)});
    for (double t : {-2 * kTau, -0.5 * kTau, kTau, 1.5 * kTau, 2 * kTau}) EXPECT_NEAR(q(t), f(t), 1e-12);
}

TEST(FitQuadratic, ConstantSeriesStaysConstant) {
    const auto q = fit_quadratic({0.3, 0.3, 0.3});
    EXPECT_NEAR(q.c1, 0.0, 1e-15);
    EXPECT_NEAR(q.c2, 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(extrapolate(q, 2 * kTau), 0.3);
}

TEST(Extrapolate, RejectsOutsideWindow) {
    const auto q = fit_quadratic({1.0, 2.0, 3.0});
    EXPECT_THROW(extrapolate(q, 2.5 * kTau), RangeError);
    EXPECT_THROW(extrapolate(q, -3 * kTau), RangeError);
    EXPECT_NO_THROW(extrapolate(q, 2 * kTau));
}

TEST(ACoefficient, HandSubstitution) {
    EXPECT_NEAR(a_coefficient(0.0, 100.0, 101.0), 1275000.0, 1e-6);
    EXPECT_NEAR(a_coefficient(1.0, 100.0, 101.0), 1300627.5, 1e-6);
    EXPECT_THROW(a_coefficient(0.5, 101.0, 100.0), DomainError);
    EXPECT_THROW(a_coefficient(0.5, 0.0, 100.0), DomainError);
}

TEST(AssembleProblem, BoundaryAndInitialData) {
    const auto p = assemble_problem(day(0, 2.0, 2.2), day(1, 2.1, 2.3), day(2, 2.2, 2.4));
    EXPECT_DOUBLE_EQ(p.horizon(), 2 * kTau);
    EXPECT_NEAR(p.ub(0.0), 2.2, 1e-12);
    EXPECT_NEAR(p.ua(0.0), 2.4, 1e-12);
    EXPECT_NEAR(p.ub(kTau), 2.3, 1e-12);  // linear series extrapolates linearly
    EXPECT_NEAR(p.g(0.0), 2.2, 1e-12);
    EXPECT_NEAR(p.g(1.0), 2.4, 1e-12);
    EXPECT_NEAR(p.g(0.5), 2.3, 1e-12);
    EXPECT_NEAR(p.a(0.0), 1275000.0, 1e-6);
}

TEST(AssembleProblem, ZeroVolSeriesGivesConstantSigma) {
    market::SyntheticMarketConfig cfg;
    cfg.vol = 0.0;
    cfg.implied_vol = 0.35;
    const auto s = market::simulate_market(cfg);
    const auto p = assemble_problem(s[3], s[4], s[5]);
    for (double t : {0.0, kTau, 2 * kTau}) EXPECT_DOUBLE_EQ(p.sigma(t), 0.35);
}

TEST(AssembleProblem, RejectsInconsistentSeries) {
    auto other = day(1, 2.1, 2.3);
    other.option_id = "OTHER";
    EXPECT_THROW(assemble_problem(day(0, 2.0, 2.2), other, day(2, 2.2, 2.4)), InconsistentSeries);
    EXPECT_THROW(assemble_problem(day(0, 2.0, 2.2), day(1, 2.1, 2.3), day(3, 2.2, 2.4)), InconsistentSeries);
}

TEST(AssembleProblem, RejectsCrossingExtrapolation) {
    // Bid rising fast and ask falling: they cross within two days.
    EXPECT_THROW(assemble_problem(day(0, 1.0, 2.0), day(1, 1.3, 1.85), day(2, 1.6, 1.7)), InvalidBoundary);
}

TEST(AssembleProblem, RejectsVanishingVolatility) {
    EXPECT_THROW(assemble_problem(day(0, 2.0, 2.2, 0.5), day(1, 2.1, 2.3, 0.3), day(2, 2.2, 2.4, 0.1)),
                 InvalidBoundary);
}
