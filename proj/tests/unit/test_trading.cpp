#include <vector>

#include <gtest/gtest.h>

#include "qrm/errors.hpp"
#include "qrm/trading.hpp"

using namespace qrm;
using namespace qrm::trading;

namespace {

TradeRecord trade(double real_0, double real_tau, double est_tau) {
    return {"X", 0, real_0, real_tau, est_tau};
}

}  // namespace

TEST(Decide, BuyOnEqualityAndAbove) {
    EXPECT_EQ(decide(trade(2.0, 0.0, 2.0)), Decision::Buy);
    EXPECT_EQ(decide(trade(2.0, 0.0, 2.1)), Decision::Buy);
    EXPECT_EQ(decide(trade(2.0, 0.0, 1.99)), Decision::NoBuy);
}

TEST(Classify, AllFourOutcomes) {
    EXPECT_EQ(classify(trade(2.0, 2.5, 2.2)), Outcome::TruePositive);
    EXPECT_EQ(classify(trade(2.0, 2.0, 2.2)), Outcome::TruePositive);  // flat price counts as up
    EXPECT_EQ(classify(trade(2.0, 1.5, 2.2)), Outcome::FalsePositive);
    EXPECT_EQ(classify(trade(2.0, 1.5, 1.8)), Outcome::TrueNegative);
    EXPECT_EQ(classify(trade(2.0, 2.5, 1.8)), Outcome::FalseNegative);
}

TEST(Metrics, HandComputedTable) {
    const std::vector<TradeRecord> recs{trade(1.0, 1.2, 1.1), trade(1.0, 1.3, 1.1), trade(1.0, 0.8, 1.1),
                                        trade(1.0, 0.9, 0.95), trade(1.0, 1.1, 0.9)};
    std::vector<Outcome> outs;
    for (const auto& r : recs) outs.push_back(classify(r));
    const auto c = tally(outs);
    EXPECT_EQ(c, (ConfusionCounts{2, 1, 1, 1}));
    const auto m = metrics(c, recs);
    EXPECT_DOUBLE_EQ(m.accuracy, 0.6);
    EXPECT_DOUBLE_EQ(*m.precision, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(*m.recall, 2.0 / 3.0);
    const double err = (0.1 / 1.2 + 0.2 / 1.3 + 0.3 / 0.8 + 0.05 / 0.9 + 0.2 / 1.1) / 5.0;
    EXPECT_NEAR(*m.mean_relative_error, err, 1e-15);
    EXPECT_EQ(m.n, 5u);
}

TEST(Metrics, UndefinedRatiosAreEmptyNotZero) {
    const auto all_negative = metrics(ConfusionCounts{0, 4, 0, 0});
    EXPECT_DOUBLE_EQ(all_negative.accuracy, 1.0);
    EXPECT_FALSE(all_negative.precision.has_value());
    EXPECT_FALSE(all_negative.recall.has_value());
    EXPECT_FALSE(all_negative.mean_relative_error.has_value());
    const auto never_buys = metrics(ConfusionCounts{0, 1, 0, 3});
    EXPECT_FALSE(never_buys.precision.has_value());
    EXPECT_DOUBLE_EQ(*never_buys.recall, 0.0);
}

TEST(Metrics, ZeroNextDayPriceIsExcludedFromError) {
    const std::vector<TradeRecord> recs{trade(1.0, 0.0, 0.5), trade(1.0, 2.0, 1.0)};
    const auto m = metrics(ConfusionCounts{0, 1, 0, 1}, recs);
    EXPECT_EQ(m.error_excluded, 1u);
    EXPECT_DOUBLE_EQ(*m.mean_relative_error, 0.5);
    const std::vector<TradeRecord> zeros{trade(1.0, 0.0, 0.5)};
    EXPECT_FALSE(metrics(ConfusionCounts{0, 1, 0, 0}, zeros).mean_relative_error.has_value());
}

TEST(Metrics, EmptyInputThrows) {
    EXPECT_THROW(metrics(ConfusionCounts{}), EmptyInput);
    EXPECT_THROW(metrics(ConfusionCounts{1, 0, 0, 0}, std::vector<TradeRecord>{}), EmptyInput);
}

TEST(MoneynessBin, EdgesAndSigns) {
    EXPECT_EQ(moneyness_bin(100.0, 100.0), 0);
    EXPECT_EQ(moneyness_bin(100.0, 90.0), 1);  // exactly on an edge
    EXPECT_EQ(moneyness_bin(100.0, 80.0), 2);
    EXPECT_EQ(moneyness_bin(100.0, 70.0), 3);
    EXPECT_EQ(moneyness_bin(100.0, 100.5), -1);
    EXPECT_EQ(moneyness_bin(100.0, 110.0), -1);
    EXPECT_EQ(moneyness_bin(100.0, 110.01), -2);
    EXPECT_THROW(moneyness_bin(0.0, 100.0), DomainError);
}

TEST(MoneynessBins, CountsPrecisionAndGapFill) {
    const std::vector<BinnedDecision> d{{100.0, 95.0, Outcome::TruePositive},
                                        {100.0, 99.0, Outcome::FalsePositive},
                                        {100.0, 99.0, Outcome::TrueNegative},
                                        {100.0, 65.0, Outcome::TruePositive}};
    const auto bins = moneyness_bins(d);
    ASSERT_EQ(bins.size(), 4u);
    EXPECT_EQ(bins[0].bin, 0);
    EXPECT_EQ(bins[0].counts, (ConfusionCounts{1, 1, 1, 0}));
    EXPECT_DOUBLE_EQ(*bins[0].precision, 0.5);
    EXPECT_EQ(bins[1].counts.total(), 0u);
    EXPECT_FALSE(bins[1].precision.has_value());
    EXPECT_EQ(bins[3].bin, 3);
    EXPECT_NEAR(bins[3].lower, 0.3, 1e-15);
    EXPECT_NEAR(bins[3].upper, 0.4, 1e-15);
    EXPECT_DOUBLE_EQ(*bins[3].precision, 1.0);
    EXPECT_TRUE(moneyness_bins(std::vector<BinnedDecision>{}).empty());
}

TEST(ConfusionCounts, AddAndAccumulate) {
    ConfusionCounts a{1, 2, 3, 4};
    a += ConfusionCounts{1, 1, 1, 1};
    EXPECT_EQ(a, (ConfusionCounts{2, 3, 4, 5}));
    EXPECT_EQ(a.total(), 14u);
}
