#include <vector>

#include <gtest/gtest.h>

#include "qrm/errors.hpp"
#include "qrm/ml/training.hpp"

using namespace qrm;
using namespace qrm::ml;

namespace {

FeatureRecord record(double quote_shift, int label) {
    FeatureRecord r;
    r.option_id = "T";
    r.strike = 100.0;
    r.raw = {1.2, 1.3, 101.0, 100.0, 1.1 + quote_shift, 1.2, 1.3, 1.0, 1.1, 1.2, 0.3, 0.3, 0.3};
    r.real_tau = label ? 1.4 : 1.1;
    r.label = label;
    return r;
}

}  // namespace

TEST(ThresholdCurve, ExtremesAndMonotonicity) {
    const std::vector<double> s{0.05, 0.3, 0.55, 0.7, 0.95, 0.4};
    const std::vector<int> y{0, 0, 1, 1, 1, 0};
    const auto curve = threshold_curve(s, y);
    ASSERT_EQ(curve.size(), 101u);
    EXPECT_DOUBLE_EQ(curve.front().c, 0.0);
    EXPECT_DOUBLE_EQ(curve.back().c, 1.0);
    EXPECT_EQ(curve.front().predicted_positive, 6u);
    EXPECT_DOUBLE_EQ(*curve.front().recall, 1.0);
    EXPECT_DOUBLE_EQ(*curve.front().precision, 0.5);
    EXPECT_EQ(curve.back().predicted_positive, 0u);
    EXPECT_FALSE(curve.back().precision.has_value());
    EXPECT_DOUBLE_EQ(*curve.back().recall, 0.0);
    for (std::size_t k = 1; k < curve.size(); ++k) {
        EXPECT_LE(curve[k].predicted_positive, curve[k - 1].predicted_positive);
        EXPECT_LE(*curve[k].recall, *curve[k - 1].recall);
    }
}

TEST(ThresholdCurve, StrictInequality) {
    const std::vector<double> s{0.5};
    const std::vector<int> y{1};
    const auto curve = threshold_curve(s, y);
    EXPECT_EQ(curve[49].predicted_positive, 1u);
    EXPECT_EQ(curve[50].predicted_positive, 0u);  // 0.5 > 0.5 is false
}

TEST(ThresholdCurve, Validation) {
    EXPECT_THROW(threshold_curve(std::vector<double>{}, std::vector<int>{}), EmptyInput);
    EXPECT_THROW(threshold_curve(std::vector<double>{0.1}, std::vector<int>{}), DomainError);
}

TEST(SelectThreshold, SeparatedScoresPickSmallestPerfectC) {
    // Negatives at 0.005, positives at 0.995: every c in [0.01, 0.99] is
    // perfect; the smallest wins.
    const std::vector<double> s{0.005, 0.995, 0.005, 0.995};
    const std::vector<int> y{0, 1, 0, 1};
    const auto sel = select_threshold(s, y);
    EXPECT_DOUBLE_EQ(sel.c, 0.01);
    EXPECT_FALSE(sel.single_class);
    EXPECT_DOUBLE_EQ(sel.curve[1].accuracy, 1.0);
}

TEST(SelectThreshold, ExactZeroOneScoresPickZero) {
    const std::vector<double> s{0.0, 1.0, 0.0, 1.0};
    const std::vector<int> y{0, 1, 0, 1};
    EXPECT_DOUBLE_EQ(select_threshold(s, y).c, 0.0);
}

TEST(SelectThreshold, InteriorOptimum) {
    const std::vector<double> s{0.1, 0.2, 0.35, 0.6, 0.62, 0.9, 0.45};
    const std::vector<int> y{0, 0, 0, 1, 1, 1, 1};
    EXPECT_DOUBLE_EQ(select_threshold(s, y).c, 0.35);
}

TEST(SelectThreshold, SingleClassKeepsHalf) {
    const std::vector<double> s{0.2, 0.9};
    const auto all_up = select_threshold(s, std::vector<int>{1, 1});
    EXPECT_TRUE(all_up.single_class);
    EXPECT_DOUBLE_EQ(all_up.c, 0.5);
    EXPECT_EQ(all_up.curve.size(), 101u);
    EXPECT_TRUE(select_threshold(s, std::vector<int>{0, 0}).single_class);
}

TEST(MakeDataset, DropsDegenerateAndNormalizesTargets) {
    std::vector<FeatureRecord> recs{record(0.0, 1), record(0.05, 0)};
    auto flat = record(0.0, 1);
    for (std::size_t k = kOptionAskM2; k <= kOptionBid0; ++k) flat.raw[k] = 2.0;
    recs.insert(recs.begin() + 1, flat);
    const auto d = make_dataset(recs);
    EXPECT_EQ(d.degenerate, 1u);
    ASSERT_EQ(d.classification.size(), 2);
    EXPECT_EQ(d.source_index, (std::vector<std::size_t>{0, 2}));
    EXPECT_EQ(d.classification.x.rows(), static_cast<Eigen::Index>(kFeatureCount));
    EXPECT_DOUBLE_EQ(d.classification.y(0), 1.0);
    EXPECT_DOUBLE_EQ(d.classification.y(1), 0.0);
    EXPECT_NEAR(d.stats[0].invert(d.regression.y(0)), 1.4, 1e-13);
    EXPECT_NEAR(d.stats[1].invert(d.regression.y(1)), 1.1, 1e-13);
    EXPECT_EQ(d.regression.x, d.classification.x);
}
