#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qrm/ml/features.hpp"
#include "qrm/ml/mlp.hpp"

namespace qrm::ml {

/// Normalized inputs and targets for a set of feature records. Degenerate
/// records (zero quote variance) are dropped and counted.
struct Dataset {
    Batch classification;  ///< y = label
    Batch regression;  ///< y = normalized real_tau
    std::vector<NormalizationStats> stats;
    std::vector<std::size_t> source_index;  ///< position in the input span
    std::size_t degenerate = 0;
};

Dataset make_dataset(std::span<const FeatureRecord> records);

/// Buy iff score > c.
inline bool threshold_buy(double score, double c) { return score > c; }

struct ThresholdPoint {
    double c = 0.0;
    std::size_t predicted_positive = 0;
    double accuracy = 0.0;
    std::optional<double> precision;
    std::optional<double> recall;
};

inline constexpr int kThresholdSteps = 100;  ///< grid c = k / 100, k = 0..100

/// Accuracy, precision and recall of the rule score > c for every grid c.
std::vector<ThresholdPoint> threshold_curve(std::span<const double> scores,
                                            std::span<const int> labels);

struct ThresholdSelection {
    double c = 0.5;
    bool single_class = false;  ///< validation labels hold one class only; c left at 0.5
    std::vector<ThresholdPoint> curve;
};

/// Accuracy-maximizing c on the grid, smallest c on ties. Throws EmptyInput.
ThresholdSelection select_threshold(std::span<const double> scores, std::span<const int> labels);

}  // namespace qrm::ml
