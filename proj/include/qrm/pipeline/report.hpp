#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qrm/ml/training.hpp"
#include "qrm/pipeline/csv_io.hpp"
#include "qrm/trading.hpp"

namespace qrm::pipeline {

/// Test-split results of one trading method.
struct MethodResult {
    std::string method;  ///< qrm, classifier or regressor
    trading::ConfusionCounts counts;
    trading::StrategyMetrics metrics;
    std::vector<trading::MoneynessBin> bins;
};

/// A fixed-rule method's position on the validation curves.
struct ReferencePoint {
    std::string method;
    double accuracy = 0.0;
    std::optional<double> precision;
    std::optional<double> recall;
};

struct Evaluation {
    ml::ThresholdSelection threshold;  ///< selected on the validation split
    std::size_t n_validation = 0;
    std::size_t n_test = 0;
    std::vector<ReferencePoint> validation_reference;  ///< qrm, regressor
    std::vector<MethodResult> methods;  ///< qrm, classifier, regressor on the test split
};

/// Selects the classifier threshold on the validation predictions and
/// backtests all three methods on the test predictions. Throws
/// EmptyDataset if either split is empty.
Evaluation evaluate(const std::vector<Prediction>& predictions);

/// Published results of the three methods on a proprietary market data set,
/// shipped for side-by-side reading only.
struct PublishedResult {
    const char* method;
    double accuracy;
    double precision;
    double recall;
    std::optional<double> error;
};

inline const PublishedResult kPublishedResults[] = {
    {"qrm", 0.4977, 0.5577, 0.5243, 0.12},
    {"classifier", 0.5636, 0.5956, 0.7022, std::nullopt},
    {"regressor", 0.5542, 0.6032, 0.6129, std::nullopt},
};

std::string metrics_json(const Evaluation& e);
/// One row per method: accuracy, precision, recall, error, profit and loss shares, counts.
std::string metrics_csv(const Evaluation& e);
/// Classifier accuracy for c = 0.00..1.00, then qrm and regressor rows with c = NA.
std::string threshold_curve_csv(const Evaluation& e);
/// Classifier precision and recall for c = 0.00..1.00, then the reference rows.
std::string pr_curve_csv(const Evaluation& e);
/// Per-method, per-bin counts and precision on the test split.
std::string moneyness_bins_csv(const Evaluation& e);

}  // namespace qrm::pipeline
