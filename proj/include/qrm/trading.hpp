#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qrm::trading {

struct TradeRecord {
    std::string option_id;
    int date = 0;
    double real_0 = 0.0;  ///< mid price today
    double real_tau = 0.0;  ///< mid price next trading day
    double est_tau = 0.0;  ///< forecast of tomorrow's price
};

enum class Decision { Buy, NoBuy };
enum class Outcome { TruePositive, TrueNegative, FalsePositive, FalseNegative };

/// Buy iff est_tau >= real_0.
Decision decide(const TradeRecord& r);

/// Ground truth is positive iff real_tau >= real_0.
Outcome classify(Decision d, double real_0, double real_tau);
Outcome classify(const TradeRecord& r);

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t tn = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + tn + fp + fn; }
    void add(Outcome o);
    ConfusionCounts& operator+=(const ConfusionCounts& other);
    bool operator==(const ConfusionCounts&) const = default;
};

ConfusionCounts tally(std::span<const Outcome> outcomes);

/// Undefined metrics (zero denominator) are std::nullopt, never 0.
struct StrategyMetrics {
    double accuracy = 0.0;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> mean_relative_error;
    std::size_t n = 0;
    std::size_t error_excluded = 0;  ///< records with real_tau == 0
};

/// Accuracy, precision and recall from the counts; mean relative error
/// |est - real_tau| / real_tau over the records. Throws EmptyInput.
StrategyMetrics metrics(const ConfusionCounts& c, std::span<const TradeRecord> records);

/// Same, for methods without a price forecast: error stays undefined.
StrategyMetrics metrics(const ConfusionCounts& c);

/// One decision with the data needed for moneyness binning.
struct BinnedDecision {
    double stock = 0.0;
    double strike = 0.0;
    Outcome outcome = Outcome::TrueNegative;
};

inline constexpr double kMoneynessStep = 0.1;

/// floor(((s - st) / s) / step), robust to representation error at bin edges.
int moneyness_bin(double stock, double strike, double step = kMoneynessStep);

struct MoneynessBin {
    int bin = 0;
    double lower = 0.0;
    double upper = 0.0;
    ConfusionCounts counts;
    std::optional<double> precision;
};

/// Per-bin confusion counts and precision, sorted by bin index.
std::vector<MoneynessBin> moneyness_bins(std::span<const BinnedDecision> decisions,
                                         double step = kMoneynessStep);

}  // namespace qrm::trading
