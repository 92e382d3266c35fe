#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "qrm/market_data.hpp"
#include "qrm/ml/features.hpp"
#include "qrm/ml/mlp.hpp"
#include "qrm/pipeline/config.hpp"
#include "qrm/pipeline/csv_io.hpp"

namespace qrm::pipeline {

/// Records dropped by a stage, per reason.
struct SkipCounts {
    std::size_t inconsistent_series = 0;
    std::size_t invalid_boundary = 0;
    std::size_t non_finite = 0;
    std::size_t missing_day = 0;  ///< gap in the three days before a window
    std::size_t unlabeled = 0;  ///< no next trading day to score against
    std::size_t degenerate = 0;  ///< zero quote variance, unusable for the networks
    std::size_t cg_max_iter = 0;  ///< solved, but CG stopped at max_iter (kept)

    std::size_t dropped() const {
        return inconsistent_series + invalid_boundary + non_finite + missing_day + unlabeled + degenerate;
    }
    SkipCounts& operator+=(const SkipCounts& o);
};

/// n_options seeded GBM options sharing day indices 0..n_days-1.
std::vector<market::MarketSnapshot> simulate_universe(const PipelineConfig& cfg);

struct SolveStage {
    std::vector<SolutionRecord> solutions;  ///< sorted by option_id, then date
    SkipCounts skips;
};

/// QRM solve for every window of three consecutive days, fanned out over
/// cfg.jobs threads. Output order does not depend on the thread count.
SolveStage solve_all(const std::vector<market::MarketSnapshot>& snapshots, const PipelineConfig& cfg);

struct FeatureStage {
    std::vector<ml::FeatureRecord> records;
    SkipCounts skips;
};

/// Feature records for every solved window that has a next trading day.
FeatureStage build_all_features(const std::vector<market::MarketSnapshot>& snapshots,
                                const std::vector<SolutionRecord>& solutions);

struct Models {
    ml::MlpParams classifier;
    ml::MlpParams regressor;
};

/// Trains both networks on the training split. Throws EmptyDataset when
/// the training split has no usable record.
Models train_models(const std::vector<ml::FeatureRecord>& records, const PipelineConfig& cfg);

/// Forecasts of all three methods on the validation and test splits.
/// Degenerate records are left out (and counted in `skips` if given).
std::vector<Prediction> predict(const std::vector<ml::FeatureRecord>& records, const Models& models,
                                const PipelineConfig& cfg, SkipCounts* skips = nullptr);

/// The six-file report, in memory.
struct ReportBundle {
    std::string metrics_json;
    std::string threshold_curve_csv;
    std::string pr_curve_csv;
    std::string moneyness_bins_csv;
    std::string solutions_csv;
    std::string features_csv;
    SkipCounts skips;

    void write(const std::filesystem::path& dir) const;
};

inline constexpr const char* kBundleFiles[] = {"metrics.json",       "threshold_curve.csv",
                                               "pr_curve.csv",       "moneyness_bins.csv",
                                               "solutions.csv",      "features.csv"};

/// Simulate or ingest, solve, featurize, split, train, select the threshold,
/// backtest and report. Nothing is written; throws EmptyDataset when no
/// option survives validation or a split is empty.
ReportBundle run_pipeline(const PipelineConfig& cfg);

/// Loads cfg.input or simulates the synthetic universe.
std::vector<market::MarketSnapshot> load_market(const PipelineConfig& cfg);

}  // namespace qrm::pipeline
