#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "qrm/ml/mlp.hpp"
#include "qrm/solver.hpp"

namespace qrm::pipeline {

/// Synthetic universe: n_options independent options, each on its own GBM
/// path, with strikes spread around s0 by a seeded moneyness draw.
struct SyntheticUniverse {
    int n_options = 100;
    int n_days = 30;
    double s0 = 100.0;
    double drift = 0.05;
    double vol = 0.3;
    double stock_spread = 0.002;
    double option_spread = 0.1;
    int maturity_days = 120;
    double moneyness_range = 0.3;  ///< strike = s0 (1 - m), m uniform in [-range, range]
};

/// Every knob of a run. Loaded from a flat JSON object (keys as below);
/// command-line flags override file values.
///
///   seed, input, out, jobs,
///   n_options, n_days, s0, drift, vol, stock_spread, option_spread,
///   maturity_days, moneyness_range,
///   nx, nt, beta, cg_tol, cg_max_iter,
///   split_first, split_second,
///   classifier_learning_rate, classifier_epochs, classifier_lambda,
///   classifier_hidden_width, classifier_hidden_layers,
///   regressor_learning_rate, regressor_epochs, regressor_lambda,
///   regressor_hidden_width, regressor_hidden_layers
struct PipelineConfig {
    std::uint64_t seed = 42;
    std::filesystem::path input;  ///< market CSV; empty means synthetic
    std::filesystem::path out = "out";
    int jobs = 1;

    SyntheticUniverse synthetic;

    int nx = solver::kDefaultNx;
    int nt = solver::kDefaultNt;
    double beta = solver::kDefaultBeta;
    double cg_tol = solver::kDefaultTol;
    int cg_max_iter = solver::kDefaultMaxIter;

    int split_first = 20;  ///< first validation day index
    int split_second = 24;  ///< first test day index

    ml::TrainConfig classifier;
    ml::TrainConfig regressor;

    /// Throws ConfigError on out-of-range values or a missing input file.
    void check() const;

    solver::SolverOptions solver_options() const;
};

/// Parses a flat JSON object into a config on top of `base`. Unknown keys
/// are rejected. Throws ConfigError.
PipelineConfig parse_config(const std::string& json_text, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});

/// The config as the same flat JSON object.
std::string to_json(const PipelineConfig& cfg);

}  // namespace qrm::pipeline
