#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qrm::ml {

enum class Head { Sigmoid, Identity };

struct Layer {
    Eigen::MatrixXd w;  ///< out x in
    Eigen::VectorXd b;  ///< out
};

/// Fully connected network: tanh on hidden layers, sigmoid (classification)
/// or identity (regression) on the single output.
struct MlpParams {
    std::vector<Layer> layers;
    Head head = Head::Sigmoid;

    /// Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero.
    static MlpParams init(int inputs, const std::vector<int>& hidden, Head head,
                          std::uint64_t seed);
    static MlpParams zeros(int inputs, const std::vector<int>& hidden, Head head);

    int inputs() const { return static_cast<int>(layers.front().w.cols()); }
    std::size_t parameter_count() const;
    double weight_squared_sum() const;

    /// Flat view order: for each layer, w (column-major) then b.
    std::vector<double> flatten() const;
    void assign(std::span<const double> flat);
};

/// Examples are columns: x is inputs x m, y has m entries.
struct Batch {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;

    Eigen::Index size() const { return x.cols(); }
};

double forward(const MlpParams& p, std::span<const double> x);
Eigen::VectorXd forward(const MlpParams& p, const Eigen::MatrixXd& x);

inline constexpr double kProbabilityClamp = 1e-12;

/// (1/m) sum[-y log h - (1-y) log(1-h)] + (lambda / 2m) sum w^2 (weights only).
double loss_classification(const MlpParams& p, const Batch& batch, double lambda);

/// (1/m) sum (h - y)^2.
double loss_regression(const MlpParams& p, const Batch& batch);

/// The training objective for p's head: the head's loss plus (lambda / 2m) sum w^2.
double objective(const MlpParams& p, const Batch& batch, double lambda);

/// Backpropagated gradient of objective(), same layout as p.
MlpParams gradient(const MlpParams& p, const Batch& batch, double lambda);

struct TrainConfig {
    double learning_rate = 0.01;
    int epochs = 5000;
    double lambda = 1e-3;
    std::uint64_t seed = 1;
    int hidden_width = 32;
    int hidden_layers = 3;

    std::vector<int> hidden() const { return std::vector<int>(hidden_layers, hidden_width); }
    void check() const;
};

struct TrainResult {
    MlpParams params;
    std::vector<double> loss_history;  ///< objective before each step, then at the final parameters
};

/// Full-batch gradient descent for cfg.epochs steps from p0. Throws
/// DivergenceDetected when the objective becomes non-finite.
TrainResult train(MlpParams p0, const Batch& batch, const TrainConfig& cfg);

/// Initializes with cfg.seed and trains.
TrainResult train(Head head, const Batch& batch, const TrainConfig& cfg);

/// Max over up to `max_params` sampled parameters of
/// |analytic - numeric| / max(|analytic|, |numeric|, floor), numeric by
/// central differences with the given step.
double gradient_check(const MlpParams& p, const Batch& batch, double lambda,
                      std::size_t max_params = 200, double step = 1e-5,
                      std::uint64_t seed = 7, double floor = 1e-4);

std::string to_json(const MlpParams& p);
MlpParams mlp_from_json(const std::string& text);

}  // namespace qrm::ml
