#include "qrm/ml/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "qrm/errors.hpp"
#include "qrm/rng.hpp"

namespace qrm::ml {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::vector<int> layer_sizes(int inputs, const std::vector<int>& hidden) {
    std::vector<int> sizes{inputs};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(1);
    return sizes;
}

// tanh through a single exp, which Eigen vectorizes; std::tanh is scalar.
void tanh_in_place(Eigen::MatrixXd& z) {
    z = (1.0 - 2.0 / ((2.0 * z.array()).exp() + 1.0)).matrix();
}

// Per-layer buffers reused across epochs, so training allocates only once.
struct Workspace {
    std::vector<Eigen::MatrixXd> acts;  ///< acts[0] = x, acts.back() = head output
    std::vector<Eigen::MatrixXd> deltas;  ///< d objective / d z for each layer
};

void forward_into(const MlpParams& p, const Eigen::MatrixXd& x, Workspace& ws) {
    ws.acts.resize(p.layers.size() + 1);
    ws.acts[0] = x;
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
        const Layer& layer = p.layers[l];
        Eigen::MatrixXd& z = ws.acts[l + 1];
        z.noalias() = layer.w * ws.acts[l];
        z.colwise() += layer.b;
        if (l + 1 < p.layers.size()) {
            tanh_in_place(z);
        } else if (p.head == Head::Sigmoid) {
            z = z.unaryExpr([](double v) { return sigmoid(v); });
        }
    }
}

double head_loss(Head head, const Eigen::RowVectorXd& h, const Eigen::VectorXd& y) {
    const double m = static_cast<double>(y.size());
    if (head == Head::Identity) return (h.transpose() - y).squaredNorm() / m;
    double sum = 0.0;
    for (Eigen::Index k = 0; k < h.size(); ++k) {
        const double hk = std::clamp(h(k), kProbabilityClamp, 1.0 - kProbabilityClamp);
        sum += -y(k) * std::log(hk) - (1.0 - y(k)) * std::log(1.0 - hk);
    }
    return sum / m;
}

double penalty(const MlpParams& p, double lambda, Eigen::Index m) {
    return lambda / (2.0 * static_cast<double>(m)) * p.weight_squared_sum();
}

void require_batch(const MlpParams& p, const Batch& batch) {
    if (batch.size() == 0) throw EmptyBatch("empty batch");
    if (batch.x.rows() != p.inputs() || batch.y.size() != batch.size()) {
        throw DomainError("batch shape does not match the network");
    }
}

}  // namespace

MlpParams MlpParams::init(int inputs, const std::vector<int>& hidden, Head head,
                          std::uint64_t seed) {
    Rng rng(seed);
    MlpParams p = zeros(inputs, hidden, head);
    for (auto& layer : p.layers) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(layer.w.cols()));
        // Column-major fill keeps the draw order tied to the flat layout.
        for (Eigen::Index c = 0; c < layer.w.cols(); ++c) {
            for (Eigen::Index r = 0; r < layer.w.rows(); ++r) layer.w(r, c) = rng.uniform(-bound, bound);
        }
    }
    return p;
}

MlpParams MlpParams::zeros(int inputs, const std::vector<int>& hidden, Head head) {
    if (inputs < 1) throw DomainError("MlpParams: inputs must be >= 1");
    MlpParams p;
    p.head = head;
    const auto sizes = layer_sizes(inputs, hidden);
    for (std::size_t l = 1; l < sizes.size(); ++l) {
        if (sizes[l] < 1) throw DomainError("MlpParams: layer width must be >= 1");
        p.layers.push_back({Eigen::MatrixXd::Zero(sizes[l], sizes[l - 1]),
                            Eigen::VectorXd::Zero(sizes[l])});
    }
    return p;
}

std::size_t MlpParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += static_cast<std::size_t>(l.w.size() + l.b.size());
    return n;
}

double MlpParams::weight_squared_sum() const {
    double s = 0.0;
    for (const auto& l : layers) s += l.w.squaredNorm();
    return s;
}

std::vector<double> MlpParams::flatten() const {
    std::vector<double> out;
    out.reserve(parameter_count());
    for (const auto& l : layers) {
        out.insert(out.end(), l.w.data(), l.w.data() + l.w.size());
        out.insert(out.end(), l.b.data(), l.b.data() + l.b.size());
    }
    return out;
}

void MlpParams::assign(std::span<const double> flat) {
    if (flat.size() != parameter_count()) throw DomainError("MlpParams: wrong parameter count");
    auto it = flat.begin();
    for (auto& l : layers) {
        std::copy_n(it, l.w.size(), l.w.data());
        it += l.w.size();
        std::copy_n(it, l.b.size(), l.b.data());
        it += l.b.size();
    }
}

double forward(const MlpParams& p, std::span<const double> x) {
    if (static_cast<int>(x.size()) != p.inputs()) throw DomainError("forward: input size mismatch");
    const Eigen::Map<const Eigen::VectorXd> col(x.data(), static_cast<Eigen::Index>(x.size()));
    return forward(p, Eigen::MatrixXd(col))(0);
}

Eigen::VectorXd forward(const MlpParams& p, const Eigen::MatrixXd& x) {
    Workspace ws;
    forward_into(p, x, ws);
    return ws.acts.back().row(0).transpose();
}

double loss_classification(const MlpParams& p, const Batch& batch, double lambda) {
    require_batch(p, batch);
    return head_loss(Head::Sigmoid, forward(p, batch.x).transpose(), batch.y) + penalty(p, lambda, batch.size());
}

double loss_regression(const MlpParams& p, const Batch& batch) {
    require_batch(p, batch);
    return head_loss(Head::Identity, forward(p, batch.x).transpose(), batch.y);
}

double objective(const MlpParams& p, const Batch& batch, double lambda) {
    require_batch(p, batch);
    return head_loss(p.head, forward(p, batch.x).transpose(), batch.y) + penalty(p, lambda, batch.size());
}

namespace {

// Fills g (shaped like p) with the gradient and returns the objective at p.
double gradient_into(const MlpParams& p, const Batch& batch, double lambda, Workspace& ws, MlpParams& g) {
    forward_into(p, batch.x, ws);
    const Eigen::Index m = batch.size();
    const auto& h = ws.acts.back();
    const double value = head_loss(p.head, h.row(0), batch.y) + penalty(p, lambda, m);

    // d objective / d z at the output. Sigmoid + cross entropy and identity +
    // squared error both reduce to a multiple of (h - y).
    const std::size_t n_layers = p.layers.size();
    ws.deltas.resize(n_layers);
    const double scale = (p.head == Head::Sigmoid ? 1.0 : 2.0) / static_cast<double>(m);
    ws.deltas.back() = scale * (h.row(0) - batch.y.transpose());

    for (std::size_t l = n_layers; l-- > 0;) {
        const Eigen::MatrixXd& input = ws.acts[l];
        const Eigen::MatrixXd& delta = ws.deltas[l];
        g.layers[l].w.noalias() = delta * input.transpose();
        g.layers[l].w += (lambda / static_cast<double>(m)) * p.layers[l].w;
        g.layers[l].b = delta.rowwise().sum();
        if (l > 0) {
            Eigen::MatrixXd& below = ws.deltas[l - 1];
            below.noalias() = p.layers[l].w.transpose() * delta;
            below.array() *= 1.0 - input.array().square();
        }
    }
    return value;
}

}  // namespace

MlpParams gradient(const MlpParams& p, const Batch& batch, double lambda) {
    require_batch(p, batch);
    Workspace ws;
    MlpParams g = p;
    gradient_into(p, batch, lambda, ws, g);
    return g;
}

void TrainConfig::check() const {
    if (!(learning_rate > 0.0)) throw ConfigError("TrainConfig: learning_rate must be > 0");
    if (!(lambda >= 0.0)) throw ConfigError("TrainConfig: lambda must be >= 0");
    if (epochs < 0) throw ConfigError("TrainConfig: epochs must be >= 0");
    if (hidden_width < 1 || hidden_layers < 0) throw ConfigError("TrainConfig: bad hidden layout");
}

TrainResult train(MlpParams p0, const Batch& batch, const TrainConfig& cfg) {
    cfg.check();
    require_batch(p0, batch);
    TrainResult out{std::move(p0), {}};
    out.loss_history.reserve(static_cast<std::size_t>(cfg.epochs) + 1);
    MlpParams& p = out.params;
    MlpParams g = p;
    Workspace ws;
    auto record = [&](double loss, int epoch) {
        if (!std::isfinite(loss)) {
            throw DivergenceDetected("train: objective became non-finite at epoch " +
                                     std::to_string(epoch) + "; lower the learning rate");
        }
        out.loss_history.push_back(loss);
    };
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        record(gradient_into(p, batch, cfg.lambda, ws, g), epoch);
        for (std::size_t l = 0; l < p.layers.size(); ++l) {
            p.layers[l].w -= cfg.learning_rate * g.layers[l].w;
            p.layers[l].b -= cfg.learning_rate * g.layers[l].b;
        }
    }
    record(objective(p, batch, cfg.lambda), cfg.epochs);
    return out;
}

TrainResult train(Head head, const Batch& batch, const TrainConfig& cfg) {
    cfg.check();
    return train(MlpParams::init(static_cast<int>(batch.x.rows()), cfg.hidden(), head, cfg.seed),
                 batch, cfg);
}

double gradient_check(const MlpParams& p, const Batch& batch, double lambda,
                      std::size_t max_params, double step, std::uint64_t seed, double floor) {
    const std::vector<double> analytic = gradient(p, batch, lambda).flatten();
    std::vector<double> theta = p.flatten();

    std::vector<std::size_t> idx(theta.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (idx.size() > max_params) {
        Rng rng(seed);
        for (std::size_t k = 0; k < max_params; ++k) {  // partial Fisher-Yates
            const auto pick = k + static_cast<std::size_t>(rng.uniform() * (idx.size() - k));
            std::swap(idx[k], idx[std::min(pick, idx.size() - 1)]);
        }
        idx.resize(max_params);
    }

    MlpParams probe = p;
    double worst = 0.0;
    for (std::size_t k : idx) {
        const double saved = theta[k];
        theta[k] = saved + step;
        probe.assign(theta);
        const double up = objective(probe, batch, lambda);
        theta[k] = saved - step;
        probe.assign(theta);
        const double down = objective(probe, batch, lambda);
        theta[k] = saved;
        const double numeric = (up - down) / (2.0 * step);
        const double scale = std::max({std::abs(analytic[k]), std::abs(numeric), floor});
        worst = std::max(worst, std::abs(analytic[k] - numeric) / scale);
    }
    return worst;
}

std::string to_json(const MlpParams& p) {
    nlohmann::ordered_json j;
    j["head"] = p.head == Head::Sigmoid ? "sigmoid" : "identity";
    j["activation"] = "tanh";
    j["layers"] = nlohmann::ordered_json::array();
    for (const auto& l : p.layers) {
        nlohmann::ordered_json layer;
        layer["rows"] = l.w.rows();
        layer["cols"] = l.w.cols();
        std::vector<double> w;  // row-major
        for (Eigen::Index r = 0; r < l.w.rows(); ++r) {
            for (Eigen::Index c = 0; c < l.w.cols(); ++c) w.push_back(l.w(r, c));
        }
        layer["weights"] = w;
        layer["biases"] = std::vector<double>(l.b.data(), l.b.data() + l.b.size());
        j["layers"].push_back(layer);
    }
    return j.dump(1);
}

MlpParams mlp_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        MlpParams p;
        const std::string head = j.at("head");
        if (head == "sigmoid") {
            p.head = Head::Sigmoid;
        } else if (head == "identity") {
            p.head = Head::Identity;
        } else {
            throw ConfigError("model: unknown head '" + head + "'");
        }
        for (const auto& layer : j.at("layers")) {
            const Eigen::Index rows = layer.at("rows");
            const Eigen::Index cols = layer.at("cols");
            const auto w = layer.at("weights").get<std::vector<double>>();
            const auto b = layer.at("biases").get<std::vector<double>>();
            if (static_cast<Eigen::Index>(w.size()) != rows * cols ||
                static_cast<Eigen::Index>(b.size()) != rows) {
                throw ConfigError("model: layer shape does not match its arrays");
            }
            Layer l{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
            for (Eigen::Index r = 0; r < rows; ++r) {
                for (Eigen::Index c = 0; c < cols; ++c) l.w(r, c) = w[static_cast<std::size_t>(r * cols + c)];
                l.b(r) = b[static_cast<std::size_t>(r)];
            }
            if (!p.layers.empty() && p.layers.back().w.rows() != cols) {
                throw ConfigError("model: consecutive layers do not chain");
            }
            p.layers.push_back(std::move(l));
        }
        if (p.layers.empty() || p.layers.back().w.rows() != 1) {
            throw ConfigError("model: network must end in a single output");
        }
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
}

}  // namespace qrm::ml
