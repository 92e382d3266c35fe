#include "qrm/pipeline/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "qrm/errors.hpp"

namespace qrm::pipeline {

namespace {

using Json = nlohmann::ordered_json;

// One accessor pair per flat key, so parsing and dumping cannot drift apart.
struct Field {
    std::function<void(PipelineConfig&, const Json&)> read;
    std::function<Json(const PipelineConfig&)> write;
};

template <class T, class Get>
Field field(Get get) {
    return {[get](PipelineConfig& c, const Json& j) { get(c) = j.get<T>(); },
            [get](const PipelineConfig& c) { return Json(get(const_cast<PipelineConfig&>(c))); }};
}

const std::vector<std::pair<std::string, Field>>& fields() {
    static const std::vector<std::pair<std::string, Field>> f = [] {
        std::vector<std::pair<std::string, Field>> v;
        v.emplace_back("seed", field<std::uint64_t>([](PipelineConfig& c) -> auto& { return c.seed; }));
        v.emplace_back("input", Field{[](PipelineConfig& c, const Json& j) { c.input = j.get<std::string>(); },
                                      [](const PipelineConfig& c) { return Json(c.input.string()); }});
        v.emplace_back("out", Field{[](PipelineConfig& c, const Json& j) { c.out = j.get<std::string>(); },
                                    [](const PipelineConfig& c) { return Json(c.out.string()); }});
        v.emplace_back("jobs", field<int>([](PipelineConfig& c) -> auto& { return c.jobs; }));
        v.emplace_back("n_options", field<int>([](PipelineConfig& c) -> auto& { return c.synthetic.n_options; }));
        v.emplace_back("n_days", field<int>([](PipelineConfig& c) -> auto& { return c.synthetic.n_days; }));
        v.emplace_back("s0", field<double>([](PipelineConfig& c) -> auto& { return c.synthetic.s0; }));
        v.emplace_back("drift", field<double>([](PipelineConfig& c) -> auto& { return c.synthetic.drift; }));
        v.emplace_back("vol", field<double>([](PipelineConfig& c) -> auto& { return c.synthetic.vol; }));
        v.emplace_back("stock_spread", field<double>([](PipelineConfig& c) -> auto& { return c.synthetic.stock_spread; }));
        v.emplace_back("option_spread", field<double>([](PipelineConfig& c) -> auto& { return c.synthetic.option_spread; }));
        v.emplace_back("maturity_days", field<int>([](PipelineConfig& c) -> auto& { return c.synthetic.maturity_days; }));
        v.emplace_back("moneyness_range", field<double>([](PipelineConfig& c) -> auto& { return c.synthetic.moneyness_range; }));
        v.emplace_back("nx", field<int>([](PipelineConfig& c) -> auto& { return c.nx; }));
        v.emplace_back("nt", field<int>([](PipelineConfig& c) -> auto& { return c.nt; }));
        v.emplace_back("beta", field<double>([](PipelineConfig& c) -> auto& { return c.beta; }));
        v.emplace_back("cg_tol", field<double>([](PipelineConfig& c) -> auto& { return c.cg_tol; }));
        v.emplace_back("cg_max_iter", field<int>([](PipelineConfig& c) -> auto& { return c.cg_max_iter; }));
        v.emplace_back("split_first", field<int>([](PipelineConfig& c) -> auto& { return c.split_first; }));
        v.emplace_back("split_second", field<int>([](PipelineConfig& c) -> auto& { return c.split_second; }));
        for (const std::string model : {"classifier", "regressor"}) {
            auto cfg = [model](PipelineConfig& c) -> ml::TrainConfig& {
                return model == "classifier" ? c.classifier : c.regressor;
            };
            v.emplace_back(model + "_learning_rate",
                           field<double>([cfg](PipelineConfig& c) -> auto& { return cfg(c).learning_rate; }));
            v.emplace_back(model + "_epochs",
                           field<int>([cfg](PipelineConfig& c) -> auto& { return cfg(c).epochs; }));
            v.emplace_back(model + "_lambda",
                           field<double>([cfg](PipelineConfig& c) -> auto& { return cfg(c).lambda; }));
            v.emplace_back(model + "_hidden_width",
                           field<int>([cfg](PipelineConfig& c) -> auto& { return cfg(c).hidden_width; }));
            v.emplace_back(model + "_hidden_layers",
                           field<int>([cfg](PipelineConfig& c) -> auto& { return cfg(c).hidden_layers; }));
        }
        return v;
    }();
    return f;
}

}  // namespace

void PipelineConfig::check() const {
    if (jobs < 1) throw ConfigError("config: jobs must be >= 1");
    if (!input.empty() && !std::filesystem::exists(input)) {
        throw ConfigError("config: input file " + input.string() + " does not exist");
    }
    if (input.empty()) {
        const auto& s = synthetic;
        if (s.n_options < 1) throw ConfigError("config: n_options must be >= 1");
        if (s.n_days < 4) throw ConfigError("config: n_days must be >= 4");
        if (!(s.s0 > 0.0)) throw ConfigError("config: s0 must be positive");
        if (!(s.vol >= 0.0)) throw ConfigError("config: vol must be >= 0");
        if (!(s.stock_spread > 0.0) || !(s.option_spread > 0.0)) {
            throw ConfigError("config: spreads must be positive");
        }
        if (!(s.moneyness_range >= 0.0 && s.moneyness_range < 1.0)) {
            throw ConfigError("config: moneyness_range must lie in [0, 1)");
        }
    }
    if (nx < 4 || nt < 4) throw ConfigError("config: nx and nt must be >= 4");
    if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("config: beta must lie in (0, 1)");
    if (!(cg_tol > 0.0)) throw ConfigError("config: cg_tol must be positive");
    if (cg_max_iter < 1) throw ConfigError("config: cg_max_iter must be >= 1");
    if (!(split_first < split_second)) throw ConfigError("config: split boundaries must increase");
    classifier.check();
    regressor.check();
}

solver::SolverOptions PipelineConfig::solver_options() const {
    solver::SolverOptions o;
    o.beta = beta;
    o.tol = cg_tol;
    o.max_iter = cg_max_iter;
    o.record_history = false;
    return o;
}

PipelineConfig parse_config(const std::string& json_text, PipelineConfig base) {
    Json j;
    try {
        j = Json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        const auto& all = fields();
        const auto it = std::find_if(all.begin(), all.end(), [&](const auto& f) { return f.first == key; });
        if (it == all.end()) throw ConfigError("config: unknown key '" + key + "'");
        try {
            it->second.read(base, value);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config: bad value for '" + key + "': " + e.what());
        }
    }
    return base;
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

std::string to_json(const PipelineConfig& cfg) {
    Json j;
    for (const auto& [key, f] : fields()) j[key] = f.write(cfg);
    return j.dump(2);
}

}  // namespace qrm::pipeline
