#include "qrm/pipeline/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <optional>
#include <thread>
#include <tuple>

#include <spdlog/spdlog.h>

#include "qrm/errors.hpp"
#include "qrm/grid.hpp"
#include "qrm/ml/training.hpp"
#include "qrm/pipeline/report.hpp"
#include "qrm/preprocess.hpp"
#include "qrm/rng.hpp"
#include "qrm/solver.hpp"

namespace qrm::pipeline {

namespace {

using market::MarketSnapshot;

using SnapshotIndex = std::map<std::pair<std::string, int>, const MarketSnapshot*>;

SnapshotIndex index_snapshots(const std::vector<MarketSnapshot>& snapshots) {
    SnapshotIndex idx;
    for (const auto& s : snapshots) idx.emplace(std::make_pair(s.option_id, s.date), &s);
    return idx;
}

const MarketSnapshot* find(const SnapshotIndex& idx, const std::string& id, int date) {
    const auto it = idx.find({id, date});
    return it == idx.end() ? nullptr : it->second;
}

struct Window {
    const MarketSnapshot* m2;
    const MarketSnapshot* m1;
    const MarketSnapshot* d0;
};

enum class SolveFailure { None, InconsistentSeries, InvalidBoundary, NonFinite };

struct SolveSlot {
    std::optional<SolutionRecord> record;
    SolveFailure failure = SolveFailure::None;
    bool hit_max_iter = false;
    std::exception_ptr fatal;
};

SolveSlot solve_window(const Window& w, const solver::Grid& grid, const solver::SolverOptions& opts) {
    SolveSlot slot;
    try {
        const auto problem = prep::assemble_problem(*w.m2, *w.m1, *w.d0, grid.nt);
        const auto sol = solver::minimize(problem, grid, opts);
        SolutionRecord r;
        r.option_id = w.d0->option_id;
        r.date = w.d0->date;
        r.beta = sol.beta;
        r.cg_iterations = sol.cg_iterations;
        r.residual_norm = sol.residual_norm;
        r.j_value = sol.j_value;
        r.est_tau = sol.est_tau;
        r.est_2tau = sol.est_2tau;
        slot.record = r;
        slot.hit_max_iter = sol.hit_max_iterations;
    } catch (const InconsistentSeries&) {
        slot.failure = SolveFailure::InconsistentSeries;
    } catch (const InvalidBoundary&) {
        slot.failure = SolveFailure::InvalidBoundary;
    } catch (const NonFiniteValue&) {
        slot.failure = SolveFailure::NonFinite;
    } catch (const std::exception& e) {
        slot.fatal = std::make_exception_ptr(
            Error("solve " + w.d0->option_id + " day " + std::to_string(w.d0->date) + ": " + e.what()));
    }
    return slot;
}

void log_skips(const char* stage, const SkipCounts& s) {
    if (s.dropped() == 0 && s.cg_max_iter == 0) return;
    spdlog::info(
        "{}: inconsistent_series={} invalid_boundary={} non_finite={} missing_day={} unlabeled={} "
        "degenerate={} cg_max_iter={}",
        stage, s.inconsistent_series, s.invalid_boundary, s.non_finite, s.missing_day, s.unlabeled,
        s.degenerate, s.cg_max_iter);
}

ml::TrainConfig seeded(ml::TrainConfig c, std::uint64_t root, const char* label) {
    c.seed = derive_seed(root, label);
    return c;
}

}  // namespace

SkipCounts& SkipCounts::operator+=(const SkipCounts& o) {
    inconsistent_series += o.inconsistent_series;
    invalid_boundary += o.invalid_boundary;
    non_finite += o.non_finite;
    missing_day += o.missing_day;
    unlabeled += o.unlabeled;
    degenerate += o.degenerate;
    cg_max_iter += o.cg_max_iter;
    return *this;
}

std::vector<MarketSnapshot> simulate_universe(const PipelineConfig& cfg) {
    const auto& u = cfg.synthetic;
    Rng strikes(derive_seed(cfg.seed, "strikes"));
    std::vector<MarketSnapshot> all;
    const int width = static_cast<int>(std::to_string(std::max(u.n_options - 1, 1)).size());
    for (int k = 0; k < u.n_options; ++k) {
        market::SyntheticMarketConfig m;
        std::string id = std::to_string(k);
        id.insert(0, static_cast<std::size_t>(width) - id.size(), '0');
        m.option_id = "SYN" + id;
        m.seed = derive_seed(cfg.seed, "market-" + m.option_id);
        m.n_days = u.n_days;
        m.s0 = u.s0;
        m.drift = u.drift;
        m.vol = u.vol;
        m.stock_spread = u.stock_spread;
        m.option_spread = u.option_spread;
        m.maturity_days = u.maturity_days;
        m.strike = u.s0 * (1.0 - strikes.uniform(-u.moneyness_range, u.moneyness_range));
        const std::string expiry = trading_day_iso(u.maturity_days);
        for (auto& s : market::simulate_market(m)) {
            s.expiry = expiry;
            all.push_back(std::move(s));
        }
    }
    return all;
}

std::vector<MarketSnapshot> load_market(const PipelineConfig& cfg) {
    if (cfg.input.empty()) return simulate_universe(cfg);
    return read_market_csv(cfg.input).snapshots;
}

SolveStage solve_all(const std::vector<MarketSnapshot>& snapshots, const PipelineConfig& cfg) {
    const SnapshotIndex idx = index_snapshots(snapshots);
    SolveStage out;
    std::map<std::string, int> first_day;
    for (const auto& [key, snap] : idx) first_day.emplace(key.first, key.second);
    std::vector<Window> windows;
    for (const auto& [key, snap] : idx) {
        const auto* m1 = find(idx, key.first, key.second - 1);
        const auto* m2 = find(idx, key.first, key.second - 2);
        if (m1 && m2) {
            windows.push_back({m2, m1, snap});
        } else if (key.second - 2 >= first_day.at(key.first)) {
            ++out.skips.missing_day;
        }
    }

    const auto grid = solver::Grid::make(cfg.nx, cfg.nt, 2.0 * prep::kTau);
    const auto opts = cfg.solver_options();
    std::vector<SolveSlot> slots(windows.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < windows.size(); k = next++) slots[k] = solve_window(windows[k], grid, opts);
    };
    const auto n_threads = static_cast<std::size_t>(std::max(1, cfg.jobs));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < std::min(n_threads, windows.size()); ++t) pool.emplace_back(worker);
    }

    // Slots follow the sorted window order, so merging is a plain scan.
    for (auto& slot : slots) {
        if (slot.fatal) std::rethrow_exception(slot.fatal);
        switch (slot.failure) {
            case SolveFailure::InconsistentSeries: ++out.skips.inconsistent_series; break;
            case SolveFailure::InvalidBoundary: ++out.skips.invalid_boundary; break;
            case SolveFailure::NonFinite: ++out.skips.non_finite; break;
            case SolveFailure::None: break;
        }
        if (slot.record) {
            out.skips.cg_max_iter += slot.hit_max_iter;
            out.solutions.push_back(std::move(*slot.record));
        }
    }
    log_skips("solve", out.skips);
    return out;
}

FeatureStage build_all_features(const std::vector<MarketSnapshot>& snapshots,
                                const std::vector<SolutionRecord>& solutions) {
    const SnapshotIndex idx = index_snapshots(snapshots);
    FeatureStage out;
    for (const auto& s : solutions) {
        const auto* m2 = find(idx, s.option_id, s.date - 2);
        const auto* m1 = find(idx, s.option_id, s.date - 1);
        const auto* d0 = find(idx, s.option_id, s.date);
        const auto* next = find(idx, s.option_id, s.date + 1);
        if (!m2 || !m1 || !d0) {
            ++out.skips.missing_day;
            continue;
        }
        if (!next) {
            ++out.skips.unlabeled;
            continue;
        }
        out.records.push_back(ml::build_features(*m2, *m1, *d0, s.est_tau, s.est_2tau, *next));
    }
    log_skips("features", out.skips);
    return out;
}

Models train_models(const std::vector<ml::FeatureRecord>& records, const PipelineConfig& cfg) {
    const auto split = ml::split_by_date<ml::FeatureRecord>(records, cfg.split_first, cfg.split_second);
    const ml::Dataset train = ml::make_dataset(split.train);
    if (train.source_index.empty()) throw EmptyDataset("training split has no usable records");
    spdlog::info("training on {} records ({} degenerate dropped)", train.source_index.size(), train.degenerate);

    const auto c_cfg = seeded(cfg.classifier, cfg.seed, "classifier");
    const auto r_cfg = seeded(cfg.regressor, cfg.seed, "regressor");
    Models m;
    if (cfg.jobs > 1) {
        std::jthread t([&] { m.regressor = ml::train(ml::Head::Identity, train.regression, r_cfg).params; });
        m.classifier = ml::train(ml::Head::Sigmoid, train.classification, c_cfg).params;
    } else {
        m.classifier = ml::train(ml::Head::Sigmoid, train.classification, c_cfg).params;
        m.regressor = ml::train(ml::Head::Identity, train.regression, r_cfg).params;
    }
    return m;
}

std::vector<Prediction> predict(const std::vector<ml::FeatureRecord>& records, const Models& models,
                                const PipelineConfig& cfg, SkipCounts* skips) {
    std::vector<Prediction> out;
    for (const auto& r : records) {
        if (r.date < cfg.split_first) continue;
        const auto n = ml::normalize(r);
        if (n.stats.degenerate) {
            if (skips) ++skips->degenerate;
            continue;
        }
        Prediction p;
        p.option_id = r.option_id;
        p.date = r.date;
        p.split = r.date < cfg.split_second ? Split::Validation : Split::Test;
        p.stock = r.stock_mid();
        p.strike = r.strike;
        p.real_0 = r.real_0();
        p.real_tau = r.real_tau;
        p.est_qrm = r.raw[ml::kEstTau];
        p.score = ml::forward(models.classifier, n.x);
        p.est_regression = n.stats.invert(ml::forward(models.regressor, n.x));
        out.push_back(std::move(p));
    }
    return out;
}

void ReportBundle::write(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    const std::string* contents[] = {&metrics_json,       &threshold_curve_csv, &pr_curve_csv,
                                     &moneyness_bins_csv, &solutions_csv,       &features_csv};
    for (std::size_t k = 0; k < std::size(kBundleFiles); ++k) write_text(dir / kBundleFiles[k], *contents[k]);
}

ReportBundle run_pipeline(const PipelineConfig& cfg) {
    cfg.check();
    const auto market = load_market(cfg);
    if (market.empty()) throw EmptyDataset("no options left after validation");

    ReportBundle bundle;
    const SolveStage solved = solve_all(market, cfg);
    bundle.skips += solved.skips;
    const FeatureStage features = build_all_features(market, solved.solutions);
    bundle.skips += features.skips;
    if (features.records.empty()) throw EmptyDataset("no feature records could be built");

    const auto split = ml::split_by_date<ml::FeatureRecord>(features.records, cfg.split_first, cfg.split_second);
    for (const auto& w : split.warnings) spdlog::warn("{}", w);
    if (!split.warnings.empty()) throw EmptyDataset("cannot evaluate: " + split.warnings.front());

    const Models models = train_models(features.records, cfg);
    const auto predictions = predict(features.records, models, cfg, &bundle.skips);
    log_skips("pipeline", bundle.skips);

    const Evaluation eval = evaluate(predictions);
    bundle.metrics_json = metrics_json(eval);
    bundle.threshold_curve_csv = threshold_curve_csv(eval);
    bundle.pr_curve_csv = pr_curve_csv(eval);
    bundle.moneyness_bins_csv = moneyness_bins_csv(eval);
    bundle.solutions_csv = solutions_csv(solved.solutions);
    bundle.features_csv = features_csv(features.records);
    return bundle;
}

}  // namespace qrm::pipeline
