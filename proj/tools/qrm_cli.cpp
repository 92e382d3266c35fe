// Command-line driver: each pipeline stage as a subcommand reading and
// writing flat files, plus `run` for the whole pipeline in one go.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "qrm/convergence.hpp"
#include "qrm/errors.hpp"
#include "qrm/instability.hpp"
#include "qrm/ml/mlp.hpp"
#include "qrm/pipeline/config.hpp"
#include "qrm/pipeline/csv_io.hpp"
#include "qrm/pipeline/pipeline.hpp"
#include "qrm/pipeline/report.hpp"
#include "qrm/rng.hpp"

namespace fs = std::filesystem;
using namespace qrm;
using namespace qrm::pipeline;

namespace {

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<double> beta;
    std::optional<int> nx;
    std::optional<int> nt;
    std::optional<std::string> out;
    std::optional<int> jobs;
    bool quiet = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "flat JSON config file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "root seed");
    cmd->add_option("--beta", o.beta, "regularization parameter");
    cmd->add_option("--nx", o.nx, "grid intervals in x");
    cmd->add_option("--nt", o.nt, "grid intervals in t");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--jobs", o.jobs, "worker threads for the solve stage");
    cmd->add_flag("--quiet", o.quiet, "only log warnings and errors");
}

PipelineConfig resolve(const Overrides& o) {
    PipelineConfig cfg = o.config.empty() ? PipelineConfig{} : load_config(o.config);
    if (o.seed) cfg.seed = *o.seed;
    if (o.beta) cfg.beta = *o.beta;
    if (o.nx) cfg.nx = *o.nx;
    if (o.nt) cfg.nt = *o.nt;
    if (o.out) cfg.out = *o.out;
    if (o.jobs) cfg.jobs = *o.jobs;
    cfg.check();
    if (o.quiet) spdlog::set_level(spdlog::level::warn);
    return cfg;
}

std::vector<market::MarketSnapshot> market_from(const fs::path& path) {
    return read_market_csv(path).snapshots;
}

Models load_models(const fs::path& dir) {
    return {ml::mlp_from_json(read_text(dir / "classifier.json")),
            ml::mlp_from_json(read_text(dir / "regressor.json"))};
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(item));
    if (out.empty()) throw ConfigError("empty list '" + text + "'");
    return out;
}

void log_written(const fs::path& path) { spdlog::info("wrote {}", path.string()); }

void write(const fs::path& path, const std::string& content) {
    write_text(path, content);
    log_written(path);
}

int demo_instability(const std::string& profile, int mode, int order, int samples,
                     const std::string& times, const std::optional<std::string>& out) {
    if (samples < 2) throw ConfigError("--samples must be >= 2");
    std::vector<double> f(static_cast<std::size_t>(samples));
    for (int k = 0; k < samples; ++k) {
        const double x = k * std::numbers::pi / (samples - 1);
        if (profile == "sine") {
            f[static_cast<std::size_t>(k)] = std::sin(mode * x);
        } else if (profile == "parabola") {
            f[static_cast<std::size_t>(k)] = x * (std::numbers::pi - x);
        } else {
            throw ConfigError("--profile must be sine or parabola");
        }
    }
    const auto coeffs = instability::sine_coefficients(f, order);
    const auto t = parse_list(times);
    std::string csv = "N,T,norm,growth_ratio\n";
    for (const auto& row : instability::growth_table(coeffs, t)) {
        csv += std::to_string(row.order) + ',' + format_double(row.T) + ',' +
               (row.norm.overflow ? std::string("inf") : format_double(row.norm.norm)) + ',' +
               format_double(row.growth_ratio) + '\n';
    }
    if (out) {
        write(fs::path(*out) / "instability.csv", csv);
    } else {
        std::cout << csv;
    }
    return 0;
}

int verify(const PipelineConfig& cfg, const std::optional<std::string>& out) {
    const auto exact = solver::ExactSolution::sine_mode();
    std::string csv = "experiment,nu,beta,nx,nt,error,relative_error,cg_iterations,hit_max_iterations\n";

    solver::SolverOptions opts;
    opts.beta = 1e-6;
    opts.record_history = false;
    const auto grid = solver::Grid::make(64, 64, 0.1);
    const auto m = solver::manufactured_recovery(exact, grid, opts);
    std::printf("manufactured  64x64  beta=1e-06  relative error %.4f%%  (%d CG iterations, %.2f s)\n",
                100.0 * m.relative_error, m.solution.cg_iterations, m.seconds);
    csv += "manufactured,0,1e-06,64,64,NA," + format_double(m.relative_error) + ',' +
           std::to_string(m.solution.cg_iterations) + ',' + (m.solution.hit_max_iterations ? "1" : "0") + '\n';

    solver::ConvergenceOptions copts;
    copts.seed = derive_seed(cfg.seed, "verify-convergence");
    const auto fine = solver::Grid::make(64, 128, 0.1);
    const auto rows = solver::convergence_experiment(exact, {1e-1, 1e-2, 1e-3, 0.0}, fine, copts);
    for (const auto& r : rows) {
        std::printf("convergence   64x128 nu=%-6g beta=%-8g error %.6f  (%d CG iterations%s)\n", r.nu, r.beta,
                    r.error, r.cg_iterations, r.hit_max_iterations ? ", hit max" : "");
        csv += "convergence," + format_double(r.nu) + ',' + format_double(r.beta) + ",64,128," +
               format_double(r.error) + ',' + format_double(r.relative_error) + ',' +
               std::to_string(r.cg_iterations) + ',' + (r.hit_max_iterations ? "1" : "0") + '\n';
    }
    if (out) write(fs::path(*out) / "verify.csv", csv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    spdlog::set_default_logger(spdlog::stderr_color_mt("qrm"));
    spdlog::set_pattern("[%l] %v");

    CLI::App app{"Option price forecasting by quasi-reversibility and neural networks"};
    app.require_subcommand(1);
    Overrides o;

    std::string input;
    std::string solutions_path;
    std::string features_path;
    std::string models_dir;
    std::string predictions_path;

    auto* simulate = app.add_subcommand("simulate-market", "write a synthetic market.csv");
    add_common(simulate, o);

    auto* ingest = app.add_subcommand("ingest", "validate a market file and write a clean market.csv");
    add_common(ingest, o);
    ingest->add_option("--input", input, "raw market CSV")->required()->check(CLI::ExistingFile);

    auto* solve = app.add_subcommand("solve", "QRM forecasts for every three-day window -> solutions.csv");
    add_common(solve, o);
    solve->add_option("--input", input, "market CSV (synthetic universe when omitted)")->check(CLI::ExistingFile);

    auto* features = app.add_subcommand("features", "13-feature records -> features.csv");
    add_common(features, o);
    features->add_option("--input", input, "market CSV")->required()->check(CLI::ExistingFile);
    features->add_option("--solutions", solutions_path, "solutions.csv")->required()->check(CLI::ExistingFile);

    auto* train = app.add_subcommand("train", "fit both networks -> classifier.json, regressor.json");
    add_common(train, o);
    train->add_option("--features", features_path, "features.csv")->required()->check(CLI::ExistingFile);

    auto* backtest = app.add_subcommand("backtest", "forecasts and test metrics -> predictions.csv, metrics.csv");
    add_common(backtest, o);
    backtest->add_option("--features", features_path, "features.csv")->required()->check(CLI::ExistingFile);
    backtest->add_option("--models", models_dir, "directory with classifier.json and regressor.json")
        ->required()
        ->check(CLI::ExistingDirectory);

    auto* report = app.add_subcommand("report", "metrics.json and curve files from predictions.csv");
    add_common(report, o);
    report->add_option("--predictions", predictions_path, "predictions.csv")->required()->check(CLI::ExistingFile);
    report->add_option("--solutions", solutions_path, "solutions.csv to include in the bundle")
        ->check(CLI::ExistingFile);
    report->add_option("--features", features_path, "features.csv to include in the bundle")
        ->check(CLI::ExistingFile);

    auto* run = app.add_subcommand("run", "the whole pipeline -> report bundle");
    add_common(run, o);
    run->add_option("--input", input, "market CSV (synthetic universe when omitted)")->check(CLI::ExistingFile);

    std::string profile = "sine";
    int mode = 1;
    int order = 5;
    int samples = 2001;
    std::string times = "0,0.1,0.5,1";
    std::optional<std::string> demo_out;
    auto* demo = app.add_subcommand("demo-instability", "norm growth of the backward heat equation -> CSV");
    demo->add_option("--profile", profile, "sine or parabola")->check(CLI::IsMember({"sine", "parabola"}));
    demo->add_option("--mode", mode, "n in sin(n x) for the sine profile");
    demo->add_option("--order", order, "number of sine modes kept")->check(CLI::PositiveNumber);
    demo->add_option("--samples", samples, "profile samples on [0, pi]");
    demo->add_option("--times", times, "comma-separated T values");
    demo->add_option("--out", demo_out, "output directory (stdout when omitted)");

    auto* verify_cmd = app.add_subcommand("verify", "manufactured-solution and convergence experiments");
    add_common(verify_cmd, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (demo->parsed()) return demo_instability(profile, mode, order, samples, times, demo_out);

        PipelineConfig cfg = resolve(o);
        if (!input.empty()) cfg.input = input;
        const fs::path out = cfg.out;

        if (simulate->parsed()) {
            write(out / "market.csv", market_csv(simulate_universe(cfg)));
        } else if (ingest->parsed()) {
            const auto res = read_market_csv(input);
            if (res.snapshots.empty()) throw EmptyDataset("no valid rows in " + input);
            write(out / "market.csv", market_csv(res.snapshots, &res.dates));
        } else if (solve->parsed()) {
            const auto market = load_market(cfg);
            if (market.empty()) throw EmptyDataset("no options left after validation");
            write(out / "solutions.csv", solutions_csv(solve_all(market, cfg).solutions));
        } else if (features->parsed()) {
            const auto stage = build_all_features(market_from(input), read_solutions_csv(solutions_path));
            write(out / "features.csv", features_csv(stage.records));
        } else if (train->parsed()) {
            const Models m = train_models(read_features_csv(features_path), cfg);
            write(out / "classifier.json", ml::to_json(m.classifier));
            write(out / "regressor.json", ml::to_json(m.regressor));
        } else if (backtest->parsed()) {
            const auto preds = predict(read_features_csv(features_path), load_models(models_dir), cfg);
            const Evaluation e = evaluate(preds);
            write(out / "predictions.csv", predictions_csv(preds));
            write(out / "metrics.csv", metrics_csv(e));
        } else if (report->parsed()) {
            const Evaluation e = evaluate(read_predictions_csv(predictions_path));
            ReportBundle b;
            b.metrics_json = metrics_json(e);
            b.threshold_curve_csv = threshold_curve_csv(e);
            b.pr_curve_csv = pr_curve_csv(e);
            b.moneyness_bins_csv = moneyness_bins_csv(e);
            write(out / "metrics.json", b.metrics_json);
            write(out / "threshold_curve.csv", b.threshold_curve_csv);
            write(out / "pr_curve.csv", b.pr_curve_csv);
            write(out / "moneyness_bins.csv", b.moneyness_bins_csv);
            if (!solutions_path.empty()) write(out / "solutions.csv", read_text(solutions_path));
            if (!features_path.empty()) write(out / "features.csv", read_text(features_path));
        } else if (run->parsed()) {
            const ReportBundle b = run_pipeline(cfg);
            b.write(out);
            spdlog::info("wrote report bundle to {}", out.string());
        } else if (verify_cmd->parsed()) {
            return verify(cfg, o.out);
        }
        return 0;
    } catch (const ConfigError& e) {
        spdlog::error("config error: {}", e.what());
        return 2;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
}
