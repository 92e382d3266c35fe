#include <filesystem>
#include <fstream>
#include <limits>
#include <set>

#include <gtest/gtest.h>

#include "qrm/errors.hpp"
#include "qrm/pipeline/config.hpp"
#include "qrm/pipeline/csv_io.hpp"
#include "qrm/pipeline/pipeline.hpp"
#include "qrm/pipeline/report.hpp"

using namespace qrm;
using namespace qrm::pipeline;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::path(QRM_TEST_TMPDIR) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

PipelineConfig small_config() {
    PipelineConfig cfg;
    cfg.seed = 5;
    cfg.synthetic.n_options = 6;
    for (auto* t : {&cfg.classifier, &cfg.regressor}) {
        t->epochs = 40;
        t->hidden_width = 6;
        t->hidden_layers = 2;
        t->learning_rate = 0.05;
    }
    return cfg;
}

}  // namespace

TEST(CsvIo, NumberFormattingRoundTrips) {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 123456.789, 0.0}) {
        EXPECT_EQ(parse_double(format_double(v)), v);
    }
    EXPECT_EQ(format_double(0.5), "0.5");
    EXPECT_EQ(format_optional(std::nullopt), "NA");
    EXPECT_EQ(format_optional(0.25), "0.25");
    EXPECT_THROW(parse_double("abc"), DomainError);
    EXPECT_THROW(parse_double("1.5x"), DomainError);
    EXPECT_THROW(parse_int("2.5"), DomainError);
    EXPECT_EQ(parse_int("-17"), -17);
}

TEST(CsvIo, TradingDaysSkipWeekends) {
    EXPECT_EQ(trading_day_iso(0), "2018-01-02");
    EXPECT_EQ(trading_day_iso(3), "2018-01-05");
    EXPECT_EQ(trading_day_iso(4), "2018-01-08");
}

TEST(CsvIo, MarketFileRoundTripAndBadRows) {
    const auto dir = scratch("market_io");
    market::SyntheticMarketConfig mc;
    mc.n_days = 6;
    auto snaps = market::simulate_market(mc);
    write_text(dir / "m.csv", market_csv(snaps));
    const auto back = read_market_csv(dir / "m.csv");
    ASSERT_EQ(back.snapshots.size(), snaps.size());
    for (std::size_t k = 0; k < snaps.size(); ++k) {
        EXPECT_EQ(back.snapshots[k].u_a, snaps[k].u_a);
        EXPECT_EQ(back.snapshots[k].s_b, snaps[k].s_b);
        EXPECT_EQ(back.snapshots[k].date, snaps[k].date);
    }
    EXPECT_EQ(back.dates.front(), "2018-01-02");

    std::string text = read_text(dir / "m.csv");
    const std::string last_line = text.substr(text.rfind('\n', text.size() - 2) + 1);
    text += last_line;  // duplicate
    text += "2018-02-01,SYN,100,2018-06-01,100,99,2,2.2,0.3\n";  // crossed stock quote
    text += "2018-02-02,SYN,100,2018-06-01,abc,101,2,2.2,0.3\n";  // malformed
    write_text(dir / "bad.csv", text);
    const auto bad = read_market_csv(dir / "bad.csv");
    EXPECT_EQ(bad.snapshots.size(), snaps.size());
    EXPECT_EQ(bad.duplicate, 1u);
    EXPECT_EQ(bad.invalid_quote, 1u);
    EXPECT_EQ(bad.malformed, 1u);
}

TEST(CsvIo, MissingColumnOrFileIsAnIoError) {
    const auto dir = scratch("missing_col");
    write_text(dir / "m.csv", "date,option_id\n2018-01-02,A\n");
    EXPECT_THROW(read_market_csv(dir / "m.csv"), IoError);
    EXPECT_THROW(read_market_csv(dir / "nope.csv"), IoError);
}

TEST(Config, ParseOverridesAndRejectsUnknownKeys) {
    const auto cfg = parse_config(R"({"seed": 9, "nx": 16, "beta": 0.02, "classifier_epochs": 7, "n_options": 3})");
    EXPECT_EQ(cfg.seed, 9u);
    EXPECT_EQ(cfg.nx, 16);
    EXPECT_DOUBLE_EQ(cfg.beta, 0.02);
    EXPECT_EQ(cfg.classifier.epochs, 7);
    EXPECT_EQ(cfg.synthetic.n_options, 3);
    EXPECT_EQ(cfg.nt, 16);
    EXPECT_THROW(parse_config(R"({"betta": 0.1})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"nx": "wide"})"), ConfigError);
    EXPECT_THROW(parse_config("[1, 2]"), ConfigError);
    EXPECT_THROW(parse_config("{"), ConfigError);
}

TEST(Config, JsonRoundTrip) {
    auto cfg = small_config();
    cfg.beta = 0.03;
    cfg.regressor.lambda = 0.125;
    const auto back = parse_config(to_json(cfg));
    EXPECT_EQ(to_json(back), to_json(cfg));
}

TEST(Config, CheckRejectsBadValues) {
    auto cfg = small_config();
    cfg.beta = 1.0;
    EXPECT_THROW(cfg.check(), ConfigError);
    cfg = small_config();
    cfg.split_second = cfg.split_first;
    EXPECT_THROW(cfg.check(), ConfigError);
    cfg = small_config();
    cfg.input = "/definitely/not/here.csv";
    EXPECT_THROW(cfg.check(), ConfigError);
    cfg = small_config();
    cfg.jobs = 0;
    EXPECT_THROW(cfg.check(), ConfigError);
}

TEST(Pipeline, SolveStageIsIndependentOfThreadCount) {
    auto cfg = small_config();
    const auto market = simulate_universe(cfg);
    const auto one = solve_all(market, cfg);
    cfg.jobs = 3;
    const auto three = solve_all(market, cfg);
    EXPECT_EQ(solutions_csv(one.solutions), solutions_csv(three.solutions));
    EXPECT_EQ(one.skips.invalid_boundary, three.skips.invalid_boundary);
    // 28 windows per option, minus skips
    EXPECT_EQ(one.solutions.size() + one.skips.dropped(), 6u * 28u);
}

TEST(Pipeline, SolutionsAndFeaturesRoundTripThroughFiles) {
    const auto dir = scratch("roundtrip");
    const auto cfg = small_config();
    const auto market = simulate_universe(cfg);
    const auto solved = solve_all(market, cfg);
    write_text(dir / "solutions.csv", solutions_csv(solved.solutions));
    EXPECT_EQ(solutions_csv(read_solutions_csv(dir / "solutions.csv")), solutions_csv(solved.solutions));
    const auto feats = build_all_features(market, solved.solutions);
    write_text(dir / "features.csv", features_csv(feats.records));
    const auto back = read_features_csv(dir / "features.csv");
    ASSERT_EQ(back.size(), feats.records.size());
    EXPECT_EQ(features_csv(back), features_csv(feats.records));
    EXPECT_EQ(back.front().raw, feats.records.front().raw);
}

TEST(Pipeline, RunIsDeterministicAcrossJobs) {
    auto cfg = small_config();
    const auto a = run_pipeline(cfg);
    cfg.jobs = 4;
    const auto b = run_pipeline(cfg);
    EXPECT_EQ(a.metrics_json, b.metrics_json);
    EXPECT_EQ(a.threshold_curve_csv, b.threshold_curve_csv);
    EXPECT_EQ(a.pr_curve_csv, b.pr_curve_csv);
    EXPECT_EQ(a.moneyness_bins_csv, b.moneyness_bins_csv);
    EXPECT_EQ(a.solutions_csv, b.solutions_csv);
    EXPECT_EQ(a.features_csv, b.features_csv);
    cfg.seed = 6;
    EXPECT_NE(run_pipeline(cfg).solutions_csv, a.solutions_csv);
}

TEST(Pipeline, StagedRunThroughFilesMatchesOneShot) {
    const auto dir = scratch("staged");
    const auto cfg = small_config();
    const auto bundle = run_pipeline(cfg);

    write_text(dir / "market.csv", market_csv(simulate_universe(cfg)));
    const auto market = read_market_csv(dir / "market.csv").snapshots;
    write_text(dir / "solutions.csv", solutions_csv(solve_all(market, cfg).solutions));
    const auto solutions = read_solutions_csv(dir / "solutions.csv");
    write_text(dir / "features.csv", features_csv(build_all_features(market, solutions).records));
    const auto records = read_features_csv(dir / "features.csv");
    const auto models = train_models(records, cfg);
    write_text(dir / "predictions.csv", predictions_csv(predict(records, models, cfg)));
    const auto eval = evaluate(read_predictions_csv(dir / "predictions.csv"));

    EXPECT_EQ(metrics_json(eval), bundle.metrics_json);
    EXPECT_EQ(threshold_curve_csv(eval), bundle.threshold_curve_csv);
    EXPECT_EQ(pr_curve_csv(eval), bundle.pr_curve_csv);
    EXPECT_EQ(moneyness_bins_csv(eval), bundle.moneyness_bins_csv);
    EXPECT_EQ(read_text(dir / "solutions.csv"), bundle.solutions_csv);
    EXPECT_EQ(read_text(dir / "features.csv"), bundle.features_csv);
}

TEST(Pipeline, BundleWritesExactlySixFiles) {
    const auto dir = scratch("bundle");
    run_pipeline(small_config()).write(dir / "out");
    std::set<std::string> names;
    for (const auto& e : fs::directory_iterator(dir / "out")) names.insert(e.path().filename().string());
    EXPECT_EQ(names, std::set<std::string>(std::begin(kBundleFiles), std::end(kBundleFiles)));
}

TEST(Pipeline, EmptySplitsAreReported) {
    auto cfg = small_config();
    cfg.split_first = 40;
    cfg.split_second = 50;
    EXPECT_THROW(run_pipeline(cfg), EmptyDataset);
    EXPECT_THROW(evaluate({}), EmptyDataset);
}

TEST(Pipeline, PredictionsCoverValidationAndTestOnly) {
    const auto cfg = small_config();
    const auto market = simulate_universe(cfg);
    const auto records = build_all_features(market, solve_all(market, cfg).solutions).records;
    const auto preds = predict(records, train_models(records, cfg), cfg);
    ASSERT_FALSE(preds.empty());
    for (const auto& p : preds) {
        EXPECT_GE(p.date, cfg.split_first);
        EXPECT_EQ(p.split, p.date < cfg.split_second ? Split::Validation : Split::Test);
        EXPECT_GT(p.score, 0.0);
        EXPECT_LT(p.score, 1.0);
    }
}

TEST(Report, MetricsJsonHasTheExpectedSections) {
    const auto bundle = run_pipeline(small_config());
    for (const char* key : {"\"threshold\"", "\"validation\"", "\"test\"", "\"published_reference\"",
                            "\"accuracy\"", "\"precision\"", "\"recall\"", "\"classifier\"", "\"regressor\"",
                            "\"qrm\""}) {
        EXPECT_NE(bundle.metrics_json.find(key), std::string::npos) << key;
    }
    EXPECT_EQ(bundle.threshold_curve_csv.substr(0, bundle.threshold_curve_csv.find('\n')),
              "method,c,predicted_positive,accuracy");
}
