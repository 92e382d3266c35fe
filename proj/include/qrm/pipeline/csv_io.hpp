#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qrm/market_data.hpp"
#include "qrm/ml/features.hpp"

namespace qrm::pipeline {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
/// NA for an undefined value.
std::string format_optional(const std::optional<double>& v);
/// Throws DomainError on anything but a complete decimal number.
double parse_double(std::string_view text);
int parse_int(std::string_view text);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Throws IoError if the column is missing.
    std::size_t column(std::string_view name) const;
};

/// Plain comma-separated text, header first; surrounding double quotes are
/// stripped from fields. Throws IoError.
CsvTable read_csv(const std::filesystem::path& path);

/// Writes the whole file at once, creating parent directories. Throws IoError.
void write_text(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

/// Calendar date of trading day `index`: weekdays counted from 2018-01-02.
std::string trading_day_iso(int index);

struct IngestResult {
    std::vector<market::MarketSnapshot> snapshots;  ///< sorted by option_id, then date
    std::vector<std::string> dates;  ///< ISO date of each day index
    std::size_t rows = 0;
    std::size_t malformed = 0;  ///< unparsable fields
    std::size_t invalid_quote = 0;
    std::size_t duplicate = 0;  ///< repeated option_id/date, first row kept
};

/// Market file with columns date, option_id, strike, expiry, stock_bid,
/// stock_ask, option_bid, option_ask, ivol (extra columns ignored). Distinct
/// dates are ranked to consecutive day indices. Bad rows are counted and
/// skipped.
IngestResult read_market_csv(const std::filesystem::path& path);
/// Dates are written from `dates` (ISO text per day index) when given,
/// otherwise from trading_day_iso.
std::string market_csv(const std::vector<market::MarketSnapshot>& snapshots,
                       const std::vector<std::string>* dates = nullptr);

/// One solved window: the QRM forecast from the three days ending at `date`.
struct SolutionRecord {
    std::string option_id;
    int date = 0;
    double beta = 0.0;
    int cg_iterations = 0;
    double residual_norm = 0.0;
    double j_value = 0.0;
    double est_tau = 0.0;
    double est_2tau = 0.0;
};

std::string solutions_csv(const std::vector<SolutionRecord>& rows);
std::vector<SolutionRecord> read_solutions_csv(const std::filesystem::path& path);

std::string features_csv(const std::vector<ml::FeatureRecord>& rows);
std::vector<ml::FeatureRecord> read_features_csv(const std::filesystem::path& path);

enum class Split { Validation, Test };

/// Forecasts of all three methods for one evaluation record.
struct Prediction {
    std::string option_id;
    int date = 0;
    Split split = Split::Test;
    double stock = 0.0;
    double strike = 0.0;
    double real_0 = 0.0;
    double real_tau = 0.0;
    double est_qrm = 0.0;
    double score = 0.0;  ///< classifier probability
    double est_regression = 0.0;  ///< de-normalized regressor output

    int label() const { return real_tau >= real_0 ? 1 : 0; }
};

std::string predictions_csv(const std::vector<Prediction>& rows);
std::vector<Prediction> read_predictions_csv(const std::filesystem::path& path);

}  // namespace qrm::pipeline
