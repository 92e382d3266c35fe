#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qrm/errors.hpp"
#include "qrm/market_data.hpp"

namespace qrm::ml {

inline constexpr std::size_t kFeatureCount = 13;

/// Position of each raw feature in FeatureRecord::raw.
enum Feature : std::size_t {
    kEstTau = 0,
    kEst2Tau,
    kStockAsk0,
    kStockBid0,
    kOptionAskM2,
    kOptionAskM1,
    kOptionAsk0,
    kOptionBidM2,
    kOptionBidM1,
    kOptionBid0,
    kVolM2,
    kVolM1,
    kVol0,
};

/// Column names used in feature files, in Feature order.
extern const std::array<const char*, kFeatureCount> kFeatureNames;

struct FeatureRecord {
    std::string option_id;
    int date = 0;  ///< day index of t = 0
    std::array<double, kFeatureCount> raw{};
    double strike = 0.0;
    int label = 0;  ///< 1 iff next-day mid >= today's mid
    double real_tau = 0.0;

    double real_0() const { return 0.5 * (raw[kOptionAsk0] + raw[kOptionBid0]); }
    double stock_mid() const { return 0.5 * (raw[kStockAsk0] + raw[kStockBid0]); }
};

/// Assembles the 13 raw features and the label. Throws MissingDay unless
/// the four snapshots are one option on consecutive days.
FeatureRecord build_features(const market::MarketSnapshot& day_minus2,
                             const market::MarketSnapshot& day_minus1,
                             const market::MarketSnapshot& day0, double est_tau, double est_2tau,
                             const market::MarketSnapshot& next_day);

inline constexpr double kDegenerateSd = 1e-9;

struct NormalizationStats {
    double mu = 0.0;  ///< mean of the six option quotes
    double sd = 0.0;  ///< sample standard deviation of the same six quotes
    bool degenerate = false;

    double apply(double v) const { return degenerate ? 0.0 : (v - mu) / sd; }
    double invert(double z) const { return degenerate ? mu : z * sd + mu; }
};

NormalizationStats normalization_stats(const FeatureRecord& rec);

struct NormalizedFeatures {
    std::array<double, kFeatureCount> x{};
    NormalizationStats stats;
};

/// Option prices and forecasts map to (v - mu) / sd, stock quotes to
/// ((s - strike) - mu) / sd, volatilities pass through. A degenerate record
/// gets zeros for every price feature.
NormalizedFeatures normalize(const FeatureRecord& rec);

template <class Record>
struct DateSplit {
    std::vector<Record> train;
    std::vector<Record> validation;
    std::vector<Record> test;
    std::vector<std::string> warnings;
};

/// train: date < first; validation: first <= date < second; test: date >= second.
template <class Record>
DateSplit<Record> split_by_date(std::span<const Record> records, int first, int second) {
    if (!(first < second)) throw ConfigError("split_by_date: boundaries must be increasing");
    DateSplit<Record> out;
    for (const auto& r : records) {
        if (r.date < first) {
            out.train.push_back(r);
        } else if (r.date < second) {
            out.validation.push_back(r);
        } else {
            out.test.push_back(r);
        }
    }
    if (out.train.empty()) out.warnings.emplace_back("training split is empty");
    if (out.validation.empty()) out.warnings.emplace_back("validation split is empty");
    if (out.test.empty()) out.warnings.emplace_back("test split is empty");
    return out;
}

}  // namespace qrm::ml
