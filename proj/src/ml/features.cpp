#include "qrm/ml/features.hpp"

#include <cmath>

namespace qrm::ml {

const std::array<const char*, kFeatureCount> kFeatureNames = {
    "est_tau",  "est_2tau", "s_a0",  "s_b0",   "u_a_m2", "u_a_m1", "u_a0",
    "u_b_m2",   "u_b_m1",   "u_b0",  "ivol_m2", "ivol_m1", "ivol0",
};

FeatureRecord build_features(const market::MarketSnapshot& day_minus2,
                             const market::MarketSnapshot& day_minus1,
                             const market::MarketSnapshot& day0, double est_tau, double est_2tau,
                             const market::MarketSnapshot& next_day) {
    const std::string& id = day0.option_id;
    if (day_minus2.option_id != id || day_minus1.option_id != id || next_day.option_id != id) {
        throw MissingDay("build_features: snapshots belong to different options");
    }
    if (day_minus1.date != day_minus2.date + 1 || day0.date != day_minus1.date + 1 ||
        next_day.date != day0.date + 1) {
        throw MissingDay("build_features: option " + id + " is missing a day around " +
                         std::to_string(day0.date));
    }

    FeatureRecord rec;
    rec.option_id = id;
    rec.date = day0.date;
    rec.strike = day0.strike;
    rec.raw = {est_tau,          est_2tau,         day0.s_a,       day0.s_b,
               day_minus2.u_a,   day_minus1.u_a,   day0.u_a,       day_minus2.u_b,
               day_minus1.u_b,   day0.u_b,         day_minus2.ivol, day_minus1.ivol,
               day0.ivol};
    rec.real_tau = next_day.option_mid();
    rec.label = rec.real_tau >= day0.option_mid() ? 1 : 0;
    return rec;
}

NormalizationStats normalization_stats(const FeatureRecord& rec) {
    const std::array<double, 6> quotes = {rec.raw[kOptionAskM2], rec.raw[kOptionAskM1],
                                          rec.raw[kOptionAsk0],  rec.raw[kOptionBidM2],
                                          rec.raw[kOptionBidM1], rec.raw[kOptionBid0]};
    NormalizationStats s;
    for (double q : quotes) s.mu += q;
    s.mu /= 6.0;
    double ss = 0.0;
    for (double q : quotes) ss += (q - s.mu) * (q - s.mu);
    s.sd = std::sqrt(ss / 5.0);
    s.degenerate = !(s.sd >= kDegenerateSd);
    return s;
}

NormalizedFeatures normalize(const FeatureRecord& rec) {
    NormalizedFeatures out;
    out.stats = normalization_stats(rec);
    const auto& s = out.stats;
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
        const double v = rec.raw[k];
        switch (k) {
            case kStockAsk0:
            case kStockBid0: out.x[k] = s.apply(v - rec.strike); break;
            case kVolM2:
            case kVolM1:
            case kVol0: out.x[k] = v; break;
            default: out.x[k] = s.apply(v); break;
        }
    }
    return out;
}

}  // namespace qrm::ml
