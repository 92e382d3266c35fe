#include "qrm/ml/training.hpp"

#include <algorithm>

#include "qrm/errors.hpp"

namespace qrm::ml {

Dataset make_dataset(std::span<const FeatureRecord> records) {
    Dataset d;
    std::vector<NormalizedFeatures> rows;
    for (std::size_t k = 0; k < records.size(); ++k) {
        NormalizedFeatures n = normalize(records[k]);
        if (n.stats.degenerate) {
            ++d.degenerate;
            continue;
        }
        d.source_index.push_back(k);
        d.stats.push_back(n.stats);
        rows.push_back(n);
    }
    const auto m = static_cast<Eigen::Index>(rows.size());
    const auto dim = static_cast<Eigen::Index>(kFeatureCount);
    d.classification.x.resize(dim, m);
    d.classification.y.resize(m);
    d.regression.y.resize(m);
    for (Eigen::Index c = 0; c < m; ++c) {
        const auto& row = rows[static_cast<std::size_t>(c)];
        for (Eigen::Index r = 0; r < dim; ++r) d.classification.x(r, c) = row.x[static_cast<std::size_t>(r)];
        const FeatureRecord& rec = records[d.source_index[static_cast<std::size_t>(c)]];
        d.classification.y(c) = rec.label;
        d.regression.y(c) = row.stats.apply(rec.real_tau);
    }
    d.regression.x = d.classification.x;
    return d;
}

std::vector<ThresholdPoint> threshold_curve(std::span<const double> scores,
                                            std::span<const int> labels) {
    if (scores.size() != labels.size()) throw DomainError("threshold_curve: size mismatch");
    if (scores.empty()) throw EmptyInput("threshold_curve: no validation predictions");
    std::size_t positives = 0;
    for (int y : labels) positives += y == 1;

    std::vector<ThresholdPoint> curve;
    curve.reserve(kThresholdSteps + 1);
    for (int k = 0; k <= kThresholdSteps; ++k) {
        ThresholdPoint pt;
        pt.c = static_cast<double>(k) / kThresholdSteps;
        std::size_t tp = 0;
        std::size_t tn = 0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            const bool buy = threshold_buy(scores[i], pt.c);
            pt.predicted_positive += buy;
            tp += buy && labels[i] == 1;
            tn += !buy && labels[i] != 1;
        }
        pt.accuracy = static_cast<double>(tp + tn) / static_cast<double>(scores.size());
        if (pt.predicted_positive > 0) {
            pt.precision = static_cast<double>(tp) / static_cast<double>(pt.predicted_positive);
        }
        if (positives > 0) pt.recall = static_cast<double>(tp) / static_cast<double>(positives);
        curve.push_back(pt);
    }
    return curve;
}

ThresholdSelection select_threshold(std::span<const double> scores, std::span<const int> labels) {
    ThresholdSelection sel;
    sel.curve = threshold_curve(scores, labels);
    const auto positives = std::count(labels.begin(), labels.end(), 1);
    if (positives == 0 || positives == static_cast<std::ptrdiff_t>(labels.size())) {
        sel.single_class = true;
        sel.c = 0.5;
        return sel;
    }
    // Accuracies share one denominator, so comparing them exactly is comparing counts.
    const auto best = std::max_element(sel.curve.begin(), sel.curve.end(),
                                       [](const auto& a, const auto& b) { return a.accuracy < b.accuracy; });
    sel.c = best->c;
    return sel;
}

}  // namespace qrm::ml
