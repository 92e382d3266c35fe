#include "qrm/trading.hpp"

#include <cmath>
#include <map>

#include <spdlog/spdlog.h>

#include "qrm/errors.hpp"

namespace qrm::trading {

Decision decide(const TradeRecord& r) {
    return r.est_tau >= r.real_0 ? Decision::Buy : Decision::NoBuy;
}

Outcome classify(Decision d, double real_0, double real_tau) {
    const bool positive = real_tau >= real_0;
    if (d == Decision::Buy) return positive ? Outcome::TruePositive : Outcome::FalsePositive;
    return positive ? Outcome::FalseNegative : Outcome::TrueNegative;
}

Outcome classify(const TradeRecord& r) { return classify(decide(r), r.real_0, r.real_tau); }

void ConfusionCounts::add(Outcome o) {
    switch (o) {
        case Outcome::TruePositive: ++tp; break;
        case Outcome::TrueNegative: ++tn; break;
        case Outcome::FalsePositive: ++fp; break;
        case Outcome::FalseNegative: ++fn; break;
    }
}

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& other) {
    tp += other.tp;
    tn += other.tn;
    fp += other.fp;
    fn += other.fn;
    return *this;
}

ConfusionCounts tally(std::span<const Outcome> outcomes) {
    ConfusionCounts c;
    for (Outcome o : outcomes) c.add(o);
    return c;
}

namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

StrategyMetrics metrics(const ConfusionCounts& c) {
    if (c.total() == 0) throw EmptyInput("metrics: no classified records");
    StrategyMetrics m;
    m.n = c.total();
    m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(m.n);
    m.precision = ratio(c.tp, c.tp + c.fp);
    m.recall = ratio(c.tp, c.tp + c.fn);
    return m;
}

StrategyMetrics metrics(const ConfusionCounts& c, std::span<const TradeRecord> records) {
    if (records.empty()) throw EmptyInput("metrics: no records");
    StrategyMetrics m = metrics(c);
    double sum = 0.0;
    std::size_t used = 0;
    for (const auto& r : records) {
        if (r.real_tau == 0.0) {
            ++m.error_excluded;
            continue;
        }
        sum += std::abs((r.est_tau - r.real_tau) / r.real_tau);
        ++used;
    }
    if (m.error_excluded > 0) {
        spdlog::warn("metrics: {} records with zero next-day price excluded from error",
                     m.error_excluded);
    }
    if (used > 0) m.mean_relative_error = sum / static_cast<double>(used);
    return m;
}

int moneyness_bin(double stock, double strike, double step) {
    if (!(stock > 0.0)) throw DomainError("moneyness_bin: stock price must be positive");
    const double m = (stock - strike) / stock;
    return static_cast<int>(std::floor(m / step + 1e-9));
}

std::vector<MoneynessBin> moneyness_bins(std::span<const BinnedDecision> decisions, double step) {
    std::map<int, ConfusionCounts> bins;
    for (const auto& d : decisions) bins[moneyness_bin(d.stock, d.strike, step)].add(d.outcome);
    std::vector<MoneynessBin> out;
    if (bins.empty()) return out;
    // Gaps between occupied bins are reported as empty bins.
    for (int bin = bins.begin()->first; bin <= bins.rbegin()->first; ++bin) {
        const ConfusionCounts counts = bins.contains(bin) ? bins[bin] : ConfusionCounts{};
        out.push_back({bin, bin * step, (bin + 1) * step, counts,
                       ratio(counts.tp, counts.tp + counts.fp)});
    }
    return out;
}

}  // namespace qrm::trading
