#include "qrm/instability.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "qrm/errors.hpp"

namespace qrm::instability {

namespace {
constexpr double kExponentLimit = 700.0;
}

void FourierProfile::check() const {
    if (coefficients.empty()) throw DomainError("FourierProfile: order must be >= 1");
    for (double c : coefficients) {
        if (!std::isfinite(c)) throw DomainError("FourierProfile: non-finite coefficient");
    }
}

FourierProfile sine_coefficients(std::span<const double> samples, int order) {
    if (order < 1) throw DomainError("sine_coefficients: order must be >= 1");
    if (samples.size() < 4 * static_cast<std::size_t>(order)) {
        throw ResolutionError("sine_coefficients: need at least 4N samples");
    }
    const std::size_t m = samples.size();
    const double h = std::numbers::pi / static_cast<double>(m - 1);
    FourierProfile p;
    p.coefficients.reserve(static_cast<std::size_t>(order));
    for (int n = 1; n <= order; ++n) {
        double sum = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double w = (k == 0 || k == m - 1) ? 0.5 : 1.0;
            sum += w * samples[k] * std::sin(n * (static_cast<double>(k) * h));
        }
        p.coefficients.push_back(2.0 / std::numbers::pi * h * sum);
    }
    return p;
}

NormAtTime truncated_norm_at_T(const FourierProfile& profile, double T) {
    profile.check();
    if (!(T >= 0.0)) throw DomainError("truncated_norm_at_T: T must be >= 0");
    const double n = profile.order();
    if (2.0 * n * n * T > kExponentLimit) {
        return {std::numeric_limits<double>::infinity(), true};
    }
    double sum = 0.0;
    for (int k = 1; k <= profile.order(); ++k) {
        const double f = profile.coefficients[static_cast<std::size_t>(k - 1)];
        sum += f * f * std::exp(2.0 * k * k * T);
    }
    return {std::sqrt(0.5 * std::numbers::pi * sum), false};
}

std::vector<GrowthRow> growth_table(const FourierProfile& profile, std::span<const double> times) {
    profile.check();
    std::vector<GrowthRow> rows;
    for (int order = 1; order <= profile.order(); ++order) {
        FourierProfile truncated{{profile.coefficients.begin(),
                                  profile.coefficients.begin() + order}};
        const double base = truncated_norm_at_T(truncated, 0.0).norm;
        for (double T : times) {
            GrowthRow row{order, T, truncated_norm_at_T(truncated, T), 0.0};
            if (row.norm.overflow) {
                row.growth_ratio = std::numeric_limits<double>::infinity();
            } else {
                row.growth_ratio = base > 0.0 ? row.norm.norm / base
                                              : std::numeric_limits<double>::quiet_NaN();
            }
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace qrm::instability
