#pragma once

#include <span>
#include <vector>

namespace qrm::instability {

/// Sine-series coefficients f_1..f_N of a profile on (0, pi).
struct FourierProfile {
    std::vector<double> coefficients;  ///< coefficients[n - 1] = f_n

    int order() const { return static_cast<int>(coefficients.size()); }
    /// Throws DomainError unless N >= 1 and every coefficient is finite.
    void check() const;
};

/// f_n = (2/pi) \int_0^pi f(x) sin(nx) dx by composite trapezoid over
/// samples at x_k = k pi / (M - 1), k = 0..M-1. Throws ResolutionError
/// when M < 4N.
FourierProfile sine_coefficients(std::span<const double> samples, int order);

struct NormAtTime {
    double norm = 0.0;  ///< +inf when overflowed
    bool overflow = false;
};

/// || u_N(., T) ||_{L2(0,pi)} = sqrt((pi/2) sum f_n^2 exp(2 n^2 T)) for the
/// reversed-time heat equation. Flags overflow when 2 N^2 T > 700.
NormAtTime truncated_norm_at_T(const FourierProfile& profile, double T);

struct GrowthRow {
    int order = 0;
    double T = 0.0;
    NormAtTime norm;
    double growth_ratio = 0.0;  ///< norm(T) / norm(0); +inf on overflow
};

/// Norms and growth ratios for every truncation 1..N and every T.
std::vector<GrowthRow> growth_table(const FourierProfile& profile, std::span<const double> times);

}  // namespace qrm::instability
