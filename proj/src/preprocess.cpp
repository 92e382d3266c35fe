#include "qrm/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qrm/errors.hpp"

namespace qrm::prep {

Quadratic fit_quadratic(const std::array<double, 3>& values, double tau) {
    const auto [v_m2, v_m1, v_0] = values;
    // With a = c1 tau and b = c2 tau^2:
    //   v(-tau)   - v(0) = -a +  b
    //   v(-2 tau) - v(0) = -2a + 4b
    const double b = 0.5 * (v_m2 - 2.0 * v_m1 + v_0);
    const double a = b - (v_m1 - v_0);
    return Quadratic{v_0, a / tau, b / (tau * tau)};
}

double extrapolate(const Quadratic& q, double t, double tau) {
    const double limit = 2.0 * tau * (1.0 + 1e-12);
    if (!(std::abs(t) <= limit)) {
        throw RangeError("extrapolate: t = " + std::to_string(t) + " outside [-2 tau, 2 tau]");
    }
    return q(t);
}

double a_coefficient(double x, double s_b0, double s_a0) {
    if (!(s_b0 > 0.0) || !(s_a0 > s_b0)) {
        throw DomainError("a_coefficient: requires 0 < s_b < s_a");
    }
    const double width = s_a0 - s_b0;
    const double s = x * width + s_b0;
    return 0.5 * market::kTradingDaysPerYear * (s * s) / (width * width);
}

double DimensionlessProblem::sigma(double t) const { return std::max(sigma_fn(t), kMinSigma); }

DimensionlessProblem assemble_problem(const market::MarketSnapshot& day_minus2,
                                      const market::MarketSnapshot& day_minus1,
                                      const market::MarketSnapshot& day0, int check_nodes) {
    if (day_minus2.option_id != day0.option_id || day_minus1.option_id != day0.option_id) {
        throw InconsistentSeries("assemble_problem: snapshots belong to different options");
    }
    if (day_minus1.date != day_minus2.date + 1 || day0.date != day_minus1.date + 1) {
        throw InconsistentSeries("assemble_problem: option " + day0.option_id +
                                 " days are not consecutive");
    }
    if (check_nodes < 1) throw DomainError("assemble_problem: check_nodes must be >= 1");

    DimensionlessProblem p;
    p.s_b0 = day0.s_b;
    p.s_a0 = day0.s_a;
    if (!(p.s_b0 < p.s_a0)) throw InvalidBoundary("assemble_problem: stock bid >= ask at t = 0");
    p.ub_fn = fit_quadratic({day_minus2.u_b, day_minus1.u_b, day0.u_b}, p.tau);
    p.ua_fn = fit_quadratic({day_minus2.u_a, day_minus1.u_a, day0.u_a}, p.tau);
    p.sigma_fn = fit_quadratic({day_minus2.ivol, day_minus1.ivol, day0.ivol}, p.tau);

    for (int j = 0; j <= check_nodes; ++j) {
        const double t = p.horizon() * j / check_nodes;
        const double ub = extrapolate(p.ub_fn, t, p.tau);
        const double ua = extrapolate(p.ua_fn, t, p.tau);
        const double sig = extrapolate(p.sigma_fn, t, p.tau);
        if (!std::isfinite(ub) || !std::isfinite(ua) || !(ub < ua)) {
            throw InvalidBoundary("assemble_problem: option " + day0.option_id + " day " +
                                  std::to_string(day0.date) + ": extrapolated bid >= ask");
        }
        if (!(sig > 0.0)) {
            throw InvalidBoundary("assemble_problem: option " + day0.option_id + " day " +
                                  std::to_string(day0.date) + ": extrapolated volatility <= 0");
        }
    }
    return p;
}

}  // namespace qrm::prep
