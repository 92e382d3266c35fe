#pragma once

#include <array>

#include "qrm/market_data.hpp"

namespace qrm::prep {

/// One trading day in years.
inline constexpr double kTau = 1.0 / market::kTradingDaysPerYear;

/// Lower clamp applied to the extrapolated volatility.
inline constexpr double kMinSigma = 1e-4;

/// q(t) = c0 + c1 t + c2 t^2, t in years.
struct Quadratic {
    double c0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;

    double operator()(double t) const { return c0 + t * (c1 + t * c2); }
};

/// Interpolates values sampled at t = -2 tau, -tau, 0 (in that order).
Quadratic fit_quadratic(const std::array<double, 3>& values, double tau = kTau);

/// Evaluates q at t; throws RangeError outside [-2 tau, 2 tau].
double extrapolate(const Quadratic& q, double t, double tau = kTau);

/// A(x) = (255/2) [x (s_a - s_b) + s_b]^2 / (s_a - s_b)^2, the coefficient of
/// u_xx after mapping [s_b, s_a] onto [0, 1] and days onto years.
double a_coefficient(double x, double s_b0, double s_a0);

/// Forward-in-time problem on (0,1) x (0, 2 tau) built from three days of quotes.
struct DimensionlessProblem {
    double s_b0 = 0.0;
    double s_a0 = 0.0;
    Quadratic sigma_fn;
    Quadratic ub_fn;
    Quadratic ua_fn;
    double tau = kTau;

    double horizon() const { return 2.0 * tau; }
    double ub(double t) const { return ub_fn(t); }
    double ua(double t) const { return ua_fn(t); }
    double sigma(double t) const;
    /// Linear initial condition between u_b(0) and u_a(0).
    double g(double x) const { return (ua_fn.c0 - ub_fn.c0) * x + ub_fn.c0; }
    double a(double x) const { return a_coefficient(x, s_b0, s_a0); }
};

/// Builds the problem from the snapshots at t = -2 tau, -tau and 0.
/// `check_nodes` is the number of time intervals on [0, 2 tau] at whose
/// nodes the extrapolated boundary data is checked.
/// Throws InconsistentSeries or InvalidBoundary.
DimensionlessProblem assemble_problem(const market::MarketSnapshot& day_minus2,
                                      const market::MarketSnapshot& day_minus1,
                                      const market::MarketSnapshot& day0, int check_nodes = 16);

}  // namespace qrm::prep
