#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qrm/solver.hpp"

namespace qrm::solver {

/// Closed-form solution of v_t + b v_xx = 0 with constant b, used to
/// manufacture exact boundary and initial data.
struct ExactSolution {
    std::string name;
    double b = 1.0;
    std::function<double(double, double)> v;

    /// v(x,t) = exp(pi^2 t) sin(pi x) with b = 1: zero side data, z = sin(pi x).
    static ExactSolution sine_mode();
};

/// Discrete L2 distance on the nodes with t <= T - epsilon, using the full
/// grid trapezoid weights so that a larger epsilon only drops terms.
double l2_error(const GridFunction& u, const ExactSolution& exact, double epsilon = 0.0);
double l2_norm(const ExactSolution& exact, const Grid& grid, double epsilon = 0.0);

struct ManufacturedResult {
    RegularizedSolution solution;
    double relative_error = 0.0;  ///< over the whole grid
    double est_mid = 0.0;  ///< u(1/2, T/2)
    double exact_mid = 0.0;
    double est_end = 0.0;  ///< u(1/2, T)
    double exact_end = 0.0;
    double seconds = 0.0;
};

/// Solves the noiseless manufactured problem on `grid`.
ManufacturedResult manufactured_recovery(const ExactSolution& exact, const Grid& grid,
                                         const SolverOptions& options);

struct ConvergenceOptions {
    double epsilon_fraction = 0.25;  ///< epsilon = fraction * T
    std::uint64_t seed = 2024;
    double noiseless_beta = 1e-6;  ///< beta used when nu == 0
    double tol = kDefaultTol;
    int max_iter = 50000;
};

struct ConvergenceRow {
    double nu = 0.0;
    double beta = 0.0;
    double error = 0.0;  ///< absolute L2 error on Q_{T - epsilon}
    double relative_error = 0.0;
    int cg_iterations = 0;
    bool hit_max_iterations = false;
};

/// For each noise level nu: perturbs the side data at t > 0 by independent
/// uniform[-nu, nu] values (seeded), minimizes with beta = nu^2 (nu = 0
/// uses noiseless_beta), and measures the error against the exact solution.
std::vector<ConvergenceRow> convergence_experiment(const ExactSolution& exact,
                                                   const std::vector<double>& noise_levels,
                                                   const Grid& grid,
                                                   const ConvergenceOptions& options = {});

}  // namespace qrm::solver
