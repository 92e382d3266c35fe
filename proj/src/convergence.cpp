#include "qrm/convergence.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include "qrm/errors.hpp"
#include "qrm/rng.hpp"

namespace qrm::solver {

ExactSolution ExactSolution::sine_mode() {
    constexpr double pi = std::numbers::pi;
    return {"sine_mode", 1.0,
            [](double x, double t) { return std::exp(pi * pi * t) * std::sin(pi * x); }};
}

namespace {

template <class F>
double masked_sum(const Grid& g, double epsilon, F&& term) {
    const double t_max = g.horizon - epsilon + 1e-12 * g.horizon;
    double sum = 0.0;
    for (int i = 0; i <= g.nx; ++i) {
        for (int j = 0; j <= g.nt && g.t(j) <= t_max; ++j) sum += g.area_weight(i, j) * term(i, j);
    }
    return sum;
}

BoundaryData exact_data(const ExactSolution& exact, const Grid& grid) {
    return BoundaryData::sample(
        grid, [&](double t) { return exact.v(0.0, t); }, [&](double t) { return exact.v(1.0, t); },
        [&](double x) { return exact.v(x, 0.0); });
}

}  // namespace

double l2_error(const GridFunction& u, const ExactSolution& exact, double epsilon) {
    const Grid& g = u.grid();
    return std::sqrt(masked_sum(g, epsilon, [&](int i, int j) {
        const double d = u(i, j) - exact.v(g.x(i), g.t(j));
        return d * d;
    }));
}

double l2_norm(const ExactSolution& exact, const Grid& grid, double epsilon) {
    return std::sqrt(masked_sum(grid, epsilon, [&](int i, int j) {
        const double v = exact.v(grid.x(i), grid.t(j));
        return v * v;
    }));
}

ManufacturedResult manufactured_recovery(const ExactSolution& exact, const Grid& grid,
                                         const SolverOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    ManufacturedResult out;
    out.solution =
        minimize(CoefficientField::constant(grid, exact.b), exact_data(exact, grid), options);
    out.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.relative_error = l2_error(out.solution.u, exact) / l2_norm(exact, grid);
    const double t_mid = 0.5 * grid.horizon;
    out.est_mid = out.solution.u.interpolate(0.5, t_mid);
    out.exact_mid = exact.v(0.5, t_mid);
    out.est_end = out.solution.u.interpolate(0.5, grid.horizon);
    out.exact_end = exact.v(0.5, grid.horizon);
    return out;
}

std::vector<ConvergenceRow> convergence_experiment(const ExactSolution& exact,
                                                   const std::vector<double>& noise_levels,
                                                   const Grid& grid,
                                                   const ConvergenceOptions& options) {
    if (!(options.epsilon_fraction > 0.0 && options.epsilon_fraction < 1.0)) {
        throw DomainError("convergence_experiment: epsilon fraction must lie in (0, 1)");
    }
    const double epsilon = options.epsilon_fraction * grid.horizon;
    const CoefficientField coeff = CoefficientField::constant(grid, exact.b);
    const BoundaryData clean = exact_data(exact, grid);
    const double norm = l2_norm(exact, grid, epsilon);

    std::vector<ConvergenceRow> rows;
    for (std::size_t k = 0; k < noise_levels.size(); ++k) {
        const double nu = noise_levels[k];
        if (!(nu >= 0.0 && nu < 1.0)) {
            throw DomainError("convergence_experiment: noise levels must lie in [0, 1)");
        }
        BoundaryData noisy = clean;
        Rng rng(derive_seed(options.seed, "boundary-noise"));
        for (int j = 1; j <= grid.nt; ++j) {
            noisy.left[j] += rng.uniform(-nu, nu);
            noisy.right[j] += rng.uniform(-nu, nu);
        }
        SolverOptions so;
        so.beta = nu > 0.0 ? nu * nu : options.noiseless_beta;
        so.tol = options.tol;
        so.max_iter = options.max_iter;
        so.record_history = false;
        const RegularizedSolution sol = minimize(coeff, noisy, so);

        ConvergenceRow row;
        row.nu = nu;
        row.beta = so.beta;
        row.error = l2_error(sol.u, exact, epsilon);
        row.relative_error = row.error / norm;
        row.cg_iterations = sol.cg_iterations;
        row.hit_max_iterations = sol.hit_max_iterations;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace qrm::solver
