#include "qrm/solver.hpp"

#include <array>
#include <cmath>
#include <string>

#include <Eigen/SparseCore>

#include "qrm/errors.hpp"

namespace qrm::solver {

namespace {

template <class F>
double first_diff(F&& f, int k, int n, double h) {
    if (k == 0) return (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h);
    if (k == n) return (3.0 * f(n) - 4.0 * f(n - 1) + f(n - 2)) / (2.0 * h);
    return (f(k + 1) - f(k - 1)) / (2.0 * h);
}

template <class F>
double second_diff(F&& f, int k, int n, double h) {
    const int c = std::clamp(k, 1, n - 1);
    return (f(c - 1) - 2.0 * f(c) + f(c + 1)) / (h * h);
}

double time_diff(const GridFunction& u, int i, int j) {
    const int nt = u.grid().nt;
    const int j0 = j < nt ? j : nt - 1;
    return (u(i, j0 + 1) - u(i, j0)) / u.grid().ht();
}

// Stencil tables for the assembled operator: (offset, weight) lists.
struct Stencil {
    int size = 0;
    std::array<std::pair<int, double>, 3> terms{};
};

Stencil first_stencil(int k, int n, double h) {
    const double s = 1.0 / (2.0 * h);
    if (k == 0) return {3, {{{0, -3.0 * s}, {1, 4.0 * s}, {2, -s}}}};
    if (k == n) return {3, {{{n, 3.0 * s}, {n - 1, -4.0 * s}, {n - 2, s}}}};
    return {2, {{{k - 1, -s}, {k + 1, s}}}};
}

Stencil second_stencil(int k, int n, double h) {
    const int c = std::clamp(k, 1, n - 1);
    const double s = 1.0 / (h * h);
    return {3, {{{c - 1, s}, {c, -2.0 * s}, {c + 1, s}}}};
}

Stencil identity_stencil(int k) { return {1, {{{k, 1.0}}}}; }

}  // namespace

GridFunction residual_operator(const GridFunction& u, const CoefficientField& coeff) {
    const Grid& g = u.grid();
    if (!(g == coeff.grid())) throw DomainError("residual_operator: grid mismatch");
    GridFunction r(g);
    for (int i = 1; i < g.nx; ++i) {
        for (int j = 0; j <= g.nt; ++j) {
            const double uxx = (u(i - 1, j) - 2.0 * u(i, j) + u(i + 1, j)) / (g.hx() * g.hx());
            r(i, j) = time_diff(u, i, j) + coeff(i, j) * uxx;
        }
    }
    return r;
}

double residual_norm_squared(const GridFunction& u, const CoefficientField& coeff) {
    const Grid& g = u.grid();
    const GridFunction r = residual_operator(u, coeff);
    double sum = 0.0;
    for (int i = 1; i < g.nx; ++i) {
        for (int j = 0; j <= g.nt; ++j) {
            const double wt = (j == 0 || j == g.nt) ? 0.5 * g.ht() : g.ht();
            sum += g.hx() * wt * r(i, j) * r(i, j);
        }
    }
    return sum;
}

double h2_norm_squared(const GridFunction& u) {
    const Grid& g = u.grid();
    const int nx = g.nx;
    const int nt = g.nt;
    const double hx = g.hx();
    const double ht = g.ht();

    // u_t everywhere, reused for the mixed derivative.
    GridFunction ut(g);
    for (int i = 0; i <= nx; ++i) {
        for (int j = 0; j <= nt; ++j) {
            ut(i, j) = first_diff([&](int k) { return u(i, k); }, j, nt, ht);
        }
    }

    double sum = 0.0;
    for (int i = 0; i <= nx; ++i) {
        for (int j = 0; j <= nt; ++j) {
            const auto along_x = [&](int k) { return u(k, j); };
            const auto along_t = [&](int k) { return u(i, k); };
            const double ux = first_diff(along_x, i, nx, hx);
            const double uxx = second_diff(along_x, i, nx, hx);
            const double utt = second_diff(along_t, j, nt, ht);
            const double uxt = first_diff([&](int k) { return ut(k, j); }, i, nx, hx);
            const double v = u(i, j);
            const double t1 = ut(i, j);
            sum += g.area_weight(i, j) *
                   (v * v + ux * ux + t1 * t1 + uxx * uxx + uxt * uxt + utt * utt);
        }
    }
    return sum;
}

double functional_value(const GridFunction& u, const CoefficientField& coeff, double beta) {
    return residual_norm_squared(u, coeff) + beta * h2_norm_squared(u);
}

QrmOperator::QrmOperator(const CoefficientField& coeff, double beta) : grid_(coeff.grid()) {
    if (!(beta > 0.0)) throw DomainError("QrmOperator: beta must be positive");
    const Grid& g = grid_;
    const int nx = g.nx;
    const int nt = g.nt;
    const double hx = g.hx();
    const double ht = g.ht();

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(g.node_count() * 40);
    Eigen::Index row = 0;
    auto col = [&](int i, int j) { return static_cast<Eigen::Index>(g.index(i, j)); };

    for (int i = 1; i < nx; ++i) {
        for (int j = 0; j <= nt; ++j) {
            const double wt = (j == 0 || j == nt) ? 0.5 * ht : ht;
            const double s = std::sqrt(hx * wt);
            const int j0 = j < nt ? j : nt - 1;
            triplets.emplace_back(row, col(i, j0 + 1), s / ht);
            triplets.emplace_back(row, col(i, j0), -s / ht);
            const double bx = coeff(i, j) / (hx * hx);
            triplets.emplace_back(row, col(i - 1, j), s * bx);
            triplets.emplace_back(row, col(i, j), -2.0 * s * bx);
            triplets.emplace_back(row, col(i + 1, j), s * bx);
            ++row;
        }
    }
    residual_rows_ = row;

    // Each penalty term is a tensor product of an x stencil and a t stencil.
    using StencilFn = Stencil (*)(int, int, double);
    const StencilFn ident = [](int k, int, double) { return identity_stencil(k); };
    const std::array<std::pair<StencilFn, StencilFn>, 6> terms{{
        {ident, ident},
        {first_stencil, ident},
        {ident, first_stencil},
        {second_stencil, ident},
        {first_stencil, first_stencil},
        {ident, second_stencil},
    }};
    for (const auto& [x_stencil, t_stencil] : terms) {
        for (int i = 0; i <= nx; ++i) {
            const Stencil sx = x_stencil(i, nx, hx);
            for (int j = 0; j <= nt; ++j) {
                const Stencil st = t_stencil(j, nt, ht);
                const double s = std::sqrt(beta * g.area_weight(i, j));
                for (int a = 0; a < sx.size; ++a) {
                    for (int b = 0; b < st.size; ++b) {
                        triplets.emplace_back(row, col(sx.terms[a].first, st.terms[b].first),
                                              s * sx.terms[a].second * st.terms[b].second);
                    }
                }
                ++row;
            }
        }
    }

    a_.resize(row, static_cast<Eigen::Index>(g.node_count()));
    a_.setFromTriplets(triplets.begin(), triplets.end());
}

namespace {

Eigen::Map<const Eigen::VectorXd> as_vector(const GridFunction& u) {
    const auto v = u.values();
    return {v.data(), static_cast<Eigen::Index>(v.size())};
}

}  // namespace

double QrmOperator::value(const GridFunction& u) const { return (a_ * as_vector(u)).squaredNorm(); }

GridFunction QrmOperator::gradient(const GridFunction& u) const {
    const Eigen::VectorXd g = 2.0 * (a_.transpose() * (a_ * as_vector(u)));
    return GridFunction(grid_, std::vector<double>(g.data(), g.data() + g.size()));
}

double QrmOperator::residual_norm(const GridFunction& u) const {
    return (a_.topRows(residual_rows_) * as_vector(u)).norm();
}

GridFunction feasible_lift(const BoundaryData& data, const Grid& grid) {
    const auto nt1 = static_cast<std::size_t>(grid.nt + 1);
    const auto nx1 = static_cast<std::size_t>(grid.nx + 1);
    if (data.left.size() != nt1 || data.right.size() != nt1 || data.initial.size() != nx1) {
        throw DomainError("feasible_lift: boundary data does not match the grid");
    }
    GridFunction f(grid);
    const double z0 = data.initial.front();
    const double z1 = data.initial.back();
    for (int i = 0; i <= grid.nx; ++i) {
        const double x = grid.x(i);
        const double bump = data.initial[i] - ((1.0 - x) * z0 + x * z1);
        for (int j = 0; j <= grid.nt; ++j) {
            f(i, j) = (1.0 - x) * data.left[j] + x * data.right[j] + bump;
        }
    }
    // Constraint lines exactly as given.
    for (int j = 1; j <= grid.nt; ++j) {
        f(0, j) = data.left[j];
        f(grid.nx, j) = data.right[j];
    }
    for (int i = 0; i <= grid.nx; ++i) f(i, 0) = data.initial[i];
    return f;
}

BoundaryData boundary_data(const prep::DimensionlessProblem& problem, const Grid& grid) {
    return BoundaryData::sample(
        grid, [&](double t) { return problem.ub(t); }, [&](double t) { return problem.ua(t); },
        [&](double x) { return problem.g(x); });
}

GridFunction feasible_lift(const prep::DimensionlessProblem& problem, const Grid& grid) {
    return feasible_lift(boundary_data(problem, grid), grid);
}

CoefficientField coefficient_field(const prep::DimensionlessProblem& problem, const Grid& grid) {
    return CoefficientField::sample(grid, [&](double x, double t) {
        const double s = problem.sigma(t);
        return s * s * problem.a(x);
    });
}

RegularizedSolution minimize(const CoefficientField& coeff, const BoundaryData& data,
                             const SolverOptions& options) {
    if (!(options.beta > 0.0 && options.beta < 1.0)) {
        throw DomainError("minimize: beta must lie in (0, 1)");
    }
    if (options.max_iter < 0) throw DomainError("minimize: max_iter must be >= 0");
    const Grid& g = coeff.grid();
    const GridFunction lift = feasible_lift(data, g);
    for (double v : lift.values()) {
        if (!std::isfinite(v)) throw NonFiniteValue("minimize: non-finite boundary data");
    }

    const QrmOperator op(coeff, options.beta);

    // Columns of the free nodes: interior x, t > 0.
    const Eigen::Index n_free = static_cast<Eigen::Index>(g.nx - 1) * g.nt;
    Eigen::SparseMatrix<double> select(static_cast<Eigen::Index>(g.node_count()), n_free);
    {
        std::vector<Eigen::Triplet<double>> t;
        t.reserve(static_cast<std::size_t>(n_free));
        Eigen::Index k = 0;
        for (int i = 1; i < g.nx; ++i) {
            for (int j = 1; j <= g.nt; ++j) t.emplace_back(g.index(i, j), k++, 1.0);
        }
        select.setFromTriplets(t.begin(), t.end());
    }
    const Eigen::SparseMatrix<double> a_free = op.matrix() * select;
    const Eigen::SparseMatrix<double> normal = a_free.transpose() * a_free;

    const Eigen::VectorXd a_lift = op.matrix() * as_vector(lift);
    const double j0 = a_lift.squaredNorm();
    const Eigen::VectorXd rhs = -(a_free.transpose() * a_lift);

    RegularizedSolution sol;
    sol.beta = options.beta;
    sol.j_lift = j0;
    if (options.record_history) sol.j_history.push_back(j0);

    // J(F + w) = J(F) - w . (rhs + r) with r = rhs - N w.
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n_free);
    Eigen::VectorXd r = rhs;
    Eigen::VectorXd p = r;
    Eigen::VectorXd q(n_free);
    double rr = r.squaredNorm();
    const double g0 = std::sqrt(rr);
    int it = 0;
    if (g0 > 0.0) {
        while (true) {
            if (std::sqrt(rr) <= options.tol * g0) break;
            if (it >= options.max_iter) {
                sol.hit_max_iterations = true;
                break;
            }
            q.noalias() = normal * p;
            const double pq = p.dot(q);
            if (!std::isfinite(pq)) throw NonFiniteValue("minimize: non-finite CG curvature");
            if (pq <= 0.0) break;  // direction of zero curvature: nothing left to reduce
            const double alpha = rr / pq;
            w.noalias() += alpha * p;
            r.noalias() -= alpha * q;
            const double rr_next = r.squaredNorm();
            if (!std::isfinite(rr_next)) throw NonFiniteValue("minimize: non-finite CG residual");
            ++it;
            if (options.record_history) sol.j_history.push_back(j0 - w.dot(rhs + r));
            p = r + (rr_next / rr) * p;
            rr = rr_next;
        }
    }

    GridFunction u = lift;
    {
        Eigen::Index k = 0;
        for (int i = 1; i < g.nx; ++i) {
            for (int j = 1; j <= g.nt; ++j) u(i, j) += w[k++];
        }
    }
    for (double v : u.values()) {
        if (!std::isfinite(v)) throw NonFiniteValue("minimize: non-finite solution");
    }
    sol.cg_iterations = it;
    sol.j_value = op.value(u);
    sol.residual_norm = op.residual_norm(u);
    sol.u = std::move(u);
    return sol;
}

RegularizedSolution minimize(const prep::DimensionlessProblem& problem, const Grid& grid,
                             const SolverOptions& options) {
    if (std::abs(grid.horizon - problem.horizon()) > 1e-12 * problem.horizon()) {
        throw DomainError("minimize: grid horizon must equal 2 tau");
    }
    RegularizedSolution sol =
        minimize(coefficient_field(problem, grid), boundary_data(problem, grid), options);
    std::tie(sol.est_tau, sol.est_2tau) = extract_estimates(sol, problem.tau);
    return sol;
}

std::pair<double, double> extract_estimates(const RegularizedSolution& sol, double tau) {
    return {sol.u.interpolate(0.5, tau), sol.u.interpolate(0.5, 2.0 * tau)};
}

}  // namespace qrm::solver
