#pragma once

#include <utility>
#include <vector>

#include <Eigen/SparseCore>

#include "qrm/grid.hpp"
#include "qrm/preprocess.hpp"

namespace qrm::solver {

/// Quasi-reversibility solver for u_t + b(x,t) u_xx = 0 posed forwards in
/// time on (0,1) x (0,T) with Dirichlet data on x = 0, x = 1 and t = 0.
///
/// The discrete Tikhonov functional is
///
///   J(u) = sum_{interior i, all j} w_ij (R_h u)_ij^2 + beta |u|^2_{H^2,h}
///
/// where R_h u = D_t^+ u + b D_xx u (forward difference in t, backward on the
/// last time row; central second difference in x), and the discrete H^2 norm
/// sums squared u, u_x, u_t, u_xx, u_xt, u_tt. First derivatives are central
/// inside and second-order one-sided at the edges; second derivatives reuse
/// the adjacent three-point stencil at the edges. All weights are composite
/// trapezoid weights.

/// Production defaults.
inline constexpr int kDefaultNx = 32;
inline constexpr int kDefaultNt = 16;
inline constexpr double kDefaultBeta = 0.01;
inline constexpr double kDefaultTol = 1e-8;
inline constexpr int kDefaultMaxIter = 5000;

/// R_h u at interior-x nodes for every time row; the x = 0 and x = 1
/// columns are left at zero.
GridFunction residual_operator(const GridFunction& u, const CoefficientField& coeff);

/// Squared discrete H^2 norm of u.
double h2_norm_squared(const GridFunction& u);

/// Weighted sum of (R_h u)^2.
double residual_norm_squared(const GridFunction& u, const CoefficientField& coeff);

/// J_beta(u) evaluated directly from the stencils (no constraint handling).
double functional_value(const GridFunction& u, const CoefficientField& coeff, double beta);

/// The functional as a weighted least-squares operator: J(u) = |A u|^2.
/// Rows [0, residual_rows) carry the PDE residual, the rest the penalty.
class QrmOperator {
public:
    using Matrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

    QrmOperator(const CoefficientField& coeff, double beta);

    const Grid& grid() const { return grid_; }
    const Matrix& matrix() const { return a_; }
    Eigen::Index residual_rows() const { return residual_rows_; }

    double value(const GridFunction& u) const;
    /// dJ/du at every node, ignoring constraints: 2 A^T A u.
    GridFunction gradient(const GridFunction& u) const;
    double residual_norm(const GridFunction& u) const;

private:
    Grid grid_;
    Matrix a_;
    Eigen::Index residual_rows_ = 0;
};

/// F(x,t) = (1 - x) psi0(t) + x psi1(t) + [z(x) - (1 - x) z(0) - x z(1)]:
/// matches every constraint at the grid nodes.
GridFunction feasible_lift(const BoundaryData& data, const Grid& grid);

/// F(x,t) = x (u_a(t) - u_b(t)) + u_b(t) sampled on a grid with horizon 2 tau.
GridFunction feasible_lift(const prep::DimensionlessProblem& problem, const Grid& grid);

BoundaryData boundary_data(const prep::DimensionlessProblem& problem, const Grid& grid);

/// b(x_i, t_j) = sigma(t_j)^2 A(x_i).
CoefficientField coefficient_field(const prep::DimensionlessProblem& problem, const Grid& grid);

struct SolverOptions {
    double beta = kDefaultBeta;
    double tol = kDefaultTol;  ///< on |gradient| / |initial gradient|
    int max_iter = kDefaultMaxIter;
    bool record_history = true;
};

struct RegularizedSolution {
    GridFunction u;
    double beta = 0.0;
    double j_value = 0.0;
    double j_lift = 0.0;  ///< J_beta of the starting point F
    double residual_norm = 0.0;  ///< discrete L2 norm of R_h u
    int cg_iterations = 0;
    bool hit_max_iterations = false;
    std::vector<double> j_history;  ///< J after each iteration, starting with J(F)
    double est_tau = 0.0;
    double est_2tau = 0.0;
};

/// Minimizes J_beta over u = F + w, w = 0 on x = 0, x = 1 and t = 0, by
/// conjugate gradient on the normal equations starting from w = 0.
/// Throws NonFiniteValue if the iteration produces NaN or Inf. Hitting
/// max_iter is not an error: the last (lowest-J) iterate is returned with
/// hit_max_iterations set.
RegularizedSolution minimize(const CoefficientField& coeff, const BoundaryData& data,
                             const SolverOptions& options);

/// Solves the option problem on `grid` (horizon must be 2 tau) and fills
/// est_tau / est_2tau.
RegularizedSolution minimize(const prep::DimensionlessProblem& problem, const Grid& grid,
                             const SolverOptions& options);

/// u at (1/2, tau) and (1/2, 2 tau), bilinear between nodes.
std::pair<double, double> extract_estimates(const RegularizedSolution& sol, double tau);

}  // namespace qrm::solver
