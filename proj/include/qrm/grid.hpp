#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace qrm::solver {

/// Uniform rectangular grid on [0,1] x [0,T]: x_i = i hx (i = 0..nx),
/// t_j = j ht (j = 0..nt).
struct Grid {
    int nx = 32;
    int nt = 16;
    double horizon = 0.0;

    /// Throws DomainError unless nx, nt >= 4 and horizon > 0.
    static Grid make(int nx, int nt, double horizon);

    double hx() const { return 1.0 / nx; }
    double ht() const { return horizon / nt; }
    double x(int i) const { return i * hx(); }
    double t(int j) const { return j * ht(); }
    std::size_t node_count() const { return static_cast<std::size_t>(nx + 1) * (nt + 1); }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * (nt + 1) + static_cast<std::size_t>(j);
    }

    /// Composite trapezoid weight of node (i, j).
    double area_weight(int i, int j) const;

    bool operator==(const Grid&) const = default;
};

/// Node values of a function on a Grid, stored x-major.
class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(const Grid& grid, double fill = 0.0);
    GridFunction(const Grid& grid, std::vector<double> values);

    static GridFunction sample(const Grid& grid, const std::function<double(double, double)>& f);

    const Grid& grid() const { return grid_; }
    double& operator()(int i, int j) { return values_[grid_.index(i, j)]; }
    double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    /// Bilinear interpolation at (x, t) inside the grid rectangle.
    double interpolate(double x, double t) const;

private:
    Grid grid_;
    std::vector<double> values_;
};

/// Samples of the u_xx coefficient b(x, t); every node must satisfy b >= b0 > 0.
class CoefficientField {
public:
    /// Throws DomainError when a sample is non-positive or not finite.
    explicit CoefficientField(GridFunction samples);

    static CoefficientField constant(const Grid& grid, double b);
    static CoefficientField sample(const Grid& grid, const std::function<double(double, double)>& f);

    const Grid& grid() const { return b_.grid(); }
    double operator()(int i, int j) const { return b_(i, j); }
    double lower_bound() const { return b0_; }
    const GridFunction& samples() const { return b_; }

private:
    GridFunction b_;
    double b0_ = 0.0;
};

/// Dirichlet data on x = 0 and x = 1 (indexed by time node) and the
/// initial profile at t = 0 (indexed by x node). The t = 0 corners take
/// their values from the initial profile.
struct BoundaryData {
    std::vector<double> left;  ///< psi0(t_j), j = 0..nt
    std::vector<double> right;  ///< psi1(t_j), j = 0..nt
    std::vector<double> initial;  ///< z(x_i), i = 0..nx

    static BoundaryData sample(const Grid& grid, const std::function<double(double)>& left,
                               const std::function<double(double)>& right,
                               const std::function<double(double)>& initial);
};

}  // namespace qrm::solver
