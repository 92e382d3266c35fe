#include "qrm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qrm/errors.hpp"

namespace qrm::solver {

Grid Grid::make(int nx, int nt, double horizon) {
    if (nx < 4 || nt < 4) throw DomainError("Grid: nx and nt must be >= 4");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("Grid: horizon must be > 0");
    return Grid{nx, nt, horizon};
}

double Grid::area_weight(int i, int j) const {
    const double wx = (i == 0 || i == nx) ? 0.5 * hx() : hx();
    const double wt = (j == 0 || j == nt) ? 0.5 * ht() : ht();
    return wx * wt;
}

GridFunction::GridFunction(const Grid& grid, double fill)
    : grid_(grid), values_(grid.node_count(), fill) {}

GridFunction::GridFunction(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.node_count()) {
        throw DomainError("GridFunction: value count does not match the grid");
    }
}

GridFunction GridFunction::sample(const Grid& grid,
                                  const std::function<double(double, double)>& f) {
    GridFunction out(grid);
    for (int i = 0; i <= grid.nx; ++i) {
        for (int j = 0; j <= grid.nt; ++j) out(i, j) = f(grid.x(i), grid.t(j));
    }
    return out;
}

double GridFunction::interpolate(double x, double t) const {
    const double fx = std::clamp(x / grid_.hx(), 0.0, static_cast<double>(grid_.nx));
    const double ft = std::clamp(t / grid_.ht(), 0.0, static_cast<double>(grid_.nt));
    // Snap to a node when within rounding distance so even grids read exactly.
    auto split = [](double f, int n) {
        const double r = std::round(f);
        if (std::abs(f - r) < 1e-9) f = r;
        int lo = std::min(static_cast<int>(std::floor(f)), n - 1);
        return std::pair{lo, f - lo};
    };
    const auto [i, wx] = split(fx, grid_.nx);
    const auto [j, wt] = split(ft, grid_.nt);
    const auto& u = *this;
    return (1 - wx) * (1 - wt) * u(i, j) + wx * (1 - wt) * u(i + 1, j) +
           (1 - wx) * wt * u(i, j + 1) + wx * wt * u(i + 1, j + 1);
}

CoefficientField::CoefficientField(GridFunction samples) : b_(std::move(samples)) {
    b0_ = std::numeric_limits<double>::infinity();
    for (double v : b_.values()) {
        if (!std::isfinite(v) || !(v > 0.0)) {
            throw DomainError("CoefficientField: coefficient must be positive and finite");
        }
        b0_ = std::min(b0_, v);
    }
}

CoefficientField CoefficientField::constant(const Grid& grid, double b) {
    return CoefficientField(GridFunction(grid, b));
}

CoefficientField CoefficientField::sample(const Grid& grid,
                                          const std::function<double(double, double)>& f) {
    return CoefficientField(GridFunction::sample(grid, f));
}

BoundaryData BoundaryData::sample(const Grid& grid, const std::function<double(double)>& left,
                                  const std::function<double(double)>& right,
                                  const std::function<double(double)>& initial) {
    BoundaryData d;
    for (int j = 0; j <= grid.nt; ++j) {
        d.left.push_back(left(grid.t(j)));
        d.right.push_back(right(grid.t(j)));
    }
    for (int i = 0; i <= grid.nx; ++i) d.initial.push_back(initial(grid.x(i)));
    return d;
}

}  // namespace qrm::solver
