#pragma once

// Cell-centered rectangular grid on (0,lx) x (0,ly) with homogeneous Neumann
// difference operators.  Ghost cells mirror the adjacent interior cell, which
// makes the 5-point Laplacian symmetric and conservative: its integral over
// the domain telescopes to the (zero-flux) boundary faces.

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "chemolab/errors.hpp"

namespace chemolab {

/// Uniform cell-centered grid. `area` plays |Omega|, `diam` the domain diameter.
struct Grid {
    int nx = 0, ny = 0;
    double lx = 0.0, ly = 0.0;
    double hx = 0.0, hy = 0.0;
    double area = 0.0;
    double diam = 0.0;

    Grid() = default;

    Grid(int nx_, int ny_, double lx_, double ly_)
        : nx(nx_), ny(ny_), lx(lx_), ly(ly_) {
        if (nx < 4 || ny < 4)
            throw InvalidInput("Grid: nx and ny must both be >= 4");
        if (!(lx > 0.0) || !(ly > 0.0))
            throw InvalidInput("Grid: side lengths must be positive");
        hx = lx / nx;
        hy = ly / ny;
        area = lx * ly;
        diam = std::sqrt(lx * lx + ly * ly);
    }

    std::size_t cell_count() const { return static_cast<std::size_t>(nx) * ny; }

    /// Row-major by y then x.
    std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(j) * nx + i;
    }

    double x_center(int i) const { return (i + 0.5) * hx; }
    double y_center(int j) const { return (j + 0.5) * hy; }

    bool same_layout(const Grid& o) const {
        return nx == o.nx && ny == o.ny && lx == o.lx && ly == o.ly;
    }
};

/// Scalar data at cell centers. Value semantics: operations return new fields.
struct ScalarField {
    Grid grid;
    std::vector<double> values;

    ScalarField() = default;

    explicit ScalarField(const Grid& g, double fill = 0.0)
        : grid(g), values(g.cell_count(), fill) {}

    ScalarField(const Grid& g, std::vector<double> data)
        : grid(g), values(std::move(data)) {
        if (values.size() != g.cell_count())
            throw InvalidInput("ScalarField: data length must equal nx*ny");
    }

    double& at(int i, int j) { return values[grid.idx(i, j)]; }
    double at(int i, int j) const { return values[grid.idx(i, j)]; }

    /// Fill from a function of the cell-center coordinates.
    template <class F>
    void assign(F&& f) {
        for (int j = 0; j < grid.ny; ++j)
            for (int i = 0; i < grid.nx; ++i)
                values[grid.idx(i, j)] = f(grid.x_center(i), grid.y_center(j));
    }

    double min() const {
        double m = values[0];
        for (double v : values) m = std::min(m, v);
        return m;
    }
    double max() const {
        double m = values[0];
        for (double v : values) m = std::max(m, v);
        return m;
    }
    double max_abs() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::fabs(v));
        return m;
    }

    bool all_finite() const {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }

    void require_finite(const char* who) const {
        if (!all_finite())
            throw InvalidInput(std::string(who) + ": field contains NaN or Inf");
    }
};

/// Face-normal data: x-faces are (nx+1) x ny, y-faces nx x (ny+1).
/// Boundary faces carry zero normal velocity / flux.
struct FaceField {
    Grid grid;
    std::vector<double> xface;  // index j*(nx+1) + i, i in [0,nx]
    std::vector<double> yface;  // index j*nx + i,     j in [0,ny]

    FaceField() = default;

    explicit FaceField(const Grid& g)
        : grid(g),
          xface(static_cast<std::size_t>(g.nx + 1) * g.ny, 0.0),
          yface(static_cast<std::size_t>(g.nx) * (g.ny + 1), 0.0) {}

    double& fx(int i, int j) { return xface[static_cast<std::size_t>(j) * (grid.nx + 1) + i]; }
    double fx(int i, int j) const { return xface[static_cast<std::size_t>(j) * (grid.nx + 1) + i]; }
    double& fy(int i, int j) { return yface[static_cast<std::size_t>(j) * grid.nx + i]; }
    double fy(int i, int j) const { return yface[static_cast<std::size_t>(j) * grid.nx + i]; }

    double max_abs() const {
        double m = 0.0;
        for (double v : xface) m = std::max(m, std::fabs(v));
        for (double v : yface) m = std::max(m, std::fabs(v));
        return m;
    }
};

/// Midpoint quadrature: hx*hy * sum of cell values, compensated so that
/// round-off stays far below the discrete-conservation checks.
inline double integrate(const ScalarField& f) {
    long double sum = 0.0L, comp = 0.0L;
    for (double v : f.values) {
        long double y = static_cast<long double>(v) - comp;
        long double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return static_cast<double>(static_cast<long double>(f.grid.hx) * f.grid.hy * sum);
}

/// Integral of g(value) over the domain (same quadrature).
template <class F>
inline double integrate_map(const ScalarField& f, F&& g) {
    long double sum = 0.0L, comp = 0.0L;
    for (double v : f.values) {
        long double y = static_cast<long double>(g(v)) - comp;
        long double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return static_cast<double>(static_cast<long double>(f.grid.hx) * f.grid.hy * sum);
}

/// 5-point Laplacian with ghost-cell reflection (homogeneous Neumann).
/// Mirrored ghosts drop out of the difference, so boundary arms contribute 0.
inline ScalarField laplacian_neumann(const ScalarField& f) {
    const Grid& g = f.grid;
    ScalarField out(g);
    const double ax = 1.0 / (g.hx * g.hx);
    const double ay = 1.0 / (g.hy * g.hy);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double c = f.at(i, j);
            double acc = 0.0;
            if (i > 0) acc += ax * (f.at(i - 1, j) - c);
            if (i < g.nx - 1) acc += ax * (f.at(i + 1, j) - c);
            if (j > 0) acc += ay * (f.at(i, j - 1) - c);
            if (j < g.ny - 1) acc += ay * (f.at(i, j + 1) - c);
            out.at(i, j) = acc;
        }
    }
    return out;
}

/// Centered gradient at cell centers. At boundary cells the normal component
/// is the reflected stencil, which vanishes identically (Neumann data).
inline std::pair<ScalarField, ScalarField> gradient_centered(const ScalarField& f) {
    const Grid& g = f.grid;
    ScalarField gx(g), gy(g);
    const double bx = 1.0 / (2.0 * g.hx);
    const double by = 1.0 / (2.0 * g.hy);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            gx.at(i, j) = (i > 0 && i < g.nx - 1)
                              ? bx * (f.at(i + 1, j) - f.at(i - 1, j))
                              : 0.0;
            gy.at(i, j) = (j > 0 && j < g.ny - 1)
                              ? by * (f.at(i, j + 1) - f.at(i, j - 1))
                              : 0.0;
        }
    }
    return {std::move(gx), std::move(gy)};
}

}  // namespace chemolab
