#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <functional>

#include "twomode/errors.hpp"

namespace twomode {

using Complex = std::complex<double>;
using Field = Eigen::VectorXcd;
using RealField = Eigen::VectorXd;

inline constexpr Complex kImag{0.0, 1.0};

enum class DerivScheme { forward, centered };

// Uniform cell-centered grid over up to three axes, hard walls outside.
// An axis with a single point is degenerate: it has been integrated out,
// carries quadrature weight 1 and contributes no derivatives. Lengths are
// in oscillator units a0 throughout.
struct Grid {
    int nx = 1, ny = 1, nz = 1;
    double dx = 1.0, dy = 1.0, dz = 1.0;
    double x_min = 0.0, y_min = 0.0, z_min = 0.0;

    static Grid line(int n, double extent) {
        if (n < 2 || extent <= 0.0) throw ShapeError("line grid needs n >= 2 and positive extent");
        Grid g;
        g.nz = n;
        g.dz = extent / n;
        g.z_min = -0.5 * extent;
        return g;
    }

    static Grid box(int nx, int ny, int nz, double ex, double ey, double ez) {
        Grid g;
        g.nx = nx; g.ny = ny; g.nz = nz;
        if (nx > 1) { g.dx = ex / nx; g.x_min = -0.5 * ex; }
        if (ny > 1) { g.dy = ey / ny; g.y_min = -0.5 * ey; }
        if (nz > 1) { g.dz = ez / nz; g.z_min = -0.5 * ez; }
        if (nx < 1 || ny < 1 || nz < 1) throw ShapeError("grid point counts must be positive");
        return g;
    }

    Eigen::Index size() const { return Eigen::Index(nx) * ny * nz; }
    bool is_1d() const { return nx == 1 && ny == 1; }

    double x(int i) const { return nx > 1 ? x_min + (i + 0.5) * dx : 0.0; }
    double y(int i) const { return ny > 1 ? y_min + (i + 0.5) * dy : 0.0; }
    double z(int i) const { return nz > 1 ? z_min + (i + 0.5) * dz : 0.0; }

    Eigen::Index index(int ix, int iy, int iz) const {
        return (Eigen::Index(ix) * ny + iy) * nz + iz;
    }

    // Quadrature weight of one cell (midpoint rule); degenerate axes weigh 1.
    double cell_weight() const {
        double w = 1.0;
        if (nx > 1) w *= dx;
        if (ny > 1) w *= dy;
        if (nz > 1) w *= dz;
        return w;
    }

    template <typename F>
    void for_each(F&& f) const {
        for (int ix = 0; ix < nx; ++ix)
            for (int iy = 0; iy < ny; ++iy)
                for (int iz = 0; iz < nz; ++iz)
                    f(index(ix, iy, iz), x(ix), y(iy), z(iz));
    }

    RealField sample_real(const std::function<double(double, double, double)>& f) const {
        RealField out(size());
        for_each([&](Eigen::Index i, double px, double py, double pz) { out[i] = f(px, py, pz); });
        return out;
    }

    Field sample(const std::function<Complex(double, double, double)>& f) const {
        Field out(size());
        for_each([&](Eigen::Index i, double px, double py, double pz) { out[i] = f(px, py, pz); });
        return out;
    }

    template <typename Derived>
    auto integrate(const Eigen::MatrixBase<Derived>& f) const {
        return f.sum() * cell_weight();
    }

    Complex inner(const Field& a, const Field& b) const {
        if (a.size() != size() || b.size() != size()) throw ShapeError("field size does not match grid");
        return a.dot(b) * cell_weight();
    }

    double norm(const Field& a) const { return std::sqrt(std::abs(inner(a, a))); }

    int axis_points(int axis) const { return axis == 0 ? nx : axis == 1 ? ny : nz; }
    double axis_spacing(int axis) const { return axis == 0 ? dx : axis == 1 ? dy : dz; }
    Eigen::Index axis_stride(int axis) const {
        return axis == 0 ? Eigen::Index(ny) * nz : axis == 1 ? Eigen::Index(nz) : 1;
    }

    // First derivative along one axis; zero field outside the walls.
    Field derivative(const Field& f, int axis, DerivScheme scheme) const {
        if (f.size() != size()) throw ShapeError("field size does not match grid");
        const int n = axis_points(axis);
        Field out = Field::Zero(size());
        if (n == 1) return out;
        const double d = axis_spacing(axis);
        const Eigen::Index stride = axis_stride(axis);
        for_each([&](Eigen::Index i, double, double, double) {
            const int pos = axis_coordinate(i, axis);
            const Complex plus = pos + 1 < n ? f[i + stride] : Complex(0.0);
            if (scheme == DerivScheme::forward) {
                out[i] = (plus - f[i]) / d;
            } else {
                const Complex minus = pos > 0 ? f[i - stride] : Complex(0.0);
                out[i] = (plus - minus) / (2.0 * d);
            }
        });
        return out;
    }

    // Dirichlet 3-point Laplacian summed over non-degenerate axes.
    Field laplacian(const Field& f) const {
        if (f.size() != size()) throw ShapeError("field size does not match grid");
        Field out = Field::Zero(size());
        for (int axis = 0; axis < 3; ++axis) {
            const int n = axis_points(axis);
            if (n == 1) continue;
            const double inv_d2 = 1.0 / (axis_spacing(axis) * axis_spacing(axis));
            const Eigen::Index stride = axis_stride(axis);
            for_each([&](Eigen::Index i, double, double, double) {
                const int pos = axis_coordinate(i, axis);
                const Complex plus = pos + 1 < n ? f[i + stride] : Complex(0.0);
                const Complex minus = pos > 0 ? f[i - stride] : Complex(0.0);
                out[i] += (plus + minus - 2.0 * f[i]) * inv_d2;
            });
        }
        return out;
    }

    // -(1/2) Laplacian, the kinetic operator in oscillator units.
    Field kinetic(const Field& f) const { return -0.5 * laplacian(f); }

  private:
    int axis_coordinate(Eigen::Index i, int axis) const {
        if (axis == 2) return int(i % nz);
        if (axis == 1) return int((i / nz) % ny);
        return int(i / (Eigen::Index(ny) * nz));
    }
};

}  // namespace twomode
