#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <string>

#include "twomode/amplitudes.hpp"
#include "twomode/banded.hpp"
#include "twomode/grid.hpp"
#include "twomode/spin_basis.hpp"

namespace twomode {

// The two orthonormal mode functions with their time derivatives. Spatial
// derivatives are recomputed where needed; mode indices are 0-based in code,
// 1-based in the coefficient formulas.
struct ModePair {
    std::array<Field, 2> phi;
    std::array<Field, 2> dt_phi;
    double time = 0.0;

    static ModePair from(Field phi1, Field phi2, double t = 0.0) {
        ModePair m;
        m.phi = {std::move(phi1), std::move(phi2)};
        m.dt_phi = {Field::Zero(m.phi[0].size()), Field::Zero(m.phi[1].size())};
        m.time = t;
        return m;
    }

    Eigen::Matrix2cd gram(const Grid& grid) const {
        Eigen::Matrix2cd g;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) g(i, j) = grid.inner(phi[i], phi[j]);
        return g;
    }

    double orthonormality_defect(const Grid& grid) const {
        return (gram(grid) - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff();
    }
};

// W~_ij = (1/2) sum_mu d_mu phi_i^* d_mu phi_j + phi_i^* V phi_j, pointwise.
inline Field kernel_w(const Grid& grid, const ModePair& modes, const RealField& v, int i, int j,
                      DerivScheme scheme = DerivScheme::centered) {
    if (v.size() != grid.size()) throw ShapeError("potential field does not match grid");
    Field out = modes.phi[i].conjugate().cwiseProduct(v.cast<Complex>().cwiseProduct(modes.phi[j]));
    for (int axis = 0; axis < 3; ++axis) {
        if (grid.axis_points(axis) == 1) continue;
        const Field di = grid.derivative(modes.phi[i], axis, scheme);
        const Field dj = grid.derivative(modes.phi[j], axis, scheme);
        out += 0.5 * di.conjugate().cwiseProduct(dj);
    }
    return out;
}

// V~_ijmn = (g/2) phi_i^* phi_j^* phi_m phi_n, pointwise.
inline Field kernel_v(const ModePair& modes, double g, int i, int j, int m, int n) {
    return 0.5 * g *
           modes.phi[i].conjugate().cwiseProduct(modes.phi[j].conjugate())
               .cwiseProduct(modes.phi[m])
               .cwiseProduct(modes.phi[n]);
}

// T~_ij = (1/2i)(dt phi_i^* phi_j - phi_i^* dt phi_j), pointwise.
inline Field kernel_t(const ModePair& modes, int i, int j) {
    return (modes.dt_phi[i].conjugate().cwiseProduct(modes.phi[j]) -
            modes.phi[i].conjugate().cwiseProduct(modes.dt_phi[j])) /
           (2.0 * kImag);
}

using QuarticMoments = std::array<std::array<std::array<std::array<Complex, 2>, 2>, 2>, 2>;

// Space integrals of the three kernels; everything the banded matrices need.
struct KernelMoments {
    Eigen::Matrix2cd w = Eigen::Matrix2cd::Zero();
    Eigen::Matrix2cd t = Eigen::Matrix2cd::Zero();
    QuarticMoments v{};
};

inline Eigen::Matrix2cd hamiltonian_moments(const Grid& grid, const ModePair& modes,
                                            const RealField& v_field, DerivScheme scheme) {
    Eigen::Matrix2cd w = Eigen::Matrix2cd::Zero();
    std::array<std::array<Field, 3>, 2> d;
    for (int i = 0; i < 2; ++i)
        for (int axis = 0; axis < 3; ++axis)
            if (grid.axis_points(axis) > 1) d[i][axis] = grid.derivative(modes.phi[i], axis, scheme);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Complex acc = grid.inner(modes.phi[i], v_field.cast<Complex>().cwiseProduct(modes.phi[j]));
            for (int axis = 0; axis < 3; ++axis)
                if (grid.axis_points(axis) > 1) acc += 0.5 * grid.inner(d[i][axis], d[j][axis]);
            if (!std::isfinite(std::abs(acc)))
                throw NumericalError("non-finite kernel moment at W(" + std::to_string(i + 1) +
                                     "," + std::to_string(j + 1) + ")");
            w(i, j) = acc;
        }
    return w;
}

inline QuarticMoments quartic_moments(const Grid& grid, const ModePair& modes, double g) {
    QuarticMoments v{};
    std::array<std::array<Field, 2>, 2> prod;
    for (int m = 0; m < 2; ++m)
        for (int n = 0; n < 2; ++n) prod[m][n] = modes.phi[m].cwiseProduct(modes.phi[n]);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int m = 0; m < 2; ++m)
                for (int n = 0; n < 2; ++n) {
                    v[i][j][m][n] = 0.5 * g * grid.inner(prod[i][j], prod[m][n]);
                    if (!std::isfinite(std::abs(v[i][j][m][n])))
                        throw NumericalError("non-finite kernel moment at V(" +
                                             std::to_string(i + 1) + std::to_string(j + 1) +
                                             std::to_string(m + 1) + std::to_string(n + 1) + ")");
                }
    return v;
}

inline Eigen::Matrix2cd rotation_moments(const Grid& grid, const ModePair& modes) {
    Eigen::Matrix2cd t;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            t(i, j) = grid.integrate(kernel_t(modes, i, j));
            if (!std::isfinite(std::abs(t(i, j))))
                throw NumericalError("non-finite kernel moment at T(" + std::to_string(i + 1) +
                                     "," + std::to_string(j + 1) + ")");
        }
    return t;
}

inline KernelMoments kernel_moments(const Grid& grid, const ModePair& modes,
                                    const RealField& v_field, double g, DerivScheme scheme) {
    KernelMoments mom;
    mom.w = hamiltonian_moments(grid, modes, v_field, scheme);
    mom.t = rotation_moments(grid, modes);
    mom.v = quartic_moments(grid, modes, g);
    return mom;
}

// H_kl = sum_ij X^ij_kl Int W~_ij + sum_ijmn Y^ijmn_kl Int V~_ijmn, band 2.
inline BandedMatrix assemble_hamiltonian(const Eigen::Matrix2cd& w_mom, const QuarticMoments& v_mom,
                                         const FragBasis& basis) {
    BandedMatrix h(basis.dim(), std::min(2, basis.dim() - 1));
    for (int r = 0; r < basis.dim(); ++r) {
        for (int c = std::max(0, r - h.bandwidth()); c <= std::min(basis.dim() - 1, r + h.bandwidth()); ++c) {
            const int k = basis.k_of_index(r);
            const int l = basis.k_of_index(c);
            Complex acc = 0.0;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    const double x = x_coeff(i + 1, j + 1, k, l, basis.n);
                    if (x != 0.0) acc += x * w_mom(i, j);
                    for (int m = 0; m < 2; ++m)
                        for (int n = 0; n < 2; ++n) {
                            const double y = y_coeff(i + 1, j + 1, m + 1, n + 1, k, l, basis.n);
                            if (y != 0.0) acc += y * v_mom[i][j][m][n];
                        }
                }
            h.at(r, c) = acc;
        }
    }
    return h;
}

inline BandedMatrix assemble_hamiltonian(const KernelMoments& mom, const FragBasis& basis) {
    return assemble_hamiltonian(mom.w, mom.v, basis);
}

// U_kl = sum_ij X^ij_kl Int T~_ij, band 1.
inline BandedMatrix assemble_rotation(const Eigen::Matrix2cd& t_mom, const FragBasis& basis) {
    BandedMatrix u(basis.dim(), std::min(1, basis.dim() - 1));
    for (int r = 0; r < basis.dim(); ++r) {
        for (int c = std::max(0, r - u.bandwidth()); c <= std::min(basis.dim() - 1, r + u.bandwidth()); ++c) {
            const int k = basis.k_of_index(r);
            const int l = basis.k_of_index(c);
            Complex acc = 0.0;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    const double x = x_coeff(i + 1, j + 1, k, l, basis.n);
                    if (x != 0.0) acc += x * t_mom(i, j);
                }
            u.at(r, c) = acc;
        }
    }
    return u;
}

inline BandedMatrix assemble_rotation(const KernelMoments& mom, const FragBasis& basis) {
    return assemble_rotation(mom.t, basis);
}

inline MatrixPair assemble_matrices(const Grid& grid, const ModePair& modes,
                                    const RealField& v_field, double g, const FragBasis& basis,
                                    DerivScheme scheme = DerivScheme::centered) {
    const KernelMoments mom = kernel_moments(grid, modes, v_field, g, scheme);
    return {assemble_hamiltonian(mom, basis), assemble_rotation(mom, basis)};
}

}  // namespace twomode
