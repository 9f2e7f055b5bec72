#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "twomode/amplitudes.hpp"
#include "twomode/constants.hpp"
#include "twomode/densities.hpp"
#include "twomode/grid.hpp"

namespace twomode {

// N_2 = N/2 + sum_k k |b_k|^2, the mean boson number in mode 2.
inline double n2(const AmplitudeVector& a) {
    const FragBasis basis(a.boson_count());
    double acc = 0.5 * a.boson_count();
    for (int idx = 0; idx < basis.dim(); ++idx)
        acc += basis.k_of_index(idx) * std::norm(a.b[idx]);
    return acc;
}

// First-order correlation function. The three-band amplitude sums collapse to
// a 2x2 Hermitian coefficient matrix A with G1(r,r') = sum_ij A_ij phi_i^*(r)
// phi_j(r'); tr A = N. The full grid-pair matrix is materialized on demand.
struct CorrelationField {
    Eigen::Matrix2cd coeff = Eigen::Matrix2cd::Zero();
    ModePair modes;
    double time = 0.0;
    bool orthonormality_warning = false;

    Complex value(const Grid& grid, Eigen::Index r, Eigen::Index rp) const {
        (void)grid;
        Complex acc = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                acc += coeff(i, j) * std::conj(modes.phi[i][r]) * modes.phi[j][rp];
        return acc;
    }

    Eigen::MatrixXcd full(const Grid& grid) const {
        const Eigen::Index n = grid.size();
        Eigen::MatrixXcd g1 = Eigen::MatrixXcd::Zero(n, n);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                g1 += coeff(i, j) * modes.phi[i].conjugate() * modes.phi[j].transpose();
        return g1;
    }

    RealField diagonal() const {
        Field acc = Field::Zero(modes.phi[0].size());
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                acc += coeff(i, j) * modes.phi[i].conjugate().cwiseProduct(modes.phi[j]);
        return acc.real();
    }

    double trace(const Grid& grid) const { return std::real(grid.integrate(diagonal())); }
};

inline CorrelationField g1(const Grid& grid, const AmplitudeVector& a, const ModePair& modes) {
    const FragBasis basis(a.boson_count());
    const double half = 0.5 * a.boson_count();
    CorrelationField out;
    out.modes = modes;
    out.time = a.time;
    for (int idx = 0; idx < basis.dim(); ++idx) {
        const int k = basis.k_of_index(idx);
        const double p = std::norm(a.b[idx]);
        out.coeff(0, 0) += p * (half - k);
        out.coeff(1, 1) += p * (half + k);
        if (idx + 1 < basis.dim())
            out.coeff(0, 1) += std::conj(a.b[idx]) * a.b[idx + 1] *
                               std::sqrt((half - k) * (half + k + 1));
        if (idx > 0)
            out.coeff(1, 0) += std::conj(a.b[idx]) * a.b[idx - 1] *
                               std::sqrt((half + k) * (half - k + 1));
    }
    out.orthonormality_warning = modes.orthonormality_defect(grid) > 1e-8;
    return out;
}

// n(r) = G1(r, r).
inline RealField density(const Grid& grid, const AmplitudeVector& a, const ModePair& modes) {
    return g1(grid, a, modes).diagonal();
}

// Two-mode validity bounds: N << a0/a_s and T << 0.94 N^(1/3) hbar w0 / kB.
struct ValidityReport {
    double boson_bound = std::numeric_limits<double>::infinity();
    bool boson_bound_unbounded = false;
    double temperature_bound_kelvin = 0.0;
    double boson_margin = std::numeric_limits<double>::infinity();       // bound / N
    double temperature_margin = std::numeric_limits<double>::infinity();  // bound / T
};

inline ValidityReport validity_check(int boson_count, double temperature_kelvin, double a0_m,
                                     double as_m, double omega0_rad_s) {
    ValidityReport rep;
    if (as_m > 0.0) {
        rep.boson_bound = a0_m / as_m;
        rep.boson_margin = rep.boson_bound / std::max(1, boson_count);
    } else {
        rep.boson_bound_unbounded = true;
    }
    rep.temperature_bound_kelvin =
        0.94 * std::cbrt(double(boson_count)) * si::hbar * omega0_rad_s / si::k_boltzmann;
    if (temperature_kelvin > 0.0)
        rep.temperature_margin = rep.temperature_bound_kelvin / temperature_kelvin;
    return rep;
}

}  // namespace twomode
