#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "twomode/errors.hpp"
#include "twomode/grid.hpp"

namespace twomode {

// Scalar ramp profile over [0, T].
struct Schedule {
    enum class Kind { constant, sinsq_bump, trapezoid };

    Kind kind = Kind::constant;
    double peak = 0.0;
    double ramp_fraction = 0.25;  // trapezoid only

    static Schedule constant(double value) { return {Kind::constant, value, 0.0}; }
    static Schedule sinsq(double peak) { return {Kind::sinsq_bump, peak, 0.0}; }
    static Schedule trapezoid(double peak, double ramp_fraction) {
        return {Kind::trapezoid, peak, ramp_fraction};
    }

    double value(double t, double total_time) const {
        switch (kind) {
            case Kind::constant:
                return peak;
            case Kind::sinsq_bump: {
                if (total_time <= 0.0) return 0.0;
                const double s = std::sin(std::numbers::pi * t / total_time);
                return peak * s * s;
            }
            case Kind::trapezoid: {
                if (total_time <= 0.0) return 0.0;
                const double tr = std::max(ramp_fraction * total_time, 1e-300);
                const double up = t / tr;
                const double down = (total_time - t) / tr;
                return peak * std::clamp(std::min(up, down), 0.0, 1.0);
            }
        }
        return 0.0;
    }

    double peak_value() const { return peak; }
};

// Time-dependent trapping potential in oscillator units (hbar = m = w0 = 1):
//   V = (1/2) w_perp^2 (x^2+y^2) + (1/2) z^2 + V_B(t) exp(-z^2 / 2 sigma^2) + eps(t) z
// The barrier splits the single well into a double well along z; the linear
// tilt models the asymmetry the interferometer is meant to detect. The
// half-separation profile describes the well spacing for the two-site
// estimates; it does not enter V itself.
struct TrapSpec {
    double omega_perp = 10.0;          // transverse frequency, units of w0
    double barrier_width = 1.0;        // sigma, units of a0
    Schedule barrier_height;           // V_B(t), units of hbar*w0
    Schedule tilt;                     // eps(t), units of hbar*w0 / a0
    Schedule half_separation;          // d(t), units of a0
    double total_time = 1.0;           // ramp period T, units of 1/w0

    double barrier_at(double t) const { return barrier_height.value(t, total_time); }
    double tilt_at(double t) const { return tilt.value(t, total_time); }
    double separation_at(double t) const { return half_separation.value(t, total_time); }

    double potential(double x, double y, double z, double t) const {
        const double vb = barrier_at(t);
        const double eps = tilt_at(t);
        double v = 0.5 * z * z + eps * z;
        if (vb != 0.0) {
            const double w = z / barrier_width;
            v += vb * std::exp(-0.5 * w * w);
        }
        v += 0.5 * omega_perp * omega_perp * (x * x + y * y);
        return v;
    }

    RealField potential_field(const Grid& grid, double t) const {
        return grid.sample_real([&](double x, double y, double z) { return potential(x, y, z, t); });
    }
};

inline double potential(const TrapSpec& spec, double x, double y, double z, double t) {
    return spec.potential(x, y, z, t);
}

// Two-site Bose-Hubbard parameters. `tunneling` evaluates the defining
// integral with the raw (non-orthogonal) localized Gaussians; the
// orthogonalized variant is the energy splitting of the symmetric /
// antisymmetric combinations. `ratio_estimate` is the closed-form
// (V_B / hbar w0)(a0 / a_s) exp(-d^2 / a0^2).
struct HubbardParams {
    double tunneling = 0.0;
    double tunneling_orthogonalized = 0.0;
    double interaction = 0.0;
    double ratio_estimate = 0.0;

    double ratio() const {
        if (interaction == 0.0) throw NumericalError("hubbard ratio undefined for U = 0");
        return tunneling / interaction;
    }
};

// Normalized oscillator ground-state Gaussians centered at -d and +d on the
// z axis (transverse factors are the degenerate axes' analytic ground states
// and have been integrated out).
inline std::pair<Field, Field> ho_localized_modes(const Grid& grid, double d) {
    if (d < 0.0) throw IndexError("half-separation must be non-negative");
    const double norm = std::pow(std::numbers::pi, -0.25);
    Field left = grid.sample([&](double, double, double z) {
        return Complex(norm * std::exp(-0.5 * (z + d) * (z + d)), 0.0);
    });
    Field right = grid.sample([&](double, double, double z) {
        return Complex(norm * std::exp(-0.5 * (z - d) * (z - d)), 0.0);
    });
    return {std::move(left), std::move(right)};
}

namespace detail {

// Single-particle energy <a|T + V|b> / with the Dirichlet kinetic stencil.
inline Complex single_particle_element(const Grid& grid, const RealField& v, const Field& a,
                                       const Field& b) {
    Field hb = grid.kinetic(b);
    hb.array() += v.array().cast<Complex>() * b.array();
    return grid.inner(a, hb);
}

}  // namespace detail

// Two-site estimates of section-2 style: J from the defining integral against
// the two displaced harmonic wells (1/2)(|z| - d)^2 that the Gaussian ansatz
// presumes, U from the 3D Gaussian quartic integral, and the closed-form
// ratio. a_s and V_B are in units of a0 and hbar*w0.
inline HubbardParams hubbard_estimate(const TrapSpec& spec, const Grid& grid, double d,
                                      double scattering_length) {
    if (scattering_length <= 0.0) throw IndexError("scattering length must be positive");
    const double z_max = grid.z_min + grid.nz * grid.dz;
    if (d + 3.0 > z_max || grid.dz > 0.25)
        throw ResolutionError("grid cannot resolve the localized modes");
    auto [left, right] = ho_localized_modes(grid, d);
    const double nl = std::abs(grid.inner(left, left));
    if (std::abs(nl - 1.0) > 1e-6)
        throw ResolutionError("localized mode leaks outside the grid");

    RealField v_two_well = grid.sample_real([&](double, double, double z) {
        const double u = std::abs(z) - d;
        return 0.5 * u * u;
    });

    HubbardParams out;
    const double hlr = std::real(detail::single_particle_element(grid, v_two_well, left, right));
    out.tunneling = -2.0 * hlr;

    // Symmetric/antisymmetric splitting with the overlap divided out.
    const double s = std::real(grid.inner(left, right));
    const double hll = std::real(detail::single_particle_element(grid, v_two_well, left, left));
    const double e_sym = (hll + hlr) / (1.0 + s);
    const double e_anti = (hll - hlr) / (1.0 - s);
    out.tunneling_orthogonalized = e_anti - e_sym;

    // U = g int |phi|^4 with g = 4 pi a_s (oscillator units); the transverse
    // quartic integral of the isotropic Gaussian contributes 1/(2 pi).
    const double quartic_z = std::real(grid.integrate(left.array().abs2().square().matrix()));
    out.interaction = 4.0 * std::numbers::pi * scattering_length * quartic_z / (2.0 * std::numbers::pi);

    out.ratio_estimate =
        spec.barrier_height.peak_value() / scattering_length * std::exp(-d * d);
    return out;
}

// Exact ground state of the two-site Bose-Hubbard Hamiltonian
//   H = -(J/2)(a_R^dag a_L + a_L^dag a_R) + (U/2) sum_s n_s(n_s - 1)
// on the fixed-N basis (mode 1 = left). Returns (energy, amplitudes) with the
// amplitude phase fixed so the largest entry is real positive.
inline std::pair<double, Eigen::VectorXcd> hubbard_ground_state(double j_tunnel, double u_int,
                                                                int boson_count) {
    if (boson_count <= 0 || boson_count % 2 != 0)
        throw IndexError("boson count must be even and positive");
    const int half = boson_count / 2;
    const int dim = boson_count + 1;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (int idx = 0; idx < dim; ++idx) {
        const double n_l = half - (idx - half);
        const double n_r = half + (idx - half);
        h(idx, idx) = 0.5 * u_int * (n_l * (n_l - 1.0) + n_r * (n_r - 1.0));
        if (idx + 1 < dim) {
            // a_R^dag a_L moves k -> k+1 with amplitude sqrt(n_L (n_R + 1)).
            const double amp = -0.5 * j_tunnel * std::sqrt(n_l * (n_r + 1.0));
            h(idx + 1, idx) = amp;
            h(idx, idx + 1) = amp;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success) throw NumericalError("hubbard diagonalization failed");
    Eigen::VectorXd ground = es.eigenvectors().col(0);
    int imax = 0;
    ground.cwiseAbs().maxCoeff(&imax);
    if (ground[imax] < 0.0) ground = -ground;
    return {es.eigenvalues()[0], ground.cast<Complex>()};
}

struct EigenModes {
    std::vector<double> energies;
    std::vector<Field> modes;
};

// Lowest eigenpairs of -(1/2) Lap + V(.,t) by dense finite-difference
// diagonalization. 1D grids use the tridiagonal fast path; small 3D grids
// fall back to the full dense operator.
inline EigenModes single_particle_modes(const TrapSpec& spec, const Grid& grid, double t,
                                        int count, Eigen::Index dense_cap = 4096) {
    if (count < 1) throw IndexError("need at least one eigenpair");
    const RealField v = spec.potential_field(grid, t);
    const double cell = grid.cell_weight();
    EigenModes out;

    Eigen::MatrixXd vectors;
    Eigen::VectorXd values;
    if (grid.is_1d()) {
        const int n = grid.nz;
        const double inv_d2 = 1.0 / (grid.dz * grid.dz);
        Eigen::VectorXd diag(n), sub(n - 1);
        for (int i = 0; i < n; ++i) diag[i] = inv_d2 + v[i];
        sub.setConstant(-0.5 * inv_d2);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(diag, sub);
        if (es.info() != Eigen::Success) throw NumericalError("eigensolve did not converge");
        values = es.eigenvalues();
        vectors = es.eigenvectors();
    } else {
        if (grid.size() > dense_cap)
            throw CapacityError("grid too large for dense single-particle eigensolve");
        const Eigen::Index n = grid.size();
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
        for (Eigen::Index c = 0; c < n; ++c) {
            Field e = Field::Zero(n);
            e[c] = 1.0;
            Field he = grid.kinetic(e);
            h.col(c) = he.real();
            h(c, c) += v[c];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
        if (es.info() != Eigen::Success) throw NumericalError("eigensolve did not converge");
        values = es.eigenvalues();
        vectors = es.eigenvectors();
    }

    if (count > values.size()) throw IndexError("more eigenpairs requested than grid supports");
    for (int i = 0; i < count; ++i) {
        out.energies.push_back(values[i]);
        Field mode = vectors.col(i).cast<Complex>() / std::sqrt(cell);
        // fix sign so the largest-magnitude sample is positive
        int imax = 0;
        mode.cwiseAbs().maxCoeff(&imax);
        if (std::real(mode[imax]) < 0.0) mode = -mode;
        out.modes.push_back(std::move(mode));
    }
    return out;
}

}  // namespace twomode
