#pragma once

// Test-only reference implementations. Each one deliberately takes a
// different computational route from the library code it checks.

#include <Eigen/Dense>
#include <random>

#include "twomode/amplitudes.hpp"
#include "twomode/densities.hpp"
#include "twomode/grid.hpp"
#include "twomode/spin_basis.hpp"

namespace twomode::testing {

// b(t) = exp(-i (H - U) t) b(0) through a dense Hermitian eigendecomposition.
inline Eigen::VectorXcd propagate_exact(const Eigen::MatrixXcd& h_minus_u,
                                        const Eigen::VectorXcd& b0, double t) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h_minus_u);
    Eigen::VectorXcd phases(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < phases.size(); ++i)
        phases[i] = std::exp(-kImag * es.eigenvalues()[i] * t);
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint() * b0;
}

// Hamiltonian matrix by brute-force Fock contraction of the same moments.
inline Eigen::MatrixXcd fock_hamiltonian(const FockOracle& oracle, const KernelMoments& mom) {
    const int d = oracle.basis().dim();
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            h += mom.w(i, j) * oracle.one_body(i + 1, j + 1).cast<Complex>();
            for (int m = 0; m < 2; ++m)
                for (int n = 0; n < 2; ++n)
                    h += mom.v[i][j][m][n] *
                         oracle.two_body(i + 1, j + 1, m + 1, n + 1).cast<Complex>();
        }
    return h;
}

inline Eigen::MatrixXcd fock_rotation(const FockOracle& oracle, const KernelMoments& mom) {
    const int d = oracle.basis().dim();
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            u += mom.t(i, j) * oracle.one_body(i + 1, j + 1).cast<Complex>();
    return u;
}

// Plain (unpreconditioned) imaginary-time integration of the single-mode GPE
// with renormalization after every step.
inline std::pair<Field, double> imaginary_time_gpe(const Grid& grid, const RealField& v,
                                                   double g_eff, const Field& seed,
                                                   double residual_tol, long max_steps) {
    double dz_min = 1e9;
    for (int axis = 0; axis < 3; ++axis)
        if (grid.axis_points(axis) > 1) dz_min = std::min(dz_min, grid.axis_spacing(axis));
    const double dtau = 0.4 * dz_min * dz_min;  // explicit stability bound for T ~ 1/dz^2

    Field phi = seed / grid.norm(seed);
    double mu = 0.0;
    for (long s = 0; s < max_steps; ++s) {
        Field grad = grid.kinetic(phi);
        grad.array() += v.array().cast<Complex>() * phi.array();
        if (g_eff != 0.0) grad += g_eff * phi.cwiseAbs2().cast<Complex>().cwiseProduct(phi);
        mu = std::real(grid.inner(phi, grad));
        if (grid.norm((grad - mu * phi).eval()) < residual_tol) return {phi, mu};
        phi -= dtau * grad;
        phi /= grid.norm(phi);
    }
    throw std::runtime_error("imaginary-time oracle did not converge");
}

inline AmplitudeVector random_amplitudes(int boson_count, std::mt19937& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    AmplitudeVector a;
    a.b.resize(boson_count + 1);
    for (Eigen::Index i = 0; i < a.b.size(); ++i) a.b[i] = Complex(dist(rng), dist(rng));
    a.renormalize();
    return a;
}

// Smooth decaying random modes: Gaussian envelope times a random cubic,
// orthonormalized.
inline ModePair random_smooth_modes(const Grid& grid, std::mt19937& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    std::array<Field, 2> phi;
    for (int i = 0; i < 2; ++i) {
        std::array<Complex, 4> c;
        for (auto& ck : c) ck = Complex(dist(rng), dist(rng));
        phi[i] = grid.sample([&](double, double, double z) {
            return std::exp(-0.5 * z * z) * (c[0] + c[1] * z + c[2] * z * z + c[3] * z * z * z);
        });
    }
    phi[0] /= grid.norm(phi[0]);
    phi[1] -= phi[0] * grid.inner(phi[0], phi[1]);
    phi[1] /= grid.norm(phi[1]);
    return ModePair::from(phi[0], phi[1]);
}

}  // namespace twomode::testing
