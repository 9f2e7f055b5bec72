#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>

#include "twomode/banded.hpp"
#include "twomode/grid.hpp"
#include "twomode/errors.hpp"
#include "twomode/spin_basis.hpp"

namespace twomode {

// Complex amplitudes b_k over the fragmentation index, unit norm.
struct AmplitudeVector {
    Eigen::VectorXcd b;
    double time = 0.0;

    int boson_count() const { return int(b.size()) - 1; }
    double norm() const { return b.norm(); }

    void renormalize() {
        const double n = b.norm();
        if (n < 1e-300) throw NumericalError("amplitude norm underflow");
        b /= n;
    }
};

// All bosons in mode 1: b_k = delta_{k,-N/2}.
inline AmplitudeVector initial_state(int boson_count, double t = 0.0) {
    FragBasis basis(boson_count);
    AmplitudeVector a;
    a.b = Eigen::VectorXcd::Zero(basis.dim());
    a.b[0] = 1.0;
    a.time = t;
    return a;
}

// Unfragmented condensate in the rotated mode cos(theta) e^{-i chi/2} phi_1 +
// sin(theta) e^{+i chi/2} phi_2; amplitudes are square roots of binomial
// weights times e^{-i k chi}.
inline AmplitudeVector binomial_state(int boson_count, double theta, double chi, double t = 0.0) {
    FragBasis basis(boson_count);
    AmplitudeVector a;
    a.b.resize(basis.dim());
    a.time = t;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    for (int idx = 0; idx < basis.dim(); ++idx) {
        const int k = basis.k_of_index(idx);
        const int n1 = basis.half() - k;
        const int n2 = basis.half() + k;
        const double log_binom = std::lgamma(boson_count + 1.0) - std::lgamma(n1 + 1.0) -
                                 std::lgamma(n2 + 1.0);
        const double mag = std::exp(0.5 * log_binom) * std::pow(c, n1) * std::pow(s, n2);
        a.b[idx] = mag * std::exp(-kImag * double(k) * chi);
    }
    a.renormalize();
    return a;
}

struct StepResult {
    AmplitudeVector state;
    double pre_renorm_norm = 1.0;
};

// One explicit Euler step of i db/dt = (H - U) b (hbar = 1), followed by the
// mandatory renormalization.
inline StepResult step_euler(const AmplitudeVector& a, const BandedMatrix& h,
                             const BandedMatrix& u, double dt) {
    if (dt <= 0.0) throw IndexError("time step must be positive");
    StepResult out;
    out.state.time = a.time + dt;
    out.state.b = a.b + dt / kImag * (h.apply(a.b) - u.apply(a.b));
    out.pre_renorm_norm = out.state.b.norm();
    out.state.renormalize();
    return out;
}

struct MatrixPair {
    BandedMatrix h;
    BandedMatrix u;
};

using MatrixSampler = std::function<MatrixPair(double)>;

// Classical fourth-order step of the same equation; renormalization is
// applied once at the end for uniform semantics with the Euler step.
inline StepResult step_rk4(const AmplitudeVector& a, const MatrixSampler& sample, double dt) {
    if (dt <= 0.0) throw IndexError("time step must be positive");
    auto rhs = [&](double t, const Eigen::VectorXcd& y) {
        const MatrixPair m = sample(t);
        return ((m.h.apply(y) - m.u.apply(y)) / kImag).eval();
    };
    const double t0 = a.time;
    const Eigen::VectorXcd k1 = rhs(t0, a.b);
    const Eigen::VectorXcd k2 = rhs(t0 + 0.5 * dt, a.b + 0.5 * dt * k1);
    const Eigen::VectorXcd k3 = rhs(t0 + 0.5 * dt, a.b + 0.5 * dt * k2);
    const Eigen::VectorXcd k4 = rhs(t0 + dt, a.b + dt * k3);
    StepResult out;
    out.state.time = t0 + dt;
    out.state.b = a.b + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.pre_renorm_norm = out.state.b.norm();
    out.state.renormalize();
    return out;
}

// P(n) = |b_{n - N/2}|^2, the probability that n bosons occupy mode 2.
inline Eigen::VectorXd transfer_probabilities(const AmplitudeVector& a) {
    return a.b.cwiseAbs2();
}

}  // namespace twomode
