#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "twomode/amplitudes.hpp"
#include "twomode/densities.hpp"
#include "twomode/gpe.hpp"
#include "twomode/grid.hpp"
#include "twomode/observables.hpp"
#include "twomode/trap.hpp"

namespace twomode {

struct SimConfig {
    enum class Integrator { euler, rk4 };

    int boson_count = 4;
    double total_time = 1.0;
    double dt = 1e-3;
    Grid grid = Grid::line(256, 16.0);
    TrapSpec trap;
    double g = 0.0;
    Integrator integrator = Integrator::euler;
    DerivScheme scheme = DerivScheme::centered;
    double inner_tolerance = 1e-8;
    int inner_cap = 20;
    long output_every = 1;
    GpeOptions gpe;
    bool freeze_modes = false;
    long gauge_flip_step = -1;  // flip phi_2's sign convention after this step; < 0 disables

    long step_count() const {
        if (dt <= 0.0) throw IndexError("time step must be positive");
        const long n = std::lround(total_time / dt);
        if (n < 1 || std::abs(n * dt - total_time) > 1e-9 * std::max(1.0, total_time))
            throw IndexError("total time must be an integral number of time steps");
        return n;
    }
};

struct StepDiagnostics {
    int inner_iterations = 0;
    double inner_residual = 0.0;
    std::vector<double> inner_history;
    int gpe_iterations = 0;
    double gpe_residual = 0.0;
    double pre_renorm_norm = 1.0;
};

struct SimState {
    double t = 0.0;
    long step = 0;
    AmplitudeVector amps;
    ModePair modes;  // phi at t plus the converged dt_phi estimate
    Eigen::Matrix2cd mu = Eigen::Matrix2cd::Zero();
    StepDiagnostics diag;
    double energy = 0.0;
    double n_two = 0.0;
};

using Sink = std::function<void(const SimState&)>;

// max_i || dt_phi_i(new) - dt_phi_i(prev) ||_{L2} < tol
inline bool inner_converged(const Grid& grid, const std::array<Field, 2>& prev,
                            const std::array<Field, 2>& next, double tol) {
    double worst = 0.0;
    for (int i = 0; i < 2; ++i) worst = std::max(worst, grid.norm(next[i] - prev[i]));
    return worst < tol;
}

struct MemoryEstimate {
    std::uint64_t simultaneous = 0;  // 2 (N + 5 + 10 Nsx Nsy Nsz)
    std::uint64_t trajectory = 0;    // Nt (N + 1 + 2 Nsx Nsy Nsz) + 4 Nt
};

inline MemoryEstimate memory_estimate(std::uint64_t boson_count, std::uint64_t nsx,
                                      std::uint64_t nsy, std::uint64_t nsz, std::uint64_t nt) {
    MemoryEstimate est;
    const std::uint64_t space = nsx * nsy * nsz;
    est.simultaneous = 2 * (boson_count + 5 + 10 * space);
    est.trajectory = nt * (boson_count + 1 + 2 * space) + 4 * nt;
    return est;
}

inline MemoryEstimate memory_estimate(const SimConfig& config) {
    return memory_estimate(config.boson_count, config.grid.nx, config.grid.ny, config.grid.nz,
                           config.step_count());
}

namespace detail {

inline void fill_observables(SimState& state, const Grid& grid, const RealField& v, double g,
                             DerivScheme scheme) {
    const CouplingWeights w = coupling_weights(state.amps);
    state.energy = energy(grid, w, state.modes, v, g, scheme);
    state.n_two = n2(state.amps);
}

// phi_2 -> -phi_2 together with the matching amplitude re-phasing
// b_k -> (-1)^(N/2+k) b_k; a pure change of gauge, all |b_k|^2 invariant.
inline void apply_gauge_flip(SimState& state) {
    state.modes.phi[1] = -state.modes.phi[1];
    state.modes.dt_phi[1] = -state.modes.dt_phi[1];
    for (Eigen::Index i = 0; i < state.amps.b.size(); ++i)
        if (i % 2 == 1) state.amps.b[i] = -state.amps.b[i];
    state.mu(0, 1) = -state.mu(0, 1);
    state.mu(1, 0) = -state.mu(1, 0);
}

}  // namespace detail

// Amplitudes all in mode 1, phi_1 from the initial single-mode GPE, phi_2 the
// lowest orthogonal state, time derivatives zero.
inline SimState make_initial_state(const SimConfig& config) {
    SimState state;
    state.amps = initial_state(config.boson_count);
    const RealField v0 = config.trap.potential_field(config.grid, 0.0);
    const EigenModes sp = single_particle_modes(config.trap, config.grid, 0.0, 2);
    const ModePair seed = ModePair::from(sp.modes[0], sp.modes[1], 0.0);
    GpeResult init = solve_modes(config.grid, coupling_weights(state.amps), v0, config.g, seed,
                                 config.gpe, &seed);
    state.modes = std::move(init.modes);
    state.mu = init.mu;
    state.diag.gpe_iterations = init.iterations;
    state.diag.gpe_residual = init.residual;
    return state;
}

// Self-consistent time evolution: per step, alternate an amplitude step under
// H - U at time t with a re-solve of the generalized GPE at t + dt, improving
// the mode time derivatives by forward difference until they settle; the
// converged derivatives seed the next step.
inline SimState run_from(const SimConfig& config, SimState state, const Sink& sink = {},
                         bool emit_initial = true) {
    const long n_steps = config.step_count();
    const FragBasis basis(config.boson_count);
    const Grid& grid = config.grid;
    const double dt = config.dt;

    RealField v_t = config.trap.potential_field(grid, state.t);

    if (emit_initial) {
        detail::fill_observables(state, grid, v_t, config.g, config.scheme);
        if (sink) sink(state);
    }

    for (long step = state.step; step < n_steps; ++step) {
        const double t = step * dt;
        const RealField v_next = config.trap.potential_field(grid, t + dt);

        // H at t depends only on phi(t); U picks up the evolving dt_phi guess.
        const Eigen::Matrix2cd w_mom = hamiltonian_moments(grid, state.modes, v_t, config.scheme);
        const QuarticMoments v_mom = quartic_moments(grid, state.modes, config.g);
        const BandedMatrix h_t = assemble_hamiltonian(w_mom, v_mom, basis);

        std::array<Field, 2> dtphi_guess = state.modes.dt_phi;
        ModePair modes_t = state.modes;
        ModePair modes_next = state.modes;  // previous inner iterate's phi(t+dt)
        Eigen::Matrix2cd mu_next = state.mu;
        StepResult amp_step;
        StepDiagnostics diag;
        std::vector<double> inner_history;

        // matrices at t+dt from the previous inner iterate (rk4 sampling)
        BandedMatrix h_next = h_t;
        BandedMatrix u_next(basis.dim(), std::min(1, basis.dim() - 1));

        bool converged = false;
        for (int inner = 0; inner < config.inner_cap; ++inner) {
            diag.inner_iterations = inner + 1;
            modes_t.dt_phi = dtphi_guess;
            const BandedMatrix u_t = assemble_rotation(rotation_moments(grid, modes_t), basis);

            if (config.integrator == SimConfig::Integrator::euler) {
                amp_step = step_euler(state.amps, h_t, u_t, dt);
            } else {
                auto sampler = [&](double ts) {
                    const double s = std::clamp((ts - t) / dt, 0.0, 1.0);
                    return MatrixPair{BandedMatrix::interpolate(h_t, h_next, s),
                                      BandedMatrix::interpolate(u_t, u_next, s)};
                };
                amp_step = step_rk4(state.amps, sampler, dt);
            }

            if (config.freeze_modes) {
                modes_next = modes_t;
                modes_next.time = t + dt;
                modes_next.dt_phi = {Field::Zero(grid.size()), Field::Zero(grid.size())};
                diag.gpe_iterations = 0;
                diag.gpe_residual = 0.0;
            } else {
                const CouplingWeights weights_next = coupling_weights(amp_step.state);
                GpeResult sol;
                try {
                    sol = solve_modes(grid, weights_next, v_next, config.g, modes_next,
                                      config.gpe, &state.modes);
                } catch (const ConvergenceError& err) {
                    throw ConvergenceError("generalized GPE failed at t = " + std::to_string(t + dt) +
                                               ": " + err.what(),
                                           err.residual_history);
                }
                modes_next = std::move(sol.modes);
                modes_next.time = t + dt;
                mu_next = sol.mu;
                diag.gpe_iterations = sol.iterations;
                diag.gpe_residual = sol.residual;
            }

            std::array<Field, 2> dtphi_new;
            for (int i = 0; i < 2; ++i)
                dtphi_new[i] = (modes_next.phi[i] - modes_t.phi[i]) / dt;

            double delta = 0.0;
            for (int i = 0; i < 2; ++i)
                delta = std::max(delta, grid.norm(dtphi_new[i] - dtphi_guess[i]));
            inner_history.push_back(delta);
            diag.inner_residual = delta;
            dtphi_guess = dtphi_new;

            if (delta < config.inner_tolerance) {
                converged = true;
                break;
            }

            if (config.integrator == SimConfig::Integrator::rk4 && !config.freeze_modes) {
                ModePair probe = modes_next;
                probe.dt_phi = dtphi_new;
                h_next = assemble_hamiltonian(hamiltonian_moments(grid, probe, v_next, config.scheme),
                                              quartic_moments(grid, probe, config.g), basis);
                u_next = assemble_rotation(rotation_moments(grid, probe), basis);
            }
        }
        if (!converged)
            throw DivergedStepError("inner fixed-point iteration exceeded its cap at t = " +
                                        std::to_string(t),
                                    t, inner_history);

        state.amps = amp_step.state;
        state.modes = modes_next;
        state.modes.dt_phi = dtphi_guess;  // next step's initial derivative guess
        state.mu = mu_next;
        state.t = t + dt;
        state.step = step + 1;
        diag.pre_renorm_norm = amp_step.pre_renorm_norm;
        diag.inner_history = inner_history;
        state.diag = diag;
        v_t = v_next;

        if (config.gauge_flip_step == step + 1) detail::apply_gauge_flip(state);

        const bool last = step + 1 == n_steps;
        if (sink && (last || (step + 1) % config.output_every == 0)) {
            detail::fill_observables(state, grid, v_t, config.g, config.scheme);
            sink(state);
        }
    }
    detail::fill_observables(state, grid, v_t, config.g, config.scheme);
    return state;
}

inline SimState run(const SimConfig& config, const Sink& sink = {}) {
    return run_from(config, make_initial_state(config), sink, true);
}

}  // namespace twomode
