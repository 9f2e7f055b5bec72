#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "twomode/amplitudes.hpp"
#include "twomode/densities.hpp"
#include "twomode/errors.hpp"
#include "twomode/grid.hpp"
#include "twomode/spin_basis.hpp"

namespace twomode {

// Occupation weights, quadratic in the amplitudes: X_ij ~ N, Y_ijmn ~ N^2.
struct CouplingWeights {
    Eigen::Matrix2cd x = Eigen::Matrix2cd::Zero();
    std::array<std::array<std::array<std::array<Complex, 2>, 2>, 2>, 2> y{};

    Complex y_at(int i, int j, int m, int n) const { return y[i][j][m][n]; }
    double occupation(int i) const { return std::real(x(i, i)); }
    double total() const { return std::real(x.trace()); }
};

inline CouplingWeights coupling_weights(const AmplitudeVector& a) {
    const FragBasis basis(a.boson_count());
    CouplingWeights w;
    for (int r = 0; r < basis.dim(); ++r) {
        const int k = basis.k_of_index(r);
        for (int c = std::max(0, r - 2); c <= std::min(basis.dim() - 1, r + 2); ++c) {
            const int l = basis.k_of_index(c);
            const Complex bb = std::conj(a.b[r]) * a.b[c];
            if (bb == 0.0) continue;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    if (std::abs(k - l) <= 1) {
                        const double x = x_coeff(i + 1, j + 1, k, l, basis.n);
                        if (x != 0.0) w.x(i, j) += bb * x;
                    }
                    for (int m = 0; m < 2; ++m)
                        for (int n = 0; n < 2; ++n) {
                            const double y = y_coeff(i + 1, j + 1, m + 1, n + 1, k, l, basis.n);
                            if (y != 0.0) w.y[i][j][m][n] += bb * y;
                        }
                }
        }
    }
    return w;
}

struct GpeOptions {
    double tolerance = 1e-8;          // L2 residual of the mode equations
    int max_iterations = 50000;
    double occupation_threshold = 1e-8;  // times N; below it a mode counts as empty
    // Own-row single-particle coefficients are floored at this fraction of N.
    // A nearly-empty mode's equation is dominated by the pair-coherence term
    // and its exact stationary shape detaches from the adiabatic branch; the
    // floor keeps the modes smooth until genuine occupation builds up, and
    // leaves the equations exact once every occupation exceeds the gate.
    double occupation_gate = 1e-2;
    double initial_step = 0.2;
};

struct GpeResult {
    ModePair modes;
    Eigen::Matrix2cd mu = Eigen::Matrix2cd::Zero();
    int iterations = 0;
    double residual = 0.0;       // residual of the equations actually solved
    double regularization = 0.0;  // own-row floor applied; 0 means exact equations
    double energy = 0.0;
};

namespace detail {

// (1 + T)^{-1} smoothing preconditioner, applied axis by axis with the
// Thomas algorithm.
class KineticPreconditioner {
  public:
    explicit KineticPreconditioner(const Grid& grid) : grid_(grid) {}

    Field apply(const Field& f) const {
        Field out = f;
        for (int axis = 0; axis < 3; ++axis) {
            const int n = grid_.axis_points(axis);
            if (n == 1) continue;
            solve_axis(out, axis);
        }
        return out;
    }

  private:
    void solve_axis(Field& f, int axis) const {
        const int n = grid_.axis_points(axis);
        const double d = grid_.axis_spacing(axis);
        const double diag = 1.0 + 1.0 / (d * d);
        const double off = -0.5 / (d * d);
        const Eigen::Index stride = grid_.axis_stride(axis);
        const Eigen::Index lines = grid_.size() / n;

        std::vector<double> cp(n);
        std::vector<Complex> dp(n);
        for (Eigen::Index line = 0; line < lines; ++line) {
            const Eigen::Index base = line_base(line, axis);
            cp[0] = off / diag;
            dp[0] = f[base] / diag;
            for (int i = 1; i < n; ++i) {
                const double m = diag - off * cp[i - 1];
                cp[i] = off / m;
                dp[i] = (f[base + i * stride] - off * dp[i - 1]) / m;
            }
            f[base + Eigen::Index(n - 1) * stride] = dp[n - 1];
            for (int i = n - 2; i >= 0; --i)
                f[base + i * stride] = dp[i] - cp[i] * f[base + (i + 1) * stride];
        }
    }

    Eigen::Index line_base(Eigen::Index line, int axis) const {
        // enumerate the starting index of each 1D line along `axis`
        const Eigen::Index nx = grid_.nx, ny = grid_.ny, nz = grid_.nz;
        if (axis == 2) return line * nz;               // lines are (ix,iy)
        if (axis == 1) {                               // lines are (ix,iz)
            const Eigen::Index ix = line / nz, iz = line % nz;
            return (ix * ny) * nz + iz;
        }
        const Eigen::Index iy = line / nz, iz = line % nz;  // axis == 0
        return iy * nz + iz;
    }

    const Grid& grid_;
};

inline Field apply_single_particle(const Grid& grid, const RealField& v, const Field& f) {
    Field out = grid.kinetic(f);
    out.array() += v.array().cast<Complex>() * f.array();
    return out;
}

// g sum_jmn Y_ijmn phi_j^* phi_m phi_n for one row i.
inline Field cubic_row(const CouplingWeights& w, double g,
                       const std::array<Field, 2>& phi, int i) {
    Field out = Field::Zero(phi[0].size());
    if (g == 0.0) return out;
    for (int j = 0; j < 2; ++j)
        for (int m = 0; m < 2; ++m)
            for (int n = 0; n < 2; ++n) {
                const Complex c = w.y[i][j][m][n];
                if (c == 0.0) continue;
                out += (g * c) *
                       phi[j].conjugate().cwiseProduct(phi[m]).cwiseProduct(phi[n]);
            }
    return out;
}

// Preconditioned MINRES for a symmetric (possibly indefinite) real-linear
// operator with an SPD preconditioner, in the real inner product `rip`.
template <typename OpA, typename OpM, typename Rip>
std::array<Field, 2> minres_solve(OpA&& apply_a, OpM&& apply_m, Rip&& rip,
                                  const std::array<Field, 2>& b, double rtol, int maxit) {
    const Eigen::Index n = b[0].size();
    auto zeros = [n] { return std::array<Field, 2>{Field::Zero(n), Field::Zero(n)}; };
    std::array<Field, 2> x = zeros();
    std::array<Field, 2> v_prev = zeros(), v = b;
    std::array<Field, 2> z = apply_m(v);
    double gamma_prev = 1.0;
    double gamma = std::sqrt(std::max(rip(z, v), 0.0));
    if (gamma < 1e-300) return x;
    const double gamma0 = gamma;
    double eta = gamma;
    double s_prev = 0.0, s = 0.0, c_prev = 1.0, c = 1.0;
    std::array<Field, 2> w_prev = zeros(), w = zeros();

    for (int j = 0; j < maxit; ++j) {
        std::array<Field, 2> zj = z;
        for (int i = 0; i < 2; ++i) zj[i] /= gamma;
        const std::array<Field, 2> az = apply_a(zj);
        const double delta = rip(az, zj);
        std::array<Field, 2> v_next;
        for (int i = 0; i < 2; ++i)
            v_next[i] = az[i] - (delta / gamma) * v[i] - (gamma / gamma_prev) * v_prev[i];
        std::array<Field, 2> z_next = apply_m(v_next);
        const double gamma_next = std::sqrt(std::max(rip(z_next, v_next), 0.0));
        const double alpha0 = c * delta - c_prev * s * gamma;
        const double alpha1 = std::sqrt(alpha0 * alpha0 + gamma_next * gamma_next);
        const double alpha2 = s * delta + c_prev * c * gamma;
        const double alpha3 = s_prev * gamma;
        if (alpha1 < 1e-300) break;
        const double c_next = alpha0 / alpha1;
        const double s_next = gamma_next / alpha1;
        std::array<Field, 2> w_next;
        for (int i = 0; i < 2; ++i)
            w_next[i] = (zj[i] - alpha3 * w_prev[i] - alpha2 * w[i]) / alpha1;
        for (int i = 0; i < 2; ++i) x[i] += (c_next * eta) * w_next[i];
        eta = -s_next * eta;

        v_prev = std::move(v);
        v = std::move(v_next);
        z = std::move(z_next);
        gamma_prev = gamma;
        gamma = gamma_next;
        c_prev = c;
        c = c_next;
        s_prev = s;
        s = s_next;
        w_prev = std::move(w);
        w = std::move(w_next);
        if (std::abs(eta) < rtol * gamma0 || gamma < 1e-300) break;
    }
    return x;
}

inline void gram_schmidt(const Grid& grid, std::array<Field, 2>& phi) {
    const double n0 = grid.norm(phi[0]);
    if (n0 < 1e-300) throw NumericalError("mode norm underflow in orthonormalization");
    phi[0] /= n0;
    phi[1] -= phi[0] * grid.inner(phi[0], phi[1]);
    const double n1 = grid.norm(phi[1]);
    if (n1 < 1e-300) throw NumericalError("modes became linearly dependent");
    phi[1] /= n1;
}

inline double constrained_energy(const Grid& grid, const CouplingWeights& w, double g,
                                 const RealField& v, const std::array<Field, 2>& phi) {
    Complex e = 0.0;
    std::array<Field, 2> hphi;
    for (int j = 0; j < 2; ++j) hphi[j] = apply_single_particle(grid, v, phi[j]);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (w.x(i, j) != 0.0) e += w.x(i, j) * grid.inner(phi[i], hphi[j]);
    if (g != 0.0) {
        std::array<std::array<Field, 2>, 2> prod;
        for (int m = 0; m < 2; ++m)
            for (int n = 0; n < 2; ++n) prod[m][n] = phi[m].cwiseProduct(phi[n]);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int m = 0; m < 2; ++m)
                    for (int n = 0; n < 2; ++n)
                        if (w.y[i][j][m][n] != 0.0)
                            e += 0.5 * g * w.y[i][j][m][n] * grid.inner(prod[i][j], prod[m][n]);
    }
    return std::real(e);
}

}  // namespace detail

// Lowest solution of the standard single-mode GPE
//   mu phi = -(1/2) Lap phi + V phi + g_eff |phi|^2 phi
// by preconditioned steepest descent with the step length minimizing the
// local quadratic model, renormalizing every iteration.
inline std::pair<Field, double> solve_single_gpe(const Grid& grid, const RealField& v,
                                                 double g_eff, const Field& seed,
                                                 double tol, int max_iter,
                                                 int* iterations_out = nullptr) {
    detail::KineticPreconditioner precond(grid);
    Field phi = seed / grid.norm(seed);
    double mu = 0.0;
    std::vector<double> history;
    double prev_rn = std::numeric_limits<double>::infinity();
    int reverts = 0;
    for (int iter = 0; iter < max_iter; ++iter) {
        Field grad = detail::apply_single_particle(grid, v, phi);
        if (g_eff != 0.0) grad += g_eff * phi.cwiseAbs2().cast<Complex>().cwiseProduct(phi);
        mu = std::real(grid.inner(phi, grad));
        const Field res = grad - mu * phi;
        const double rn = grid.norm(res);
        history.push_back(rn);
        if (rn < tol) {
            if (iterations_out) *iterations_out = iter;
            return {std::move(phi), mu};
        }
        if (rn > 10.0 * prev_rn && ++reverts > 8)
            throw ConvergenceError("single-mode descent is diverging", history);
        prev_rn = rn;

        Field d = precond.apply(res);
        d -= phi * grid.inner(phi, d);
        // curvature along d: h d + g (2|phi|^2 d + phi^2 d*) - mu d
        Field ad = detail::apply_single_particle(grid, v, d);
        if (g_eff != 0.0)
            ad += g_eff * (2.0 * phi.cwiseAbs2().cast<Complex>().cwiseProduct(d) +
                           phi.cwiseProduct(phi).cwiseProduct(d.conjugate()));
        ad -= mu * d;
        const double num = std::real(grid.inner(d, res));
        const double den = std::real(grid.inner(d, ad));
        double eta = den > 1e-300 ? num / den : 0.3;
        if (eta <= 0.0) eta = 0.3;
        eta = std::min(eta, 5.0);
        phi -= eta * d;
        phi /= grid.norm(phi);
    }
    throw ConvergenceError("single-mode solve did not converge", history);
}

namespace detail {

// Lowest single-particle state orthogonal to `fixed`; same descent with the
// extra deflation projection.
inline Field solve_orthogonal_mode(const Grid& grid, const RealField& v, const Field& fixed,
                                   const Field& seed, double tol, int max_iter) {
    KineticPreconditioner precond(grid);
    Field phi = seed - fixed * grid.inner(fixed, seed);
    double n = grid.norm(phi);
    if (n < 1e-10) {
        // seed was parallel to the occupied mode; bias it with a node
        phi = grid.sample([&](double, double, double z) { return Complex(z, 0.0); })
                  .cwiseProduct(fixed);
        phi -= fixed * grid.inner(fixed, phi);
        n = grid.norm(phi);
    }
    phi /= n;
    std::vector<double> history;
    double prev_rn = std::numeric_limits<double>::infinity();
    int reverts = 0;
    for (int iter = 0; iter < max_iter; ++iter) {
        const Field hphi = apply_single_particle(grid, v, phi);
        const double eps = std::real(grid.inner(phi, hphi));
        Field res = hphi - eps * phi - fixed * grid.inner(fixed, hphi);
        const double rn = grid.norm(res);
        history.push_back(rn);
        if (rn < tol) return phi;
        if (rn > 10.0 * prev_rn && ++reverts > 8)
            throw ConvergenceError("orthogonal-mode descent is diverging", history);
        prev_rn = rn;

        Field d = precond.apply(res);
        d -= phi * grid.inner(phi, d);
        d -= fixed * grid.inner(fixed, d);
        Field ad = apply_single_particle(grid, v, d);
        ad -= eps * d;
        const double num = std::real(grid.inner(d, res));
        const double den = std::real(grid.inner(d, ad));
        double eta = den > 1e-300 ? num / den : 0.3;
        if (eta <= 0.0) eta = 0.3;
        eta = std::min(eta, 5.0);
        phi -= eta * d;
        phi -= fixed * grid.inner(fixed, phi);
        phi /= grid.norm(phi);
    }
    throw ConvergenceError("orthogonal-mode solve did not converge", history);
}

}  // namespace detail

// Solve the coupled generalized Gross-Pitaevskii equations
//   N sum_j mu_ij phi_j = sum_j X_ij (T + V) phi_j + g sum_jmn Y_ijmn phi_j^* phi_m phi_n
// for orthonormal phi_1, phi_2 given the occupation weights, by constrained
// gradient flow with Gram-Schmidt re-orthonormalization. When one mode is
// unoccupied (weight below threshold * N) its equation is degenerate and the
// mode is defined as the lowest single-particle state orthogonal to the other.
// The chemical potential matrix is extracted by projection at convergence.
// When `gauge_ref` is given, each mode is phase-rotated so its overlap with
// the reference is real and positive.
inline GpeResult solve_modes(const Grid& grid, const CouplingWeights& weights,
                             const RealField& v, double g, const ModePair& seed,
                             const GpeOptions& opts = {},
                             const ModePair* gauge_ref = nullptr) {
    const double total = weights.total();
    if (total <= 0.0) throw NumericalError("occupation weights have non-positive trace");
    const double occ_floor = opts.occupation_threshold * total;

    std::array<Field, 2> phi = seed.phi;
    detail::gram_schmidt(grid, phi);
    detail::KineticPreconditioner precond(grid);
    std::vector<double> history;
    int iterations = 0;

    const double occ1 = weights.occupation(0);
    const double occ2 = weights.occupation(1);
    const bool degenerate1 = occ1 < occ_floor;
    const bool degenerate2 = occ2 < occ_floor;

    // own-row floor, zero once both occupations clear the gate
    const double gate = opts.occupation_gate * total;
    const double floor1 = std::max(0.0, gate - occ1);
    const double floor2 = std::max(0.0, gate - occ2);
    CouplingWeights weights_eff = weights;
    weights_eff.x(0, 0) += floor1;
    weights_eff.x(1, 1) += floor2;

    if (degenerate1 || degenerate2) {
        const int a = degenerate2 ? 0 : 1;  // occupied mode
        const int b = 1 - a;
        const double occ = weights.occupation(a);
        const double g_eff =
            g * std::real(weights.y[a][a][a][a]) / occ;
        int single_iters = 0;
        // full-equation residual scales with X_aa, so tighten accordingly
        auto [mode_a, mu_single] = solve_single_gpe(grid, v, g_eff, phi[a],
                                                    opts.tolerance / std::max(occ, 1.0),
                                                    opts.max_iterations, &single_iters);
        (void)mu_single;
        phi[a] = std::move(mode_a);
        phi[b] = detail::solve_orthogonal_mode(grid, v, phi[a], phi[b], opts.tolerance,
                                               opts.max_iterations);
        iterations = single_iters;
    } else {
        // joint preconditioned descent; X^{-1} balances the two rows and the
        // step length minimizes the local quadratic model of the Lagrangian
        const Eigen::Matrix2cd xreg =
            weights_eff.x + std::max(occ_floor, 1e-12 * total) * Eigen::Matrix2cd::Identity();
        const Eigen::Matrix2cd xinv = xreg.inverse();

        auto rhs_row = [&](const std::array<Field, 2>& f, int i) {
            Field r = Field::Zero(grid.size());
            for (int j = 0; j < 2; ++j)
                if (weights_eff.x(i, j) != 0.0)
                    r += weights_eff.x(i, j) * detail::apply_single_particle(grid, v, f[j]);
            r += detail::cubic_row(weights, g, f, i);
            return r;
        };

        double prev_worst = std::numeric_limits<double>::infinity();
        int growth_events = 0;
        for (int iter = 0; iter < opts.max_iterations; ++iter) {
            iterations = iter + 1;

            std::array<Field, 2> rhs = {rhs_row(phi, 0), rhs_row(phi, 1)};
            Eigen::Matrix2cd span;
            for (int j = 0; j < 2; ++j)
                for (int i = 0; i < 2; ++i) span(j, i) = grid.inner(phi[j], rhs[i]);
            const Eigen::Matrix2cd herm = 0.5 * (span + span.adjoint());

            // residual of the full equations with a Hermitian multiplier
            double worst = 0.0;
            for (int i = 0; i < 2; ++i) {
                Field pde_res = rhs[i];
                for (int j = 0; j < 2; ++j) pde_res -= phi[j] * herm(j, i);
                worst = std::max(worst, grid.norm(pde_res));
            }
            history.push_back(worst);
            if (worst < opts.tolerance) break;
            if (iter + 1 == opts.max_iterations)
                throw ConvergenceError("generalized GPE solve did not converge", history);
            if (worst > 10.0 * prev_worst && ++growth_events > 8)
                throw ConvergenceError("generalized GPE descent is diverging", history);
            prev_worst = worst;

            std::array<Field, 2> res;
            for (int i = 0; i < 2; ++i) {
                res[i] = rhs[i];
                for (int j = 0; j < 2; ++j) res[i] -= phi[j] * herm(j, i);
            }

            auto tangent_project = [&](std::array<Field, 2>& d) {
                Eigen::Matrix2cd coeff;
                for (int j = 0; j < 2; ++j)
                    for (int i = 0; i < 2; ++i) coeff(j, i) = grid.inner(phi[j], d[i]);
                const Eigen::Matrix2cd coeff_h = 0.5 * (coeff + coeff.adjoint());
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) d[i] -= phi[j] * coeff_h(j, i);
            };

            // Lagrangian curvature along (d, d*); real-linear and symmetric
            // in the real inner product, so CG applies to the Newton system.
            auto hessian_apply = [&](const std::array<Field, 2>& d) {
                std::array<Field, 2> ad;
                for (int i = 0; i < 2; ++i) {
                    ad[i] = Field::Zero(grid.size());
                    for (int j = 0; j < 2; ++j)
                        if (weights_eff.x(i, j) != 0.0)
                            ad[i] += weights_eff.x(i, j) * detail::apply_single_particle(grid, v, d[j]);
                    if (g != 0.0)
                        for (int j = 0; j < 2; ++j)
                            for (int m = 0; m < 2; ++m)
                                for (int n = 0; n < 2; ++n) {
                                    const Complex c = weights.y[i][j][m][n];
                                    if (c == 0.0) continue;
                                    ad[i] +=
                                        (g * c) *
                                        (d[j].conjugate().cwiseProduct(phi[m]).cwiseProduct(phi[n]) +
                                         phi[j].conjugate().cwiseProduct(d[m]).cwiseProduct(phi[n]) +
                                         phi[j].conjugate().cwiseProduct(phi[m]).cwiseProduct(d[n]));
                                }
                    for (int j = 0; j < 2; ++j) ad[i] -= d[j] * herm(j, i);
                }
                tangent_project(ad);
                return ad;
            };
            auto precond_apply = [&](const std::array<Field, 2>& r) {
                std::array<Field, 2> z;
                for (int i = 0; i < 2; ++i) {
                    z[i] = Field::Zero(grid.size());
                    for (int j = 0; j < 2; ++j) z[i] += xinv(i, j) * precond.apply(r[j]);
                }
                tangent_project(z);
                return z;
            };
            auto rip = [&](const std::array<Field, 2>& a, const std::array<Field, 2>& b) {
                double acc = 0.0;
                for (int i = 0; i < 2; ++i) acc += std::real(grid.inner(a[i], b[i]));
                return acc;
            };

            // Newton direction from MINRES (the Lagrangian Hessian is
            // indefinite when one mode is nearly empty), then a backtracking
            // line search on the residual norm
            std::array<Field, 2> newton =
                detail::minres_solve(hessian_apply, precond_apply, rip, res, 0.02, 200);
            if (rip(newton, newton) < 1e-300) newton = precond_apply(res);

            auto residual_at = [&](const std::array<Field, 2>& trial) {
                std::array<Field, 2> rhs_new = {rhs_row(trial, 0), rhs_row(trial, 1)};
                Eigen::Matrix2cd span_new;
                for (int j = 0; j < 2; ++j)
                    for (int i = 0; i < 2; ++i) span_new(j, i) = grid.inner(trial[j], rhs_new[i]);
                const Eigen::Matrix2cd herm_new = 0.5 * (span_new + span_new.adjoint());
                double worst_new = 0.0;
                for (int i = 0; i < 2; ++i) {
                    Field pr = rhs_new[i];
                    for (int j = 0; j < 2; ++j) pr -= trial[j] * herm_new(j, i);
                    worst_new = std::max(worst_new, grid.norm(pr));
                }
                return worst_new;
            };

            const std::array<Field, 2> saved = phi;
            double scale = 1.0;
            std::array<Field, 2> best = phi;
            double best_worst = std::numeric_limits<double>::infinity();
            for (int attempt = 0; attempt < 6; ++attempt) {
                std::array<Field, 2> trial = saved;
                for (int i = 0; i < 2; ++i) trial[i] -= scale * newton[i];
                detail::gram_schmidt(grid, trial);
                const double worst_new = residual_at(trial);
                if (worst_new < best_worst) {
                    best_worst = worst_new;
                    best = trial;
                }
                if (worst_new < 0.9 * worst) break;
                scale *= 0.5;
            }
            phi = std::move(best);
        }
    }

    if (gauge_ref) {
        for (int i = 0; i < 2; ++i) {
            const Complex ov = grid.inner(gauge_ref->phi[i], phi[i]);
            if (std::abs(ov) > 1e-12) phi[i] *= std::conj(ov) / std::abs(ov);
        }
    }

    GpeResult out;
    out.modes = ModePair::from(phi[0], phi[1], seed.time);
    out.iterations = iterations;
    out.regularization = std::max(floor1, floor2);

    // certificate: residual of the full equations against the Hermitian
    // multiplier matrix extracted by projection
    std::array<Field, 2> rhs;
    for (int i = 0; i < 2; ++i) {
        rhs[i] = Field::Zero(grid.size());
        for (int j = 0; j < 2; ++j)
            if (weights.x(i, j) != 0.0)
                rhs[i] += weights.x(i, j) * detail::apply_single_particle(grid, v, phi[j]);
        rhs[i] += detail::cubic_row(weights, g, phi, i);
    }
    Eigen::Matrix2cd span;
    for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i) span(j, i) = grid.inner(phi[j], rhs[i]);
    const Eigen::Matrix2cd herm = 0.5 * (span + span.adjoint());
    out.mu = herm.transpose() / total;  // N mu_ij = <phi_j | R_i> at stationarity
    double worst = 0.0;
    for (int i = 0; i < 2; ++i) {
        Field res = rhs[i];
        for (int j = 0; j < 2; ++j) res -= phi[j] * herm(j, i);
        worst = std::max(worst, grid.norm(res));
    }
    out.residual = worst;
    out.energy = detail::constrained_energy(grid, weights, g, v, phi);
    return out;
}

// E = sum_ij X_ij Int phi_i^* (T + V) phi_j + (g/2) sum Y_ijmn Int phi^*phi^*phi phi,
// evaluated with the same kernel moments the Hamiltonian matrix uses.
inline double energy(const Grid& grid, const CouplingWeights& weights, const ModePair& modes,
                     const RealField& v, double g, DerivScheme scheme = DerivScheme::centered) {
    const Eigen::Matrix2cd w = hamiltonian_moments(grid, modes, v, scheme);
    Complex e = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) e += weights.x(i, j) * w(i, j);
    if (g != 0.0) {
        std::array<std::array<Field, 2>, 2> prod;
        for (int m = 0; m < 2; ++m)
            for (int n = 0; n < 2; ++n) prod[m][n] = modes.phi[m].cwiseProduct(modes.phi[n]);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int m = 0; m < 2; ++m)
                    for (int n = 0; n < 2; ++n)
                        if (weights.y[i][j][m][n] != 0.0)
                            e += 0.5 * g * weights.y[i][j][m][n] *
                                 grid.inner(prod[i][j], prod[m][n]);
    }
    return std::real(e);
}

inline double chemical_potential(const Eigen::Matrix2cd& mu) { return std::real(mu.trace()); }

}  // namespace twomode
