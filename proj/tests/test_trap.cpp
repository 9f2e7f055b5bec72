#include <catch2/catch_amalgamated.hpp>

#include "twomode/amplitudes.hpp"
#include "twomode/trap.hpp"

using namespace twomode;

namespace {
TrapSpec single_well() {
    TrapSpec spec;
    spec.omega_perp = 10.0;
    spec.barrier_height = Schedule::constant(0.0);
    spec.tilt = Schedule::constant(0.0);
    spec.total_time = 1.0;
    return spec;
}
}  // namespace

TEST_CASE("potential reduces to the bare harmonic well") {
    const TrapSpec spec = single_well();
    CHECK(spec.potential(0, 0, 0, 0.5) == Catch::Approx(0.0).margin(1e-15));
    CHECK(spec.potential(0, 0, 1.0, 0.5) == Catch::Approx(0.5));
    CHECK(spec.potential(0, 0, -2.0, 0.5) == Catch::Approx(2.0));
}

TEST_CASE("tilt sign selects the deeper well") {
    TrapSpec spec = single_well();
    spec.barrier_height = Schedule::constant(8.0);
    spec.tilt = Schedule::constant(0.3);
    const double t = 0.5;
    // eps > 0 deepens z < 0; eps -> -eps mirrors the potential in z
    CHECK(spec.potential(0, 0, -2.0, t) < spec.potential(0, 0, 2.0, t));
    TrapSpec mirrored = spec;
    mirrored.tilt = Schedule::constant(-0.3);
    for (double z : {-2.5, -1.0, 0.7, 3.1})
        CHECK(spec.potential(0, 0, z, t) == Catch::Approx(mirrored.potential(0, 0, -z, t)));
}

TEST_CASE("schedules interpolate between single and double well") {
    TrapSpec spec = single_well();
    spec.barrier_height = Schedule::sinsq(12.0);
    spec.total_time = 4.0;
    CHECK(spec.barrier_at(0.0) == Catch::Approx(0.0).margin(1e-12));
    CHECK(spec.barrier_at(4.0) == Catch::Approx(0.0).margin(1e-12));
    CHECK(spec.barrier_at(2.0) == Catch::Approx(12.0));

    const Schedule trap_ramp = Schedule::trapezoid(5.0, 0.25);
    CHECK(trap_ramp.value(0.0, 4.0) == Catch::Approx(0.0).margin(1e-12));
    CHECK(trap_ramp.value(0.5, 4.0) == Catch::Approx(2.5));
    CHECK(trap_ramp.value(2.0, 4.0) == Catch::Approx(5.0));
    CHECK(trap_ramp.value(3.5, 4.0) == Catch::Approx(2.5));
}

TEST_CASE("grid quadrature integrates analytic Gaussians") {
    const Grid grid = Grid::line(512, 24.0);
    auto [left, right] = ho_localized_modes(grid, 0.0);
    CHECK(std::abs(grid.inner(left, left).real() - 1.0) < 1e-8);
    CHECK((left - right).norm() == 0.0);

    for (double d : {0.5, 1.0, 2.0, 3.0}) {
        auto [l, r] = ho_localized_modes(grid, d);
        CHECK(std::abs(grid.inner(l, l).real() - 1.0) < 1e-8);
        // analytic displaced-Gaussian overlap
        CHECK(grid.inner(l, r).real() == Catch::Approx(std::exp(-d * d)).epsilon(1e-8));
    }
}

TEST_CASE("hubbard estimate reproduces the closed-form ratio regime") {
    TrapSpec spec = single_well();
    spec.barrier_height = Schedule::sinsq(10.0);
    const Grid grid = Grid::line(1024, 26.0);
    const double a_s = 0.005;  // 5 nm over a0 = 1 um

    SECTION("closed form at d = 0") {
        const HubbardParams p = hubbard_estimate(spec, grid, 0.0, a_s);
        CHECK(p.ratio_estimate == Catch::Approx(10.0 / a_s));
    }

    SECTION("paper regime magnitudes") {
        const HubbardParams far = hubbard_estimate(spec, grid, 5.0, a_s);
        CHECK(std::abs(std::log10(far.ratio_estimate) - std::log10(1e-7)) < 1.0);
        const HubbardParams near = hubbard_estimate(spec, grid, 2.0, a_s);
        CHECK(std::abs(std::log10(near.ratio_estimate) - std::log10(1e2)) < 1.0);
    }

    SECTION("quadrature ratio tracks the closed form within a factor of 10") {
        for (double d : {2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0}) {
            const HubbardParams p = hubbard_estimate(spec, grid, d, a_s);
            const double quad = std::abs(p.ratio());
            const double factor = quad / p.ratio_estimate;
            CHECK(factor < 10.0);
            CHECK(factor > 0.1);
        }
    }

    SECTION("narrow grid is rejected") {
        const Grid narrow = Grid::line(64, 6.0);
        CHECK_THROWS_AS(hubbard_estimate(spec, narrow, 5.0, a_s), ResolutionError);
    }
}

TEST_CASE("hubbard ground state limits") {
    SECTION("pure tunneling gives the delocalized binomial condensate") {
        for (int n : {4, 8}) {
            auto [e, b] = hubbard_ground_state(1.0, 0.0, n);
            CHECK(e == Catch::Approx(-0.5 * n).epsilon(1e-12));
            const AmplitudeVector bec = binomial_state(n, std::numbers::pi / 4.0, 0.0);
            const Complex overlap = bec.b.dot(b);
            CHECK(std::abs(overlap) > 0.999999);
        }
    }

    SECTION("pure interaction gives the balanced fragmented state") {
        const int n = 8;
        auto [e, b] = hubbard_ground_state(0.0, 1.0, n);
        CHECK(e == Catch::Approx(0.25 * n * (n - 2.0)).epsilon(1e-12));
        CHECK(std::abs(b[n / 2]) == Catch::Approx(1.0));
    }

    SECTION("deep Josephson regime") {
        const int n = 8;
        auto [e, b] = hubbard_ground_state(1e4, 1.0, n);
        const AmplitudeVector bec = binomial_state(n, std::numbers::pi / 4.0, 0.0);
        CHECK(std::abs(bec.b.dot(b)) >= 0.999);
        (void)e;
    }

    SECTION("ground energy is non-increasing in J at fixed U") {
        double prev = std::numeric_limits<double>::infinity();
        for (double j = 0.0; j <= 5.0; j += 0.5) {
            const double e = hubbard_ground_state(j, 1.0, 6).first;
            CHECK(e <= prev + 1e-12);
            prev = e;
        }
    }

    CHECK_THROWS_AS(hubbard_ground_state(1.0, 1.0, 5), IndexError);
}

TEST_CASE("single particle modes in the three trap regimes") {
    const Grid grid = Grid::line(512, 16.0);

    SECTION("single well spectrum") {
        const TrapSpec spec = single_well();
        const EigenModes m = single_particle_modes(spec, grid, 0.0, 4);
        CHECK(m.energies[0] == Catch::Approx(0.5).margin(2e-4));
        CHECK(m.energies[1] == Catch::Approx(1.5).margin(2e-4));
        // eigenpairs mutually orthogonal
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < i; ++j)
                CHECK(std::abs(grid.inner(m.modes[i], m.modes[j])) < 1e-10);
    }

    SECTION("symmetric double well: even ground, odd first excited") {
        TrapSpec spec = single_well();
        spec.barrier_height = Schedule::constant(8.0);
        const EigenModes m = single_particle_modes(spec, grid, 0.5, 2);
        Field g_rev(grid.nz), e_rev(grid.nz);
        for (int i = 0; i < grid.nz; ++i) {
            g_rev[i] = m.modes[0][grid.nz - 1 - i];
            e_rev[i] = m.modes[1][grid.nz - 1 - i];
        }
        CHECK((m.modes[0] - g_rev).norm() * std::sqrt(grid.dz) < 1e-8);
        CHECK((m.modes[1] + e_rev).norm() * std::sqrt(grid.dz) < 1e-8);
    }

    SECTION("large tilt localizes both lowest modes") {
        TrapSpec spec = single_well();
        spec.barrier_height = Schedule::constant(10.0);
        spec.tilt = Schedule::constant(0.5);
        const EigenModes m = single_particle_modes(spec, grid, 0.5, 2);
        for (int mode = 0; mode < 2; ++mode) {
            double left = 0.0, right = 0.0;
            for (int i = 0; i < grid.nz; ++i) {
                const double p = std::norm(m.modes[mode][i]) * grid.dz;
                (grid.z(i) < 0.0 ? left : right) += p;
            }
            CHECK(std::max(left, right) >= 0.95);
        }
    }

    SECTION("small 3d grid agrees with the isotropic oscillator ground energy") {
        TrapSpec spec = single_well();
        spec.omega_perp = 1.0;
        const Grid box = Grid::box(8, 8, 24, 6.0, 6.0, 10.0);
        const EigenModes m = single_particle_modes(spec, box, 0.0, 1);
        CHECK(m.energies[0] == Catch::Approx(1.5).margin(0.15));
    }
}
