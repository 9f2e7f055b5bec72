#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "twomode/spin_basis.hpp"

using namespace twomode;

TEST_CASE("x_coeff matches the tabulated closed forms") {
    CHECK(x_coeff(1, 1, -2, -2, 4) == Catch::Approx(4.0));
    CHECK(x_coeff(1, 1, 0, 1, 4) == 0.0);
    CHECK(x_coeff(1, 2, -1, 0, 4) == Catch::Approx(std::sqrt(6.0)));
    CHECK(x_coeff(2, 2, 2, 2, 4) == Catch::Approx(4.0));
}

TEST_CASE("y_coeff matches the tabulated closed forms") {
    CHECK(y_coeff(1, 1, 1, 1, -2, -2, 4) == Catch::Approx(12.0));
    CHECK(y_coeff(1, 1, 2, 2, -2, 0, 4) == Catch::Approx(std::sqrt(24.0)));
    CHECK(y_coeff(1, 2, 1, 2, 1, 1, 4) == Catch::Approx(3.0));
    CHECK(y_coeff(2, 2, 1, 1, 0, -2, 4) == Catch::Approx(std::sqrt(24.0)));
}

TEST_CASE("coefficients reject out-of-range indices") {
    CHECK_THROWS_AS(x_coeff(3, 1, 0, 0, 4), IndexError);
    CHECK_THROWS_AS(x_coeff(1, 1, 3, 0, 4), IndexError);
    CHECK_THROWS_AS(y_coeff(1, 1, 1, 0, 0, 0, 4), IndexError);
    CHECK_THROWS_AS(y_coeff(1, 1, 1, 1, -3, 0, 4), IndexError);
    CHECK_THROWS_AS(FragBasis(5), IndexError);
    CHECK_THROWS_AS(FragBasis(-2), IndexError);
}

TEST_CASE("every coefficient equals the brute-force Fock matrix element") {
    for (int n : {2, 4, 6, 8}) {
        FockOracle oracle(n);
        FragBasis basis(n);
        for (int i = 1; i <= 2; ++i)
            for (int j = 1; j <= 2; ++j) {
                const Eigen::MatrixXd ref = oracle.one_body(i, j);
                for (int r = 0; r < basis.dim(); ++r)
                    for (int c = 0; c < basis.dim(); ++c) {
                        const double closed =
                            x_coeff(i, j, basis.k_of_index(r), basis.k_of_index(c), n);
                        REQUIRE(std::abs(closed - ref(r, c)) < 1e-12);
                    }
            }
        for (int i = 1; i <= 2; ++i)
            for (int j = 1; j <= 2; ++j)
                for (int m = 1; m <= 2; ++m)
                    for (int q = 1; q <= 2; ++q) {
                        const Eigen::MatrixXd ref = oracle.two_body(i, j, m, q);
                        for (int r = 0; r < basis.dim(); ++r)
                            for (int c = 0; c < basis.dim(); ++c) {
                                const double closed = y_coeff(i, j, m, q, basis.k_of_index(r),
                                                              basis.k_of_index(c), n);
                                REQUIRE(std::abs(closed - ref(r, c)) < 1e-12);
                            }
                    }
    }
}

TEST_CASE("coefficient symmetries and sum rules") {
    for (int n : {2, 4, 6, 8}) {
        FragBasis basis(n);
        for (int r = 0; r < basis.dim(); ++r) {
            const int k = basis.k_of_index(r);
            CHECK(x_coeff(1, 1, k, k, n) + x_coeff(2, 2, k, k, n) == Catch::Approx(double(n)));
            for (int c = 0; c < basis.dim(); ++c) {
                const int l = basis.k_of_index(c);
                for (int i = 1; i <= 2; ++i)
                    for (int j = 1; j <= 2; ++j) {
                        CHECK(x_coeff(i, j, k, l, n) == Catch::Approx(x_coeff(j, i, l, k, n)));
                        if (std::abs(k - l) > 1) CHECK(x_coeff(i, j, k, l, n) == 0.0);
                        for (int m = 1; m <= 2; ++m)
                            for (int q = 1; q <= 2; ++q) {
                                CHECK(y_coeff(i, j, m, q, k, l, n) ==
                                      Catch::Approx(y_coeff(m, q, i, j, l, k, n)));
                                if (std::abs(k - l) > 2) CHECK(y_coeff(i, j, m, q, k, l, n) == 0.0);
                            }
                    }
            }
        }
    }
}

TEST_CASE("fock oracle basics") {
    FockOracle tiny(2);
    CHECK(tiny.one_body(1, 1).rows() == 3);

    FockOracle oracle(4);
    const Eigen::MatrixXd sz2 = 0.5 * (oracle.one_body(2, 2) - oracle.one_body(1, 1));
    for (int r = 0; r < 5; ++r) CHECK(sz2(r, r) == Catch::Approx(double(r - 2)));

    // commutation on the fixed-N subspace
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j) {
            const Eigen::MatrixXd c = oracle.commutator(i, j);
            const Eigen::MatrixXd expect = i == j
                ? Eigen::MatrixXd(Eigen::MatrixXd::Identity(5, 5))
                : Eigen::MatrixXd(Eigen::MatrixXd::Zero(5, 5));
            CHECK((c - expect).cwiseAbs().maxCoeff() < 1e-12);
        }
    CHECK((oracle.number_operator() - 4.0 * Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() <
          1e-12);

    CHECK_THROWS_AS(FockOracle(66), CapacityError);
    CHECK_THROWS_AS(FockOracle(3), IndexError);
}

TEST_CASE("spin matrices satisfy the angular momentum algebra") {
    SECTION("ladder action and eigenvalues for N = 2") {
        const SpinMatrices s = spin_matrices(2);
        CHECK(s.sz(0, 0).real() == Catch::Approx(-1.0));
        CHECK(s.sz(1, 1).real() == Catch::Approx(0.0));
        CHECK(s.sz(2, 2).real() == Catch::Approx(1.0));
        // S+ |j=1, k=-1> = sqrt(2) |j=1, k=0>
        Eigen::VectorXcd down = Eigen::VectorXcd::Zero(3);
        down[0] = 1.0;
        const Eigen::VectorXcd raised = s.splus * down;
        CHECK(std::abs(raised[1] - std::sqrt(2.0)) < 1e-12);
        CHECK(std::abs(raised[0]) < 1e-12);
        CHECK(std::abs(raised[2]) < 1e-12);
    }

    for (int n : {2, 4, 6, 8}) {
        const SpinMatrices s = spin_matrices(n);
        const int d = n + 1;
        const Eigen::MatrixXcd comm = s.sx * s.sy - s.sy * s.sx - kImag * s.sz;
        CHECK(comm.cwiseAbs().maxCoeff() < 1e-12);
        const Eigen::MatrixXcd s2 = s.sx * s.sx + s.sy * s.sy + s.sz * s.sz;
        const double cas = 0.5 * n * (0.5 * n + 1.0);
        CHECK((s2 - cas * Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-12);

        // same operators out of the brute-force Fock construction
        const SpinMatrices f = FockOracle(n).spin_from_operators();
        CHECK((s.sx - f.sx).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((s.sy - f.sy).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((s.sz - f.sz).cwiseAbs().maxCoeff() < 1e-12);
    }

    // S^2 = 12 * identity for N = 6 built from the oracle operators
    const SpinMatrices f6 = FockOracle(6).spin_from_operators();
    const Eigen::MatrixXcd s2 = f6.sx * f6.sx + f6.sy * f6.sy + f6.sz * f6.sz;
    CHECK((s2 - 12.0 * Eigen::MatrixXcd::Identity(7, 7)).cwiseAbs().maxCoeff() < 1e-12);
}
