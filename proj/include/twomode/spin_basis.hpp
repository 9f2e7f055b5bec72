#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "twomode/errors.hpp"

namespace twomode {

// Fragmentation basis |k>, k = -N/2..+N/2, ordered k ascending. State |k>
// holds N/2-k bosons in mode 1 and N/2+k in mode 2; dimension is N+1.
struct FragBasis {
    explicit FragBasis(int boson_count) : n(boson_count) {
        if (n <= 0 || n % 2 != 0) throw IndexError("boson count must be even and positive");
    }

    int n;
    int dim() const { return n + 1; }
    int half() const { return n / 2; }
    int k_of_index(int i) const { return i - half(); }
    int index_of_k(int k) const { return k + half(); }
    bool contains(int k) const { return k >= -half() && k <= half(); }
};

namespace detail {
inline void check_mode(int i) {
    if (i != 1 && i != 2) throw IndexError("mode index must be 1 or 2");
}
inline void check_frag(int k, int n) {
    if (2 * std::abs(k) > n) throw IndexError("fragmentation index out of range");
}
}  // namespace detail

// Closed-form <k|c_i^dag c_j|l>. Values are square roots of integers;
// nonzero entries sit on the band |k-l| <= 1.
inline double x_coeff(int i, int j, int k, int l, int n) {
    detail::check_mode(i);
    detail::check_mode(j);
    detail::check_frag(k, n);
    detail::check_frag(l, n);
    const double h = 0.5 * n;
    if (i == 1 && j == 1) return k == l ? h - k : 0.0;
    if (i == 2 && j == 2) return k == l ? h + k : 0.0;
    if (i == 1 && j == 2) return k == l - 1 ? std::sqrt((h - k) * (h + l)) : 0.0;
    return l == k - 1 ? std::sqrt((h - l) * (h + k)) : 0.0;  // i == 2, j == 1
}

// Closed-form <k|c_i^dag c_j^dag c_m c_n|l>; band |k-l| <= 2.
inline double y_coeff(int i, int j, int m, int n_idx, int k, int l, int n) {
    detail::check_mode(i);
    detail::check_mode(j);
    detail::check_mode(m);
    detail::check_mode(n_idx);
    detail::check_frag(k, n);
    detail::check_frag(l, n);
    const double h = 0.5 * n;
    const int code = i * 1000 + j * 100 + m * 10 + n_idx;
    switch (code) {
        case 1111:
            return k == l ? (h - k) * (h - k - 1) : 0.0;
        case 2222:
            return k == l ? (h + k) * (h + k - 1) : 0.0;
        case 1212:
        case 1221:
        case 2112:
        case 2121:
            return k == l ? (h - k) * (h + k) : 0.0;
        case 1112:
        case 1121:
            return k == l - 1 ? (h - l) * std::sqrt((h - k) * (h + l)) : 0.0;
        case 1222:
        case 2122:
            return k == l - 1 ? (h + k) * std::sqrt((h - k) * (h + l)) : 0.0;
        case 1211:
        case 2111:
            return l == k - 1 ? (h - k) * std::sqrt((h - l) * (h + k)) : 0.0;
        case 2212:
        case 2221:
            return l == k - 1 ? (h + l) * std::sqrt((h - l) * (h + k)) : 0.0;
        case 1122:
            return k == l - 2 ? std::sqrt((h - l + 1) * (h - k) * (h + l) * (h + k + 1)) : 0.0;
        case 2211:
            return l == k - 2 ? std::sqrt((h - k + 1) * (h - l) * (h + k) * (h + l + 1)) : 0.0;
        default:
            throw IndexError("unreachable mode combination");
    }
}

// Spin-(N/2) operator matrices on the fragmentation basis, built from the
// ladder coefficients {j(j+1) - k(k+-1)}^(1/2).
struct SpinMatrices {
    Eigen::MatrixXcd sx, sy, sz, splus, sminus;
};

inline SpinMatrices spin_matrices(int n) {
    FragBasis basis(n);
    const int d = basis.dim();
    const double j = 0.5 * n;
    SpinMatrices s;
    s.splus = Eigen::MatrixXcd::Zero(d, d);
    s.sminus = Eigen::MatrixXcd::Zero(d, d);
    s.sz = Eigen::MatrixXcd::Zero(d, d);
    for (int idx = 0; idx < d; ++idx) {
        const int k = basis.k_of_index(idx);
        s.sz(idx, idx) = double(k);
        if (idx + 1 < d) s.splus(idx + 1, idx) = std::sqrt(j * (j + 1) - double(k) * (k + 1));
        if (idx > 0) s.sminus(idx - 1, idx) = std::sqrt(j * (j + 1) - double(k) * (k - 1));
    }
    const std::complex<double> im(0.0, 1.0);
    s.sx = 0.5 * (s.splus + s.sminus);
    s.sy = (s.splus - s.sminus) / (2.0 * im);
    return s;
}

// Brute-force number-basis representation of the two-mode operators, used to
// validate the closed forms above. Sector matrices keep entries as square
// roots of integers so no factorials appear; capacity-capped.
class FockOracle {
  public:
    static constexpr int default_cap = 64;

    explicit FockOracle(int boson_count, int cap = default_cap) : basis_(boson_count) {
        if (boson_count > cap) throw CapacityError("fock oracle capacity exceeded");
    }

    const FragBasis& basis() const { return basis_; }

    // c_i as a map from the M-boson sector to the (M-1)-boson sector. Sector
    // states are ordered by ascending mode-2 occupancy, matching ascending k.
    static Eigen::MatrixXd annihilation(int i, int sector) {
        detail::check_mode(i);
        if (sector < 1) throw IndexError("annihilation needs a populated sector");
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(sector, sector + 1);
        for (int n2 = 0; n2 <= sector; ++n2) {
            const int n1 = sector - n2;
            if (i == 1 && n1 > 0) a(n2, n2) = std::sqrt(double(n1));
            if (i == 2 && n2 > 0) a(n2 - 1, n2) = std::sqrt(double(n2));
        }
        return a;
    }

    // <k|c_i^dag c_j|l> on the fixed-N subspace.
    Eigen::MatrixXd one_body(int i, int j) const {
        const int n = basis_.n;
        return annihilation(i, n).transpose() * annihilation(j, n);
    }

    // <k|c_i^dag c_j^dag c_m c_n|l> on the fixed-N subspace.
    Eigen::MatrixXd two_body(int i, int j, int m, int n_idx) const {
        const int n = basis_.n;
        if (n < 2) return Eigen::MatrixXd::Zero(basis_.dim(), basis_.dim());
        return annihilation(i, n).transpose() * annihilation(j, n - 1).transpose() *
               annihilation(m, n - 1) * annihilation(n_idx, n);
    }

    // [c_i, c_j^dag] restricted to the fixed-N subspace.
    Eigen::MatrixXd commutator(int i, int j) const {
        const int n = basis_.n;
        return annihilation(i, n + 1) * annihilation(j, n + 1).transpose() -
               annihilation(j, n).transpose() * annihilation(i, n);
    }

    Eigen::MatrixXd number_operator() const { return one_body(1, 1) + one_body(2, 2); }

    SpinMatrices spin_from_operators() const {
        SpinMatrices s;
        const Eigen::MatrixXd c21 = one_body(2, 1);
        const Eigen::MatrixXd c12 = one_body(1, 2);
        const std::complex<double> im(0.0, 1.0);
        s.sx = 0.5 * (c21 + c12).cast<std::complex<double>>();
        s.sy = ((c21 - c12).cast<std::complex<double>>()) / (2.0 * im);
        s.sz = 0.5 * (one_body(2, 2) - one_body(1, 1)).cast<std::complex<double>>();
        s.splus = s.sx + im * s.sy;
        s.sminus = s.sx - im * s.sy;
        return s;
    }

  private:
    FragBasis basis_;
};

inline FockOracle build_fock_oracle(int boson_count, int cap = FockOracle::default_cap) {
    return FockOracle(boson_count, cap);
}

}  // namespace twomode
