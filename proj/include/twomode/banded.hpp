#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <vector>

#include "twomode/errors.hpp"

namespace twomode {

// Complex banded matrix with every diagonal in -bandwidth..+bandwidth stored
// independently; matrix-vector products cost O(dim * bandwidth).
class BandedMatrix {
  public:
    BandedMatrix() = default;
    BandedMatrix(int dim, int bandwidth) : dim_(dim), bw_(bandwidth) {
        if (dim < 1 || bandwidth < 0 || bandwidth >= dim)
            throw ShapeError("banded matrix needs 0 <= bandwidth < dim");
        diags_.resize(2 * bw_ + 1);
        for (int off = -bw_; off <= bw_; ++off)
            diags_[bw_ + off] = Eigen::VectorXcd::Zero(dim_ - std::abs(off));
    }

    int dim() const { return dim_; }
    int bandwidth() const { return bw_; }

    std::complex<double>& at(int r, int c) {
        check(r, c);
        return diags_[bw_ + (c - r)][std::min(r, c)];
    }

    std::complex<double> get(int r, int c) const {
        if (r < 0 || c < 0 || r >= dim_ || c >= dim_) throw IndexError("banded index out of range");
        if (std::abs(r - c) > bw_) return {0.0, 0.0};
        return diags_[bw_ + (c - r)][std::min(r, c)];
    }

    Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const {
        if (v.size() != dim_) throw ShapeError("banded apply: size mismatch");
        Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim_);
        for (int off = -bw_; off <= bw_; ++off) {
            const auto& diag = diags_[bw_ + off];
            const int r0 = std::max(0, -off);
            for (int i = 0; i < diag.size(); ++i) out[r0 + i] += diag[i] * v[r0 + i + off];
        }
        return out;
    }

    Eigen::MatrixXcd dense() const {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim_, dim_);
        for (int r = 0; r < dim_; ++r)
            for (int c = std::max(0, r - bw_); c <= std::min(dim_ - 1, r + bw_); ++c)
                m(r, c) = get(r, c);
        return m;
    }

    double hermiticity_defect() const {
        double worst = 0.0;
        for (int r = 0; r < dim_; ++r)
            for (int c = std::max(0, r - bw_); c <= std::min(dim_ - 1, r + bw_); ++c)
                worst = std::max(worst, std::abs(get(r, c) - std::conj(get(c, r))));
        return worst;
    }

    BandedMatrix& operator*=(std::complex<double> s) {
        for (auto& d : diags_) d *= s;
        return *this;
    }

    BandedMatrix& operator+=(const BandedMatrix& other) {
        if (other.dim_ != dim_ || other.bw_ != bw_) throw ShapeError("banded +=: shape mismatch");
        for (size_t i = 0; i < diags_.size(); ++i) diags_[i] += other.diags_[i];
        return *this;
    }

    // (1-s)*a + s*b, used to sample matrices between solved time points.
    static BandedMatrix interpolate(const BandedMatrix& a, const BandedMatrix& b, double s) {
        if (a.dim_ != b.dim_ || a.bw_ != b.bw_) throw ShapeError("banded interpolate: shape mismatch");
        BandedMatrix out = a;
        for (size_t i = 0; i < out.diags_.size(); ++i)
            out.diags_[i] = (1.0 - s) * a.diags_[i] + s * b.diags_[i];
        return out;
    }

  private:
    void check(int r, int c) const {
        if (r < 0 || c < 0 || r >= dim_ || c >= dim_ || std::abs(r - c) > bw_)
            throw IndexError("banded index out of range or outside band");
    }

    int dim_ = 0;
    int bw_ = 0;
    std::vector<Eigen::VectorXcd> diags_;
};

}  // namespace twomode
