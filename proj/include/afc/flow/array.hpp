#pragma once

#include <cstddef>
#include <vector>

namespace afc::flow {

/// Dense 3D array with a ghost layer of configurable width per axis.
/// Logical indices run from -ghost to extent-1+ghost; x is the fastest axis.
class Array3 {
public:
    Array3() = default;
    Array3(int ni, int nj, int nk, int gi, int gj, int gk, double fill = 0.0)
        : ni_(ni), nj_(nj), nk_(nk), gi_(gi), gj_(gj), gk_(gk),
          si_(ni + 2 * gi), sj_(static_cast<std::ptrdiff_t>(si_) * (nj + 2 * gj)),
          data_(static_cast<std::size_t>(sj_) * (nk + 2 * gk), fill) {}

    double& operator()(int i, int j, int k = 0) { return data_[index(i, j, k)]; }
    double operator()(int i, int j, int k = 0) const { return data_[index(i, j, k)]; }

    double* ptr(int i, int j, int k = 0) { return data_.data() + index(i, j, k); }
    const double* ptr(int i, int j, int k = 0) const { return data_.data() + index(i, j, k); }

    std::ptrdiff_t index(int i, int j, int k) const {
        return (i + gi_) + (j + gj_) * static_cast<std::ptrdiff_t>(si_) + (k + gk_) * sj_;
    }

    int ni() const { return ni_; }
    int nj() const { return nj_; }
    int nk() const { return nk_; }
    int ghost_i() const { return gi_; }
    int ghost_j() const { return gj_; }
    int ghost_k() const { return gk_; }
    std::ptrdiff_t stride_j() const { return si_; }
    std::ptrdiff_t stride_k() const { return sj_; }

    std::vector<double>& raw() { return data_; }
    const std::vector<double>& raw() const { return data_; }

    void fill(double value) { data_.assign(data_.size(), value); }
    bool same_shape(const Array3& o) const {
        return ni_ == o.ni_ && nj_ == o.nj_ && nk_ == o.nk_ && gi_ == o.gi_ && gj_ == o.gj_ &&
               gk_ == o.gk_;
    }
    bool operator==(const Array3& o) const { return same_shape(o) && data_ == o.data_; }

private:
    int ni_ = 0, nj_ = 0, nk_ = 0;
    int gi_ = 0, gj_ = 0, gk_ = 0;
    int si_ = 0;
    std::ptrdiff_t sj_ = 0;
    std::vector<double> data_;
};

}  // namespace afc::flow
