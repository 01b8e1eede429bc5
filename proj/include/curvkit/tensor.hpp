#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace curvkit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Dense rank-3 array of size n^3, indexed T(i, j, k).
// Christoffel symbols use T(i, j, k) = Γ^i_{jk}; metric derivatives use
// T(k, i, j) = ∂_k g_{ij}.
class Tensor3 {
public:
    Tensor3() = default;
    explicit Tensor3(int n) : n_(n), data_(static_cast<std::size_t>(n) * n * n, 0.0) {}

    int dim() const { return n_; }

    double& operator()(int i, int j, int k) { return data_[index(i, j, k)]; }
    double operator()(int i, int j, int k) const { return data_[index(i, j, k)]; }

    double max_abs() const;
    Tensor3& operator+=(const Tensor3& other);
    Tensor3& operator*=(double s);

private:
    std::size_t index(int i, int j, int k) const
    {
        return (static_cast<std::size_t>(i) * n_ + j) * n_ + k;
    }

    int n_ = 0;
    std::vector<double> data_;
};

// Dense rank-4 array, indexed R(i, j, k, l) = R^i_{jkl}.
class Tensor4 {
public:
    Tensor4() = default;
    explicit Tensor4(int n)
        : n_(n), data_(static_cast<std::size_t>(n) * n * n * n, 0.0)
    {
    }

    int dim() const { return n_; }

    double& operator()(int i, int j, int k, int l) { return data_[index(i, j, k, l)]; }
    double operator()(int i, int j, int k, int l) const { return data_[index(i, j, k, l)]; }

    double max_abs() const;

private:
    std::size_t index(int i, int j, int k, int l) const
    {
        return ((static_cast<std::size_t>(i) * n_ + j) * n_ + k) * n_ + l;
    }

    int n_ = 0;
    std::vector<double> data_;
};

inline double Tensor3::max_abs() const
{
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

inline Tensor3& Tensor3::operator+=(const Tensor3& other)
{
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

inline Tensor3& Tensor3::operator*=(double s)
{
    for (double& v : data_) v *= s;
    return *this;
}

inline double Tensor4::max_abs() const
{
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace curvkit
