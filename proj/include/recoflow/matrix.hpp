#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "recoflow/errors.hpp"

namespace recoflow {

/// Dense row-major matrix of doubles.  Everything in this library is at desk
/// scale (no dimension above a few thousand), so no sparsity or BLAS.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }

    bool operator==(const Matrix& other) const = default;

    Matrix& operator+=(const Matrix& other) {
        if (rows_ != other.rows_ || cols_ != other.cols_)
            throw DimensionError("Matrix::operator+=: shape mismatch");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
        return *this;
    }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    std::vector<double> apply(const std::vector<double>& v) const {
        if (v.size() != cols_)
            throw DimensionError("Matrix::apply: vector length mismatch");
        std::vector<double> out(rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j) * v[j];
            out[i] = s;
        }
        return out;
    }

    std::vector<double> apply_transpose(const std::vector<double>& v) const {
        if (v.size() != rows_)
            throw DimensionError("Matrix::apply_transpose: vector length mismatch");
        std::vector<double> out(cols_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out[j] += (*this)(i, j) * v[i];
        return out;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    /// Largest |a_ij - a_ji| over all pairs; 0 for a symmetric square matrix.
    double max_asymmetry() const {
        if (rows_ != cols_)
            throw DimensionError("Matrix::max_asymmetry: matrix not square");
        double m = 0.0;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = i + 1; j < cols_; ++j)
                m = std::max(m, std::abs((*this)(i, j) - (*this)(j, i)));
        return m;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

/// Eigenvalues of a symmetric matrix via the cyclic Jacobi rotation method.
/// Input asymmetry beyond sym_tol raises SymmetryError.  Returned values are
/// sorted ascending.
inline std::vector<double> jacobi_eigenvalues(const Matrix& input, double sym_tol = 1e-12,
                                              int max_sweeps = 64) {
    if (input.rows() != input.cols())
        throw DimensionError("jacobi_eigenvalues: matrix not square");
    if (input.max_asymmetry() > sym_tol)
        throw SymmetryError("jacobi_eigenvalues: asymmetry " +
                            std::to_string(input.max_asymmetry()) + " beyond tolerance");
    std::size_t n = input.rows();
    Matrix a = input;
    // symmetrize exactly so rotations preserve symmetry bit-for-bit
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double v = 0.5 * (a(i, j) + a(j, i));
            a(i, j) = v;
            a(j, i) = v;
        }
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off < 1e-30 * std::max(1.0, a.max_abs() * a.max_abs())) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = a(p, q);
                if (apq == 0.0) continue;
                double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                double tau = s / (1.0 + c);
                double app = a(p, p), aqq = a(q, q);
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    double arp = a(r, p), arq = a(r, q);
                    a(r, p) = arp - s * (arq + tau * arp);
                    a(p, r) = a(r, p);
                    a(r, q) = arq + s * (arp - tau * arq);
                    a(q, r) = a(r, q);
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

/// Exact rank of an integer matrix by fraction-free Bareiss elimination.
/// Intermediate products use 128-bit arithmetic; entries must stay within
/// what that supports (ample for the small fixtures handled here).
inline int integer_matrix_rank(std::vector<std::vector<long long>> m) {
    if (m.empty()) return 0;
    std::size_t rows = m.size(), cols = m[0].size();
    for (const auto& row : m)
        if (row.size() != cols)
            throw DimensionError("integer_matrix_rank: ragged matrix");
    std::vector<std::vector<__int128>> a(rows, std::vector<__int128>(cols));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) a[i][j] = m[i][j];
    __int128 prev = 1;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols && rank < rows; ++col) {
        std::size_t pivot = rank;
        while (pivot < rows && a[pivot][col] == 0) ++pivot;
        if (pivot == rows) continue;
        std::swap(a[rank], a[pivot]);
        for (std::size_t i = rank + 1; i < rows; ++i) {
            for (std::size_t j = col + 1; j < cols; ++j)
                a[i][j] = (a[rank][col] * a[i][j] - a[i][col] * a[rank][j]) / prev;
            a[i][col] = 0;
        }
        prev = a[rank][col];
        ++rank;
    }
    return static_cast<int>(rank);
}

/// Exact product of integer matrices (for powers of small generators).
inline std::vector<std::vector<long long>> integer_matrix_product(
    const std::vector<std::vector<long long>>& x, const std::vector<std::vector<long long>>& y) {
    if (x.empty() || y.empty() || x[0].size() != y.size())
        throw DimensionError("integer_matrix_product: shape mismatch");
    std::size_t rows = x.size(), inner = y.size(), cols = y[0].size();
    std::vector<std::vector<long long>> out(rows, std::vector<long long>(cols, 0));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t k = 0; k < inner; ++k)
            for (std::size_t j = 0; j < cols; ++j) out[i][j] += x[i][k] * y[k][j];
    return out;
}

} // namespace recoflow
