#pragma once

// Dense symmetric linear algebra for desk-scale relaxations.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace relq {

/// Row-major dense matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
    return acc;
}

inline Matrix multiply(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("multiply: shape mismatch");
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    return out;
}

inline Matrix transpose(const Matrix& a) {
    Matrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    return out;
}

/// Gram matrix of the rows of `vectors`.
inline Matrix gram_of_rows(const Matrix& vectors) {
    const std::size_t n = vectors.rows();
    Matrix g(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) g(i, j) = g(j, i) = dot(vectors.row(i), vectors.row(j));
    return g;
}

inline double frobenius_norm(const Matrix& a) {
    double acc = 0.0;
    for (double x : a.data()) acc += x * x;
    return std::sqrt(acc);
}

struct EigenDecomposition {
    std::vector<double> values;  ///< ascending
    Matrix vectors;              ///< column k is the eigenvector of values[k]
    int sweeps = 0;
};

/// Cyclic Jacobi eigensolver for symmetric matrices.
///
/// With `basis` (an orthogonal matrix, typically the eigenvectors of a nearby
/// matrix) the rotations start from basis^T * a * basis, which is already close
/// to diagonal and converges in a couple of sweeps.
inline EigenDecomposition jacobi_eigen(const Matrix& a, const Matrix* basis = nullptr,
                                       double tol = 1e-15, int max_sweeps = 60) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("jacobi_eigen: matrix must be square");
    Matrix m = a;
    Matrix v = Matrix::identity(n);
    if (basis != nullptr) {
        if (basis->rows() != n || basis->cols() != n)
            throw std::invalid_argument("jacobi_eigen: basis shape mismatch");
        m = multiply(transpose(*basis), multiply(a, *basis));
        v = *basis;
    }
    // symmetrize away round-off from the change of basis
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) m(i, j) = m(j, i) = 0.5 * (m(i, j) + m(j, i));

    const double scale = std::max(frobenius_norm(m), 1e-300);
    EigenDecomposition out;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += m(i, j) * m(i, j);
        if (std::sqrt(2.0 * off) <= tol * scale) break;
        out.sweeps = sweep + 1;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = m(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double mkp = m(k, p);
                    const double mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double mpk = m(p, k);
                    const double mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
                m(p, q) = m(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return m(x, x) < m(y, y); });
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = m(order[k], order[k]);
        for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
    }
    return out;
}

/// V * diag(max(values, 0)) * V^T.
inline Matrix reconstruct_clipped(const EigenDecomposition& eig) {
    const std::size_t n = eig.vectors.rows();
    Matrix out(n, n);
    for (std::size_t k = 0; k < eig.values.size(); ++k) {
        const double lambda = eig.values[k];
        if (lambda <= 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) {
            const double vi = lambda * eig.vectors(i, k);
            for (std::size_t j = 0; j < n; ++j) out(i, j) += vi * eig.vectors(j, k);
        }
    }
    return out;
}

/// Factors a PSD Gram matrix as rows of a matrix whose width is the numerical
/// rank. Eigenvalues at or below `rel_cutoff * max eigenvalue` are clipped.
inline Matrix factor_gram(const Matrix& gram, double rel_cutoff = 1e-13) {
    const EigenDecomposition eig = jacobi_eigen(gram);
    const double top = eig.values.empty() ? 0.0 : std::max(eig.values.back(), 0.0);
    std::vector<std::size_t> kept;
    for (std::size_t k = eig.values.size(); k-- > 0;)
        if (eig.values[k] > rel_cutoff * top && eig.values[k] > 0.0) kept.push_back(k);
    if (kept.empty()) kept.push_back(eig.values.size() - 1);
    Matrix out(gram.rows(), kept.size());
    for (std::size_t c = 0; c < kept.size(); ++c) {
        const double root = std::sqrt(std::max(eig.values[kept[c]], 0.0));
        for (std::size_t r = 0; r < gram.rows(); ++r) out(r, c) = root * eig.vectors(r, kept[c]);
    }
    return out;
}

}  // namespace relq
