#ifndef TPFLAG_GAUSS_HPP
#define TPFLAG_GAUSS_HPP

#include <cstddef>
#include <string>

#include "errors.hpp"
#include "matrix.hpp"

namespace tpflag {

/// g = upper * torus * lower with unit upper triangular `upper`, diagonal
/// `torus` and unit lower triangular `lower`.
template <typename T>
struct GaussFactors {
    Matrix<T> upper;
    Matrix<T> torus;
    Matrix<T> lower;
};

/// Factors g = u+ t u- by peeling rank-one terms off the bottom-right corner.
/// The k-th pivot is the ratio of the trailing principal minors on
/// {k..n-1} and {k+1..n-1}, so a vanishing trailing minor is exactly the
/// failure case.
///
/// Throws DecompositionUnavailable when a pivot is zero and DomainError when
/// det(g) != 1 (the torus factor must lie in SL_n).
template <typename T>
GaussFactors<T> gauss_decompose(const Matrix<T>& g) {
    if (!g.square() || g.rows() == 0) throw std::invalid_argument("gauss_decompose: matrix must be square");
    const std::size_t n = g.rows();
    if constexpr (is_exact_v<T>) {
        if (determinant(g) != 1) throw DomainError("gauss_decompose: determinant is not 1");
    }
    Matrix<T> work = g;
    GaussFactors<T> f{Matrix<T>::identity(n), Matrix<T>(n, n), Matrix<T>::identity(n)};
    for (std::size_t step = 0; step < n; ++step) {
        const std::size_t k = n - 1 - step;
        const T pivot = work(k, k);
        if (pivot == 0) {
            throw DecompositionUnavailable("trailing principal minor on rows/cols " + std::to_string(k + 1) + ".." +
                                           std::to_string(n) + " vanishes");
        }
        f.torus(k, k) = pivot;
        for (std::size_t j = 0; j < k; ++j) f.lower(k, j) = work(k, j) / pivot;
        for (std::size_t i = 0; i < k; ++i) f.upper(i, k) = work(i, k) / pivot;
        for (std::size_t i = 0; i < k; ++i) {
            if (work(i, k) == 0) continue;
            for (std::size_t j = 0; j < k; ++j) work(i, j) -= f.upper(i, k) * work(k, j);
        }
    }
    return f;
}

/// Float LDU factorization m = lower * diag * upper (leading principal
/// minors must not vanish). Used on eigenvector matrices.
template <typename T>
GaussFactors<T> ldu_decompose(const Matrix<T>& m, double pivot_floor = 0.0) {
    const std::size_t n = m.rows();
    Matrix<T> work = m;
    GaussFactors<T> f{Matrix<T>::identity(n), Matrix<T>(n, n), Matrix<T>::identity(n)};
    for (std::size_t k = 0; k < n; ++k) {
        const T pivot = work(k, k);
        if (pivot == 0 || std::abs(to_double(pivot)) <= pivot_floor) {
            throw DecompositionUnavailable("leading principal minor of order " + std::to_string(k + 1) + " vanishes");
        }
        f.torus(k, k) = pivot;
        for (std::size_t i = k + 1; i < n; ++i) f.lower(i, k) = work(i, k) / pivot;
        for (std::size_t j = k + 1; j < n; ++j) f.upper(k, j) = work(k, j) / pivot;
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) work(i, j) -= f.lower(i, k) * work(k, j);
    }
    return f;
}

/// The j-th exterior power: the C(n,j) x C(n,j) matrix of j x j minors,
/// rows and columns indexed by j-subsets in colexicographic order.
/// `j` is the 1-based weight index, 1 <= j <= n-1.
template <typename T>
Matrix<T> exterior_power(const Matrix<T>& m, std::size_t j) {
    if (!m.square()) throw std::invalid_argument("exterior_power: matrix must be square");
    const std::size_t n = m.rows();
    if (j < 1 || j + 1 > n) throw std::out_of_range("exterior_power: weight index out of range");
    const auto sets = subsets_colex(n, j);
    Matrix<T> out(sets.size(), sets.size());
    for (std::size_t r = 0; r < sets.size(); ++r)
        for (std::size_t c = 0; c < sets.size(); ++c) out(r, c) = minor(m, sets[r], sets[c]);
    return out;
}

}  // namespace tpflag

#endif  // TPFLAG_GAUSS_HPP
