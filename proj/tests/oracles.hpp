// Test-only oracles. Independent of the library's elimination code paths.
#ifndef TPFLAG_TESTS_ORACLES_HPP
#define TPFLAG_TESTS_ORACLES_HPP

#include <algorithm>
#include <numeric>
#include <vector>

#include <tpflag/matrix.hpp>
#include <tpflag/random.hpp>
#include <tpflag/totpos.hpp>

namespace tpflag::oracle {

/// Leibniz formula: sum over permutations with explicit sign counting.
template <typename T>
T permutation_sum_det(const Matrix<T>& m) {
    const std::size_t n = m.rows();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    T total(0);
    do {
        std::size_t inversions = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (perm[i] > perm[j]) ++inversions;
        T term(inversions % 2 ? -1 : 1);
        for (std::size_t i = 0; i < n; ++i) term *= m(i, perm[i]);
        total += term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

/// Laplace expansion along the first row.
template <typename T>
T cofactor_det(const Matrix<T>& m) {
    const std::size_t n = m.rows();
    if (n == 1) return m(0, 0);
    T total(0);
    for (std::size_t c = 0; c < n; ++c) {
        Matrix<T> sub(n - 1, n - 1);
        for (std::size_t i = 1; i < n; ++i)
            for (std::size_t j = 0, jj = 0; j < n; ++j)
                if (j != c) sub(i - 1, jj++) = m(i, j);
        const T term = m(0, c) * cofactor_det(sub);
        if (c % 2) {
            total -= term;
        } else {
            total += term;
        }
    }
    return total;
}

template <typename T>
T oracle_minor(const Matrix<T>& m, const IndexSet& rows, const IndexSet& cols) {
    return permutation_sum_det(submatrix(m, rows, cols));
}

/// Signed small rational in [-4, 4].
inline Rational signed_rational(Rng& rng) {
    Rational r(static_cast<long>(rng.uniform_int(-24, 24)), static_cast<unsigned long>(rng.uniform_int(1, 6)));
    r.canonicalize();
    return r;
}

/// Random element of SL_n(Q): a product of elementary matrices with signed
/// parameters, a det-1 diagonal, and a final shuffle of factors.
inline RationalMatrix random_sl(std::size_t n, Rng& rng) {
    RationalMatrix g = RationalMatrix::identity(n);
    for (int step = 0; step < 3 * static_cast<int>(n); ++step) {
        const int i = static_cast<int>(rng.uniform_int(1, static_cast<std::int64_t>(n) - 1));
        const Triangle which = rng.uniform_int(0, 1) ? Triangle::Lower : Triangle::Upper;
        g = g * elementary(n, i, signed_rational(rng), which);
    }
    std::vector<Rational> diag(n, Rational(1));
    Rational prod(1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        diag[i] = sample_positive_rational(rng);
        if (rng.uniform_int(0, 1)) diag[i] = -diag[i];
        prod *= diag[i];
    }
    diag[n - 1] = 1 / prod;
    return g * RationalMatrix::diagonal(diag);
}

}  // namespace tpflag::oracle

#endif  // TPFLAG_TESTS_ORACLES_HPP
