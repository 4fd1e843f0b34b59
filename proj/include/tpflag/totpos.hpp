#ifndef TPFLAG_TOTPOS_HPP
#define TPFLAG_TOTPOS_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "gauss.hpp"
#include "matrix.hpp"
#include "random.hpp"
#include "weyl.hpp"

namespace tpflag {

/// Largest dimension for the brute-force all-minors membership tests.
inline constexpr std::size_t kMaxPositivityDimension = 6;

/// Coordinates on a cell U-(w) or U+(w): one parameter per letter of a
/// reduced word.
template <typename T>
struct LusztigParams {
    Word word;
    std::vector<T> params;

    friend bool operator==(const LusztigParams&, const LusztigParams&) = default;
};

/// x_i(a) = I + a E_{i,i+1} (upper) or y_i(a) = I + a E_{i+1,i} (lower).
template <typename T>
Matrix<T> elementary(std::size_t n, int i, const T& a, Triangle which) {
    Permutation::check_letter(n, i);
    Matrix<T> m = Matrix<T>::identity(n);
    const auto k = static_cast<std::size_t>(i - 1);
    if (which == Triangle::Lower) {
        m(k + 1, k) = a;
    } else {
        m(k, k + 1) = a;
    }
    return m;
}

/// Ordered product of elementary factors along the word.
template <typename T>
Matrix<T> evaluate_params(const LusztigParams<T>& p, Triangle which, std::size_t n) {
    if (p.word.size() != p.params.size()) throw std::invalid_argument("evaluate_params: word and params differ in length");
    Matrix<T> m = Matrix<T>::identity(n);
    for (std::size_t k = 0; k < p.word.size(); ++k) {
        Permutation::check_letter(n, p.word[k]);
        const auto c = static_cast<std::size_t>(p.word[k] - 1);
        // Right multiplication by y_c(a) adds a * column c+1 to column c;
        // by x_c(a) adds a * column c to column c+1.
        for (std::size_t r = 0; r < n; ++r) {
            if (which == Triangle::Lower) {
                m(r, c) += p.params[k] * m(r, c + 1);
            } else {
                m(r, c + 1) += p.params[k] * m(r, c);
            }
        }
    }
    return m;
}

namespace detail {

template <typename T>
std::vector<T> peel_lower(Matrix<T> u, const Word& word, double tolerance) {
    const std::size_t n = u.rows();
    std::vector<T> params(word.size());
    Permutation w = word_to_permutation(word, n);
    for (std::size_t pos = word.size(); pos-- > 0;) {
        const int i = word[pos];
        const int r = w(i);
        // Southwest region rows >= w(i), cols <= i loses one unit of rank
        // when s_i is stripped; the parameter is the ratio that kills it.
        IndexSet rows_hint;
        IndexSet cols_hint;
        for (int c = 1; c <= i; ++c) {
            if (w(c) >= r) {
                rows_hint.push_back(static_cast<std::size_t>(w(c) - 1));
                if (c < i) cols_hint.push_back(static_cast<std::size_t>(c - 1));
            }
        }
        std::sort(rows_hint.begin(), rows_hint.end());
        const std::size_t rank = rows_hint.size();
        const auto col_i = static_cast<std::size_t>(i - 1);

        auto with_col = [](IndexSet cols, std::size_t extra) {
            cols.push_back(extra);
            return cols;
        };

        // Exact arithmetic takes the Bruhat pivot minor when it is nonzero;
        // floats take the candidate of largest magnitude.
        std::optional<std::pair<T, T>> ratio;
        if constexpr (is_exact_v<T>) {
            const T hint_den = minor(u, rows_hint, with_col(cols_hint, col_i + 1));
            if (hint_den != 0) ratio.emplace(minor(u, rows_hint, with_col(cols_hint, col_i)), hint_den);
        }
        if (!ratio) {
            double best = 0.0;
            for (const auto& R : subsets_lex(n - static_cast<std::size_t>(r - 1), rank)) {
                IndexSet rows = R;
                for (auto& x : rows) x += static_cast<std::size_t>(r - 1);
                for (const auto& C : subsets_lex(col_i, rank - 1)) {
                    const T den = minor(u, rows, with_col(C, col_i + 1));
                    if (den == 0) continue;
                    const double mag = std::abs(to_double(den));
                    if (is_exact_v<T> || mag > best) {
                        best = mag;
                        ratio.emplace(minor(u, rows, with_col(C, col_i)), den);
                        if constexpr (is_exact_v<T>) break;
                    }
                }
                if (is_exact_v<T> && ratio) break;
            }
        }
        if (!ratio) {
            throw NotInCell("no nonvanishing pivot minor for letter " + std::to_string(i) + " at position " +
                            std::to_string(pos + 1));
        }
        const T p = ratio->first / ratio->second;
        if (!(p > 0)) {
            throw NotInCell("parameter " + std::to_string(pos + 1) + " (letter " + std::to_string(i) +
                            ") is not positive: " + std::to_string(to_double(p)));
        }
        params[pos] = p;
        for (std::size_t row = 0; row < n; ++row) u(row, col_i) -= p * u(row, col_i + 1);
        w = w * Permutation::simple_reflection(n, i);
    }
    const Matrix<T> id = Matrix<T>::identity(n);
    if constexpr (is_exact_v<T>) {
        if (u != id) throw NotInCell("matrix is not a product over the word (nonzero remainder)");
    } else {
        if (max_abs_diff(u, id) > tolerance) throw NotInCell("matrix is not a product over the word (remainder exceeds tolerance)");
    }
    return params;
}

}  // namespace detail

/// Inverse of evaluate_params for a given reduced word. Exact for
/// Rational; for doubles the remainder is checked against `tolerance`.
/// Throws NotInCell when the forced parameters are not all positive or the
/// matrix is not a product over the word.
template <typename T>
LusztigParams<T> extract_params(const Matrix<T>& u, const Word& word, Triangle which, double tolerance = 1e-9) {
    const std::size_t n = u.rows();
    if (!is_unit_triangular(u, which)) throw std::invalid_argument("extract_params: matrix is not unit triangular of the given sign");
    if (!is_reduced(word, n)) throw std::invalid_argument("extract_params: word is not reduced");
    if (which == Triangle::Lower) return {word, detail::peel_lower(u, word, tolerance)};
    Word reversed(word.rbegin(), word.rend());
    std::vector<T> params = detail::peel_lower(transpose(u), reversed, tolerance);
    std::reverse(params.begin(), params.end());
    return {word, std::move(params)};
}

/// extract_params on the canonical reduced word of w.
template <typename T>
LusztigParams<T> extract_params(const Matrix<T>& u, const Permutation& w, Triangle which, double tolerance = 1e-9) {
    return extract_params(u, reduced_word(w), which, tolerance);
}

/// A failed strict inequality: the minor on (rows, cols) of `factor` has sign `sign`.
struct MinorWitness {
    std::string factor;
    IndexSet rows;
    IndexSet cols;
    int sign = 0;

    /// 1-based description, e.g. "lower: minor rows {2,3} cols {1,2} is negative".
    std::string describe() const {
        auto set_text = [](const IndexSet& s) {
            std::string out = "{";
            for (std::size_t k = 0; k < s.size(); ++k) out += (k ? "," : "") + std::to_string(s[k] + 1);
            return out + "}";
        };
        const char* sign_text = sign > 0 ? "positive" : (sign < 0 ? "negative" : "zero");
        return factor + ": minor rows " + set_text(rows) + " cols " + set_text(cols) + " is " + sign_text;
    }
};

struct PositivityVerdict {
    bool member = false;
    std::optional<MinorWitness> witness;  // present iff !member

    static PositivityVerdict yes() { return {true, std::nullopt}; }
    static PositivityVerdict no(MinorWitness w) { return {false, std::move(w)}; }
};

struct MinorPair {
    IndexSet rows;
    IndexSet cols;
};

/// Combinatorial rule for unit lower triangular matrices: the minor on
/// rows r_1<..<r_k, cols c_1<..<c_k vanishes identically iff r_m < c_m
/// for some m. (For upper: swap the roles of rows and columns.)
inline bool minor_generically_nonzero(const IndexSet& rows, const IndexSet& cols, Triangle which) {
    for (std::size_t m = 0; m < rows.size(); ++m) {
        if (which == Triangle::Lower ? rows[m] < cols[m] : rows[m] > cols[m]) return false;
    }
    return true;
}

template <typename T>
LusztigParams<T> sample_positive(const Permutation& w, std::uint64_t seed, const Rational& scale = Rational(1));

/// Minors that are not identically zero on U-_{>0} (n <= 6), ordered by
/// size, then rows, then columns (lexicographic). A minor is classified as
/// identically zero iff it vanishes on three independent positive samples.
/// Computed once per n and shared read-only.
inline const std::vector<MinorPair>& nonvanishing_lower_minors(std::size_t n) {
    if (n < 1 || n > kMaxPositivityDimension) throw std::out_of_range("positivity tests support 1 <= n <= 6");
    static std::array<std::once_flag, kMaxPositivityDimension + 1> flags;
    static std::array<std::vector<MinorPair>, kMaxPositivityDimension + 1> tables;
    std::call_once(flags[n], [n] {
        const Permutation w0 = longest_element(n);
        std::array<RationalMatrix, 3> samples;
        for (std::uint64_t s = 0; s < samples.size(); ++s) {
            samples[s] = evaluate_params(sample_positive<Rational>(w0, derive_seed(0x7e57ab1e, s)), Triangle::Lower, n);
        }
        std::vector<MinorPair> pairs;
        for (std::size_t k = 1; k <= n; ++k) {
            const auto sets = subsets_lex(n, k);
            for (const auto& rows : sets) {
                for (const auto& cols : sets) {
                    bool vanishes = true;
                    for (const auto& sample : samples) {
                        if (minor(sample, rows, cols) != 0) {
                            vanishes = false;
                            break;
                        }
                    }
                    if (!vanishes) pairs.push_back({rows, cols});
                }
            }
        }
        tables[n] = std::move(pairs);
    });
    return tables[n];
}

/// Membership in U-_{>0} / U+_{>0}: every minor that is not identically zero
/// on the triangular group is strictly positive (brute force, n <= 6).
/// For doubles "positive" means "> margin".
template <typename T>
PositivityVerdict is_totally_positive_unitriangular(const Matrix<T>& u, Triangle which, double margin = 0.0) {
    if (!is_unit_triangular(u, which)) throw std::invalid_argument("positivity test: matrix is not unit triangular of the given sign");
    const std::size_t n = u.rows();
    const char* factor = which == Triangle::Lower ? "lower" : "upper";
    for (const auto& pair : nonvanishing_lower_minors(n)) {
        const IndexSet& rows = which == Triangle::Lower ? pair.rows : pair.cols;
        const IndexSet& cols = which == Triangle::Lower ? pair.cols : pair.rows;
        const T value = minor(u, rows, cols);
        bool ok;
        if constexpr (is_exact_v<T>) {
            ok = value > 0;
        } else {
            ok = value > margin;
        }
        if (!ok) return PositivityVerdict::no({factor, rows, cols, sign_of(value)});
    }
    return PositivityVerdict::yes();
}

/// Every minor of every size is strictly positive.
template <typename T>
PositivityVerdict all_minors_positive(const Matrix<T>& g, double margin = 0.0) {
    if (!g.square()) throw std::invalid_argument("all_minors_positive: matrix must be square");
    const std::size_t n = g.rows();
    for (std::size_t k = 1; k <= n; ++k) {
        const auto sets = subsets_lex(n, k);
        for (const auto& rows : sets) {
            for (const auto& cols : sets) {
                const T value = minor(g, rows, cols);
                bool ok;
                if constexpr (is_exact_v<T>) {
                    ok = value > 0;
                } else {
                    ok = value > margin;
                }
                if (!ok) return PositivityVerdict::no({"g", rows, cols, sign_of(value)});
            }
        }
    }
    return PositivityVerdict::yes();
}

/// Membership in G_{>0} = U+_{>0} T_{>0} U-_{>0} via the Gaussian
/// factorization, cross-checked against the all-minors criterion.
/// Throws DomainError when det(g) != 1 and std::logic_error if the two
/// criteria ever disagree.
inline PositivityVerdict is_g_positive(const RationalMatrix& g) {
    if (!g.square() || g.rows() < 1 || g.rows() > kMaxPositivityDimension) {
        throw std::out_of_range("is_g_positive: requires a square matrix with n <= 6");
    }
    if (determinant(g) != 1) throw DomainError("is_g_positive: determinant is not 1");
    const std::size_t n = g.rows();
    PositivityVerdict verdict = PositivityVerdict::yes();
    try {
        const auto f = gauss_decompose(g);
        for (std::size_t k = 0; k < n && verdict.member; ++k) {
            if (f.torus(k, k) <= 0) verdict = PositivityVerdict::no({"torus", {k}, {k}, sgn(f.torus(k, k))});
        }
        if (verdict.member) verdict = is_totally_positive_unitriangular(f.upper, Triangle::Upper);
        if (verdict.member) verdict = is_totally_positive_unitriangular(f.lower, Triangle::Lower);
    } catch (const DecompositionUnavailable&) {
        // Find the vanishing trailing principal minor for the witness.
        for (std::size_t k = n; k-- > 0;) {
            const IndexSet trailing = index_range(k, n - k);
            if (minor(g, trailing, trailing) == 0) {
                verdict = PositivityVerdict::no({"g", trailing, trailing, 0});
                break;
            }
        }
    }
    if (verdict.member != all_minors_positive(g).member) {
        throw std::logic_error("factorization and all-minors criteria for G_{>0} disagree");
    }
    return verdict;
}

/// Positive rational scale * num/den, den in {1..12}, num in {1..3 den}.
inline Rational sample_positive_rational(Rng& rng, const Rational& scale = Rational(1)) {
    const auto den = rng.uniform_int(1, 12);
    const auto num = rng.uniform_int(1, 3 * den);
    Rational r(static_cast<long>(num), static_cast<unsigned long>(den));
    r.canonicalize();
    return Rational(r * scale);
}

/// Deterministic positive parameters for the canonical reduced word of w.
template <typename T>
LusztigParams<T> sample_positive(const Permutation& w, std::uint64_t seed, const Rational& scale) {
    static_assert(is_exact_v<T>, "sample_positive produces exact parameters");
    Rng rng(seed);
    LusztigParams<T> p{reduced_word(w), {}};
    p.params.reserve(p.word.size());
    for (std::size_t k = 0; k < p.word.size(); ++k) p.params.push_back(sample_positive_rational(rng, scale));
    return p;
}

/// Point of U-_{>0} (lower) or U+_{>0} (upper).
inline RationalMatrix sample_unipotent(std::size_t n, Triangle which, std::uint64_t seed, const Rational& scale = Rational(1)) {
    return evaluate_params(sample_positive<Rational>(longest_element(n), seed, scale), which, n);
}

/// Positive diagonal entries with product 1.
inline std::vector<Rational> sample_torus_diagonal(std::size_t n, std::uint64_t seed, const Rational& scale = Rational(1)) {
    Rng rng(seed);
    std::vector<Rational> d(n);
    Rational product(1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        d[i] = sample_positive_rational(rng, scale);
        product *= d[i];
    }
    d[n - 1] = 1 / product;
    return d;
}

/// Point of G_{>0}: x-product * torus * y-product over w0.
inline RationalMatrix sample_g_positive(std::size_t n, std::uint64_t seed, const Rational& scale = Rational(1)) {
    const RationalMatrix upper = sample_unipotent(n, Triangle::Upper, derive_seed(seed, 1), scale);
    const RationalMatrix lower = sample_unipotent(n, Triangle::Lower, derive_seed(seed, 2), scale);
    const RationalMatrix torus = RationalMatrix::diagonal(sample_torus_diagonal(n, derive_seed(seed, 3)));
    return upper * torus * lower;
}

}  // namespace tpflag

#endif  // TPFLAG_TOTPOS_HPP
