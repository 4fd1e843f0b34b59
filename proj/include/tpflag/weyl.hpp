#ifndef TPFLAG_WEYL_HPP
#define TPFLAG_WEYL_HPP

#include <algorithm>
#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace tpflag {

/// A word in the simple reflections s_1..s_{n-1} (1-based letters).
using Word = std::vector<int>;

/// J, a subset of I = {1..n-1}.
using ParabolicIndex = std::set<int>;

/// Element of the symmetric group S_n in one-line notation, 1-based:
/// w maps i to image(i). Products compose as functions, (vw)(i) = v(w(i)),
/// and s_i swaps i and i+1.
class Permutation {
public:
    explicit Permutation(std::vector<int> one_line) : one_line_(std::move(one_line)) {
        std::vector<bool> seen(one_line_.size() + 1, false);
        for (int v : one_line_) {
            if (v < 1 || v > static_cast<int>(one_line_.size()) || seen[v]) {
                throw std::invalid_argument("not a permutation in one-line notation");
            }
            seen[v] = true;
        }
    }

    static Permutation identity(std::size_t n) {
        std::vector<int> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<int>(i) + 1;
        return Permutation(std::move(v));
    }

    static Permutation simple_reflection(std::size_t n, int i) {
        check_letter(n, i);
        Permutation p = identity(n);
        std::swap(p.one_line_[i - 1], p.one_line_[i]);
        return p;
    }

    std::size_t size() const { return one_line_.size(); }
    int operator()(int i) const { return one_line_[i - 1]; }
    const std::vector<int>& one_line() const { return one_line_; }

    Permutation inverse() const {
        std::vector<int> inv(one_line_.size());
        for (std::size_t i = 0; i < one_line_.size(); ++i) inv[one_line_[i] - 1] = static_cast<int>(i) + 1;
        return Permutation(std::move(inv));
    }

    friend Permutation operator*(const Permutation& a, const Permutation& b) {
        if (a.size() != b.size()) throw std::invalid_argument("permutation product: size mismatch");
        std::vector<int> c(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) c[i] = a.one_line_[b.one_line_[i] - 1];
        return Permutation(std::move(c));
    }

    friend bool operator==(const Permutation&, const Permutation&) = default;

    static void check_letter(std::size_t n, int i) {
        if (i < 1 || i + 1 > static_cast<int>(n)) {
            throw std::out_of_range("simple reflection index " + std::to_string(i) + " out of range for n=" + std::to_string(n));
        }
    }

private:
    std::vector<int> one_line_;
};

/// Number of inversions.
inline std::size_t length(const Permutation& w) {
    std::size_t inv = 0;
    const auto& v = w.one_line();
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j)
            if (v[i] > v[j]) ++inv;
    return inv;
}

/// s_{i1} s_{i2} ... s_{ik}.
inline Permutation word_to_permutation(const Word& word, std::size_t n) {
    Permutation w = Permutation::identity(n);
    for (int letter : word) w = w * Permutation::simple_reflection(n, letter);
    return w;
}

inline bool is_reduced(const Word& word, std::size_t n) {
    return length(word_to_permutation(word, n)) == word.size();
}

/// Longest element of W_J: reverses every maximal run of consecutive
/// indices generated by J. J = {1..n-1} gives w0, the reversal.
inline Permutation longest_element(const ParabolicIndex& J, std::size_t n) {
    for (int j : J) Permutation::check_letter(n, j);
    std::vector<int> v = Permutation::identity(n).one_line();
    std::size_t start = 0;
    while (start < n) {
        std::size_t end = start;
        while (end + 1 < n && J.count(static_cast<int>(end) + 1)) ++end;
        std::reverse(v.begin() + static_cast<std::ptrdiff_t>(start), v.begin() + static_cast<std::ptrdiff_t>(end) + 1);
        start = end + 1;
    }
    return Permutation(std::move(v));
}

inline ParabolicIndex full_index(std::size_t n) {
    ParabolicIndex I;
    for (std::size_t i = 1; i < n; ++i) I.insert(static_cast<int>(i));
    return I;
}

inline Permutation longest_element(std::size_t n) { return longest_element(full_index(n), n); }

/// Lexicographically smallest reduced word: repeatedly strip the smallest
/// left descent i (i+1 stands before i in one-line notation).
inline Word reduced_word(const Permutation& w) {
    const std::size_t n = w.size();
    Word word;
    Permutation rest = w;
    while (true) {
        const Permutation inv = rest.inverse();
        int descent = 0;
        for (std::size_t i = 1; i < n; ++i) {
            if (inv(static_cast<int>(i)) > inv(static_cast<int>(i) + 1)) {
                descent = static_cast<int>(i);
                break;
            }
        }
        if (descent == 0) break;
        word.push_back(descent);
        rest = Permutation::simple_reflection(n, descent) * rest;
    }
    return word;
}

/// True iff |w1 w2| = |w1| + |w2|.
inline bool concat_is_reduced(const Permutation& w1, const Permutation& w2) {
    return length(w1 * w2) == length(w1) + length(w2);
}

/// Every subset of {1..n-1}.
inline std::vector<ParabolicIndex> all_parabolic_indices(std::size_t n) {
    std::vector<ParabolicIndex> out;
    const std::size_t r = n - 1;
    for (std::size_t mask = 0; mask < (std::size_t{1} << r); ++mask) {
        ParabolicIndex J;
        for (std::size_t b = 0; b < r; ++b)
            if (mask & (std::size_t{1} << b)) J.insert(static_cast<int>(b) + 1);
        out.push_back(std::move(J));
    }
    return out;
}

}  // namespace tpflag

#endif  // TPFLAG_WEYL_HPP
