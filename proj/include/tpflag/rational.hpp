#ifndef TPFLAG_RATIONAL_HPP
#define TPFLAG_RATIONAL_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>

#include <gmpxx.h>

#include "errors.hpp"

namespace tpflag {

/// Exact rational number. GMP keeps it in lowest terms with a positive
/// denominator; zero is 0/1.
using Rational = mpq_class;
using Integer = mpz_class;

template <typename T>
inline constexpr bool is_exact_v = std::is_same_v<T, Rational>;

inline double to_double(const Rational& x) { return x.get_d(); }
inline double to_double(double x) { return x; }
inline double to_double(long double x) { return static_cast<double>(x); }

template <typename T>
int sign_of(const T& x) {
    if constexpr (is_exact_v<T>) {
        return sgn(x);
    } else {
        return (x > T(0)) - (x < T(0));
    }
}

template <typename T>
T abs_of(const T& x) {
    if constexpr (is_exact_v<T>) {
        return Rational(abs(x));
    } else {
        return std::abs(x);
    }
}

/// Parses "p/q" or "p" (optional leading '-', decimal digits only, q > 0).
/// Non-canonical input such as "2/4" is accepted and reduced.
inline Rational parse_rational(std::string_view text) {
    auto digits_ok = [](std::string_view s) {
        if (s.empty()) return false;
        for (char ch : s) {
            if (ch < '0' || ch > '9') return false;
        }
        return true;
    };
    std::string_view body = text;
    if (!body.empty() && body.front() == '-') body.remove_prefix(1);
    const auto slash = body.find('/');
    const std::string_view num = body.substr(0, slash);
    const std::string_view den = slash == std::string_view::npos ? std::string_view{"1"} : body.substr(slash + 1);
    if (!digits_ok(num) || !digits_ok(den)) {
        throw InputError("malformed rational: '" + std::string(text) + "'");
    }
    Integer p(std::string(num), 10);
    Integer q(std::string(den), 10);
    if (q == 0) throw InputError("zero denominator: '" + std::string(text) + "'");
    if (text.front() == '-') p = -p;
    Rational r(p, q);
    r.canonicalize();
    return r;
}

/// Canonical rendering: "p" for integers, "p/q" otherwise.
inline std::string format_rational(const Rational& x) { return x.get_str(10); }

/// Exact k-th root of a non-negative integer, if it exists.
inline std::optional<Integer> exact_root(const Integer& x, unsigned long k) {
    if (x < 0) return std::nullopt;
    Integer root;
    if (mpz_root(root.get_mpz_t(), x.get_mpz_t(), k) == 0) return std::nullopt;
    return root;
}

/// Exact k-th root of a positive rational, if it is rational.
inline std::optional<Rational> exact_root(const Rational& x, unsigned long k) {
    if (x <= 0) return std::nullopt;
    auto p = exact_root(x.get_num(), k);
    auto q = exact_root(x.get_den(), k);
    if (!p || !q) return std::nullopt;
    return Rational(*p, *q);
}

/// Best rational approximation by continued-fraction convergents, stopping at
/// the first convergent within `tolerance` of x.
inline Rational snap_rational(double x, double tolerance = 1e-9, int max_terms = 64) {
    if (!std::isfinite(x)) throw DomainError("cannot snap a non-finite value");
    Integer h_prev = 1, h = static_cast<long>(std::floor(x));
    Integer k_prev = 0, k = 1;
    double rest = x - std::floor(x);
    for (int term = 0; term < max_terms; ++term) {
        Rational current(h, k);
        current.canonicalize();
        if (std::abs(current.get_d() - x) <= tolerance || rest == 0.0) return current;
        const double inv = 1.0 / rest;
        const double a = std::floor(inv);
        rest = inv - a;
        Integer ai(a);
        Integer h_next = ai * h + h_prev;
        Integer k_next = ai * k + k_prev;
        h_prev = h;
        k_prev = k;
        h = h_next;
        k = k_next;
    }
    Rational last(h, k);
    last.canonicalize();
    return last;
}

}  // namespace tpflag

#endif  // TPFLAG_RATIONAL_HPP
