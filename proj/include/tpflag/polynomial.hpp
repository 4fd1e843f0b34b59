#ifndef TPFLAG_POLYNOMIAL_HPP
#define TPFLAG_POLYNOMIAL_HPP

#include <cmath>
#include <cstddef>
#include <map>
#include <unordered_map>
#include <vector>

#include "matrix.hpp"
#include "rational.hpp"
#include "theta.hpp"

namespace tpflag {

/// Sparse polynomial in R_1..R_k with rational coefficients.
class Polynomial {
public:
    using Exponents = std::vector<int>;

    Polynomial() = default;
    explicit Polynomial(std::size_t variables) : variables_(variables) {}

    static Polynomial constant(std::size_t variables, const Rational& c) {
        Polynomial p(variables);
        p.add_term(Exponents(variables, 0), c);
        return p;
    }

    static Polynomial monomial(const Exponents& e, const Rational& c) {
        Polynomial p(e.size());
        p.add_term(e, c);
        return p;
    }

    std::size_t variables() const { return variables_; }
    const std::map<Exponents, Rational>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(const Exponents& e, const Rational& c) {
        if (c == 0) return;
        auto [it, inserted] = terms_.emplace(e, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) {
        for (const auto& [e, c] : b.terms_) a.add_term(e, c);
        return a;
    }

    friend Polynomial operator-(Polynomial a, const Polynomial& b) {
        for (const auto& [e, c] : b.terms_) a.add_term(e, Rational(-c));
        return a;
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        Polynomial out(a.variables_);
        for (const auto& [ea, ca] : a.terms_) {
            for (const auto& [eb, cb] : b.terms_) {
                Exponents e(ea.size());
                for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
                out.add_term(e, Rational(ca * cb));
            }
        }
        return out;
    }

    friend bool operator==(const Polynomial&, const Polynomial&) = default;

    /// R_m d/dR_m: multiplies each coefficient by its exponent of R_m.
    Polynomial euler_derivative(std::size_t m) const {
        Polynomial out(variables_);
        for (const auto& [e, c] : terms_) {
            if (e[m] != 0) out.add_term(e, Rational(c * e[m]));
        }
        return out;
    }

    /// d/dR_m.
    Polynomial derivative(std::size_t m) const {
        Polynomial out(variables_);
        for (const auto& [e, c] : terms_) {
            if (e[m] == 0) continue;
            Exponents lowered = e;
            --lowered[m];
            out.add_term(lowered, Rational(c * e[m]));
        }
        return out;
    }

    Rational evaluate(const std::vector<Rational>& point) const {
        Rational total(0);
        for (const auto& [e, c] : terms_) {
            Rational term = c;
            for (std::size_t i = 0; i < e.size(); ++i)
                for (int k = 0; k < e[i]; ++k) term *= point[i];
            total += term;
        }
        return total;
    }

    /// Value at R = exp(x) (log coordinates).
    double evaluate_log(const std::vector<double>& x) const {
        double total = 0.0;
        for (const auto& [e, c] : terms_) {
            double exponent = 0.0;
            for (std::size_t i = 0; i < e.size(); ++i) exponent += e[i] * x[i];
            total += c.get_d() * std::exp(exponent);
        }
        return total;
    }

private:
    std::size_t variables_ = 0;
    std::map<Exponents, Rational> terms_;
};

namespace detail {

/// Determinant of a square polynomial matrix by Laplace expansion along
/// the first column, memoized on the set of remaining rows.
inline Polynomial polynomial_determinant(const std::vector<std::vector<Polynomial>>& m, std::size_t variables) {
    const std::size_t size = m.size();
    std::unordered_map<unsigned, Polynomial> memo;
    // det of rows in `mask` (|mask| = size - col) against columns col..size-1.
    auto solve = [&](auto&& self, unsigned mask, std::size_t col) -> Polynomial {
        if (col == size) return Polynomial::constant(variables, Rational(1));
        if (auto it = memo.find(mask); it != memo.end()) return it->second;
        Polynomial total(variables);
        int sign = 1;
        for (std::size_t r = 0; r < size; ++r) {
            if (!(mask & (1u << r))) continue;
            if (!m[r][col].is_zero()) {
                const Polynomial term = m[r][col] * self(self, mask & ~(1u << r), col + 1);
                total = sign > 0 ? total + term : total - term;
            }
            sign = -sign;
        }
        memo.emplace(mask, total);
        return total;
    };
    return solve(solve, (1u << size) - 1, 0);
}

}  // namespace detail

/// The components z_j(u, u', t) as exact polynomials in the torus
/// coordinates R_1..R_{n-1}: entries of t u t^-1 are monomials, the product
/// with u'^-1 is linear, and Z_j is the lower-left j x j corner minor.
inline std::vector<Polynomial> z_polynomials(const RationalMatrix& u, const RationalMatrix& uprime) {
    const std::size_t n = u.rows();
    const std::size_t vars = n - 1;
    if (!is_unit_triangular(u, Triangle::Lower) || !is_unit_triangular(uprime, Triangle::Lower) || uprime.rows() != n) {
        throw std::invalid_argument("z_polynomials: inputs must be unit lower triangular of the same size");
    }
    const RationalMatrix uprime_inv = inverse(uprime);
    std::vector<std::vector<Polynomial>> m(n, std::vector<Polynomial>(n, Polynomial(vars)));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < n; ++c) {
            Polynomial entry(vars);
            for (std::size_t k = c; k <= i; ++k) {
                if (u(i, k) == 0 || uprime_inv(k, c) == 0) continue;
                Polynomial::Exponents e(vars, 0);
                for (std::size_t r = k; r < i; ++r) e[r] = 1;
                entry.add_term(e, Rational(u(i, k) * uprime_inv(k, c)));
            }
            m[i][c] = std::move(entry);
        }
    }
    std::vector<Polynomial> out;
    for (std::size_t j = 1; j < n; ++j) {
        std::vector<std::vector<Polynomial>> corner(j, std::vector<Polynomial>(j));
        for (std::size_t a = 0; a < j; ++a)
            for (std::size_t b = 0; b < j; ++b) corner[a][b] = m[n - j + a][b];
        out.push_back(detail::polynomial_determinant(corner, vars));
    }
    return out;
}

}  // namespace tpflag

#endif  // TPFLAG_POLYNOMIAL_HPP
