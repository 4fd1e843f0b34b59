#ifndef TPFLAG_THETA_HPP
#define TPFLAG_THETA_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"
#include "totpos.hpp"

namespace tpflag {

/// Positive torus element of SL_n in simple-root coordinates
/// R_i = t_{i+1} / t_i, i = 1..n-1.
template <typename T>
class TorusPoint {
public:
    TorusPoint() = default;
    explicit TorusPoint(std::vector<T> coords) : coords_(std::move(coords)) {
        for (const auto& c : coords_) {
            if (!(c > 0)) throw DomainError("torus coordinates must be positive");
        }
    }

    /// From positive diagonal entries (any scale; only ratios matter).
    static TorusPoint from_diagonal(const std::vector<T>& diag) {
        std::vector<T> coords;
        for (std::size_t i = 0; i + 1 < diag.size(); ++i) coords.push_back(T(diag[i + 1] / diag[i]));
        return TorusPoint(std::move(coords));
    }

    static TorusPoint ones(std::size_t n) { return TorusPoint(std::vector<T>(n - 1, T(1))); }

    std::size_t dimension() const { return coords_.size() + 1; }
    const std::vector<T>& coords() const { return coords_; }
    const T& operator[](std::size_t i) const { return coords_[i]; }

    /// t^-1, with coordinates 1/R_i.
    TorusPoint inverse() const {
        std::vector<T> inv;
        for (const auto& c : coords_) inv.push_back(T(T(1) / c));
        return TorusPoint(std::move(inv));
    }

    /// diag(t_1..t_n) with t_{i+1} = R_i t_i and det 1, which fixes
    /// t_1^n = prod_m R_m^{-(n-m)}. Exact for Rational when that root is
    /// rational; otherwise DomainError.
    std::vector<T> diagonal() const {
        const std::size_t n = dimension();
        std::vector<T> d(n);
        if constexpr (is_exact_v<T>) {
            Rational power(1);
            for (std::size_t m = 0; m + 1 < n; ++m) {
                for (std::size_t e = 0; e < n - 1 - m; ++e) power *= coords_[m];
            }
            auto first = exact_root(Rational(1 / power), n);
            if (!first) throw DomainError("torus point has no rational diagonal form");
            d[0] = *first;
        } else {
            double log_first = 0.0;
            for (std::size_t m = 0; m + 1 < n; ++m) log_first -= static_cast<double>(n - 1 - m) * std::log(to_double(coords_[m]));
            d[0] = static_cast<T>(std::exp(log_first / static_cast<double>(n)));
        }
        for (std::size_t i = 1; i < n; ++i) d[i] = d[i - 1] * coords_[i - 1];
        return d;
    }

    friend bool operator==(const TorusPoint&, const TorusPoint&) = default;

private:
    std::vector<T> coords_;
};

/// (Z_j)_{j in I}, indexed from j = 1 at position 0.
template <typename T>
using ZVector = std::vector<T>;

/// Coefficient of the lowest-weight wedge e_{n-j+1} ^ .. ^ e_n in
/// u (e_1 ^ .. ^ e_j): the minor on rows {n-j+1..n}, columns {1..j}.
template <typename T>
T z_function(const Matrix<T>& u, std::size_t j) {
    if (!is_unit_triangular(u, Triangle::Lower)) throw std::invalid_argument("z_function: matrix is not unit lower triangular");
    const std::size_t n = u.rows();
    if (j < 1 || j + 1 > n) throw std::out_of_range("z_function: weight index out of range");
    return minor(u, index_range(n - j, j), index_range(0, j));
}

template <typename T>
ZVector<T> z_vector(const Matrix<T>& u) {
    ZVector<T> z;
    for (std::size_t j = 1; j < u.rows(); ++j) z.push_back(z_function(u, j));
    return z;
}

/// t u t^-1: entry (i,k), i > k, scaled by R_k R_{k+1} .. R_{i-1}.
template <typename T>
Matrix<T> torus_conjugate(const TorusPoint<T>& t, const Matrix<T>& u) {
    if (t.dimension() != u.rows()) throw std::invalid_argument("torus_conjugate: dimension mismatch");
    if (!is_unit_triangular(u, Triangle::Lower)) throw std::invalid_argument("torus_conjugate: matrix is not unit lower triangular");
    Matrix<T> out = u;
    for (std::size_t k = 0; k < u.cols(); ++k) {
        T scale(1);
        for (std::size_t i = k + 1; i < u.rows(); ++i) {
            scale *= t[i - 1];
            out(i, k) *= scale;
        }
    }
    return out;
}

/// t u t^-1 u'^-1.
template <typename T>
Matrix<T> twisted_product(const Matrix<T>& u, const Matrix<T>& uprime, const TorusPoint<T>& t) {
    Matrix<T> m = torus_conjugate(t, u) * inverse(uprime);
    // The product is unit lower triangular; clear float noise in the
    // structural zeros and ones so the triangular preconditions hold.
    if constexpr (!is_exact_v<T>) {
        for (std::size_t i = 0; i < m.rows(); ++i) {
            m(i, i) = T(1);
            for (std::size_t j = i + 1; j < m.cols(); ++j) m(i, j) = T(0);
        }
    }
    return m;
}

/// t in T_{u,u'} iff t u t^-1 u'^-1 is in U-_{>0}.
template <typename T>
PositivityVerdict torus_set_membership(const Matrix<T>& u, const Matrix<T>& uprime, const TorusPoint<T>& t, double margin = 0.0) {
    return is_totally_positive_unitriangular(twisted_product(u, uprime, t), Triangle::Lower, margin);
}

/// z(u, u', t) = (Z_j(t u t^-1 u'^-1))_j. Throws NotInTorusSet outside T_{u,u'}.
template <typename T>
ZVector<T> theta_forward(const Matrix<T>& u, const Matrix<T>& uprime, const TorusPoint<T>& t, double margin = 0.0) {
    const Matrix<T> m = twisted_product(u, uprime, t);
    const auto verdict = is_totally_positive_unitriangular(m, Triangle::Lower, margin);
    if (!verdict.member) throw NotInTorusSet("t is not in T_{u,u'}: " + verdict.witness->describe());
    return z_vector(m);
}

namespace detail {

template <typename T>
void check_closed_form_inputs(const Matrix<T>& u, const Matrix<T>& uprime, const ZVector<T>& z, std::size_t n) {
    if (u.rows() != n || uprime.rows() != n) throw std::invalid_argument("closed-form inverse: wrong dimension");
    if (z.size() != n - 1) throw std::invalid_argument("closed-form inverse: wrong number of z components");
    for (const auto& v : z) {
        if (!(v > 0)) throw DomainError("closed-form inverse: z components must be positive");
    }
    for (const auto* m : {&u, &uprime}) {
        if (!is_unit_triangular(*m, Triangle::Lower)) throw std::invalid_argument("closed-form inverse: matrix is not unit lower triangular");
    }
}

}  // namespace detail

/// SL_2: z = R a - a', so R = (A + a') / a. Exact for Rational.
template <typename T>
TorusPoint<T> theta_inverse_sl2(const Matrix<T>& u, const Matrix<T>& uprime, const ZVector<T>& z) {
    detail::check_closed_form_inputs(u, uprime, z, 2);
    const T& a = u(1, 0);
    const T& aprime = uprime(1, 0);
    if (!(a > 0) || !(aprime > 0)) throw DomainError("theta_inverse_sl2: cell coordinates must be positive");
    return TorusPoint<T>({T((z[0] + aprime) / a)});
}

/// Both preimages of (A, B) under the SL_3 map (R, S) -> z: the accepted
/// one lies in T_{u,u'}, the rejected one has R < a'/a.
struct Sl3Preimages {
    TorusPoint<double> accepted;
    std::vector<double> rejected;  // (R, S), not a valid torus point in general
};

/// SL_3 closed form. With u = (a, b, c), u' = (a', b', c') below the
/// diagonal and S~ = S - b'/b, R~ = R - a'/a:
///   (ab-c) a'b S~^2 + mu S~ - (A+B) c b'/b = 0,
///   mu = abc' - a'b'c + (ab-c)A - cB,
/// has one positive root S~+ and one negative root S~-; the accepted
/// preimage is S = S~+ + b'/b, R = -(ab-c) a'b (ab'c)^-1 S~- + a'/a.
/// Roots are taken in the cancellation-free form.
template <typename T>
Sl3Preimages theta_sl3_preimages(const Matrix<T>& u, const Matrix<T>& uprime, const ZVector<T>& z) {
    detail::check_closed_form_inputs(u, uprime, z, 3);
    using L = long double;
    const L a = to_double(u(1, 0)), b = to_double(u(2, 1)), c = to_double(u(2, 0));
    const L ap = to_double(uprime(1, 0)), bp = to_double(uprime(2, 1)), cp = to_double(uprime(2, 0));
    const L A = to_double(z[0]), B = to_double(z[1]);
    const L det_u = [&] {
        if constexpr (is_exact_v<T>) {
            return static_cast<L>(to_double(Rational(u(1, 0) * u(2, 1) - u(2, 0))));
        } else {
            return a * b - c;
        }
    }();
    if (!(a > 0 && b > 0 && c > 0 && det_u > 0 && ap > 0 && bp > 0 && cp > 0 && ap * bp - cp > 0)) {
        throw DomainError("theta_inverse_sl3: u and u' must be in U-_{>0}");
    }
    const L alpha = det_u * ap * b;
    const L gamma = (A + B) * c * bp / b;
    const L mu = a * b * cp - ap * bp * c + det_u * A - c * B;
    const L root = std::sqrt(mu * mu + 4 * alpha * gamma);
    L s_plus, s_minus;
    if (mu >= 0) {
        s_plus = 2 * gamma / (mu + root);
        s_minus = -(mu + root) / (2 * alpha);
    } else {
        s_plus = (-mu + root) / (2 * alpha);
        s_minus = -2 * gamma / (-mu + root);
    }
    const L slope = alpha / (a * bp * c);
    const L r_plus = -slope * s_minus;
    const L r_minus = -slope * s_plus;
    Sl3Preimages out{TorusPoint<double>({static_cast<double>(r_plus + ap / a), static_cast<double>(s_plus + bp / b)}),
                     {static_cast<double>(r_minus + ap / a), static_cast<double>(s_minus + bp / b)}};
    return out;
}

template <typename T>
TorusPoint<double> theta_inverse_sl3(const Matrix<T>& u, const Matrix<T>& uprime, const ZVector<T>& z) {
    return theta_sl3_preimages(u, uprime, z).accepted;
}

}  // namespace tpflag

#endif  // TPFLAG_THETA_HPP
