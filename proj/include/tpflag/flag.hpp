#ifndef TPFLAG_FLAG_HPP
#define TPFLAG_FLAG_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "gauss.hpp"
#include "matrix.hpp"
#include "solver.hpp"
#include "theta.hpp"
#include "totpos.hpp"
#include "weyl.hpp"

namespace tpflag {

/// Tolerances of the float (eigenvector) side of the module.
struct FlagConfig {
    /// Minimum absolute gap between consecutive eigenvalues.
    double separation = 1e-10;
    /// ||g b - lambda b|| <= eigen_residual * ||g|| for unit eigenvectors b.
    double eigen_residual = 1e-9;
    /// Relative size of entries that must vanish in rep^-1 g rep.
    double fibre_tolerance = 1e-9;
    /// Max componentwise distance between unit representatives of two lines.
    double line_tolerance = 1e-8;
    double snap_tolerance = 1e-9;
};

/// B = rep B+ rep^-1 with rep in U-_{>0}.
template <typename T>
struct FlagPoint {
    Matrix<T> rep;
    friend bool operator==(const FlagPoint&, const FlagPoint&) = default;
};

/// P = rep P_J+ rep^-1 with rep in U-(w0 w0^J).
template <typename T>
struct ParabolicPoint {
    ParabolicIndex J;
    Matrix<T> rep;
    friend bool operator==(const ParabolicPoint&, const ParabolicPoint&) = default;
};

/// Coordinates of B cap G_{>0}: v in U+_{>0} on the canonical word of w0, and z.
struct CellCoordinates {
    LusztigParams<Rational> v;
    ZVector<Rational> zvec;
    friend bool operator==(const CellCoordinates&, const CellCoordinates&) = default;
};

/// Eigenvalues in decreasing order with unit eigenvectors as columns.
struct EigenFlag {
    std::vector<double> eigenvalues;
    RealMatrix basis;
};

namespace detail {

inline Eigen::MatrixXd to_eigen(const RealMatrix& m) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
    return out;
}

inline double vector_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

/// Unit vector with its largest-magnitude component positive.
inline std::vector<double> normalize_line(std::vector<double> v) {
    const double norm = vector_norm(v);
    if (norm == 0.0) throw DomainError("a zero vector spans no line");
    const auto big = std::max_element(v.begin(), v.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    const double scale = (*big < 0 ? -1.0 : 1.0) / norm;
    for (double& x : v) x *= scale;
    return v;
}

/// Componentwise distance between the normalized representatives of two lines.
inline double line_distance(const std::vector<double>& a, const std::vector<double>& b) {
    const auto na = normalize_line(a), nb = normalize_line(b);
    double worst = 0.0;
    for (std::size_t i = 0; i < na.size(); ++i) worst = std::max(worst, std::abs(na[i] - nb[i]));
    return worst;
}

inline std::vector<double> column(const RealMatrix& m, std::size_t c) {
    std::vector<double> out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) out[i] = m(i, c);
    return out;
}

/// Sorted real spectrum of m; complex pairs or collisions throw.
inline EigenFlag real_spectrum(const RealMatrix& m, const FlagConfig& config) {
    const std::size_t n = m.rows();
    const Eigen::MatrixXd a = to_eigen(m);
    const Eigen::EigenSolver<Eigen::MatrixXd> solver(a);
    if (solver.info() != Eigen::Success) throw EigenvalueCollision("eigen-decomposition did not converge");
    const double scale = a.norm();
    std::vector<std::size_t> order(n);
    for (std::size_t k = 0; k < n; ++k) order[k] = k;
    const auto values = solver.eigenvalues();
    for (std::size_t k = 0; k < n; ++k) {
        const auto lambda = values(static_cast<Eigen::Index>(k));
        if (std::abs(lambda.imag()) > config.separation * std::max(1.0, scale)) {
            throw EigenvalueCollision("non-real eigenvalue " + std::to_string(lambda.real()) + "+" + std::to_string(lambda.imag()) + "i");
        }
    }
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return values(static_cast<Eigen::Index>(x)).real() > values(static_cast<Eigen::Index>(y)).real();
    });
    EigenFlag flag{{}, RealMatrix(n, n)};
    const auto vectors = solver.eigenvectors();
    for (std::size_t k = 0; k < n; ++k) {
        const auto src = static_cast<Eigen::Index>(order[k]);
        flag.eigenvalues.push_back(values(src).real());
        Eigen::VectorXd b = vectors.col(src).real();
        b.normalize();
        for (std::size_t i = 0; i < n; ++i) flag.basis(i, k) = b(static_cast<Eigen::Index>(i));
        const double residual = (a * b - flag.eigenvalues.back() * b).norm();
        if (residual > config.eigen_residual * std::max(1.0, scale)) {
            throw EigenvalueCollision("eigenvector residual " + std::to_string(residual) + " exceeds tolerance");
        }
    }
    return flag;
}

/// Perron vector of a matrix with a simple dominant real eigenvalue.
inline std::vector<double> perron_vector(const RealMatrix& m, const FlagConfig& config) {
    const EigenFlag spectrum = real_spectrum(m, config);
    if (spectrum.eigenvalues.size() > 1 && spectrum.eigenvalues[0] - spectrum.eigenvalues[1] <= config.separation) {
        throw EigenvalueCollision("dominant eigenvalue is not simple");
    }
    return normalize_line(column(spectrum.basis, 0));
}

/// The vector of j x j minors of the first j columns (colex order): the
/// wedge of those columns in the standard basis of Lambda^j.
inline std::vector<double> wedge_of_columns(const RealMatrix& m, std::size_t j) {
    std::vector<double> out;
    for (const auto& rows : subsets_colex(m.rows(), j)) out.push_back(minor(m, rows, index_range(0, j)));
    return out;
}

/// Same-block test for P_J+: rows and columns i < k (0-based) lie in one
/// Levi block iff all letters i+1..k are in J.
inline bool same_block(const ParabolicIndex& J, std::size_t i, std::size_t k) {
    for (std::size_t letter = std::min(i, k) + 1; letter <= std::max(i, k); ++letter) {
        if (!J.count(static_cast<int>(letter))) return false;
    }
    return true;
}

inline void check_parabolic_index(const ParabolicIndex& J, std::size_t n) {
    for (int j : J) Permutation::check_letter(n, j);
}

}  // namespace detail

/// Eigenvalues and eigenvectors of g in decreasing order. For g in G_{>0}
/// the spectrum is simple and positive; anything else is reported as
/// EigenvalueCollision.
inline EigenFlag eigen_flag(const RealMatrix& g, const FlagConfig& config = {}) {
    EigenFlag flag = detail::real_spectrum(g, config);
    for (std::size_t k = 0; k < flag.eigenvalues.size(); ++k) {
        if (!(flag.eigenvalues[k] > 0)) throw EigenvalueCollision("non-positive eigenvalue " + std::to_string(flag.eigenvalues[k]));
        if (k > 0 && flag.eigenvalues[k - 1] - flag.eigenvalues[k] <= config.separation) {
            throw EigenvalueCollision("eigenvalues " + std::to_string(k) + " and " + std::to_string(k + 1) + " are closer than the separation threshold");
        }
    }
    return flag;
}

/// zeta(g): the Borel B in B_{>0} containing g, as the L factor of the
/// eigenvector matrix M = L D U'. Then g = L (D U' diag(lambda) U'^-1 D^-1) L^-1.
inline FlagPoint<double> zeta(const RationalMatrix& g, const FlagConfig& config = {}) {
    const auto verdict = is_g_positive(g);
    if (!verdict.member) throw NotTotallyPositive("g is not totally positive: " + verdict.witness->describe());
    const RealMatrix gf = matrix_cast<double>(g);
    const EigenFlag flag = eigen_flag(gf, config);
    const RealMatrix rep = ldu_decompose(flag.basis).lower;

    const RealMatrix conj = inverse(rep) * gf * rep;
    const double bound = config.fibre_tolerance * std::max(1.0, max_abs(conj));
    for (std::size_t i = 0; i < conj.rows(); ++i)
        for (std::size_t k = 0; k < i; ++k)
            if (std::abs(conj(i, k)) > bound) throw EigenvalueCollision("eigenvector flag does not triangularize g");
    const auto positive = is_totally_positive_unitriangular(rep, Triangle::Lower);
    if (!positive.member) throw EigenvalueCollision("eigenvector flag lost positivity in floating point: " + positive.witness->describe());
    return {rep};
}

/// Rational snap of a float flag point, accepted only if it is exactly a
/// point of B_{>0} whose Borel contains g.
inline std::optional<FlagPoint<Rational>> snap_flag_point(const FlagPoint<double>& point, const RationalMatrix& g, double tolerance = 1e-9) {
    const std::size_t n = point.rep.rows();
    RationalMatrix rep = RationalMatrix::identity(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < i; ++k) rep(i, k) = snap_rational(point.rep(i, k), tolerance);
    if (!is_totally_positive_unitriangular(rep, Triangle::Lower).member) return std::nullopt;
    const RationalMatrix conj = inverse(rep) * g * rep;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < i; ++k)
            if (conj(i, k) != 0) return std::nullopt;
    return FlagPoint<Rational>{rep};
}

/// sigma_B(g) = (v, z((u'v)^-, u', t^-1)) for g = u' v t u'^-1 in B cap G_{>0}.
/// The lower Gauss factor of g is t^-1 (u'v)^- t u'^-1, so it is t^-1 that
/// lies in T_{(u'v)^-,u'}.
inline CellCoordinates sigma_b(const RationalMatrix& g, const FlagPoint<Rational>& B) {
    const std::size_t n = g.rows();
    if (B.rep.rows() != n) throw std::invalid_argument("sigma_b: dimension mismatch");
    const auto rep_ok = is_totally_positive_unitriangular(B.rep, Triangle::Lower);
    if (!rep_ok.member) throw NotTotallyPositive("flag representative is not in U-_{>0}: " + rep_ok.witness->describe());
    const auto g_ok = is_g_positive(g);
    if (!g_ok.member) throw NotTotallyPositive("g is not totally positive: " + g_ok.witness->describe());

    const RationalMatrix& uprime = B.rep;
    GaussFactors<Rational> vt;
    try {
        vt = gauss_decompose(RationalMatrix(inverse(uprime) * g * uprime));
    } catch (const DecompositionUnavailable&) {
        throw NotInFibre("g is not in the Borel subgroup B");
    }
    if (vt.lower != RationalMatrix::identity(n)) throw NotInFibre("g is not in the Borel subgroup B");
    const LusztigParams<Rational> v = extract_params(vt.upper, longest_element(n), Triangle::Upper);

    std::vector<Rational> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = vt.torus(i, i);
    const TorusPoint<Rational> tau = TorusPoint<Rational>::from_diagonal(diag).inverse();
    const RationalMatrix lower = gauss_decompose(RationalMatrix(uprime * vt.upper)).lower;
    try {
        return {v, theta_forward(lower, uprime, tau)};
    } catch (const NotInTorusSet& e) {
        throw MembershipViolation(std::string("implied torus-set membership failed: ") + e.what());
    }
}

namespace detail {

struct FibreData {
    RationalMatrix uprime;
    RationalMatrix v;
    RationalMatrix lower;  // (u'v)^-
};

inline FibreData fibre_data(const CellCoordinates& coords, const FlagPoint<Rational>& B) {
    const std::size_t n = B.rep.rows();
    if (coords.zvec.size() + 1 != n) throw std::invalid_argument("sigma_b_inverse: wrong number of z components");
    for (const auto& z : coords.zvec)
        if (!(z > 0)) throw std::invalid_argument("sigma_b_inverse: z components must be positive");
    if (coords.v.word != reduced_word(longest_element(n))) throw std::invalid_argument("sigma_b_inverse: v must be given on the canonical word of w0");
    for (const auto& p : coords.v.params)
        if (!(p > 0)) throw std::invalid_argument("sigma_b_inverse: v parameters must be positive");
    FibreData d{B.rep, evaluate_params(coords.v, Triangle::Upper, n), {}};
    d.lower = gauss_decompose(RationalMatrix(d.uprime * d.v)).lower;
    return d;
}

}  // namespace detail

/// sigma_B^-1: u' v t u'^-1 with t^-1 recovered from z by the theta inverse.
inline RealMatrix sigma_b_inverse(const CellCoordinates& coords, const FlagPoint<Rational>& B, InverseMethod method = InverseMethod::Auto,
                                  const SolverConfig& solver = {}) {
    const detail::FibreData d = detail::fibre_data(coords, B);
    const TorusPoint<double> t = theta_inverse(d.lower, d.uprime, coords.zvec, method, solver).inverse();
    const RealMatrix torus = RealMatrix::diagonal(t.diagonal());
    const RealMatrix uprime = matrix_cast<double>(d.uprime);
    return uprime * matrix_cast<double>(d.v) * torus * matrix_cast<double>(RationalMatrix(inverse(d.uprime)));
}

/// Exact sigma_B^-1 for n = 2. Throws DomainError when the recovered torus
/// element has no rational diagonal form.
inline RationalMatrix sigma_b_inverse_exact(const CellCoordinates& coords, const FlagPoint<Rational>& B) {
    if (B.rep.rows() != 2) throw std::invalid_argument("sigma_b_inverse_exact: exact inverse is available for n = 2 only");
    const detail::FibreData d = detail::fibre_data(coords, B);
    const TorusPoint<Rational> t = theta_inverse_sl2(d.lower, d.uprime, coords.zvec).inverse();
    return d.uprime * d.v * RationalMatrix::diagonal(t.diagonal()) * inverse(d.uprime);
}

/// u1 = u1' u1'' with u1' in U-(w0 w0^J) and u1'' in U-(w0^J).
template <typename T>
struct CellSplit {
    LusztigParams<T> parabolic_params;
    LusztigParams<T> fibre_params;
    Matrix<T> parabolic;
    Matrix<T> fibre;
};

/// Canonical words of w0 w0^J and w0^J; their concatenation is reduced for w0.
inline std::pair<Word, Word> split_words(std::size_t n, const ParabolicIndex& J) {
    detail::check_parabolic_index(J, n);
    const Permutation w0J = longest_element(J, n);
    const Permutation head = longest_element(n) * w0J;
    if (!concat_is_reduced(head, w0J)) throw std::logic_error("split_cell: w0 w0^J and w0^J do not concatenate reducedly");
    return {reduced_word(head), reduced_word(w0J)};
}

template <typename T>
CellSplit<T> split_cell(const Matrix<T>& u1, const ParabolicIndex& J, double tolerance = 1e-9) {
    const std::size_t n = u1.rows();
    const auto [head, tail] = split_words(n, J);
    Word word = head;
    word.insert(word.end(), tail.begin(), tail.end());
    const LusztigParams<T> all = extract_params(u1, word, Triangle::Lower, tolerance);
    CellSplit<T> out;
    out.parabolic_params = {head, std::vector<T>(all.params.begin(), all.params.begin() + static_cast<std::ptrdiff_t>(head.size()))};
    out.fibre_params = {tail, std::vector<T>(all.params.begin() + static_cast<std::ptrdiff_t>(head.size()), all.params.end())};
    out.parabolic = evaluate_params(out.parabolic_params, Triangle::Lower, n);
    out.fibre = evaluate_params(out.fibre_params, Triangle::Lower, n);
    return out;
}

/// Line agreement for one fundamental weight j not in J.
struct PerronLineCheck {
    std::size_t j = 0;
    bool perron_positive = false;
    /// Perron line of Lambda^j(g) against the wedge of the top j eigenvectors.
    double eigenflag_distance = 0.0;
    /// Perron line against Lambda^j(rep) e_1^..^e_j, the line fixed by P.
    double parabolic_distance = 0.0;
};

struct Classification {
    ParabolicPoint<double> point;
    std::vector<PerronLineCheck> checks;
    bool consistent = true;

    double max_distance() const {
        double worst = 0.0;
        for (const auto& c : checks) worst = std::max({worst, c.eigenflag_distance, c.parabolic_distance});
        return worst;
    }
};

/// Perron-line cross-check of a parabolic point against g.
inline std::vector<PerronLineCheck> perron_line_checks(const RealMatrix& g, const EigenFlag& flag, const ParabolicPoint<double>& point,
                                                       const FlagConfig& config = {}) {
    const std::size_t n = g.rows();
    std::vector<PerronLineCheck> checks;
    for (std::size_t j = 1; j < n; ++j) {
        if (point.J.count(static_cast<int>(j))) continue;
        PerronLineCheck c;
        c.j = j;
        const std::vector<double> perron = detail::perron_vector(exterior_power(g, j), config);
        c.perron_positive = std::all_of(perron.begin(), perron.end(), [](double x) { return x > 0; });
        c.eigenflag_distance = detail::line_distance(perron, detail::wedge_of_columns(flag.basis, j));
        c.parabolic_distance = detail::line_distance(perron, detail::column(exterior_power(point.rep, j), 0));
        checks.push_back(c);
    }
    return checks;
}

/// zeta_J(g) by splitting zeta(g), with the Perron-line verdict.
inline Classification classify(const RationalMatrix& g, const ParabolicIndex& J, const FlagConfig& config = {}) {
    const std::size_t n = g.rows();
    detail::check_parabolic_index(J, n);
    const FlagPoint<double> borel = zeta(g, config);
    Classification out;
    out.point = {J, split_cell(borel.rep, J).parabolic};
    const RealMatrix gf = matrix_cast<double>(g);
    out.checks = perron_line_checks(gf, eigen_flag(gf, config), out.point, config);
    for (const auto& c : out.checks) {
        out.consistent = out.consistent && c.perron_positive && c.eigenflag_distance <= config.line_tolerance &&
                         c.parabolic_distance <= config.line_tolerance;
    }
    return out;
}

/// The unique P in P^J_{>0} containing g. Throws DomainError if the
/// splitting and Perron-line routes disagree.
inline ParabolicPoint<double> zeta_j(const RationalMatrix& g, const ParabolicIndex& J, const FlagConfig& config = {}) {
    Classification c = classify(g, J, config);
    if (!c.consistent) throw DomainError("zeta_J: Perron-line cross-check failed (distance " + std::to_string(c.max_distance()) + ")");
    return std::move(c.point);
}

/// rep^-1 m rep lies in P_J+ (entries below the Levi blocks vanish, to a
/// relative tolerance).
inline bool in_standard_parabolic(const RealMatrix& m, const ParabolicIndex& J, double tolerance) {
    const double bound = tolerance * std::max(1.0, max_abs(m));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t k = 0; k < i; ++k)
            if (!detail::same_block(J, i, k) && std::abs(m(i, k)) > bound) return false;
    return true;
}

/// The Borel through g lies in the parabolic through g: split_cell of
/// zeta(g) agrees with zeta_J(g), g is in P, and the Perron lines agree.
inline bool check_partition(const RationalMatrix& g, const ParabolicIndex& J, const FlagConfig& config = {}) {
    const FlagPoint<double> borel = zeta(g, config);
    const Classification c = classify(g, J, config);
    if (!c.consistent) return false;
    const RealMatrix head = split_cell(borel.rep, J).parabolic;
    if (max_abs_diff(head, c.point.rep) > config.line_tolerance) return false;
    const RealMatrix conj = inverse(c.point.rep) * matrix_cast<double>(g) * c.point.rep;
    return in_standard_parabolic(conj, J, config.fibre_tolerance);
}

/// gamma_P: v -> P.rep * v, a point of B_{>0} inside P.
inline FlagPoint<Rational> gamma_p_point(const ParabolicPoint<Rational>& P, const LusztigParams<Rational>& vparams) {
    const std::size_t n = P.rep.rows();
    detail::check_parabolic_index(P.J, n);
    if (vparams.word != reduced_word(longest_element(P.J, n))) {
        throw std::invalid_argument("gamma_p_point: parameters must be on the canonical word of w0^J");
    }
    for (const auto& p : vparams.params)
        if (!(p > 0)) throw std::invalid_argument("gamma_p_point: parameters must be positive");
    FlagPoint<Rational> out{P.rep * evaluate_params(vparams, Triangle::Lower, n)};
    if (!is_totally_positive_unitriangular(out.rep, Triangle::Lower).member) {
        throw std::logic_error("gamma_p_point: product left U-_{>0}");
    }
    return out;
}

/// A point of P^J_{>0}: positive parameters on the canonical word of w0 w0^J.
inline ParabolicPoint<Rational> sample_parabolic_point(std::size_t n, const ParabolicIndex& J, std::uint64_t seed) {
    const Permutation head = longest_element(n) * longest_element(J, n);
    return {J, evaluate_params(sample_positive<Rational>(head, seed), Triangle::Lower, n)};
}

/// g = u' v t u'^-1 in B cap G_{>0}, built from its coordinates.
struct FibreSample {
    FlagPoint<Rational> B;
    LusztigParams<Rational> v;
    std::vector<Rational> torus;  // diagonal of t
    ZVector<Rational> zvec;
    RationalMatrix g;
};

/// t^-1 has coordinates s_m^n, so t has a rational diagonal; the s_m are
/// scaled jointly by 5/4 until t^-1 lies in T_{(u'v)^-,u'}.
inline FibreSample sample_fibre_element(std::size_t n, std::uint64_t seed) {
    FibreSample out;
    out.B.rep = sample_unipotent(n, Triangle::Lower, derive_seed(seed, 1));
    out.v = sample_positive<Rational>(longest_element(n), derive_seed(seed, 2));
    const RationalMatrix v = evaluate_params(out.v, Triangle::Upper, n);
    const RationalMatrix lower = gauss_decompose(RationalMatrix(out.B.rep * v)).lower;
    Rng rng(derive_seed(seed, 3));
    std::vector<Rational> s;
    for (std::size_t m = 0; m + 1 < n; ++m) s.push_back(sample_positive_rational(rng));
    for (int attempt = 0;; ++attempt) {
        if (attempt == 1024) throw std::logic_error("sample_fibre_element: no feasible torus point found");
        std::vector<Rational> tau;
        for (const auto& sm : s) {
            Rational p(1);
            for (std::size_t e = 0; e < n; ++e) p *= sm;
            tau.push_back(p);
        }
        const TorusPoint<Rational> t_inv(tau);
        if (torus_set_membership(lower, out.B.rep, t_inv).member) {
            out.torus = t_inv.inverse().diagonal();
            out.zvec = theta_forward(lower, out.B.rep, t_inv);
            break;
        }
        for (auto& sm : s) sm *= Rational(5, 4);
    }
    out.g = out.B.rep * v * RationalMatrix::diagonal(out.torus) * inverse(out.B.rep);
    return out;
}

}  // namespace tpflag

#endif  // TPFLAG_FLAG_HPP
