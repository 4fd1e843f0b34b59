#ifndef TPFLAG_MATRIX_HPP
#define TPFLAG_MATRIX_HPP

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace tpflag {

/// Largest dimension accepted for group elements (SL_n, n <= 8).
inline constexpr std::size_t kMaxDimension = 8;

/// Strictly increasing list of 0-based row or column indices.
using IndexSet = std::vector<std::size_t>;

/// Dense row-major matrix over a field-like scalar (Rational or double).
template <typename T>
class Matrix {
public:
    using Scalar = T;

    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}

    Matrix(std::initializer_list<std::initializer_list<T>> init) : rows_(init.size()) {
        cols_ = rows_ == 0 ? 0 : init.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_) throw std::invalid_argument("ragged matrix initializer");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    static Matrix diagonal(const std::vector<T>& diag) {
        Matrix m(diag.size(), diag.size());
        for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }
    friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using RationalMatrix = Matrix<Rational>;
using RealMatrix = Matrix<double>;

template <typename T>
Matrix<T> operator*(const Matrix<T>& a, const Matrix<T>& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: shape mismatch");
    Matrix<T> c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            if (a(i, k) == 0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
        }
    }
    return c;
}

template <typename T>
Matrix<T> operator-(const Matrix<T>& a, const Matrix<T>& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("matrix difference: shape mismatch");
    Matrix<T> c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
    return c;
}

template <typename T>
Matrix<T> transpose(const Matrix<T>& m) {
    Matrix<T> t(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
    return t;
}

template <typename U, typename T>
Matrix<U> matrix_cast(const Matrix<T>& m) {
    Matrix<U> out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if constexpr (std::is_same_v<U, T>) {
                out(i, j) = m(i, j);
            } else {
                out(i, j) = static_cast<U>(to_double(m(i, j)));
            }
        }
    }
    return out;
}

/// Largest absolute entry.
template <typename T>
double max_abs(const Matrix<T>& m) {
    double best = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) best = std::max(best, std::abs(to_double(m(i, j))));
    return best;
}

template <typename T>
double max_abs_diff(const Matrix<T>& a, const Matrix<T>& b) {
    return max_abs(a - b);
}

namespace detail {

/// Determinant of a square matrix by Gaussian elimination, consuming `a`.
/// Exact scalars pivot on the first nonzero entry, floats on the largest.
template <typename T>
T eliminate_determinant(Matrix<T> a) {
    const std::size_t n = a.rows();
    T det(1);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = n;
        if constexpr (is_exact_v<T>) {
            for (std::size_t i = k; i < n; ++i) {
                if (a(i, k) != 0) {
                    pivot = i;
                    break;
                }
            }
        } else {
            T best(0);
            for (std::size_t i = k; i < n; ++i) {
                if (abs_of(a(i, k)) > best) {
                    best = abs_of(a(i, k));
                    pivot = i;
                }
            }
        }
        if (pivot == n) return T(0);
        if (pivot != k) {
            for (std::size_t j = k; j < n; ++j) std::swap(a(k, j), a(pivot, j));
            det = -det;
        }
        det *= a(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            if (a(i, k) == 0) continue;
            const T factor = a(i, k) / a(k, k);
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= factor * a(k, j);
        }
    }
    return det;
}

inline void check_index_set(const IndexSet& set, std::size_t bound, const char* what) {
    for (std::size_t k = 0; k < set.size(); ++k) {
        if (set[k] >= bound) throw std::out_of_range(std::string(what) + " index out of range");
        if (k > 0 && set[k] <= set[k - 1]) throw std::invalid_argument(std::string(what) + " indices must be strictly increasing");
    }
}

}  // namespace detail

template <typename T>
T determinant(const Matrix<T>& m) {
    if (!m.square()) throw std::invalid_argument("determinant of a non-square matrix");
    return detail::eliminate_determinant(m);
}

template <typename T>
Matrix<T> submatrix(const Matrix<T>& m, const IndexSet& rows, const IndexSet& cols) {
    Matrix<T> s(rows.size(), cols.size());
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = 0; b < cols.size(); ++b) s(a, b) = m(rows[a], cols[b]);
    return s;
}

/// Determinant of the submatrix on the given rows and columns.
template <typename T>
T minor(const Matrix<T>& m, const IndexSet& rows, const IndexSet& cols) {
    if (rows.size() != cols.size()) throw std::invalid_argument("minor: row and column sets differ in size");
    if (rows.empty()) throw std::invalid_argument("minor: empty index set");
    detail::check_index_set(rows, m.rows(), "row");
    detail::check_index_set(cols, m.cols(), "column");
    if (rows.size() == 1) return m(rows[0], cols[0]);
    if (rows.size() == 2) {
        return T(m(rows[0], cols[0]) * m(rows[1], cols[1]) - m(rows[0], cols[1]) * m(rows[1], cols[0]));
    }
    return detail::eliminate_determinant(submatrix(m, rows, cols));
}

/// Inverse by Gauss-Jordan elimination.
template <typename T>
Matrix<T> inverse(const Matrix<T>& m) {
    if (!m.square()) throw std::invalid_argument("inverse of a non-square matrix");
    const std::size_t n = m.rows();
    Matrix<T> a = m;
    Matrix<T> inv = Matrix<T>::identity(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = n;
        T best(0);
        for (std::size_t i = k; i < n; ++i) {
            if constexpr (is_exact_v<T>) {
                if (a(i, k) != 0) {
                    pivot = i;
                    break;
                }
            } else if (abs_of(a(i, k)) > best) {
                best = abs_of(a(i, k));
                pivot = i;
            }
        }
        if (pivot == n) throw DomainError("inverse of a singular matrix");
        if (pivot != k) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(k, j), a(pivot, j));
                std::swap(inv(k, j), inv(pivot, j));
            }
        }
        const T scale = T(1) / a(k, k);
        for (std::size_t j = 0; j < n; ++j) {
            a(k, j) *= scale;
            inv(k, j) *= scale;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k || a(i, k) == 0) continue;
            const T factor = a(i, k);
            for (std::size_t j = 0; j < n; ++j) {
                a(i, j) -= factor * a(k, j);
                inv(i, j) -= factor * inv(k, j);
            }
        }
    }
    return inv;
}

enum class Triangle { Lower, Upper };

template <typename T>
bool is_unit_triangular(const Matrix<T>& m, Triangle which) {
    if (!m.square()) return false;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (i == j) {
                if (m(i, j) != 1) return false;
            } else if ((which == Triangle::Lower && j > i) || (which == Triangle::Upper && i > j)) {
                if (m(i, j) != 0) return false;
            }
        }
    }
    return true;
}

template <typename T>
bool is_diagonal(const Matrix<T>& m) {
    if (!m.square()) return false;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (i != j && m(i, j) != 0) return false;
    return true;
}

/// All k-element subsets of {0..n-1}, lexicographic order.
inline std::vector<IndexSet> subsets_lex(std::size_t n, std::size_t k) {
    std::vector<IndexSet> out;
    if (k > n) return out;
    IndexSet cur(k);
    for (std::size_t i = 0; i < k; ++i) cur[i] = i;
    while (true) {
        out.push_back(cur);
        std::size_t i = k;
        while (i > 0 && cur[i - 1] == n - k + (i - 1)) --i;
        if (i == 0) break;
        ++cur[i - 1];
        for (std::size_t j = i; j < k; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

/// All k-element subsets of {0..n-1} in colexicographic order: sets are
/// compared by their largest element first. For n = 4, k = 2:
/// {0,1} {0,2} {1,2} {0,3} {1,3} {2,3}.
inline std::vector<IndexSet> subsets_colex(std::size_t n, std::size_t k) {
    std::vector<IndexSet> out = subsets_lex(n, k);
    std::sort(out.begin(), out.end(), [](const IndexSet& a, const IndexSet& b) {
        return std::lexicographical_compare(a.rbegin(), a.rend(), b.rbegin(), b.rend());
    });
    return out;
}

/// Position of `set` in subsets_colex(n, |set|): sum of C(set[i], i+1).
inline std::size_t colex_rank(const IndexSet& set) {
    std::size_t rank = 0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        std::size_t binom = 1;
        const std::size_t top = set[i];
        const std::size_t choose = i + 1;
        if (top < choose) continue;
        for (std::size_t r = 1; r <= choose; ++r) binom = binom * (top - choose + r) / r;
        rank += binom;
    }
    return rank;
}

inline std::size_t binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    std::size_t b = 1;
    for (std::size_t r = 1; r <= k; ++r) b = b * (n - k + r) / r;
    return b;
}

/// The interval {first, ..., first+count-1}.
inline IndexSet index_range(std::size_t first, std::size_t count) {
    IndexSet s(count);
    for (std::size_t i = 0; i < count; ++i) s[i] = first + i;
    return s;
}

}  // namespace tpflag

#endif  // TPFLAG_MATRIX_HPP
