#pragma once

#include <optional>
#include <type_traits>
#include <stdexcept>
#include <vector>

#include "ag/poly.hpp"
#include "ag/rational.hpp"

namespace ag {

/// Dense matrix over an exact ring (Rational or Poly).
template <class T>
class Mat {
 public:
  Mat() : rows_(0), cols_(0) {}
  Mat(int rows, int cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

  static Mat identity(int n, const T& one, const T& zero) {
    Mat m(n, n, zero);
    for (int i = 0; i < n; ++i) m(i, i) = one;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  T& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  const T& operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

  friend Mat operator+(const Mat& a, const Mat& b) {
    check_same_shape(a, b, "operator+");
    Mat r = a;
    for (std::size_t i = 0; i < r.data_.size(); ++i) r.data_[i] = r.data_[i] + b.data_[i];
    return r;
  }
  friend Mat operator-(const Mat& a, const Mat& b) {
    check_same_shape(a, b, "operator-");
    Mat r = a;
    for (std::size_t i = 0; i < r.data_.size(); ++i) r.data_[i] = r.data_[i] - b.data_[i];
    return r;
  }
  Mat operator-() const {
    Mat r = *this;
    for (auto& v : r.data_) v = -v;
    return r;
  }
  friend Mat operator*(const Mat& a, const Mat& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("Mat::operator*: shape mismatch");
    Mat r(a.rows_, b.cols_, a.zero_element());
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (is_zero_value(aik)) continue;
        for (int j = 0; j < b.cols_; ++j) {
          if (is_zero_value(b(k, j))) continue;
          r(i, j) = r(i, j) + aik * b(k, j);
        }
      }
    return r;
  }
  friend Mat operator*(const T& c, const Mat& m) {
    Mat r = m;
    for (auto& v : r.data_) v = c * v;
    return r;
  }

  Mat& operator+=(const Mat& o) { return *this = *this + o; }
  Mat& operator-=(const Mat& o) { return *this = *this - o; }

  bool operator==(const Mat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

  Mat transpose() const {
    Mat r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  T trace() const {
    if (rows_ != cols_) throw std::invalid_argument("Mat::trace: not square");
    T t = zero_element();
    for (int i = 0; i < rows_; ++i) t = t + (*this)(i, i);
    return t;
  }

  /// A zero of the same ring shape as the stored entries (Poly carries its
  /// variable count).
  T zero_element() const {
    if constexpr (std::is_same_v<T, Poly>)
      return data_.empty() ? Poly(0) : Poly(data_.front().nvars());
    else
      return T{};
  }

  bool is_zero() const {
    for (const auto& v : data_)
      if (!is_zero_value(v)) return false;
    return true;
  }

  static bool is_zero_value(const Rational& v) { return v == 0; }
  static bool is_zero_value(const Poly& v) { return v.is_zero(); }

 private:
  static void check_same_shape(const Mat& a, const Mat& b, const char* op) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
      throw std::invalid_argument(std::string("Mat::") + op + ": shape mismatch");
  }

  int rows_, cols_;
  std::vector<T> data_;
};

using QMatrix = Mat<Rational>;
using PolyMatrix = Mat<Poly>;

inline QMatrix commutator(const QMatrix& a, const QMatrix& b) { return a * b - b * a; }
inline PolyMatrix commutator(const PolyMatrix& a, const PolyMatrix& b) { return a * b - b * a; }

inline PolyMatrix poly_matrix(int rows, int cols, int nvars) {
  return PolyMatrix(rows, cols, Poly(nvars));
}

inline PolyMatrix poly_identity(int n, int nvars) {
  return PolyMatrix::identity(n, Poly::constant(nvars, 1), Poly(nvars));
}

/// ---- Exact linear algebra over the rationals ----

/// Reduced row echelon form in place. Returns pivot column indices.
/// Pivoting is deterministic (first nonzero entry), so downstream kernel
/// bases are canonical.
inline std::vector<int> rref(QMatrix& m) {
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < m.cols() && row < m.rows(); ++col) {
    int pivot = -1;
    for (int r = row; r < m.rows(); ++r)
      if (m(r, col) != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    if (pivot != row)
      for (int c = 0; c < m.cols(); ++c) std::swap(m(pivot, c), m(row, c));
    const Rational inv = 1 / m(row, col);
    for (int c = col; c < m.cols(); ++c) m(row, c) *= inv;
    for (int r = 0; r < m.rows(); ++r) {
      if (r == row || m(r, col) == 0) continue;
      const Rational f = m(r, col);
      for (int c = col; c < m.cols(); ++c) m(r, c) -= f * m(row, c);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

inline int rank(QMatrix m) { return static_cast<int>(rref(m).size()); }

/// Kernel basis in reduced echelon order: one vector per free column,
/// ordered by ascending free-column index, each carrying a 1 in its own
/// free coordinate.
inline std::vector<std::vector<Rational>> kernel_basis(QMatrix m) {
  const std::vector<int> pivots = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (int p : pivots) is_pivot[p] = true;
  std::vector<std::vector<Rational>> basis;
  for (int free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rational> v(m.cols(), Rational(0));
    v[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m(static_cast<int>(r), free);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Solves A x = b for one solution (free variables set to zero);
/// std::nullopt when inconsistent.
inline std::optional<std::vector<Rational>> solve(const QMatrix& a,
                                                  const std::vector<Rational>& b) {
  if (static_cast<int>(b.size()) != a.rows()) throw std::invalid_argument("solve: shape mismatch");
  QMatrix aug(a.rows(), a.cols() + 1);
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
    aug(i, a.cols()) = b[i];
  }
  const std::vector<int> pivots = rref(aug);
  if (!pivots.empty() && pivots.back() == a.cols()) return std::nullopt;
  std::vector<Rational> x(a.cols(), Rational(0));
  for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug(static_cast<int>(r), a.cols());
  return x;
}

/// Minimum-norm solution of the consistent system A x = b: the unique
/// solution lying in the row space of A. Computed as x = A^T y with
/// (A A^T) y = b.
inline std::optional<std::vector<Rational>> min_norm_solve(const QMatrix& a,
                                                           const std::vector<Rational>& b) {
  const QMatrix at = a.transpose();
  const QMatrix gram = a * at;
  auto y = solve(gram, b);
  if (!y) return std::nullopt;
  std::vector<Rational> x(a.cols(), Rational(0));
  for (int j = 0; j < a.cols(); ++j) {
    Rational s = 0;
    for (int i = 0; i < a.rows(); ++i) s += at(j, i) * (*y)[i];
    x[j] = s;
  }
  // A A^T y = b only guarantees A x = b when b is in the column space of A.
  for (int i = 0; i < a.rows(); ++i) {
    Rational s = 0;
    for (int j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    if (s != b[i]) return std::nullopt;
  }
  return x;
}

inline std::optional<QMatrix> inverse(const QMatrix& a);

/// Minimum-norm solutions of A x = b_j for a batch of right-hand sides.
/// The system is first reduced to an independent-row description (one rref
/// shared by the whole batch); the minimum-norm solution only depends on the
/// solution set, so the reduction is harmless. Returns std::nullopt when any
/// right-hand side is inconsistent.
inline std::optional<std::vector<std::vector<Rational>>> min_norm_solve_multi(
    const QMatrix& a, const std::vector<std::vector<Rational>>& bs) {
  const int rows = a.rows(), cols = a.cols();
  const int k = static_cast<int>(bs.size());
  QMatrix aug(rows, cols + k);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) aug(i, j) = a(i, j);
    for (int t = 0; t < k; ++t) aug(i, cols + t) = bs[t].at(i);
  }
  const std::vector<int> pivots = rref(aug);
  int r = 0;
  for (int p : pivots) {
    if (p >= cols) return std::nullopt;  // pivot in a right-hand side column
    ++r;
  }
  // Reduced full-row-rank system R x = c_t.
  QMatrix red(r, cols);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < cols; ++j) red(i, j) = aug(i, j);
  const QMatrix gram = red * red.transpose();
  const auto gram_inv = inverse(gram);
  if (!gram_inv) return std::nullopt;  // cannot happen for full row rank
  std::vector<std::vector<Rational>> xs(k, std::vector<Rational>(cols, Rational(0)));
  for (int t = 0; t < k; ++t) {
    std::vector<Rational> y(r, Rational(0));
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) y[i] += (*gram_inv)(i, j) * aug(j, cols + t);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < r; ++i) xs[t][j] += red(i, j) * y[i];
  }
  return xs;
}

inline PolyMatrix matrix_derivative(const PolyMatrix& m, int var) {
  PolyMatrix r(m.rows(), m.cols(), Poly(0));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r(i, j) = m(i, j).derivative(var);
  return r;
}

/// Exact inverse; std::nullopt when singular.
inline std::optional<QMatrix> inverse(const QMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("inverse: not square");
  const int n = a.rows();
  QMatrix aug(n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n + i) = 1;
  }
  const std::vector<int> pivots = rref(aug);
  if (static_cast<int>(pivots.size()) < n || pivots[n - 1] != n - 1) return std::nullopt;
  QMatrix inv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

}  // namespace ag
