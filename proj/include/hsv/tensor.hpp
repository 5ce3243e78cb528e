#pragma once

// Dense exact matrices, exact Gaussian elimination, two-site block tensors
// and the multi-site embedding / partial-trace helpers used by the
// verification engine.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hsv/errors.hpp"
#include "hsv/scalar.hpp"

namespace hsv {

/// Row-major dense matrix over an exact field T.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, T(0)) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }
  static Matrix diagonal(const std::vector<T>& d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }

  /// Product skipping exact zeros of the left factor and of B's rows.
  friend Matrix operator*(const Matrix& A, const Matrix& B) {
    if (A.cols_ != B.rows_) throw InvalidArgument("matrix product: shape mismatch");
    Matrix C(A.rows_, B.cols_);
    for (std::size_t r = 0; r < A.rows_; ++r)
      for (std::size_t k = 0; k < A.cols_; ++k) {
        const T& a = A(r, k);
        if (is_zero(a)) continue;
        for (std::size_t c = 0; c < B.cols_; ++c) {
          const T& b = B(k, c);
          if (!is_zero(b)) C(r, c) += a * b;
        }
      }
    return C;
  }
  friend Matrix operator-(const Matrix& A, const Matrix& B) {
    if (A.rows_ != B.rows_ || A.cols_ != B.cols_) throw InvalidArgument("matrix difference: shape mismatch");
    Matrix C = A;
    for (std::size_t i = 0; i < C.a_.size(); ++i) C.a_[i] -= B.a_[i];
    return C;
  }
  friend Matrix operator*(const T& s, const Matrix& A) {
    Matrix C = A;
    for (auto& x : C.a_) x *= s;
    return C;
  }
  friend bool operator==(const Matrix& A, const Matrix& B) {
    return A.rows_ == B.rows_ && A.cols_ == B.cols_ && A.a_ == B.a_;
  }

  bool is_zero_matrix() const {
    for (const auto& x : a_)
      if (!is_zero(x)) return false;
    return true;
  }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  /// Exact inverse by Gauss-Jordan elimination on the first nonzero pivot.
  /// Throws SingularParameter if the matrix is not invertible.
  Matrix inverse() const {
    if (rows_ != cols_) throw InvalidArgument("inverse of a non-square matrix");
    std::size_t n = rows_;
    Matrix a = *this, inv = identity(n);
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t p = c;
      while (p < n && is_zero(a(p, c))) ++p;
      if (p == n) throw SingularParameter("matrix is not invertible");
      if (p != c) {
        a.swap_rows(p, c);
        inv.swap_rows(p, c);
      }
      T pv = T(1) / a(c, c);
      for (std::size_t k = 0; k < n; ++k) {
        a(c, k) *= pv;
        inv(c, k) *= pv;
      }
      for (std::size_t r = 0; r < n; ++r) {
        if (r == c || is_zero(a(r, c))) continue;
        T f = a(r, c);
        for (std::size_t k = 0; k < n; ++k) {
          if (!is_zero(a(c, k))) a(r, k) -= f * a(c, k);
          if (!is_zero(inv(c, k))) inv(r, k) -= f * inv(c, k);
        }
      }
    }
    return inv;
  }

  void swap_rows(std::size_t r1, std::size_t r2) {
    for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(r1, c), (*this)(r2, c));
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<T> a_;
};

/// Largest |entry| of A - B, exact.
inline Scalar max_abs_difference(const Matrix<Scalar>& A, const Matrix<Scalar>& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) throw InvalidArgument("residual: shape mismatch");
  Scalar m;
  for (std::size_t r = 0; r < A.rows(); ++r)
    for (std::size_t c = 0; c < A.cols(); ++c) {
      Scalar d = (A(r, c) - B(r, c)).abs();
      if (m < d) m = d;
    }
  return m;
}

/// Sparse linear equation sum_c coef[c] x_c = rhs.
template <class T>
struct LinearEquation {
  std::vector<std::pair<std::size_t, T>> terms;
  T rhs = T(0);
};

template <class T>
struct LinearSolution {
  /// value[c] is set iff x_c is uniquely determined by the system.
  std::vector<std::optional<T>> value;
  std::vector<std::size_t> free_variables;
  bool consistent = true;
  std::size_t rank = 0;
};

/// Reduced row echelon solve. A variable counts as determined when its pivot
/// row has no entry in a free column, so partially determined systems still
/// report every pinned unknown.
template <class T>
LinearSolution<T> solve_linear(const std::vector<LinearEquation<T>>& eqs, std::size_t unknowns) {
  std::size_t n = eqs.size(), w = unknowns + 1;
  Matrix<T> A(n, w);
  for (std::size_t r = 0; r < n; ++r) {
    for (const auto& [c, v] : eqs[r].terms) {
      if (c >= unknowns) throw InvalidArgument("linear equation references an unknown out of range");
      A(r, c) += v;
    }
    A(r, unknowns) = eqs[r].rhs;
  }
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t c = 0; c < unknowns && row < n; ++c) {
    std::size_t p = row;
    while (p < n && is_zero(A(p, c))) ++p;
    if (p == n) continue;
    A.swap_rows(p, row);
    T pv = T(1) / A(row, c);
    for (std::size_t k = c; k < w; ++k) A(row, k) *= pv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == row || is_zero(A(r, c))) continue;
      T f = A(r, c);
      for (std::size_t k = c; k < w; ++k)
        if (!is_zero(A(row, k))) A(r, k) -= f * A(row, k);
    }
    pivots.push_back(c);
    ++row;
  }
  LinearSolution<T> sol;
  sol.rank = pivots.size();
  sol.value.assign(unknowns, std::nullopt);
  for (std::size_t r = row; r < n; ++r)
    if (!is_zero(A(r, unknowns))) sol.consistent = false;
  std::vector<bool> is_pivot(unknowns, false);
  for (auto c : pivots) is_pivot[c] = true;
  for (std::size_t c = 0; c < unknowns; ++c)
    if (!is_pivot[c]) sol.free_variables.push_back(c);
  for (std::size_t r = 0; r < pivots.size(); ++r) {
    bool pinned = true;
    for (auto f : sol.free_variables)
      if (!is_zero(A(r, f))) {
        pinned = false;
        break;
      }
    if (pinned) sol.value[pivots[r]] = A(r, unknowns);
  }
  return sol;
}

/// Operator on V_I (x) V_J stored as a matrix: row (i, j), column (i', j'),
/// flattened as i*(J+1)+j. Entry at(i,j,i',j') is R^{i',j'}_{i,j}.
template <class T>
class BlockTensor {
 public:
  BlockTensor() = default;
  BlockTensor(int I, int J) : I_(I), J_(J), m_((I + 1) * (J + 1), (I + 1) * (J + 1)) {}
  BlockTensor(int I, int J, Matrix<T> m) : I_(I), J_(J), m_(std::move(m)) {
    std::size_t d = static_cast<std::size_t>((I + 1) * (J + 1));
    if (m_.rows() != d || m_.cols() != d) throw InvalidArgument("block tensor: matrix shape mismatch");
  }

  int first_weight() const { return I_; }
  int second_weight() const { return J_; }
  std::size_t dim() const { return m_.rows(); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i * (J_ + 1) + j); }

  T& at(int i, int j, int ip, int jp) { return m_(index(i, j), index(ip, jp)); }
  const T& at(int i, int j, int ip, int jp) const { return m_(index(i, j), index(ip, jp)); }

  const Matrix<T>& matrix() const { return m_; }

  /// P A P: this operator on V_I (x) V_J read as an operator on V_J (x) V_I.
  BlockTensor swapped() const {
    BlockTensor out(J_, I_);
    for (int i = 0; i <= I_; ++i)
      for (int j = 0; j <= J_; ++j)
        for (int ip = 0; ip <= I_; ++ip)
          for (int jp = 0; jp <= J_; ++jp) out.at(j, i, jp, ip) = at(i, j, ip, jp);
    return out;
  }

  /// Partial transpose in the first factor: exchanges i and i'.
  BlockTensor partial_transpose_first() const {
    BlockTensor out(I_, J_);
    for (int i = 0; i <= I_; ++i)
      for (int j = 0; j <= J_; ++j)
        for (int ip = 0; ip <= I_; ++ip)
          for (int jp = 0; jp <= J_; ++jp) out.at(i, j, ip, jp) = at(ip, j, i, jp);
    return out;
  }

  /// True iff every entry with i+j != i'+j' is zero.
  bool conserves_charge() const {
    for (int i = 0; i <= I_; ++i)
      for (int j = 0; j <= J_; ++j)
        for (int ip = 0; ip <= I_; ++ip)
          for (int jp = 0; jp <= J_; ++jp)
            if (i + j != ip + jp && !is_zero(at(i, j, ip, jp))) return false;
    return true;
  }

  friend bool operator==(const BlockTensor& a, const BlockTensor& b) {
    return a.I_ == b.I_ && a.J_ == b.J_ && a.m_ == b.m_;
  }

 private:
  int I_ = 0, J_ = 0;
  Matrix<T> m_;
};

/// A (x) 1 on V_I (x) V_J given A on V_I.
template <class T>
Matrix<T> kron_identity_right(const Matrix<T>& A, std::size_t dim_right) {
  std::size_t dl = A.rows();
  Matrix<T> M(dl * dim_right, dl * dim_right);
  for (std::size_t i = 0; i < dl; ++i)
    for (std::size_t ip = 0; ip < dl; ++ip) {
      if (is_zero(A(i, ip))) continue;
      for (std::size_t j = 0; j < dim_right; ++j) M(i * dim_right + j, ip * dim_right + j) = A(i, ip);
    }
  return M;
}

/// 1 (x) A on V_I (x) V_J given A on V_J.
template <class T>
Matrix<T> kron_identity_left(std::size_t dim_left, const Matrix<T>& A) {
  std::size_t dr = A.rows();
  Matrix<T> M(dim_left * dr, dim_left * dr);
  for (std::size_t i = 0; i < dim_left; ++i)
    for (std::size_t j = 0; j < dr; ++j)
      for (std::size_t jp = 0; jp < dr; ++jp) M(i * dr + j, i * dr + jp) = A(j, jp);
  return M;
}

/// Tensor-product space V_{d0} (x) V_{d1} (x) ... with row-major flattening.
class ProductSpace {
 public:
  explicit ProductSpace(std::vector<std::size_t> dims) : dims_(std::move(dims)), stride_(dims_.size()) {
    total_ = 1;
    for (std::size_t k = dims_.size(); k-- > 0;) {
      stride_[k] = total_;
      total_ *= dims_[k];
    }
  }
  std::size_t size() const { return total_; }
  std::size_t factors() const { return dims_.size(); }
  std::size_t dim(std::size_t k) const { return dims_[k]; }
  std::size_t digit(std::size_t state, std::size_t k) const { return state / stride_[k] % dims_[k]; }
  std::size_t with_digit(std::size_t state, std::size_t k, std::size_t v) const {
    return state - digit(state, k) * stride_[k] + v * stride_[k];
  }

  /// Two-site operator `op` on factors (a, b), flattened as s_a * dim(b) + s_b.
  template <class T>
  Matrix<T> embed(const Matrix<T>& op, std::size_t a, std::size_t b) const {
    if (a == b || op.rows() != dims_[a] * dims_[b]) throw InvalidArgument("embed: bad factor pair");
    Matrix<T> out(total_, total_);
    std::size_t db = dims_[b];
    for (std::size_t s = 0; s < total_; ++s) {
      std::size_t row = digit(s, a) * db + digit(s, b);
      for (std::size_t ta = 0; ta < dims_[a]; ++ta)
        for (std::size_t tb = 0; tb < db; ++tb) {
          const T& v = op(row, ta * db + tb);
          if (is_zero(v)) continue;
          out(s, with_digit(with_digit(s, a, ta), b, tb)) = v;
        }
    }
    return out;
  }

  /// One-site operator on factor a.
  template <class T>
  Matrix<T> embed(const Matrix<T>& op, std::size_t a) const {
    if (op.rows() != dims_[a]) throw InvalidArgument("embed: bad factor");
    Matrix<T> out(total_, total_);
    for (std::size_t s = 0; s < total_; ++s)
      for (std::size_t ta = 0; ta < dims_[a]; ++ta) {
        const T& v = op(digit(s, a), ta);
        if (!is_zero(v)) out(s, with_digit(s, a, ta)) = v;
      }
    return out;
  }

  /// Trace over factor 0.
  template <class T>
  Matrix<T> trace_first(const Matrix<T>& M) const {
    std::size_t da = dims_[0], rest = total_ / da;
    Matrix<T> out(rest, rest);
    for (std::size_t a = 0; a < da; ++a)
      for (std::size_t r = 0; r < rest; ++r)
        for (std::size_t c = 0; c < rest; ++c) out(r, c) += M(a * rest + r, a * rest + c);
    return out;
  }

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> stride_;
  std::size_t total_ = 1;
};

}  // namespace hsv
