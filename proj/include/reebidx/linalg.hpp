#pragma once

#include <Eigen/Dense>

#include <initializer_list>
#include <vector>

#include "reebidx/errors.hpp"
#include "reebidx/rational.hpp"

namespace reebidx {

/// Dense matrix over the rationals, row-major.
class RatMatrix {
public:
  RatMatrix() = default;
  RatMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(size_t(rows) * cols, 0) {
    require(rows >= 0 && cols >= 0, ErrorKind::structural, "negative matrix shape");
  }

  static RatMatrix identity(int n) {
    RatMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  static RatMatrix from_rows(std::initializer_list<std::initializer_list<Rational>> rows) {
    int r = int(rows.size());
    int c = r ? int(rows.begin()->size()) : 0;
    RatMatrix m(r, c);
    int i = 0;
    for (const auto& row : rows) {
      require(int(row.size()) == c, ErrorKind::structural, "ragged matrix literal");
      int j = 0;
      for (const auto& x : row) m(i, j++) = x;
      ++i;
    }
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  Rational& operator()(int i, int j) { return a_[size_t(i) * cols_ + j]; }
  const Rational& operator()(int i, int j) const { return a_[size_t(i) * cols_ + j]; }

  friend RatMatrix operator*(const RatMatrix& x, const RatMatrix& y) {
    require(x.cols_ == y.rows_, ErrorKind::structural, "matrix product shape mismatch");
    RatMatrix out(x.rows_, y.cols_);
    for (int i = 0; i < x.rows_; ++i)
      for (int k = 0; k < x.cols_; ++k) {
        if (x(i, k) == 0) continue;
        for (int j = 0; j < y.cols_; ++j) out(i, j) += x(i, k) * y(k, j);
      }
    return out;
  }

  friend RatMatrix operator+(const RatMatrix& x, const RatMatrix& y) {
    require(x.rows_ == y.rows_ && x.cols_ == y.cols_, ErrorKind::structural,
            "matrix sum shape mismatch");
    RatMatrix out = x;
    for (size_t i = 0; i < out.a_.size(); ++i) out.a_[i] += y.a_[i];
    return out;
  }

  friend RatMatrix operator-(const RatMatrix& x, const RatMatrix& y) {
    require(x.rows_ == y.rows_ && x.cols_ == y.cols_, ErrorKind::structural,
            "matrix difference shape mismatch");
    RatMatrix out = x;
    for (size_t i = 0; i < out.a_.size(); ++i) out.a_[i] -= y.a_[i];
    return out;
  }

  friend RatMatrix operator*(const RatMatrix& x, const Rational& c) {
    RatMatrix out = x;
    for (auto& v : out.a_) v *= c;
    return out;
  }

  friend bool operator==(const RatMatrix& x, const RatMatrix& y) {
    return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.a_ == y.a_;
  }

  RatMatrix transpose() const {
    RatMatrix out(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
  }

  bool is_square() const { return rows_ == cols_; }

  bool is_symmetric() const {
    if (!is_square()) return false;
    for (int i = 0; i < rows_; ++i)
      for (int j = i + 1; j < cols_; ++j)
        if ((*this)(i, j) != (*this)(j, i)) return false;
    return true;
  }

  Eigen::MatrixXd to_eigen() const {
    Eigen::MatrixXd m(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) m(i, j) = to_double((*this)(i, j));
    return m;
  }

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Rational> a_;
};

/// Matrix of the standard symplectic form on R^{2n} with coordinates ordered
/// (q1, p1, q2, p2, ...): block diagonal copies of [[0,-1],[1,0]].
inline RatMatrix standard_J(int dim2n) {
  require(dim2n > 0 && dim2n % 2 == 0, ErrorKind::structural, "dimension must be even");
  RatMatrix j(dim2n, dim2n);
  for (int b = 0; b < dim2n / 2; ++b) {
    j(2 * b, 2 * b + 1) = -1;
    j(2 * b + 1, 2 * b) = 1;
  }
  return j;
}

inline int rat_rank(RatMatrix m) {
  int rank = 0;
  int row = 0;
  for (int col = 0; col < m.cols() && row < m.rows(); ++col) {
    int pivot = -1;
    for (int i = row; i < m.rows(); ++i)
      if (m(i, col) != 0) { pivot = i; break; }
    if (pivot < 0) continue;
    if (pivot != row)
      for (int j = 0; j < m.cols(); ++j) std::swap(m(pivot, j), m(row, j));
    for (int i = row + 1; i < m.rows(); ++i) {
      if (m(i, col) == 0) continue;
      Rational f = m(i, col) / m(row, col);
      for (int j = col; j < m.cols(); ++j) m(i, j) -= f * m(row, j);
    }
    ++row;
    ++rank;
  }
  return rank;
}

inline Rational rat_det(RatMatrix m) {
  require(m.is_square(), ErrorKind::structural, "determinant of non-square matrix");
  Rational det = 1;
  for (int col = 0; col < m.cols(); ++col) {
    int pivot = -1;
    for (int i = col; i < m.rows(); ++i)
      if (m(i, col) != 0) { pivot = i; break; }
    if (pivot < 0) return 0;
    if (pivot != col) {
      for (int j = 0; j < m.cols(); ++j) std::swap(m(pivot, j), m(col, j));
      det = -det;
    }
    det *= m(col, col);
    for (int i = col + 1; i < m.rows(); ++i) {
      if (m(i, col) == 0) continue;
      Rational f = m(i, col) / m(col, col);
      for (int j = col; j < m.cols(); ++j) m(i, j) -= f * m(col, j);
    }
  }
  return det;
}

inline RatMatrix rat_inverse(const RatMatrix& m) {
  require(m.is_square(), ErrorKind::structural, "inverse of non-square matrix");
  int n = m.rows();
  RatMatrix work = m;
  RatMatrix inv = RatMatrix::identity(n);
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int i = col; i < n; ++i)
      if (work(i, col) != 0) { pivot = i; break; }
    require(pivot >= 0, ErrorKind::domain, "singular matrix has no inverse");
    if (pivot != col)
      for (int j = 0; j < n; ++j) {
        std::swap(work(pivot, j), work(col, j));
        std::swap(inv(pivot, j), inv(col, j));
      }
    Rational d = work(col, col);
    for (int j = 0; j < n; ++j) {
      work(col, j) /= d;
      inv(col, j) /= d;
    }
    for (int i = 0; i < n; ++i) {
      if (i == col || work(i, col) == 0) continue;
      Rational f = work(i, col);
      for (int j = 0; j < n; ++j) {
        work(i, j) -= f * work(col, j);
        inv(i, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

struct Signature {
  int positive = 0;
  int negative = 0;
  int zero = 0;

  int value() const { return positive - negative; }
};

/// Sylvester signature of a symmetric rational matrix by exact congruence
/// reduction. When every remaining diagonal entry vanishes but some
/// off-diagonal entry does not, adding row+column j to i restores a nonzero
/// pivot without changing the congruence class.
inline Signature symmetric_signature(RatMatrix a) {
  require(a.is_symmetric(), ErrorKind::structural, "signature of non-symmetric matrix");
  int n = a.rows();
  Signature sig;
  std::vector<bool> done(n, false);
  auto eliminate = [&](int p) {
    Rational d = a(p, p);
    if (d > 0) ++sig.positive; else ++sig.negative;
    for (int i = 0; i < n; ++i) {
      if (done[i] || i == p || a(i, p) == 0) continue;
      Rational f = a(i, p) / d;
      for (int j = 0; j < n; ++j) {
        if (done[j] || j == p) continue;
        a(i, j) -= f * a(p, j);
      }
    }
    for (int i = 0; i < n; ++i) {
      if (i == p) continue;
      a(i, p) = 0;
      a(p, i) = 0;
    }
    done[p] = true;
  };
  for (;;) {
    int p = -1;
    for (int i = 0; i < n; ++i)
      if (!done[i] && a(i, i) != 0) { p = i; break; }
    if (p >= 0) { eliminate(p); continue; }
    int oi = -1, oj = -1;
    for (int i = 0; i < n && oi < 0; ++i) {
      if (done[i]) continue;
      for (int j = i + 1; j < n; ++j) {
        if (done[j]) continue;
        if (a(i, j) != 0) { oi = i; oj = j; break; }
      }
    }
    if (oi < 0) break;
    for (int j = 0; j < n; ++j) {
      if (done[j]) continue;
      a(oi, j) += a(oj, j);
    }
    for (int i = 0; i < n; ++i) {
      if (done[i]) continue;
      a(i, oi) += a(i, oj);
    }
  }
  for (int i = 0; i < n; ++i)
    if (!done[i]) ++sig.zero;
  return sig;
}

/// Exact test of M^T J M == J.
inline bool is_symplectic_exact(const RatMatrix& m) {
  if (!m.is_square() || m.rows() % 2 != 0) return false;
  RatMatrix j = standard_J(m.rows());
  return m.transpose() * j * m == j;
}

/// Inverse of a symplectic matrix from the form identity: M^{-1} = J^T M^T J.
inline RatMatrix symplectic_inverse(const RatMatrix& m) {
  RatMatrix j = standard_J(m.rows());
  return j.transpose() * m.transpose() * j;
}

/// Solves the square-or-overdetermined exact system A x = b by row reduction.
/// Returns nothing when inconsistent; reports free columns when the solution
/// is not unique.
struct LinearSolveResult {
  bool consistent = true;
  std::vector<int> free_columns;
  std::vector<Rational> solution;
};

inline LinearSolveResult solve_exact(const RatMatrix& a, const std::vector<Rational>& b) {
  require(int(b.size()) == a.rows(), ErrorKind::structural, "rhs length mismatch");
  int rows = a.rows(), cols = a.cols();
  RatMatrix aug(rows, cols + 1);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) aug(i, j) = a(i, j);
    aug(i, cols) = b[i];
  }
  std::vector<int> pivot_col_of_row;
  int row = 0;
  for (int col = 0; col < cols && row < rows; ++col) {
    int pivot = -1;
    for (int i = row; i < rows; ++i)
      if (aug(i, col) != 0) { pivot = i; break; }
    if (pivot < 0) continue;
    if (pivot != row)
      for (int j = 0; j <= cols; ++j) std::swap(aug(pivot, j), aug(row, j));
    Rational d = aug(row, col);
    for (int j = col; j <= cols; ++j) aug(row, j) /= d;
    for (int i = 0; i < rows; ++i) {
      if (i == row || aug(i, col) == 0) continue;
      Rational f = aug(i, col);
      for (int j = col; j <= cols; ++j) aug(i, j) -= f * aug(row, j);
    }
    pivot_col_of_row.push_back(col);
    ++row;
  }
  LinearSolveResult out;
  for (int i = row; i < rows; ++i)
    if (aug(i, cols) != 0) { out.consistent = false; return out; }
  std::vector<bool> is_pivot(cols, false);
  for (int c : pivot_col_of_row) is_pivot[c] = true;
  for (int c = 0; c < cols; ++c)
    if (!is_pivot[c]) out.free_columns.push_back(c);
  out.solution.assign(cols, 0);
  for (size_t r = 0; r < pivot_col_of_row.size(); ++r)
    out.solution[pivot_col_of_row[r]] = aug(int(r), cols);
  return out;
}

} // namespace reebidx
