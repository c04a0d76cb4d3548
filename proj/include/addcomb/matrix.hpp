#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "addcomb/error.hpp"
#include "addcomb/rational.hpp"

namespace addcomb {

/// Dense row-major matrix over an exact ring (Integer or Rational).
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const T& fill = T(0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  static Matrix fromRows(const std::vector<std::vector<T>>& rows) {
    if (rows.empty()) return Matrix();
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      detail::require(rows[i].size() == m.cols_, "ragged matrix rows");
      for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::vector<T> row(std::size_t i) const {
    return std::vector<T>(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_);
  }

  bool isZero() const {
    for (const auto& x : data_)
      if (x != 0) return false;
    return true;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) {
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] += b.data_[i];
    return a;
  }

  friend Matrix operator-(Matrix a, const Matrix& b) {
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] -= b.data_[i];
    return a;
  }

  friend Matrix operator*(const T& s, Matrix a) {
    for (auto& x : a.data_) x *= s;
    return a;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    detail::ensure(a.cols_ == b.rows_, "matrix product shape mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  const std::vector<T>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using RationalMatrix = Matrix<Rational>;
using IntegerMatrix = Matrix<Integer>;

/// Reduced row echelon form over Q, with pivot columns.
struct RowEchelon {
  RationalMatrix reduced;
  std::vector<std::size_t> pivots;
};

inline RowEchelon rowReduce(RationalMatrix m) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && m(p, c) == 0) ++p;
    if (p == m.rows()) continue;
    if (p != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
    Rational inv = 1 / m(r, c);
    for (std::size_t j = c; j < m.cols(); ++j) m(r, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c) == 0) continue;
      Rational f = m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return {std::move(m), std::move(pivots)};
}

inline std::size_t rank(const RationalMatrix& m) { return rowReduce(m).pivots.size(); }

/// Some solution of a x = b (free variables set to zero), or nullopt.
inline std::optional<std::vector<Rational>> solve(const RationalMatrix& a, const std::vector<Rational>& b) {
  detail::ensure(b.size() == a.rows(), "solve: rhs size mismatch");
  RationalMatrix aug(a.rows(), a.cols() + 1);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
    aug(i, a.cols()) = b[i];
  }
  RowEchelon e = rowReduce(std::move(aug));
  if (!e.pivots.empty() && e.pivots.back() == a.cols()) return std::nullopt;
  std::vector<Rational> x(a.cols(), 0);
  for (std::size_t r = 0; r < e.pivots.size(); ++r) x[e.pivots[r]] = e.reduced(r, a.cols());
  return x;
}

/// Basis of {x : a x = 0} over Q.
inline std::vector<std::vector<Rational>> nullspace(const RationalMatrix& a) {
  RowEchelon e = rowReduce(a);
  std::vector<bool> isPivot(a.cols(), false);
  for (auto p : e.pivots) isPivot[p] = true;
  std::vector<std::vector<Rational>> basis;
  for (std::size_t f = 0; f < a.cols(); ++f) {
    if (isPivot[f]) continue;
    std::vector<Rational> v(a.cols(), 0);
    v[f] = 1;
    for (std::size_t r = 0; r < e.pivots.size(); ++r) v[e.pivots[r]] = -e.reduced(r, f);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Incrementally maintained rational span with exact membership tests.
class RationalSpan {
 public:
  explicit RationalSpan(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t rank() const { return rows_.size(); }

  /// Adds v; returns true when it enlarged the span.
  bool add(std::vector<Rational> v) {
    reduce(v);
    std::size_t lead = 0;
    while (lead < dim_ && v[lead] == 0) ++lead;
    if (lead == dim_) return false;
    Rational inv = 1 / v[lead];
    for (auto& x : v) x *= inv;
    for (auto& row : rows_) {
      if (row.second[lead] == 0) continue;
      Rational f = row.second[lead];
      for (std::size_t j = 0; j < dim_; ++j) row.second[j] -= f * v[j];
    }
    rows_.emplace_back(lead, std::move(v));
    return true;
  }

  bool contains(std::vector<Rational> v) const {
    reduce(v);
    for (const auto& x : v)
      if (x != 0) return false;
    return true;
  }

  std::vector<std::vector<Rational>> basis() const {
    std::vector<std::vector<Rational>> out;
    for (const auto& row : rows_) out.push_back(row.second);
    return out;
  }

 private:
  void reduce(std::vector<Rational>& v) const {
    detail::ensure(v.size() == dim_, "RationalSpan: dimension mismatch");
    for (const auto& [lead, row] : rows_) {
      if (v[lead] == 0) continue;
      Rational f = v[lead];
      for (std::size_t j = 0; j < dim_; ++j) v[j] -= f * row[j];
    }
  }

  std::size_t dim_;
  std::vector<std::pair<std::size_t, std::vector<Rational>>> rows_;
};

/// Smith normal form U * M * V = D with U, V unimodular.
struct SmithForm {
  IntegerMatrix diagonal;
  IntegerMatrix left;   // U, rows x rows
  IntegerMatrix right;  // V, cols x cols
  std::size_t rank = 0;
  std::vector<Integer> invariantFactors;  // d_1 | d_2 | ... | d_rank, all positive
};

inline SmithForm smithNormalForm(const IntegerMatrix& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  IntegerMatrix d = m, u = IntegerMatrix::identity(rows), v = IntegerMatrix::identity(cols);
  auto swapRows = [&](std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols; ++j) std::swap(d(a, j), d(b, j));
    for (std::size_t j = 0; j < rows; ++j) std::swap(u(a, j), u(b, j));
  };
  auto swapCols = [&](std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < rows; ++i) std::swap(d(i, a), d(i, b));
    for (std::size_t i = 0; i < cols; ++i) std::swap(v(i, a), v(i, b));
  };
  // row_a -= f * row_b
  auto addRow = [&](std::size_t a, std::size_t b, const Integer& f) {
    for (std::size_t j = 0; j < cols; ++j) d(a, j) -= f * d(b, j);
    for (std::size_t j = 0; j < rows; ++j) u(a, j) -= f * u(b, j);
  };
  auto addCol = [&](std::size_t a, std::size_t b, const Integer& f) {
    for (std::size_t i = 0; i < rows; ++i) d(i, a) -= f * d(i, b);
    for (std::size_t i = 0; i < cols; ++i) v(i, a) -= f * v(i, b);
  };

  std::size_t t = 0;
  for (; t < rows && t < cols; ++t) {
    for (;;) {
      // Move the smallest nonzero entry of the trailing block to (t, t).
      std::size_t bi = rows, bj = cols;
      for (std::size_t i = t; i < rows; ++i)
        for (std::size_t j = t; j < cols; ++j)
          if (d(i, j) != 0 && (bi == rows || abs(d(i, j)) < abs(d(bi, bj)))) {
            bi = i;
            bj = j;
          }
      if (bi == rows) goto done;
      swapRows(t, bi);
      swapCols(t, bj);
      bool clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (d(i, t) == 0) continue;
        addRow(i, t, d(i, t) / d(t, t));
        if (d(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (d(t, j) == 0) continue;
        addCol(j, t, d(t, j) / d(t, t));
        if (d(t, j) != 0) clean = false;
      }
      if (!clean) continue;
      // Divisibility: d(t,t) must divide the whole trailing block.
      bool divides = true;
      for (std::size_t i = t + 1; i < rows && divides; ++i)
        for (std::size_t j = t + 1; j < cols; ++j)
          if (d(i, j) % d(t, t) != 0) {
            addRow(t, i, Integer(-1));
            divides = false;
            break;
          }
      if (divides) break;
    }
    if (d(t, t) < 0) {
      for (std::size_t j = 0; j < cols; ++j) d(t, j) = -d(t, j);
      for (std::size_t j = 0; j < rows; ++j) u(t, j) = -u(t, j);
    }
  }
done:
  SmithForm out{d, u, v, 0, {}};
  for (std::size_t i = 0; i < rows && i < cols; ++i) {
    if (d(i, i) == 0) break;
    out.invariantFactors.push_back(d(i, i));
    ++out.rank;
  }
  return out;
}

}  // namespace addcomb
