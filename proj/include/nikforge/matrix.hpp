#pragma once

// Dense matrices over Rational with exact reduced row echelon form,
// kernel bases, determinants. Row reduction is plain Gauss-Jordan with
// first-nonzero pivoting; all results are canonical given the input.

#include <cassert>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <vector>

#include "nikforge/rational.hpp"

namespace nikforge {

class Mat {
 public:
  Mat() : rows_(0), cols_(0) {}
  Mat(std::size_t r, std::size_t c) : rows_(r), cols_(c), a_(r * c) {}
  Mat(std::size_t r, std::size_t c, std::initializer_list<Rational> flat)
      : rows_(r), cols_(c), a_(flat) {
    if (a_.size() != r * c) throw std::invalid_argument("Mat: size mismatch");
  }
  Mat(std::initializer_list<std::initializer_list<Rational>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    a_.reserve(rows_ * cols_);
    for (auto& r : rows) {
      assert(r.size() == cols_);
      for (auto& v : r) a_.push_back(v);
    }
  }

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational& operator()(std::size_t i, std::size_t j) {
    assert(i < rows_ && j < cols_);
    return a_[i * cols_ + j];
  }
  const Rational& operator()(std::size_t i, std::size_t j) const {
    assert(i < rows_ && j < cols_);
    return a_[i * cols_ + j];
  }

  bool operator==(const Mat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }

  Mat transpose() const {
    Mat t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Mat operator*(const Mat& o) const {
    assert(cols_ == o.rows_);
    Mat r(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        const Rational& v = (*this)(i, k);
        if (v == 0) continue;
        for (std::size_t j = 0; j < o.cols_; ++j)
          if (o(k, j) != 0) r(i, j) += v * o(k, j);
      }
    return r;
  }

  Mat operator+(const Mat& o) const {
    assert(rows_ == o.rows_ && cols_ == o.cols_);
    Mat r = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] += o.a_[i];
    return r;
  }

  Mat operator-(const Mat& o) const {
    assert(rows_ == o.rows_ && cols_ == o.cols_);
    Mat r = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] -= o.a_[i];
    return r;
  }

  Mat scaled(const Rational& c) const {
    Mat r = *this;
    for (auto& v : r.a_) v *= c;
    return r;
  }

  std::vector<Rational> row(std::size_t i) const {
    return {a_.begin() + i * cols_, a_.begin() + (i + 1) * cols_};
  }

  void set_row(std::size_t i, const std::vector<Rational>& r) {
    assert(r.size() == cols_);
    std::copy(r.begin(), r.end(), a_.begin() + i * cols_);
  }

  std::vector<Rational> apply(const std::vector<Rational>& v) const {
    assert(v.size() == cols_);
    std::vector<Rational> r(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if ((*this)(i, j) != 0 && v[j] != 0) r[i] += (*this)(i, j) * v[j];
    return r;
  }

  bool is_zero() const {
    for (auto& v : a_)
      if (v != 0) return false;
    return true;
  }

  std::string str() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < rows_; ++i) {
      os << (i ? "\n[" : "[");
      for (std::size_t j = 0; j < cols_; ++j)
        os << (j ? " " : "") << rat_str((*this)(i, j));
      os << "]";
    }
    return os.str();
  }

 private:
  std::size_t rows_, cols_;
  std::vector<Rational> a_;
};

struct RrefResult {
  Mat reduced;                     // reduced row echelon form
  Mat transform;                   // invertible, transform * input = reduced
  std::vector<std::size_t> pivots; // pivot column per pivot row
  std::size_t rank = 0;
};

inline RrefResult rref(const Mat& m) {
  RrefResult res{m, Mat::identity(m.rows()), {}, 0};
  Mat& a = res.reduced;
  Mat& p = res.transform;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t piv = r;
    while (piv < m.rows() && a(piv, c) == 0) ++piv;
    if (piv == m.rows()) continue;
    if (piv != r) {
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(a(r, j), a(piv, j));
      for (std::size_t j = 0; j < m.rows(); ++j) std::swap(p(r, j), p(piv, j));
    }
    Rational inv = Rational(1) / a(r, c);
    for (std::size_t j = 0; j < m.cols(); ++j) a(r, j) *= inv;
    for (std::size_t j = 0; j < m.rows(); ++j) p(r, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || a(i, c) == 0) continue;
      Rational f = a(i, c);
      for (std::size_t j = 0; j < m.cols(); ++j)
        if (a(r, j) != 0) a(i, j) -= f * a(r, j);
      for (std::size_t j = 0; j < m.rows(); ++j)
        if (p(r, j) != 0) p(i, j) -= f * p(r, j);
    }
    res.pivots.push_back(c);
    ++r;
  }
  res.rank = r;
  return res;
}

inline std::size_t rank(const Mat& m) { return rref(m).rank; }

// Canonical kernel basis: one vector per free column, entry 1 at the free
// column, pivot entries filled from the reduced form.
inline std::vector<std::vector<Rational>> kernel_basis(const Mat& m) {
  RrefResult rr = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : rr.pivots) is_pivot[c] = true;
  std::vector<std::vector<Rational>> out;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    if (is_pivot[c]) continue;
    std::vector<Rational> v(m.cols());
    v[c] = 1;
    for (std::size_t i = 0; i < rr.rank; ++i) v[rr.pivots[i]] = -rr.reduced(i, c);
    out.push_back(std::move(v));
  }
  return out;
}

// Nonzero rows of the rref: canonical basis of the row space.
inline Mat row_space_basis(const Mat& m) {
  RrefResult rr = rref(m);
  Mat b(rr.rank, m.cols());
  for (std::size_t i = 0; i < rr.rank; ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) b(i, j) = rr.reduced(i, j);
  return b;
}

inline Rational det(const Mat& m) {
  assert(m.rows() == m.cols());
  Mat a = m;
  Rational d = 1;
  std::size_t n = m.rows();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && a(piv, c) == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      for (std::size_t j = c; j < n; ++j) std::swap(a(c, j), a(piv, j));
      d = -d;
    }
    d *= a(c, c);
    Rational inv = Rational(1) / a(c, c);
    for (std::size_t i = c + 1; i < n; ++i) {
      if (a(i, c) == 0) continue;
      Rational f = a(i, c) * inv;
      for (std::size_t j = c; j < n; ++j)
        if (a(c, j) != 0) a(i, j) -= f * a(c, j);
    }
  }
  return d;
}

// Solve M x = b; empty optional when inconsistent. Returns the canonical
// solution with free variables set to zero.
inline std::optional<std::vector<Rational>> solve(const Mat& m,
                                                  const std::vector<Rational>& b) {
  assert(b.size() == m.rows());
  Mat aug(m.rows(), m.cols() + 1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
    aug(i, m.cols()) = b[i];
  }
  RrefResult rr = rref(aug);
  for (auto c : rr.pivots)
    if (c == m.cols()) return std::nullopt;
  std::vector<Rational> x(m.cols());
  for (std::size_t i = 0; i < rr.pivots.size(); ++i)
    x[rr.pivots[i]] = rr.reduced(i, m.cols());
  return x;
}

}  // namespace nikforge
