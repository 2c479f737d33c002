#pragma once

// The rank-9 even lattice of signature (1,8) underlying the surfaces built
// by the pipeline: an ample-side generator L with L.L = 14, a class m with
// m.m = -4 meeting seven pairwise-orthogonal (-2)-classes n1..n7 in -1, all
// orthogonal to L. Derived classes: the eighth node n8 = 2m - (n1+...+n7),
// the polarization H = L - m of square 10, and the residual class
// A = L - 2m of square -2 meeting H in 6.
//
// Class vectors are integer coordinate tuples in the ordered basis
// (L, m, n1..n7). The search routine enumerates every class with prescribed
// self-intersection and H-degree, with an exhaustiveness certificate
// (positive-definiteness pivots of the reduced quadratic form plus the
// completed-square radius).

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nikforge/matrix.hpp"
#include "nikforge/rational.hpp"

namespace nikforge {

using ClassVec = std::vector<Int>;  // length 9: coefficients of L, m, n1..n7

class NikulinLattice {
 public:
  NikulinLattice() : gram_(9, 9) {
    gram_(0, 0) = 14;
    gram_(1, 1) = -4;
    for (int i = 2; i < 9; ++i) {
      gram_(i, i) = -2;
      gram_(1, i) = gram_(i, 1) = -1;
    }
  }

  const Mat& gram() const { return gram_; }

  Int pair(const ClassVec& a, const ClassVec& b) const {
    Rational acc = 0;
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j)
        if (a[i] != 0 && b[j] != 0) acc += Rational(a[i]) * gram_(i, j) * b[j];
    return num(acc);
  }

  Int self(const ClassVec& a) const { return pair(a, a); }

  // basis and named classes
  static ClassVec cls_L() { return unit(0); }
  static ClassVec cls_m() { return unit(1); }
  static ClassVec cls_n(int i) { return unit(1 + i); }  // i = 1..7
  static ClassVec cls_n8() {
    ClassVec v(9, 0);
    v[1] = 2;
    for (int i = 2; i < 9; ++i) v[i] = -1;
    return v;
  }
  static ClassVec cls_H() {
    ClassVec v(9, 0);
    v[0] = 1;
    v[1] = -1;
    return v;
  }
  static ClassVec cls_A() {
    ClassVec v(9, 0);
    v[0] = 1;
    v[1] = -2;
    return v;
  }
  // the eight nodal classes: n1..n7 and the derived n8
  static ClassVec cls_N(int i) { return i <= 7 ? cls_n(i) : cls_n8(); }
  static ClassVec cls_Nsum() {
    ClassVec v(9, 0);
    for (int i = 1; i <= 8; ++i) v = add(v, cls_N(i));
    return v;
  }
  // computed from the defining formula, not simplified by hand
  static ClassVec cls_A_residual() {
    ClassVec v = scale(cls_H(), 2);
    v = sub(v, cls_A());
    v = sub(v, cls_Nsum());
    return v;
  }

  static ClassVec add(ClassVec a, const ClassVec& b) {
    for (int i = 0; i < 9; ++i) a[i] += b[i];
    return a;
  }
  static ClassVec sub(ClassVec a, const ClassVec& b) {
    for (int i = 0; i < 9; ++i) a[i] -= b[i];
    return a;
  }
  static ClassVec scale(ClassVec a, const Int& c) {
    for (auto& x : a) x *= c;
    return a;
  }

 private:
  static ClassVec unit(int k) {
    ClassVec v(9, 0);
    v[k] = 1;
    return v;
  }
  Mat gram_;
};

// signature of a symmetric rational matrix by congruence diagonalization
inline std::pair<int, int> signature(Mat m) {
  std::size_t n = m.rows();
  int pos = 0, neg = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t j = k + 1;
      while (j < n && m(k, j) == 0) ++j;
      if (j == n) continue;  // zero row: radical direction
      // make the pivot nonzero by a congruence row+col move; one of the two
      // signs must work since m(k,j) != 0
      for (int attempt = 0; attempt < 2; ++attempt) {
        Rational sgn = attempt == 0 ? 1 : -2;  // add then net subtract
        for (std::size_t i = 0; i < n; ++i) m(k, i) += sgn * m(j, i);
        for (std::size_t i = 0; i < n; ++i) m(i, k) += sgn * m(i, j);
        if (m(k, k) != 0) break;
      }
    }
    if (m(k, k) == 0) continue;
    Rational piv = m(k, k);
    (piv > 0 ? pos : neg) += 1;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (m(i, k) == 0) continue;
      Rational f = m(i, k) / piv;
      for (std::size_t c = 0; c < n; ++c) m(i, c) -= f * m(k, c);
      for (std::size_t r = 0; r < n; ++r) m(r, i) -= f * m(r, k);
    }
  }
  return {pos, neg};
}

// ---------------------------------------------------------------------------
// Search for all classes with given self-intersection and H-degree.
//
// Writing D = x L + y m + sum z_i n_i, sigma = sum z_i:
//   D.H  = 14 x + 4 y + sigma
//   D.D  = 14 x^2 - 4 y^2 - 2 sum z_i^2 - 2 y sigma
// Eliminating x via 14 x = c - 4 y - sigma turns D.D = n into
//   Q(v) + Lf(v) = c^2 - 14 n,  v = (y, z1..z7)
// with the positive definite form Q = 40 y^2 + 20 y sigma + 28 sum z^2
// - sigma^2 and the linear part Lf = 8 c y + 2 c sigma. Completing the
// square reduces the search to lattice points in an ellipsoid, enumerated
// coordinate by coordinate with exact rational bounds.

struct LatticeSearch {
  Int selfint = 0, hdeg = 0;
  std::vector<ClassVec> classes;      // sorted lexicographically
  Rational rho;                       // completed-square radius
  std::vector<Rational> pivots;       // LDL^T diagonal of Q (all > 0)
  std::uint64_t visited = 0;          // enumeration nodes inspected
  bool hodge_empty = false;           // c^2 < 10 n already forbids classes
  bool empty() const { return classes.empty(); }
};

namespace detail {

// unit-upper-triangular U and positive diagonal d with M = U^T diag(d) U
inline void ldlt_upper(const Mat& m, std::vector<Rational>& d, Mat& u) {
  std::size_t n = m.rows();
  d.assign(n, Rational(0));
  u = Mat::identity(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rational di = m(i, i);
    for (std::size_t k = 0; k < i; ++k) di -= d[k] * u(k, i) * u(k, i);
    d[i] = di;
    if (di == 0) throw std::domain_error("ldlt: zero pivot");
    for (std::size_t j = i + 1; j < n; ++j) {
      Rational v = m(i, j);
      for (std::size_t k = 0; k < i; ++k) v -= d[k] * u(k, i) * u(k, j);
      u(i, j) = v / di;
    }
  }
}

// integer interval { k : (k + off)^2 <= bound }, empty when bound < 0 or no
// integer falls inside
inline bool center_interval(const Rational& off, const Rational& bound,
                            Int& lo, Int& hi) {
  if (bound < 0) return false;
  Int s = floor_sqrt_rat(bound);
  Int hi_cap = floor_rat(-off) + s + 1;
  Int lo_cap = floor_rat(-off) - s - 1;
  auto fits = [&](const Int& k) {
    Rational w = Rational(k) + off;
    return w * w <= bound;
  };
  hi = hi_cap;
  while (hi >= lo_cap && !fits(hi)) --hi;
  if (hi < lo_cap) return false;
  lo = lo_cap;
  while (!fits(lo)) ++lo;
  return true;
}

}  // namespace detail

inline LatticeSearch enumerate_classes(const Int& n, const Int& c) {
  LatticeSearch out;
  out.selfint = n;
  out.hdeg = c;
  out.hodge_empty = (Rational(c) * Rational(c) < Rational(10) * Rational(n));

  // Q in coordinates v = (y, z1..z7)
  Mat q(8, 8);
  q(0, 0) = 40;
  for (int i = 1; i < 8; ++i) {
    q(0, i) = q(i, 0) = 10;
    q(i, i) = 27;
    for (int j = 1; j < 8; ++j)
      if (j != i) q(i, j) = -1;
  }
  std::vector<Rational> lf(8);  // linear part coefficients
  lf[0] = Rational(8) * Rational(c);
  for (int i = 1; i < 8; ++i) lf[i] = Rational(2) * Rational(c);

  // center h solves Q h = lf / 2; radius rho = R + h^T Q h
  std::vector<Rational> half(8);
  for (int i = 0; i < 8; ++i) half[i] = lf[i] / 2;
  auto hopt = solve(q, half);
  if (!hopt) throw std::logic_error("search: singular quadratic form");
  // with Q h0 = lf/2: Q(v) + lf.v = (v + h0)' Q (v + h0) - h0' Q h0
  std::vector<Rational> h0 = *hopt;
  Rational h0qh0 = 0;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) h0qh0 += h0[i] * q(i, j) * h0[j];
  Rational R = Rational(c) * Rational(c) - Rational(14) * Rational(n);
  out.rho = R + h0qh0;

  std::vector<Rational> d;
  Mat u;
  detail::ldlt_upper(q, d, u);
  out.pivots = d;
  for (auto& p : d)
    if (p <= 0) throw std::logic_error("search: form not positive definite");

  if (out.rho < 0) return out;  // provably empty

  // depth-first enumeration from coordinate 7 down to 0; at level i the
  // contribution is d_i (v_i + off_i)^2 with off_i = h0_i + sum_{j>i}
  // u(i,j) (v_j + h0_j)
  std::vector<Int> v(8, Int(0));
  std::vector<ClassVec> found;
  std::uint64_t visited = 0;
  auto rec = [&](auto&& self, int level, const Rational& budget) -> void {
    Rational off = h0[level];
    for (int j = level + 1; j < 8; ++j)
      off += u(level, j) * (Rational(v[j]) + h0[j]);
    Int lo, hi;
    if (!detail::center_interval(off, budget / d[level], lo, hi)) return;
    for (Int k = lo; k <= hi; ++k) {
      ++visited;
      v[level] = k;
      Rational w = Rational(k) + off;
      Rational used = d[level] * w * w;
      if (level > 0) {
        self(self, level - 1, budget - used);
        continue;
      }
      // leaf: demand exact equality of the full quadratic value
      if (used != budget) continue;
      // integrality of x = (c - 4y - sigma)/14
      Int y = v[0], sigma = 0;
      for (int i = 1; i < 8; ++i) sigma += v[i];
      Int numx = c - 4 * y - sigma;
      if (numx % 14 != 0) continue;
      ClassVec cls(9);
      cls[0] = numx / 14;
      cls[1] = y;
      for (int i = 1; i < 8; ++i) cls[1 + i] = v[i];
      found.push_back(std::move(cls));
    }
    v[level] = 0;
  };
  rec(rec, 7, out.rho);
  out.visited = visited;

  // a-posteriori check against the lattice itself, then canonical order
  NikulinLattice lat;
  for (auto& cls : found) {
    if (lat.self(cls) != n || lat.pair(cls, NikulinLattice::cls_H()) != c)
      throw std::logic_error("search: candidate fails verification");
  }
  std::sort(found.begin(), found.end());
  out.classes = std::move(found);
  return out;
}

}  // namespace nikforge
