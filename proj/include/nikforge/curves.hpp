#pragma once

// Parametrized rational curves in projective space and the exact linear
// algebra attached to them: spaces of hypersurface forms through a curve,
// Jacobian matrices restricted to a curve (as matrices of binary forms with
// certified generic rank and rank-drop locus), and Hilbert function fits.

#include <array>
#include <optional>
#include <vector>

#include "nikforge/matrix.hpp"
#include "nikforge/multipoly.hpp"

namespace nikforge {

// first nonzero coordinate scaled to 1; the canonical point of a projective
// equivalence class
inline std::vector<Rational> proj_normalize(std::vector<Rational> v) {
  for (auto& x : v)
    if (x != 0) {
      Rational inv = x;
      for (auto& y : v) y /= inv;
      return v;
    }
  return v;
}

inline bool proj_equal(const std::vector<Rational>& a,
                       const std::vector<Rational>& b) {
  return a.size() == b.size() && proj_normalize(a) == proj_normalize(b);
}

// rational normal curve of degree d: (s^d, s^(d-1) t, ..., t^d)
inline std::vector<BinaryForm> rnc_param(int d) {
  std::vector<BinaryForm> out;
  for (int i = 0; i <= d; ++i) {
    BinaryForm f(d);
    f[i] = 1;
    out.push_back(f);
  }
  return out;
}

inline std::vector<Rational> eval_curve(const std::vector<BinaryForm>& z,
                                        const Rational& s, const Rational& t) {
  std::vector<Rational> out;
  out.reserve(z.size());
  for (auto& f : z) out.push_back(f.eval(s, t));
  return out;
}

// no point of P^1 kills every component
inline bool base_point_free(const std::vector<BinaryForm>& z) {
  BinaryForm g(0);
  for (auto& f : z) g = bf_gcd(g, f);
  return !g.is_zero() && g.degree() == 0;
}

// content of the component list: the common factor itself
inline BinaryForm curve_content(const std::vector<BinaryForm>& z) {
  BinaryForm g(0);
  for (auto& f : z) g = bf_gcd(g, f);
  return g;
}

// determinant of the symmetric 3x3 Hankel matrix [[x0 x1 x2],[x1 x2 x3],
// [x2 x3 x4]]; its zero locus is the variety of rank <= 2 Hankel matrices,
// swept by the chords of the degree-4 rational normal curve
inline MultiPoly hankel_cubic() {
  auto x = [](int i) { return MultiPoly::variable(5, i); };
  MultiPoly m00 = x(0), m01 = x(1), m02 = x(2);
  MultiPoly m11 = x(2), m12 = x(3), m22 = x(4);
  // det of [[m00,m01,m02],[m01,m11,m12],[m02,m12,m22]]
  return m00 * (m11 * m22 - m12 * m12) - m01 * (m01 * m22 - m12 * m02) +
         m02 * (m01 * m12 - m11 * m02);
}

// f vanishes identically on the union of lines joining curve point pairs:
// checked as the polynomial identity f(l * b(u) + m * b(v)) == 0 in the four
// affine variables (l, m, u, v). For homogeneous f this affine identity is
// equivalent to the projective one.
inline bool vanishes_on_joins(const MultiPoly& f, int curve_degree) {
  std::size_t n = f.nvars();
  if (n != (std::size_t)curve_degree + 1)
    throw std::invalid_argument("vanishes_on_joins: ambient/degree mismatch");
  auto L = MultiPoly::variable(4, 0), M = MultiPoly::variable(4, 1);
  auto U = MultiPoly::variable(4, 2), V = MultiPoly::variable(4, 3);
  std::vector<MultiPoly> img;
  for (std::size_t i = 0; i < n; ++i)
    img.push_back(L * U.pow(curve_degree - (int)i) +
                  M * V.pow(curve_degree - (int)i));
  return compose(f, img).is_zero();
}

// basis of the degree-k forms vanishing on the curve, as the kernel of the
// coefficient matrix of {monomial composed with z}
inline std::vector<MultiPoly> forms_through_curve(
    const std::vector<BinaryForm>& z, unsigned form_degree) {
  std::size_t n = z.size();
  int d = z[0].degree();
  auto monos = monomials_of_degree(n, form_degree);
  int D = (int)form_degree * d;
  Mat cond(D + 1, monos.size());
  for (std::size_t j = 0; j < monos.size(); ++j) {
    MultiPoly m(n);
    m.add_term(monos[j], 1);
    BinaryForm img = compose_binary(m, z);
    for (int k = 0; k <= D; ++k) cond(k, j) = img[k];
  }
  std::vector<MultiPoly> out;
  for (auto& v : kernel_basis(cond)) {
    MultiPoly f(n);
    for (std::size_t j = 0; j < monos.size(); ++j) f.add_term(monos[j], v[j]);
    out.push_back(std::move(f));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Matrices of binary forms

struct FormMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<BinaryForm> e;  // row-major

  FormMatrix() = default;
  FormMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), e(r * c) {}
  BinaryForm& at(std::size_t i, std::size_t j) { return e[i * cols + j]; }
  const BinaryForm& at(std::size_t i, std::size_t j) const {
    return e[i * cols + j];
  }
};

// Jacobian matrix of the given polynomials restricted to the curve:
// entry (i, j) = (d polys[i] / d x_j) composed with z.
inline FormMatrix jacobian_on_curve(const std::vector<MultiPoly>& polys,
                                    const std::vector<BinaryForm>& z) {
  FormMatrix fm(polys.size(), z.size());
  int zd = z.empty() ? 0 : z[0].degree();
  for (std::size_t i = 0; i < polys.size(); ++i) {
    // keep rows degree-uniform: zero entries at the row's formal degree
    int td = polys[i].total_degree();
    int rd = td > 0 ? (td - 1) * zd : 0;
    for (std::size_t j = 0; j < z.size(); ++j) {
      MultiPoly d = polys[i].derivative(j);
      if (d.is_zero())
        fm.at(i, j) = BinaryForm(rd);
      else
        fm.at(i, j) = compose_binary(d, z);
    }
  }
  return fm;
}

inline Mat eval_form_matrix(const FormMatrix& fm, const Rational& s,
                            const Rational& t) {
  Mat m(fm.rows, fm.cols);
  for (std::size_t i = 0; i < fm.rows; ++i)
    for (std::size_t j = 0; j < fm.cols; ++j) m(i, j) = fm.at(i, j).eval(s, t);
  return m;
}

namespace detail {

// minor determinant by expansion along the first selected row
inline BinaryForm form_minor(const FormMatrix& fm,
                             const std::vector<std::size_t>& r,
                             const std::vector<std::size_t>& c) {
  if (r.size() == 1) return fm.at(r[0], c[0]);
  BinaryForm acc;
  bool first = true;
  std::vector<std::size_t> r2(r.begin() + 1, r.end());
  for (std::size_t j = 0; j < c.size(); ++j) {
    const BinaryForm& piv = fm.at(r[0], c[j]);
    std::vector<std::size_t> c2;
    for (std::size_t k = 0; k < c.size(); ++k)
      if (k != j) c2.push_back(c[k]);
    BinaryForm sub = form_minor(fm, r2, c2);
    BinaryForm term = piv * sub;
    if (j % 2) term = -term;
    if (first) {
      acc = term;
      first = false;
    } else {
      acc = acc + term;
    }
  }
  return acc;
}

// visit all k-subsets of [0, n)
inline bool next_subset(std::vector<std::size_t>& idx, std::size_t n) {
  std::size_t k = idx.size();
  for (std::size_t i = k; i-- > 0;) {
    if (idx[i] + (k - i) < n) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

inline std::vector<std::size_t> first_subset(std::size_t k) {
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  return idx;
}

}  // namespace detail

// true iff every k x k minor is the zero form
inline bool all_minors_vanish(const FormMatrix& fm, std::size_t k) {
  if (k > fm.rows || k > fm.cols) return true;
  auto r = detail::first_subset(k);
  do {
    auto c = detail::first_subset(k);
    do {
      if (!detail::form_minor(fm, r, c).is_zero()) return false;
    } while (detail::next_subset(c, fm.cols));
  } while (detail::next_subset(r, fm.rows));
  return true;
}

// gcd of all k x k minors; early exit once the gcd drops to a constant.
// Constant gcd means the rank never drops below k anywhere on P^1 (a common
// root over the closure would force a common rational-coefficient factor).
inline BinaryForm minor_gcd(const FormMatrix& fm, std::size_t k) {
  BinaryForm g(0);
  auto r = detail::first_subset(k);
  do {
    auto c = detail::first_subset(k);
    do {
      g = bf_gcd(g, detail::form_minor(fm, r, c));
      if (!g.is_zero() && g.degree() == 0) return g;
    } while (detail::next_subset(c, fm.cols));
  } while (detail::next_subset(r, fm.rows));
  return g;
}

// Rank over the function field of P^1, certified: sampled lower bound plus
// a vanishing-minors upper bound (the sample list covers enough points that
// the loop rarely needs the minor sweep to raise the bound).
inline std::size_t generic_rank(const FormMatrix& fm) {
  static const std::array<std::array<int, 2>, 7> pts = {
      {{1, 0}, {0, 1}, {1, 1}, {2, 1}, {-1, 1}, {3, 2}, {1, 3}}};
  std::size_t r = 0;
  for (auto& p : pts)
    r = std::max(r, rank(eval_form_matrix(fm, p[0], p[1])));
  std::size_t cap = std::min(fm.rows, fm.cols);
  while (r < cap && !all_minors_vanish(fm, r + 1)) ++r;
  return r;
}

// Rank over the function field of P^1 by fraction-free elimination; every
// intermediate entry stays a polynomial (a minor of the input), so no minor
// sweep is needed. Requires each row homogeneous of one formal degree; zero
// entries are coerced to the row degree. Agrees with generic_rank.
inline std::size_t bareiss_rank(const FormMatrix& fm) {
  std::size_t nr = fm.rows, nc = fm.cols;
  std::vector<std::vector<BinaryForm>> a(nr);
  for (std::size_t i = 0; i < nr; ++i) {
    int deg = -1;
    for (std::size_t j = 0; j < nc; ++j) {
      const BinaryForm& f = fm.at(i, j);
      if (f.is_zero()) continue;
      if (deg < 0)
        deg = f.degree();
      else if (deg != f.degree())
        throw std::invalid_argument("bareiss_rank: mixed degrees in a row");
    }
    a[i].reserve(nc);
    for (std::size_t j = 0; j < nc; ++j) {
      const BinaryForm& f = fm.at(i, j);
      a[i].push_back(f.is_zero() ? BinaryForm(deg < 0 ? 0 : deg) : f);
    }
  }
  BinaryForm prev = BinaryForm::constant(1);
  std::size_t row = 0;
  for (std::size_t col = 0; col < nc && row < nr; ++col) {
    std::size_t piv = row;
    while (piv < nr && a[piv][col].is_zero()) ++piv;
    if (piv == nr) continue;
    std::swap(a[row], a[piv]);
    BinaryForm p = a[row][col];
    for (std::size_t i = row + 1; i < nr; ++i) {
      for (std::size_t j = col + 1; j < nc; ++j) {
        BinaryForm num = a[i][j] * p - a[i][col] * a[row][j];
        auto q = divexact(num, prev);
        if (!q) throw std::logic_error("bareiss_rank: inexact division");
        a[i][j] = std::move(*q);
      }
    }
    prev = std::move(p);
    ++row;
  }
  return row;
}

// ---------------------------------------------------------------------------
// Hilbert functions

// dimension of the degree-d graded piece of the coordinate ring cut out by
// the given homogeneous generators
inline std::size_t hilbert_value(const std::vector<MultiPoly>& gens,
                                 unsigned d) {
  return graded_piece(gens, d).quotient_dim();
}

struct HilbertFit {
  std::vector<Rational> coeff;  // c0 + c1 d + c2 d^2 + ...
  int dimension = -1;           // degree of the fitted polynomial
  Int degree = 0;               // leading coefficient * dimension!
  bool check_passed = false;    // held at the extra control value
};

// Fit a degree-3 polynomial through the four values at d = 3..6 and check it
// reproduces the value at d = 7; degree and dimension in the projective
// sense (dimension = poly degree, degree = lead * dimension!).
inline std::optional<HilbertFit> fit_hilbert_cubic(
    const std::array<std::size_t, 5>& hf3_to_7) {
  Mat vm(4, 4);
  std::vector<Rational> rhs(4);
  for (int i = 0; i < 4; ++i) {
    int d = 3 + i;
    Rational p = 1;
    for (int j = 0; j < 4; ++j) {
      vm(i, j) = p;
      p *= d;
    }
    rhs[i] = (long)hf3_to_7[i];
  }
  auto sol = solve(vm, rhs);
  if (!sol) return std::nullopt;
  HilbertFit fit;
  fit.coeff = *sol;
  int deg = 3;
  while (deg > 0 && fit.coeff[deg] == 0) --deg;
  fit.dimension = deg;
  Rational lead = fit.coeff[deg];
  Int fact = 1;
  for (int i = 2; i <= deg; ++i) fact *= i;
  Rational degr = lead * fact;
  if (den(degr) != 1) return std::nullopt;  // not a Hilbert polynomial
  fit.degree = num(degr);
  // control at d = 7
  Rational at7 = 0, p = 1;
  for (int j = 0; j < 4; ++j) {
    at7 += fit.coeff[j] * p;
    p *= 7;
  }
  fit.check_passed = (at7 == Rational((long)hf3_to_7[4]));
  return fit;
}

}  // namespace nikforge
