#pragma once

// Lines in P^4 under the Pluecker embedding of G(1,4) into P^9.
// Coordinate order is fixed everywhere: p01 p02 p03 p04 p12 p13 p14 p23 p24
// p34. The five quadratic relations are listed by omitted index 4,3,2,1,0.

#include <array>
#include <optional>
#include <stdexcept>
#include <vector>

#include "nikforge/binary_form.hpp"
#include "nikforge/curves.hpp"
#include "nikforge/matrix.hpp"
#include "nikforge/multipoly.hpp"

namespace nikforge {

inline const std::array<std::array<int, 2>, 10>& pluecker_pairs() {
  static const std::array<std::array<int, 2>, 10> pairs = {{{0, 1},
                                                            {0, 2},
                                                            {0, 3},
                                                            {0, 4},
                                                            {1, 2},
                                                            {1, 3},
                                                            {1, 4},
                                                            {2, 3},
                                                            {2, 4},
                                                            {3, 4}}};
  return pairs;
}

inline std::size_t pair_index(int i, int j) {
  if (i > j) std::swap(i, j);
  static const int base[4] = {0, 4, 7, 9};
  return (std::size_t)(base[i] + (j - i - 1));
}

// p_ij = x_i y_j - x_j y_i for the line through x and y
inline std::vector<Rational> pluecker_of_line(const std::vector<Rational>& x,
                                              const std::vector<Rational>& y) {
  std::vector<Rational> p(10);
  for (std::size_t k = 0; k < 10; ++k) {
    auto [i, j] = pluecker_pairs()[k];
    p[k] = x[i] * y[j] - x[j] * y[i];
  }
  return p;
}

// the five Pfaffian relations cutting G(1,4) out of P^9, by omitted index
// m = 4, 3, 2, 1, 0
inline const std::vector<MultiPoly>& pluecker_relations() {
  static const std::vector<MultiPoly> rels = [] {
    auto P = [](int i, int j) {
      return MultiPoly::variable(10, pair_index(i, j));
    };
    std::vector<MultiPoly> r;
    r.push_back(P(0, 1) * P(2, 3) - P(0, 2) * P(1, 3) + P(0, 3) * P(1, 2));
    r.push_back(P(0, 1) * P(2, 4) - P(0, 2) * P(1, 4) + P(0, 4) * P(1, 2));
    r.push_back(P(0, 1) * P(3, 4) - P(0, 3) * P(1, 4) + P(0, 4) * P(1, 3));
    r.push_back(P(0, 2) * P(3, 4) - P(0, 3) * P(2, 4) + P(0, 4) * P(2, 3));
    r.push_back(P(1, 2) * P(3, 4) - P(1, 3) * P(2, 4) + P(1, 4) * P(2, 3));
    return r;
  }();
  return rels;
}

inline std::vector<Rational> eval_relations(const std::vector<Rational>& p) {
  std::vector<Rational> out;
  for (auto& r : pluecker_relations()) out.push_back(r.eval(p));
  return out;
}

// antisymmetric 5x5 matrix of a P^9 point (or hyperplane coefficient vector)
inline Mat antisym_from_coeffs(const std::vector<Rational>& w) {
  Mat m(5, 5);
  for (std::size_t k = 0; k < 10; ++k) {
    auto [i, j] = pluecker_pairs()[k];
    m(i, j) = w[k];
    m(j, i) = -w[k];
  }
  return m;
}

// second compound: C_{(ij),(kl)} = M_ik M_jl - M_il M_jk. For symmetric M
// this is the Gram matrix of the induced quadric on decomposable 2-vectors:
// (x^y)' C (x^y) = (x'Mx)(y'My) - (x'My)^2.
inline Mat second_compound(const Mat& m) {
  Mat c(10, 10);
  for (std::size_t r = 0; r < 10; ++r)
    for (std::size_t s = 0; s < 10; ++s) {
      auto [i, j] = pluecker_pairs()[r];
      auto [k, l] = pluecker_pairs()[s];
      c(r, s) = m(i, k) * m(j, l) - m(i, l) * m(j, k);
    }
  return c;
}

// 4x4 Pfaffian of an antisymmetric matrix of polynomials, on the rows/cols
// {a,b,c,d} (ascending)
inline MultiPoly pfaffian4(const std::vector<std::vector<MultiPoly>>& w, int a,
                           int b, int c, int d) {
  return w[a][b] * w[c][d] - w[a][c] * w[b][d] + w[a][d] * w[b][c];
}

// the five conics of a net of hyperplanes, by omitted index m = 4,3,2,1,0:
// C_m(l1,l2,l3) = Pf of (l1 W1 + l2 W2 + l3 W3) omitting row/col m
inline std::vector<MultiPoly> net_pfaffian_conics(const Mat& w1, const Mat& w2,
                                                  const Mat& w3) {
  std::vector<std::vector<MultiPoly>> w(5, std::vector<MultiPoly>(5));
  auto l1 = MultiPoly::variable(3, 0), l2 = MultiPoly::variable(3, 1),
       l3 = MultiPoly::variable(3, 2);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      w[i][j] = l1.scaled(w1(i, j)) + l2.scaled(w2(i, j)) + l3.scaled(w3(i, j));
  std::vector<MultiPoly> out;
  static const int idx[5][4] = {
      {0, 1, 2, 3}, {0, 1, 2, 4}, {0, 1, 3, 4}, {0, 2, 3, 4}, {1, 2, 3, 4}};
  for (auto& q : idx) out.push_back(pfaffian4(w, q[0], q[1], q[2], q[3]));
  return out;
}

// ---------------------------------------------------------------------------
// The bisecant-line map. A point of P^2 with coordinates (a, b, c) stands
// for the binary quadratic a s^2 + b s t + c t^2, i.e. an unordered pair of
// points on the degree-4 rational normal curve; the map sends it to the
// Pluecker point of the line joining the pair. Each coordinate is a cubic
// in (a, b, c), obtained from p_ij(u, v)/(u - v) by rewriting in elementary
// symmetric functions and clearing denominators of e1 = -b/a, e2 = c/a to
// the uniform power a^3.
inline const std::vector<MultiPoly>& bisecant_map() {
  static const std::vector<MultiPoly> cubics = [] {
    // working space: 0 = u (later e1), 1 = v (later e2), 2 = a, 3 = b, 4 = c
    auto U = MultiPoly::variable(5, 0), V = MultiPoly::variable(5, 1);
    auto A = MultiPoly::variable(5, 2), B = MultiPoly::variable(5, 3),
         C = MultiPoly::variable(5, 4);
    auto upow = [&](int e) { return U.pow(e); };
    auto vpow = [&](int e) { return V.pow(e); };
    std::vector<MultiPoly> out;
    for (auto [i, j] : pluecker_pairs()) {
      // affine curve b_i(u) = u^(4-i)
      MultiPoly pij = upow(4 - i) * vpow(4 - j) - upow(4 - j) * vpow(4 - i);
      auto q = divexact_uni(pij, U - V, 0);
      if (!q) throw std::logic_error("bisecant: u - v must divide");
      MultiPoly f = symmetric_reduce(*q, 0, 1);  // now in e1 (slot 0), e2 (1)
      // e1 := -b/a, e2 := c/a, cleared uniformly to a^3
      MultiPoly sub = substitute_pair_cleared(f, 0, 1, -B, C, A);
      unsigned m = 0;
      for (auto& [mono, coef] : f.terms())
        m = std::max(m, (unsigned)(mono[0] + mono[1]));
      for (unsigned k = m; k < 3; ++k) sub = sub * A;
      // re-index into the 3-variable space (a, b, c)
      std::vector<MultiPoly> img(5, MultiPoly(3));
      img[2] = MultiPoly::variable(3, 0);
      img[3] = MultiPoly::variable(3, 1);
      img[4] = MultiPoly::variable(3, 2);
      out.push_back(compose(sub, img));
    }
    return out;
  }();
  return cubics;
}

inline std::vector<Rational> eval_bisecant(const Rational& a, const Rational& b,
                                           const Rational& c) {
  std::vector<Rational> out;
  for (auto& f : bisecant_map()) out.push_back(f.eval({a, b, c}));
  return out;
}

// ---------------------------------------------------------------------------
// Pencils: do two lines of P^4 meet?

struct PencilJoin {
  bool meet = false;
  std::vector<Rational> center;  // common point when they meet
  Rational residual;             // a nonzero Pfaffian witness when skew
};

// spanning rows of the line underlying a decomposable nonzero 2-vector:
// the column space of its antisymmetric matrix
inline Mat line_span(const std::vector<Rational>& p) {
  Mat m = antisym_from_coeffs(p);
  return row_space_basis(m.transpose());
}

inline PencilJoin pencil_join(const std::vector<Rational>& g1,
                              const std::vector<Rational>& g2) {
  PencilJoin out;
  Mat u = line_span(g1), v = line_span(g2);
  Mat stacked(u.rows() + v.rows(), 5);
  for (std::size_t i = 0; i < u.rows(); ++i) stacked.set_row(i, u.row(i));
  for (std::size_t i = 0; i < v.rows(); ++i)
    stacked.set_row(u.rows() + i, v.row(i));
  if (rank(stacked) <= 3) {
    out.meet = true;
    // a row dependency c across the stack gives the common point
    auto dep = kernel_basis(stacked.transpose());
    if (!dep.empty()) {
      std::vector<Rational> ctr(5, Rational(0));
      for (std::size_t i = 0; i < u.rows(); ++i)
        for (std::size_t j = 0; j < 5; ++j) ctr[j] += dep[0][i] * u(i, j);
      out.center = proj_normalize(ctr);
    }
  } else {
    // skew: the midpoint g1 + g2 is not decomposable; report a witness
    std::vector<Rational> mid(10);
    for (std::size_t k = 0; k < 10; ++k) mid[k] = g1[k] + g2[k];
    for (auto& val : eval_relations(mid))
      if (val != 0) {
        out.residual = val;
        break;
      }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Smoothness of the hyperplane-net section of G(1,4).
//
// A member w(l) = l1 w1 + l2 w2 + l3 w3 of the net is a tangent hyperplane
// exactly when it is decomposable, i.e. w ^ w = 0; the five components of
// w ^ w are the 4x4 Pfaffians, conics in (l1, l2, l3). The section is smooth
// iff those conics have no common zero in P^2. Two exact routes run side by
// side and must agree whenever both conclude:
//  * elimination: pairwise resultants in l3, gcd of the resulting binary
//    forms in (l1, l2). The point (0:0:1), which no fiber (l1 : l2) sees,
//    is checked directly; rational roots of the gcd are lifted back through
//    the conics. Conclusive when the gcd is a nonzero constant (empty) or a
//    fiber lifts (nonempty); silent when only irrational candidates remain.
//  * ideal fullness: the conics have no common zero iff their ideal contains
//    every quartic (an empty locus admits three quadric combinations forming
//    a regular sequence, whose Artinian quotient dies in degree 4). Always
//    conclusive; supplies the verdict.

struct NetSmoothness {
  bool smooth = false;
  bool has_witness = false;
  std::vector<Rational> witness;  // verified common zero (l1, l2, l3)
  int eliminant_degree = -1;      // deg of the resultant gcd; -1 if zero form
  bool elimination_conclusive = false;
  int fullness_degree = -1;  // least d <= 4 with full degree-d ideal piece
};

inline NetSmoothness net_smoothness(const Mat& w1, const Mat& w2,
                                    const Mat& w3) {
  {
    Mat flat(3, 10);
    const Mat* ws[3] = {&w1, &w2, &w3};
    for (std::size_t k = 0; k < 3; ++k) {
      std::size_t col = 0;
      for (auto [i, j] : pluecker_pairs()) flat(k, col++) = (*ws[k])(i, j);
    }
    if (rank(flat) != 3)
      throw std::invalid_argument("net_smoothness: dependent net");
  }
  std::vector<MultiPoly> conics = net_pfaffian_conics(w1, w2, w3);

  // split q(l1, l2, l3) = a l3^2 + b(l1, l2) l3 + c(l1, l2)
  struct Split {
    Rational a;
    BinaryForm b{1}, c{2};
  };
  std::vector<Split> sp(5);
  for (int i = 0; i < 5; ++i)
    for (const auto& [m, v] : conics[i].terms()) {
      if (m[2] == 2)
        sp[i].a = v;
      else if (m[2] == 1)
        sp[i].b[m[1]] += v;
      else
        sp[i].c[m[1]] += v;
    }

  NetSmoothness out;
  auto record_witness = [&](std::vector<Rational> w) {
    for (const auto& q : conics)
      if (q.eval(w) != 0)
        throw std::logic_error("net_smoothness: witness fails a conic");
    out.has_witness = true;
    out.witness = proj_normalize(std::move(w));
  };

  enum { kUnknown, kEmpty, kNonempty } elim = kUnknown;

  // the one point outside every fiber (l1 : l2)
  bool apex_zero = true;
  for (const auto& s : sp) apex_zero = apex_zero && s.a == 0;
  if (apex_zero) {
    elim = kNonempty;
    record_witness({0, 0, 1});
  } else {
    // Res(a2 x^2 + a1 x + a0, b2 x^2 + b1 x + b0) =
    //   (a2 b0 - a0 b2)^2 - (a2 b1 - a1 b2)(a1 b0 - a0 b1)
    BinaryForm g(0);
    bool gconst = false;
    for (int i = 0; i < 5 && !gconst; ++i)
      for (int j = i + 1; j < 5 && !gconst; ++j) {
        const Split &f = sp[i], &h = sp[j];
        BinaryForm t1 = h.c.scaled(f.a) - f.c.scaled(h.a);
        BinaryForm t2 = h.b.scaled(f.a) - f.b.scaled(h.a);
        BinaryForm t3 = f.b * h.c - h.b * f.c;
        g = bf_gcd(g, t1 * t1 - t2 * t3);
        gconst = !g.is_zero() && g.degree() == 0;
      }
    out.eliminant_degree = g.is_zero() ? -1 : g.degree();
    if (gconst) {
      elim = kEmpty;
    } else if (!g.is_zero()) {
      std::vector<std::pair<Int, Int>> fibers = rational_roots(g);
      for (const auto& [p, q] : fibers) {
        // the conics along the fiber (p : q : l3), homogenized at formal
        // degree 2; a root at infinity would force every a to vanish,
        // which the apex check already excluded
        BinaryForm fgcd(0);
        for (const auto& s : sp) {
          BinaryForm A(2);
          A[0] = s.a;
          A[1] = s.b.eval(Rational(p), Rational(q));
          A[2] = s.c.eval(Rational(p), Rational(q));
          fgcd = bf_gcd(fgcd, A);
        }
        if (fgcd.is_zero()) {
          elim = kNonempty;  // whole fiber inside the locus
          record_witness({Rational(p), Rational(q), 0});
          break;
        }
        if (fgcd.degree() > 0) {
          elim = kNonempty;  // common root over the closure is certain
          std::vector<std::pair<Int, Int>> rr = rational_roots(fgcd);
          if (!rr.empty())
            record_witness({Rational(p) * rr[0].second,
                            Rational(q) * rr[0].second, Rational(rr[0].first)});
          break;
        }
      }
    }
  }
  out.elimination_conclusive = elim != kUnknown;

  for (unsigned d = 2; d <= 4; ++d)
    if (graded_piece(conics, d).full()) {
      out.fullness_degree = (int)d;
      break;
    }
  out.smooth = out.fullness_degree >= 0;

  if ((elim == kEmpty && !out.smooth) || (elim == kNonempty && out.smooth))
    throw std::logic_error("net_smoothness: elimination and fullness disagree");
  return out;
}

}  // namespace nikforge
