#pragma once

// Binary forms: homogeneous polynomials in (s, t) of a fixed formal degree,
// stored densely as c[k] = coefficient of s^(d-k) t^k. The formal degree is
// part of the value; resultants and discriminants are taken at formal degree
// (a vanishing s-leading coefficient is a root at t = 0's mirror, i.e. the
// point at infinity of the affine chart t = 1).

#include <algorithm>
#include <cassert>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nikforge/matrix.hpp"
#include "nikforge/rational.hpp"

namespace nikforge {

class BinaryForm {
 public:
  BinaryForm() : c_(1) {}  // zero form of degree 0
  explicit BinaryForm(int deg) : c_(deg + 1) { assert(deg >= 0); }
  BinaryForm(int deg, std::vector<Rational> coeffs) : c_(std::move(coeffs)) {
    if ((int)c_.size() != deg + 1)
      throw std::invalid_argument("BinaryForm: coefficient count");
  }
  static BinaryForm constant(const Rational& v) {
    BinaryForm f(0);
    f.c_[0] = v;
    return f;
  }

  int degree() const { return (int)c_.size() - 1; }
  const Rational& operator[](int k) const { return c_[k]; }
  Rational& operator[](int k) { return c_[k]; }
  const std::vector<Rational>& coeffs() const { return c_; }

  bool is_zero() const {
    for (auto& v : c_)
      if (v != 0) return false;
    return true;
  }

  // multiplicity of the linear factor t (= number of leading zero
  // coefficients; the root is (1:0)); degree()+1 for the zero form
  int mult_t() const {
    int k = 0;
    while (k <= degree() && c_[k] == 0) ++k;
    return k;
  }
  // multiplicity of the linear factor s (= trailing zero coefficients)
  int mult_s() const {
    int k = degree();
    while (k >= 0 && c_[k] == 0) --k;
    return degree() - k;
  }

  Rational eval(const Rational& s, const Rational& t) const {
    Rational acc = 0;
    std::vector<Rational> spow(degree() + 1);
    Rational sp = 1;
    for (int k = degree(); k >= 0; --k) {
      spow[k] = sp;
      sp *= s;
    }
    Rational tp = 1;
    for (int k = 0; k <= degree(); ++k) {
      if (c_[k] != 0) acc += c_[k] * spow[k] * tp;
      tp *= t;
    }
    return acc;
  }

  Rational eval_affine(const Rational& u) const { return eval(u, 1); }

  BinaryForm operator+(const BinaryForm& o) const {
    assert(degree() == o.degree());
    BinaryForm r(degree());
    for (int k = 0; k <= degree(); ++k) r.c_[k] = c_[k] + o.c_[k];
    return r;
  }
  BinaryForm operator-(const BinaryForm& o) const {
    assert(degree() == o.degree());
    BinaryForm r(degree());
    for (int k = 0; k <= degree(); ++k) r.c_[k] = c_[k] - o.c_[k];
    return r;
  }
  BinaryForm operator-() const {
    BinaryForm r = *this;
    for (auto& v : r.c_) v = -v;
    return r;
  }
  BinaryForm operator*(const BinaryForm& o) const {
    BinaryForm r(degree() + o.degree());
    for (int i = 0; i <= degree(); ++i) {
      if (c_[i] == 0) continue;
      for (int j = 0; j <= o.degree(); ++j)
        if (o.c_[j] != 0) r.c_[i + j] += c_[i] * o.c_[j];
    }
    return r;
  }
  BinaryForm scaled(const Rational& v) const {
    BinaryForm r = *this;
    for (auto& c : r.c_) c *= v;
    return r;
  }
  BinaryForm pow(int e) const {
    BinaryForm r = BinaryForm::constant(1);
    for (int i = 0; i < e; ++i) r = r * *this;
    return r;
  }
  bool operator==(const BinaryForm& o) const {
    return c_ == o.c_;
  }

  BinaryForm derivative_s() const {
    if (degree() == 0) return BinaryForm(0);
    BinaryForm r(degree() - 1);
    for (int k = 0; k < degree(); ++k) r.c_[k] = c_[k] * (degree() - k);
    return r;
  }
  BinaryForm derivative_t() const {
    if (degree() == 0) return BinaryForm(0);
    BinaryForm r(degree() - 1);
    for (int k = 1; k <= degree(); ++k) r.c_[k - 1] = c_[k] * k;
    return r;
  }

  // Substitution (s, t) -> (a s + b t, c s + d t).
  BinaryForm gl2(const Rational& a, const Rational& b, const Rational& c,
                 const Rational& d) const {
    int n = degree();
    BinaryForm r(n);
    // (a s + b t)^(n-k) (c s + d t)^k accumulated per coefficient
    std::vector<BinaryForm> spow, tpow;
    BinaryForm ls(1), lt(1);
    ls[0] = a; ls[1] = b;
    lt[0] = c; lt[1] = d;
    for (int k = 0; k <= n; ++k) {
      if (c_[k] == 0) continue;
      BinaryForm term = BinaryForm::constant(c_[k]);
      for (int i = 0; i < n - k; ++i) term = term * ls;
      for (int i = 0; i < k; ++i) term = term * lt;
      r = r + term;
    }
    return r;
  }

  // Multiply coefficients so they are coprime integers with positive first
  // nonzero entry; the zero form stays zero. Canonical projective scale.
  BinaryForm normalized() const {
    if (is_zero()) return *this;
    Int g = 0, l = 1;
    for (auto& v : c_) {
      if (v == 0) continue;
      g = gcd(g, num(v));
      l = lcm(l, den(v));
    }
    Rational f = Rational(l) / Rational(g);
    BinaryForm r = scaled(f);
    for (auto& v : r.c_) {
      if (v != 0) {
        if (v < 0) r = r.scaled(-1);
        break;
      }
    }
    return r;
  }

  std::string str() const {
    std::ostringstream os;
    os << "[";
    for (int k = 0; k <= degree(); ++k) os << (k ? " " : "") << rat_str(c_[k]);
    os << "]";
    return os.str();
  }

 private:
  std::vector<Rational> c_;
};

// f * t^k (degree rises by k).
inline BinaryForm shift_t(const BinaryForm& f, int k) {
  BinaryForm r(f.degree() + k);
  for (int i = 0; i <= f.degree(); ++i) r[i + k] = f[i];
  return r;
}
// f * s^k.
inline BinaryForm shift_s(const BinaryForm& f, int k) {
  BinaryForm r(f.degree() + k);
  for (int i = 0; i <= f.degree(); ++i) r[i] = f[i];
  return r;
}

// Exact division; nullopt when the division leaves a remainder.
inline std::optional<BinaryForm> divexact(const BinaryForm& f,
                                          const BinaryForm& g) {
  if (g.is_zero()) throw std::domain_error("division by zero form");
  if (f.is_zero()) {
    if (f.degree() < g.degree()) return std::nullopt;
    return BinaryForm(f.degree() - g.degree());
  }
  if (f.degree() < g.degree()) return std::nullopt;
  // strip g's s and t factors from both sides so the divisor has a usable lead
  int gt = g.mult_t(), gs = g.mult_s();
  if (f.mult_t() < gt || f.mult_s() < gs) return std::nullopt;
  int fd = f.degree(), gd = g.degree();
  std::vector<Rational> a(f.coeffs().begin() + gt, f.coeffs().end() - gs);
  std::vector<Rational> b(g.coeffs().begin() + gt, g.coeffs().end() - gs);
  int da = (int)a.size() - 1, db = (int)b.size() - 1;
  // long division on s-descending coefficients; b[0] != 0 by construction
  std::vector<Rational> q(da - db + 1);
  for (int k = 0; k + db <= da; ++k) {
    Rational c = a[k] / b[0];
    q[k] = c;
    if (c != 0)
      for (int j = 0; j <= db; ++j) a[k + j] -= c * b[j];
  }
  for (auto& v : a)
    if (v != 0) return std::nullopt;
  BinaryForm quo(fd - gd);
  for (int k = 0; k < (int)q.size(); ++k) quo[k] = q[k];
  return quo;
}

// Gcd of two binary forms, canonical normalized scale. The zero form acts
// as the absorbing element: gcd(f, 0) = normalized f.
inline BinaryForm bf_gcd(BinaryForm f, BinaryForm g) {
  if (f.is_zero()) return g.normalized();
  if (g.is_zero()) return f.normalized();
  int min_t = std::min(f.mult_t(), g.mult_t());
  int min_s = std::min(f.mult_s(), g.mult_s());
  // affine parts (strip all s/t factors from each separately)
  auto affine = [](const BinaryForm& h) {
    return std::vector<Rational>(h.coeffs().begin() + h.mult_t(),
                                 h.coeffs().end() - h.mult_s());
  };
  std::vector<Rational> a = affine(f), b = affine(g);
  auto deg = [](const std::vector<Rational>& v) { return (int)v.size() - 1; };
  auto trim = [](std::vector<Rational>& v) {
    std::size_t lead = 0;
    while (lead + 1 < v.size() && v[lead] == 0) ++lead;
    v.erase(v.begin(), v.begin() + lead);
  };
  if (deg(a) < deg(b)) std::swap(a, b);
  // Euclid: both entries keep nonzero leads after trim
  while (!(b.size() == 1 && b[0] == 0)) {
    int m = deg(a), n = deg(b);
    for (int k = 0; k + n <= m; ++k) {
      Rational c = a[k] / b[0];
      if (c != 0)
        for (int j = 0; j <= n; ++j) a[k + j] -= c * b[j];
    }
    trim(a);
    std::swap(a, b);
  }
  BinaryForm core((int)a.size() - 1, a);
  return shift_s(shift_t(core, min_t), min_s).normalized();
}

inline BinaryForm bf_gcd(const BinaryForm& f, const BinaryForm& g,
                         const BinaryForm& h) {
  return bf_gcd(bf_gcd(f, g), h);
}

// Sylvester matrix at formal degrees; resultant = its determinant.
inline Mat sylvester(const BinaryForm& f, const BinaryForm& g) {
  int m = f.degree(), n = g.degree();
  Mat s(m + n, m + n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k <= m; ++k) s(i, i + k) = f[k];
  for (int i = 0; i < m; ++i)
    for (int k = 0; k <= n; ++k) s(n + i, i + k) = g[k];
  return s;
}

inline Rational resultant_sylvester(const BinaryForm& f, const BinaryForm& g) {
  if (f.degree() + g.degree() == 0) return 1;
  return det(sylvester(f, g));
}

namespace detail {

// Subresultant PRS resultant for dense rational vectors with nonzero lead,
// normalized to equal the Sylvester determinant.
inline Rational prs_resultant(std::vector<Rational> a, std::vector<Rational> b) {
  auto deg = [](const std::vector<Rational>& v) { return (int)v.size() - 1; };
  auto trim = [](std::vector<Rational>& v) {
    std::size_t lead = 0;
    while (lead + 1 < v.size() && v[lead] == 0) ++lead;
    v.erase(v.begin(), v.begin() + lead);
  };
  int sgn = 1;
  if (deg(a) < deg(b)) {
    if ((deg(a) & 1) && (deg(b) & 1)) sgn = -sgn;
    std::swap(a, b);
  }
  if (deg(b) == 0) {
    if (b[0] == 0) return 0;  // g identically zero, deg f >= 1
    Rational r = 1;
    for (int i = 0; i < deg(a); ++i) r *= b[0];
    return Rational(sgn) * r;
  }
  // monic Euclidean resultant with explicit leading-coefficient tracking:
  // res(f,g) = lc(g)^(deg f - deg r) * (-1)^(deg f * deg g) * res(g, r),
  // r = f mod g. Rational arithmetic keeps this exact; sizes here are small
  // enough that the fraction growth does not matter.
  Rational acc = 1;
  while (true) {
    int m = deg(a), n = deg(b);
    // remainder a mod b
    std::vector<Rational> r = a;
    for (int k = 0; k + n <= m; ++k) {
      Rational c = r[k] / b[0];
      if (c != 0)
        for (int j = 0; j <= n; ++j) r[k + j] -= c * b[j];
    }
    trim(r);
    bool rzero = (r.size() == 1 && r[0] == 0);
    if (rzero) {
      if (n == 0) {
        // constant nonzero b: res = b^m
        Rational p = 1;
        for (int i = 0; i < m; ++i) p *= b[0];
        return Rational(sgn) * acc * p;
      }
      return 0;  // nonconstant common factor
    }
    int dr = deg(r);
    // res(a,b) = lc(b)^(m - dr) * (-1)^(m*n) * res(b, r)
    Rational lc = b[0];
    Rational p = 1;
    for (int i = 0; i < m - dr; ++i) p *= lc;
    acc *= p;
    if ((m & 1) && (n & 1)) sgn = -sgn;
    a = std::move(b);
    b = std::move(r);
    if (deg(b) == 0) {
      Rational q = 1;
      for (int i = 0; i < deg(a); ++i) q *= b[0];
      return Rational(sgn) * acc * q;
    }
  }
}

}  // namespace detail

// Resultant at formal degrees (equals the Sylvester determinant). Degenerate
// leading coefficients are peeled off by the Laplace expansion identities
//   Res_{m,n}(f,g) = (-1)^n lc(g) Res_{m-1,n}(f,g)   (f-lead zero)
//   Res_{m,n}(f,g) = lc(f) Res_{m,n-1}(f,g)          (g-lead zero, f exact)
// then the subresultant walk runs at exact degrees.
inline Rational resultant(const BinaryForm& f, const BinaryForm& g) {
  int m = f.degree(), n = g.degree();
  if (m + n == 0) return 1;
  if (f.is_zero() || g.is_zero()) return 0;
  int fs = f.mult_t(), gs = g.mult_t();  // leading zero counts
  if (fs > 0 && gs > 0) return 0;        // common root at (1:0)
  Rational factor = 1;
  // peel f's zero leads: each step contributes (-1)^n lc(g), and g's s-lead
  // is nonzero here because fs > 0 forces gs == 0
  if (fs > 0) {
    for (int i = 0; i < fs; ++i) factor *= g[0];
    if ((n & 1) && (fs & 1)) factor = -factor;
  }
  // then g's zero leads against the exact-degree f: factor lc(f), sign +1
  if (gs > 0) {
    for (int i = 0; i < gs; ++i) factor *= f[fs];
  }
  std::vector<Rational> a(f.coeffs().begin() + fs, f.coeffs().end());
  std::vector<Rational> b(g.coeffs().begin() + gs, g.coeffs().end());
  return factor * detail::prs_resultant(std::move(a), std::move(b));
}

// Discriminant. Degree 2 uses the classical b^2 - 4ac; higher degrees use
// the resultant of the two partials (raw Sylvester scale; only vanishing is
// consumed downstream).
inline constexpr const char* kDiscriminantConvention =
    "deg2: b^2-4ac; deg>=3: Res(df/ds, df/dt) at formal degrees";

inline Rational discriminant(const BinaryForm& f) {
  int d = f.degree();
  if (d < 2) return 1;
  if (d == 2) return f[1] * f[1] - 4 * f[0] * f[2];
  return resultant(f.derivative_s(), f.derivative_t());
}

// Squarefree test: gcd(f, df/ds, df/dt) constant.
inline bool is_squarefree(const BinaryForm& f) {
  if (f.is_zero()) return false;
  if (f.degree() == 0) return true;
  BinaryForm g = bf_gcd(f, f.derivative_s(), f.derivative_t());
  return g.degree() == 0;
}

namespace detail {

// Positive divisors by trial division. Any cofactor surviving the trial
// bound is treated as prime, so the list is complete whenever the composite
// part of |n| factors below ~2^21.
inline std::vector<Int> positive_divisors(Int n) {
  if (n < 0) n = -n;
  std::vector<std::pair<Int, int>> fac;
  int e2 = 0;
  while (n % 2 == 0) {
    n /= 2;
    ++e2;
  }
  if (e2) fac.emplace_back(2, e2);
  Int d = 3;
  long steps = 0;
  while (d * d <= n && steps < (1L << 20)) {
    if (n % d == 0) {
      int e = 0;
      while (n % d == 0) {
        n /= d;
        ++e;
      }
      fac.emplace_back(d, e);
    }
    d += 2;
    ++steps;
  }
  if (n > 1) fac.emplace_back(n, 1);
  std::vector<Int> out{1};
  for (const auto& [p, e] : fac) {
    std::size_t base = out.size();
    Int pk = 1;
    for (int i = 1; i <= e; ++i) {
      pk *= p;
      for (std::size_t j = 0; j < base; ++j) out.push_back(out[j] * pk);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

// Rational projective roots of f as primitive pairs (s0, t0), t0 > 0 except
// for the root at infinity (1, 0). Every returned pair is a verified root;
// the list is complete whenever the outer coefficients of the primitive core
// factor within the trial-division bound of detail::positive_divisors.
inline std::vector<std::pair<Int, Int>> rational_roots(const BinaryForm& f) {
  if (f.is_zero())
    throw std::invalid_argument("rational_roots: zero form");
  std::vector<std::pair<Int, Int>> roots;
  BinaryForm g = f.normalized();
  int mt = g.mult_t(), ms = g.mult_s();
  if (mt > 0) roots.emplace_back(1, 0);
  if (ms > 0) roots.emplace_back(0, 1);
  std::vector<Rational> core(g.coeffs().begin() + mt, g.coeffs().end() - ms);
  int dc = (int)core.size() - 1;
  if (dc > 0) {
    // candidates u = p/q in lowest terms: p | trailing, q | leading
    // coefficient (integers: the normalized form is integer-primitive)
    Int lead = num(core.front());
    Int trail = num(core.back());
    BinaryForm h(dc, core);
    for (const Int& q : detail::positive_divisors(lead)) {
      for (const Int& p : detail::positive_divisors(trail)) {
        if (gcd(p, q) != 1) continue;
        if (h.eval(Rational(p), Rational(q)) == 0) roots.emplace_back(p, q);
        if (h.eval(Rational(-p), Rational(q)) == 0) roots.emplace_back(-p, q);
      }
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace nikforge
