#pragma once

// Sparse multivariate polynomials over the rationals with a fixed global
// graded-lex monomial order, plus the graded-piece engine used for Hilbert
// function computations (sparse staircase reduction of Macaulay matrices).

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "nikforge/binary_form.hpp"
#include "nikforge/rational.hpp"

namespace nikforge {

using Mono = std::vector<std::uint16_t>;

// graded lex: lower total degree first, ties by lex with the earlier
// variable's larger exponent winning (so the map's rbegin is the lead term)
struct GrlexLess {
  bool operator()(const Mono& a, const Mono& b) const {
    unsigned da = 0, db = 0;
    for (auto e : a) da += e;
    for (auto e : b) db += e;
    if (da != db) return da < db;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i)
      if (a[i] != b[i]) return a[i] < b[i];
    return false;
  }
};

inline unsigned mono_degree(const Mono& m) {
  unsigned d = 0;
  for (auto e : m) d += e;
  return d;
}

class MultiPoly {
 public:
  using TermMap = std::map<Mono, Rational, GrlexLess>;

  explicit MultiPoly(std::size_t nvars = 0) : nvars_(nvars) {}

  static MultiPoly constant(std::size_t nvars, const Rational& c) {
    MultiPoly p(nvars);
    p.add_term(Mono(nvars, 0), c);
    return p;
  }
  static MultiPoly variable(std::size_t nvars, std::size_t i) {
    MultiPoly p(nvars);
    Mono m(nvars, 0);
    m[i] = 1;
    p.add_term(m, 1);
    return p;
  }

  std::size_t nvars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }

  void add_term(const Mono& m, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Rational coeff(const Mono& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  int total_degree() const {  // -1 for the zero polynomial
    if (terms_.empty()) return -1;
    return (int)mono_degree(terms_.rbegin()->first);
  }

  bool is_homogeneous() const {
    if (terms_.empty()) return true;
    unsigned d = mono_degree(terms_.begin()->first);
    for (auto& [m, c] : terms_)
      if (mono_degree(m) != d) return false;
    return true;
  }

  int degree_in(std::size_t var) const {
    int d = -1;
    for (auto& [m, c] : terms_) d = std::max(d, (int)m[var]);
    return d;
  }

  MultiPoly operator+(const MultiPoly& o) const {
    MultiPoly r = *this;
    for (auto& [m, c] : o.terms_) r.add_term(m, c);
    return r;
  }
  MultiPoly operator-(const MultiPoly& o) const {
    MultiPoly r = *this;
    for (auto& [m, c] : o.terms_) r.add_term(m, -c);
    return r;
  }
  MultiPoly operator-() const {
    MultiPoly r = *this;
    for (auto& [m, c] : r.terms_) c = -c;
    return r;
  }
  MultiPoly operator*(const MultiPoly& o) const {
    MultiPoly r(nvars_);
    for (auto& [ma, ca] : terms_)
      for (auto& [mb, cb] : o.terms_) {
        Mono m = ma;
        for (std::size_t i = 0; i < nvars_; ++i) m[i] += mb[i];
        r.add_term(m, ca * cb);
      }
    return r;
  }
  MultiPoly scaled(const Rational& c) const {
    if (c == 0) return MultiPoly(nvars_);
    MultiPoly r = *this;
    for (auto& [m, v] : r.terms_) v *= c;
    return r;
  }
  MultiPoly pow(int e) const {
    MultiPoly r = constant(nvars_, 1);
    for (int i = 0; i < e; ++i) r = r * *this;
    return r;
  }
  bool operator==(const MultiPoly& o) const {
    return nvars_ == o.nvars_ && terms_ == o.terms_;
  }

  MultiPoly derivative(std::size_t var) const {
    MultiPoly r(nvars_);
    for (auto& [m, c] : terms_) {
      if (m[var] == 0) continue;
      Mono d = m;
      d[var] -= 1;
      r.add_term(d, c * (int)m[var]);
    }
    return r;
  }

  Rational eval(const std::vector<Rational>& x) const {
    Rational acc = 0;
    for (auto& [m, c] : terms_) {
      Rational t = c;
      for (std::size_t i = 0; i < nvars_; ++i)
        for (unsigned e = 0; e < m[i]; ++e) t *= x[i];
      acc += t;
    }
    return acc;
  }

  // x_var := p, same variable space
  MultiPoly substitute(std::size_t var, const MultiPoly& p) const {
    std::vector<MultiPoly> pw = {constant(nvars_, 1)};
    MultiPoly r(nvars_);
    for (auto& [m, c] : terms_) {
      while (pw.size() <= m[var]) pw.push_back(pw.back() * p);
      Mono rest = m;
      rest[var] = 0;
      MultiPoly t(nvars_);
      t.add_term(rest, c);
      r = r + t * pw[m[var]];
    }
    return r;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      if (!first) os << " + ";
      first = false;
      os << rat_str(it->second);
      for (std::size_t i = 0; i < nvars_; ++i)
        if (it->first[i]) os << "*x" << i << "^" << it->first[i];
    }
    return os.str();
  }

 private:
  std::size_t nvars_;
  TermMap terms_;
};

// Substitute x_{v1} := P1/Q, x_{v2} := P2/Q and clear Q^M where
// M = max over terms of e_{v1} + e_{v2}; P1, P2, Q must not involve
// x_{v1}, x_{v2}. Returns sum c * P1^e1 * P2^e2 * Q^(M-e1-e2) * rest.
inline MultiPoly substitute_pair_cleared(const MultiPoly& f, std::size_t v1,
                                         std::size_t v2, const MultiPoly& P1,
                                         const MultiPoly& P2,
                                         const MultiPoly& Q) {
  unsigned M = 0;
  for (auto& [m, c] : f.terms()) M = std::max(M, (unsigned)(m[v1] + m[v2]));
  std::vector<MultiPoly> p1 = {MultiPoly::constant(f.nvars(), 1)};
  std::vector<MultiPoly> p2 = p1, q = p1;
  auto pw = [](std::vector<MultiPoly>& cache, const MultiPoly& base,
               unsigned e) -> const MultiPoly& {
    while (cache.size() <= e) cache.push_back(cache.back() * base);
    return cache[e];
  };
  MultiPoly r(f.nvars());
  for (auto& [m, c] : f.terms()) {
    unsigned e1 = m[v1], e2 = m[v2];
    Mono rest = m;
    rest[v1] = rest[v2] = 0;
    MultiPoly t(f.nvars());
    t.add_term(rest, c);
    r = r + t * pw(p1, P1, e1) * pw(p2, P2, e2) * pw(q, Q, M - e1 - e2);
  }
  return r;
}

// Map each variable to a binary form; f must be homogeneous and all image
// forms must share one degree. Result degree = deg(f) * image degree.
inline BinaryForm compose_binary(const MultiPoly& f,
                                 const std::vector<BinaryForm>& img) {
  if (!f.is_homogeneous()) throw std::invalid_argument("compose_binary: inhomogeneous");
  int d = img.empty() ? 0 : img[0].degree();
  for (auto& b : img)
    if (b.degree() != d) throw std::invalid_argument("compose_binary: degree mix");
  if (f.is_zero()) return BinaryForm(0);
  int D = f.total_degree();
  BinaryForm acc(D * d);
  for (auto& [m, c] : f.terms()) {
    BinaryForm t = BinaryForm::constant(c);
    for (std::size_t i = 0; i < f.nvars(); ++i)
      for (unsigned e = 0; e < m[i]; ++e) t = t * img[i];
    acc = acc + t;
  }
  return acc;
}

// Map each variable to a polynomial in a fresh variable space.
inline MultiPoly compose(const MultiPoly& f, const std::vector<MultiPoly>& img) {
  std::size_t nv = img.empty() ? 0 : img[0].nvars();
  MultiPoly acc(nv);
  for (auto& [m, c] : f.terms()) {
    MultiPoly t = MultiPoly::constant(nv, c);
    for (std::size_t i = 0; i < f.nvars(); ++i)
      for (unsigned e = 0; e < m[i]; ++e) t = t * img[i];
    acc = acc + t;
  }
  return acc;
}

// Exact division by g viewed as univariate in x_var; the coefficient of
// g's top x_var power must be a single term. nullopt on remainder.
inline std::optional<MultiPoly> divexact_uni(const MultiPoly& f,
                                             const MultiPoly& g,
                                             std::size_t var) {
  int dg = g.degree_in(var);
  if (dg < 0) throw std::domain_error("divexact_uni: zero divisor");
  // split g by x_var exponent
  std::vector<MultiPoly> gc((std::size_t)dg + 1, MultiPoly(g.nvars()));
  for (auto& [m, c] : g.terms()) {
    Mono rest = m;
    unsigned e = rest[var];
    rest[var] = 0;
    gc[e].add_term(rest, c);
  }
  if (gc[dg].term_count() != 1)
    throw std::invalid_argument("divexact_uni: non-monomial lead");
  auto [lm, lc] = *gc[dg].terms().begin();
  MultiPoly rem = f;
  MultiPoly quo(f.nvars());
  while (!rem.is_zero() && rem.degree_in(var) >= dg) {
    int dr = rem.degree_in(var);
    // collect rem's top slice
    MultiPoly top(f.nvars());
    for (auto& [m, c] : rem.terms())
      if ((int)m[var] == dr) {
        Mono rest = m;
        rest[var] = 0;
        top.add_term(rest, c);
      }
    // q_step = top / (lc * lm) * x_var^(dr-dg); requires divisibility by lm
    MultiPoly qs(f.nvars());
    for (auto& [m, c] : top.terms()) {
      Mono q = m;
      for (std::size_t i = 0; i < q.size(); ++i) {
        if (q[i] < lm[i]) return std::nullopt;
        q[i] -= lm[i];
      }
      q[var] = (std::uint16_t)(dr - dg);
      qs.add_term(q, c / lc);
    }
    quo = quo + qs;
    rem = rem - qs * g;
    // the dr slice cancels exactly; anything else is a logic error
    if (!rem.is_zero() && rem.degree_in(var) >= dr)
      throw std::logic_error("divexact_uni: top slice failed to cancel");
  }
  if (!rem.is_zero()) return std::nullopt;
  return quo;
}

// Rewrite a polynomial symmetric in x_u, x_v in terms of e1 = x_u + x_v and
// e2 = x_u x_v, returned in the same two slots (x_u := e1, x_v := e2).
// Throws std::invalid_argument naming the offending exponent pair when the
// input is not symmetric. Uses power sums: u^k + v^k = p_k with
// p_0 = 2, p_1 = e1, p_k = e1 p_{k-1} - e2 p_{k-2}.
inline MultiPoly symmetric_reduce(const MultiPoly& f, std::size_t u,
                                  std::size_t v) {
  std::size_t nv = f.nvars();
  MultiPoly e1 = MultiPoly::variable(nv, u);
  MultiPoly e2 = MultiPoly::variable(nv, v);
  std::vector<MultiPoly> psum = {MultiPoly::constant(nv, 2), e1};
  auto power_sum = [&](unsigned k) -> const MultiPoly& {
    while (psum.size() <= k)
      psum.push_back(e1 * psum[psum.size() - 1] - e2 * psum[psum.size() - 2]);
    return psum[k];
  };
  MultiPoly r(nv);
  for (auto& [m, c] : f.terms()) {
    unsigned i = m[u], j = m[v];
    if (i < j) continue;  // handled by the mirror term
    Mono rest = m;
    rest[u] = rest[v] = 0;
    if (i > j) {
      Mono mirror = m;
      mirror[u] = (std::uint16_t)j;
      mirror[v] = (std::uint16_t)i;
      if (f.coeff(mirror) != c) {
        std::ostringstream os;
        os << "symmetric_reduce: asymmetric at exponents (" << i << "," << j
           << ") vs (" << j << "," << i << ")";
        throw std::invalid_argument(os.str());
      }
    }
    MultiPoly t(nv);
    t.add_term(rest, c);
    if (i == j) {
      r = r + t * e2.pow((int)i);
    } else {
      r = r + t * e2.pow((int)j) * power_sum(i - j);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Graded pieces of homogeneous ideals via sparse staircase reduction.
// Monomials pack into one uint64 (big-endian degree byte then up to 7
// exponent bytes) so that integer comparison is the graded-lex order.

namespace detail {

inline std::uint64_t pack_mono(const Mono& m) {
  unsigned d = mono_degree(m);
  if (m.size() > 7 || d > 255)
    throw std::invalid_argument("graded_piece: needs nvars <= 7, degree <= 255");
  std::uint64_t k = (std::uint64_t)d << 56;
  for (std::size_t i = 0; i < m.size(); ++i)
    k |= (std::uint64_t)(m[i] & 0xff) << (8 * (6 - i));
  return k;
}

using SparseRow = std::vector<std::pair<std::uint64_t, Rational>>;  // key desc

// r -= c * b, b monic-led, merge of descending-sorted rows
inline SparseRow row_axpy(const SparseRow& r, const SparseRow& b,
                          const Rational& c) {
  SparseRow out;
  out.reserve(r.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < r.size() || j < b.size()) {
    if (j == b.size() || (i < r.size() && r[i].first > b[j].first)) {
      out.push_back(r[i++]);
    } else if (i == r.size() || b[j].first > r[i].first) {
      Rational v = -c * b[j].second;
      if (v != 0) out.emplace_back(b[j].first, v);
      ++j;
    } else {
      Rational v = r[i].second - c * b[j].second;
      if (v != 0) out.emplace_back(r[i].first, v);
      ++i, ++j;
    }
  }
  return out;
}

}  // namespace detail

struct GradedPiece {
  std::size_t monomials = 0;   // dim of the full degree-d space
  std::size_t ideal_rank = 0;  // dim of the ideal's degree-d piece
  std::size_t quotient_dim() const { return monomials - ideal_rank; }
  bool full() const { return ideal_rank == monomials; }
};

// all degree-d monomials in n vars, ascending grlex
inline std::vector<Mono> monomials_of_degree(std::size_t n, unsigned d) {
  std::vector<Mono> out;
  Mono m(n, 0);
  // enumerate recursively, then sort by grlex for a canonical order
  std::function<void(std::size_t, unsigned)> rec = [&](std::size_t i,
                                                       unsigned left) {
    if (i + 1 == n) {
      m[i] = (std::uint16_t)left;
      out.push_back(m);
      return;
    }
    for (unsigned e = 0; e <= left; ++e) {
      m[i] = (std::uint16_t)e;
      rec(i + 1, left - e);
    }
    m[i] = 0;
  };
  if (n > 0) rec(0, d);
  std::sort(out.begin(), out.end(), GrlexLess{});
  return out;
}

// Degree-d piece of the ideal generated by homogeneous gens (all in the same
// variable space): rank of the Macaulay matrix {m * g}, reduced sparsely.
inline GradedPiece graded_piece(const std::vector<MultiPoly>& gens, unsigned d) {
  if (gens.empty()) throw std::invalid_argument("graded_piece: no generators");
  std::size_t n = gens[0].nvars();
  GradedPiece out;
  // dim of the degree-d space: C(d + n - 1, n - 1)
  out.monomials =
      binomial((long)(d + n - 1), (long)(n - 1)).convert_to<std::size_t>();
  std::map<std::uint64_t, detail::SparseRow, std::greater<>> basis;
  for (auto& g : gens) {
    if (g.is_zero()) continue;
    if (!g.is_homogeneous())
      throw std::invalid_argument("graded_piece: inhomogeneous generator");
    unsigned dg = (unsigned)g.total_degree();
    if (dg > d) continue;
    detail::SparseRow base;
    for (auto it = g.terms().rbegin(); it != g.terms().rend(); ++it)
      base.emplace_back(detail::pack_mono(it->first), it->second);
    for (auto& m : monomials_of_degree(n, d - dg)) {
      std::uint64_t shift = detail::pack_mono(m);
      detail::SparseRow row = base;
      for (auto& [k, c] : row) k += shift;  // no carries: fields stay < 256
      while (!row.empty()) {
        auto it = basis.find(row[0].first);
        if (it == basis.end()) {
          Rational inv = row[0].second;
          for (auto& [k, c] : row) c /= inv;
          basis.emplace(row[0].first, std::move(row));
          break;
        }
        row = detail::row_axpy(row, it->second, row[0].second);
      }
    }
  }
  out.ideal_rank = basis.size();
  return out;
}

}  // namespace nikforge
