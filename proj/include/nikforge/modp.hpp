#pragma once

// Arithmetic in F_p for word-sized primes. Two uses, with different logical
// weight: point sampling (smoothness spot checks, labeled "sampled" in the
// certificate) and one-sided rank bounds that are exact over Q. A nonzero
// minor mod p is nonzero over Q, so rank_p <= rank_Q always; pairing a mod-p
// ideal-piece rank (upper bound on the quotient) with a mod-p evaluation
// rank at verified rational points (lower bound) pins a Hilbert value
// exactly without rational elimination.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nikforge/rational.hpp"

namespace nikforge {

// reduce a rational mod p; the denominator must be a unit
inline std::uint64_t modp_reduce(const Rational& q, std::uint64_t p) {
  Int n = num(q) % Int(p);
  Int d = den(q) % Int(p);
  if (d == 0) throw std::domain_error("modp: denominator divisible by p");
  std::uint64_t nn = ((n % Int(p) + Int(p)) % Int(p)).convert_to<std::uint64_t>();
  std::uint64_t dd = d.convert_to<std::uint64_t>();
  // Fermat inverse; p prime and dd != 0
  auto mulmod = [p](std::uint64_t a, std::uint64_t b) {
    return (std::uint64_t)((__uint128_t)a * b % p);
  };
  std::uint64_t inv = 1, base = dd, e = p - 2;
  while (e) {
    if (e & 1) inv = mulmod(inv, base);
    base = mulmod(base, base);
    e >>= 1;
  }
  return mulmod(nn, inv);
}

// dense matrix over F_p with row-echelon rank and right kernel
class ModMat {
 public:
  ModMat(std::size_t r, std::size_t c, std::uint64_t p)
      : rows_(r), cols_(c), p_(p), a_(r * c, 0) {}

  std::uint64_t& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  std::uint64_t at(std::size_t i, std::size_t j) const {
    return a_[i * cols_ + j];
  }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::size_t rank() const { return rref().second.size(); }

  // vectors spanning { v : M v = 0 }, one per free column
  std::vector<std::vector<std::uint64_t>> kernel_basis() const {
    auto [m, pivots] = rref();
    std::vector<char> is_pivot(cols_, 0);
    for (std::size_t c : pivots) is_pivot[c] = 1;
    std::vector<std::vector<std::uint64_t>> basis;
    for (std::size_t f = 0; f < cols_; ++f) {
      if (is_pivot[f]) continue;
      std::vector<std::uint64_t> v(cols_, 0);
      v[f] = 1;
      for (std::size_t r = 0; r < pivots.size(); ++r) {
        std::uint64_t e = m[r * cols_ + f];
        v[pivots[r]] = e ? p_ - e : 0;
      }
      basis.push_back(std::move(v));
    }
    return basis;
  }

 private:
  // Gauss-Jordan on a copy; returns the reduced matrix (pivot rows packed
  // on top with unit pivots) and the pivot column list.
  std::pair<std::vector<std::uint64_t>, std::vector<std::size_t>> rref()
      const {
    std::vector<std::uint64_t> m = a_;
    std::vector<std::size_t> pivots;
    auto idx = [this](std::size_t i, std::size_t j) { return i * cols_ + j; };
    auto mulmod = [this](std::uint64_t a, std::uint64_t b) {
      return (std::uint64_t)((__uint128_t)a * b % p_);
    };
    auto invmod = [&](std::uint64_t v) {
      std::uint64_t r = 1, e = p_ - 2;
      while (e) {
        if (e & 1) r = mulmod(r, v);
        v = mulmod(v, v);
        e >>= 1;
      }
      return r;
    };
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols_ && rank < rows_; ++col) {
      std::size_t piv = rank;
      while (piv < rows_ && m[idx(piv, col)] == 0) ++piv;
      if (piv == rows_) continue;
      std::swap_ranges(m.begin() + idx(piv, 0), m.begin() + idx(piv + 1, 0),
                       m.begin() + idx(rank, 0));
      std::uint64_t inv = invmod(m[idx(rank, col)]);
      for (std::size_t j = col; j < cols_; ++j)
        m[idx(rank, j)] = mulmod(m[idx(rank, j)], inv);
      for (std::size_t i = 0; i < rows_; ++i) {
        if (i == rank || m[idx(i, col)] == 0) continue;
        std::uint64_t f = m[idx(i, col)];
        for (std::size_t j = col; j < cols_; ++j) {
          std::uint64_t sub = mulmod(f, m[idx(rank, j)]);
          m[idx(i, j)] = (m[idx(i, j)] + p_ - sub) % p_;
        }
      }
      pivots.push_back(col);
      ++rank;
    }
    return {std::move(m), std::move(pivots)};
  }

  std::size_t rows_, cols_;
  std::uint64_t p_;
  std::vector<std::uint64_t> a_;
};

// Rank by forward elimination only, destroying the input. Half the work of
// ModMat::rank on the matrices the Hilbert certification feeds it (thousands
// of rows); no kernel, no back-substitution.
inline std::size_t echelon_rank(std::vector<std::vector<std::uint64_t>>& m,
                                std::uint64_t p) {
  if (m.empty()) return 0;
  std::size_t nr = m.size(), nc = m[0].size();
  auto mulmod = [p](std::uint64_t a, std::uint64_t b) {
    return (std::uint64_t)((__uint128_t)a * b % p);
  };
  auto invmod = [&](std::uint64_t v) {
    std::uint64_t r = 1, e = p - 2;
    while (e) {
      if (e & 1) r = mulmod(r, v);
      v = mulmod(v, v);
      e >>= 1;
    }
    return r;
  };
  std::size_t rank = 0;
  for (std::size_t col = 0; col < nc && rank < nr; ++col) {
    std::size_t piv = rank;
    while (piv < nr && m[piv][col] == 0) ++piv;
    if (piv == nr) continue;
    m[piv].swap(m[rank]);
    std::uint64_t inv = invmod(m[rank][col]);
    for (std::size_t j = col; j < nc; ++j) m[rank][j] = mulmod(m[rank][j], inv);
    for (std::size_t i = rank + 1; i < nr; ++i) {
      std::uint64_t f = m[i][col];
      if (f == 0) continue;
      m[i][col] = 0;
      const std::uint64_t* src = m[rank].data();
      std::uint64_t* dst = m[i].data();
      for (std::size_t j = col + 1; j < nc; ++j) {
        std::uint64_t sub = mulmod(f, src[j]);
        dst[j] = (dst[j] + p - sub) % p;
      }
    }
    ++rank;
  }
  return rank;
}

}  // namespace nikforge
