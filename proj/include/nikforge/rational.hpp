#pragma once

// Exact arithmetic base types. Rational is always in lowest terms with
// positive denominator; Int is an arbitrary-precision signed integer.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nikforge {

namespace mp = boost::multiprecision;

using Int = mp::number<mp::cpp_int_backend<>, mp::et_off>;
using Rational = mp::number<mp::cpp_rational_backend, mp::et_off>;

inline Int num(const Rational& q) { return numerator(q); }
inline Int den(const Rational& q) { return denominator(q); }

inline int sign(const Rational& q) { return q.sign(); }

// Serialized form used everywhere (certificates included): "num/den",
// denominator always present and positive.
inline std::string rat_str(const Rational& q) {
  return num(q).str() + "/" + den(q).str();
}

inline Rational parse_rational(std::string_view s) {
  auto is_int = [](std::string_view v) {
    if (!v.empty() && (v[0] == '-' || v[0] == '+')) v.remove_prefix(1);
    if (v.empty()) return false;
    for (char c : v)
      if (c < '0' || c > '9') return false;
    return true;
  };
  auto slash = s.find('/');
  std::string_view ns = s.substr(0, slash);
  if (!is_int(ns) || (slash != std::string_view::npos &&
                      !is_int(s.substr(slash + 1))))
    throw std::invalid_argument("malformed rational: " + std::string(s));
  if (slash == std::string_view::npos) return Rational(Int(std::string(s)));
  Int n{std::string(ns)};
  Int d{std::string(s.substr(slash + 1))};
  if (d == 0) throw std::invalid_argument("rational with zero denominator");
  return Rational(n) / Rational(d);
}

// floor(sqrt(n)) for n >= 0.
inline Int isqrt(const Int& n) {
  if (n < 0) throw std::domain_error("isqrt of negative");
  return sqrt(n);
}

inline bool is_perfect_square(const Int& n, Int* root = nullptr) {
  if (n < 0) return false;
  Int r = isqrt(n);
  if (r * r != n) return false;
  if (root) *root = r;
  return true;
}

// Largest integer t with t <= x.
inline Int floor_rat(const Rational& x) {
  Int n = num(x), d = den(x);
  Int q = n / d;
  if (n < 0 && q * d != n) --q;
  return q;
}

inline Int ceil_rat(const Rational& x) { return -floor_rat(-x); }

// Largest integer t with t^2 <= x (x >= 0): floor of sqrt(x).
inline Int floor_sqrt_rat(const Rational& x) {
  if (x < 0) throw std::domain_error("floor_sqrt_rat of negative");
  // sqrt(n/d) = sqrt(n*d)/d, so start from the integer sqrt and adjust.
  Int cand = isqrt(num(x) * den(x)) / den(x);
  while ((cand + 1) * (cand + 1) <= x) ++cand;
  while (cand > 0 && cand * cand > x) --cand;
  return cand;
}

// FNV-1a 64-bit digest, used for deterministic input fingerprints.
inline std::uint64_t fnv1a64(std::string_view data,
                             std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[i] = digits[v & 0xf];
  return s;
}

// Binomial coefficient, exact.
inline Int binomial(long n, long k) {
  if (k < 0 || k > n) return 0;
  Int r = 1;
  for (long i = 0; i < k; ++i) {
    r *= n - i;
    r /= i + 1;
  }
  return r;
}

}  // namespace nikforge
