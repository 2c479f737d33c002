// Binary forms (gcd, resultants, discriminants) and sparse multivariate
// polynomials (symmetric reduction, graded pieces). Resultants are checked
// against the Sylvester determinant, which is the defining convention.

#include <gtest/gtest.h>

#include "nikforge/binary_form.hpp"
#include "nikforge/multipoly.hpp"

using namespace nikforge;

namespace {

BinaryForm bf(std::initializer_list<int> cs) {
  BinaryForm f((int)cs.size() - 1);
  int k = 0;
  for (int c : cs) f[k++] = c;
  return f;
}

// deterministic small-coefficient generator
struct MiniRng {
  std::uint64_t s;
  explicit MiniRng(std::uint64_t seed) : s(seed) {}
  int next(int lo, int hi) {
    s += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z ^= z >> 31;
    return lo + (int)(z % (std::uint64_t)(hi - lo + 1));
  }
};

}  // namespace

TEST(BinaryForm, EvalAndArith) {
  BinaryForm f = bf({1, 0, -2});  // s^2 - 2 t^2
  EXPECT_EQ(f.eval(3, 1), Rational(7));
  EXPECT_EQ(f.eval_affine(Rational(1, 2)), Rational(-7, 4));
  BinaryForm g = f * f;
  EXPECT_EQ(g.degree(), 4);
  EXPECT_EQ(g.eval(3, 1), Rational(49));
  EXPECT_EQ((f - f).is_zero(), true);
}

TEST(BinaryForm, FactorMultiplicities) {
  BinaryForm f = shift_t(shift_s(bf({2, 1}), 1), 2);  // s t^2 (2s + t)
  EXPECT_EQ(f.degree(), 4);
  EXPECT_EQ(f.mult_s(), 1);
  EXPECT_EQ(f.mult_t(), 2);
  EXPECT_EQ(f.eval(1, 0), Rational(0));
  EXPECT_EQ(f.eval(0, 1), Rational(0));
  BinaryForm g = bf({1, 1});  // s + t
  EXPECT_EQ(g.mult_s(), 0);
  EXPECT_EQ(g.mult_t(), 0);
}

TEST(BinaryForm, Divexact) {
  BinaryForm f = bf({1, 0, -1});          // s^2 - t^2
  BinaryForm g = bf({1, -1});             // s - t
  auto q = divexact(f, g);
  ASSERT_TRUE(q.has_value());
  EXPECT_EQ(*q, bf({1, 1}));
  EXPECT_FALSE(divexact(bf({1, 0, 1}), g).has_value());
  // shared s/t factors
  BinaryForm h = shift_s(bf({1, 2, 1}), 2);  // s^2 (s+t)^2
  auto q2 = divexact(h, shift_s(bf({1, 1}), 1));
  ASSERT_TRUE(q2.has_value());
  EXPECT_EQ(*q2, shift_s(bf({1, 1}), 1));
}

TEST(BinaryForm, Gcd) {
  BinaryForm f = bf({1, -1}) * bf({1, 1}) * bf({2, 3});
  BinaryForm g = bf({1, 1}) * bf({2, 3}) * bf({5, 7});
  BinaryForm d = bf_gcd(f, g);
  EXPECT_EQ(d, (bf({1, 1}) * bf({2, 3})).normalized());
  // gcd with s/t powers
  BinaryForm a = shift_s(shift_t(bf({1, 1}), 2), 1);  // s t^2 (s+t)
  BinaryForm b = shift_t(bf({1, 2, 1}), 1);           // t (s+t)^2
  EXPECT_EQ(bf_gcd(a, b), shift_t(bf({1, 1}), 1));
  // coprime pairs reduce to constants
  EXPECT_EQ(bf_gcd(bf({1, 0}), bf({0, 1})).degree(), 0);  // gcd(s, t) = 1
  EXPECT_EQ(bf_gcd(bf({1, -1}), bf({1, 1})).degree(), 0);
  // zero absorbs
  BinaryForm z(3);
  EXPECT_EQ(bf_gcd(z, f), f.normalized());
}

TEST(BinaryForm, ResultantPinnedValues) {
  // Res(s, t) = 1 at formal degrees (1,1)
  EXPECT_EQ(resultant(bf({1, 0}), bf({0, 1})), Rational(1));
  // Res(s^2 - t^2, s^2 + t^2) = 4
  EXPECT_EQ(resultant(bf({1, 0, -1}), bf({1, 0, 1})), Rational(4));
  // coprime linear forms: Res(as+bt, cs+dt) = ad - bc
  EXPECT_EQ(resultant(bf({2, 3}), bf({5, 7})), Rational(2 * 7 - 3 * 5));
  // common factor kills it
  EXPECT_EQ(resultant(bf({1, -1}) * bf({1, 1}), bf({1, -1}) * bf({2, 1})),
            Rational(0));
}

TEST(BinaryForm, ResultantMatchesSylvester) {
  MiniRng rng(42);
  for (int trial = 0; trial < 60; ++trial) {
    int m = rng.next(1, 5), n = rng.next(1, 5);
    BinaryForm f(m), g(n);
    for (int k = 0; k <= m; ++k) f[k] = rng.next(-4, 4);
    for (int k = 0; k <= n; ++k) g[k] = rng.next(-4, 4);
    if (f.is_zero() || g.is_zero()) continue;
    EXPECT_EQ(resultant(f, g), resultant_sylvester(f, g))
        << "trial " << trial << " f=" << f.str() << " g=" << g.str();
  }
}

TEST(BinaryForm, ResultantDegenerateLeads) {
  MiniRng rng(7);
  // force vanishing leading (and trailing) coefficients; these exercise the
  // peeling identities against the raw Sylvester determinant
  for (int trial = 0; trial < 40; ++trial) {
    int m = rng.next(2, 5), n = rng.next(2, 5);
    BinaryForm f(m), g(n);
    for (int k = 0; k <= m; ++k) f[k] = rng.next(-3, 3);
    for (int k = 0; k <= n; ++k) g[k] = rng.next(-3, 3);
    int kill = rng.next(0, 2);
    for (int k = 0; k < kill && k <= m; ++k) f[k] = 0;
    if (trial % 2) g[0] = 0;
    if (f.is_zero() || g.is_zero()) continue;
    EXPECT_EQ(resultant(f, g), resultant_sylvester(f, g))
        << "trial " << trial << " f=" << f.str() << " g=" << g.str();
  }
}

TEST(BinaryForm, Discriminant) {
  EXPECT_EQ(discriminant(bf({1, 0, -1})), Rational(4));   // s^2 - t^2
  EXPECT_EQ(discriminant(bf({1, 0, 0})), Rational(0));    // s^2
  EXPECT_EQ(discriminant(shift_s(bf({1}), 1) * bf({0, 1})), Rational(1));  // st
  EXPECT_EQ(discriminant(bf({1, 2, 1})), Rational(0));    // (s+t)^2
  // cubic with distinct roots vs a double root
  EXPECT_NE(discriminant(bf({1, 0, -1, 0})), Rational(0));   // s(s-t)(s+t)
  EXPECT_EQ(discriminant(bf({1, -1}) * bf({1, -1}) * bf({1, 1})), Rational(0));
}

TEST(BinaryForm, Squarefree) {
  EXPECT_TRUE(is_squarefree(bf({1, 0, -1})));
  EXPECT_FALSE(is_squarefree(bf({1, 2, 1})));
  EXPECT_FALSE(is_squarefree(shift_s(bf({1, 1}), 2)));  // s^2 (s+t)
  EXPECT_TRUE(is_squarefree(shift_s(bf({1, 1}), 1)));   // s (s+t)
  // squarefree iff discriminant nonzero, on a small sweep
  MiniRng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    BinaryForm f(4);
    for (int k = 0; k <= 4; ++k) f[k] = rng.next(-3, 3);
    if (f.is_zero()) continue;
    // the disc test needs exact degree (nonzero s-lead) for the equivalence
    if (f[0] == 0) continue;
    EXPECT_EQ(is_squarefree(f), discriminant(f) != 0) << f.str();
  }
}

TEST(BinaryForm, Gl2Substitution) {
  // f(s,t) = s t -> f(s+t, s-t) = s^2 - t^2
  BinaryForm st2 = bf({0, 1, 0});
  EXPECT_EQ(st2.gl2(1, 1, 1, -1), bf({1, 0, -1}));
  // roots transform: if f(a,b) = 0 then gl2 image vanishes at preimage
  BinaryForm f = bf({1, -3, 2});  // roots (s:t) = (1:1), (2:1) affine 1, 1/2
  BinaryForm g = f.gl2(2, 1, 0, 1);  // s -> 2s + t
  EXPECT_EQ(g.eval(0, 1), f.eval(1, 1));
  EXPECT_EQ(g.eval(1, 0), f.eval(2, 0));
  // degree preserved, invertible map preserves squarefreeness
  EXPECT_TRUE(is_squarefree(f));
  EXPECT_TRUE(is_squarefree(f.gl2(3, 1, 2, 1)));
}

TEST(BinaryForm, RationalRootsPinned) {
  // (s - 2t)(2s + 3t) s^2 t
  BinaryForm f = shift_t(shift_s(bf({1, -2}) * bf({2, 3}), 2), 1);
  std::vector<std::pair<Int, Int>> want = {
      {-3, 2}, {0, 1}, {1, 0}, {2, 1}};
  EXPECT_EQ(rational_roots(f), want);

  // repeated roots are listed once
  EXPECT_EQ(rational_roots(bf({1, -1}) * bf({1, -1})),
            (std::vector<std::pair<Int, Int>>{{1, 1}}));
  // no rational roots
  EXPECT_TRUE(rational_roots(bf({1, 0, 1})).empty());
  EXPECT_TRUE(rational_roots(bf({3})).empty());
  // scale invariance: the primitive core drives the divisor candidates
  EXPECT_EQ(rational_roots(bf({3, -6})),
            (std::vector<std::pair<Int, Int>>{{2, 1}}));
  // denominators larger than one
  EXPECT_EQ(rational_roots(bf({3, 2, -1})),
            (std::vector<std::pair<Int, Int>>{{-1, 1}, {1, 3}}));
  EXPECT_THROW(rational_roots(BinaryForm(2)), std::invalid_argument);
}

TEST(BinaryForm, RationalRootsMatchScan) {
  // oracle: exhaustive primitive-pair scan; coefficient bounds keep every
  // possible rational root inside the scanned box
  MiniRng rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    BinaryForm f(5);
    for (int k = 0; k <= 5; ++k) f[k] = rng.next(-6, 6);
    if (f.is_zero()) continue;
    std::vector<std::pair<Int, Int>> scan;
    if (f.eval(1, 0) == 0) scan.emplace_back(1, 0);
    for (int p = -36; p <= 36; ++p)
      for (int q = 1; q <= 36; ++q) {
        if (gcd(Int(p < 0 ? -p : p), Int(q)) != 1) continue;
        if (f.eval(p, q) == 0) scan.emplace_back(p, q);
      }
    std::sort(scan.begin(), scan.end());
    EXPECT_EQ(rational_roots(f), scan) << f.str();
  }
}

TEST(MultiPoly, BasicArith) {
  auto x = MultiPoly::variable(3, 0), y = MultiPoly::variable(3, 1),
       z = MultiPoly::variable(3, 2);
  MultiPoly p = x * x + y.scaled(2) * z - MultiPoly::constant(3, 5);
  EXPECT_EQ(p.eval({Rational(1), Rational(2), Rational(3)}), Rational(8));
  EXPECT_EQ(p.total_degree(), 2);
  EXPECT_FALSE(p.is_homogeneous());
  EXPECT_TRUE((x * x + y * z).is_homogeneous());
  MultiPoly dp = p.derivative(0);
  EXPECT_EQ(dp, x.scaled(2));
  EXPECT_EQ((p - p).total_degree(), -1);
}

TEST(MultiPoly, Substitute) {
  auto x = MultiPoly::variable(2, 0), y = MultiPoly::variable(2, 1);
  MultiPoly p = x * x - y;
  // x := y + 1
  MultiPoly q = p.substitute(0, y + MultiPoly::constant(2, 1));
  EXPECT_EQ(q.eval({Rational(0), Rational(3)}), Rational(13));
  EXPECT_EQ(q.degree_in(0), 0);
}

TEST(MultiPoly, DivexactUni) {
  auto u = MultiPoly::variable(2, 0), v = MultiPoly::variable(2, 1);
  MultiPoly num = u * u - v * v;
  auto q = divexact_uni(num, u - v, 0);
  ASSERT_TRUE(q.has_value());
  EXPECT_EQ(*q, u + v);
  EXPECT_FALSE(divexact_uni(u * u + v * v, u - v, 0).has_value());
  // division by a poly with monomial lead in var 1
  MultiPoly g = u * v + MultiPoly::constant(2, 1);
  MultiPoly f = g * (v * v + u);
  auto q2 = divexact_uni(f, g, 1);
  ASSERT_TRUE(q2.has_value());
  EXPECT_EQ(*q2, v * v + u);
}

TEST(MultiPoly, SymmetricReduce) {
  auto u = MultiPoly::variable(2, 0), v = MultiPoly::variable(2, 1);
  auto e1 = u, e2 = v;  // output slots
  // u^2 + v^2 = e1^2 - 2 e2
  EXPECT_EQ(symmetric_reduce(u * u + v * v, 0, 1), e1 * e1 - e2.scaled(2));
  // u^3 v + u v^3 = e2 (e1^2 - 2 e2)
  EXPECT_EQ(symmetric_reduce(u * u * u * v + u * v * v * v, 0, 1),
            e2 * (e1 * e1 - e2.scaled(2)));
  // u v = e2
  EXPECT_EQ(symmetric_reduce(u * v, 0, 1), e2);
  // constants and spectator variables pass through
  auto w = MultiPoly::variable(3, 2);
  auto uu = MultiPoly::variable(3, 0), vv = MultiPoly::variable(3, 1);
  EXPECT_EQ(symmetric_reduce(w * (uu + vv), 0, 1), w * uu);
  // asymmetric input throws
  EXPECT_THROW(symmetric_reduce(u * u + v, 0, 1), std::invalid_argument);
  EXPECT_THROW(symmetric_reduce(u * u * v - u * v * v, 0, 1),
               std::invalid_argument);
}

TEST(MultiPoly, SymmetricReduceEvalConsistency) {
  // evaluate both sides on random points: f(u,v) == g(u+v, uv)
  auto u = MultiPoly::variable(2, 0), v = MultiPoly::variable(2, 1);
  MiniRng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    MultiPoly f(2);
    for (int i = 0; i < 6; ++i) {
      int a = rng.next(0, 3), b = rng.next(0, 3), c = rng.next(-3, 3);
      Mono m = {(std::uint16_t)a, (std::uint16_t)b};
      Mono mm = {(std::uint16_t)b, (std::uint16_t)a};
      f.add_term(m, c);
      if (a != b) f.add_term(mm, c);
    }
    MultiPoly g = symmetric_reduce(f, 0, 1);
    Rational uu(rng.next(-5, 5)), vv(rng.next(-5, 5));
    EXPECT_EQ(f.eval({uu, vv}), g.eval({uu + vv, uu * vv}));
  }
}

TEST(MultiPoly, SubstitutePairCleared) {
  // f(e1,e2) homogeneous-in-(e1,e2) test of clearing: f = e1^2 - 4 e2 with
  // e1 := -B/A, e2 := C/A cleared by A^2 gives B^2 - 4 A C
  auto e1 = MultiPoly::variable(5, 0), e2 = MultiPoly::variable(5, 1);
  auto A = MultiPoly::variable(5, 2), B = MultiPoly::variable(5, 3),
       C = MultiPoly::variable(5, 4);
  MultiPoly f = e1 * e1 - e2.scaled(4);
  MultiPoly r = substitute_pair_cleared(f, 0, 1, -B, C, A);
  EXPECT_EQ(r, B * B - A * C.scaled(4));
  // mixed degrees: max e1+e2 degree controls the clearing power
  MultiPoly h = e1 * e2 + e2;  // M = 2
  MultiPoly rh = substitute_pair_cleared(h, 0, 1, -B, C, A);
  EXPECT_EQ(rh, -B * C + A * C);
}

TEST(MultiPoly, ComposeBinary) {
  // x0 x2 - x1^2 on the quadratic rational normal curve (s^2, st, t^2) is 0
  auto x0 = MultiPoly::variable(3, 0), x1 = MultiPoly::variable(3, 1),
       x2 = MultiPoly::variable(3, 2);
  std::vector<BinaryForm> rnc2 = {bf({1, 0, 0}), bf({0, 1, 0}), bf({0, 0, 1})};
  EXPECT_TRUE(compose_binary(x0 * x2 - x1 * x1, rnc2).is_zero());
  BinaryForm im = compose_binary(x0 + x2, rnc2);
  EXPECT_EQ(im, bf({1, 0, 1}));
  EXPECT_THROW(compose_binary(x0 + x1 * x1, rnc2), std::invalid_argument);
}

TEST(GradedPiece, TwistedCubicHilbertFunction) {
  // ideal of the twisted cubic in P^3: three 2x2 minors of
  // [x0 x1 x2; x1 x2 x3]; HF of the quotient at d is 3d + 1
  auto x = [](int i) { return MultiPoly::variable(4, i); };
  std::vector<MultiPoly> gens = {x(0) * x(2) - x(1) * x(1),
                                 x(0) * x(3) - x(1) * x(2),
                                 x(1) * x(3) - x(2) * x(2)};
  for (unsigned d = 1; d <= 6; ++d) {
    auto gp = graded_piece(gens, d);
    EXPECT_EQ(gp.quotient_dim(), 3 * d + 1) << "degree " << d;
  }
}

TEST(GradedPiece, FullnessDetectsEmptyLocus) {
  // x^2, y^2, z^2 in 3 vars have no common projective zero; the ideal fills
  // the whole degree-4 piece (Macaulay bound) but not degree 3
  auto x = MultiPoly::variable(3, 0), y = MultiPoly::variable(3, 1),
       z = MultiPoly::variable(3, 2);
  std::vector<MultiPoly> gens = {x * x, y * y, z * z};
  EXPECT_FALSE(graded_piece(gens, 3).full());
  EXPECT_TRUE(graded_piece(gens, 4).full());
  // with a common zero (drop z^2): never full
  std::vector<MultiPoly> gens2 = {x * x, y * y};
  EXPECT_FALSE(graded_piece(gens2, 4).full());
  EXPECT_FALSE(graded_piece(gens2, 6).full());
}

TEST(GradedPiece, MatchesDenseRank) {
  // cross-check the sparse staircase against a dense rref on the same
  // Macaulay matrix
  auto x = MultiPoly::variable(3, 0), y = MultiPoly::variable(3, 1),
       z = MultiPoly::variable(3, 2);
  std::vector<MultiPoly> gens = {x * x + y * z, x * y - z * z};
  unsigned d = 4;
  auto gp = graded_piece(gens, d);
  // dense: rows indexed by gen x multiplier monomial, cols by degree-d monos
  auto cols = monomials_of_degree(3, d);
  auto colindex = [&](const Mono& m) {
    for (std::size_t i = 0; i < cols.size(); ++i)
      if (cols[i] == m) return i;
    throw std::logic_error("missing column");
  };
  std::vector<std::vector<Rational>> rows;
  for (auto& g : gens)
    for (auto& m : monomials_of_degree(3, d - g.total_degree())) {
      MultiPoly mult(3);
      mult.add_term(m, 1);
      MultiPoly prod = mult * g;
      std::vector<Rational> row(cols.size(), Rational(0));
      for (auto& [mm, c] : prod.terms()) row[colindex(mm)] = c;
      rows.push_back(std::move(row));
    }
  Mat dense(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) dense(i, j) = rows[i][j];
  EXPECT_EQ(gp.ideal_rank, rank(dense));
  EXPECT_EQ(gp.monomials, cols.size());
}
