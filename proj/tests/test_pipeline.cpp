// Stage-level checks for the construction engine. The seed-1 state is built
// once and shared; oracles recompute stage claims through independent
// arithmetic routes (quotient-ring evaluation, point evaluation, exact
// elimination) rather than trusting the stage's own machinery.

#include <gtest/gtest.h>

#include <optional>
#include <string>
#include <vector>

#include "nikforge/pipeline.hpp"

using namespace nikforge;

namespace {

const PipelineState& seed1() {
  static PipelineState st = run_full(1);
  return st;
}

// Arithmetic in Q[x] / (a x^2 + b x + c), elements r0 + r1 x. Evaluating a
// symmetric polynomial at the two roots through this ring never touches the
// symmetric-reduction code path, so it serves as an oracle for it.
struct QuotRing {
  Rational a, b, c;
  struct Elem {
    Rational r0, r1;
  };
  Elem mul(const Elem& u, const Elem& v) const {
    Rational q = u.r1 * v.r1;
    return {u.r0 * v.r0 - q * c / a, u.r0 * v.r1 + u.r1 * v.r0 - q * b / a};
  }
  // powers of the two root images x and (e1 - x)
  std::vector<Elem> root_powers(int upto, bool second) const {
    std::vector<Elem> p = {{1, 0}};
    Elem x = second ? Elem{-b / a, -1} : Elem{0, 1};
    for (int k = 1; k <= upto; ++k) p.push_back(mul(p.back(), x));
    return p;
  }
  // sum_{i,j} G(i,j) x1^(d-i) x2^(d-j) for symmetric G; the result must land
  // in the constant part of the ring
  Rational pair_value(const Mat& g, int d) const {
    std::vector<Elem> xp = root_powers(d, false);
    std::vector<Elem> yp = root_powers(d, true);
    Elem acc{0, 0};
    for (int i = 0; i <= d; ++i)
      for (int j = 0; j <= d; ++j) {
        if (g(i, j) == 0) continue;
        Elem t = mul(xp[d - i], yp[d - j]);
        acc.r0 += g(i, j) * t.r0;
        acc.r1 += g(i, j) * t.r1;
      }
    EXPECT_EQ(acc.r1, Rational(0));
    return acc.r0;
  }
};

bool forms_equal(const BinaryForm& f, const BinaryForm& g) {
  return f.degree() == g.degree() && (f - g).is_zero();
}

}  // namespace

TEST(Helpers, NormalizePolyContentAndSign) {
  MultiPoly f(2);
  f.add_term(Mono{2, 0}, Rational(Int(6), Int(35)));
  f.add_term(Mono{0, 2}, Rational(Int(-9), Int(14)));
  MultiPoly n = normalize_poly(f);
  Int g = 0;
  for (auto& [m, c] : n.terms()) {
    EXPECT_EQ(den(c), Int(1));
    g = boost::multiprecision::gcd(g, num(c));
  }
  EXPECT_EQ(g, Int(1));
  EXPECT_TRUE((normalize_poly(f.scaled(Rational(Int(-7), Int(3)))) - n).is_zero());
  EXPECT_GT(num(n.terms().rbegin()->second), Int(0));
}

TEST(Helpers, AffineChartsInvertEachOther) {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    BinaryForm f(5);
    for (int k = 0; k <= 5; ++k) f[k] = Rational(rng.small_int(-9, 9));
    EXPECT_TRUE(forms_equal(to_binary(affine_poly(f, 3, 1), 1, 5), f));
    EXPECT_TRUE(forms_equal(to_binary_rev(affine_poly_rev(f, 3, 2), 2, 5), f));
    // the two charts read off the same coefficients in opposite order
    MultiPoly plain = affine_poly(f, 1, 0);
    MultiPoly rev = affine_poly_rev(f, 1, 0);
    BinaryForm back = to_binary(plain, 0, 5);
    BinaryForm flipped = to_binary(rev, 0, 5);
    for (int k = 0; k <= 5; ++k) EXPECT_EQ(back[k], flipped[5 - k]);
  }
}

TEST(Helpers, InterpolateRecoversPolynomial) {
  std::vector<Rational> coeff = {Rational(3), Rational(Int(-1), Int(2)),
                                 Rational(0), Rational(5)};
  std::vector<Rational> xs, ys;
  for (int i = -3; i <= 3; ++i) {
    xs.push_back(Rational(i));
    ys.push_back(eval_coeffs(coeff, Rational(i)));
  }
  std::vector<Rational> got = interpolate_coeffs(xs, ys);
  for (std::size_t i = 0; i < got.size(); ++i)
    EXPECT_EQ(got[i], i < coeff.size() ? coeff[i] : Rational(0));
}

TEST(Helpers, ClearedSubstitutionMatchesQuotientRing) {
  // f = x1^2 + x2^2 + 3 x1 x2, evaluated at the roots of 5 x^2 + 2 x - 7
  MultiPoly f(3);
  f.add_term(Mono{2, 0, 0}, 1);
  f.add_term(Mono{0, 2, 0}, 1);
  f.add_term(Mono{1, 1, 0}, 3);
  QuotRing ring{Rational(5), Rational(2), Rational(-7)};
  Mat g(3, 3);
  g(0, 2) = g(2, 0) = 1;
  g(1, 1) = 3;
  Rational want = ring.pair_value(g, 2);
  MultiPoly cleared = cleared_to(
      symmetric_reduce(f, 0, 1), 0, 1, MultiPoly::constant(3, -2),
      MultiPoly::constant(3, -7), MultiPoly::constant(3, 5), 2);
  ASSERT_EQ(cleared.total_degree(), 0);
  EXPECT_EQ(cleared.terms().begin()->second, want * 25);
}

TEST(Helpers, SpanRankCountsIndependentForms) {
  std::vector<MultiPoly> fs;
  MultiPoly a(3), b(3), c(3);
  a.add_term(Mono{2, 0, 0}, 1);
  b.add_term(Mono{0, 1, 1}, 1);
  c.add_term(Mono{2, 0, 0}, 2);
  c.add_term(Mono{0, 1, 1}, -5);
  fs = {a, b, c};
  EXPECT_EQ(span_rank(fs, 2), 2u);
}

TEST(BuildBase, ScaffoldGatesHold) {
  Json d;
  BaseGeometry base = build_base(d);
  EXPECT_EQ(base.curve.size(), 5u);
  EXPECT_EQ(base.bisecant.size(), 10u);
  EXPECT_EQ(base.relations.size(), 5u);
  EXPECT_TRUE(d["secant_on_curve"].get<bool>());
}

TEST(ChooseConic, DeterministicAndGated) {
  const PipelineState& st = seed1();
  Json d;
  BaseGeometry base = build_base(d);
  Rng rng(1);
  Json d2;
  ConicA again = choose_conic(base, rng, 32, d2);
  for (int i = 0; i < 3; ++i)
    EXPECT_TRUE(forms_equal(again.z[i], st.conic->z[i]));
  EXPECT_FALSE(conic_reject_reason(base, st.conic->z).has_value());
}

TEST(ChooseConic, BudgetExhaustionNamesStage) {
  Json d;
  BaseGeometry base = build_base(d);
  Rng rng(1);
  Json d2;
  try {
    choose_conic(base, rng, 0, d2);
    FAIL() << "expected StageFailure";
  } catch (const StageFailure& e) {
    EXPECT_EQ(e.stage, "choose_conic");
  }
}

TEST(ChooseConic, RejectReasonsMatchDefects) {
  Json d;
  BaseGeometry base = build_base(d);
  auto form = [](Rational c0, Rational c1, Rational c2) {
    BinaryForm f(2);
    f[0] = c0;
    f[1] = c1;
    f[2] = c2;
    return f;
  };
  // all three share the root (0:1)
  std::vector<BinaryForm> shared = {form(1, 1, 0), form(2, -1, 0),
                                    form(0, 1, 0)};
  EXPECT_EQ(conic_reject_reason(base, shared).value(),
            "components share a factor");
  // (T^2, W^2, T^2 + W^2) satisfies a linear relation
  std::vector<BinaryForm> line = {form(1, 0, 0), form(0, 0, 1),
                                  form(1, 0, 1)};
  EXPECT_EQ(conic_reject_reason(base, line).value(), "image spans a line");
  // zb^2 - 4 za zc = s^3 (s + 4t): smooth image, repeated tangency root
  std::vector<BinaryForm> tangent = {form(1, 0, 0), form(1, 2, 0),
                                     form(0, 0, 1)};
  EXPECT_EQ(conic_reject_reason(base, tangent).value(),
            "tangency divisor not reduced");
}

TEST(SplittingType, BalancedOnPipelineFamily) {
  const PipelineState& st = seed1();
  EXPECT_EQ(st.split->split, std::make_pair(3, 3));
  EXPECT_EQ(st.split->coefficient_rank, 3u);
  EXPECT_EQ(st.split->h0, 8u);
}

TEST(SplittingType, DetectsUnevenCounterexample) {
  // za = T^2, zb = W^2, zc = T^2 + W^2: coefficient rank two
  BinaryForm za(2), zb(2), zc(2);
  za[0] = 1;
  zb[2] = 1;
  zc[0] = 1;
  zc[2] = 1;
  Json d;
  SplittingType sp = splitting_type({za, zb, zc}, d);
  EXPECT_EQ(sp.split, std::make_pair(2, 4));
  EXPECT_EQ(sp.h0, 8u);
}

TEST(ConicToQuadric, PolarVanishesAtDivisorRoots) {
  const PipelineState& st = seed1();
  const std::vector<BinaryForm>& z = st.conic->z;
  int checked = 0;
  for (int x = -8; x <= 8 && checked < 12; ++x) {
    Rational a = z[0].eval(1, Rational(x));
    Rational b = z[1].eval(1, Rational(x));
    Rational c = z[2].eval(1, Rational(x));
    if (a == 0 || b * b - 4 * a * c == 0) continue;
    QuotRing ring{a, b, c};
    EXPECT_EQ(ring.pair_value(st.quadric->gram, 4), Rational(0));
    ++checked;
  }
  EXPECT_GE(checked, 12);
}

TEST(ConicToQuadric, UniqueNondegenerateSolution) {
  const PipelineState& st = seed1();
  EXPECT_EQ(st.quadric->solution_dim, 1u);
  EXPECT_NE(st.quadric->gram_det, Rational(0));
  Json d;
  BaseGeometry base = build_base(d);
  EXPECT_TRUE(compose_binary(st.quadric->q, base.curve).is_zero());
}

TEST(BuildSextic, MatchesChordPointEvaluator) {
  const PipelineState& st = seed1();
  const std::vector<BinaryForm>& z = st.conic->z;
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Rational s(rng.small_int(-9, 9)), t(rng.small_int(1, 9));
    std::vector<Rational> direct =
        eval_bisecant(z[0].eval(s, t), z[1].eval(s, t), z[2].eval(s, t));
    for (int k = 0; k < 10; ++k)
      EXPECT_EQ(st.sextic->comps[k].eval(s, t), direct[k]);
  }
}

TEST(BuildSextic, SpanAndAnnihilator) {
  const PipelineState& st = seed1();
  EXPECT_EQ(rank(st.sextic->coeff), 7u);
  for (int i = 0; i < 3; ++i) {
    BinaryForm acc(6);
    for (int k = 0; k < 10; ++k)
      acc = acc + st.sextic->comps[k].scaled(st.sextic->net(i, k));
    EXPECT_TRUE(acc.is_zero());
  }
}

TEST(Threefold, HilbertStaircase) {
  const PipelineState& st = seed1();
  std::array<std::size_t, 7> want = {7, 23, 54, 105, 181, 287, 428};
  EXPECT_EQ(st.threefold->hf, want);
  // exact elimination over Q corroborates the prime-field certification
  EXPECT_EQ(hilbert_value(st.threefold->quadrics, 5), 181u);
}

TEST(Threefold, FitMatchesStaircase) {
  const PipelineState& st = seed1();
  const HilbertFit& fit = st.threefold->fit;
  EXPECT_EQ(fit.dimension, 3);
  EXPECT_EQ(fit.degree, Int(5));
  for (unsigned d = 3; d <= 7; ++d) {
    Rational v = 0;
    for (std::size_t i = fit.coeff.size(); i-- > 0;)
      v = v * Rational(d) + fit.coeff[i];
    EXPECT_EQ(v, Rational((long long)st.threefold->hf[d - 1]));
  }
}

TEST(Threefold, NetSmoothAndSampled) {
  const PipelineState& st = seed1();
  EXPECT_TRUE(st.threefold->net.smooth);
  EXPECT_GE(st.threefold->jacobian_checks, 20u);
  EXPECT_GE(st.threefold->point_count, 450u);
}

TEST(Scroll, GradientCollapsesOnCurve) {
  const PipelineState& st = seed1();
  EXPECT_EQ(st.scroll->generic_rank, 1u);
}

TEST(FakeK3, TangencyQuadricContainsImage) {
  const PipelineState& st = seed1();
  EXPECT_TRUE(compose_binary(st.fake->w_ambient, st.sextic->comps).is_zero());
  Json d;
  BaseGeometry base = build_base(d);
  std::vector<MultiPoly> six = base.relations;
  six.push_back(st.fake->w_ambient);
  EXPECT_EQ(span_rank(six, 2), 6u);
  EXPECT_EQ(st.fake->conormal_rank, 3u);
}

TEST(FakeK3, RestrictedSectionFailsSurfaceGates) {
  const PipelineState& st = seed1();
  SurfaceGateResult r =
      surface_gates(st.threefold->quadrics, st.fake->w_restricted);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.reason, "section singular along the double curve");
}

TEST(NikulinSystem, ComplementBasis) {
  const PipelineState& st = seed1();
  EXPECT_EQ(st.system->through.size(), 15u);
  EXPECT_EQ(st.system->system.size(), 10u);
  EXPECT_EQ(span_rank(st.system->system, 2), 10u);
  std::vector<MultiPoly> stack = st.system->system;
  for (auto& q : st.threefold->quadrics) stack.push_back(q);
  EXPECT_EQ(span_rank(stack, 2), 15u);
  std::vector<BinaryForm> rnc6 = rnc_param(6);
  for (auto& q : st.system->system)
    EXPECT_TRUE(compose_binary(q, rnc6).is_zero());
}

TEST(PickSurface, GateRejectsKnownDefects) {
  const PipelineState& st = seed1();
  SurfaceGateResult ideal =
      surface_gates(st.threefold->quadrics, st.threefold->quadrics[0]);
  EXPECT_EQ(ideal.reason, "section lies in the threefold ideal");
  MultiPoly off(7);
  off.add_term(Mono{2, 0, 0, 0, 0, 0, 0}, 1);
  SurfaceGateResult misses = surface_gates(st.threefold->quadrics, off);
  EXPECT_EQ(misses.reason, "section misses the double curve");
}

TEST(PickSurface, ChosenSectionClean) {
  const PipelineState& st = seed1();
  SurfaceGateResult r = surface_gates(st.threefold->quadrics, st.surface->g);
  EXPECT_TRUE(r.ok);
  EXPECT_EQ(r.curve_rank, 4u);
  ASSERT_EQ(st.surface->scans.size(), 2u);
  for (auto& sc : st.surface->scans) EXPECT_EQ(sc.singular, 0u);
}

TEST(EightLines, CenterFormDivisionExact) {
  const PipelineState& st = seed1();
  const EightLines& el = *st.lines;
  EXPECT_EQ(el.beta.degree(), 8);
  EXPECT_EQ(el.delta.degree(), 4);
  EXPECT_TRUE(forms_equal(el.delta * el.beta, el.gamma));
  EXPECT_NE(el.beta_disc, Rational(0));
  EXPECT_EQ(bf_gcd(el.beta, el.delta).degree(), 0);
}

TEST(EightLines, GammaMatchesQuotientRingOracle) {
  const PipelineState& st = seed1();
  const EightLines& el = *st.lines;
  ASSERT_EQ(el.shift_curve, 0);
  ASSERT_EQ(el.shift_family, 0);
  const std::vector<BinaryForm>& z = st.conic->z;
  BinaryForm A2(2), A1(2), A0(2);
  for (int k = 0; k <= 2; ++k) {
    A2[k] = z[k][0];
    A1[k] = z[k][1];
    A0[k] = z[k][2];
  }
  Mat g = gram_of(st.surface->g, 7);
  int checked = 0;
  for (int s = -9; s <= 9 && checked < 15; ++s) {
    Rational a = A2.eval(Rational(s), 1);
    Rational b = A1.eval(Rational(s), 1);
    Rational c = A0.eval(Rational(s), 1);
    if (a == 0 || b * b - 4 * a * c == 0) continue;
    QuotRing ring{a, b, c};
    Rational lhs = el.gamma.eval(Rational(s), 1);
    Rational scale = 1;
    for (int i = 0; i < 6; ++i) scale *= a;
    EXPECT_EQ(lhs, ring.pair_value(g, 6) * scale);
    ++checked;
  }
  EXPECT_GE(checked, 15);
}

TEST(EightLines, CenterCountMatchesNodalClasses) {
  const PipelineState& st = seed1();
  EXPECT_EQ(st.lines->beta.degree(), 8);
  NikulinLattice lat;
  LatticeSearch nodes = enumerate_classes(-2, 1);
  std::size_t meeting = 0;
  for (auto& v : nodes.classes)
    if (lat.pair(NikulinLattice::cls_A(), v) == 2) ++meeting;
  EXPECT_EQ(meeting, 8u);
}

TEST(RunFull, CertificateShape) {
  const PipelineState& st = seed1();
  EXPECT_TRUE(st.cert.verdict);
  EXPECT_EQ(st.cert.seed, 1u);
  EXPECT_EQ(st.cert.moduli_dimension, 11);
  ASSERT_EQ(st.cert.stages.size(), 12u);
  const char* names[] = {"build_base",      "choose_conic",  "splitting_type",
                         "conic_to_quadric", "build_sextic",  "build_threefold",
                         "build_scroll",    "build_fake_k3", "nikulin_system",
                         "pick_surface",    "eight_lines",   "certify"};
  for (std::size_t i = 0; i < 12; ++i) {
    EXPECT_EQ(st.cert.stages[i].name, names[i]);
    EXPECT_TRUE(st.cert.stages[i].verdict) << names[i];
    EXPECT_FALSE(st.cert.stages[i].inputs_digest.empty());
  }
  std::string bytes = st.cert.serialize();
  EXPECT_EQ(bytes.back(), '\n');
  Json parsed = Json::parse(bytes);
  EXPECT_EQ(parsed["version"], kVersion);
  EXPECT_EQ(parsed["lattice"]["pairings"]["L.L"], 14);
  EXPECT_EQ(parsed["moduli_dimension"], 11);
}

TEST(Reproduce, RejectsTamperedCertificate) {
  const PipelineState& st = seed1();
  std::string bytes = st.cert.serialize();
  std::string::size_type at = bytes.find("\"moduli_dimension\": 11");
  ASSERT_NE(at, std::string::npos);
  std::string tampered = bytes;
  tampered.replace(at, 22, "\"moduli_dimension\": 12");
  ReproduceResult r = reproduce_certificate(tampered);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.message, "recomputation differs");
}

TEST(Reproduce, RejectsWrongVersionFast) {
  ReproduceResult bad = reproduce_certificate("{\"version\": \"9.9.9\"}");
  EXPECT_FALSE(bad.ok);
  EXPECT_EQ(bad.message, "version mismatch");
  ReproduceResult junk = reproduce_certificate("not json");
  EXPECT_FALSE(junk.ok);
}
