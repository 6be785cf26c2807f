#include "rdiff/rng.hpp"
#include "rdiff/translation.hpp"

#include <gtest/gtest.h>

using namespace rdiff;

namespace {

Scalar q(long a, unsigned long b) { return make_scalar(a, b); }

Configuration demo() { return build_config(relaxed_demo_pair(), q(1, 128), q(1, 20), q(1, 10)); }

}  // namespace

TEST(Translation, WrapSplit) {
  RectUnion u = RectUnion::of({Rect{0, q(1, 2), 0, q(1, 2)}});
  RectUnion t = torus_translate(u, {q(3, 4), 0});
  EXPECT_EQ(t, RectUnion::of({Rect{q(3, 4), 1, 0, q(1, 2)}, Rect{0, q(1, 4), 0, q(1, 2)}}));
  EXPECT_EQ(area_union(t), q(1, 4));
  EXPECT_EQ(torus_translate(u, {0, 0}), u);
}

TEST(Translation, AreaPreserved) {
  for (std::uint64_t s = 0; s < 1000; ++s) {
    auto rng = make_rng(5, s);
    std::vector<Rect> rs;
    for (int i = 0; i < 3; ++i) {
      Scalar x0 = random_unit(rng), y0 = random_unit(rng);
      Scalar x1 = random_between(x0, 1, rng), y1 = random_between(y0, 1, rng);
      if (x0 < x1 && y0 < y1) rs.push_back(Rect{x0, x1, y0, y1});
    }
    RectUnion u = RectUnion::of(rs);
    TranslationVector w{random_unit(rng), random_unit(rng)};
    ASSERT_EQ(area_union(torus_translate(u, w)), area_union(u));
  }
}

TEST(Translation, CoverageBound) {
  EXPECT_EQ(coverage_lower_bound(q(1, 3), q(1, 10), q(1, 20), 0), 0);
  EXPECT_EQ(coverage_lower_bound(q(1, 3), 0, 0, 5), 1 - pow_of(q(2, 3), 5));
  Scalar v = coverage_lower_bound(q(1, 100), q(1, 10), q(1, 20), 100);
  EXPECT_EQ(v, pow_of(q(999, 1000), 100) - pow_of(1 - q(105, 10000), 100));
  EXPECT_NEAR(to_double(v), 0.9048 - 0.3480, 2e-3);
  EXPECT_THROW(coverage_lower_bound(q(3, 2), 0, 0, 1), std::domain_error);
  EXPECT_THROW(coverage_lower_bound(q(1, 2), 2, 0, 1), std::domain_error);
}

TEST(Translation, ChiThreshold) {
  Scalar c = chi_threshold(q(1, 20));
  const double truth = 0.99 * (std::pow(2 * std::exp(1.0), -0.05) - std::exp(-1.0));
  EXPECT_LE(to_double(c), truth + 1e-15);
  EXPECT_NEAR(to_double(c), truth, 1e-12);
  // 60-digit reference value, truncated and rounded up
  EXPECT_LE(c, parse_scalar("0.545438140925110193985987662888796396"));
  EXPECT_GE(c, parse_scalar("0.545438140925110193985987662888796395") - pow2(-63));
  EXPECT_GT(chi_threshold(q(1, 1000)), chi_threshold(q(1, 20)));
  EXPECT_GT(chi_threshold(q(1, 20)), chi_threshold(q(1, 2)));
  EXPECT_LT(to_double(chi_threshold(pow2(-40))), 0.99 * (1 - std::exp(-1.0)));
  EXPECT_LE(chi_threshold(1), 0);
  EXPECT_THROW(chi_threshold(0), std::domain_error);
}

TEST(Translation, SingleTranslateEqualsArea) {
  RectUnion F = RectUnion::of({Rect{0, q(1, 2), 0, q(1, 64)}});
  CoverageStats s = mc_coverage(F, RectUnion(), 1, 200, 3);
  for (const auto& v : s.exact_samples) ASSERT_EQ(v, q(1, 128));
  EXPECT_EQ(s.exact_mean, q(1, 128));
  EXPECT_TRUE(s.pass);
}

TEST(Translation, SingleTranslateWithCover) {
  RectUnion F = RectUnion::of({Rect{0, q(1, 4), 0, q(1, 4)}});
  RectUnion D = RectUnion::of({Rect{0, q(1, 16), 0, q(1, 4)}});
  CoverageStats s = mc_coverage(F, D, 1, 50, 3);
  for (const auto& v : s.exact_samples) ASSERT_GE(v, (1 - s.eps) * q(1, 16));
  EXPECT_EQ(s.c0, q(1, 4));
}

TEST(Translation, DemoCoverageMeetsClosedForm) {
  Configuration cfg = demo();
  TranslationKernel k = make_kernel(cfg);
  EXPECT_EQ(k.N, 128u);
  CoverageStats s = mc_coverage(k.F, k.D_hat, k.N, 500, 9);
  EXPECT_EQ(s.closed_form_lower, 1 - pow_of(q(127, 128), 128));
  EXPECT_TRUE(s.pass);
  for (const auto& v : s.exact_samples) ASSERT_LE(v, q(1, 1));
}

TEST(Translation, BudgetForGeneratedConfig) {
  auto pair = generate_pair(2, q(1, 10), q(1, 10), q(1, 2));
  Configuration cfg = build_config(pair, default_tau(pair.b), q(1, 10), q(1, 10));
  EXPECT_GT(translate_count(cfg), mpz_class(1) << 40);
  EXPECT_THROW(make_kernel(cfg), std::length_error);
}

TEST(Translation, FindOmegaZeroTarget) {
  TranslationKernel k = make_kernel(demo());
  OmegaSearch s = find_omega(k, 0, 1, 4);
  EXPECT_EQ(s.draws, 1u);
  EXPECT_TRUE(omega_admissible(k, s.omega));
  for (std::size_t i = 0; i < s.omega.N(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      for (const auto& b : k.heights) {
        ASSERT_NE(abs_of(s.omega.omegas[i].dx - s.omega.omegas[j].dx), b);
        ASSERT_NE(abs_of(s.omega.omegas[i].dy - s.omega.omegas[j].dy), b);
      }
  EXPECT_EQ(s.q_area, q0_area(k, s.omega));
}

TEST(Translation, FindOmegaReachesChi) {
  TranslationKernel k = make_kernel(demo());
  Scalar chi = chi_threshold(q(1, 20));
  OmegaSearch s = find_omega(k, chi, 200, 1);
  EXPECT_GE(s.q_area, chi);
  EXPECT_THROW(find_omega(k, 1, 3, 1), std::runtime_error);
}

TEST(Translation, AdmissibilityRejectsCollisions) {
  TranslationKernel k = make_kernel(demo());
  k.N = 2;
  OmegaTuple o{{{q(1, 8), q(1, 3)}, {q(1, 8) + k.heights[1], q(1, 5)}}};
  EXPECT_FALSE(omega_admissible(k, o));
  OmegaTuple gap{{{q(1, 8), q(1, 3)}, {q(1, 8) + k.tau, q(1, 5)}}};
  EXPECT_FALSE(omega_admissible(k, gap));
  OmegaTuple ok{{{q(1, 8), q(1, 3)}, {q(1, 7), q(1, 5)}}};
  EXPECT_TRUE(omega_admissible(k, ok));
}

TEST(Translation, AssembleIdentityAndAdditivity) {
  Configuration cfg = demo();
  TranslationKernel k = make_kernel(cfg);
  Assembly one = assemble_h0(k, OmegaTuple{{{0, 0}}});
  EXPECT_EQ(one.h0.terms().size(), k.h.terms().size());
  EXPECT_EQ(one.h0.l1_norm(), k.h.l1_norm());
  EXPECT_EQ(one.Q0, subtract(k.F, k.D_hat));
  Assembly two = assemble_h0(k, OmegaTuple{{{0, 0}, {q(1, 2), q(1, 2)}}});
  EXPECT_EQ(two.h0.l1_norm(), 2 * k.h.l1_norm());
}

TEST(Translation, DemoAssemblyReport) {
  Configuration cfg = demo();
  TranslationKernel k = make_kernel(cfg);
  OmegaSearch s = find_omega(k, chi_threshold(q(1, 20)), 200, 1);
  Assembly a = assemble_h0(k, s.omega);
  EXPECT_LE(a.h0.l1_norm(), (1 / cfg.area_F + 1) * cfg.n() * cfg.block_area(cfg.n()));
  EXPECT_EQ(a.h0.total(), Scalar(static_cast<long>(k.N)) * k.h.total());
  LemmaReport r = verify_random_translation(k, a, 20, 50, 2);
  EXPECT_TRUE(r.find("i.max_abs_avg")->pass);
  EXPECT_TRUE(r.find("iii.max_abs_avg")->pass);
  EXPECT_TRUE(r.find("omega.admissible")->pass);
  // order-1 blocks have area exactly eta = |B_1|
  EXPECT_FALSE(r.find("ii.witness_ge_n_area_gt_eta")->pass);
}
