#include "rdiff/construction.hpp"
#include "rdiff/rng.hpp"

#include <gtest/gtest.h>

using namespace rdiff;

namespace {

Scalar q(long p, unsigned long d) { return make_scalar(p, d); }

Configuration demo() { return build_config(relaxed_demo_pair(), q(1, 128), q(1, 20), q(1, 10)); }

// n = 3 with q = (2, 4), small enough to materialize everything.
SidePair small_three(std::vector<Scalar> C) {
  SidePair p;
  p.mode = PairMode::RelaxedDemo;
  p.b.n = 3;
  p.b.lambda = q(1, 2);
  p.b.b = {q(1, 2), q(1, 4), q(1, 8), q(1, 64), q(1, 512), q(1, 2048)};
  p.C = SideSetSchema(std::move(C), 0);
  p.D = SideSetSchema(p.b.b, 0);
  return p;
}

ThetaIndex theta(std::vector<long> top_down) {
  ThetaIndex t;
  t.theta.assign(top_down.size() + 1, 0);
  for (std::size_t i = 0; i < top_down.size(); ++i) t.theta[top_down.size() - i] = top_down[i];
  t.order = theta_order(t.theta);
  return t;
}

}  // namespace

TEST(Theta, Enumeration) {
  auto two = enumerate_theta({0, 2});
  ASSERT_EQ(two.size(), 3u);
  std::vector<std::string> names;
  std::vector<int> orders;
  for (const auto& t : two) {
    names.push_back(t.to_string());
    orders.push_back(t.order);
  }
  EXPECT_EQ(names, (std::vector<std::string>{"(0)", "(1)", "(2)"}));
  EXPECT_EQ(orders, (std::vector<int>{2, 1, 1}));

  // theta[1] = q_1 = 3, theta[2] = q_2 = 2
  auto three = enumerate_theta({0, 3, 2});
  ASSERT_EQ(three.size(), 9u);
  int by_order[4] = {0, 0, 0, 0};
  for (const auto& t : three) ++by_order[t.order];
  EXPECT_EQ(by_order[3], 1);
  EXPECT_EQ(by_order[2], 2);
  EXPECT_EQ(by_order[1], 6);
  EXPECT_EQ(theta_count({0, 3, 2}), 9);
  EXPECT_EQ(enumerate_theta({0, 1, 1}).size(), 3u);
  EXPECT_THROW(enumerate_theta({0}), std::invalid_argument);
  EXPECT_THROW(theta_order({0, 1, 0}), std::invalid_argument);
}

TEST(Construction, DemoRectangles) {
  auto c = demo();
  EXPECT_EQ(rect_of_theta(c, theta({1})), (Rect{0, q(1, 2), 0, q(1, 128)}));
  EXPECT_EQ(rect_of_theta(c, theta({2})), (Rect{0, q(1, 2), q(1, 128), q(2, 128)}));
  EXPECT_EQ(rect_of_theta(c, theta({0})), (Rect{0, q(1, 4), 0, q(1, 32)}));
}

TEST(Construction, DemoFunctionAndAreas) {
  auto c = demo();
  auto h = explicit_h(c);
  ASSERT_EQ(h.size(), 2u);
  EXPECT_EQ(h.value_at({q(1, 256), q(1, 256)}), 128);
  EXPECT_EQ(h.value_at({q(1, 256), q(3, 256)}), -128);
  EXPECT_EQ(value_h(c, {q(1, 256), q(3, 256)}), -128);
  EXPECT_EQ(c.area_E, q(3, 256));
  EXPECT_EQ(c.area_F, q(1, 128));
  EXPECT_EQ(area_union(explicit_E(c)), q(3, 256));
  EXPECT_EQ(l1_norm_h(c), q(1, 64));
  EXPECT_EQ(c.K_E, q(3, 2));
  EXPECT_EQ(c.K_F, 3);
  EXPECT_EQ(c.eta, q(1, 256));
  EXPECT_TRUE(c.d_hat.empty());
  EXPECT_EQ(c.area_d_hat, 0);
  EXPECT_THROW(build_config(relaxed_demo_pair(), q(1, 64), q(1, 20), q(1, 10)), std::invalid_argument);
  try {
    build_config(relaxed_demo_pair(), q(1, 64), q(1, 20), q(1, 10));
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "support square overflows B(theta)");
  }
}

TEST(Construction, DemoAreaSandwich) {
  auto r = verify_area_sandwich(demo());
  EXPECT_TRUE(r.pass());
  EXPECT_EQ(r.find("areaE.lower")->lhs, q(2, 3));
  EXPECT_EQ(r.find("areaE.lower")->rhs, q(3, 4));
  EXPECT_EQ(r.find("areaF.lower")->lhs, q(1, 3));
  EXPECT_EQ(r.find("areaF.lower")->rhs, 1);
  EXPECT_FALSE(r.extra["ratio_hypothesis_strict"].get<bool>());
}

TEST(Construction, DemoAverages) {
  auto c = demo();
  EXPECT_EQ(average_h(c, rect_of_theta(c, theta({1}))), 2);
  EXPECT_EQ(average_h(c, rect_of_theta(c, theta({2}))), -2);
  EXPECT_EQ(average_h(c, rect_of_theta(c, theta({0}))), 0);
  EXPECT_EQ(integral_abs_h(c, rect_of_theta(c, theta({0}))) / rect_of_theta(c, theta({0})).area(), 2);
  auto r = verify_average_lemma(c);
  EXPECT_TRUE(r.pass());
  EXPECT_TRUE(r.extra["exhaustive"].get<bool>());
  EXPECT_EQ(r.extra["equal_to_n"].get<int>(), 2);
  EXPECT_TRUE(verify_norms(c).pass());
  auto ex = verify_exceptional_and_large(c);
  EXPECT_TRUE(ex.pass());
  EXPECT_EQ(ex.find("large.extremal_value")->lhs, q(1, 4));
}

TEST(Construction, StructuredIntegralMatchesExplicit) {
  auto c = build_config(small_three({q(3, 4), q(1, 16)}), q(1, 4096), q(1, 20), q(1, 10));
  ASSERT_EQ(c.q[1], 2);
  ASSERT_EQ(c.q[2], 4);
  auto h = explicit_h(c);
  EXPECT_EQ(h.size(), 8u);
  EXPECT_EQ(h.l1_norm(), l1_norm_h(c));
  EXPECT_EQ(h.total(), total_integral_h(c));
  for (std::uint64_t i = 0; i < 400; ++i) {
    auto rng = make_rng(11, i);
    // mix coarse and fine scales so partial copies at every level show up
    Scalar scale = pow2(-static_cast<long>(rng() % 12));
    Scalar y0 = random_between(0, 1, rng) * scale, x0 = random_between(0, q(1, 2048), rng);
    Scalar y1 = y0 + random_between(0, 1, rng) * scale, x1 = x0 + random_between(0, q(1, 1024), rng);
    Rect r{x0, x1, y0, min_of(y1, Scalar(1))};
    EXPECT_EQ(integral_h(c, r), integral(h, r)) << i;
    PointZ z{random_between(0, q(1, 2048), rng), random_between(0, q(1, 8), rng)};
    EXPECT_EQ(value_h(c, z), h.value_at(z)) << i;
  }
  EXPECT_TRUE(verify_area_sandwich(c).pass());
  EXPECT_TRUE(verify_average_lemma(c).pass());
  EXPECT_TRUE(verify_norms(c).pass());
}

TEST(Construction, AreaFormulasAndBlockSum) {
  auto c = build_config(small_three({q(3, 4)}), q(1, 4096), q(1, 20), q(1, 10));
  EXPECT_EQ(area_union(explicit_E(c)), c.area_E);
  EXPECT_EQ(area_union(explicit_F(c)), c.area_F);
  // order-2 blocks overlap their order-1 children
  auto r = verify_area_sandwich(c);
  EXPECT_FALSE(r.extra["block_area_sum_equals_F"].get<bool>());
  auto d = demo();
  EXPECT_TRUE(verify_area_sandwich(d).extra["block_area_sum_equals_F"].get<bool>());
}

namespace {

// Raster oracle for the exceptional cover: marks every grid cell inside some
// C-rectangle A of a bad class that meets supp h, with A on grid positions.
Scalar raster_d_hat(const Configuration& c, const std::vector<Scalar>& Cs, long grid) {
  const int n = c.n();
  auto b = [&](int k) { return c.b.at(k); };
  auto good = [&](const Scalar& x, const Scalar& y) {
    if (x <= b(n + 1)) return false;
    if (x <= b(n)) return y > b(n + 1);
    if (x > b(1)) return y > b(2 * n);
    for (int r = 1; r < n; ++r)
      if (b(r + 1) < x && x <= b(r)) return y > b(2 * n - r);
    return false;
  };
  // 2-D difference array; a cell is covered when its prefix sum is positive
  const long w = grid + 1;
  std::vector<int> diff(static_cast<std::size_t>(w * w), 0);
  auto bump = [&](long i, long j, int v) { diff[static_cast<std::size_t>(i * w + j)] += v; };
  const Scalar g(1, grid);
  auto cells = [&](const Scalar& v) { return floor_of(v * grid).get_si(); };
  auto h = explicit_h(c);
  for (const auto& x : Cs)
    for (const auto& y : Cs) {
      if (good(x, y)) continue;
      for (const auto& term : h.terms()) {
        const Rect& s = term.rect;
        for (long tx = 0; Scalar(tx) * g <= min_of(s.x1, 1 - x); ++tx)
          for (long ty = std::max(0L, cells(s.y0 - y)); Scalar(ty) * g <= min_of(s.y1, 1 - y); ++ty) {
            if (Scalar(ty) * g + y < s.y0) continue;
            const long i1 = tx + cells(x), j1 = ty + cells(y);
            bump(tx, ty, 1);
            bump(i1, ty, -1);
            bump(tx, j1, -1);
            bump(i1, j1, 1);
          }
      }
    }
  long marked = 0;
  for (long i = 0; i < w; ++i)
    for (long j = 0; j < w; ++j) {
      long v = diff[static_cast<std::size_t>(i * w + j)];
      if (i > 0) v += diff[static_cast<std::size_t>((i - 1) * w + j)];
      if (j > 0) v += diff[static_cast<std::size_t>(i * w + j - 1)];
      if (i > 0 && j > 0) v -= diff[static_cast<std::size_t>((i - 1) * w + j - 1)];
      diff[static_cast<std::size_t>(i * w + j)] = static_cast<int>(v);
      if (i < grid && j < grid && v > 0) ++marked;
    }
  return Scalar(marked) * g * g;
}

}  // namespace

TEST(ExceptionalCover, MatchesRasterOracle) {
  // every case of the classification appears: 3/4 (case 3), 1/8 (case 4),
  // 1/64 and 1/256 (case 1), 3/8 (case 2)
  std::vector<Scalar> Cs{q(3, 4), q(3, 8), q(1, 8), q(1, 64), q(1, 256)};
  SidePair p = relaxed_demo_pair();
  p.C = SideSetSchema(Cs, 0);
  auto c = build_config(p, q(1, 128), q(1, 20), q(1, 10));
  Scalar oracle = raster_d_hat(c, Cs, 512);
  EXPECT_GT(oracle, 0);
  EXPECT_EQ(c.area_d_hat, oracle);
  EXPECT_EQ(area_union(explicit_d_hat(c)), oracle);
  for (std::uint64_t i = 0; i < 300; ++i) {
    auto rng = make_rng(5, i);
    PointZ z{random_between(0, 1, rng), random_between(0, q(1, 8), rng)};
    EXPECT_EQ(in_d_hat(c, z), explicit_d_hat(c).contains(z)) << to_string(z.x) << "," << to_string(z.y);
  }
}

TEST(ExceptionalCover, SmallThreeMatchesRasterOracle) {
  std::vector<Scalar> Cs{q(3, 4), q(3, 16), q(3, 32), q(1, 128), q(1, 1024)};
  auto c = build_config(small_three(Cs), q(1, 4096), q(1, 20), q(1, 10));
  EXPECT_EQ(c.area_d_hat, area_union(explicit_d_hat(c)));
  EXPECT_EQ(c.area_d_hat, raster_d_hat(c, Cs, 4096));
}

TEST(Generated, AllLemmaReportsPass) {
  for (int n : {2, 3})
    for (auto eps : {q(1, 10), q(1, 20)}) {
      auto p = generate_pair(n, eps, q(1, 10), q(1, 2));
      auto c = build_config(p, default_tau(p.b), eps, q(1, 10));
      EXPECT_TRUE(verify_area_sandwich(c).pass());
      EXPECT_TRUE(verify_average_lemma(c).pass());
      EXPECT_TRUE(verify_norms(c).pass());
      auto ex = verify_exceptional_and_large(c);
      EXPECT_TRUE(ex.pass()) << ex.first_failure()->name;
      EXPECT_TRUE(verify_case_bounds(c, 300, 3).pass());
      EXPECT_TRUE(verify_large_rectangles(c, 300, 3).pass());
    }
}

TEST(Generated, InflatedBlockRespectsMajorant) {
  auto p = generate_pair(3, q(1, 20), q(1, 10), q(1, 2));
  auto c = build_config(p, default_tau(p.b), q(1, 20), q(1, 10));
  const int n = 3;
  for (int r = 1; r < n; ++r) {
    ThetaIndex t;
    t.theta.assign(n, 0);
    for (int j = r + 1; j < n; ++j) t.theta[j] = 1;
    t.order = theta_order(t.theta);
    ASSERT_EQ(t.order, r + 1);
    Rect B = rect_of_theta(c, t);
    Scalar x = gap(c.C, c.b.at(r + 1)).x_under, y = gap(c.C, c.b.at(2 * n - r)).x_under;
    Rect A{B.x0, B.x0 + x, B.y0, B.y0 + y};
    Scalar avg = abs_of(average_h(c, A));
    mpz_class pc = floor_of(y / c.b.at(2 * n - r));
    ASSERT_GE(pc, 1);
    Scalar prod = 1;
    for (int j = r + 1; j < n; ++j) prod *= 1 + Scalar(1) / Scalar(c.q[j]);
    Scalar majorant = n * Scalar(pc + 2) / Scalar(pc) * c.b.at(r + 1) / x * prod;
    EXPECT_LE(avg, majorant);
    EXPECT_LE(avg, 1);
  }
}

TEST(Generated, CaseFourSpanningTwoBlocks) {
  auto p = generate_pair(2, q(1, 20), q(1, 10), q(1, 2));
  auto c = build_config(p, default_tau(p.b), q(1, 20), q(1, 10));
  const int n = 2;
  // x in (b_3, b_2], y > b_3, straddling the boundary between the two order-1 blocks
  Scalar x = gap(c.C, c.b.at(n + 1)).x_under;
  ASSERT_LE(x, c.b.at(n));
  Scalar y = gap(c.C, c.b.at(n + 1)).x_under;
  Scalar mid = c.step(1);
  Rect A{0, x, mid - y / 2, mid + y / 2};
  Scalar avg = abs_of(average_h(c, A));
  Scalar bound = 4 * n * c.b.at(n + 2) / (c.b.at(n + 1) * c.b.at(n + 1));
  EXPECT_LE(avg, 4 * n * c.b.at(n + 2) / A.area());
  EXPECT_LE(avg, bound);
  EXPECT_LT(bound, 1);
}

TEST(Lattice, QueriesMatchMaterialized) {
  LatticeSet s(q(1, 16), q(1, 32));
  s.replicate(3, q(1, 8), false);
  s.replicate(2, q(1, 2), false);
  auto iv = s.intervals();
  ASSERT_EQ(iv.size(), 6u);
  EXPECT_EQ(s.measure(), q(6, 32));
  for (std::uint64_t i = 0; i < 500; ++i) {
    auto rng = make_rng(9, i);
    Scalar a = random_between(-q(1, 8), 1, rng), b = a + random_between(0, q(1, 2), rng);
    Scalar plain = 0, alt = 0;
    for (std::size_t k = 0; k < iv.size(); ++k) {
      Scalar len = max_of(Scalar(0), min_of(b, iv[k].second) - max_of(a, iv[k].first));
      plain += len;
      alt += k < 3 ? len : Scalar(-len);
    }
    EXPECT_EQ(s.measure_within(a, b), plain);
    EXPECT_EQ(s.signed_measure_within(a, b), alt);
    Scalar y = random_between(0, 1, rng);
    bool in = false;
    for (const auto& [lo, hi] : iv) in = in || (lo <= y && y <= hi);
    EXPECT_EQ(s.contains(y), in);
  }
  LatticeSet m(0, q(1, 4));
  m.replicate(4, q(1, 8));
  EXPECT_EQ(m.levels(), 0u);
  EXPECT_EQ(m.extent(), q(5, 8));
  LatticeSet bad(0, q(1, 16));
  bad.replicate(2, q(1, 8));
  EXPECT_THROW(bad.replicate(2, q(1, 8)), std::runtime_error);
}
