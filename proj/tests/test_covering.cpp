#include "rdiff/covering.hpp"

#include <gtest/gtest.h>

using namespace rdiff;

namespace {

Scalar q(long a, unsigned long b) { return make_scalar(a, b); }

// Every cell of the 1/400 grid inside B lies in some A_q.
bool grid_covered(const Rect& B, const std::vector<Rect>& cover) {
  const Scalar h = q(1, 400);
  for (Scalar u = B.x0; u < B.x1; u += h)
    for (Scalar v = B.y0; v < B.y1; v += h) {
      Rect cell{u, u + h, v, v + h};
      bool in = false;
      for (const auto& A : cover) in = in || A.contains(cell);
      if (!in) return false;
    }
  return true;
}

}  // namespace

TEST(Covering, SingleRectangleCase) {
  Rect B{q(1, 5), q(3, 10), q(1, 5), q(3, 10)};
  CoverInstance inst = choose_instance(B, {q(1, 5)}, q(1, 3));
  EXPECT_EQ(inst.tag_a, "2a");
  EXPECT_EQ(inst.tag_b, "2b");
  auto cover = cover_rect(inst);
  ASSERT_EQ(cover.size(), 1u);
  EXPECT_EQ(cover[0], (Rect{q(1, 5), q(2, 5), q(1, 5), q(2, 5)}));
  EXPECT_EQ(cover[0].area() / B.area(), 4);
  EXPECT_TRUE(verify_cover(B, cover, q(1, 3)).pass());
}

TEST(Covering, FullGridCase) {
  Rect B{0, q(1, 10), 0, q(1, 10)};
  CoverInstance inst = choose_instance(B, {q(1, 20)}, q(2, 5));
  EXPECT_EQ(inst.tag_a, "1a");
  auto cover = cover_rect(inst);
  EXPECT_EQ(cover.size(), 9u);
  EXPECT_TRUE(grid_covered(B, cover));
  LemmaReport r = verify_cover(B, cover, q(2, 5));
  EXPECT_TRUE(r.pass());
  EXPECT_EQ(r.find("ii.min_overlap")->lhs / B.area(), q(1, 4));
  EXPECT_EQ(r.find("count")->rhs, q(49, 4));
}

TEST(Covering, MixedCaseHasOverlapStrip) {
  Rect B{0, q(1, 10), 0, q(1, 4)};
  CoverInstance inst{B, q(1, 3), q(1, 8), q(1, 10), "2a", "1b"};
  auto cover = cover_rect(inst);
  ASSERT_EQ(cover.size(), 3u);
  EXPECT_EQ(cover.back(), (Rect{0, q(1, 8), q(3, 20), q(1, 4)}));
  EXPECT_TRUE(grid_covered(B, cover));
  EXPECT_TRUE(verify_cover(B, cover, q(1, 3)).pass());
}

TEST(Covering, ExactFitDuplicates) {
  Rect B{0, q(1, 10), 0, q(1, 10)};
  auto cover = cover_rect(CoverInstance{B, q(2, 5), q(1, 20), q(1, 20), "1a", "1b"});
  EXPECT_EQ(cover.size(), 9u);
  EXPECT_TRUE(verify_cover(B, cover, q(2, 5)).pass());
}

TEST(Covering, GapHypothesisViolated) {
  Rect B{0, q(1, 10), 0, q(1, 10)};
  EXPECT_THROW(choose_instance(B, {q(1, 1000)}, q(1, 2)), std::invalid_argument);
  EXPECT_THROW(cover_rect(CoverInstance{B, q(1, 2), q(1, 1000), q(1, 10), "1a", "2b"}), std::invalid_argument);
}

TEST(Covering, MissingRectangleDetected) {
  Rect B{0, q(1, 10), 0, q(1, 10)};
  auto cover = cover_rect(CoverInstance{B, q(2, 5), q(1, 20), q(1, 20), "1a", "1b"});
  cover.erase(cover.begin());
  EXPECT_FALSE(verify_cover(B, cover, q(2, 5)).pass());
}

TEST(Covering, Certificate) {
  Rect B{0, q(1, 10), 0, q(1, 10)};
  auto cover = cover_rect(CoverInstance{B, q(2, 5), q(1, 20), q(1, 20), "1a", "1b"});
  StepFunction2D one = StepFunction2D::of({{unit_square(), 1}});
  Certificate c = bound_certificate(one, {q(1, 20), q(1, 20)}, B, cover, q(2, 5), 1);
  EXPECT_TRUE(c.holds);
  EXPECT_EQ(c.avg_B, 1);
  EXPECT_EQ(c.value, q(9, 4));
  StepFunction2D neg = StepFunction2D::of({{B, -1}});
  EXPECT_THROW(bound_certificate(neg, {0, 0}, B, cover, q(2, 5), 1), std::invalid_argument);
}

TEST(Covering, RandomSuite) {
  LemmaReport r = verify_covering_suite(1000, 7);
  EXPECT_TRUE(r.pass()) << to_json(r).dump(1);
  EXPECT_GT(r.extra["identity_checked"].get<std::size_t>(), 0u);
  EXPECT_EQ(r.extra["cases"].size(), 4u);
}
