#pragma once

#include "rdiff/scalar.hpp"

#include <optional>
#include <vector>

namespace rdiff {

// x is the first (vertical) side, y the second; a rectangle of class (x, y)
// has height x and width y.
struct PointZ {
  Scalar x, y;
};

struct Rect {
  Scalar x0, x1, y0, y1;

  Scalar height() const { return x1 - x0; }
  Scalar width() const { return y1 - y0; }
  Scalar area() const { return (x1 - x0) * (y1 - y0); }
  bool contains(const PointZ& z) const { return x0 <= z.x && z.x <= x1 && y0 <= z.y && z.y <= y1; }
  bool contains(const Rect& r) const { return x0 <= r.x0 && r.x1 <= x1 && y0 <= r.y0 && r.y1 <= y1; }
  bool interior_contains(const PointZ& z) const {
    return x0 < z.x && z.x < x1 && y0 < z.y && z.y < y1;
  }

  friend bool operator==(const Rect& a, const Rect& b) {
    return a.x0 == b.x0 && a.x1 == b.x1 && a.y0 == b.y0 && a.y1 == b.y1;
  }
  friend bool operator!=(const Rect& a, const Rect& b) { return !(a == b); }
  friend bool operator<(const Rect& a, const Rect& b);
};

// Throws std::invalid_argument unless 0 <= x0 < x1 <= 1 and 0 <= y0 < y1 <= 1.
Rect make_rect(Scalar x0, Scalar x1, Scalar y0, Scalar y1);
bool in_unit_square(const Rect& r);
Rect unit_square();

std::optional<Rect> intersect(const Rect& a, const Rect& b);

// Canonical disjoint union: maximal vertical slabs, merged intervals, cells in
// lexicographic (x0, y0) order. Equal point sets give equal cell lists.
class RectUnion {
 public:
  RectUnion() = default;
  static RectUnion of(const std::vector<Rect>& rects);

  const std::vector<Rect>& cells() const { return cells_; }
  bool empty() const { return cells_.empty(); }
  std::size_t size() const { return cells_.size(); }
  bool contains(const PointZ& z) const;

  friend bool operator==(const RectUnion& a, const RectUnion& b) { return a.cells_ == b.cells_; }

 private:
  std::vector<Rect> cells_;
};

Scalar area_union(const RectUnion& u);
// Measure of the union of possibly overlapping rectangles.
Scalar area_union(const std::vector<Rect>& rects);
RectUnion unite(const RectUnion& a, const RectUnion& b);
RectUnion subtract(const RectUnion& a, const RectUnion& b);
RectUnion intersect(const RectUnion& a, const RectUnion& b);
Scalar area_within(const RectUnion& u, const Rect& r);

struct WeightedCell {
  Rect rect;
  Scalar weight;
};

class StepFunction2D {
 public:
  StepFunction2D() = default;
  // Cells must be pairwise disjoint (checked); zero weights are dropped.
  static StepFunction2D of(std::vector<WeightedCell> terms);
  // Overlapping cells are resolved into disjoint pieces with summed weights.
  static StepFunction2D sum(const std::vector<WeightedCell>& terms);

  const std::vector<WeightedCell>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  // Closed-cell lookup; on a shared boundary the first cell in order wins.
  Scalar value_at(const PointZ& z) const;
  Scalar l1_norm() const;
  Scalar linf_norm() const;
  Scalar total() const;
  StepFunction2D scaled(const Scalar& k) const;
  bool nonnegative() const;

 private:
  std::vector<WeightedCell> terms_;
};

Scalar integral(const StepFunction2D& f, const Rect& r);
// Throws std::invalid_argument("zero-area rectangle") for degenerate r.
Scalar average(const StepFunction2D& f, const Rect& r);

struct MaxAverage {
  Scalar value;    // sup of |average|
  Scalar signed_average;
  Rect witness;
};

// Exact sup of |average(f, A)| over A = [u,u+x] x [v,v+y] inside the unit
// square with x, y in S, z in A, x^2 + y^2 <= diam_cap^2 and xy >= area_floor.
// For fixed (x, y) the integral is bilinear between breakpoints, so checking
// the candidate grid of cell edges, shifted edges and z-aligned offsets is exact.
// Throws std::invalid_argument("no admissible rectangle") if the family is empty.
MaxAverage maximal_average(const StepFunction2D& f, const PointZ& z, const std::vector<Scalar>& S,
                           const Scalar& diam_cap, const Scalar& area_floor);

// Fixed-point engine for dyadic coordinates in [0,1]: values are integers in
// units of 2^-kFixBits. Used for bulk union areas (Monte Carlo, tilings).
namespace fixed {

using u128 = unsigned __int128;
inline constexpr int kFixBits = 100;

struct FixRect {
  u128 x0, x1, y0, y1;
};

u128 one();
// False if v is not a dyadic in [0,1] with at most kFixBits fractional bits.
bool to_fixed(const Scalar& v, u128& out);
Scalar to_scalar(u128 v);
bool to_fixed(const Rect& r, FixRect& out);
Rect to_rect(const FixRect& r);

// Exact measure of the union, scaled by 2^(2 kFixBits).
mpz_class union_area_raw(const std::vector<FixRect>& rects);
Scalar union_area(const std::vector<FixRect>& rects);

}  // namespace fixed

}  // namespace rdiff
