#pragma once

#include "rdiff/geometry.hpp"
#include "rdiff/lattice.hpp"
#include "rdiff/report.hpp"
#include "rdiff/side_sets.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace rdiff {

// theta[j] holds theta_j for j = 1..n-1 (theta[0] unused).
struct ThetaIndex {
  std::vector<mpz_class> theta;
  int order = 0;

  int n() const { return static_cast<int>(theta.size()); }
  std::string to_string() const;  // "(theta_{n-1}, ..., theta_1)"
};

// Order of an admissible tuple; throws std::invalid_argument if a zero entry
// is followed by a nonzero lower entry.
int theta_order(const std::vector<mpz_class>& theta);

// q[j] for j = 1..n-1 (q[0] unused).
std::vector<mpz_class> compute_q(const BSequence& b);
mpz_class theta_count(const std::vector<mpz_class>& q);
// Throws std::length_error past `cap` indices; std::invalid_argument for n < 2.
std::vector<ThetaIndex> enumerate_theta(const std::vector<mpz_class>& q, std::size_t cap = 1u << 20);

// One bad class of C-rectangles: every A of height <= x_max and width <= w_max
// meeting supp h lies in [0, x_extent] x y_set.
struct ExceptionalRegion {
  std::string label;  // case1, case2ii[r], case3ii, case4ii
  Scalar x_max;
  Scalar w_max;
  Scalar x_extent;
  LatticeSet y_set;
};

struct Configuration {
  PairMode mode = PairMode::Full;
  SideSetSchema C;
  BSequence b;
  std::vector<mpz_class> q;
  Scalar tau, eps, delta;
  Scalar value;            // |h| on its support
  LatticeSet support_y;    // y-ranges of the tau-squares; x-range is [0, tau]
  std::vector<ExceptionalRegion> d_hat;
  Scalar area_E, area_F, area_d_hat;
  Scalar K_E, K_F, eta;

  int n() const { return b.n; }
  Scalar block_area(int k) const { return b.at(k) * b.at(2 * b.n + 1 - k); }  // |B_k|
  const Scalar& step(int i) const { return b.at(2 * b.n + 1 - i); }          // s_i = b_{2n+1-i}
  mpz_class q_product(int from, int to) const;                               // q_from ... q_to
};

Rect rect_of_theta(const Configuration& cfg, const ThetaIndex& t);
Rect block_rect(const BSequence& b, const ThetaIndex& t);

// Throws std::invalid_argument("support square overflows B(theta)") for
// tau > b_{2n}, and when a non-relaxed pair fails validation.
Configuration build_config(const SidePair& pair, const Scalar& tau, const Scalar& eps, const Scalar& delta);
Scalar default_tau(const BSequence& b);

Scalar integral_h(const Configuration& cfg, const Rect& r);
Scalar integral_abs_h(const Configuration& cfg, const Rect& r);
Scalar average_h(const Configuration& cfg, const Rect& r);
Scalar value_h(const Configuration& cfg, const PointZ& z);
Scalar l1_norm_h(const Configuration& cfg);
Scalar total_integral_h(const Configuration& cfg);

bool in_d_hat(const Configuration& cfg, const PointZ& z);
// Positive-measure intersection with the closed cover.
bool meets_d_hat(const Configuration& cfg, const Rect& r);

// Explicit forms; throw std::length_error when there are more than `cap` pieces.
RectUnion explicit_E(const Configuration& cfg, std::size_t cap = 1u << 12);
RectUnion explicit_F(const Configuration& cfg, std::size_t cap = 1u << 12);
StepFunction2D explicit_h(const Configuration& cfg, std::size_t cap = 1u << 12);
RectUnion explicit_d_hat(const Configuration& cfg, std::size_t cap = 1u << 12);

// Area sandwich for E and F, K_E, K_F and the E/F comparison.
LemmaReport verify_area_sandwich(const Configuration& cfg);
// Average bounds over every theta when |Theta| <= exhaustive_cap, otherwise the
// first, last and `per_order` seeded random indices of each order.
LemmaReport verify_average_lemma(const Configuration& cfg, std::size_t exhaustive_cap = 1u << 16,
                                 std::size_t per_order = 256, std::uint64_t seed = 1);
// Norm ratios with the computed norm, integral of h, and the factor-2
// variants side by side in `extra`.
LemmaReport verify_norms(const Configuration& cfg);

struct CaseStats {
  std::size_t drawn = 0;
  std::size_t accepted = 0;
  Scalar max_abs_avg = 0;
};

// Case bounds: z outside the cover, A in R_C containing z. Also runs the
// literal variant on rectangles disjoint from the cover.
LemmaReport verify_case_bounds(const Configuration& cfg, std::size_t samples, std::uint64_t seed);
LemmaReport verify_exceptional_and_large(const Configuration& cfg);
// Large-rectangle bound on seeded rectangles with |R| > delta.
LemmaReport verify_large_rectangles(const Configuration& cfg, std::size_t samples, std::uint64_t seed);

nlohmann::json to_json(const Configuration& cfg, std::size_t explicit_cap = 256);

}  // namespace rdiff
