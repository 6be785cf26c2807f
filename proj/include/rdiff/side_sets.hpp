#pragma once

#include "rdiff/report.hpp"
#include "rdiff/scalar.hpp"

#include <json.hpp>

#include <vector>

namespace rdiff {

// Strictly decreasing side lengths in (0,1]: a materialized prefix plus the
// extension rule e -> e^2 * rho below the last element (rho = 0: finite set).
class SideSetSchema {
 public:
  SideSetSchema() = default;
  SideSetSchema(std::vector<Scalar> materialized, Scalar rho);

  const std::vector<Scalar>& materialized() const { return elems_; }
  const Scalar& rho() const { return rho_; }
  bool has_extension() const { return rho_ > 0 && !elems_.empty(); }

  // First extension element strictly below `threshold` (threshold must lie at
  // or below the last materialized element).
  Scalar extend_below(const Scalar& threshold) const;
  // All elements >= floor, decreasing; at most `cap` extension steps.
  std::vector<Scalar> elements_down_to(const Scalar& floor, std::size_t cap = 8) const;
  bool contains(const Scalar& x) const;

 private:
  std::vector<Scalar> elems_;
  Scalar rho_ = 0;
};

struct GapProfile {
  Scalar x;
  Scalar x_over;   // sup{a in C : a < x}, 0 if none
  Scalar x_under;  // inf{a in C : a > x}, 1 if none
  Scalar ratio_below;
  Scalar ratio_above;
};

// Throws std::domain_error unless 0 < x <= 1.
GapProfile gap(const SideSetSchema& C, const Scalar& x);

struct BSequence {
  int n = 0;
  std::vector<Scalar> b;  // b_1 > ... > b_{2n}
  Scalar lambda;

  const Scalar& at(int k) const { return b.at(static_cast<std::size_t>(k - 1)); }
};

enum class PairMode { Full, RelaxedDemo };

struct SidePair {
  SideSetSchema C;
  SideSetSchema D;
  BSequence b;
  PairMode mode = PairMode::Full;
};

// Greedy dyadic descent. Every inequality of conditions 1-5, the area-sandwich
// ratio hypothesis and the gap-ratio monotonicity along D holds with margin
// at least 2; the C elements flanking each b_k are also kept small enough for
// the exceptional-set budget |D| <= eps |F|.
SidePair generate_pair(int n, const Scalar& eps, const Scalar& delta, const Scalar& lambda);
// b = (1/2, 1/4, 1/32, 1/128), lambda = 1/2, C = {1} without extension.
SidePair relaxed_demo_pair();

Scalar default_rho(int n);

// Per-condition ledger: condition 1 (area decrease) plus the ratio hypothesis,
// condition 2 (gap chain), condition 3 (both distortion families, k = 1..n),
// condition 4 (delta), condition 5 (b_{n+2}).
LemmaReport validate_pair(const SideSetSchema& C, const BSequence& b, const Scalar& eps, const Scalar& delta);
// Conditions 1-5 only, without the structural sanity checks.
bool conditions_hold(const LemmaReport& report, int condition);

nlohmann::json to_json(const SidePair& p);
SidePair pair_from_json(const nlohmann::json& j);

}  // namespace rdiff
