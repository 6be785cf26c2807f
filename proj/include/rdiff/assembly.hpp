#pragma once

#include "rdiff/construction.hpp"
#include "rdiff/geometry.hpp"
#include "rdiff/report.hpp"
#include "rdiff/translation.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace rdiff {

struct Tiling {
  std::vector<Rect> squares;
  Scalar free_area;  // |Y|
  Scalar waste;      // |Y| - total square area
  Scalar min_side;
  int depth = 0;
};

// Dyadic quadtree squares inside `bounds` (a square) avoiding `obstacles`,
// deepened until waste < eps_k. Squares have side < max_side.
// Throws std::runtime_error if max_depth is reached first.
Tiling tile_free(const Rect& bounds, const std::vector<Rect>& obstacles, const Scalar& free_area, const Scalar& eps_k,
                 const Scalar& max_side = 2, int max_depth = 24);
// Squares inside Y over Y's bounding square.
Tiling tile_residual(const RectUnion& Y, const Scalar& eps_k, const Scalar& max_side = 2, int max_depth = 24);

struct StageRecord {
  int k = 0;
  Scalar X, Q, D, Y_next, X_next, waste, eps_k;
  mpz_class squares;  // number of squares hosting a kernel at this stage
  std::optional<Scalar> min_side;
};

struct Exhaustion {
  Scalar eps, chi;
  Scalar kernel_q;      // |Q0| of the unit kernel
  Scalar kernel_tiles;  // area fraction of the unit residual tiling
  int stop_stage = 0;   // least k with (1 - chi)^k < eps/2
  std::vector<StageRecord> stages;
  Scalar Q_area;
  OmegaTuple omega;
  Assembly kernel;  // h0 and Q0 on the unit square
  Tiling unit_tiling;
  std::vector<Rect> stage1_squares;  // hosts of stage 1
  std::vector<Scalar> stage1_shift;  // x-shift of the kernel inside each host, in host units
  LemmaReport report;
};

// Least k >= 0 with (1 - chi)^k < bound.
int stop_stage(const Scalar& chi, const Scalar& bound, int cap = 1000);

// Stage recursion with the kernel transplanted into every square: stage 0 is
// the kernel on the unit square, each later stage places it in the squares of
// the residual tiling. Stops at stop_stage or max_stages.
Exhaustion exhaust(const TranslationKernel& k, const OmegaTuple& omega, const Scalar& chi, const Scalar& eps,
                   int max_stages);

// Exact integral over r of h_0* + h_1* (the materialized stages).
// h_0* = |Q0| h0, h_1* = sum over hosts S of |Q0| |S| times h0 carried into S.
Scalar exhaustion_integral(const Exhaustion& ex, const Rect& r);

struct SeriesTerm {
  int index = 0;
  Scalar eps, delta, a;
  std::optional<Scalar> eta;
  std::optional<Scalar> f_sup;  // ||f_n||_inf when term n is built
  std::optional<int> kernel_level;  // least kernel level n with n >= a
};

struct SeriesSchedule {
  std::vector<SeriesTerm> terms;
};

// eps_1 = delta_1 = 1/2, a_1 = 1; eps_n = 1/(n+1)^2, delta_n = eta_{n-1},
// a_n = (2 sup_{k<n} ||f_k||_inf + n) n^2. Terms past the first unknown eta or
// f_sup carry no value for the dependent fields.
SeriesSchedule series_schedule(int terms, const std::vector<Scalar>& etas, const std::vector<Scalar>& f_sups);

struct DemoRow {
  PointZ z;
  int stage = 0;  // exhaustion stage of term 1 whose Q holds z
  Scalar max_avg_C;
  std::optional<std::vector<Rect>> witness;  // R_D witness of term N (torus pieces)
  std::optional<Scalar> witness_avg_D;
  Scalar bound;  // N - 1/N
  bool pass = false;
  std::vector<Rect> term1_witness;  // best block of term 1 containing z
  Scalar term1_avg;                 // |avg(f_1, block)|
};

struct DemoReport {
  int partial_terms = 0;
  SeriesSchedule schedule;
  std::vector<DemoRow> rows;
  std::string blocked;  // non-empty when a term could not be built
  Scalar M_tail, M_membership;
  LemmaReport report;
  std::vector<std::string> curves;  // CSV rows z_x,z_y,family,diam,avg
};

inline constexpr const char* kCurvesHeader = "z_x,z_y,family,diam,avg";

// Term 1 is the exhaustion of the relaxed demo kernel (eps = delta = 1/2).
// Later terms need kernels of level >= a_n; when one cannot be built the
// report says so in `blocked` and rows for N carry no witness.
DemoReport demo_divergence(int partial_terms, std::size_t z_samples, std::uint64_t seed, int max_stages = 3);

nlohmann::json to_json(const StageRecord& s);
nlohmann::json to_json(const Exhaustion& ex);
nlohmann::json to_json(const SeriesSchedule& s);
nlohmann::json to_json(const DemoReport& d);

}  // namespace rdiff
