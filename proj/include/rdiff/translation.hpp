#pragma once

#include "rdiff/construction.hpp"
#include "rdiff/geometry.hpp"
#include "rdiff/report.hpp"

#include <json.hpp>

#include <cstdint>
#include <random>
#include <vector>

namespace rdiff {

struct TranslationVector {
  Scalar dx, dy;  // in [0,1)
};

struct OmegaTuple {
  std::vector<TranslationVector> omegas;
  std::size_t N() const { return omegas.size(); }
};

struct CoverageStats {
  std::size_t trials = 0;
  unsigned long N = 0;
  double mean = 0, stderr_ = 0;
  std::vector<Scalar> exact_samples;
  Scalar exact_mean;
  Scalar c0, eps;
  Scalar closed_form_lower;
  bool pass = false;  // mean >= closed_form_lower - 3 stderr
};

// Pieces of r + w modulo 1 (at most 4).
std::vector<Rect> torus_pieces(const Rect& r, const TranslationVector& w);
RectUnion torus_translate(const RectUnion& u, const TranslationVector& w);

// (1 - c0 a)^N - (1 - (1 + c0 - eps) a)^N exactly. Throws std::domain_error
// outside 0 <= a <= 1, 0 <= eps <= 1, c0 >= 0, (1 + c0 - eps) a < 1 or for
// N above 2^20.
Scalar coverage_lower_bound(const Scalar& areaA, const Scalar& c0, const Scalar& eps, unsigned long N);

// Rational lower bound of 0.99 ((2e)^-eps - 1/e), rounded down to 64 bits.
// Throws std::domain_error unless 0 < eps <= 1. May be non-positive.
Scalar chi_threshold(const Scalar& eps);

// N = ceil(1/|F|).
mpz_class translate_count(const Configuration& cfg);

// Exact |F0 \ D0| per trial through the fixed-point engine. Throws
// std::length_error when N times the cell count exceeds `budget`.
CoverageStats mc_coverage(const RectUnion& F, const RectUnion& D_hat, unsigned long N, std::size_t trials,
                          std::uint64_t seed, std::size_t budget = 1u << 22);

// Explicit data of a small configuration, ready to be translated.
struct TranslationKernel {
  int n = 0;
  unsigned long N = 0;
  Scalar tau, eta, delta;
  std::vector<Scalar> heights;  // b_1..b_n
  RectUnion F, D_hat;
  StepFunction2D h;
  std::vector<Rect> blocks;     // B(theta), 1 <= |theta| <= n-1
  std::vector<int> block_order;
  std::vector<Scalar> C_sides;  // materialized C elements used for sampling R_C
};

// Throws std::length_error if the configuration is too large to materialize
// or needs more than `budget` translates.
TranslationKernel make_kernel(const Configuration& cfg, std::size_t budget = 1u << 16);

// Omega_0 per coordinate (torus differences avoid b_1..b_n), distinct
// horizontal support edges (vertical gap) and supports not wrapping in x.
bool omega_admissible(const TranslationKernel& k, const OmegaTuple& omega);

struct OmegaSearch {
  OmegaTuple omega;
  Scalar q_area;
  Scalar best;
  std::size_t draws = 0;
  std::size_t resamples = 0;
};

// Exact |Q0| = |F0 u D0| - |D0|.
Scalar q0_area(const TranslationKernel& k, const OmegaTuple& omega);
// Throws std::runtime_error("no omega found ...") after `budget` draws.
OmegaSearch find_omega(const TranslationKernel& k, const Scalar& target, std::size_t budget, std::uint64_t seed);

struct Assembly {
  OmegaTuple omega;
  StepFunction2D h0;
  RectUnion Q0;
};

Assembly assemble_h0(const TranslationKernel& k, const OmegaTuple& omega);
Scalar torus_integral(const StepFunction2D& f, const Rect& r);
// Uniform point of u (total = |u|), 64-bit dyadic coordinates.
PointZ sample_point(const RectUnion& u, const Scalar& total, std::mt19937_64& rng);

// Properties (i)-(iii) of the assembled kernel on z_samples points of Q0 and
// rect_samples rectangles each for (i) and (iii).
LemmaReport verify_random_translation(const TranslationKernel& k, const Assembly& a, std::size_t z_samples,
                                      std::size_t rect_samples, std::uint64_t seed);

nlohmann::json to_json(const CoverageStats& s);
nlohmann::json to_json(const OmegaTuple& o);
OmegaTuple omega_from_json(const nlohmann::json& j);

}  // namespace rdiff
