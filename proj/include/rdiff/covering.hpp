#pragma once

#include "rdiff/geometry.hpp"
#include "rdiff/report.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace rdiff {

// B = [s, s+a] x [t, t+b] with a, b from D; x, y from C.
struct CoverInstance {
  Rect B;
  Scalar c;
  Scalar x, y;
  std::string tag_a, tag_b;  // "1a"/"2a", "1b"/"2b"
};

// "2a" if 1 >= a/x > c, else "1a" if 1 >= x/a > c, else empty. Same for b.
std::string parity_tag(const Scalar& side, const Scalar& chosen, const Scalar& c, char axis);

// Picks x, y from `sides`, preferring 2a/2b. Throws std::invalid_argument
// ("gap hypothesis violated") when no admissible side exists, or c outside (0,1).
CoverInstance choose_instance(const Rect& B, const std::vector<Scalar>& sides, const Scalar& c);

// The four-case family. Throws std::invalid_argument on an inconsistent instance.
std::vector<Rect> cover_rect(const CoverInstance& inst);

LemmaReport verify_cover(const Rect& B, const std::vector<Rect>& cover, const Scalar& c);

struct Certificate {
  Scalar value;     // sum_q int_{A_q} f / |B|
  Scalar bound;     // (1/c + 1)^2 c^-2 local_bound
  Scalar avg_B;
  bool holds = false;  // avg_B <= value <= bound
};

// Throws std::invalid_argument("positivity violated") for a negative weight and
// when some A_q has average above local_bound.
Certificate bound_certificate(const StepFunction2D& f, const PointZ& z, const Rect& B, const std::vector<Rect>& cover,
                              const Scalar& c, const Scalar& local_bound);

// Random admissible instances with covers and certificates on random positive
// step functions.
LemmaReport verify_covering_suite(std::size_t instances, std::uint64_t seed);

nlohmann::json to_json(const CoverInstance& inst, const std::vector<Rect>& cover);

}  // namespace rdiff
