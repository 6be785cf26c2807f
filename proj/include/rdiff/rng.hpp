#pragma once

#include "rdiff/scalar.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace rdiff {

// Independent stream per (seed, trial); identical inputs give identical streams.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t trial = 0, std::uint64_t stream = 0);

// Uniform dyadic in [0,1) with 64 fractional bits.
Scalar random_unit(std::mt19937_64& rng);
// a + (b - a) * random_unit.
Scalar random_between(const Scalar& a, const Scalar& b, std::mt19937_64& rng);
// Uniform integer in [0, bound) for bound >= 1 (bias below 2^-64 for bounds up to 2^64 per limb).
mpz_class random_below(const mpz_class& bound, std::mt19937_64& rng);

template <class T>
const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

}  // namespace rdiff
