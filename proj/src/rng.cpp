#include "rdiff/rng.hpp"

#include <stdexcept>

namespace rdiff {

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), lo(trial), hi(trial), lo(stream), hi(stream)};
  return std::mt19937_64(seq);
}

Scalar random_unit(std::mt19937_64& rng) {
  std::uint64_t v = rng();
  mpz_class num = from_u128(v);
  Scalar r(num, mpz_class(1));
  mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), 64);
  return r;
}

Scalar random_between(const Scalar& a, const Scalar& b, std::mt19937_64& rng) { return a + (b - a) * random_unit(rng); }

mpz_class random_below(const mpz_class& bound, std::mt19937_64& rng) {
  if (bound <= 0) throw std::invalid_argument("random_below needs a positive bound");
  const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2) + 64;
  mpz_class acc = 0;
  for (std::size_t got = 0; got < bits; got += 64) {
    acc <<= 64;
    acc += from_u128(rng());
  }
  return acc % bound;
}

}  // namespace rdiff
