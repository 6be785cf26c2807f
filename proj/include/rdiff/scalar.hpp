#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace rdiff {

// Exact rational. mpq_class keeps numerator/denominator reduced after every
// arithmetic operation; values built from raw parts go through canonical().
using Scalar = mpq_class;

Scalar canonical(Scalar v);
Scalar make_scalar(long num, unsigned long den);

// "p/q" with q > 0, always including the denominator (so 1 is "1/1").
std::string to_string(const Scalar& v);

// Accepts "p/q", "p" and finite decimals such as "0.125". Throws
// std::invalid_argument on malformed input or a zero denominator.
Scalar parse_scalar(std::string_view text);

mpz_class floor_of(const Scalar& v);
mpz_class ceil_of(const Scalar& v);
Scalar abs_of(const Scalar& v);
Scalar pow_of(const Scalar& base, unsigned long exp);
Scalar min_of(const Scalar& a, const Scalar& b);
Scalar max_of(const Scalar& a, const Scalar& b);

// Largest power of two (possibly negative exponent) that is <= v. v > 0.
Scalar dyadic_floor(const Scalar& v);
// floor(log2(v)) for v > 0.
long floor_log2(const Scalar& v);
bool is_dyadic(const Scalar& v);
Scalar pow2(long e);

double to_double(const Scalar& v);

std::uint64_t to_u64(const mpz_class& v);
mpz_class from_u128(unsigned __int128 v);
unsigned __int128 to_u128(const mpz_class& v);

}  // namespace rdiff
