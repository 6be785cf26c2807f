#include "rdiff/scalar.hpp"

#include <cmath>
#include <stdexcept>

namespace rdiff {

Scalar canonical(Scalar v) {
  v.canonicalize();
  return v;
}

Scalar make_scalar(long num, unsigned long den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  return canonical(Scalar(num, den));
}

std::string to_string(const Scalar& v) {
  return v.get_num().get_str() + "/" + v.get_den().get_str();
}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

mpz_class parse_int(std::string_view s) {
  bool neg = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    neg = s[0] == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) throw std::invalid_argument("malformed rational: " + std::string(s));
  mpz_class z(std::string(s), 10);
  return neg ? mpz_class(-z) : z;
}

}  // namespace

Scalar parse_scalar(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) throw std::invalid_argument("empty rational");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    mpz_class p = parse_int(text.substr(0, slash));
    std::string_view qs = text.substr(slash + 1);
    if (!all_digits(qs)) throw std::invalid_argument("malformed rational: " + std::string(text));
    mpz_class q(std::string(qs), 10);
    if (q == 0) throw std::invalid_argument("zero denominator");
    Scalar v(p, q);
    return canonical(v);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view ip = text.substr(0, dot);
    std::string_view fp = text.substr(dot + 1);
    bool neg = !ip.empty() && ip[0] == '-';
    if (!ip.empty() && (ip[0] == '-' || ip[0] == '+')) ip.remove_prefix(1);
    if (ip.empty()) ip = "0";
    if (!all_digits(ip) || !all_digits(fp))
      throw std::invalid_argument("malformed rational: " + std::string(text));
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, fp.size());
    mpz_class num = mpz_class(std::string(ip), 10) * den + mpz_class(std::string(fp), 10);
    if (neg) num = -num;
    return canonical(Scalar(num, den));
  }
  return Scalar(parse_int(text));
}

mpz_class floor_of(const Scalar& v) {
  mpz_class r;
  mpz_fdiv_q(r.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
  return r;
}

mpz_class ceil_of(const Scalar& v) {
  mpz_class r;
  mpz_cdiv_q(r.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
  return r;
}

Scalar abs_of(const Scalar& v) { return v < 0 ? Scalar(-v) : v; }

Scalar pow_of(const Scalar& base, unsigned long exp) {
  mpz_class n, d;
  mpz_pow_ui(n.get_mpz_t(), base.get_num_mpz_t(), exp);
  mpz_pow_ui(d.get_mpz_t(), base.get_den_mpz_t(), exp);
  return canonical(Scalar(n, d));
}

Scalar min_of(const Scalar& a, const Scalar& b) { return b < a ? b : a; }
Scalar max_of(const Scalar& a, const Scalar& b) { return a < b ? b : a; }

Scalar pow2(long e) {
  mpz_class p(1);
  if (e >= 0) {
    p <<= static_cast<unsigned long>(e);
    return Scalar(p);
  }
  p <<= static_cast<unsigned long>(-e);
  return Scalar(mpz_class(1), p);
}

long floor_log2(const Scalar& v) {
  if (v <= 0) throw std::domain_error("floor_log2 of non-positive value");
  long e = static_cast<long>(mpz_sizeinbase(v.get_num_mpz_t(), 2)) -
           static_cast<long>(mpz_sizeinbase(v.get_den_mpz_t(), 2));
  // 2^(e-1) < v < 2^(e+1); settle the exponent exactly.
  while (pow2(e) > v) --e;
  while (pow2(e + 1) <= v) ++e;
  return e;
}

Scalar dyadic_floor(const Scalar& v) { return pow2(floor_log2(v)); }

bool is_dyadic(const Scalar& v) {
  const mpz_class& d = v.get_den();
  return mpz_popcount(d.get_mpz_t()) == 1;
}

double to_double(const Scalar& v) { return v.get_d(); }

std::uint64_t to_u64(const mpz_class& v) {
  if (v < 0 || mpz_sizeinbase(v.get_mpz_t(), 2) > 64) throw std::overflow_error("value exceeds 64 bits");
  std::uint64_t out = 0;
  mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, v.get_mpz_t());
  return out;
}

mpz_class from_u128(unsigned __int128 v) {
  mpz_class hi(static_cast<unsigned long>(static_cast<std::uint64_t>(v >> 64)));
  mpz_class lo(static_cast<unsigned long>(static_cast<std::uint64_t>(v)));
  return (hi << 64) + lo;
}

unsigned __int128 to_u128(const mpz_class& v) {
  if (v < 0 || mpz_sizeinbase(v.get_mpz_t(), 2) > 128) throw std::overflow_error("value exceeds 128 bits");
  mpz_class hi = v >> 64;
  mpz_class lo = v - (hi << 64);
  unsigned __int128 out = static_cast<unsigned __int128>(to_u64(hi)) << 64;
  return out | to_u64(lo);
}

}  // namespace rdiff
