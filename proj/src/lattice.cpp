#include "rdiff/lattice.hpp"

#include <stdexcept>

namespace rdiff {

namespace {

mpz_class max_z(const mpz_class& a, const mpz_class& b) { return a < b ? b : a; }
mpz_class min_z(const mpz_class& a, const mpz_class& b) { return a < b ? a : b; }

// Sum of (-1)^k over k in [lo, hi].
mpz_class alternating_sum(const mpz_class& lo, const mpz_class& hi) {
  if (lo > hi) return 0;
  mpz_class len = hi - lo + 1;
  if (mpz_even_p(len.get_mpz_t())) return 0;
  return mpz_even_p(lo.get_mpz_t()) ? 1 : -1;
}

}  // namespace

LatticeSet::LatticeSet(Scalar lo, Scalar len) : lo_(std::move(lo)), len_(std::move(len)) {
  if (len_ < 0) throw std::invalid_argument("negative interval length");
  ext_.push_back(len_);
  meas_.push_back(len_);
}

void LatticeSet::replicate(const mpz_class& count, const Scalar& step, bool allow_merge) {
  if (count < 1 || step <= 0) throw std::invalid_argument("replication needs count >= 1 and step > 0");
  if (allow_merge && levels_.empty() && len_ >= step) {
    len_ += Scalar(count - 1) * step;
    ext_[0] = len_;
    meas_[0] = len_;
    return;
  }
  if (count > 1 && extent() > step) throw std::runtime_error("overlapping lattice copies");
  levels_.push_back({count, step});
  ext_.push_back(ext_.back() + Scalar(count - 1) * step);
  meas_.push_back(meas_.back() * Scalar(count));
}

mpz_class LatticeSet::interval_count() const {
  mpz_class c = 1;
  for (const auto& l : levels_) c *= l.count;
  return c;
}

Scalar LatticeSet::within(std::size_t depth, const Scalar& o, const Scalar& a, const Scalar& b, bool alternate) const {
  const Scalar& e = ext_[depth];
  if (b <= o || a >= o + e) return 0;
  if (!alternate && a <= o && o + e <= b) return meas_[depth];
  if (depth == 0) return min_of(b, o + len_) - max_of(a, o);
  const Level& lv = levels_[depth - 1];
  const Scalar& sub = ext_[depth - 1];
  const mpz_class last = lv.count - 1;
  // copies k with o + k step < b and o + k step + sub > a
  mpz_class kmin = max_z(0, floor_of((a - sub - o) / lv.step) + 1);
  mpz_class kmax = min_z(last, ceil_of((b - o) / lv.step) - 1);
  if (kmin > kmax) return 0;
  mpz_class fmin = max_z(kmin, ceil_of((a - o) / lv.step));
  mpz_class fmax = min_z(kmax, floor_of((b - sub - o) / lv.step));
  Scalar total = 0;
  const bool full = fmin <= fmax;
  if (full) {
    mpz_class mult = alternate ? alternating_sum(fmin, fmax) : mpz_class(fmax - fmin + 1);
    total += Scalar(mult) * meas_[depth - 1];
  }
  auto partial = [&](const mpz_class& k) {
    Scalar part = within(depth - 1, o + Scalar(k) * lv.step, a, b, false);
    if (alternate && mpz_odd_p(k.get_mpz_t())) part = -part;
    total += part;
  };
  if (!full) {
    if (kmax - kmin > 1) throw std::logic_error("lattice copies wider than their spacing");
    partial(kmin);
    if (kmax != kmin) partial(kmax);
  } else {
    if (kmin < fmin) partial(kmin);
    if (kmax > fmax) partial(kmax);
  }
  return total;
}

Scalar LatticeSet::measure_within(const Scalar& a, const Scalar& b) const {
  if (b <= a) return 0;
  return within(levels_.size(), lo_, a, b, false);
}

Scalar LatticeSet::signed_measure_within(const Scalar& a, const Scalar& b) const {
  if (b <= a) return 0;
  return within(levels_.size(), lo_, a, b, !levels_.empty());
}

bool LatticeSet::locate_into(std::size_t depth, const Scalar& o, const Scalar& y, std::vector<mpz_class>& path) const {
  if (y < o || y > o + ext_[depth]) return false;
  if (depth == 0) return true;
  const Level& lv = levels_[depth - 1];
  mpz_class k = min_z(lv.count - 1, floor_of((y - o) / lv.step));
  for (int back = 0; back < 2 && k >= 0; ++back, k -= 1) {
    path.push_back(k);
    if (locate_into(depth - 1, o + Scalar(k) * lv.step, y, path)) return true;
    path.pop_back();
  }
  return false;
}

std::optional<std::vector<mpz_class>> LatticeSet::locate(const Scalar& y) const {
  std::vector<mpz_class> path;
  if (!locate_into(levels_.size(), lo_, y, path)) return std::nullopt;
  return path;
}

bool LatticeSet::contains(const Scalar& y) const { return locate(y).has_value(); }

Scalar LatticeSet::offset_of(const std::vector<mpz_class>& index) const {
  if (index.size() != levels_.size()) throw std::invalid_argument("lattice index has wrong depth");
  Scalar o = lo_;
  for (std::size_t i = 0; i < index.size(); ++i) {
    const Level& lv = levels_[levels_.size() - 1 - i];
    if (index[i] < 0 || index[i] >= lv.count) throw std::out_of_range("lattice index out of range");
    o += Scalar(index[i]) * lv.step;
  }
  return o;
}

std::vector<std::pair<Scalar, Scalar>> LatticeSet::intervals(std::size_t cap) const {
  if (interval_count() > cap) throw std::length_error("lattice set too large to materialize");
  std::vector<Scalar> starts{lo_};
  for (const auto& lv : levels_) {
    std::vector<Scalar> next;
    for (mpz_class k = 0; k < lv.count; ++k)
      for (const auto& s : starts) next.push_back(s + Scalar(k) * lv.step);
    starts = std::move(next);
  }
  std::vector<std::pair<Scalar, Scalar>> out;
  for (const auto& s : starts) out.emplace_back(s, s + len_);
  return out;
}

}  // namespace rdiff
