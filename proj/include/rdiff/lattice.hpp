#pragma once

#include "rdiff/scalar.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace rdiff {

// Finite union of intervals on the line, stored as a base interval
// [lo, lo + len] replicated level by level: level i places `count` copies of
// everything built so far at spacing `step`. Copies never overlap in measure,
// so every query descends at most two partial copies per level.
class LatticeSet {
 public:
  LatticeSet() : LatticeSet(0, 0) {}
  LatticeSet(Scalar lo, Scalar len);

  // With allow_merge, a still-single interval that reaches its copies is
  // widened instead of replicated. Throws std::runtime_error if the copies of
  // a multi-interval set would overlap.
  void replicate(const mpz_class& count, const Scalar& step, bool allow_merge = true);

  const Scalar& lo() const { return lo_; }
  Scalar hi() const { return lo_ + ext_.back(); }
  const Scalar& extent() const { return ext_.back(); }
  const Scalar& measure() const { return meas_.back(); }
  std::size_t levels() const { return levels_.size(); }
  const mpz_class& count(std::size_t level) const { return levels_.at(level).count; }
  const Scalar& step(std::size_t level) const { return levels_.at(level).step; }
  mpz_class interval_count() const;

  Scalar measure_within(const Scalar& a, const Scalar& b) const;
  // Copy k of the outermost level is weighted (-1)^k.
  Scalar signed_measure_within(const Scalar& a, const Scalar& b) const;
  bool contains(const Scalar& y) const;
  // Copy index per level, outermost first, of a copy containing y.
  std::optional<std::vector<mpz_class>> locate(const Scalar& y) const;
  // Start of the base interval selected by per-level indices (outermost first).
  Scalar offset_of(const std::vector<mpz_class>& index) const;

  // Throws std::length_error beyond `cap` intervals.
  std::vector<std::pair<Scalar, Scalar>> intervals(std::size_t cap = 1u << 16) const;

 private:
  struct Level {
    mpz_class count;
    Scalar step;
  };
  Scalar within(std::size_t depth, const Scalar& o, const Scalar& a, const Scalar& b, bool alternate) const;
  bool locate_into(std::size_t depth, const Scalar& o, const Scalar& y, std::vector<mpz_class>& path) const;

  Scalar lo_;
  Scalar len_;
  std::vector<Level> levels_;
  std::vector<Scalar> ext_;   // ext_[d]: extent using the innermost d levels
  std::vector<Scalar> meas_;  // meas_[d]: measure using the innermost d levels
};

}  // namespace rdiff
