#include "rdiff/translation.hpp"

#include "rdiff/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rdiff {

namespace {

using fixed::FixRect;
using fixed::u128;

std::vector<std::pair<Scalar, Scalar>> wrap(const Scalar& a, const Scalar& b, const Scalar& d) {
  Scalar lo = a + d, hi = b + d;
  if (lo >= 1) {
    lo -= 1;
    hi -= 1;
  }
  if (hi <= 1) return {{lo, hi}};
  return {{lo, Scalar(1)}, {Scalar(0), hi - 1}};
}

std::vector<std::pair<u128, u128>> wrap_fixed(u128 a, u128 b, u128 d) {
  const u128 one = fixed::one();
  u128 lo = a + d, hi = b + d;
  if (lo >= one) {
    lo -= one;
    hi -= one;
  }
  if (hi <= one) return {{lo, hi}};
  return {{lo, one}, {0, hi - one}};
}

void push_translated(std::vector<FixRect>& out, const FixRect& r, u128 dx, u128 dy) {
  for (auto [x0, x1] : wrap_fixed(r.x0, r.x1, dx))
    for (auto [y0, y1] : wrap_fixed(r.y0, r.y1, dy)) out.push_back({x0, x1, y0, y1});
}

std::vector<FixRect> to_fixed_cells(const RectUnion& u) {
  std::vector<FixRect> out;
  for (const auto& c : u.cells()) {
    FixRect f;
    if (!fixed::to_fixed(c, f)) throw std::invalid_argument("cell is not representable in the fixed-point engine");
    out.push_back(f);
  }
  return out;
}

u128 fixed_of(const Scalar& v) {
  u128 out;
  if (!fixed::to_fixed(v, out)) throw std::invalid_argument("translation is not representable in the fixed-point engine");
  return out;
}

// 64 random bits as a dyadic in [0,1), in fixed units and as a Scalar.
Scalar unit_from_bits(std::uint64_t v) {
  Scalar r(from_u128(v), mpz_class(1));
  mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), 64);
  return r;
}

u128 fixed_from_bits(std::uint64_t v) { return static_cast<u128>(v) << (fixed::kFixBits - 64); }

// Rounding onto the 2^-k grid.
Scalar round_down(const Scalar& v, unsigned k) {
  mpz_class s = floor_of(v * Scalar(mpz_class(1) << k));
  return canonical(Scalar(s, mpz_class(1) << k));
}

Scalar round_up(const Scalar& v, unsigned k) {
  mpz_class s = ceil_of(v * Scalar(mpz_class(1) << k));
  return canonical(Scalar(s, mpz_class(1) << k));
}

constexpr unsigned kGrid = 256;

Scalar exp_upper(const Scalar& y) {  // 0 <= y <= 2
  Scalar sum = 1, t = 1;
  const int K = 80;
  for (int k = 1; k <= K; ++k) {
    t = round_up(t * y / k, kGrid);
    sum += t;
  }
  // remainder y^(K+1)/(K+1)! e^y with e^y <= 9
  return sum + round_up(9 * t * y / (K + 1), kGrid);
}

Scalar e_lower() {
  Scalar sum = 1, t = 1;
  for (int k = 1; k <= 80; ++k) {
    t = round_down(t / k, kGrid);
    sum += t;
  }
  return sum;
}

Scalar ln2_upper() {
  Scalar sum = 0, p = 1;
  const int K = 200;
  for (int k = 1; k <= K; ++k) {
    p /= 2;
    sum += round_up(p / k, kGrid);
  }
  return sum + round_up(p / (K + 1), kGrid);  // tail <= 2^-K/(K+1)
}

bool coordinate_clash(const Scalar& a, const Scalar& b, const std::vector<Scalar>& heights) {
  Scalar d = abs_of(a - b);
  for (const auto& h : heights)
    if (d == h || 1 - d == h) return true;
  return false;
}

const Scalar kWrapMargin = pow2(-32);

bool admissible_against(const TranslationKernel& k, const std::vector<TranslationVector>& prev,
                        const TranslationVector& w) {
  if (w.dx + k.tau > 1 - kWrapMargin) return false;
  for (const auto& p : prev) {
    if (coordinate_clash(p.dx, w.dx, k.heights) || coordinate_clash(p.dy, w.dy, k.heights)) return false;
    if (p.dx == w.dx || abs_of(p.dx - w.dx) == k.tau) return false;  // collinear horizontal edges
  }
  return true;
}

struct FixedKernel {
  std::vector<FixRect> F, D;
};

FixedKernel fixed_kernel(const TranslationKernel& k) { return {to_fixed_cells(k.F), to_fixed_cells(k.D_hat)}; }

Scalar q0_area_fixed(const FixedKernel& fk, const std::vector<std::pair<u128, u128>>& shifts) {
  std::vector<FixRect> all, dd;
  all.reserve(4 * shifts.size() * (fk.F.size() + fk.D.size()));
  for (auto [dx, dy] : shifts) {
    for (const auto& r : fk.F) push_translated(all, r, dx, dy);
    for (const auto& r : fk.D) push_translated(dd, r, dx, dy);
  }
  if (dd.empty()) return canonical(Scalar(fixed::union_area_raw(all), mpz_class(1) << (2 * fixed::kFixBits)));
  mpz_class d_area = fixed::union_area_raw(dd);
  all.insert(all.end(), dd.begin(), dd.end());
  mpz_class raw = fixed::union_area_raw(all) - d_area;
  return canonical(Scalar(raw, mpz_class(1) << (2 * fixed::kFixBits)));
}

}  // namespace

std::vector<Rect> torus_pieces(const Rect& r, const TranslationVector& w) {
  std::vector<Rect> out;
  for (const auto& [x0, x1] : wrap(r.x0, r.x1, w.dx))
    for (const auto& [y0, y1] : wrap(r.y0, r.y1, w.dy)) out.push_back(Rect{x0, x1, y0, y1});
  return out;
}

RectUnion torus_translate(const RectUnion& u, const TranslationVector& w) {
  std::vector<Rect> rects;
  for (const auto& c : u.cells())
    for (auto& p : torus_pieces(c, w)) rects.push_back(std::move(p));
  return RectUnion::of(rects);
}

Scalar coverage_lower_bound(const Scalar& areaA, const Scalar& c0, const Scalar& eps, unsigned long N) {
  if (areaA < 0 || areaA > 1) throw std::domain_error("areaA must lie in [0,1]");
  if (c0 < 0) throw std::domain_error("c0 must be nonnegative");
  if (eps < 0 || eps > 1) throw std::domain_error("eps must lie in [0,1]");
  if ((1 + c0 - eps) * areaA >= 1) throw std::domain_error("(1 + c0 - eps) areaA must be below 1");
  if (c0 * areaA > 1) throw std::domain_error("c0 areaA must not exceed 1");
  if (N > (1ul << 20)) throw std::domain_error("N too large for exact evaluation");
  if (N == 0) return 0;
  return pow_of(1 - c0 * areaA, N) - pow_of(1 - (1 + c0 - eps) * areaA, N);
}

Scalar chi_threshold(const Scalar& eps) {
  if (eps <= 0 || eps > 1) throw std::domain_error("eps must lie in (0,1]");
  Scalar y = round_up(eps * (1 + ln2_upper()), kGrid);        // >= eps ln(2e)
  Scalar pow_lower = round_down(1 / exp_upper(y), kGrid);    // <= (2e)^-eps
  Scalar inv_e_upper = round_up(1 / e_lower(), kGrid);       // >= 1/e
  return round_down(Scalar(99, 100) * (pow_lower - inv_e_upper), 64);
}

mpz_class translate_count(const Configuration& cfg) {
  if (cfg.area_F <= 0) throw std::invalid_argument("|F| must be positive");
  return ceil_of(1 / cfg.area_F);
}

CoverageStats mc_coverage(const RectUnion& F, const RectUnion& D_hat, unsigned long N, std::size_t trials,
                          std::uint64_t seed, std::size_t budget) {
  if (N < 1 || trials < 1) throw std::invalid_argument("N >= 1 and trials >= 1 required");
  if (static_cast<double>(N) * static_cast<double>(F.size() + D_hat.size()) > static_cast<double>(budget))
    throw std::length_error("N = " + std::to_string(N) + " translates exceed the budget");
  const FixedKernel fk{to_fixed_cells(F), to_fixed_cells(D_hat)};
  CoverageStats s;
  s.trials = trials;
  s.N = N;
  s.exact_samples.reserve(trials);
  Scalar sum = 0;
  std::vector<std::pair<u128, u128>> shifts(N);
  for (std::size_t t = 0; t < trials; ++t) {
    auto rng = make_rng(seed, t, 7);
    for (auto& sh : shifts) {
      std::uint64_t a = rng(), b = rng();
      sh = {fixed_from_bits(a), fixed_from_bits(b)};
    }
    Scalar v = q0_area_fixed(fk, shifts);
    sum += v;
    s.exact_samples.push_back(std::move(v));
  }
  s.exact_mean = sum / Scalar(static_cast<long>(trials));
  s.mean = to_double(s.exact_mean);
  double var = 0;
  for (const auto& v : s.exact_samples) {
    double d = to_double(v) - s.mean;
    var += d * d;
  }
  var = trials > 1 ? var / static_cast<double>(trials - 1) : 0;
  s.stderr_ = std::sqrt(var / static_cast<double>(trials));
  const Scalar aF = area_union(F);
  s.c0 = aF > 0 ? area_union(D_hat) / aF : Scalar(0);
  s.eps = min_of(s.c0, Scalar(1));
  s.closed_form_lower = coverage_lower_bound(aF, s.c0, s.eps, N);
  s.pass = s.mean >= to_double(s.closed_form_lower) - 3 * s.stderr_;
  return s;
}

TranslationKernel make_kernel(const Configuration& cfg, std::size_t budget) {
  const mpz_class N = translate_count(cfg);
  if (N > budget)
    throw std::length_error("N = " + N.get_str() + " translates exceed the budget of " + std::to_string(budget));
  TranslationKernel k;
  k.n = cfg.n();
  k.N = N.get_ui();
  k.tau = cfg.tau;
  k.eta = cfg.eta;
  k.delta = cfg.delta;
  for (int i = 1; i <= k.n; ++i) k.heights.push_back(cfg.b.at(i));
  k.F = explicit_F(cfg);
  k.D_hat = explicit_d_hat(cfg);
  k.h = explicit_h(cfg);
  for (const auto& t : enumerate_theta(cfg.q))
    if (t.order >= 1 && t.order < k.n) {
      k.blocks.push_back(rect_of_theta(cfg, t));
      k.block_order.push_back(t.order);
    }
  k.C_sides = cfg.C.elements_down_to(cfg.b.at(2 * k.n), 32);
  return k;
}

bool omega_admissible(const TranslationKernel& k, const OmegaTuple& omega) {
  std::vector<TranslationVector> prev;
  for (const auto& w : omega.omegas) {
    if (w.dx < 0 || w.dx >= 1 || w.dy < 0 || w.dy >= 1) return false;
    if (!admissible_against(k, prev, w)) return false;
    prev.push_back(w);
  }
  return true;
}

Scalar q0_area(const TranslationKernel& k, const OmegaTuple& omega) {
  std::vector<std::pair<u128, u128>> shifts;
  for (const auto& w : omega.omegas) shifts.emplace_back(fixed_of(w.dx), fixed_of(w.dy));
  return q0_area_fixed(fixed_kernel(k), shifts);
}

OmegaSearch find_omega(const TranslationKernel& k, const Scalar& target, std::size_t budget, std::uint64_t seed) {
  const FixedKernel fk = fixed_kernel(k);
  OmegaSearch best;
  bool have = false;
  for (std::size_t d = 0; d < budget; ++d) {
    auto rng = make_rng(seed, d, 11);
    OmegaSearch cur;
    cur.draws = d + 1;
    std::vector<std::pair<u128, u128>> shifts;
    while (cur.omega.omegas.size() < k.N) {
      std::uint64_t a = rng(), b = rng();
      TranslationVector w{unit_from_bits(a), unit_from_bits(b)};
      if (!admissible_against(k, cur.omega.omegas, w)) {
        if (++cur.resamples > 100000) throw std::runtime_error("omega resampling does not terminate");
        continue;
      }
      cur.omega.omegas.push_back(std::move(w));
      shifts.emplace_back(fixed_from_bits(a), fixed_from_bits(b));
    }
    cur.q_area = q0_area_fixed(fk, shifts);
    if (!have || cur.q_area > best.q_area) {
      best = cur;
      have = true;
    }
    if (cur.q_area >= target) {
      cur.best = best.q_area;
      return cur;
    }
  }
  throw std::runtime_error("no omega found (best |Q0| = " + to_string(have ? best.q_area : Scalar(0)) + ")");
}

Assembly assemble_h0(const TranslationKernel& k, const OmegaTuple& omega) {
  Assembly a;
  a.omega = omega;
  std::vector<WeightedCell> cells;
  std::vector<Rect> fr, dr;
  for (const auto& w : omega.omegas) {
    for (const auto& t : k.h.terms())
      for (auto& p : torus_pieces(t.rect, w)) cells.push_back({std::move(p), t.weight});
    for (const auto& c : k.F.cells())
      for (auto& p : torus_pieces(c, w)) fr.push_back(std::move(p));
    for (const auto& c : k.D_hat.cells())
      for (auto& p : torus_pieces(c, w)) dr.push_back(std::move(p));
  }
  a.h0 = StepFunction2D::sum(cells);
  a.Q0 = subtract(RectUnion::of(fr), RectUnion::of(dr));
  return a;
}

Scalar torus_integral(const StepFunction2D& f, const Rect& r) {
  Scalar s = 0;
  for (const auto& p : torus_pieces(r, TranslationVector{0, 0})) s += integral(f, p);
  return s;
}

PointZ sample_point(const RectUnion& u, const Scalar& total, std::mt19937_64& rng) {
  Scalar target = random_unit(rng) * total;
  const Rect* cell = &u.cells().back();
  for (const auto& c : u.cells()) {
    if (target < c.area()) {
      cell = &c;
      break;
    }
    target -= c.area();
  }
  return PointZ{random_between(cell->x0, cell->x1, rng), random_between(cell->y0, cell->y1, rng)};
}

namespace {

Scalar place(const Scalar& zc, const Scalar& side, std::mt19937_64& rng) {
  Scalar lo = max_of(Scalar(0), zc - side), hi = min_of(zc, 1 - side);
  return random_between(lo, hi, rng);
}

}  // namespace

LemmaReport verify_random_translation(const TranslationKernel& k, const Assembly& a, std::size_t z_samples,
                                      std::size_t rect_samples, std::uint64_t seed) {
  LemmaReport rep;
  rep.title = "random translation";
  const Scalar n(k.n);
  const Scalar q_total = area_union(a.Q0);
  rep.add_flag("omega.admissible", omega_admissible(k, a.omega));
  rep.add("N", Scalar(static_cast<long>(a.omega.N())), Rel::EQ, Scalar(static_cast<long>(k.N)));
  rep.add("norm.l1_h0", a.h0.l1_norm(), Rel::LE, Scalar(static_cast<long>(a.omega.N())) * k.h.l1_norm());
  rep.add("integral.h0", a.h0.total(), Rel::EQ, Scalar(static_cast<long>(a.omega.N())) * k.h.total());
  if (q_total <= 0) {
    rep.add("Q0.area", q_total, Rel::GT, Scalar(0));
    return rep;
  }

  // (i) A in R_C containing z in Q0
  Scalar worst_i = 0;
  std::size_t viol_i = 0;
  for (std::size_t s = 0; s < rect_samples; ++s) {
    auto rng = make_rng(seed, s, 21);
    PointZ z = sample_point(a.Q0, q_total, rng);
    const Scalar& x = pick(k.C_sides, rng);
    const Scalar& y = pick(k.C_sides, rng);
    Scalar u = place(z.x, x, rng), v = place(z.y, y, rng);
    Rect A{u, u + x, v, v + y};
    Scalar avg = abs_of(average(a.h0, A));
    worst_i = max_of(worst_i, avg);
    if (avg > 2) ++viol_i;
  }
  rep.add("i.max_abs_avg", worst_i, Rel::LE, Scalar(2));
  rep.add("i.violations", Scalar(static_cast<long>(viol_i)), Rel::EQ, Scalar(0));

  // (ii) witness B(theta) + omega_k containing z
  std::size_t strict_ok = 0, any_ok = 0, equal_n = 0, no_witness = 0, area_only_eta = 0;
  Scalar min_best = -1;
  nlohmann::json examples = nlohmann::json::array();
  for (std::size_t s = 0; s < z_samples; ++s) {
    auto rng = make_rng(seed, s, 22);
    PointZ z = sample_point(a.Q0, q_total, rng);
    Scalar best_any = -1, best_strict = -1;
    Scalar best_any_area;
    for (std::size_t c = 0; c < a.omega.N(); ++c) {
      const auto& w = a.omega.omegas[c];
      for (const auto& blk : k.blocks) {
        auto pieces = torus_pieces(blk, w);
        bool hit = std::any_of(pieces.begin(), pieces.end(), [&](const Rect& p) { return p.contains(z); });
        if (!hit) continue;
        Scalar in = 0;
        for (const auto& p : pieces) in += integral(a.h0, p);
        Scalar avg = abs_of(in / blk.area());
        if (avg > best_any) {
          best_any = avg;
          best_any_area = blk.area();
        }
        if (blk.area() > k.eta && avg > best_strict) best_strict = avg;
      }
    }
    if (best_any < 0) {
      ++no_witness;
      continue;
    }
    if (min_best < 0 || best_any < min_best) min_best = best_any;
    if (best_any >= n) {
      ++any_ok;
      if (best_any == n) ++equal_n;
    }
    if (best_strict >= n)
      ++strict_ok;
    else if (best_any >= n)
      ++area_only_eta;
    if (examples.size() < 5)
      examples.push_back({{"z", to_json(z)}, {"best_abs_avg", to_json(best_any)}, {"area", to_json(best_any_area)}});
  }
  const Scalar zs(static_cast<long>(z_samples));
  rep.add("ii.witness_ge_n_area_gt_eta", Scalar(static_cast<long>(strict_ok)), Rel::EQ, zs,
          "witness B = B(theta)+omega_k containing z with |avg| >= n and |B| > eta");
  rep.add("ii.no_witness", Scalar(static_cast<long>(no_witness)), Rel::EQ, Scalar(0));
  rep.extra["ii"] = {{"witness_ge_n_any_area", any_ok},
                     {"witness_ge_n_only_at_area_eta", area_only_eta},
                     {"equal_to_n", equal_n},
                     {"min_best_abs_avg", to_json(min_best < 0 ? Scalar(0) : min_best)},
                     {"eta", to_json(k.eta)},
                     {"examples", examples}};

  // (iii) |R| > delta
  Scalar worst_iii = 0;
  std::size_t viol_iii = 0;
  for (std::size_t s = 0; s < rect_samples; ++s) {
    auto rng = make_rng(seed, s, 23);
    Scalar y, x;
    do {
      y = random_between(k.delta, 1, rng);
      x = random_between(k.delta / y, 1, rng);
    } while (x * y <= k.delta);
    Scalar x0 = random_between(0, 1 - x, rng), y0 = random_between(0, 1 - y, rng);
    Scalar avg = abs_of(average(a.h0, Rect{x0, x0 + x, y0, y0 + y}));
    worst_iii = max_of(worst_iii, avg);
    if (!(avg < 1)) ++viol_iii;
  }
  rep.add("iii.max_abs_avg", worst_iii, Rel::LT, Scalar(1));
  rep.add("iii.violations", Scalar(static_cast<long>(viol_iii)), Rel::EQ, Scalar(0));
  return rep;
}

nlohmann::json to_json(const CoverageStats& s) {
  return {{"trials", s.trials},
          {"N", s.N},
          {"mean", s.mean},
          {"stderr", s.stderr_},
          {"exact_mean", to_string(s.exact_mean)},
          {"c0", to_string(s.c0)},
          {"eps", to_string(s.eps)},
          {"closed_form_lower", to_string(s.closed_form_lower)},
          {"pass", s.pass}};
}

nlohmann::json to_json(const OmegaTuple& o) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& w : o.omegas) j.push_back({to_string(w.dx), to_string(w.dy)});
  return j;
}

OmegaTuple omega_from_json(const nlohmann::json& j) {
  OmegaTuple o;
  for (const auto& p : j) o.omegas.push_back({parse_scalar(p.at(0).get<std::string>()), parse_scalar(p.at(1).get<std::string>())});
  return o;
}

}  // namespace rdiff
