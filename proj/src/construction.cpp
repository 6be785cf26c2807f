#include "rdiff/construction.hpp"

#include "rdiff/rng.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace rdiff {

namespace {

std::string idx(const std::string& base, int k) { return base + "[" + std::to_string(k) + "]"; }

// Largest element of C that is <= v, 0 if none.
Scalar max_le(const SideSetSchema& C, const Scalar& v) {
  if (C.contains(v)) return v;
  return gap(C, v).x_over;
}

std::optional<Scalar> max_in(const SideSetSchema& C, const Scalar& lo, const Scalar& hi) {
  Scalar m = max_le(C, hi);
  if (m > lo) return m;
  return std::nullopt;
}

Scalar product_bound(const Configuration& cfg, int from) {
  Scalar p = 1;
  for (int j = from; j <= cfg.n() - 1; ++j) p *= 1 + Scalar(1) / Scalar(cfg.q[j]);
  return p;
}

}  // namespace

std::string ThetaIndex::to_string() const {
  std::ostringstream os;
  os << "(";
  for (int j = n() - 1; j >= 1; --j) {
    os << theta[j].get_str();
    if (j > 1) os << ",";
  }
  os << ")";
  return os.str();
}

int theta_order(const std::vector<mpz_class>& theta) {
  const int n = static_cast<int>(theta.size());
  int zeros = 0;
  for (int j = 1; j < n; ++j) {
    if (theta[j] == 0) {
      if (zeros != j - 1) throw std::invalid_argument("inadmissible theta: zero above a nonzero entry");
      zeros = j;
    }
  }
  return zeros == 0 ? 1 : zeros + 1;
}

std::vector<mpz_class> compute_q(const BSequence& b) {
  const int n = b.n;
  std::vector<mpz_class> q(n);
  for (int j = 1; j < n; ++j) {
    q[j] = floor_of(b.at(j + 1) * b.at(2 * n - j) / (b.at(j) * b.at(2 * n + 1 - j)));
    if (q[j] < 1) throw std::invalid_argument("q_" + std::to_string(j) + " < 1: area decrease fails");
  }
  return q;
}

mpz_class theta_count(const std::vector<mpz_class>& q) {
  mpz_class total = 1, prod = 1;
  for (std::size_t j = q.size() - 1; j >= 1; --j) {
    prod *= q[j];
    total += prod;
  }
  return total;
}

std::vector<ThetaIndex> enumerate_theta(const std::vector<mpz_class>& q, std::size_t cap) {
  const int n = static_cast<int>(q.size());
  if (n < 2) throw std::invalid_argument("n >= 2 required");
  if (theta_count(q) > cap) throw std::length_error("theta set too large to enumerate");
  std::vector<ThetaIndex> out;
  for (int order = n; order >= 1; --order) {
    ThetaIndex t;
    t.theta.assign(n, 0);
    t.order = order;
    for (int j = order; j < n; ++j) t.theta[j] = 1;
    if (order == n) {
      out.push_back(t);
      continue;
    }
    // odometer over theta_{n-1} (most significant) down to theta_order
    while (true) {
      out.push_back(t);
      int j = order;
      while (j < n && t.theta[j] == q[j]) t.theta[j++] = 1;
      if (j == n) break;
      t.theta[j] += 1;
    }
  }
  // lexicographic in (theta_{n-1}, ..., theta_1) within each order
  for (auto it = out.begin(); it != out.end();) {
    auto end = std::find_if(it, out.end(), [&](const ThetaIndex& t) { return t.order != it->order; });
    std::sort(it, end, [](const ThetaIndex& a, const ThetaIndex& b) {
      return std::lexicographical_compare(a.theta.rbegin(), a.theta.rend(), b.theta.rbegin(), b.theta.rend());
    });
    it = end;
  }
  return out;
}

Rect block_rect(const BSequence& b, const ThetaIndex& t) {
  const int n = b.n;
  if (t.order == n) return Rect{0, b.at(n), 0, b.at(n + 1)};
  Scalar off = 0;
  for (int j = t.order; j < n; ++j) off += Scalar(t.theta[j] - 1) * b.at(2 * n + 1 - j);
  return Rect{0, b.at(t.order), off, off + b.at(2 * n + 1 - t.order)};
}

Rect rect_of_theta(const Configuration& cfg, const ThetaIndex& t) { return block_rect(cfg.b, t); }

mpz_class Configuration::q_product(int from, int to) const {
  mpz_class p = 1;
  for (int j = from; j <= to; ++j) p *= q[j];
  return p;
}

Scalar default_tau(const BSequence& b) { return b.at(2 * b.n) / 2; }

Configuration build_config(const SidePair& pair, const Scalar& tau, const Scalar& eps, const Scalar& delta) {
  const int n = pair.b.n;
  if (n < 2) throw std::invalid_argument("n >= 2 required");
  if (tau <= 0) throw std::invalid_argument("tau must be positive");
  if (tau > pair.b.at(2 * n)) throw std::invalid_argument("support square overflows B(theta)");
  if (pair.mode == PairMode::Full) {
    LemmaReport v = validate_pair(pair.C, pair.b, eps, delta);
    if (!v.pass()) throw std::invalid_argument("side-set conditions fail: " + v.first_failure()->name);
  }
  Configuration cfg;
  cfg.mode = pair.mode;
  cfg.C = pair.C;
  cfg.b = pair.b;
  cfg.tau = tau;
  cfg.eps = eps;
  cfg.delta = delta;
  cfg.q = compute_q(pair.b);

  const Scalar Bn = cfg.block_area(n);
  cfg.value = Scalar(n) * Bn / (tau * tau * Scalar(cfg.q_product(1, n - 1)));
  cfg.support_y = LatticeSet(0, tau);
  for (int i = 1; i < n; ++i) cfg.support_y.replicate(cfg.q[i], cfg.step(i), false);

  auto b = [&](int k) -> const Scalar& { return cfg.b.at(k); };
  // staircase areas
  cfg.area_E = Bn;
  cfg.area_F = Scalar(cfg.q[n - 1]) * cfg.step(n - 1) * b(n - 1);
  for (int j = 1; j < n; ++j) {
    Scalar Q = cfg.q_product(j, n - 1);
    cfg.area_E += Scalar(Q) * cfg.step(j) * (b(j) - b(j + 1));
    if (j <= n - 2) cfg.area_F += Scalar(Q) * cfg.step(j) * (b(j) - b(j + 1));
  }
  Scalar S = 0;
  for (int j = 1; j < n; ++j) {
    Scalar term = 1;
    for (int i = j; i < n; ++i) term *= Scalar(cfg.q[i]) / Scalar(cfg.q[i] + 1);
    S += term;
  }
  const Scalar& lam = cfg.b.lambda;
  cfg.K_E = 1 / (Scalar(1, n) + (1 - lam) / n * S);
  cfg.K_F = 1 / ((1 - lam) / (n - 1) * S);
  cfg.eta = cfg.block_area(1);

  // exceptional cover: one region per bad class of C-rectangles, taken at the
  // largest admissible height and width
  auto add_region = [&](std::string label, const std::optional<Scalar>& x, const Scalar& w) {
    if (!x || w <= 0) return;
    LatticeSet ys(-w, tau + 2 * w);
    try {
      for (int i = 1; i < n; ++i) ys.replicate(cfg.q[i], cfg.step(i), true);
    } catch (const std::runtime_error&) {
      throw std::runtime_error("exceptional cover for " + label + " is not a lattice set");
    }
    cfg.d_hat.push_back({std::move(label), *x, w, min_of(Scalar(1), tau + *x), std::move(ys)});
  };
  const SideSetSchema& C = cfg.C;
  Scalar x1 = max_le(C, b(n + 1));
  add_region("case1", x1 > 0 ? std::optional<Scalar>(x1) : std::nullopt, max_le(C, Scalar(1)));
  for (int r = 1; r < n; ++r) add_region(idx("case2ii", r), max_in(C, b(r + 1), b(r)), max_le(C, b(2 * n - r)));
  add_region("case3ii", max_in(C, b(1), Scalar(1)), max_le(C, b(2 * n)));
  add_region("case4ii", max_in(C, b(n + 1), b(n)), max_le(C, b(n + 1)));

  // union area by horizontal bands; the y-sets are nested in w_max
  std::vector<const ExceptionalRegion*> order;
  for (const auto& r : cfg.d_hat) order.push_back(&r);
  std::sort(order.begin(), order.end(),
            [](const ExceptionalRegion* a, const ExceptionalRegion* b) { return a->x_extent > b->x_extent; });
  cfg.area_d_hat = 0;
  const ExceptionalRegion* widest = nullptr;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (!widest || order[k]->w_max > widest->w_max) widest = order[k];
    Scalar below = k + 1 < order.size() ? order[k + 1]->x_extent : Scalar(0);
    cfg.area_d_hat += (order[k]->x_extent - below) * widest->y_set.measure_within(0, 1);
  }
  return cfg;
}

Scalar integral_h(const Configuration& cfg, const Rect& r) {
  Scalar lx = min_of(r.x1, cfg.tau) - max_of(r.x0, Scalar(0));
  if (lx <= 0) return 0;
  return cfg.value * lx * cfg.support_y.signed_measure_within(r.y0, r.y1);
}

Scalar integral_abs_h(const Configuration& cfg, const Rect& r) {
  Scalar lx = min_of(r.x1, cfg.tau) - max_of(r.x0, Scalar(0));
  if (lx <= 0) return 0;
  return cfg.value * lx * cfg.support_y.measure_within(r.y0, r.y1);
}

Scalar average_h(const Configuration& cfg, const Rect& r) {
  if (r.area() <= 0) throw std::invalid_argument("zero-area rectangle");
  return integral_h(cfg, r) / r.area();
}

Scalar value_h(const Configuration& cfg, const PointZ& z) {
  if (z.x < 0 || z.x > cfg.tau) return 0;
  auto path = cfg.support_y.locate(z.y);
  if (!path) return 0;
  return mpz_even_p((*path)[0].get_mpz_t()) ? cfg.value : Scalar(-cfg.value);
}

Scalar l1_norm_h(const Configuration& cfg) { return cfg.value * cfg.tau * cfg.support_y.measure(); }

Scalar total_integral_h(const Configuration& cfg) { return integral_h(cfg, unit_square()); }

bool in_d_hat(const Configuration& cfg, const PointZ& z) {
  for (const auto& r : cfg.d_hat)
    if (z.x >= 0 && z.x <= r.x_extent && r.y_set.contains(z.y)) return true;
  return false;
}

bool meets_d_hat(const Configuration& cfg, const Rect& rect) {
  for (const auto& r : cfg.d_hat)
    if (rect.x0 < r.x_extent && r.y_set.measure_within(rect.y0, rect.y1) > 0) return true;
  return false;
}

RectUnion explicit_E(const Configuration& cfg, std::size_t cap) {
  std::vector<Rect> rects;
  for (const auto& t : enumerate_theta(cfg.q, cap)) rects.push_back(rect_of_theta(cfg, t));
  return RectUnion::of(rects);
}

RectUnion explicit_F(const Configuration& cfg, std::size_t cap) {
  std::vector<Rect> rects;
  for (const auto& t : enumerate_theta(cfg.q, cap))
    if (t.order < cfg.n()) rects.push_back(rect_of_theta(cfg, t));
  return RectUnion::of(rects);
}

StepFunction2D explicit_h(const Configuration& cfg, std::size_t cap) {
  std::vector<WeightedCell> cells;
  const int n = cfg.n();
  for (const auto& t : enumerate_theta(cfg.q, cap)) {
    if (t.order != 1) continue;
    Scalar p = 0;
    for (int j = 1; j < n; ++j) p += Scalar(t.theta[j] - 1) * cfg.step(j);
    Scalar w = mpz_odd_p(t.theta[n - 1].get_mpz_t()) ? cfg.value : Scalar(-cfg.value);
    cells.push_back({Rect{0, cfg.tau, p, p + cfg.tau}, w});
  }
  return StepFunction2D::of(std::move(cells));
}

RectUnion explicit_d_hat(const Configuration& cfg, std::size_t cap) {
  std::vector<Rect> rects;
  for (const auto& r : cfg.d_hat)
    for (const auto& [a, b] : r.y_set.intervals(cap)) {
      Scalar y0 = max_of(a, Scalar(0)), y1 = min_of(b, Scalar(1));
      if (y0 < y1) rects.push_back(Rect{0, r.x_extent, y0, y1});
      if (rects.size() > cap) throw std::length_error("exceptional cover too large to materialize");
    }
  return RectUnion::of(rects);
}

LemmaReport verify_area_sandwich(const Configuration& cfg) {
  LemmaReport rep;
  rep.title = "area sandwich";
  const int n = cfg.n();
  const Scalar Bn = cfg.block_area(n);
  const Scalar& lam = cfg.b.lambda;
  Scalar S = 0;
  for (int j = 1; j < n; ++j) {
    Scalar term = 1;
    for (int i = j; i < n; ++i) term *= Scalar(cfg.q[i]) / Scalar(cfg.q[i] + 1);
    S += term;
  }
  Scalar rE = cfg.area_E / (n * Bn), rF = cfg.area_F / ((n - 1) * Bn);
  rep.add("areaE.lower", Scalar(1, n) + (1 - lam) / n * S, Rel::LE, rE);
  rep.add("areaE.upper", rE, Rel::LE, Scalar(1));
  rep.add("areaF.lower", (1 - lam) / (n - 1) * S, Rel::LE, rF);
  rep.add("areaF.upper", rF, Rel::LE, Scalar(1));
  rep.add("K_E.at_least_one", cfg.K_E, Rel::GE, Scalar(1));
  rep.add("K_F.at_least_one", cfg.K_F, Rel::GE, Scalar(1));
  Scalar nn = Scalar(n, n - 1);
  rep.add("E_over_F.lower", nn / cfg.K_E, Rel::LE, cfg.area_E / cfg.area_F);
  rep.add("E_over_F.upper", cfg.area_E / cfg.area_F, Rel::LE, cfg.K_F * nn);
  if (theta_count(cfg.q) <= 4096) {
    rep.add("E.explicit_union", area_union(explicit_E(cfg)), Rel::EQ, cfg.area_E);
    rep.add("F.explicit_union", area_union(explicit_F(cfg)), Rel::EQ, cfg.area_F);
  }
  bool strict = true;
  Scalar worst = 0;
  for (int k = 1; k < 2 * n; ++k) {
    Scalar ratio = cfg.b.at(k + 1) / cfg.b.at(k);
    worst = max_of(worst, ratio);
    strict = strict && ratio < lam;
  }
  rep.extra["ratio_hypothesis_strict"] = strict;
  rep.extra["max_ratio"] = to_string(worst);
  rep.extra["area_E"] = to_string(cfg.area_E);
  rep.extra["area_F"] = to_string(cfg.area_F);
  rep.extra["K_E"] = to_string(cfg.K_E);
  rep.extra["K_F"] = to_string(cfg.K_F);
  // order-(j+1) blocks overlap their order-j children, so the block sum
  // exceeds |F| once n >= 3
  Scalar block_sum = 0;
  for (int j = 1; j < n; ++j) block_sum += Scalar(cfg.q_product(j, n - 1)) * cfg.block_area(j);
  rep.extra["block_area_sum"] = to_string(block_sum);
  rep.extra["block_area_sum_equals_F"] = block_sum == cfg.area_F;
  return rep;
}

namespace {

struct OrderAgg {
  std::size_t checked = 0, identity_mismatch = 0, equality = 0;
  Scalar min_abs, max_abs;
};

}  // namespace

LemmaReport verify_average_lemma(const Configuration& cfg, std::size_t exhaustive_cap, std::size_t per_order,
                                 std::uint64_t seed) {
  LemmaReport rep;
  rep.title = "average over B(theta)";
  const int n = cfg.n();
  const Scalar Bn = cfg.block_area(n);
  std::vector<OrderAgg> agg(n + 1);
  auto visit = [&](const ThetaIndex& t) {
    Rect r = rect_of_theta(cfg, t);
    OrderAgg& a = agg[t.order];
    Scalar avg;
    if (t.order < n) {
      Scalar I = integral_h(cfg, r);
      if (abs_of(I) != n * Bn / Scalar(cfg.q_product(t.order, n - 1))) ++a.identity_mismatch;
      avg = abs_of(I) / r.area();
    } else {
      avg = integral_abs_h(cfg, r) / r.area();
      rep.extra["top_signed_average"] = to_string(integral_h(cfg, r) / r.area());
    }
    if (a.checked == 0) a.min_abs = a.max_abs = avg;
    a.min_abs = min_of(a.min_abs, avg);
    a.max_abs = max_of(a.max_abs, avg);
    if (avg == n) ++a.equality;
    ++a.checked;
  };
  const bool exhaustive = theta_count(cfg.q) <= exhaustive_cap;
  if (exhaustive) {
    for (const auto& t : enumerate_theta(cfg.q, exhaustive_cap)) visit(t);
  } else {
    for (int order = 1; order <= n; ++order) {
      ThetaIndex t;
      t.theta.assign(n, 0);
      t.order = order;
      if (order == n) {
        visit(t);
        continue;
      }
      for (int j = order; j < n; ++j) t.theta[j] = 1;
      visit(t);
      for (int j = order; j < n; ++j) t.theta[j] = cfg.q[j];
      visit(t);
      for (std::size_t s = 0; s < per_order; ++s) {
        auto rng = make_rng(seed, s, static_cast<std::uint64_t>(order));
        for (int j = order; j < n; ++j) t.theta[j] = random_below(cfg.q[j], rng) + 1;
        visit(t);
      }
    }
  }
  std::size_t equal_total = 0;
  for (int order = 1; order <= n; ++order) {
    const OrderAgg& a = agg[order];
    const std::string tag = idx("order", order);
    rep.add(tag + ".min_abs_avg", Scalar(n), Rel::LE, a.min_abs, order == n ? "average of |h|" : "");
    rep.add(tag + ".max_abs_avg", a.max_abs, Rel::LE, n * product_bound(cfg, order));
    if (order < n) rep.add(tag + ".identity_mismatches", Scalar(static_cast<long>(a.identity_mismatch)), Rel::EQ, Scalar(0));
    rep.extra[tag + ".checked"] = a.checked;
    equal_total += order < n ? a.equality : 0;
  }
  rep.extra["exhaustive"] = exhaustive;
  rep.extra["theta_count"] = theta_count(cfg.q).get_str();
  // The witness property asks for a strict "> n"; equality cases are counted here.
  rep.extra["equal_to_n"] = equal_total;
  return rep;
}

LemmaReport verify_norms(const Configuration& cfg) {
  LemmaReport rep;
  rep.title = "norm identities";
  const int n = cfg.n();
  const Scalar Bn = cfg.block_area(n);
  const Scalar L1 = l1_norm_h(cfg);
  const Scalar nn = Scalar(n, n - 1);
  rep.add("l1_norm", L1, Rel::EQ, n * Bn);
  rep.add("norm_over_F.lower", nn / cfg.K_E, Rel::LE, L1 / cfg.area_F);
  rep.add("norm_over_F.upper", L1 / cfg.area_F, Rel::LE, cfg.K_E * cfg.K_F * nn);
  rep.add("norm_over_E.lower", Scalar(1), Rel::LE, L1 / cfg.area_E);
  rep.add("norm_over_E.upper", L1 / cfg.area_E, Rel::LE, cfg.K_E);
  Scalar expected_total = mpz_even_p(cfg.q[n - 1].get_mpz_t()) ? Scalar(0) : n * Bn / Scalar(cfg.q_product(1, n - 1));
  rep.add("total_integral", total_integral_h(cfg), Rel::EQ, expected_total);
  if (theta_count(cfg.q) <= 4096) {
    StepFunction2D h = explicit_h(cfg);
    rep.add("explicit.l1_norm", h.l1_norm(), Rel::EQ, L1);
    rep.add("explicit.total", h.total(), Rel::EQ, expected_total);
  }
  // doubled-norm constants: norm taken as 2 n |B_n|
  const Scalar doubled = 2 * n * Bn;
  auto variant = [&](const char* name, const Scalar& lo, const Scalar& v, const Scalar& hi) {
    rep.extra[std::string("doubled.") + name] = {{"lower", to_string(lo)}, {"value_doubled_norm", to_string(v)},
                                               {"upper", to_string(hi)}, {"holds", lo <= v && v <= hi},
                                               {"holds_with_computed_norm", lo <= v / 2 && v / 2 <= hi}};
  };
  variant("norm_over_E", Scalar(2), doubled / cfg.area_E, 2 * cfg.K_E);
  variant("norm_over_F", 2 * nn / cfg.K_E, doubled / cfg.area_F, 2 * cfg.K_E * cfg.K_F * nn);
  rep.extra["computed_norm"] = to_string(L1);
  rep.extra["doubled_norm"] = to_string(doubled);
  return rep;
}

namespace {

struct CaseClass {
  int kase = 0;  // 1..4
  int r = 0;     // Case 2 index
  bool first = false;  // sub-case i
  std::string label() const {
    std::string s = "case" + std::to_string(kase);
    if (kase == 2) s += "[" + std::to_string(r) + "]";
    if (kase != 1) s += first ? "-i" : "-ii";
    return s;
  }
};

CaseClass classify(const BSequence& b, const Scalar& x, const Scalar& y) {
  const int n = b.n;
  CaseClass c;
  if (x <= b.at(n + 1)) {
    c.kase = 1;
  } else if (x <= b.at(n)) {
    c.kase = 4;
    c.first = y > b.at(n + 1);
  } else if (x > b.at(1)) {
    c.kase = 3;
    c.first = y > b.at(2 * n);
  } else {
    c.kase = 2;
    for (int r = 1; r < n; ++r)
      if (b.at(r + 1) < x && x <= b.at(r)) c.r = r;
    c.first = y > b.at(2 * n - c.r);
  }
  return c;
}

}  // namespace

LemmaReport verify_case_bounds(const Configuration& cfg, std::size_t samples, std::uint64_t seed) {
  LemmaReport rep;
  rep.title = "C-rectangle averages off the exceptional cover";
  const int n = cfg.n();
  const auto& sides = cfg.C.materialized();
  auto b = [&](int k) -> const Scalar& { return cfg.b.at(k); };
  std::map<std::string, CaseStats> stats;
  std::size_t accepted = 0, attempts = 0, violations = 0, majorant_checks = 0, majorant_violations = 0;
  Scalar worst = 0;
  nlohmann::json witness;
  const std::size_t max_attempts = samples * 64;
  for (; accepted < samples && attempts < max_attempts; ++attempts) {
    auto rng = make_rng(seed, attempts, 1);
    const Scalar& x = pick(sides, rng);
    const Scalar& y = pick(sides, rng);
    std::vector<mpz_class> path;
    for (std::size_t lv = cfg.support_y.levels(); lv-- > 0;) path.push_back(random_below(cfg.support_y.count(lv), rng));
    const bool aligned = rng() & 1;
    if (aligned) {
      // start A at the corner of an enclosing block
      std::size_t keep = std::uniform_int_distribution<std::size_t>(0, path.size())(rng);
      for (std::size_t i = keep; i < path.size(); ++i) path[i] = 0;
    }
    Scalar p = cfg.support_y.offset_of(path);
    Scalar tx = aligned ? Scalar(0) : random_between(0, min_of(cfg.tau, 1 - x), rng);
    Scalar ylo = max_of(Scalar(0), p - y), yhi = min_of(p + cfg.tau, 1 - y);
    if (ylo > yhi) continue;
    Scalar ty = aligned ? min_of(p, 1 - y) : random_between(ylo, yhi, rng);
    Rect A{tx, tx + x, ty, ty + y};
    PointZ z{random_between(A.x0, A.x1, rng), random_between(A.y0, A.y1, rng)};
    CaseClass cc = classify(cfg.b, x, y);
    CaseStats& st = stats[cc.label()];
    ++st.drawn;
    if (in_d_hat(cfg, z)) continue;
    ++st.accepted;
    ++accepted;
    Scalar avg = abs_of(average_h(cfg, A));
    st.max_abs_avg = max_of(st.max_abs_avg, avg);
    worst = max_of(worst, avg);
    if (avg > 1) {
      if (violations++ == 0) witness = {{"rect", to_json(A)}, {"z", to_json(z)}, {"abs_average", to_string(avg)}};
    }
    auto majorant = [&](const Scalar& m) {
      ++majorant_checks;
      if (avg > m) ++majorant_violations;
    };
    if (cc.first && (cc.kase == 2 || cc.kase == 3)) {
      const int r = cc.kase == 2 ? cc.r : 0;
      mpz_class pc = floor_of(y / b(2 * n - r));
      const Scalar ratio = cc.kase == 2 ? b(r + 1) / gap(cfg.C, b(r + 1)).x_under : b(1) / x;
      if (pc >= 1)
        majorant(n * Scalar(pc + 2) / Scalar(pc) * ratio * product_bound(cfg, r + 1));
      else
        majorant(2 * n * ratio * (b(2 * n - r) / gap(cfg.C, b(2 * n - r)).x_under) * product_bound(cfg, r + 1));
    }
    if (cc.first && cc.kase == 4) {
      majorant(4 * n * b(n + 2) / (x * y));
      majorant(4 * n * b(n + 2) / (b(n + 1) * b(n + 1)));
    }
  }
  rep.add("anchored.samples", Scalar(static_cast<long>(accepted)), Rel::EQ, Scalar(static_cast<long>(samples)));
  rep.add("anchored.max_abs_avg", worst, Rel::LE, Scalar(1));
  rep.add("anchored.violations", Scalar(static_cast<long>(violations)), Rel::EQ, Scalar(0));
  rep.add("majorant.violations", Scalar(static_cast<long>(majorant_violations)), Rel::EQ, Scalar(0));
  rep.add("case4i.bound_below_one", 4 * n * b(n + 2) / (b(n + 1) * b(n + 1)), Rel::LT, Scalar(1));

  // literal reading: C-rectangles disjoint from the cover
  std::size_t disjoint = 0, nonzero = 0, literal_violations = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    auto rng = make_rng(seed, i, 2);
    const Scalar& x = pick(sides, rng);
    const Scalar& y = pick(sides, rng);
    Scalar tx = random_between(0, 1 - x, rng), ty = random_between(0, 1 - y, rng);
    Rect A{tx, tx + x, ty, ty + y};
    if (meets_d_hat(cfg, A)) continue;
    ++disjoint;
    Scalar avg = abs_of(average_h(cfg, A));
    if (avg != 0) ++nonzero;
    if (avg > 1) ++literal_violations;
  }
  rep.add("disjoint.violations", Scalar(static_cast<long>(literal_violations)), Rel::EQ, Scalar(0));

  nlohmann::json per_case = nlohmann::json::object();
  for (const auto& [label, st] : stats)
    per_case[label] = {{"drawn", st.drawn}, {"accepted", st.accepted}, {"max_abs_avg", to_string(st.max_abs_avg)}};
  rep.extra["per_case"] = per_case;
  rep.extra["attempts"] = attempts;
  rep.extra["majorant_checks"] = majorant_checks;
  rep.extra["disjoint_samples"] = disjoint;
  rep.extra["disjoint_nonzero_averages"] = nonzero;
  if (!witness.is_null()) rep.extra["first_violation"] = witness;
  return rep;
}

LemmaReport verify_exceptional_and_large(const Configuration& cfg) {
  LemmaReport rep;
  rep.title = "exceptional set and large rectangles";
  const int n = cfg.n();
  const Scalar Bn = cfg.block_area(n);
  if (cfg.mode == PairMode::Full) {
    rep.add("d_hat.area", cfg.area_d_hat, Rel::LE, cfg.eps * cfg.area_F);
  } else {
    rep.extra["d_hat"] = "exempt (relaxed mode)";
  }
  rep.extra["d_hat_area"] = to_string(cfg.area_d_hat);
  rep.extra["d_hat_over_F"] = to_string(cfg.area_d_hat / cfg.area_F);
  Scalar extremal = l1_norm_h(cfg) / (4 * n * Bn);
  rep.add("large.extremal_value", extremal, Rel::EQ, Scalar(1, 4));
  rep.add("large.extremal_below_half", extremal, Rel::LT, Scalar(1, 2));
  rep.extra["large.doubled_norm_extremal"] = to_string(2 * n * Bn / (4 * n * Bn));
  rep.add("cond4.delta", cfg.delta, Rel::GT, 4 * n * cfg.b.at(n) * cfg.b.at(n + 1));
  rep.add("eta.positive", cfg.eta, Rel::GT, Scalar(0));
  rep.add("eta.below_delta", cfg.eta, Rel::LT, cfg.delta);
  return rep;
}

LemmaReport verify_large_rectangles(const Configuration& cfg, std::size_t samples, std::uint64_t seed) {
  LemmaReport rep;
  rep.title = "rectangles of area > delta";
  const Scalar L1 = l1_norm_h(cfg);
  Scalar worst = 0;
  std::size_t violations = 0, drawn = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    auto rng = make_rng(seed, i, 3);
    Scalar y, x;
    do {
      y = random_between(cfg.delta, 1, rng);
      x = random_between(cfg.delta / y, 1, rng);
    } while (x * y <= cfg.delta);
    Scalar x0 = (rng() & 1) ? Scalar(0) : random_between(0, 1 - x, rng);
    Scalar y0 = random_between(0, 1 - y, rng);
    Rect R{x0, x0 + x, y0, y0 + y};
    ++drawn;
    Scalar avg = abs_of(average_h(cfg, R));
    if (avg > L1 / R.area()) ++violations;  // identity bound
    if (!(avg < Scalar(1, 2))) ++violations;
    worst = max_of(worst, avg);
  }
  rep.add("samples", Scalar(static_cast<long>(drawn)), Rel::EQ, Scalar(static_cast<long>(samples)));
  rep.add("max_abs_avg", worst, Rel::LT, Scalar(1, 2));
  rep.add("violations", Scalar(static_cast<long>(violations)), Rel::EQ, Scalar(0));
  return rep;
}

nlohmann::json to_json(const Configuration& cfg, std::size_t explicit_cap) {
  nlohmann::json j;
  j["n"] = cfg.n();
  j["mode"] = cfg.mode == PairMode::Full ? "full" : "relaxed-demo";
  j["lambda"] = to_string(cfg.b.lambda);
  for (const auto& v : cfg.b.b) j["b"].push_back(to_string(v));
  j["q"] = nlohmann::json::array();
  for (int i = 1; i < cfg.n(); ++i) j["q"].push_back(cfg.q[i].get_str());
  j["tau"] = to_string(cfg.tau);
  j["eps"] = to_string(cfg.eps);
  j["delta"] = to_string(cfg.delta);
  j["h_value"] = to_string(cfg.value);
  j["K_E"] = to_string(cfg.K_E);
  j["K_F"] = to_string(cfg.K_F);
  j["eta"] = to_string(cfg.eta);
  j["area_E"] = to_string(cfg.area_E);
  j["area_F"] = to_string(cfg.area_F);
  j["area_D_hat"] = to_string(cfg.area_d_hat);
  nlohmann::json levels = nlohmann::json::array();
  for (std::size_t i = 0; i < cfg.support_y.levels(); ++i)
    levels.push_back({{"count", cfg.support_y.count(i).get_str()}, {"step", to_string(cfg.support_y.step(i))}});
  j["h_support"] = {{"x", {"0/1", to_string(cfg.tau)}}, {"y_lattice", levels}};
  nlohmann::json regions = nlohmann::json::array();
  for (const auto& r : cfg.d_hat)
    regions.push_back({{"class", r.label},
                       {"x_max", to_string(r.x_max)},
                       {"w_max", to_string(r.w_max)},
                       {"x_extent", to_string(r.x_extent)},
                       {"y_lo", to_string(r.y_set.lo())},
                       {"y_measure_in_unit", to_string(r.y_set.measure_within(0, 1))}});
  j["D_hat_regions"] = regions;
  if (theta_count(cfg.q) <= explicit_cap) {
    j["h_cells"] = to_json(explicit_h(cfg, explicit_cap));
    j["D_hat_cells"] = to_json(explicit_d_hat(cfg, explicit_cap));
  }
  return j;
}

}  // namespace rdiff
