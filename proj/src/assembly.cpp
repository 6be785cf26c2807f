#include "rdiff/assembly.hpp"

#include "rdiff/rng.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace rdiff {

namespace {

using fixed::FixRect;
using fixed::u128;

// Quadtree over a square with coordinates of type T (u128 fixed units or Scalar).
template <class T>
struct QuadTiler {
  struct Box {
    T x0, x1, y0, y1;
  };
  std::vector<Box> obstacles;
  std::vector<bool> may_emit;  // per depth: node side < max_side
  int depth_cap = 0;
  std::vector<Box> out;
  std::function<T(const T&)> half;

  void run(const T& x0, const T& y0, const T& side, int depth, const std::vector<std::size_t>& live) {
    std::vector<std::size_t> hit;
    const T x1 = x0 + side, y1 = y0 + side;
    for (auto i : live) {
      const Box& o = obstacles[i];
      if (o.x0 < x1 && x0 < o.x1 && o.y0 < y1 && y0 < o.y1) {
        if (o.x0 <= x0 && x1 <= o.x1 && o.y0 <= y0 && y1 <= o.y1) return;  // blocked
        hit.push_back(i);
      }
    }
    if (hit.empty() && may_emit[depth]) {
      out.push_back({x0, x1, y0, y1});
      return;
    }
    if (depth == depth_cap) return;
    const T h = half(side);
    run(x0, y0, h, depth + 1, hit.empty() ? live : hit);
    run(x0 + h, y0, h, depth + 1, hit.empty() ? live : hit);
    run(x0, y0 + h, h, depth + 1, hit.empty() ? live : hit);
    run(x0 + h, y0 + h, h, depth + 1, hit.empty() ? live : hit);
  }
};

bool all_fixed(const Rect& bounds, const std::vector<Rect>& obstacles, int max_depth) {
  FixRect f;
  if (!fixed::to_fixed(bounds, f)) return false;
  const Scalar side = bounds.height();
  if (!is_dyadic(side) || floor_log2(side) + fixed::kFixBits < max_depth) return false;
  for (const auto& o : obstacles) {
    Rect c{max_of(o.x0, bounds.x0), min_of(o.x1, bounds.x1), max_of(o.y0, bounds.y0), min_of(o.y1, bounds.y1)};
    if (c.x0 < c.x1 && c.y0 < c.y1 && !fixed::to_fixed(c, f)) return false;
  }
  return true;
}

std::vector<Rect> quad_squares(const Rect& bounds, const std::vector<Rect>& obstacles, const Scalar& max_side,
                               int depth) {
  std::vector<Rect> squares;
  std::vector<bool> emit;
  for (int d = 0; d <= depth; ++d) emit.push_back(bounds.height() / pow2(d) < max_side);
  if (all_fixed(bounds, obstacles, depth)) {
    QuadTiler<u128> q;
    q.half = [](const u128& v) { return v >> 1; };
    for (const auto& o : obstacles) {
      Rect c{max_of(o.x0, bounds.x0), min_of(o.x1, bounds.x1), max_of(o.y0, bounds.y0), min_of(o.y1, bounds.y1)};
      FixRect f;
      if (c.x0 < c.x1 && c.y0 < c.y1 && fixed::to_fixed(c, f)) q.obstacles.push_back({f.x0, f.x1, f.y0, f.y1});
    }
    FixRect b;
    fixed::to_fixed(bounds, b);
    q.may_emit = emit;
    q.depth_cap = depth;
    std::vector<std::size_t> live(q.obstacles.size());
    for (std::size_t i = 0; i < live.size(); ++i) live[i] = i;
    q.run(b.x0, b.y0, b.x1 - b.x0, 0, live);
    squares.reserve(q.out.size());
    for (const auto& s : q.out) squares.push_back(fixed::to_rect(FixRect{s.x0, s.x1, s.y0, s.y1}));
  } else {
    QuadTiler<Scalar> q;
    q.half = [](const Scalar& v) { return Scalar(v / 2); };
    for (const auto& o : obstacles) q.obstacles.push_back({o.x0, o.x1, o.y0, o.y1});
    q.may_emit = emit;
    q.depth_cap = depth;
    std::vector<std::size_t> live(q.obstacles.size());
    for (std::size_t i = 0; i < live.size(); ++i) live[i] = i;
    q.run(bounds.x0, bounds.y0, bounds.height(), 0, live);
    for (const auto& s : q.out) squares.push_back(Rect{s.x0, s.x1, s.y0, s.y1});
  }
  return squares;
}

Scalar pow_int(const Scalar& v, int k) { return pow_of(v, static_cast<unsigned long>(k)); }

}  // namespace

Tiling tile_free(const Rect& bounds, const std::vector<Rect>& obstacles, const Scalar& free_area, const Scalar& eps_k,
                 const Scalar& max_side, int max_depth) {
  if (bounds.height() != bounds.width()) throw std::invalid_argument("tiling bounds must be a square");
  for (int d = 0; d <= max_depth; ++d) {
    Tiling t;
    t.squares = quad_squares(bounds, obstacles, max_side, d);
    t.free_area = free_area;
    Scalar covered = 0;
    for (const auto& s : t.squares) covered += s.area();
    if (!t.squares.empty()) {
      t.min_side = t.squares.front().height();
      for (const auto& s : t.squares) t.min_side = min_of(t.min_side, s.height());
    }
    t.waste = free_area - covered;
    t.depth = d;
    if (t.waste < eps_k) return t;
  }
  throw std::runtime_error("tiling waste stays above the budget at depth " + std::to_string(max_depth));
}

Tiling tile_residual(const RectUnion& Y, const Scalar& eps_k, const Scalar& max_side, int max_depth) {
  if (Y.empty()) {
    Tiling t;
    t.free_area = 0;
    t.waste = 0;
    if (!(t.waste < eps_k)) throw std::invalid_argument("eps_k must be positive");
    return t;
  }
  Scalar x0 = Y.cells().front().x0, x1 = x0, y0 = Y.cells().front().y0, y1 = y0;
  for (const auto& c : Y.cells()) {
    x0 = min_of(x0, c.x0);
    x1 = max_of(x1, c.x1);
    y0 = min_of(y0, c.y0);
    y1 = max_of(y1, c.y1);
  }
  Scalar side = max_of(x1 - x0, y1 - y0);
  Rect bounds{x0, x0 + side, y0, y0 + side};
  RectUnion obstacles = subtract(RectUnion::of({bounds}), Y);
  return tile_free(bounds, obstacles.cells(), area_union(Y), eps_k, max_side, max_depth);
}

int stop_stage(const Scalar& chi, const Scalar& bound, int cap) {
  if (chi <= 0 || chi >= 1) throw std::domain_error("chi must lie in (0,1)");
  Scalar p = 1;
  for (int k = 0; k <= cap; ++k) {
    if (p < bound) return k;
    p *= 1 - chi;
  }
  throw std::runtime_error("stop stage beyond cap");
}

namespace {

mpz_class scaled_int(const Scalar& v, unsigned bits) {
  Scalar s = v * Scalar(mpz_class(1) << bits);
  if (s.get_den() != 1) throw std::runtime_error("edge coordinate finer than the vertical-gap grid");
  return s.get_num();
}

// Horizontal support edges of stage 0 and stage 1 as integers in units of
// 2^-B; true when all are distinct.
bool vertical_gap(const TranslationKernel& k, const OmegaTuple& omega, const std::vector<Rect>& hosts,
                  const std::vector<Scalar>& shifts, int grid_bits, std::size_t& edges) {
  const unsigned B = static_cast<unsigned>(grid_bits);
  std::vector<mpz_class> base;
  for (const auto& w : omega.omegas) {
    base.push_back(scaled_int(w.dx, B));
    base.push_back(scaled_int(w.dx + k.tau, B));
  }
  std::vector<u128> vals;
  vals.reserve(base.size() * (1 + hosts.size()));
  for (const auto& e : base) vals.push_back(to_u128(e));
  for (std::size_t t = 0; t < hosts.size(); ++t) {
    const Scalar& a = hosts[t].height();
    mpz_class origin = scaled_int(hosts[t].x0, B);
    mpz_class shift = scaled_int(a * shifts[t], B);
    const long l = -floor_log2(a);
    for (const auto& e : base) {
      mpz_class v = origin + (e >> static_cast<unsigned long>(l)) + shift;
      vals.push_back(to_u128(v));
    }
  }
  edges = vals.size();
  std::sort(vals.begin(), vals.end());
  return std::adjacent_find(vals.begin(), vals.end()) == vals.end();
}

// ||h_0* + h_1*||_1; the supports are disjoint so the norms add.
Scalar exhaustion_l1(const Exhaustion& ex) {
  Scalar fourth = 1;
  for (const auto& s : ex.stage1_squares) {
    Scalar a2 = s.area();
    fourth += a2 * a2;
  }
  return ex.kernel_q * ex.kernel.h0.l1_norm() * fourth;
}

}  // namespace

Exhaustion exhaust(const TranslationKernel& k, const OmegaTuple& omega, const Scalar& chi, const Scalar& eps,
                   int max_stages) {
  if (chi <= 0) throw std::domain_error("chi must be positive");
  Exhaustion ex;
  ex.eps = eps;
  ex.chi = chi;
  ex.omega = omega;
  ex.kernel = assemble_h0(k, omega);
  LemmaReport& rep = ex.report;
  rep.title = "exhaustion";

  // unit kernel: Q0, D0 and the residual tiling
  std::vector<Rect> obstacles, d_pieces;
  for (const auto& w : omega.omegas) {
    for (const auto& c : k.F.cells())
      for (auto& p : torus_pieces(c, w)) obstacles.push_back(std::move(p));
    for (const auto& c : k.D_hat.cells())
      for (auto& p : torus_pieces(c, w)) d_pieces.push_back(p);
  }
  obstacles.insert(obstacles.end(), d_pieces.begin(), d_pieces.end());
  const Scalar margin = pow2(-64);
  obstacles.push_back(Rect{1 - margin, 1, 0, 1});  // room for the stage shifts
  std::vector<FixRect> fx;
  for (const auto& o : obstacles) {
    FixRect f;
    if (!fixed::to_fixed(o, f)) throw std::invalid_argument("kernel is not representable in the fixed-point engine");
    fx.push_back(f);
  }
  const Scalar blocked = fixed::union_area(fx);
  const Scalar q = area_union(ex.kernel.Q0);
  std::vector<FixRect> dfx;
  for (const auto& o : d_pieces) {
    FixRect f;
    fixed::to_fixed(o, f);
    dfx.push_back(f);
  }
  const Scalar d = fixed::union_area(dfx);
  ex.kernel_q = q;
  const Scalar eps0 = eps / 8;
  ex.unit_tiling = tile_free(unit_square(), obstacles, 1 - blocked, eps0 - margin, 1);
  Scalar t = 0;
  for (const auto& s : ex.unit_tiling.squares) t += s.area();
  ex.kernel_tiles = t;
  const Scalar w = 1 - q - d - t;  // unit waste, margin slab included

  ex.stop_stage = stop_stage(chi, eps / 2);
  const int S = std::min(ex.stop_stage, max_stages);
  rep.add("kernel.Q_gt_chi", q, Rel::GT, chi);
  rep.add("stop_stage.within_max", Scalar(ex.stop_stage), Rel::LE, Scalar(max_stages));

  Scalar X = 1, Qsum = 0, eps_sum = 0, lost = 0;
  mpz_class hosts = 1;
  for (int k_ = 0; k_ < S; ++k_) {
    StageRecord r;
    r.k = k_;
    r.X = X;
    r.Q = q * X;
    r.D = d * X;
    r.Y_next = X * (1 - q - d);
    r.X_next = X * t;
    r.waste = X * w;
    r.eps_k = eps / pow2(k_ + 3);
    r.squares = hosts;
    r.min_side = k_ == 0 ? Scalar(1) : pow_int(ex.unit_tiling.min_side, k_);
    const std::string tag = "stage[" + std::to_string(k_) + "].";
    rep.add(tag + "contraction", r.X_next, Rel::LT, (1 - chi) * r.X);
    rep.add(tag + "Q_gt_chi_X", r.Q, Rel::GT, chi * r.X);
    rep.add(tag + "waste", r.waste, Rel::LT, r.eps_k);
    rep.add(tag + "D", r.D, Rel::LT, r.eps_k);
    rep.add(tag + "X_bound", r.X_next, Rel::LE, pow_int(1 - chi, k_ + 1));
    Qsum += r.Q;
    eps_sum += r.eps_k;
    lost += r.D + r.waste;
    X = r.X_next;
    ex.stages.push_back(r);
    hosts *= static_cast<unsigned long>(ex.unit_tiling.squares.size());
  }
  ex.Q_area = Qsum;
  rep.add("conservation", Qsum + lost + X, Rel::EQ, Scalar(1));
  rep.add("chain", Qsum, Rel::GT, 1 - X - 2 * eps_sum);
  if (S == ex.stop_stage) {
    rep.add("final.Q", Qsum, Rel::GT, 1 - eps);
    rep.add("final.X_below_half_eps", X, Rel::LT, eps / 2);
  }
  rep.extra["stopped_by"] = S == ex.stop_stage ? "chi" : "max_stages";
  rep.extra["stop_rule"] = {{"least_k", ex.stop_stage},
                            {"one_minus_chi_pow_k", to_string(pow_int(1 - chi, ex.stop_stage))},
                            {"previous_power", to_string(pow_int(1 - chi, std::max(0, ex.stop_stage - 1)))},
                            {"half_eps", to_string(eps / 2)}};

  // stage 1 hosts with their x-shifts
  if (S >= 2) {
    ex.stage1_squares = ex.unit_tiling.squares;
    const std::size_t T = ex.stage1_squares.size();
    int J = 1;
    while ((mpz_class(1) << J) <= 2 * T + 1) ++J;
    const int D = ex.unit_tiling.depth;
    const int G = 65 + D + J;
    for (std::size_t i = 0; i < T; ++i) ex.stage1_shift.push_back(Scalar(static_cast<long>(2 * i + 1)) / pow2(G));
    rep.add("shift.below_margin", T ? ex.stage1_shift.back() : Scalar(0), Rel::LT, margin);
    if (G + D <= 127) {
      std::size_t edges = 0;
      rep.add_flag("vertical_gap", vertical_gap(k, omega, ex.stage1_squares, ex.stage1_shift, G + D, edges));
      rep.extra["vertical_gap_edges"] = edges;
    } else {
      rep.add_flag("vertical_gap", false, "grid exceeds 127 bits");
    }
  }
  rep.extra["unit_tiling"] = {{"squares", ex.unit_tiling.squares.size()},
                              {"depth", ex.unit_tiling.depth},
                              {"min_side", to_string(ex.unit_tiling.min_side)},
                              {"area", to_string(t)},
                              {"waste", to_string(w)}};
  rep.extra["materialized_stages"] = std::min(S, 2);
  rep.extra["f_l1"] = to_json(exhaustion_l1(ex));
  return ex;
}

Scalar exhaustion_integral(const Exhaustion& ex, const Rect& r) {
  const Scalar& q = ex.kernel_q;
  Scalar s = q * integral(ex.kernel.h0, r);
  Scalar inside = 0;  // sum of |S|^2 over hosts inside r, each carrying the full integral of h0
  for (std::size_t i = 0; i < ex.stage1_squares.size(); ++i) {
    const Rect& host = ex.stage1_squares[i];
    auto c = intersect(host, r);
    if (!c || c->area() == 0) continue;
    const Scalar a = host.height();
    if (*c == host) {
      const Scalar a2 = host.area();
      inside += a2 * a2;
      continue;
    }
    Rect local{(c->x0 - host.x0) / a, (c->x1 - host.x0) / a, (c->y0 - host.y0) / a, (c->y1 - host.y0) / a};
    Scalar in = 0;
    for (const auto& p : torus_pieces(local, TranslationVector{1 - ex.stage1_shift[i], 0}))
      in += integral(ex.kernel.h0, p);
    s += q * a * a * a * a * in;  // weight |Q_{1,a}| = q a^2, Jacobian a^2
  }
  if (inside != 0) s += q * inside * ex.kernel.h0.total();
  return s;
}

SeriesSchedule series_schedule(int terms, const std::vector<Scalar>& etas, const std::vector<Scalar>& f_sups) {
  if (terms < 1) throw std::invalid_argument("terms must be >= 1");
  SeriesSchedule s;
  std::optional<Scalar> sup_prev = Scalar(0);
  for (int n = 1; n <= terms; ++n) {
    SeriesTerm t;
    t.index = n;
    const std::size_t i = static_cast<std::size_t>(n - 1);
    if (n == 1) {
      t.eps = Scalar(1, 2);
      t.delta = Scalar(1, 2);
      t.a = 1;
    } else {
      t.eps = Scalar(1, static_cast<unsigned long>((n + 1) * (n + 1)));
      const auto& prev = s.terms.back();
      if (prev.eta) t.delta = *prev.eta;
      if (sup_prev) t.a = (2 * *sup_prev + n) * (n * n);
    }
    const bool known = n == 1 || (s.terms.back().eta && sup_prev);
    if (!known) {
      t.delta = 0;
      t.a = 0;
    }
    if (known) {
      Scalar c = t.a;
      mpz_class lvl;
      mpz_cdiv_q(lvl.get_mpz_t(), c.get_num_mpz_t(), c.get_den_mpz_t());
      t.kernel_level = lvl.fits_sint_p() ? static_cast<int>(lvl.get_si()) : -1;
    }
    if (i < etas.size() && known) t.eta = etas[i];
    if (i < f_sups.size() && known) t.f_sup = f_sups[i];
    if (sup_prev && t.f_sup)
      sup_prev = max_of(*sup_prev, *t.f_sup);
    else
      sup_prev.reset();
    s.terms.push_back(t);
  }
  return s;
}


namespace {

struct Host {
  Rect square;
  Scalar shift;
};

Scalar wrap_unit(const Scalar& v) { return v < 0 ? Scalar(v + 1) : v >= 1 ? Scalar(v - 1) : v; }

// Kernel-local pieces carried into the host: shift in x on the torus, then scale.
std::vector<Rect> to_host(const Host& h, const std::vector<Rect>& local) {
  std::vector<Rect> out;
  const Scalar a = h.square.height();
  for (const auto& p : local)
    for (const auto& s : torus_pieces(p, TranslationVector{h.shift, 0}))
      out.push_back(Rect{h.square.x0 + a * s.x0, h.square.x0 + a * s.x1, h.square.y0 + a * s.y0, h.square.y0 + a * s.y1});
  return out;
}

std::string decimal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

DemoReport demo_divergence(int partial_terms, std::size_t z_samples, std::uint64_t seed, int max_stages) {
  if (partial_terms < 1) throw std::invalid_argument("partial_terms must be >= 1");
  if (z_samples == 0) throw std::invalid_argument("z_samples must be >= 1");
  DemoReport d;
  d.partial_terms = partial_terms;
  LemmaReport& rep = d.report;
  rep.title = "divergence demo";

  // term 1
  const Scalar half(1, 2);
  Configuration cfg = build_config(relaxed_demo_pair(), Scalar(1, 128), Scalar(1, 20), half);
  TranslationKernel k = make_kernel(cfg);
  const Scalar chi = chi_threshold(Scalar(1, 20));
  OmegaSearch search = find_omega(k, chi, 10000, seed);
  Exhaustion ex = exhaust(k, search.omega, chi, half, max_stages);
  rep.merge(ex.report, "term[1].");
  Scalar h0_sup = 0;
  for (const auto& t : ex.kernel.h0.terms()) h0_sup = max_of(h0_sup, abs_of(t.weight));
  const Scalar f1_sup = ex.kernel_q * h0_sup;  // stage 1 weights q|S| are smaller
  const Scalar f1_l1 = exhaustion_l1(ex);
  d.schedule = series_schedule(partial_terms, {k.eta}, {f1_sup});
  rep.extra["term1"] = {{"omega_draws", search.draws},
                        {"q", to_json(ex.kernel_q)},
                        {"eta", to_json(k.eta)},
                        {"f_sup", to_json(f1_sup)},
                        {"f_l1", to_json(f1_l1)}};

  // later terms
  for (int n = 2; n <= partial_terms; ++n) {
    const SeriesTerm& t = d.schedule.terms[static_cast<std::size_t>(n - 1)];
    std::string why;
    if (!t.kernel_level) {
      why = "term " + std::to_string(n) + " depends on term " + std::to_string(n - 1) + ", which was not built";
    } else {
      why = "term " + std::to_string(n) + " needs a kernel of level >= " +
            (*t.kernel_level < 0 ? std::string("2^31") : std::to_string(*t.kernel_level)) + " (a = " +
            to_string(t.a) + ")";
      try {
        SidePair p = generate_pair(2, t.eps, t.delta, half);
        Configuration c2 = build_config(p, default_tau(p.b), t.eps, t.delta);
        why += "; already a generated level-2 kernel needs " + translate_count(c2).get_str() + " translates";
      } catch (const std::exception& e) {
        why += "; generating a level-2 pair fails: " + std::string(e.what());
      }
    }
    rep.add_flag("term[" + std::to_string(n) + "].built", false, why);
    if (d.blocked.empty()) d.blocked = why;
  }
  const int built = d.blocked.empty() ? partial_terms : 1;
  const int N = partial_terms;
  const Scalar NN(N);
  d.M_tail = NN;
  d.M_membership = 1;

  // R_C of the demo kernel is the unit square alone
  for (const auto& c : k.C_sides)
    if (c != 1) throw std::logic_error("R_C beyond the unit square needs a materialized f");

  // Q_1 = Q0 plus its copies in the stage-1 hosts
  std::vector<Host> hosts;
  for (std::size_t i = 0; i < ex.stage1_squares.size(); ++i) hosts.push_back({ex.stage1_squares[i], ex.stage1_shift[i]});
  const Scalar q = ex.kernel_q;
  Scalar host_area = 0;
  for (const auto& h : hosts) host_area += h.square.area();
  const Scalar f_total = exhaustion_integral(ex, unit_square());

  Scalar finite = 0;
  for (int n = 1; n <= N; ++n) finite += Scalar(1, static_cast<unsigned long>(n * n));
  const Scalar bound_C = 2 * finite + 4;
  const Scalar bound = NN - Scalar(1) / NN;
  std::size_t over = 0, c_viol = 0, t1_pos = 0;
  Scalar worst_C = 0;
  for (std::size_t s = 0; s < z_samples; ++s) {
    auto rng = make_rng(seed, s, 51);
    DemoRow row;
    const Host* host = nullptr;
    Scalar pick_v = random_unit(rng) * (1 + host_area);
    PointZ local = sample_point(ex.kernel.Q0, q, rng);
    if (pick_v >= 1 && !hosts.empty()) {
      Scalar acc = 1;
      host = &hosts.back();
      for (const auto& h : hosts) {
        acc += h.square.area();
        if (pick_v < acc) {
          host = &h;
          break;
        }
      }
      const Scalar a = host->square.height();
      row.z = PointZ{host->square.x0 + a * wrap_unit(local.x + host->shift), host->square.y0 + a * local.y};
      row.stage = 1;
    } else {
      row.z = local;
    }
    const Scalar scale = host ? host->square.area() : Scalar(1);

    // best term-1 block containing z
    Scalar best = -1;
    for (const auto& w : search.omega.omegas)
      for (const auto& blk : k.blocks) {
        auto pieces = torus_pieces(blk, w);
        if (std::none_of(pieces.begin(), pieces.end(), [&](const Rect& p) { return p.contains(local); })) continue;
        std::vector<Rect> global = host ? to_host(*host, pieces) : pieces;
        Scalar in = 0;
        for (const auto& p : global) in += exhaustion_integral(ex, p);
        Scalar avg = abs_of(in / (blk.area() * scale));
        if (avg > best || (avg == best && global.size() < row.term1_witness.size())) {
          best = avg;
          row.term1_witness = global;
          row.term1_avg = avg;
        }
      }
    if (row.term1_avg > 0) ++t1_pos;
    row.max_avg_C = abs_of(f_total);
    row.bound = bound;
    if (built >= N && N == 1) {
      row.witness = row.term1_witness;
      row.witness_avg_D = row.term1_avg;
    }
    row.pass = row.witness_avg_D && *row.witness_avg_D > bound && row.max_avg_C <= bound_C;
    if (row.pass) ++over;
    if (row.max_avg_C > bound_C) ++c_viol;
    worst_C = max_of(worst_C, row.max_avg_C);

    const std::string zx = to_string(row.z.x), zy = to_string(row.z.y);
    d.curves.push_back(zx + "," + zy + ",C," + decimal(std::sqrt(2.0)) + "," + to_string(row.max_avg_C));
    if (!row.term1_witness.empty()) {
      Scalar wa = 0;
      for (const auto& p : row.term1_witness) wa += p.area();
      const Scalar side_x = row.term1_witness.size() == 1 ? row.term1_witness[0].height() : Scalar(0);
      const Scalar side_y = row.term1_witness.size() == 1 ? row.term1_witness[0].width() : Scalar(0);
      const double diam = side_x > 0 ? std::hypot(to_double(side_x), to_double(side_y)) : std::sqrt(2.0) * std::sqrt(to_double(wa));
      d.curves.push_back(zx + "," + zy + ",D," + decimal(diam) + "," + to_string(row.term1_avg));
    }
    // dyadic squares around z
    for (int j = 0; j <= 10; ++j) {
      const Scalar side = pow2(-j);
      Scalar x0 = side * Scalar(floor_of(row.z.x / side)), y0 = side * Scalar(floor_of(row.z.y / side));
      if (x0 + side > 1) x0 = 1 - side;
      if (y0 + side > 1) y0 = 1 - side;
      Rect sq{x0, x0 + side, y0, y0 + side};
      Scalar avg = abs_of(exhaustion_integral(ex, sq) / sq.area());
      d.curves.push_back(zx + "," + zy + ",square," + decimal(std::sqrt(2.0) * to_double(side)) + "," + to_string(avg));
    }
    d.rows.push_back(std::move(row));
  }

  const Scalar zs(static_cast<long>(z_samples));
  rep.add("term[1].witness_avg_positive", Scalar(static_cast<long>(t1_pos)), Rel::EQ, zs,
          "N = 1: witness average of f_1 above 1 - 1/1 = 0");
  rep.add("rows.witness_gt_bound", Scalar(static_cast<long>(over)), Rel::EQ, zs,
          "R_D witness of term N with |avg(f_<=N, B)| > N - 1/N");
  rep.add("rows.max_avg_C", worst_C, Rel::LE, bound_C, "finite part 2 sum 1/n^2 plus 4");
  rep.add("rows.max_avg_C_violations", Scalar(static_cast<long>(c_viol)), Rel::EQ, Scalar(0));
  if (partial_terms >= 2 && d.schedule.terms[1].kernel_level)
    rep.add("schedule.delta_decreasing", d.schedule.terms[1].delta, Rel::LT, d.schedule.terms[0].delta);
  rep.extra["blocked"] = d.blocked;
  rep.extra["built_terms"] = built;
  rep.extra["rows_sampled_in"] = "Q_1 (later Q_n not built)";
  return d;
}

nlohmann::json to_json(const StageRecord& s) {
  nlohmann::json j = {{"k", s.k},
                      {"X", to_json(s.X)},
                      {"Q", to_json(s.Q)},
                      {"D", to_json(s.D)},
                      {"Y_next", to_json(s.Y_next)},
                      {"X_next", to_json(s.X_next)},
                      {"waste", to_json(s.waste)},
                      {"eps_k", to_json(s.eps_k)},
                      {"squares", s.squares.get_str()}};
  j["min_side"] = s.min_side ? to_json(*s.min_side) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const Exhaustion& ex) {
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& s : ex.stages) stages.push_back(to_json(s));
  return {{"eps", to_json(ex.eps)},
          {"chi", to_json(ex.chi)},
          {"kernel_q", to_json(ex.kernel_q)},
          {"kernel_tiles", to_json(ex.kernel_tiles)},
          {"stop_stage", ex.stop_stage},
          {"stages", stages},
          {"Q_area", to_json(ex.Q_area)},
          {"omega", to_json(ex.omega)},
          {"stage1_hosts", ex.stage1_squares.size()},
          {"report", to_json(ex.report)}};
}

nlohmann::json to_json(const SeriesSchedule& s) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : s.terms) {
    const bool known = t.kernel_level.has_value();
    terms.push_back({{"n", t.index},
                     {"eps", to_json(t.eps)},
                     {"delta", known ? to_json(t.delta) : nlohmann::json(nullptr)},
                     {"a", known ? to_json(t.a) : nlohmann::json(nullptr)},
                     {"eta", t.eta ? to_json(*t.eta) : nlohmann::json(nullptr)},
                     {"f_sup", t.f_sup ? to_json(*t.f_sup) : nlohmann::json(nullptr)},
                     {"kernel_level", known ? nlohmann::json(*t.kernel_level) : nlohmann::json(nullptr)}});
  }
  return {{"terms", terms}};
}

nlohmann::json to_json(const DemoReport& d) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : d.rows) {
    nlohmann::json w = nullptr, t1 = nlohmann::json::array();
    if (r.witness) {
      w = nlohmann::json::array();
      for (const auto& p : *r.witness) w.push_back(to_json(p));
    }
    for (const auto& p : r.term1_witness) t1.push_back(to_json(p));
    rows.push_back({{"z", to_json(r.z)},
                    {"stage", r.stage},
                    {"max_avg_C", to_json(r.max_avg_C)},
                    {"witness_rect", w},
                    {"witness_avg_D", r.witness_avg_D ? to_json(*r.witness_avg_D) : nlohmann::json(nullptr)},
                    {"bound_N_minus_1_over_N", to_json(r.bound)},
                    {"pass", r.pass},
                    {"term1_witness", t1},
                    {"term1_avg", to_json(r.term1_avg)}});
  }
  return {{"partial_terms", d.partial_terms},
          {"schedule", to_json(d.schedule)},
          {"rows", rows},
          {"blocked", d.blocked.empty() ? nlohmann::json(nullptr) : nlohmann::json(d.blocked)},
          {"M_tail", to_json(d.M_tail)},
          {"M_membership", to_json(d.M_membership)},
          {"report", to_json(d.report)}};
}

}  // namespace rdiff
