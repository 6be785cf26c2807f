#include "rdiff/geometry.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

namespace rdiff {

bool operator<(const Rect& a, const Rect& b) {
  if (a.x0 != b.x0) return a.x0 < b.x0;
  if (a.y0 != b.y0) return a.y0 < b.y0;
  if (a.x1 != b.x1) return a.x1 < b.x1;
  return a.y1 < b.y1;
}

bool in_unit_square(const Rect& r) {
  return 0 <= r.x0 && r.x0 < r.x1 && r.x1 <= 1 && 0 <= r.y0 && r.y0 < r.y1 && r.y1 <= 1;
}

Rect make_rect(Scalar x0, Scalar x1, Scalar y0, Scalar y1) {
  Rect r{std::move(x0), std::move(x1), std::move(y0), std::move(y1)};
  if (!in_unit_square(r)) throw std::invalid_argument("rectangle outside the unit square or degenerate");
  return r;
}

Rect unit_square() { return Rect{Scalar(0), Scalar(1), Scalar(0), Scalar(1)}; }

std::optional<Rect> intersect(const Rect& a, const Rect& b) {
  Rect r{max_of(a.x0, b.x0), min_of(a.x1, b.x1), max_of(a.y0, b.y0), min_of(a.y1, b.y1)};
  if (r.x0 >= r.x1 || r.y0 >= r.y1) return std::nullopt;
  return r;
}

namespace {

struct Interval {
  Scalar lo, hi;
  friend bool operator==(const Interval& a, const Interval& b) { return a.lo == b.lo && a.hi == b.hi; }
};
using Intervals = std::vector<Interval>;

Intervals merge(Intervals v) {
  std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  Intervals out;
  for (auto& iv : v) {
    if (iv.lo >= iv.hi) continue;
    if (!out.empty() && iv.lo <= out.back().hi) {
      if (iv.hi > out.back().hi) out.back().hi = iv.hi;
    } else {
      out.push_back(std::move(iv));
    }
  }
  return out;
}

Intervals subtract(const Intervals& a, const Intervals& b) {
  Intervals out;
  std::size_t j = 0;
  for (const auto& iv : a) {
    Scalar cur = iv.lo;
    while (j < b.size() && b[j].hi <= cur) ++j;
    std::size_t k = j;
    while (k < b.size() && b[k].lo < iv.hi) {
      if (b[k].lo > cur) out.push_back({cur, b[k].lo});
      if (b[k].hi > cur) cur = b[k].hi;
      ++k;
    }
    if (cur < iv.hi) out.push_back({cur, iv.hi});
  }
  return out;
}

Intervals intersect(const Intervals& a, const Intervals& b) {
  Intervals out;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    Scalar lo = max_of(a[i].lo, b[j].lo);
    Scalar hi = min_of(a[i].hi, b[j].hi);
    if (lo < hi) out.push_back({lo, hi});
    if (a[i].hi < b[j].hi) ++i; else ++j;
  }
  return out;
}

Scalar length(const Intervals& v) {
  Scalar s = 0;
  for (const auto& iv : v) s += iv.hi - iv.lo;
  return s;
}

std::vector<Scalar> x_grid(const std::vector<Rect>& a, const std::vector<Rect>* b = nullptr) {
  std::vector<Scalar> xs;
  xs.reserve(2 * (a.size() + (b ? b->size() : 0)));
  for (const auto& r : a) {
    xs.push_back(r.x0);
    xs.push_back(r.x1);
  }
  if (b)
    for (const auto& r : *b) {
      xs.push_back(r.x0);
      xs.push_back(r.x1);
    }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

// Merged y-cross-section of `rects` on each slab [xs[i], xs[i+1]].
std::vector<Intervals> cross_sections(const std::vector<Rect>& rects, const std::vector<Scalar>& xs) {
  std::vector<Intervals> out(xs.empty() ? 0 : xs.size() - 1);
  std::vector<std::size_t> order(rects.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rects[a].x0 < rects[b].x0; });
  std::vector<std::size_t> active;
  std::size_t next = 0;
  for (std::size_t s = 0; s < out.size(); ++s) {
    const Scalar& xa = xs[s];
    while (next < order.size() && rects[order[next]].x0 <= xa) active.push_back(order[next++]);
    std::erase_if(active, [&](std::size_t i) { return rects[i].x1 <= xa; });
    Intervals iv;
    iv.reserve(active.size());
    for (auto i : active) iv.push_back({rects[i].y0, rects[i].y1});
    out[s] = merge(std::move(iv));
  }
  return out;
}

std::vector<Rect> assemble(const std::vector<Scalar>& xs, const std::vector<Intervals>& slabs) {
  std::vector<Rect> cells;
  std::size_t s = 0;
  while (s < slabs.size()) {
    if (slabs[s].empty()) {
      ++s;
      continue;
    }
    std::size_t e = s + 1;
    while (e < slabs.size() && slabs[e] == slabs[s]) ++e;
    for (const auto& iv : slabs[s]) cells.push_back(Rect{xs[s], xs[e], iv.lo, iv.hi});
    s = e;
  }
  std::sort(cells.begin(), cells.end());
  return cells;
}

template <class Op>
RectUnion combine(const RectUnion& a, const RectUnion& b, Op op) {
  auto xs = x_grid(a.cells(), &b.cells());
  auto sa = cross_sections(a.cells(), xs);
  auto sb = cross_sections(b.cells(), xs);
  std::vector<Intervals> sc(sa.size());
  for (std::size_t i = 0; i < sa.size(); ++i) sc[i] = op(sa[i], sb[i]);
  std::vector<Rect> cells = assemble(xs, sc);
  return RectUnion::of(cells);
}

}  // namespace

RectUnion RectUnion::of(const std::vector<Rect>& rects) {
  std::vector<Rect> valid;
  valid.reserve(rects.size());
  for (const auto& r : rects)
    if (r.x0 < r.x1 && r.y0 < r.y1) valid.push_back(r);
  auto xs = x_grid(valid);
  RectUnion u;
  u.cells_ = assemble(xs, cross_sections(valid, xs));
  return u;
}

bool RectUnion::contains(const PointZ& z) const {
  for (const auto& c : cells_)
    if (c.contains(z)) return true;
  return false;
}

Scalar area_union(const RectUnion& u) {
  Scalar s = 0;
  for (const auto& c : u.cells()) s += c.area();
  return s;
}

Scalar area_union(const std::vector<Rect>& rects) {
  auto xs = x_grid(rects);
  auto slabs = cross_sections(rects, xs);
  Scalar s = 0;
  for (std::size_t i = 0; i < slabs.size(); ++i) s += (xs[i + 1] - xs[i]) * length(slabs[i]);
  return s;
}

RectUnion unite(const RectUnion& a, const RectUnion& b) {
  auto all = a.cells();
  all.insert(all.end(), b.cells().begin(), b.cells().end());
  return RectUnion::of(all);
}

RectUnion subtract(const RectUnion& a, const RectUnion& b) {
  return combine(a, b, [](const Intervals& x, const Intervals& y) { return subtract(x, y); });
}

RectUnion intersect(const RectUnion& a, const RectUnion& b) {
  return combine(a, b, [](const Intervals& x, const Intervals& y) { return intersect(x, y); });
}

Scalar area_within(const RectUnion& u, const Rect& r) {
  Scalar s = 0;
  for (const auto& c : u.cells())
    if (auto i = intersect(c, r)) s += i->area();
  return s;
}

StepFunction2D StepFunction2D::of(std::vector<WeightedCell> terms) {
  std::erase_if(terms, [](const WeightedCell& t) { return t.weight == 0; });
  std::vector<Rect> rects;
  rects.reserve(terms.size());
  Scalar sum = 0;
  for (const auto& t : terms) {
    if (!(t.rect.x0 < t.rect.x1 && t.rect.y0 < t.rect.y1)) throw std::invalid_argument("degenerate cell");
    rects.push_back(t.rect);
    sum += t.rect.area();
  }
  if (area_union(rects) != sum) throw std::invalid_argument("step function cells overlap");
  StepFunction2D f;
  f.terms_ = std::move(terms);
  return f;
}

StepFunction2D StepFunction2D::sum(const std::vector<WeightedCell>& terms) {
  std::vector<Rect> rects;
  Scalar total_area = 0;
  for (const auto& t : terms) {
    if (t.weight == 0) continue;
    rects.push_back(t.rect);
    total_area += t.rect.area();
  }
  if (area_union(rects) == total_area) return of(terms);

  std::vector<WeightedCell> live;
  for (const auto& t : terms)
    if (t.weight != 0) live.push_back(t);
  auto xs = x_grid(rects);
  std::vector<std::size_t> order(live.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return live[a].rect.x0 < live[b].rect.x0; });

  struct Piece {
    Scalar lo, hi, w;
    bool operator==(const Piece& o) const { return lo == o.lo && hi == o.hi && w == o.w; }
  };
  std::vector<std::vector<Piece>> slabs(xs.empty() ? 0 : xs.size() - 1);
  std::vector<std::size_t> active;
  std::size_t next = 0;
  for (std::size_t s = 0; s < slabs.size(); ++s) {
    const Scalar& xa = xs[s];
    while (next < order.size() && live[order[next]].rect.x0 <= xa) active.push_back(order[next++]);
    std::erase_if(active, [&](std::size_t i) { return live[i].rect.x1 <= xa; });
    std::vector<std::pair<Scalar, Scalar>> events;  // (y, delta weight)
    for (auto i : active) {
      events.emplace_back(live[i].rect.y0, live[i].weight);
      events.emplace_back(live[i].rect.y1, -live[i].weight);
    }
    std::sort(events.begin(), events.end(), [](auto& a, auto& b) { return a.first < b.first; });
    Scalar w = 0;
    std::vector<Piece> pieces;
    for (std::size_t e = 0; e < events.size();) {
      Scalar y = events[e].first;
      while (e < events.size() && events[e].first == y) w += events[e++].second;
      if (e < events.size() && w != 0) {
        const Scalar& y2 = events[e].first;
        if (!pieces.empty() && pieces.back().hi == y && pieces.back().w == w)
          pieces.back().hi = y2;
        else
          pieces.push_back({y, y2, w});
      }
    }
    slabs[s] = std::move(pieces);
  }
  std::vector<WeightedCell> out;
  std::size_t s = 0;
  while (s < slabs.size()) {
    if (slabs[s].empty()) {
      ++s;
      continue;
    }
    std::size_t e = s + 1;
    while (e < slabs.size() && slabs[e] == slabs[s]) ++e;
    for (const auto& p : slabs[s]) out.push_back({Rect{xs[s], xs[e], p.lo, p.hi}, p.w});
    s = e;
  }
  std::sort(out.begin(), out.end(), [](const WeightedCell& a, const WeightedCell& b) { return a.rect < b.rect; });
  StepFunction2D f;
  f.terms_ = std::move(out);
  return f;
}

Scalar StepFunction2D::value_at(const PointZ& z) const {
  for (const auto& t : terms_)
    if (t.rect.contains(z)) return t.weight;
  return Scalar(0);
}

Scalar StepFunction2D::l1_norm() const {
  Scalar s = 0;
  for (const auto& t : terms_) s += abs_of(t.weight) * t.rect.area();
  return s;
}

Scalar StepFunction2D::linf_norm() const {
  Scalar m = 0;
  for (const auto& t : terms_) m = max_of(m, abs_of(t.weight));
  return m;
}

Scalar StepFunction2D::total() const {
  Scalar s = 0;
  for (const auto& t : terms_) s += t.weight * t.rect.area();
  return s;
}

StepFunction2D StepFunction2D::scaled(const Scalar& k) const {
  StepFunction2D f;
  if (k == 0) return f;
  f.terms_ = terms_;
  for (auto& t : f.terms_) t.weight *= k;
  return f;
}

bool StepFunction2D::nonnegative() const {
  for (const auto& t : terms_)
    if (t.weight < 0) return false;
  return true;
}

Scalar integral(const StepFunction2D& f, const Rect& r) {
  Scalar s = 0;
  for (const auto& t : f.terms()) {
    const Rect& c = t.rect;
    if (c.x1 <= r.x0 || r.x1 <= c.x0 || c.y1 <= r.y0 || r.y1 <= c.y0) continue;
    s += t.weight * (min_of(c.x1, r.x1) - max_of(c.x0, r.x0)) * (min_of(c.y1, r.y1) - max_of(c.y0, r.y0));
  }
  return s;
}

Scalar average(const StepFunction2D& f, const Rect& r) {
  Scalar a = r.area();
  if (a <= 0) throw std::invalid_argument("zero-area rectangle");
  return integral(f, r) / a;
}

namespace {

std::vector<Scalar> candidates(const std::vector<Scalar>& edges, const Scalar& side, const Scalar& zc,
                               const Scalar& lo, const Scalar& hi) {
  std::vector<Scalar> out{lo, hi};
  auto push = [&](const Scalar& v) {
    if (lo <= v && v <= hi) out.push_back(v);
  };
  for (const auto& e : edges) {
    push(e);
    push(e - side);
  }
  push(zc);
  push(zc - side);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Scalar overlap(const Scalar& a0, const Scalar& a1, const Scalar& b0, const Scalar& b1) {
  Scalar lo = max_of(a0, b0), hi = min_of(a1, b1);
  return lo < hi ? Scalar(hi - lo) : Scalar(0);
}

}  // namespace

MaxAverage maximal_average(const StepFunction2D& f, const PointZ& z, const std::vector<Scalar>& S,
                           const Scalar& diam_cap, const Scalar& area_floor) {
  if (S.empty()) throw std::invalid_argument("no admissible rectangle");
  std::vector<Scalar> xe, ye;
  for (const auto& t : f.terms()) {
    xe.push_back(t.rect.x0);
    xe.push_back(t.rect.x1);
    ye.push_back(t.rect.y0);
    ye.push_back(t.rect.y1);
  }
  std::sort(xe.begin(), xe.end());
  xe.erase(std::unique(xe.begin(), xe.end()), xe.end());
  std::sort(ye.begin(), ye.end());
  ye.erase(std::unique(ye.begin(), ye.end()), ye.end());

  std::optional<MaxAverage> best;
  const Scalar cap2 = diam_cap * diam_cap;
  const auto& terms = f.terms();
  for (const auto& x : S) {
    for (const auto& y : S) {
      if (x <= 0 || y <= 0 || x > 1 || y > 1) continue;
      if (x * x + y * y > cap2 || x * y < area_floor) continue;
      Scalar ulo = max_of(Scalar(0), Scalar(z.x - x)), uhi = min_of(z.x, Scalar(1 - x));
      Scalar vlo = max_of(Scalar(0), Scalar(z.y - y)), vhi = min_of(z.y, Scalar(1 - y));
      if (ulo > uhi || vlo > vhi) continue;
      auto us = candidates(xe, x, z.x, ulo, uhi);
      auto vs = candidates(ye, y, z.y, vlo, vhi);
      Scalar area = x * y;
      std::vector<Scalar> ox(terms.size());
      for (const auto& u : us) {
        for (std::size_t c = 0; c < terms.size(); ++c) ox[c] = overlap(terms[c].rect.x0, terms[c].rect.x1, u, u + x);
        for (const auto& v : vs) {
          Scalar s = 0;
          for (std::size_t c = 0; c < terms.size(); ++c) {
            if (ox[c] == 0) continue;
            Scalar oy = overlap(terms[c].rect.y0, terms[c].rect.y1, v, v + y);
            if (oy != 0) s += terms[c].weight * ox[c] * oy;
          }
          Scalar avg = s / area;
          Scalar mag = abs_of(avg);
          if (!best || mag > best->value) best = MaxAverage{mag, avg, Rect{u, u + x, v, v + y}};
        }
      }
    }
  }
  if (!best) throw std::invalid_argument("no admissible rectangle");
  return *best;
}

namespace fixed {

u128 one() { return static_cast<u128>(1) << kFixBits; }

bool to_fixed(const Scalar& v, u128& out) {
  if (v < 0 || v > 1 || !is_dyadic(v)) return false;
  std::size_t den_bits = mpz_sizeinbase(v.get_den_mpz_t(), 2) - 1;
  if (den_bits > static_cast<std::size_t>(kFixBits)) return false;
  mpz_class n = v.get_num() << static_cast<unsigned long>(kFixBits - static_cast<int>(den_bits));
  out = to_u128(n);
  return true;
}

Scalar to_scalar(u128 v) { return canonical(Scalar(from_u128(v), mpz_class(1) << kFixBits)); }

bool to_fixed(const Rect& r, FixRect& out) {
  return to_fixed(r.x0, out.x0) && to_fixed(r.x1, out.x1) && to_fixed(r.y0, out.y0) && to_fixed(r.y1, out.y1);
}

Rect to_rect(const FixRect& r) { return Rect{to_scalar(r.x0), to_scalar(r.x1), to_scalar(r.y0), to_scalar(r.y1)}; }

namespace {

struct CoverTree {
  std::vector<u128> ys;
  std::vector<int> cnt;
  std::vector<u128> len;

  explicit CoverTree(std::vector<u128> coords) : ys(std::move(coords)) {
    std::size_t n = ys.size() > 1 ? ys.size() - 1 : 1;
    cnt.assign(4 * n, 0);
    len.assign(4 * n, 0);
  }
  void update(std::size_t node, std::size_t l, std::size_t r, std::size_t ql, std::size_t qr, int d) {
    if (qr <= l || r <= ql) return;
    if (ql <= l && r <= qr) {
      cnt[node] += d;
    } else {
      std::size_t m = (l + r) / 2;
      update(2 * node, l, m, ql, qr, d);
      update(2 * node + 1, m, r, ql, qr, d);
    }
    if (cnt[node] > 0)
      len[node] = ys[r] - ys[l];
    else if (r - l == 1)
      len[node] = 0;
    else
      len[node] = len[2 * node] + len[2 * node + 1];
  }
};

}  // namespace

mpz_class union_area_raw(const std::vector<FixRect>& rects) {
  struct Event {
    u128 x;
    int d;
    u128 y0, y1;
  };
  std::vector<Event> ev;
  std::vector<u128> ys;
  ev.reserve(2 * rects.size());
  ys.reserve(2 * rects.size());
  for (const auto& r : rects) {
    if (r.x0 >= r.x1 || r.y0 >= r.y1) continue;
    ev.push_back({r.x0, +1, r.y0, r.y1});
    ev.push_back({r.x1, -1, r.y0, r.y1});
    ys.push_back(r.y0);
    ys.push_back(r.y1);
  }
  if (ev.empty()) return 0;
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  std::sort(ev.begin(), ev.end(), [](const Event& a, const Event& b) { return a.x < b.x; });
  CoverTree tree(ys);
  std::size_t n = ys.size() - 1;
  mpz_class area = 0;
  auto index = [&](u128 y) { return static_cast<std::size_t>(std::lower_bound(ys.begin(), ys.end(), y) - ys.begin()); };
  u128 prev = ev.front().x;
  for (std::size_t i = 0; i < ev.size();) {
    u128 x = ev[i].x;
    if (x > prev && tree.len[1] > 0) area += from_u128(x - prev) * from_u128(tree.len[1]);
    while (i < ev.size() && ev[i].x == x) {
      if (n > 0) tree.update(1, 0, n, index(ev[i].y0), index(ev[i].y1), ev[i].d);
      ++i;
    }
    prev = x;
  }
  return area;
}

Scalar union_area(const std::vector<FixRect>& rects) {
  return canonical(Scalar(union_area_raw(rects), mpz_class(1) << (2 * kFixBits)));
}

}  // namespace fixed

}  // namespace rdiff
