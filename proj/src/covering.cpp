#include "rdiff/covering.hpp"

#include "rdiff/rng.hpp"

#include <map>
#include <stdexcept>

namespace rdiff {

namespace {

std::vector<std::pair<Scalar, Scalar>> strips(const Scalar& start, const Scalar& side, const Scalar& chosen,
                                              bool small) {
  if (!small) return {{start, start + chosen}};
  std::vector<std::pair<Scalar, Scalar>> out;
  mpz_class m = floor_of(side / chosen);
  for (mpz_class k = 1; k <= m; ++k) out.emplace_back(start + Scalar(k - 1) * chosen, start + Scalar(k) * chosen);
  out.emplace_back(start + side - chosen, start + side);
  return out;
}

Scalar factor(const Scalar& c) {
  Scalar k = 1 / c + 1;
  return k * k / (c * c);
}

}  // namespace

std::string parity_tag(const Scalar& side, const Scalar& chosen, const Scalar& c, char axis) {
  std::string suffix(1, axis);
  if (chosen >= side && side / chosen > c) return "2" + suffix;
  if (chosen <= side && chosen / side > c) return "1" + suffix;
  return {};
}

CoverInstance choose_instance(const Rect& B, const std::vector<Scalar>& sides, const Scalar& c) {
  if (c <= 0 || c >= 1) throw std::invalid_argument("c must lie in (0,1)");
  auto pick_side = [&](const Scalar& side, char axis, Scalar& out, std::string& tag) {
    for (const char* want : {"2", "1"})
      for (const auto& s : sides) {
        std::string t = parity_tag(side, s, c, axis);
        if (!t.empty() && t[0] == want[0]) {
          out = s;
          tag = t;
          return;
        }
      }
    throw std::invalid_argument("gap hypothesis violated");
  };
  CoverInstance inst{B, c, 0, 0, {}, {}};
  pick_side(B.height(), 'a', inst.x, inst.tag_a);
  pick_side(B.width(), 'b', inst.y, inst.tag_b);
  return inst;
}

std::vector<Rect> cover_rect(const CoverInstance& inst) {
  const Scalar a = inst.B.height(), b = inst.B.width();
  if (inst.c <= 0 || inst.c >= 1) throw std::invalid_argument("c must lie in (0,1)");
  if (parity_tag(a, inst.x, inst.c, 'a') != inst.tag_a || parity_tag(b, inst.y, inst.c, 'b') != inst.tag_b)
    throw std::invalid_argument("gap hypothesis violated");
  std::vector<Rect> out;
  for (const auto& [x0, x1] : strips(inst.B.x0, a, inst.x, inst.tag_a == "1a"))
    for (const auto& [y0, y1] : strips(inst.B.y0, b, inst.y, inst.tag_b == "1b")) out.push_back(Rect{x0, x1, y0, y1});
  return out;
}

LemmaReport verify_cover(const Rect& B, const std::vector<Rect>& cover, const Scalar& c) {
  LemmaReport rep;
  rep.title = "covering";
  const Scalar area = B.area();
  std::vector<Rect> clipped;
  Scalar min_overlap = area, max_ratio = 0;
  for (const auto& A : cover) {
    auto i = intersect(A, B);
    Scalar ov = i ? i->area() : Scalar(0);
    if (i) clipped.push_back(*i);
    min_overlap = min_of(min_overlap, ov);
    max_ratio = max_of(max_ratio, A.area() / area);
  }
  rep.add("i.uncovered_area", area - area_union(clipped), Rel::EQ, Scalar(0));
  rep.add("ii.min_overlap", min_overlap, Rel::GE, c * c * area);
  rep.add("iii.max_area_ratio", max_ratio, Rel::LE, 1 / (c * c));
  Scalar k = 1 / c + 1;
  rep.add("count", Scalar(static_cast<long>(cover.size())), Rel::LE, k * k);
  return rep;
}

Certificate bound_certificate(const StepFunction2D& f, const PointZ& z, const Rect& B, const std::vector<Rect>& cover,
                              const Scalar& c, const Scalar& local_bound) {
  if (!f.nonnegative()) throw std::invalid_argument("positivity violated");
  if (!B.contains(z)) throw std::invalid_argument("z must lie in B");
  Certificate cert;
  Scalar sum = 0;
  for (const auto& A : cover) {
    Scalar in = integral(f, A);
    if (in > local_bound * A.area()) throw std::invalid_argument("local bound violated on a covering rectangle");
    sum += in;
  }
  cert.value = sum / B.area();
  cert.bound = factor(c) * local_bound;
  cert.avg_B = average(f, B);
  cert.holds = cert.avg_B <= cert.value && cert.value <= cert.bound;
  return cert;
}

LemmaReport verify_covering_suite(std::size_t instances, std::uint64_t seed) {
  LemmaReport rep;
  rep.title = "covering suite";
  std::size_t cover_fail = 0, cert_fail = 0, identity_checked = 0, identity_fail = 0, mono_fail = 0;
  Scalar max_count_ratio = 0;
  nlohmann::json witnesses = nlohmann::json::array();
  std::map<std::string, std::size_t> cases;
  for (std::size_t i = 0; i < instances; ++i) {
    auto rng = make_rng(seed, i, 41);
    Scalar c = random_between(Scalar(1, 20), Scalar(19, 20), rng);
    Scalar a = random_between(Scalar(1, 1000), Scalar(1, 4), rng);
    Scalar b = random_between(Scalar(1, 1000), Scalar(1, 4), rng);
    Scalar s = random_between(0, Scalar(1, 2), rng), t = random_between(0, Scalar(1, 2), rng);
    auto side = [&](const Scalar& len) {
      Scalar r;
      do r = random_between(c, 1, rng);
      while (r == c);
      return (rng() & 1) ? Scalar(len / r) : Scalar(len * r);
    };
    Scalar x = side(a), y = side(b);
    Rect B{s, s + a, t, t + b};
    CoverInstance inst{B, c, x, y, parity_tag(a, x, c, 'a'), parity_tag(b, y, c, 'b')};
    auto cover = cover_rect(inst);
    ++cases[inst.tag_a + inst.tag_b];
    LemmaReport v = verify_cover(B, cover, c);
    if (!v.pass()) {
      ++cover_fail;
      if (witnesses.size() < 5) witnesses.push_back(to_json(inst, cover));
    }
    Scalar k = 1 / c + 1;
    max_count_ratio = max_of(max_count_ratio, Scalar(static_cast<long>(cover.size())) / (k * k));

    // random positive step function near B
    std::vector<WeightedCell> cells;
    int m = 1 + static_cast<int>(rng() % 5);
    for (int j = 0; j < m; ++j) {
      Scalar x0 = random_between(s - a, s + a, rng), y0 = random_between(t - b, t + b, rng);
      Scalar x1 = random_between(x0, x0 + 2 * a, rng), y1 = random_between(y0, y0 + 2 * b, rng);
      if (x0 < x1 && y0 < y1) cells.push_back({Rect{x0, x1, y0, y1}, random_between(0, 5, rng)});
    }
    StepFunction2D f = StepFunction2D::sum(cells);
    Scalar local = 0;
    for (const auto& A : cover) local = max_of(local, average(f, A));
    PointZ z{random_between(B.x0, B.x1, rng), random_between(B.y0, B.y1, rng)};
    Certificate cert = bound_certificate(f, z, B, cover, c, local);
    if (!cert.holds) ++cert_fail;
    if (inst.tag_a == "2a" && inst.tag_b == "2b") {
      // f supported in B: certificate equals avg(f, B)
      std::vector<WeightedCell> inside;
      for (const auto& cell : f.terms())
        if (auto r = intersect(cell.rect, B)) inside.push_back({*r, cell.weight});
      StepFunction2D g = StepFunction2D::of(inside);
      Scalar lg = average(g, cover[0]);
      ++identity_checked;
      if (bound_certificate(g, z, B, cover, c, lg).value != average(g, B)) ++identity_fail;
    }
    Scalar c2 = random_between(c, 1, rng);
    if (c2 > c && !(factor(c) >= factor(c2))) ++mono_fail;
  }
  rep.add("instances.cover_failures", Scalar(static_cast<long>(cover_fail)), Rel::EQ, Scalar(0));
  rep.add("count.max_ratio_to_bound", max_count_ratio, Rel::LE, Scalar(1));
  rep.add("certificate.failures", Scalar(static_cast<long>(cert_fail)), Rel::EQ, Scalar(0));
  rep.add("certificate.identity_failures", Scalar(static_cast<long>(identity_fail)), Rel::EQ, Scalar(0));
  rep.add("factor.monotone_failures", Scalar(static_cast<long>(mono_fail)), Rel::EQ, Scalar(0));
  rep.extra["instances"] = instances;
  rep.extra["cases"] = cases;
  rep.extra["identity_checked"] = identity_checked;
  rep.extra["witnesses"] = witnesses;
  return rep;
}

nlohmann::json to_json(const CoverInstance& inst, const std::vector<Rect>& cover) {
  nlohmann::json rects = nlohmann::json::array();
  for (const auto& r : cover) rects.push_back(to_json(r));
  return {{"B", to_json(inst.B)},
          {"c", to_string(inst.c)},
          {"x", to_string(inst.x)},
          {"y", to_string(inst.y)},
          {"cases", {inst.tag_a, inst.tag_b}},
          {"cover", rects}};
}

}  // namespace rdiff
