#include "rdiff/side_sets.hpp"

#include <stdexcept>
#include <string>

namespace rdiff {

namespace {

constexpr std::size_t kMaxExtensionBits = 1u << 20;

std::string idx(const char* base, int k) { return std::string(base) + "[" + std::to_string(k) + "]"; }

}  // namespace

SideSetSchema::SideSetSchema(std::vector<Scalar> materialized, Scalar rho)
    : elems_(std::move(materialized)), rho_(std::move(rho)) {
  for (std::size_t i = 0; i < elems_.size(); ++i) {
    if (!(elems_[i] > 0 && elems_[i] <= 1)) throw std::invalid_argument("side length outside (0,1]");
    if (i > 0 && !(elems_[i] < elems_[i - 1])) throw std::invalid_argument("side set not strictly decreasing");
  }
  if (rho_ < 0 || rho_ >= 1) throw std::invalid_argument("extension ratio outside [0,1)");
}

Scalar SideSetSchema::extend_below(const Scalar& threshold) const {
  if (!has_extension()) throw std::logic_error("side set has no extension rule");
  Scalar e = elems_.back();
  do {
    e = e * e * rho_;
    if (mpz_sizeinbase(e.get_den_mpz_t(), 2) > kMaxExtensionBits) throw std::overflow_error("extension too deep");
  } while (!(e < threshold));
  return e;
}

std::vector<Scalar> SideSetSchema::elements_down_to(const Scalar& floor, std::size_t cap) const {
  std::vector<Scalar> out;
  for (const auto& e : elems_)
    if (e >= floor) out.push_back(e);
  if (!has_extension() || elems_.back() < floor) return out;
  Scalar e = elems_.back();
  for (std::size_t i = 0; i < cap; ++i) {
    e = e * e * rho_;
    if (e < floor) break;
    out.push_back(e);
  }
  return out;
}

bool SideSetSchema::contains(const Scalar& x) const {
  for (const auto& e : elems_)
    if (e == x) return true;
  if (!has_extension() || !(x < elems_.back())) return false;
  Scalar e = elems_.back();
  while (e > x) e = e * e * rho_;
  return e == x;
}

GapProfile gap(const SideSetSchema& C, const Scalar& x) {
  if (!(x > 0 && x <= 1)) throw std::domain_error("gap query outside (0,1]");
  GapProfile g{x, Scalar(0), Scalar(1), Scalar(0), Scalar(0)};
  bool found_below = false;
  for (const auto& e : C.materialized()) {
    if (e > x) {
      g.x_under = e;  // decreasing order: the last one above x is the infimum
    } else if (e < x) {
      g.x_over = e;
      found_below = true;
      break;
    }
  }
  if (!found_below && C.has_extension()) {
    Scalar e = C.materialized().back();
    while (!(e < x)) {
      Scalar next = e * e * C.rho();
      if (e > x) g.x_under = e;
      e = next;
    }
    // e is the first extension element below x; elements between it and the
    // materialized tail that exceed x were recorded as x_under above.
    g.x_over = e;
  }
  g.ratio_below = g.x_over / x;
  g.ratio_above = x / g.x_under;
  return g;
}

Scalar default_rho(int n) { return dyadic_floor(Scalar(1, 8 * n * n)); }

namespace {

Scalar df(const Scalar& v) { return dyadic_floor(v); }

Scalar min_all(std::initializer_list<Scalar> v) {
  Scalar m = *v.begin();
  for (const auto& x : v) m = min_of(m, x);
  return m;
}

}  // namespace

SidePair generate_pair(int n, const Scalar& eps, const Scalar& delta, const Scalar& lambda) {
  if (n < 2) throw std::invalid_argument("n >= 2 required");
  if (!(eps > 0 && eps < 1) || !(delta > 0 && delta < 1) || !(lambda > 0 && lambda < 1))
    throw std::invalid_argument("eps, delta, lambda must lie in (0,1)");
  const Scalar s(3L * n * (1L << (n - 1)));
  const Scalar gamma = eps / (16 * n);
  const Scalar kappa = min_of(lambda, eps / (48 * n));
  std::vector<Scalar> b(2 * n + 1), c(2 * n + 1);
  c[0] = 1;  // convention: no element of C above b_1
  Scalar m;  // largest gap ratio realized so far
  for (int k = 1; k <= n; ++k) {
    if (k == 1) {
      b[1] = df(1 / (2 * s));
    } else {
      b[k] = df(min_all({c[k - 1] * (b[k - 1] / c[k - 2]), lambda * b[k - 1], m / 2 * c[k - 1]}) / 2);
    }
    if (k == 1)
      c[1] = df(b[1] * gamma / 2);
    else if (k < n)
      c[k] = df(min_of(b[k] * gamma, m / 2 * b[k]) / 2);
    else
      c[k] = df(min_of(m / 2 * b[k], b[k] / 2) / 2);
    Scalar mk = max_of(c[k] / b[k], b[k] / c[k - 1]);
    m = k == 1 ? mk : min_of(m, mk);
  }
  for (int k = 1; k <= n; ++k) {
    const int j = n + k;
    Scalar bound = min_all({lambda * c[n - k + 1] / b[n - k + 1] * c[j - 1], lambda * b[j - 1], c[j - 1], m / 2 * c[j - 1]});
    if (k == 1) bound = min_of(bound, delta / (4 * n * b[n]));
    if (k >= 2) bound = min_of(bound, b[n - k + 2] * b[j - 1] / b[n - k + 1]);
    if (k == 2) bound = min_of(bound, b[n + 1] * b[n + 1] / (4 * n));
    b[j] = df(bound / 2);
    Scalar cb = min_of(b[j] * kappa * b[n - k + 1] / c[n - k], m / 2 * b[j]);
    if (k == 1) cb = min_of(cb, eps * b[n] * b[n + 1] / (24 * n * c[1]));
    c[j] = df(cb / 2);
    m = min_of(m, max_of(c[j] / b[j], b[j] / c[j - 1]));
  }
  SidePair p;
  p.mode = PairMode::Full;
  p.b.n = n;
  p.b.lambda = lambda;
  p.b.b.assign(b.begin() + 1, b.end());
  std::vector<Scalar> cm(c.begin() + 1, c.end());
  p.C = SideSetSchema(cm, default_rho(n));
  p.D = SideSetSchema(p.b.b, default_rho(n));
  return p;
}

SidePair relaxed_demo_pair() {
  SidePair p;
  p.mode = PairMode::RelaxedDemo;
  p.b.n = 2;
  p.b.lambda = Scalar(1, 2);
  p.b.b = {Scalar(1, 2), Scalar(1, 4), Scalar(1, 32), Scalar(1, 128)};
  p.C = SideSetSchema({Scalar(1)}, Scalar(0));
  p.D = SideSetSchema(p.b.b, Scalar(0));
  return p;
}

LemmaReport validate_pair(const SideSetSchema& C, const BSequence& bs, const Scalar& eps, const Scalar& delta) {
  LemmaReport r;
  r.title = "side-set conditions";
  const int n = bs.n;
  if (n < 2 || static_cast<int>(bs.b.size()) != 2 * n) throw std::invalid_argument("b must have 2n entries, n >= 2");
  auto b = [&](int k) -> const Scalar& { return bs.at(k); };
  // over(k) = sup of C below b_k, under(k) = inf of C above b_k (1 if none);
  // over(0) = 1 by convention.
  std::vector<GapProfile> g(2 * n + 1);
  for (int k = 1; k <= 2 * n; ++k) g[k] = gap(C, b(k));
  auto over = [&](int k) -> Scalar { return k == 0 ? Scalar(1) : g[k].x_over; };
  auto under = [&](int k) -> const Scalar& { return g[k].x_under; };

  r.add_flag("structure.lambda_in_(0,1)", bs.lambda > 0 && bs.lambda < 1);
  for (int k = 1; k < 2 * n; ++k) r.add(idx("cond1.decreasing", k), b(k + 1), Rel::LT, b(k));
  for (int k = 1; k < 2 * n; ++k) r.add(idx("hyp.ratio_below_lambda", k), b(k + 1) / b(k), Rel::LT, bs.lambda);

  for (int k = 1; k < n; ++k)
    r.add(idx("cond1.area_decrease", k), b(k) * b(2 * n + 1 - k), Rel::LE, b(k + 1) * b(2 * n - k));

  std::vector<Scalar> v(n + 1);
  for (int k = 1; k <= n; ++k) v[k] = b(k) / under(k);
  r.add("cond2.top", v[1], Rel::LT, Scalar(1, 3L * n * (1L << (n - 1))));
  for (int k = 1; k < n; ++k) r.add(idx("cond2.chain", k + 1), v[k + 1], Rel::LT, v[k]);

  for (int k = 1; k <= n; ++k) {
    // over(n+k)/b(n+k) <= lambda b(n-k+1)/over(n-k), cross-multiplied by over(n-k)
    // so that an empty C below b_{n-k} (over = 0) stays well defined.
    r.add(idx("cond3.first", k), over(n + k) / b(n + k) * over(n - k), Rel::LE, bs.lambda * b(n - k + 1),
          "multiplied through by sup C below b_{n-k}");
    r.add(idx("cond3.second", k), b(n + k) / under(n + k), Rel::LE, bs.lambda * over(n - k + 1) / b(n - k + 1));
  }

  r.add("cond4.delta", delta, Rel::GT, Scalar(4 * n) * b(n) * b(n + 1));
  r.add("cond5.b_n+2", b(n + 2), Rel::LT, b(n + 1) * b(n + 1) / (4 * n));
  r.extra["eps"] = to_string(eps);
  r.extra["delta"] = to_string(delta);
  return r;
}

bool conditions_hold(const LemmaReport& report, int condition) {
  const std::string prefix = "cond" + std::to_string(condition) + ".";
  bool any = false;
  for (const auto& c : report.checks)
    if (c.name.rfind(prefix, 0) == 0) {
      any = true;
      if (!c.pass) return false;
    }
  return any;
}

nlohmann::json to_json(const SidePair& p) {
  nlohmann::json b = nlohmann::json::array(), c = nlohmann::json::array();
  for (const auto& x : p.b.b) b.push_back(to_string(x));
  for (const auto& x : p.C.materialized()) c.push_back(to_string(x));
  return {{"n", p.b.n},
          {"lambda", to_string(p.b.lambda)},
          {"b", b},
          {"C", c},
          {"extension", {{"rho", to_string(p.C.rho())}}},
          {"mode", p.mode == PairMode::Full ? "full" : "relaxed-demo"}};
}

SidePair pair_from_json(const nlohmann::json& j) {
  SidePair p;
  p.b.n = j.at("n").get<int>();
  p.b.lambda = scalar_from_json(j.at("lambda"));
  for (const auto& x : j.at("b")) p.b.b.push_back(scalar_from_json(x));
  std::vector<Scalar> c;
  for (const auto& x : j.at("C")) c.push_back(scalar_from_json(x));
  Scalar rho = j.contains("extension") ? scalar_from_json(j["extension"].at("rho")) : Scalar(0);
  p.C = SideSetSchema(c, rho);
  p.D = SideSetSchema(p.b.b, rho);
  p.mode = j.value("mode", std::string("full")) == "relaxed-demo" ? PairMode::RelaxedDemo : PairMode::Full;
  return p;
}

}  // namespace rdiff
