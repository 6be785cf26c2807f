// One line per acceptance criterion; exit 0 iff every criterion passes.
#include "rdiff/assembly.hpp"
#include "rdiff/cli.hpp"
#include "rdiff/construction.hpp"
#include "rdiff/covering.hpp"
#include "rdiff/translation.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

using namespace rdiff;

namespace {

Scalar q(long a, unsigned long b) { return make_scalar(a, b); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = s < limit_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  char timing[64];
  std::snprintf(timing, sizeof timing, "%.2fs < %.0fs", s, limit_s);
  std::cout << (pass ? "PASS" : "FAIL") << "  " << id << ". " << name << ": " << o.detail << " [" << timing
            << (in_time ? "" : " EXCEEDED") << "]" << std::endl;
}

std::string dec(const Scalar& v) {
  std::ostringstream s;
  s.precision(6);
  s << to_double(v);
  return s.str();
}

Configuration demo_cfg(const Scalar& delta = q(1, 10)) {
  return build_config(relaxed_demo_pair(), q(1, 128), q(1, 20), delta);
}

std::vector<Configuration> generated(const Scalar& eps = q(1, 10)) {
  std::vector<Configuration> out;
  for (int n : {2, 3}) {
    auto p = generate_pair(n, eps, q(1, 10), q(1, 2));
    out.push_back(build_config(p, default_tau(p.b), eps, q(1, 10)));
  }
  return out;
}

// integers without the "/1"
std::string num(const Scalar& v) { return v.get_den() == 1 ? v.get_num().get_str() : to_string(v); }

std::string first_fail(const LemmaReport& r) { return r.first_failure() ? r.first_failure()->name : ""; }

}  // namespace

int main() {
  const std::uint64_t seed = 20240611;

  criterion(1, "area sandwich", 1, [] {
    bool ok = true;
    std::string bad;
    auto cfgs = generated();
    cfgs.push_back(demo_cfg());
    for (const auto& c : cfgs) {
      LemmaReport r = verify_area_sandwich(c);
      if (!r.pass()) ok = false, bad += " n=" + std::to_string(c.n()) + ":" + first_fail(r);
    }
    const Configuration d = demo_cfg();
    const Scalar ratio = d.area_E / (2 * d.block_area(2));
    ok = ok && d.area_E == q(3, 256) && ratio == q(3, 4) && q(2, 3) <= ratio && ratio <= 1 && d.area_F == q(1, 128);
    return Outcome{ok, "generated n=2,3 and demo exact; demo |E|=" + to_string(d.area_E) + " |E|/(2|B2|)=" +
                           to_string(ratio) + " |F|=" + to_string(d.area_F) + bad};
  });

  criterion(2, "average bounds", 1, [] {
    bool ok = true;
    std::string bad;
    auto cfgs = generated();
    cfgs.push_back(demo_cfg());
    for (const auto& c : cfgs) {
      LemmaReport r = verify_average_lemma(c);
      if (!r.pass()) ok = false, bad += " n=" + std::to_string(c.n()) + ":" + first_fail(r);
    }
    const Configuration d = demo_cfg();
    const Scalar a = average_h(d, Rect{0, q(1, 2), 0, q(1, 128)});
    ok = ok && a == 2;
    return Outcome{ok, "every theta of generated n=2,3 and demo; demo avg(h, B((1))) = " + num(a) + bad};
  });

  criterion(3, "norm identities", 1, [] {
    bool ok = true;
    std::string detail;
    auto cfgs = generated();
    cfgs.push_back(demo_cfg());
    for (const auto& c : cfgs) {
      LemmaReport r = verify_norms(c);
      const bool exact = l1_norm_h(c) == c.n() * c.block_area(c.n());
      ok = ok && r.pass() && exact;
      detail += " n=" + std::to_string(c.n()) + (r.pass() && exact ? " ok" : " FAIL:" + first_fail(r));
    }
    return Outcome{ok, "||h||_1 = n|B_n| and ||h||_1/|F| bounds:" + detail};
  });

  criterion(4, "exceptional set", 1, [] {
    bool ok = true;
    std::string detail;
    for (auto eps : {q(1, 10), q(1, 20)})
      for (const auto& c : generated(eps)) {
        const bool in = c.area_d_hat <= eps * c.area_F;
        ok = ok && in;
        detail += " n=" + std::to_string(c.n()) + ",eps=" + to_string(eps) + ": |D|/|F|=" +
                  dec(c.area_d_hat / c.area_F) + (in ? "" : " FAIL");
      }
    return Outcome{ok, "|D| <= eps|F| exact;" + detail};
  });

  criterion(5, "large rectangles", 10, [seed] {
    bool ok = true;
    std::string detail;
    auto cfgs = generated();
    cfgs.push_back(demo_cfg());
    for (const auto& c : cfgs) {
      const Scalar ratio = l1_norm_h(c) / (4 * c.n() * c.block_area(c.n()));
      LemmaReport r = verify_large_rectangles(c, 1000, seed);
      const Check* v = r.find("violations");
      ok = ok && ratio == q(1, 4) && r.pass();
      detail += " n=" + std::to_string(c.n()) + ": ratio " + to_string(ratio) + ", violations " +
                (v ? num(v->lhs) : "?") + ", max|avg| " + dec(r.find("max_abs_avg")->lhs);
    }
    return Outcome{ok, "1000 samples each;" + detail};
  });

  // The relaxed demo switches off the conditions the case analysis rests on,
  // so this criterion runs on generated configurations only.
  criterion(6, "case bounds", 60, [seed] {
    bool ok = true;
    std::string detail;
    auto cfgs = generated();
    for (const auto& c : cfgs) {
      LemmaReport r = verify_case_bounds(c, 1000, seed);
      ok = ok && r.pass();
      detail += " n=" + std::to_string(c.n()) + ": max|avg| " + dec(r.find("anchored.max_abs_avg")->lhs) +
                ", violations " + num(r.find("anchored.violations")->lhs) + "+" +
                num(r.find("majorant.violations")->lhs) + (r.pass() ? "" : " FAIL:" + first_fail(r));
    }
    return Outcome{ok, "1000 C-sided samples each;" + detail};
  });

  criterion(7, "coverage expectation", 600, [seed] {
    // generated configuration: the criterion proper
    std::string detail;
    bool gen_ok = false;
    auto p = generate_pair(2, q(1, 10), q(1, 10), q(1, 2));
    Configuration c = build_config(p, default_tau(p.b), q(1, 10), q(1, 10));
    const mpz_class N = translate_count(c);
    try {
      RectUnion F = explicit_F(c), D = explicit_d_hat(c);
      if (!N.fits_ulong_p()) throw std::length_error("N does not fit");
      CoverageStats s = mc_coverage(F, D, N.get_ui(), 10000, seed);
      gen_ok = s.pass;
      detail = "generated n=2: mean " + std::to_string(s.mean) + " vs bound " + dec(s.closed_form_lower);
    } catch (const std::exception& e) {
      detail = "generated n=2: N = " + N.get_str() + " translates, not materializable (" + e.what() + ")";
    }
    // supplementary: demo kernel and the single-translate check
    TranslationKernel k = make_kernel(demo_cfg());
    CoverageStats s = mc_coverage(k.F, k.D_hat, k.N, 10000, seed);
    detail += "; demo N=" + std::to_string(k.N) + ": mean " + std::to_string(s.mean) + " >= " +
              dec(s.closed_form_lower) + " - 3*" + std::to_string(s.stderr_) + (s.pass ? " ok" : " FAIL");
    CoverageStats one = mc_coverage(k.F, RectUnion(), 1, 10000, seed);
    const bool one_ok = one.pass && one.exact_mean == area_union(k.F);
    detail += "; N=1 on demo F: mean |F0| = " + to_string(one.exact_mean) + " = |F|" + (one_ok ? " ok" : " FAIL");
    return Outcome{gen_ok && s.pass && one_ok, detail};
  });

  const Configuration dc = demo_cfg();
  const TranslationKernel dk = make_kernel(dc);
  const Scalar chi = chi_threshold(q(1, 20));
  OmegaSearch search;

  criterion(8, "omega selection", 600, [&] {
    search = find_omega(dk, chi, 10000, seed);
    const bool ok = search.q_area >= chi;
    return Outcome{ok, "demo kernel: |Q0| = " + dec(search.q_area) + " >= chi(1/20) = " + dec(chi) + " after " +
                           std::to_string(search.draws) + " draws"};
  });

  criterion(9, "assembly", 300, [&] {
    Assembly a = assemble_h0(dk, search.omega);
    LemmaReport r = verify_random_translation(dk, a, 100, 1000, seed);
    const auto& ii = r.extra["ii"];
    std::string detail = "(i) max|avg| " + dec(r.find("i.max_abs_avg")->lhs) + " <= 2; (ii) witness >= n with |B| > eta at " +
                         num(r.find("ii.witness_ge_n_area_gt_eta")->lhs) + "/100 z (>= n at any area: " +
                         std::to_string(ii["witness_ge_n_any_area"].get<std::size_t>()) + ", eta = " +
                         ii["eta"].get<std::string>() + "); (iii) max|avg| " + dec(r.find("iii.max_abs_avg")->lhs) +
                         " < 1";
    if (!r.pass()) detail += "; first failure " + first_fail(r);
    return Outcome{r.pass(), detail};
  });

  criterion(10, "exhaustion", 600, [&] {
    Exhaustion ex = exhaust(dk, search.omega, chi, q(1, 2), 3);
    bool contraction = true;
    for (const auto& s : ex.stages) contraction = contraction && s.X_next < (1 - chi) * s.X;
    const int S = ex.stop_stage;
    const Scalar half_eps = q(1, 4);
    const bool least = pow_of(1 - chi, S) < half_eps && (S == 0 || pow_of(1 - chi, S - 1) >= half_eps);
    const bool ok = ex.report.pass() && contraction && least && ex.Q_area > q(1, 2) && S <= 3;
    return Outcome{ok, "stages " + std::to_string(ex.stages.size()) + ", stop " + std::to_string(S) +
                           (least ? " (least k)" : " (NOT least)") + ", |Q| = " + dec(ex.Q_area) + " > 1/2" +
                           (contraction ? ", contraction per stage" : ", contraction FAILS") +
                           (ex.report.pass() ? "" : ", report: " + first_fail(ex.report))};
  });

  criterion(11, "series divergence", 600, [seed] {
    DemoReport d = demo_divergence(2, 10, seed);
    std::size_t ok_rows = 0;
    for (const auto& r : d.rows)
      if (r.pass) ++ok_rows;
    std::string detail = std::to_string(ok_rows) + "/10 z with |avg(f_<=2, B)| > 3/2";
    if (!d.blocked.empty()) detail += "; " + d.blocked;
    return Outcome{ok_rows >= 10 && d.report.pass(), detail};
  });

  criterion(12, "covering", 60, [seed] {
    LemmaReport r = verify_covering_suite(1000, seed);
    return Outcome{r.pass(), "1000 instances, cover failures " + num(r.find("instances.cover_failures")->lhs) +
                                 ", certificate failures " + num(r.find("certificate.failures")->lhs) +
                                 (r.pass() ? "" : ", first failure " + first_fail(r))};
  });

  criterion(13, "determinism", 600, [seed] {
    struct Case {
      std::string command;
      RunConfig cfg;
    };
    std::vector<Case> cases;
    RunConfig base;
    base.seed = seed;
    base.samples = 100;
    cases.push_back({"generate", base});
    cases.push_back({"verify", base});
    RunConfig mc = base;
    mc.mode = "relaxed-demo";
    mc.eps = "1/20";
    mc.trials = 1;
    cases.push_back({"mc", mc});
    RunConfig demo = base;
    demo.samples = 2;
    cases.push_back({"demo", demo});
    cases.push_back({"cover", base});
    bool ok = true;
    std::string detail;
    for (const auto& c : cases) {
      RunResult a = run(c.command, c.cfg), b = run(c.command, c.cfg);
      const bool same = a.report.dump() == b.report.dump() && a.curves == b.curves &&
                        (a.config ? a.config->dump() : "") == (b.config ? b.config->dump() : "");
      ok = ok && same;
      detail += " " + c.command + (same ? " identical" : " DIFFERS");
    }
    return Outcome{ok, "two runs per command:" + detail};
  });

  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << std::endl;
  return failures == 0 ? 0 : 1;
}
