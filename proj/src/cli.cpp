#include "rdiff/cli.hpp"

#include "rdiff/assembly.hpp"
#include "rdiff/construction.hpp"
#include "rdiff/covering.hpp"
#include "rdiff/translation.hpp"

#include <filesystem>
#include <fstream>

namespace rdiff {

namespace {

Scalar rational(const std::string& name, const std::string& text) {
  try {
    return parse_scalar(text);
  } catch (const std::invalid_argument&) {
    throw UsageError("--" + name + ": not a rational: '" + text + "'");
  }
}

Scalar open_unit(const std::string& name, const std::string& text) {
  Scalar v = rational(name, text);
  if (v <= 0 || v >= 1) throw UsageError("--" + name + " must lie in (0,1)");
  return v;
}

std::uint64_t need_seed(const RunConfig& c) {
  if (!c.seed) throw UsageError("--seed is required for this command");
  return *c.seed;
}

struct Built {
  SidePair pair;
  Configuration cfg;
  nlohmann::json config;
};

Built build(const RunConfig& c) {
  Built b;
  Scalar tau, eps, delta;
  if (c.config_path) {
    std::ifstream in(*c.config_path);
    if (!in) throw UsageError("cannot read " + *c.config_path);
    nlohmann::json j;
    try {
      in >> j;
      b.pair = pair_from_json(j.at("pair"));
      tau = parse_scalar(j.at("tau").get<std::string>());
      eps = parse_scalar(j.at("eps").get<std::string>());
      delta = parse_scalar(j.at("delta").get<std::string>());
    } catch (const std::exception& e) {
      throw UsageError("malformed " + *c.config_path + ": " + e.what());
    }
  } else {
    eps = open_unit("eps", c.eps);
    delta = open_unit("delta", c.delta);
    if (c.mode == "relaxed-demo") {
      b.pair = relaxed_demo_pair();
      tau = c.tau ? rational("tau", *c.tau) : Scalar(1, 128);
    } else if (c.mode == "full") {
      if (c.n < 2) throw UsageError("--n must be >= 2");
      const Scalar lambda = open_unit("lambda", c.lambda);
      try {
        b.pair = generate_pair(c.n, eps, delta, lambda);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      } catch (const std::domain_error& e) {
        throw UsageError(e.what());
      }
      tau = c.tau ? rational("tau", *c.tau) : default_tau(b.pair.b);
    } else {
      throw UsageError("--mode must be full or relaxed-demo");
    }
  }
  try {
    b.cfg = build_config(b.pair, tau, eps, delta);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  b.config = {{"pair", to_json(b.pair)},
              {"tau", to_string(tau)},
              {"eps", to_string(eps)},
              {"delta", to_string(delta)},
              {"configuration", to_json(b.cfg)}};
  return b;
}

RunResult finish(nlohmann::json report, bool pass) {
  RunResult r;
  report["pass"] = pass;
  r.report = std::move(report);
  r.exit_code = pass ? 0 : 1;
  return r;
}

RunResult cmd_generate(const RunConfig& c) {
  Built b = build(c);
  LemmaReport v = validate_pair(b.pair.C, b.pair.b, b.cfg.eps, b.cfg.delta);
  // the relaxed demo switches conditions 2-5 off by design
  const bool pass = b.pair.mode == PairMode::RelaxedDemo ? conditions_hold(v, 1) : v.pass();
  RunResult r = finish({{"validation", to_json(v)}}, pass);
  r.config = b.config;
  return r;
}

RunResult cmd_verify(const RunConfig& c) {
  const std::uint64_t seed = need_seed(c);
  Built b = build(c);
  std::vector<std::pair<std::string, LemmaReport>> suites = {
      {"area_sandwich", verify_area_sandwich(b.cfg)},
      {"averages", verify_average_lemma(b.cfg, 1u << 16, 256, seed)},
      {"norms", verify_norms(b.cfg)},
      {"case_bounds", verify_case_bounds(b.cfg, c.samples, seed)},
      {"exceptional", verify_exceptional_and_large(b.cfg)},
      {"large_rectangles", verify_large_rectangles(b.cfg, c.samples, seed)},
  };
  nlohmann::json rep = nlohmann::json::object();
  bool pass = true;
  for (const auto& [name, s] : suites) {
    rep[name] = to_json(s);
    pass = pass && s.pass();
  }
  RunResult r = finish({{"suites", rep}}, pass);
  r.config = b.config;
  return r;
}

RunResult cmd_mc(const RunConfig& c) {
  const std::uint64_t seed = need_seed(c);
  if (c.trials == 0) throw UsageError("--trials must be >= 1");
  Built b = build(c);
  nlohmann::json rep;
  bool pass = true;
  const mpz_class N = translate_count(b.cfg);
  rep["N"] = N.get_str();
  RectUnion F, D;
  try {
    F = explicit_F(b.cfg);
    D = explicit_d_hat(b.cfg);
  } catch (const std::length_error& e) {
    rep["error"] = e.what();
    return finish(rep, false);
  }
  try {
    if (!N.fits_ulong_p()) throw std::length_error("N = " + N.get_str() + " translates");
    rep["coverage"] = to_json(mc_coverage(F, D, N.get_ui(), c.trials, seed));
    pass = rep["coverage"]["pass"].get<bool>();
  } catch (const std::length_error& e) {
    rep["coverage"] = {{"error", std::string("too many translates to materialize: ") + e.what()}, {"pass", false}};
    pass = false;
  }
  // D = empty, N = 1: the mean of |F0| should match |F|
  CoverageStats one = mc_coverage(F, RectUnion(), 1, c.trials, seed);
  rep["single_translate"] = to_json(one);
  rep["single_translate"]["area_F"] = to_string(area_union(F));
  pass = pass && one.pass;
  RunResult r = finish(rep, pass);
  r.config = b.config;
  return r;
}

RunResult cmd_demo(const RunConfig& c) {
  const std::uint64_t seed = need_seed(c);
  if (c.partial_terms < 1 || c.partial_terms > 3) throw UsageError("--terms must lie in 1..3");
  if (c.max_stages < 1 || c.max_stages > 3) throw UsageError("--max-stages must lie in 1..3");
  if (c.samples == 0) throw UsageError("--samples must be >= 1");
  DemoReport d = demo_divergence(c.partial_terms, c.samples, seed, c.max_stages);
  RunResult r = finish({{"demo", to_json(d)}}, d.report.pass());
  r.curves = d.curves;
  return r;
}

RunResult cmd_cover(const RunConfig& c) {
  const std::uint64_t seed = need_seed(c);
  if (c.samples == 0) throw UsageError("--samples must be >= 1");
  LemmaReport s = verify_covering_suite(c.samples, seed);
  return finish({{"covering", to_json(s)}}, s.pass());
}

}  // namespace

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j = {{"n", c.n},           {"eps", c.eps},
                      {"delta", c.delta},   {"lambda", c.lambda},
                      {"trials", c.trials}, {"samples", c.samples},
                      {"max_stages", c.max_stages}, {"partial_terms", c.partial_terms},
                      {"mode", c.mode}};
  j["tau"] = c.tau ? nlohmann::json(*c.tau) : nlohmann::json(nullptr);
  j["seed"] = c.seed ? nlohmann::json(*c.seed) : nlohmann::json(nullptr);
  j["config"] = c.config_path ? nlohmann::json(*c.config_path) : nlohmann::json(nullptr);
  return j;
}

RunResult run(const std::string& command, const RunConfig& cfg) {
  RunResult r;
  if (command == "generate")
    r = cmd_generate(cfg);
  else if (command == "verify")
    r = cmd_verify(cfg);
  else if (command == "mc")
    r = cmd_mc(cfg);
  else if (command == "demo")
    r = cmd_demo(cfg);
  else if (command == "cover")
    r = cmd_cover(cfg);
  else
    throw UsageError("unknown command '" + command + "'");
  r.report["command"] = command;
  r.report["run"] = to_json(cfg);
  return r;
}

void write_outputs(const RunResult& r, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto put = [&](const std::string& name, const std::string& body) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
    out << body;
  };
  put("report.json", r.report.dump(2) + "\n");
  if (r.config) put("config.json", r.config->dump(2) + "\n");
  if (!r.curves.empty()) {
    std::string csv = std::string(kCurvesHeader) + "\n";
    for (const auto& row : r.curves) csv += row + "\n";
    put("curves.csv", csv);
  }
}

}  // namespace rdiff
