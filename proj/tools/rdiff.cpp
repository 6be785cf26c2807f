#include "rdiff/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  rdiff::RunConfig cfg;
  std::string out = ".";
  std::string tau, config;
  std::uint64_t seed = 0;

  CLI::App app{"Exact finite checks of a rectangle differentiation counterexample"};
  app.require_subcommand(1);
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--n", cfg.n, "level of the construction (>= 2)");
    sub->add_option("--eps", cfg.eps, "epsilon as p/q");
    sub->add_option("--delta", cfg.delta, "delta as p/q");
    sub->add_option("--lambda", cfg.lambda, "lambda as p/q");
    sub->add_option("--tau", tau, "support square side as p/q");
    sub->add_option("--seed", seed, "64-bit seed");
    sub->add_option("--trials", cfg.trials, "Monte Carlo trials");
    sub->add_option("--samples", cfg.samples, "sampled points, rectangles or instances");
    sub->add_option("--max-stages", cfg.max_stages, "exhaustion stages (1..3)");
    sub->add_option("--terms", cfg.partial_terms, "series terms for demo (1..3)");
    sub->add_option("--mode", cfg.mode, "full | relaxed-demo")->check(CLI::IsMember({"full", "relaxed-demo"}));
    sub->add_option("--config", config, "config.json written by generate");
    sub->add_option("--out", out, "output directory");
  };
  std::vector<CLI::App*> subs = {
      app.add_subcommand("generate", "side sets and configuration JSON"),
      app.add_subcommand("verify", "construction lemma suites"),
      app.add_subcommand("mc", "translation coverage statistics"),
      app.add_subcommand("demo", "series divergence report and curves"),
      app.add_subcommand("cover", "covering suite"),
  };
  for (auto* s : subs) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  std::string command;
  for (auto* s : subs)
    if (s->parsed()) command = s->get_name();
  for (auto* s : subs) {
    if (!s->parsed()) continue;
    if (s->count("--tau")) cfg.tau = tau;
    if (s->count("--seed")) cfg.seed = seed;
    if (s->count("--config")) cfg.config_path = config;
  }

  try {
    rdiff::RunResult r = rdiff::run(command, cfg);
    rdiff::write_outputs(r, out);
    std::cout << command << ": " << (r.exit_code == 0 ? "PASS" : "FAIL") << " (" << out << "/report.json)\n";
    return r.exit_code;
  } catch (const rdiff::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
