#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "levyflow/config.hpp"
#include "levyflow/errors.hpp"
#include "levyflow/suites.hpp"

int main(int argc, char** argv) {
  CLI::App app{"levyflow: nonlocal drift-diffusion experiment suites"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  std::uint64_t seed = 1;
  int parallel = 1;
  std::string chosen;

  for (const std::string& name : levyflow::suite_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " suite");
    sub->add_option("--config", config_path, "key = value configuration file");
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "random seed")->capture_default_str();
    sub->add_option("--parallel", parallel, "ensemble worker threads")
        ->capture_default_str();
    sub->callback([&chosen, name] { chosen = name; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    levyflow::Config cfg;
    if (!config_path.empty()) cfg = levyflow::Config::parse_file(config_path);
    levyflow::ExperimentConfig exp =
        levyflow::decode_experiment(chosen, cfg, out_dir, seed, parallel);
    levyflow::SuiteResult res = levyflow::run_suite(exp);
    std::printf("%s: %s (%s)\n", res.suite.c_str(), res.pass ? "pass" : "FAIL",
                res.summary_path.c_str());
    return res.pass ? 0 : 1;
  } catch (const levyflow::ConfigError& err) {
    std::fprintf(stderr, "config error: %s\n", err.what());
    return 2;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 3;
  }
}
