// Command line front end for the evaluation pipeline. Each subcommand maps
// onto one pipeline stage and operates on a run directory.

#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "emdm/emdm.hpp"
#include "emdm/http_transport.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string run_dir;  // overrides the config when set
  std::string policy;   // overrides the config when set
};

emdm::RunConfig load_config(const CommonOpts& opts) {
  emdm::RunConfig c = emdm::load_run_config(opts.config_path);
  if (!opts.run_dir.empty()) c.run_dir = opts.run_dir;
  if (!opts.policy.empty()) c.policy = emdm::cache_policy_from_string(opts.policy);
  return c;
}

// Only live runs need a real transport; cache and replay runs never touch
// the network and work without one.
std::shared_ptr<emdm::Transport> make_transport(const emdm::RunConfig& c) {
  if (c.policy == emdm::CachePolicy::LIVE_THEN_CACHE)
    return std::make_shared<emdm::HttpTransport>();
  return nullptr;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "Run configuration file (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--run-dir", opts.run_dir, "Run directory (overrides the config)");
  cmd->add_option("--policy", opts.policy, "Response policy: live, cache, or replay")
      ->check(CLI::IsMember({"live", "cache", "replay"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark evaluation pipeline with difficulty-weighted scoring"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::vector<double> upper_bounds;

  CLI::App* baseline = app.add_subcommand(
      "baseline", "Run the baseline model in both prompt modes and grade it");
  CLI::App* categorize = app.add_subcommand(
      "categorize", "Bucket samples by the baseline's unguided/guided behavior");
  CLI::App* optimize = app.add_subcommand(
      "optimize", "Fit category weights from the weight-fit models' scores");
  CLI::App* score = app.add_subcommand(
      "score", "Score the baseline and candidates and write the report");
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Re-fit weights across upper bounds and report model spread");
  for (CLI::App* cmd : {baseline, categorize, optimize, score, sweep}) add_common(cmd, opts);
  sweep->add_option("--upper-bounds", upper_bounds, "Upper bounds to sweep")
      ->delimiter(',')
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    emdm::RunConfig c = load_config(opts);
    if (baseline->parsed()) {
      emdm::cmd_baseline(c, make_transport(c), std::cout);
    } else if (categorize->parsed()) {
      emdm::cmd_categorize(c, std::cout);
    } else if (optimize->parsed()) {
      emdm::cmd_optimize(c, make_transport(c), std::cout);
    } else if (score->parsed()) {
      emdm::cmd_score(c, make_transport(c), std::cout);
    } else if (sweep->parsed()) {
      emdm::cmd_sweep(c, make_transport(c), upper_bounds, std::cout);
    }
  } catch (const emdm::Error& e) {
    std::cerr << "error [" << emdm::to_string(e.code()) << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
