// Command-line front end:
//   zonokit run      --config F [--seed N] [--steps K] [--prune POLICY] [--max-sets M] [--out DIR]
//   zonokit sweep    --config F --seeds A..B [--steps K] [--prune POLICY]
//   zonokit snapshot --report F --k K --out F.svg [--proj "r0c0,r0c1;r1c0,r1c1"]
//   zonokit check    --config F
// Exit code 0 iff all run invariants held. ZS_LOG=debug enables step logging.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "zonokit/zonokit.hpp"

namespace {

bool debug_log() {
  const char* env = std::getenv("ZS_LOG");
  return env != nullptr && std::string(env) == "debug";
}

void apply_overrides(zonokit::ScenarioConfig& cfg, const std::optional<std::uint64_t>& seed,
                     const std::optional<int>& steps, const std::optional<std::string>& prune,
                     const std::optional<int>& max_sets) {
  if (seed) cfg.seed = *seed;
  if (steps) cfg.steps = *steps;
  if (prune) zonokit::apply_prune_spec(cfg, *prune);
  if (max_sets) {
    cfg.prune = zonokit::PrunePolicy::budget;
    cfg.budget_max_members = *max_sets;
  }
}

int run_one(const zonokit::ScenarioConfig& cfg, const std::optional<std::string>& out_dir) {
  const zonokit::RunReport report = zonokit::run_scenario(cfg);
  if (debug_log()) {
    for (const auto& s : report.steps)
      std::cerr << "k=" << s.k << " members=" << s.members.size() << " radius=" << s.bound_radius
                << " detected=" << s.detected.size() << " inclusion=" << s.inclusion << "\n";
  }
  std::optional<std::string> dir = out_dir ? out_dir : cfg.output_dir;
  if (dir) {
    std::filesystem::create_directories(*dir);
    zonokit::emit_jsonl(report, *dir + "/report.jsonl");
    zonokit::emit_csv_metrics(report, *dir + "/metrics.csv");
  }
  std::cout << "scenario " << cfg.name << " seed " << cfg.seed << ": steps=" << report.steps.size()
            << " inclusion_rate=" << report.inclusion_rate << " max_members=" << report.max_members
            << " mean_radius=" << report.mean_bound_radius
            << " first_detection_k=" << report.first_detection_k << " M=" << report.m_bound
            << (report.invariants_ok ? " [ok]" : " [INVARIANT VIOLATED]") << "\n";
  return report.invariants_ok ? 0 : 1;
}

zonokit::Matrix parse_projection(const std::string& spec, int state_dim) {
  zonokit::Matrix proj(2, state_dim);
  std::stringstream rows(spec);
  std::string row;
  int r = 0;
  while (std::getline(rows, row, ';')) {
    if (r >= 2) throw zonokit::config_error("--proj: expected exactly two rows");
    std::stringstream cols(row);
    std::string cell;
    int c = 0;
    while (std::getline(cols, cell, ',')) {
      if (c >= state_dim) throw zonokit::config_error("--proj: too many columns");
      proj(r, c++) = std::stod(cell);
    }
    if (c != state_dim) throw zonokit::config_error("--proj: wrong column count");
    ++r;
  }
  if (r != 2) throw zonokit::config_error("--proj: expected exactly two rows");
  return proj;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zonokit: set-based resilient state estimation under sensor attacks"};
  app.require_subcommand(1);

  std::string config_path, report_path, out_path, seeds_spec, proj_spec;
  std::optional<std::uint64_t> seed;
  std::optional<int> steps, max_sets;
  std::optional<std::string> prune, out_dir;
  int snap_k = 1;

  auto* run = app.add_subcommand("run", "simulate one scenario and emit reports");
  run->add_option("--config", config_path, "scenario JSON file")->required();
  run->add_option("--seed", seed, "override the config seed");
  run->add_option("--steps", steps, "override the step count");
  run->add_option("--prune", prune, "none|drop_empty_and_contained|merge_intersecting|overbound_all|budget:N");
  run->add_option("--max-sets", max_sets, "shortcut for --prune budget:N");
  run->add_option("--out", out_dir, "directory for report.jsonl and metrics.csv");

  auto* sweep = app.add_subcommand("sweep", "run a seed range and aggregate inclusion rates");
  sweep->add_option("--config", config_path, "scenario JSON file")->required();
  sweep->add_option("--seeds", seeds_spec, "inclusive range A..B")->required();
  sweep->add_option("--steps", steps, "override the step count");
  sweep->add_option("--prune", prune, "prune policy override");

  auto* snapshot = app.add_subcommand("snapshot", "render one recorded step as SVG");
  snapshot->add_option("--report", report_path, "report.jsonl produced by run")->required();
  snapshot->add_option("--k", snap_k, "step to render")->required();
  snapshot->add_option("--out", out_path, "output SVG path")->required();
  snapshot->add_option("--proj", proj_spec, "2 x n projection, rows ';'-separated, entries ','-separated");

  auto* check = app.add_subcommand("check", "validate a scenario's standing assumptions");
  check->add_option("--config", config_path, "scenario JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      zonokit::ScenarioConfig cfg = zonokit::load_config(config_path);
      apply_overrides(cfg, seed, steps, prune, max_sets);
      return run_one(cfg, out_dir);
    }

    if (sweep->parsed()) {
      const auto dots = seeds_spec.find("..");
      if (dots == std::string::npos)
        throw zonokit::config_error("--seeds: expected a range like 0..19");
      const std::uint64_t lo = std::stoull(seeds_spec.substr(0, dots));
      const std::uint64_t hi = std::stoull(seeds_spec.substr(dots + 2));
      if (hi < lo) throw zonokit::config_error("--seeds: range end before start");
      zonokit::ScenarioConfig base = zonokit::load_config(config_path);
      apply_overrides(base, std::nullopt, steps, prune, std::nullopt);

      std::vector<std::future<zonokit::RunReport>> jobs;
      for (std::uint64_t s = lo; s <= hi; ++s) {
        zonokit::ScenarioConfig cfg = base;
        cfg.seed = s;
        jobs.push_back(std::async(std::launch::async,
                                  [cfg]() { return zonokit::run_scenario(cfg); }));
      }
      bool all_ok = true;
      double inclusion_sum = 0.0;
      int max_members = 0;
      for (std::uint64_t s = lo; s <= hi; ++s) {
        const zonokit::RunReport rep = jobs[s - lo].get();
        all_ok = all_ok && rep.invariants_ok;
        inclusion_sum += rep.inclusion_rate;
        max_members = std::max(max_members, rep.max_members);
        std::cout << "seed " << s << ": inclusion_rate=" << rep.inclusion_rate
                  << " max_members=" << rep.max_members << "\n";
      }
      const double n = static_cast<double>(hi - lo + 1);
      std::cout << "sweep: seeds=" << (hi - lo + 1) << " mean_inclusion=" << inclusion_sum / n
                << " max_members=" << max_members << (all_ok ? " [ok]" : " [INVARIANT VIOLATED]")
                << "\n";
      return all_ok ? 0 : 1;
    }

    if (snapshot->parsed()) {
      const zonokit::RunReport rep = zonokit::load_report(report_path);
      std::optional<zonokit::Matrix> proj;
      if (!proj_spec.empty())
        proj = parse_projection(proj_spec, rep.config.build_system().state_dim());
      zonokit::emit_svg_snapshot(rep, snap_k, out_path, proj);
      std::cout << "wrote " << out_path << "\n";
      return 0;
    }

    if (check->parsed()) {
      const zonokit::ScenarioConfig cfg = zonokit::load_config_unvalidated(config_path);
      zonokit::SystemModel sys = cfg.build_system();
      const zonokit::AssumptionReport rep = zonokit::validate_assumptions(sys, cfg.q);
      std::cout << rep.summary() << "\n";
      if (!sys.state_bound) {
        std::cout << "estimated state bound M = "
                  << zonokit::estimate_state_bound(sys, cfg.input.bound()) << "\n";
      }
      return rep.all_ok() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
