// Acceptance suite: one pass/fail line per criterion, exit 0 iff all pass.
//
//   zonokit_acceptance --config <rotating_target.json> --cli <zonokit binary>
//
// The heavy criteria share one simulation matrix (4 attack policies x 100
// seeds x 50 steps) so the whole suite stays well under its time budget.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "zonokit/zonokit.hpp"

using namespace zonokit;

namespace {

struct Args {
  std::string config;
  std::string cli;
};

Args parse_args(int argc, char** argv) {
  Args args;
  args.config = std::string(ZONOKIT_SOURCE_DIR) + "/configs/rotating_target.json";
  for (int i = 1; i + 1 < argc; ++i) {
    const std::string key = argv[i];
    if (key == "--config") args.config = argv[++i];
    if (key == "--cli") args.cli = argv[++i];
  }
  return args;
}

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d %-22s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::vector<AttackPolicy> attack_matrix() {
  std::vector<AttackPolicy> policies(4);
  policies[0].kind = AttackKind::none;
  policies[1].kind = AttackKind::large_bias;  // defaults: sensor 1, 1e3 * M
  policies[2].kind = AttackKind::random_stealthy;
  policies[2].stealth_scale = 0.5;
  policies[3].kind = AttackKind::rotating;
  return policies;
}

const char* kPolicyNames[4] = {"none", "large_bias", "random_stealthy", "rotating"};

struct MatrixRun {
  int policy;
  std::uint64_t seed;
  RunReport report;
};

std::vector<MatrixRun> run_matrix(const ScenarioConfig& base, int seeds, int steps,
                                  std::optional<PrunePolicy> prune_override,
                                  int budget_max = 8) {
  const auto policies = attack_matrix();
  std::vector<MatrixRun> runs(policies.size() * seeds);
  parallel_for(static_cast<int>(runs.size()), [&](int idx) {
    const int policy = idx / seeds;
    const std::uint64_t seed = static_cast<std::uint64_t>(idx % seeds);
    ScenarioConfig cfg = base;
    cfg.attack = policies[policy];
    cfg.seed = seed;
    cfg.steps = steps;
    if (prune_override) {
      cfg.prune = *prune_override;
      cfg.budget_max_members = budget_max;
    }
    runs[idx] = {policy, seed, run_scenario(cfg)};
  });
  return runs;
}

std::uint64_t binomial(int n, int k) {
  std::uint64_t out = 1;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

double elapsed_s(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  const Args args = parse_args(argc, argv);
  const ScenarioConfig base = load_config(args.config);
  const auto suite_start = std::chrono::steady_clock::now();

  // Shared matrix for criteria 1, 4, 5, 8: config prune policy, 100 seeds, 50 steps.
  const int kSeeds = 100, kSteps = 50;
  const std::vector<MatrixRun> matrix = run_matrix(base, kSeeds, kSteps, std::nullopt);
  const double matrix_seconds = elapsed_s(suite_start);

  // --- 1: inclusion guarantee -----------------------------------------------
  {
    int bad_steps = 0;
    std::string where;
    for (const auto& run : matrix) {
      for (const auto& s : run.report.steps) {
        if (!s.inclusion) {
          ++bad_steps;
          if (where.empty())
            where = std::string(kPolicyNames[run.policy]) + " seed " +
                    std::to_string(run.seed) + " k " + std::to_string(s.k);
        }
      }
    }
    std::ostringstream detail;
    detail << "4 policies x " << kSeeds << " seeds x " << kSteps << " steps, "
           << (bad_steps == 0 ? "state included at every step" : "misses: " + where) << " ("
           << matrix_seconds << " s)";
    report(1, "INCLUSION", bad_steps == 0, detail.str());
  }

  // --- 2: no-attack specialization ------------------------------------------
  {
    const auto t0 = std::chrono::steady_clock::now();
    std::atomic<int> violations{0};
    parallel_for(20, [&](int seed) {
      ScenarioConfig cfg = base;
      cfg.q = 0;
      cfg.attack = AttackPolicy::none_policy();
      cfg.seed = static_cast<std::uint64_t>(seed);
      cfg.steps = kSteps;
      const RunReport rep = run_scenario(cfg);
      for (const auto& s : rep.steps)
        if (s.members.size() != 1 || !s.inclusion) ++violations;
    });
    std::ostringstream detail;
    detail << "q = 0, 20 seeds x " << kSteps
           << " steps, single member containing x(k) every step (" << elapsed_s(t0) << " s)";
    report(2, "NO-ATTACK", violations == 0, detail.str());
  }

  // --- 3: subset count formula ----------------------------------------------
  {
    bool ok = true;
    for (int p = 1; p <= 8; ++p)
      for (int q = 0; q < p; ++q)
        ok = ok && enumerate_subsets(p, q).size() == binomial(p, p - q);
    report(3, "ETA-FORMULA", ok, "enumerate_subsets matches C(p, p-q) for all p <= 8, q < p");
  }

  // --- 4: detection ----------------------------------------------------------
  {
    bool bias_hit_at_1 = true;
    bool monotone = true;
    bool no_false_positive = true;
    for (const auto& run : matrix) {
      if (run.policy == 1) {
        // Persistent large bias on sensor 1 must be flagged at k = 1.
        const auto& d1 = run.report.steps.front().detected;
        if (std::find(d1.begin(), d1.end(), 1) == d1.end()) bias_hit_at_1 = false;
      }
      std::set<int> ever_attacked;
      std::size_t prev = 0;
      for (const auto& s : run.report.steps) {
        if (s.detected.size() < prev) monotone = false;
        prev = s.detected.size();
        for (std::size_t i = 0; i < s.sensors.size(); ++i)
          if (s.sensors[i].attacked) ever_attacked.insert(static_cast<int>(i) + 1);
      }
      for (int id : run.report.steps.back().detected)
        if (!ever_attacked.count(id)) no_false_positive = false;
    }
    std::ostringstream detail;
    detail << "large_bias flagged at k=1: " << (bias_hit_at_1 ? "yes" : "NO")
           << "; |D_k| non-decreasing: " << (monotone ? "yes" : "NO")
           << "; false positives: " << (no_false_positive ? "none" : "FOUND");
    report(4, "DETECTION", bias_hit_at_1 && monotone && no_false_positive, detail.str());
  }

  // --- 5: naive attacks are discarded ----------------------------------------
  {
    bool all_empty = true;
    long checked = 0;
    for (const auto& run : matrix) {
      if (run.policy != 1) continue;  // large_bias runs
      for (const auto& s : run.report.steps) {
        std::set<int> attacked;
        for (std::size_t i = 0; i < s.sensors.size(); ++i)
          if (s.sensors[i].attacked) attacked.insert(static_cast<int>(i) + 1);
        for (const auto& cand : s.candidates) {
          const bool tainted = std::any_of(cand.sensors.begin(), cand.sensors.end(),
                                           [&](int id) { return attacked.count(id) > 0; });
          if (!tainted) continue;
          ++checked;
          if (!cand.empty) all_empty = false;
        }
      }
    }
    std::ostringstream detail;
    detail << checked << " tainted candidates across all large_bias steps, all empty: "
           << (all_empty ? "yes" : "NO");
    report(5, "NAIVE-DISCARD", all_empty && checked > 0, detail.str());
  }

  // --- 6: complexity envelope -------------------------------------------------
  {
    const auto t0 = std::chrono::steady_clock::now();
    // (a) no pruning under a scripted stealthy attack: counts grow, never
    // shrink, and never exceed eta^k.
    ScenarioConfig wild = base;
    wild.prune = PrunePolicy::none;
    wild.reduction_order.reset();
    wild.steps = 6;
    wild.seed = 0;
    wild.attack.kind = AttackKind::scripted;
    wild.attack.rotating_magnitudes.clear();
    wild.attack.script.clear();
    for (int k = 1; k <= wild.steps; ++k)
      wild.attack.script.push_back({k, 1, Vector::Constant(1, 0.1)});
    const RunReport wild_rep = run_scenario(wild);
    bool envelope_ok = true, nondecreasing = true;
    double cap = 1.0;
    std::size_t prev = 1;
    std::ostringstream growth;
    for (const auto& s : wild_rep.steps) {
      cap *= 3.0;  // eta = 3 for p = 3, q = 1
      growth << s.members.size() << (s.k == wild.steps ? "" : ",");
      if (static_cast<double>(s.members.size()) > cap) envelope_ok = false;
      if (s.members.size() < prev) nondecreasing = false;
      prev = s.members.size();
    }

    // (b) budget(8): the full matrix again, capped collections, inclusion intact.
    const std::vector<MatrixRun> capped =
        run_matrix(base, kSeeds, kSteps, PrunePolicy::budget, 8);
    bool budget_ok = true, budget_inclusion = true;
    for (const auto& run : capped) {
      for (const auto& s : run.report.steps) {
        if (s.members.size() > 8) budget_ok = false;
        if (!s.inclusion) budget_inclusion = false;
      }
    }
    std::ostringstream detail;
    detail << "unpruned growth " << growth.str() << " (<= 3^k, non-decreasing: "
           << (nondecreasing ? "yes" : "NO") << "); budget(8) members <= 8: "
           << (budget_ok ? "yes" : "NO") << ", inclusion intact: "
           << (budget_inclusion ? "yes" : "NO") << " (" << elapsed_s(t0) << " s)";
    report(6, "COMPLEXITY", envelope_ok && nondecreasing && budget_ok && budget_inclusion,
           detail.str());
  }

  // --- 7: oracle equivalence ---------------------------------------------------
  {
    const auto t0 = std::chrono::steady_clock::now();
    const double band = 0.02;
    std::atomic<int> disagreements{0};
    std::atomic<int> empties{0};
    Rng seeder(20260810);
    std::vector<std::uint64_t> seeds(200);
    for (auto& s : seeds) s = static_cast<std::uint64_t>(seeder.uniform_int(1, 1 << 30));
    parallel_for(200, [&](int i) {
      Rng rng(seeds[i]);
      const int dim = rng.uniform_int(1, 3);
      const int gens = rng.uniform_int(1, 4);
      const int rows = rng.uniform_int(1, 2);
      const ConstrainedZonotope z = oracles::random_constrained(rng, dim, gens, rows);

      const bool lp_empty = is_empty(z);
      const bool grid_hit = oracles::grid_feasible_within(z.constraint_lhs, z.constraint_rhs, band);
      // Agreement outside the band: a non-empty verdict must be visible on the
      // grid; no grid point within the band forces the empty verdict.
      if (!lp_empty && !grid_hit) ++disagreements;
      if (lp_empty && grid_hit) {
        // inside the tolerance band: allowed, not counted as disagreement
      }
      if (lp_empty) ++empties;

      for (int t = 0; t < 2; ++t) {
        Vector x = rng.unit() < 0.5 ? Vector(sample_point(z.relaxed(), rng))
                                    : Vector(2.0 * rng.box(dim));
        Matrix lhs(z.constraint_count() + dim, z.generator_count());
        lhs << z.constraint_lhs, z.generators;
        Vector rhs(z.constraint_count() + dim);
        rhs << z.constraint_rhs, x - z.center;
        const bool inside = contains_point(z, x);
        const bool grid_inside = oracles::grid_feasible_within(lhs, rhs, band);
        if (inside && !grid_inside) ++disagreements;
      }
    });
    std::ostringstream detail;
    detail << "200 sets (" << empties.load() << " empty) + 400 point queries vs the complete "
           << "0.01-grid, disagreements outside the 0.02 band: " << disagreements.load() << " ("
           << elapsed_s(t0) << " s)";
    report(7, "ORACLE-EQUIVALENCE", disagreements == 0, detail.str());
  }

  // --- 8: error bound -----------------------------------------------------------
  {
    bool bound_holds = true, bounded = true;
    for (const auto& run : matrix) {
      const double cap = 2.0 * run.report.m_bound;
      for (const auto& s : run.report.steps) {
        if ((s.bound_center - s.x_true).norm() > s.bound_radius + 1e-9) bound_holds = false;
        if (s.bound_radius > cap) bounded = false;
      }
    }
    std::ostringstream detail;
    detail << "||c(k) - x(k)|| <= rad at every step of the criterion-1 matrix: "
           << (bound_holds ? "yes" : "NO") << "; rad < 2 M-hat: " << (bounded ? "yes" : "NO");
    report(8, "ERROR-BOUND", bound_holds && bounded, detail.str());
  }

  // --- 9: determinism -------------------------------------------------------------
  {
    bool identical = false;
    std::string detail = "skipped: --cli not supplied";
    if (!args.cli.empty()) {
      const auto dir1 = std::filesystem::temp_directory_path() / "zk_det1";
      const auto dir2 = std::filesystem::temp_directory_path() / "zk_det2";
      auto run_cli = [&](const std::filesystem::path& dir) {
        const std::string cmd = "\"" + args.cli + "\" run --config \"" + args.config +
                                "\" --seed 7 --out \"" + dir.string() + "\" > /dev/null 2>&1";
        return std::system(cmd.c_str()) == 0;
      };
      const bool ok = run_cli(dir1) && run_cli(dir2);
      auto slurp = [](const std::filesystem::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
      };
      const std::string b1 = slurp(dir1 / "report.jsonl");
      const std::string b2 = slurp(dir2 / "report.jsonl");
      identical = ok && !b1.empty() && b1 == b2;
      detail = "two CLI runs with --seed 7: " +
               std::string(identical ? "byte-identical JSONL (" + std::to_string(b1.size()) +
                                           " bytes)"
                                     : "OUTPUTS DIFFER");
    }
    report(9, "DETERMINISM", identical, detail);
  }

  std::printf("%s: %d/9 criteria passed in %.1f s\n", g_failures == 0 ? "OK" : "FAILED",
              9 - g_failures, elapsed_s(suite_start));
  return g_failures == 0 ? 0 : 1;
}
