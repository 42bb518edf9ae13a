// ctpe: run constrained-TPE benchmark experiments and summarize them.
//
//   ctpe run --problem quad_overlap --gamma-true 0.1 --methods ctpe,random --budget 50 --seeds 20
//   ctpe summarize results/a/log.jsonl results/b/log.jsonl --out summary
//   ctpe oracle --problem quad_shift --threshold 4
//
// Every flag can also be set through a CTPE_* environment variable
// (CTPE_PROBLEM, CTPE_BUDGET, ...); the command line wins.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ctpe/benchmarks.hpp"
#include "ctpe/harness.hpp"

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained TPE benchmark harness"};
  app.require_subcommand(1);

  std::string problem;
  std::vector<double> gamma_true;
  std::vector<double> thresholds;

  auto* run = app.add_subcommand("run", "Run a seeded experiment matrix and write a trajectory log");
  std::string methods = "ctpe,naive,vanilla_tpe,random";
  int budget = 200;
  std::size_t seed_count = 50;
  std::uint64_t seed_base = 0;
  int n_partial = 0;
  std::vector<std::size_t> cheap;
  std::string run_out = "results";
  int n_init = 10;
  int n_samples = 24;
  run->add_option("--problem", problem, "Benchmark problem name")->required()->envname("CTPE_PROBLEM");
  run->add_option("--gamma-true", gamma_true, "Constraint quantile(s) used to calibrate thresholds")
      ->delimiter(',')
      ->envname("CTPE_GAMMA_TRUE");
  run->add_option("--threshold", thresholds, "Explicit constraint threshold(s)")
      ->delimiter(',')
      ->envname("CTPE_THRESHOLD");
  run->add_option("--methods", methods, "Comma-separated subset of ctpe,naive,vanilla_tpe,random")
      ->envname("CTPE_METHODS")
      ->capture_default_str();
  run->add_option("--budget", budget, "Evaluations per run")->envname("CTPE_BUDGET")->capture_default_str();
  run->add_option("--seeds", seed_count, "Number of seeds")->envname("CTPE_SEEDS")->capture_default_str();
  run->add_option("--seed-base", seed_base, "First seed")->envname("CTPE_SEED_BASE")->capture_default_str();
  run->add_option("--n-partial", n_partial, "Partial observations for knowledge augmentation")
      ->envname("CTPE_N_PARTIAL")
      ->capture_default_str();
  run->add_option("--cheap", cheap, "Indices of cheap constraints")->delimiter(',')->envname("CTPE_CHEAP");
  run->add_option("--out", run_out, "Output directory")->envname("CTPE_OUT")->capture_default_str();
  run->add_option("--n-init", n_init, "Initial random evaluations")->envname("CTPE_N_INIT")->capture_default_str();
  run->add_option("--n-samples", n_samples, "Candidates drawn per component")
      ->envname("CTPE_N_SAMPLES")
      ->capture_default_str();

  auto* summarize = app.add_subcommand("summarize", "Summarize one or more trajectory logs");
  std::vector<std::string> logs;
  std::string summary_out = "summary";
  summarize->add_option("logs", logs, "Log files")->required()->check(CLI::ExistingFile);
  summarize->add_option("--out", summary_out, "Output directory")->envname("CTPE_OUT")->capture_default_str();

  auto* oracle = app.add_subcommand("oracle", "Print the best feasible objective of a benchmark");
  bool grid = false;
  std::size_t grid_points = 1000;
  oracle->add_option("--problem", problem, "Benchmark problem name")->required()->envname("CTPE_PROBLEM");
  oracle->add_option("--threshold", thresholds, "Constraint threshold(s)")
      ->delimiter(',')
      ->envname("CTPE_THRESHOLD");
  oracle->add_option("--gamma-true", gamma_true, "Constraint quantile(s) used to calibrate thresholds")
      ->delimiter(',')
      ->envname("CTPE_GAMMA_TRUE");
  oracle->add_flag("--grid", grid, "Also recompute the oracle by brute-force grid search");
  oracle->add_option("--grid-points", grid_points, "Grid points per dimension")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      ctpe::ExperimentConfig cfg;
      cfg.problem = problem;
      cfg.gamma_true = gamma_true;
      cfg.thresholds = thresholds;
      std::stringstream ss(methods);
      for (std::string name; std::getline(ss, name, ',');) {
        if (!name.empty()) cfg.methods.push_back(ctpe::parse_mode(name));
      }
      cfg.budget = budget;
      cfg.seeds = ctpe::seed_range(seed_base, seed_count);
      cfg.n_partial = n_partial;
      cfg.cheap = cheap;
      cfg.out_dir = run_out;
      cfg.n_init = n_init;
      cfg.n_samples = n_samples;
      const auto out = ctpe::run_experiment(cfg);
      std::cout << "setting " << out.setting << '\n'
                << "trajectories " << out.runs.size() << '\n'
                << "log " << out.log_path.string() << '\n';
    } else if (*summarize) {
      std::vector<std::filesystem::path> paths(logs.begin(), logs.end());
      const auto s = ctpe::summarize(paths, summary_out);
      std::cout << "reference\tother\tcheckpoint\twins/losses/ties\n";
      for (const auto& c : s.comparisons) {
        std::cout << c.reference << '\t' << c.other << '\t' << c.checkpoint << '\t' << c.wlt.wins
                  << '/' << c.wlt.losses << '/' << c.wlt.ties << '\n';
      }
      std::cout << "written to " << summary_out << '\n';
    } else if (*oracle) {
      const auto p = ctpe::make_problem(problem);
      ctpe::ExperimentConfig cfg;
      cfg.problem = problem;
      cfg.gamma_true = gamma_true;
      cfg.thresholds = thresholds;
      const auto t = ctpe::resolve_thresholds(cfg);
      std::cout << "problem " << p.name << "\nthreshold";
      for (double v : t) std::cout << ' ' << fmt(v);
      std::cout << '\n';
      const auto closed = p.oracle(t);
      std::cout << "oracle " << (closed ? fmt(*closed) : std::string("none")) << '\n';
      if (grid) {
        const auto g = ctpe::grid_search_oracle(p, t, grid_points);
        std::cout << "grid_oracle " << (g ? fmt(*g) : std::string("none")) << '\n';
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
