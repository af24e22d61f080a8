// Command-line front end: solve, experiment, pareto, generate.
//
// Exit codes: 0 success, 2 parse/validation error, 3 I/O error,
// 4 solver failure (only with --strict).

#include "minimax/io.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitParse = 2;
constexpr int kExitIo = 3;
constexpr int kExitSolver = 4;

using namespace minimax;

// Subgradient runs a fixed iteration budget, so max-iterations is its
// normal way to finish.
bool failed(const SolverRun& run) {
  if (!run.error.empty()) return true;
  switch (run.result->status) {
    case SolveStatus::kConverged: return false;
    case SolveStatus::kSubproblemFailure: return true;
    case SolveStatus::kMaxIterations: return run.solver != "subgradient";
  }
  return true;
}

// CLI values fill fields the file leaves unset; with --override they win.
void apply_flags(ProblemFile& problem, const CLI::Option* rho_opt, double rho,
                 const CLI::Option* alpha_opt, double alpha, bool override_file) {
  if (rho_opt && rho_opt->count() && (override_file || !problem.solver.rho)) {
    problem.solver.rho = rho;
  }
  if (alpha_opt && alpha_opt->count() && override_file) {
    problem.region.alpha = alpha;
  }
}

std::pair<long, long> parse_trial_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ParseError("--trials expects LOW:HIGH, got '" + text + "'");
  try {
    return {std::stol(text.substr(0, colon)), std::stol(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw ParseError("--trials expects integers LOW:HIGH, got '" + text + "'");
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust resource allocation: max over decisions, min over a confidence region"};
  app.require_subcommand(1);

  std::string problem_path;
  std::string solver_name;
  std::string trace_path;
  double rho = 1.0;
  double alpha = 0.05;
  bool strict = false;
  bool override_file = false;

  auto* solve = app.add_subcommand("solve", "Solve one problem with one solver");
  solve->add_option("--problem", problem_path, "Problem JSON file")->required();
  solve->add_option("--solver", solver_name, "admm | apg | subgradient | markowitz")
      ->required()
      ->check(CLI::IsMember(solver_names()));
  auto* rho_opt = solve->add_option("--rho", rho, "ADMM penalty");
  auto* alpha_opt = solve->add_option("--alpha", alpha, "Confidence level alpha");
  solve->add_option("--trace", trace_path, "Write the iterate trace CSV here");
  solve->add_flag("--strict", strict, "Exit 4 when the solver fails");
  solve->add_flag("--override", override_file, "Command-line values replace file values");

  std::string solvers_list = "admm,apg,subgradient";
  std::string out_dir;
  auto* experiment = app.add_subcommand("experiment", "Run several solvers with gap tracing");
  experiment->add_option("--problem", problem_path, "Problem JSON file")->required();
  experiment->add_option("--solvers", solvers_list, "Comma-separated solver names");
  experiment->add_option("--out-dir", out_dir, "Directory for traces and summary")->required();
  experiment->add_flag("--strict", strict, "Exit 4 when any solver fails");

  int grid_points = 11;
  std::string frontier_path;
  bool cold = false;
  auto* pareto = app.add_subcommand("pareto", "Sweep the expected-outcome floor");
  pareto->add_option("--problem", problem_path, "Problem JSON file")->required();
  pareto->add_option("--grid", grid_points, "Number of floor values")->check(CLI::Range(2, 1000));
  pareto->add_option("--out", frontier_path, "Frontier CSV (default: stdout)");
  pareto->add_flag("--cold", cold, "Solve every point from the default start");
  pareto->add_flag("--strict", strict, "Exit 4 when any point fails");

  std::uint64_t seed = 0;
  int channels = 5;
  std::string trials = "200:500";
  double budget = 1.0;
  std::string out_path;
  auto* generate = app.add_subcommand("generate", "Write a synthetic lift-study problem file");
  generate->add_option("--seed", seed, "PRNG seed")->required();
  generate->add_option("--channels", channels, "Channel count")->check(CLI::PositiveNumber);
  generate->add_option("--trials", trials, "Trial range LOW:HIGH");
  generate->add_option("--budget", budget, "Budget B")->check(CLI::PositiveNumber);
  generate->add_option("--alpha", alpha, "Confidence level alpha");
  generate->add_option("--out", out_path, "Output problem file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitParse;
  }

  try {
    if (*generate) {
      const auto [low, high] = parse_trial_range(trials);
      ProblemFile problem;
      try {
        problem.study = generate_lift_study(seed, channels, low, high, budget);
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
      }
      problem.region.alpha = alpha;
      problem.seed = seed;
      write_problem(out_path, problem);
      return 0;
    }

    ProblemFile problem = read_problem(problem_path);

    if (*solve) {
      apply_flags(problem, rho_opt, rho, alpha_opt, alpha, override_file);
      if (solver_name != problem.solver.name) {
        problem.solver = SolverSpec{solver_name, problem.solver.rho};
      }
      const ConfidenceRegion region = build_region(problem);
      const OutcomeMatrix A = build_outcome_matrix(problem.study);
      const DecisionSpace space(problem.study.num_channels(), problem.study.budget);
      const auto settings = resolve_settings(problem.solver, !trace_path.empty());
      const SolverRun run = run_solver(solver_name, A, region, space, settings);
      std::cout << summary_line(run) << '\n';
      if (!trace_path.empty() && run.trace) {
        std::ostringstream csv;
        write_trace_csv(csv, *run.trace);
        write_text(trace_path, csv.str());
      }
      return strict && failed(run) ? kExitSolver : 0;
    }

    if (*experiment) {
      const auto names = split_list(solvers_list);
      for (const auto& name : names) {
        const auto& known = solver_names();
        if (std::find(known.begin(), known.end(), name) == known.end()) {
          throw ParseError("unknown solver '" + name + "'");
        }
      }
      const auto runs = run_experiment(problem, names, out_dir, &std::cout);
      const bool any_failed = std::any_of(runs.begin(), runs.end(), failed);
      return strict && any_failed ? kExitSolver : 0;
    }

    if (*pareto) {
      const ConfidenceRegion region = build_region(problem);
      const OutcomeMatrix A = build_outcome_matrix(problem.study);
      const DecisionSpace space(problem.study.num_channels(), problem.study.budget);
      const AdmmConfig config = resolve_settings(problem.solver, false).admm;
      std::vector<double> grid;
      if (problem.pareto && problem.pareto->grid) {
        grid = *problem.pareto->grid;
      } else {
        const int points = pareto->get_option("--grid")->count() || !problem.pareto ||
                                   !problem.pareto->points
                               ? grid_points
                               : *problem.pareto->points;
        grid = default_phi_grid(A, region, space, points, config);
      }
      std::vector<ParetoPoint> points;
      try {
        points = sweep(A, region, space, grid, config, !cold);
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
      }
      std::ostringstream csv;
      write_frontier_csv(csv, points);
      if (frontier_path.empty()) {
        std::cout << csv.str();
      } else {
        write_text(frontier_path, csv.str());
      }
      const bool any_failed = std::any_of(points.begin(), points.end(), [](const ParetoPoint& p) {
        return !p.ok() || p.status != SolveStatus::kConverged;
      });
      return strict && any_failed ? kExitSolver : 0;
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParse;
  }
  return 0;
}
