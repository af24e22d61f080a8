// Problem files (JSON), synthetic lift-study generation, trace/frontier CSV
// output and experiment orchestration used by the command-line tool.

#ifndef MINIMAX_IO_HPP_
#define MINIMAX_IO_HPP_

#include "minimax/decision.hpp"
#include "minimax/model.hpp"
#include "minimax/pareto.hpp"
#include "minimax/regions.hpp"
#include "minimax/solvers.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace minimax {

inline constexpr int kSchemaVersion = 1;

/// Malformed or invalid problem description.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// File could not be read or written.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class RegionKind { kEllipsoid, kBinomialLR };

struct RegionSpec {
  RegionKind kind = RegionKind::kBinomialLR;
  double alpha = 0.05;
  std::optional<Matrix> shape;  // explicit P for ellipsoids; Fisher-based otherwise

  bool operator==(const RegionSpec& other) const {
    if (kind != other.kind || alpha != other.alpha || shape.has_value() != other.shape.has_value()) {
      return false;
    }
    return !shape || *shape == *other.shape;
  }
};

struct SolverSpec {
  std::string name = "admm";
  std::optional<double> rho;
  std::optional<double> eps_abs;
  std::optional<double> eps_rel;
  std::optional<int> max_iterations;
  std::optional<bool> trace_gap;
  std::optional<double> initial_step;

  bool operator==(const SolverSpec&) const = default;
};

struct ParetoSpec {
  std::optional<std::vector<double>> grid;  // explicit descending floors
  std::optional<int> points;                // or a default grid with this many points

  bool operator==(const ParetoSpec&) const = default;
};

struct ProblemFile {
  int schema_version = kSchemaVersion;
  LiftStudy study;
  RegionSpec region;
  SolverSpec solver;
  std::optional<ParetoSpec> pareto;
  std::optional<std::uint64_t> seed;

  bool operator==(const ProblemFile&) const = default;
};

inline const std::vector<std::string>& solver_names() {
  static const std::vector<std::string> names{"admm", "apg", "subgradient", "markowitz"};
  return names;
}

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& j, const std::set<std::string>& allowed,
                           const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      throw ParseError(where + ": unknown field '" + item.key() + "'");
    }
  }
}

template <typename T>
T required(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(where + "." + key + ": " + e.what());
  }
}

template <typename T>
std::optional<T> optional_field(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) return std::nullopt;
  return required<T>(j, key, where);
}

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ParseError(where + ": expected a non-empty matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ParseError(where + ": ragged matrix");
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      if (!row[static_cast<std::size_t>(k)].is_number()) throw ParseError(where + ": non-numeric entry");
      m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
    }
  }
  return m;
}

inline std::string_view region_kind_name(RegionKind kind) {
  return kind == RegionKind::kEllipsoid ? "ellipsoid" : "binomial-lr";
}

}  // namespace detail

inline nlohmann::json to_json(const ProblemFile& p) {
  using nlohmann::json;
  json channels = json::array();
  for (const auto& ch : p.study.channels) {
    channels.push_back({{"trials_holdout", ch.trials_holdout},
                        {"successes_holdout", ch.successes_holdout},
                        {"trials_marketing", ch.trials_marketing},
                        {"successes_marketing", ch.successes_marketing},
                        {"cost", ch.cost}});
  }
  json region{{"kind", detail::region_kind_name(p.region.kind)}, {"alpha", p.region.alpha}};
  if (p.region.shape) region["shape"] = detail::matrix_to_json(*p.region.shape);

  json solver{{"name", p.solver.name}};
  if (p.solver.rho) solver["rho"] = *p.solver.rho;
  if (p.solver.eps_abs) solver["eps_abs"] = *p.solver.eps_abs;
  if (p.solver.eps_rel) solver["eps_rel"] = *p.solver.eps_rel;
  if (p.solver.max_iterations) solver["max_iterations"] = *p.solver.max_iterations;
  if (p.solver.trace_gap) solver["trace_gap"] = *p.solver.trace_gap;
  if (p.solver.initial_step) solver["initial_step"] = *p.solver.initial_step;

  json out{{"schema_version", p.schema_version},
           {"study", {{"budget", p.study.budget}, {"channels", channels}}},
           {"region", region},
           {"solver", solver}};
  if (p.pareto) {
    json pareto = json::object();
    if (p.pareto->grid) pareto["grid"] = *p.pareto->grid;
    if (p.pareto->points) pareto["points"] = *p.pareto->points;
    out["pareto"] = pareto;
  }
  if (p.seed) out["seed"] = *p.seed;
  return out;
}

/// Parses and validates a problem description. Unknown fields are errors.
inline ProblemFile problem_from_json(const nlohmann::json& j) {
  using detail::optional_field;
  using detail::reject_unknown;
  using detail::required;
  using nlohmann::json;

  reject_unknown(j, {"schema_version", "study", "region", "solver", "pareto", "seed"}, "problem");
  ProblemFile p;
  p.schema_version = required<int>(j, "schema_version", "problem");
  if (p.schema_version != kSchemaVersion) {
    throw ParseError("problem: unsupported schema_version " + std::to_string(p.schema_version));
  }

  const json& study = j.contains("study") ? j.at("study") : throw ParseError("problem: missing field 'study'");
  reject_unknown(study, {"budget", "channels"}, "study");
  p.study.budget = required<double>(study, "budget", "study");
  const json& channels = study.contains("channels") ? study.at("channels")
                                                    : throw ParseError("study: missing field 'channels'");
  if (!channels.is_array()) throw ParseError("study.channels: expected an array");
  for (std::size_t i = 0; i < channels.size(); ++i) {
    const std::string where = "study.channels[" + std::to_string(i) + "]";
    const json& c = channels[i];
    reject_unknown(c, {"trials_holdout", "successes_holdout", "trials_marketing",
                       "successes_marketing", "cost"}, where);
    ChannelData ch;
    ch.trials_holdout = required<long>(c, "trials_holdout", where);
    ch.successes_holdout = required<long>(c, "successes_holdout", where);
    ch.trials_marketing = required<long>(c, "trials_marketing", where);
    ch.successes_marketing = required<long>(c, "successes_marketing", where);
    ch.cost = required<double>(c, "cost", where);
    p.study.channels.push_back(ch);
  }
  try {
    validate(p.study);
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("study: ") + e.what());
  }

  if (j.contains("region")) {
    const json& r = j.at("region");
    reject_unknown(r, {"kind", "alpha", "shape"}, "region");
    const auto kind = required<std::string>(r, "kind", "region");
    if (kind == "ellipsoid") {
      p.region.kind = RegionKind::kEllipsoid;
    } else if (kind == "binomial-lr") {
      p.region.kind = RegionKind::kBinomialLR;
    } else {
      throw ParseError("region.kind: expected 'ellipsoid' or 'binomial-lr', got '" + kind + "'");
    }
    p.region.alpha = optional_field<double>(r, "alpha", "region").value_or(0.05);
    if (!(p.region.alpha > 0.0 && p.region.alpha < 1.0)) {
      throw ParseError("region.alpha: must lie in (0, 1)");
    }
    if (r.contains("shape")) {
      if (p.region.kind != RegionKind::kEllipsoid) {
        throw ParseError("region.shape: only valid for ellipsoid regions");
      }
      p.region.shape = detail::matrix_from_json(r.at("shape"), "region.shape");
      const auto dim = static_cast<Eigen::Index>(p.study.num_params());
      if (p.region.shape->rows() != dim || p.region.shape->cols() != dim) {
        throw ParseError("region.shape: must be 2n x 2n");
      }
    }
  }

  if (j.contains("solver")) {
    const json& s = j.at("solver");
    reject_unknown(s, {"name", "rho", "eps_abs", "eps_rel", "max_iterations", "trace_gap",
                       "initial_step"}, "solver");
    p.solver.name = required<std::string>(s, "name", "solver");
    const auto& names = solver_names();
    if (std::find(names.begin(), names.end(), p.solver.name) == names.end()) {
      throw ParseError("solver.name: unknown solver '" + p.solver.name + "'");
    }
    p.solver.rho = optional_field<double>(s, "rho", "solver");
    p.solver.eps_abs = optional_field<double>(s, "eps_abs", "solver");
    p.solver.eps_rel = optional_field<double>(s, "eps_rel", "solver");
    p.solver.max_iterations = optional_field<int>(s, "max_iterations", "solver");
    p.solver.trace_gap = optional_field<bool>(s, "trace_gap", "solver");
    p.solver.initial_step = optional_field<double>(s, "initial_step", "solver");
  }

  if (j.contains("pareto")) {
    const json& pj = j.at("pareto");
    reject_unknown(pj, {"grid", "points"}, "pareto");
    ParetoSpec spec;
    spec.grid = optional_field<std::vector<double>>(pj, "grid", "pareto");
    spec.points = optional_field<int>(pj, "points", "pareto");
    if (spec.points && *spec.points < 2) throw ParseError("pareto.points: need at least 2");
    p.pareto = spec;
  }
  p.seed = optional_field<std::uint64_t>(j, "seed", "problem");
  return p;
}

inline ProblemFile read_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open problem file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return problem_from_json(j);
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

inline void write_problem(const std::filesystem::path& path, const ProblemFile& problem) {
  write_text(path, to_json(problem).dump(2) + "\n");
}

/// Diagonal binomial Fisher information t / (p (1 - p)) scaled by the
/// chi-square radius, so the ellipsoid approximates the LR region. Rates on
/// {0, 1} are clamped to [0.5 / t, 1 - 0.5 / t].
inline Matrix fisher_shape(const LiftStudy& study, double alpha) {
  const auto dim = static_cast<Eigen::Index>(study.num_params());
  const double radius = chi2_quantile(1.0 - alpha, static_cast<int>(dim));
  Matrix shape = Matrix::Zero(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    const auto t = static_cast<double>(study.trials(static_cast<std::size_t>(j)));
    const auto s = static_cast<double>(study.successes(static_cast<std::size_t>(j)));
    const double p = std::clamp(s / t, 0.5 / t, 1.0 - 0.5 / t);
    shape(j, j) = t / (p * (1.0 - p)) / radius;
  }
  return shape;
}

inline ConfidenceRegion build_region(const ProblemFile& problem) {
  if (problem.region.kind == RegionKind::kBinomialLR) {
    return BinomialLR(problem.study, problem.region.alpha);
  }
  try {
    const Matrix shape = problem.region.shape ? *problem.region.shape
                                              : fisher_shape(problem.study, problem.region.alpha);
    return Ellipsoid(mle(problem.study), shape);
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("region: ") + e.what());
  }
}

/// Portable sampling on std::mt19937_64, whose output sequence is fixed by
/// the C++ standard. Distributions are computed here rather than with
/// <random> distributions, whose algorithms are implementation-defined.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on [lo, hi].
  long uniform_int(long lo, long hi) {
    const auto span = static_cast<double>(hi - lo + 1);
    return std::min(hi, lo + static_cast<long>(uniform() * span));
  }

  /// Binomial(trials, p) as a sum of Bernoulli draws.
  long binomial(long trials, double p) {
    long successes = 0;
    for (long i = 0; i < trials; ++i) {
      if (uniform() < p) ++successes;
    }
    return successes;
  }

 private:
  std::mt19937_64 engine_;
};

struct GeneratorRanges {
  double holdout_rate_low = 0.01;
  double holdout_rate_high = 0.10;
  double uplift_low = -0.01;
  double uplift_high = 0.05;
  double cost_low = 0.5;
  double cost_high = 2.0;
};

/// Synthetic lift study. Per channel, in draw order: holdout trials,
/// marketing trials, holdout rate, uplift, cost, then the holdout and
/// marketing Bernoulli draws.
inline LiftStudy generate_lift_study(std::uint64_t seed, int channels, long trials_low,
                                     long trials_high, double budget = 1.0,
                                     const GeneratorRanges& ranges = {}) {
  if (channels < 1) throw std::invalid_argument("generate: need at least one channel");
  if (trials_low < 1 || trials_high < trials_low) {
    throw std::invalid_argument("generate: trial range must satisfy 1 <= low <= high");
  }
  PortableRng rng(seed);
  LiftStudy study;
  study.budget = budget;
  for (int i = 0; i < channels; ++i) {
    ChannelData ch;
    ch.trials_holdout = rng.uniform_int(trials_low, trials_high);
    ch.trials_marketing = rng.uniform_int(trials_low, trials_high);
    const double holdout = rng.uniform(ranges.holdout_rate_low, ranges.holdout_rate_high);
    const double uplift = rng.uniform(ranges.uplift_low, ranges.uplift_high);
    const double marketing = std::clamp(holdout + uplift, 0.0, 1.0);
    ch.cost = rng.uniform(ranges.cost_low, ranges.cost_high);
    ch.successes_holdout = rng.binomial(ch.trials_holdout, holdout);
    ch.successes_marketing = rng.binomial(ch.trials_marketing, marketing);
    study.channels.push_back(ch);
  }
  return study;
}

inline std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline constexpr const char* kTraceHeader =
    "iteration,primal_residual,dual_residual,eps_pri,eps_dual,duality_gap,solver";

inline void write_trace_csv(std::ostream& out, const IterateTrace& trace) {
  auto cell = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  out << kTraceHeader << '\n';
  for (const auto& r : trace.records) {
    out << r.iteration << ',' << cell(r.primal_residual) << ',' << cell(r.dual_residual) << ','
        << cell(r.eps_pri) << ',' << cell(r.eps_dual) << ',' << cell(r.duality_gap) << ','
        << trace.solver << '\n';
  }
}

inline constexpr const char* kFrontierHeader = "phi,robust_value,expected_value,iterations";

inline void write_frontier_csv(std::ostream& out, const std::vector<ParetoPoint>& points) {
  out << kFrontierHeader << '\n';
  for (const auto& p : points) {
    if (!p.ok()) {
      out << format_number(p.phi) << ",,,\n";
      continue;
    }
    out << format_number(p.phi) << ',' << format_number(p.robust_value) << ','
        << format_number(p.expected_value) << ',' << p.iterations << '\n';
  }
}

/// Solver settings resolved from a problem's solver spec; fields of the spec
/// only apply when it names the same solver.
struct SolverSettings {
  AdmmConfig admm;
  ApgConfig apg;
  SubgradientConfig subgradient;
};

inline SolverSettings resolve_settings(const SolverSpec& spec, bool trace_gap) {
  SolverSettings s;
  s.admm.trace_gap = trace_gap;
  s.apg.trace_gap = trace_gap;
  s.subgradient.trace_gap = trace_gap;
  if (spec.name == "admm") {
    if (spec.rho) s.admm.rho = *spec.rho;
    if (spec.eps_abs) s.admm.eps_abs = *spec.eps_abs;
    if (spec.eps_rel) s.admm.eps_rel = *spec.eps_rel;
    if (spec.max_iterations) s.admm.max_iterations = *spec.max_iterations;
    if (spec.trace_gap) s.admm.trace_gap = *spec.trace_gap;
  } else if (spec.name == "apg") {
    if (spec.max_iterations) s.apg.max_iterations = *spec.max_iterations;
    if (spec.initial_step) s.apg.initial_step = *spec.initial_step;
    if (spec.trace_gap) s.apg.trace_gap = *spec.trace_gap;
  } else if (spec.name == "subgradient") {
    if (spec.max_iterations) s.subgradient.max_iterations = *spec.max_iterations;
    if (spec.initial_step) s.subgradient.initial_step = *spec.initial_step;
    if (spec.trace_gap) s.subgradient.trace_gap = *spec.trace_gap;
  }
  return s;
}

struct SolverRun {
  std::string solver;
  std::optional<SolveResult> result;
  std::optional<IterateTrace> trace;
  std::string error;
};

inline SolverRun run_solver(const std::string& name, const OutcomeMatrix& A,
                            const ConfidenceRegion& region, const DecisionSpace& space,
                            const SolverSettings& settings) {
  SolverRun run;
  run.solver = name;
  try {
    if (name == "admm") {
      auto out = admm_solve(A, region, space, settings.admm);
      run.result = std::move(out.result);
      run.trace = std::move(out.trace);
    } else if (name == "apg") {
      auto out = apg_solve(A, region, space, settings.apg);
      run.result = std::move(out.result);
      run.trace = std::move(out.trace);
    } else if (name == "subgradient") {
      auto out = subgradient_solve(A, region, space, settings.subgradient);
      run.result = std::move(out.result);
      run.trace = std::move(out.trace);
    } else if (name == "markowitz") {
      run.result = markowitz_solve(A, region, space);
    } else {
      run.error = "unknown solver '" + name + "'";
    }
  } catch (const std::exception& e) {
    run.error = e.what();
  }
  return run;
}

inline nlohmann::json summary_json(const SolverRun& run) {
  nlohmann::json j{{"solver", run.solver}};
  if (!run.error.empty()) {
    j["error"] = run.error;
    return j;
  }
  const auto& r = *run.result;
  j["status"] = std::string(to_string(r.status));
  j["robust_value"] = r.robust_value;
  j["expected_value"] = r.expected_value;
  j["iterations"] = r.iterations;
  j["decision"] = std::vector<double>(r.decision.data(), r.decision.data() + r.decision.size());
  if (!r.message.empty()) j["message"] = r.message;
  return j;
}

inline std::string summary_line(const SolverRun& run) {
  std::ostringstream out;
  out << run.solver << ": ";
  if (!run.error.empty()) {
    out << "error: " << run.error;
    return out.str();
  }
  const auto& r = *run.result;
  out << "status=" << to_string(r.status) << " f=" << format_number(r.robust_value)
      << " g=" << format_number(r.expected_value) << " iterations=" << r.iterations << " c=[";
  for (Eigen::Index i = 0; i < r.decision.size(); ++i) {
    out << (i ? "," : "") << format_number(r.decision[i]);
  }
  out << ']';
  return out.str();
}

/// Runs each solver on the same problem with gap tracing enabled, writing
/// trace_<solver>.csv per traced solver and summary.json into out_dir.
inline std::vector<SolverRun> run_experiment(const ProblemFile& problem,
                                             const std::vector<std::string>& solvers,
                                             const std::filesystem::path& out_dir,
                                             std::ostream* log = nullptr) {
  const ConfidenceRegion region = build_region(problem);
  const OutcomeMatrix A = build_outcome_matrix(problem.study);
  const DecisionSpace space(problem.study.num_channels(), problem.study.budget);
  const SolverSettings settings = resolve_settings(problem.solver, true);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<SolverRun> runs;
  nlohmann::json summary = nlohmann::json::array();
  for (const auto& name : solvers) {
    SolverRun run = run_solver(name, A, region, space, settings);
    if (run.trace) {
      std::ostringstream csv;
      write_trace_csv(csv, *run.trace);
      write_text(out_dir / ("trace_" + name + ".csv"), csv.str());
    }
    if (log) *log << summary_line(run) << '\n';
    summary.push_back(summary_json(run));
    runs.push_back(std::move(run));
  }
  write_text(out_dir / "summary.json", summary.dump(2) + "\n");
  return runs;
}

}  // namespace minimax

#endif  // MINIMAX_IO_HPP_
