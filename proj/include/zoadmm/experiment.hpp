#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zoadmm/problems.hpp"
#include "zoadmm/solver.hpp"

namespace zoadmm {

/// A configuration problem traced back to its source: the file line when the
/// parser knows it, and the offending "section.key".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, std::string message, std::size_t line = 0);

  const std::string& field() const { return field_; }
  std::size_t line() const { return line_; }

 private:
  std::string field_;
  std::size_t line_;
};

struct ProblemParams {
  std::string name;
  std::map<std::string, std::string> values;
};

enum class HyperMode { Explicit, Derive };

struct DeriveParams {
  std::optional<double> L;  // empty means "use the catalog value"
  double alpha = 1.0;
  double epsilon = 0.0;
  double C = 1.0;
};

struct ExperimentConfig {
  ProblemParams problem;
  std::vector<Algorithm> algorithms;
  HyperMode mode = HyperMode::Explicit;
  DeriveParams derive;
  /// Raw [solver] entries: the explicit hyperparameters, or the overrides
  /// applied on top of a derived recipe.
  std::map<std::string, std::string> solver;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path output_dir = "out";
  std::size_t trace_every = 1;
  /// "section.key" -> 1-based line in the source file.
  std::map<std::string, std::size_t> lines;
};

/// Parses an INI-style experiment file. Honors ZOADMM_SEED, which replaces
/// the seed list with a single seed. Throws ConfigError.
ExperimentConfig load_experiment(const std::filesystem::path& path);
ExperimentConfig parse_experiment(std::istream& in);

/// Builds the named catalog problem; unknown names or keys are ConfigErrors.
CatalogProblem build_catalog_problem(const ProblemParams& params);

/// The solver configuration for one (algorithm, seed) run. Fills `recipe`
/// in derive mode.
SolverConfig solver_config_for(const ExperimentConfig& config, Algorithm algorithm,
                               std::uint64_t seed, const CatalogProblem& problem,
                               HyperparamRecipe* recipe = nullptr);

/// CSV header shared by every trace file.
inline constexpr const char* kTraceHeader =
    "k,obj,aug_lag,residual,stationarity,theta,lyapunov,queries_cum";

/// Writes the rows at k = 0, every trace_every-th k and the final k.
void write_trace_csv(std::ostream& out, const Trace& trace, std::size_t trace_every);

std::string trace_file_name(Algorithm algorithm, std::uint64_t seed);

/// Exit codes of the command-line entry points.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitSolverError = 2;

int run_experiment(const std::filesystem::path& config_path,
                   const std::optional<std::filesystem::path>& out_override,
                   std::size_t jobs, std::ostream& log);

int validate_experiment(const std::filesystem::path& config_path, std::ostream& out);

/// Prints the resolved recipe for every algorithm as JSON.
int derive_experiment(const std::filesystem::path& config_path, std::ostream& out);

}  // namespace zoadmm
