#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "zoadmm/diagnostics.hpp"
#include "zoadmm/estimators.hpp"
#include "zoadmm/oracle.hpp"
#include "zoadmm/problem.hpp"

namespace zoadmm {

enum class Algorithm {
  ZoSpiderAdmmCoo,    // finite sum, CooGE anchors and inner steps
  ZoSpiderAdmmMixed,  // finite sum, CooGE anchors, UniGE inner steps
  ZooAdmmPlusCoo,     // online, CooGE anchors of b1 samples
  ZooAdmmPlusMixed,   // online, CooGE anchors, UniGE inner steps
  ZoSgdAdmm,          // baseline: fresh mini-batch CooGE every iteration
};

std::string_view to_string(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string_view name);
std::vector<Algorithm> all_algorithms();

bool is_online(Algorithm a);
EstimatorKind inner_estimator(Algorithm a);
LyapunovVariant lyapunov_variant(Algorithm a);

enum class XUpdate { Linearized, Exact };

/// G = r I - rho eta A^T A (linearizing) or G = r I.
enum class GMatrix { Linearizing, ScaledIdentity };

enum class BatchSampling { WithReplacement, WithoutReplacement };

struct SolverConfig {
  Algorithm algorithm = Algorithm::ZoSpiderAdmmCoo;
  double eta = 0.0;
  double rho = 0.0;
  std::size_t q = 1;
  std::size_t b = 1;
  std::size_t b1 = 1;
  std::size_t b2 = 1;
  std::size_t K = 1;
  SmoothingParams smoothing;
  std::uint64_t seed = 0;
  XUpdate x_update = XUpdate::Linearized;
  GMatrix g_matrix = GMatrix::Linearizing;
  /// Defaults to rho eta sigma_max(A^T A) + 1.
  std::optional<double> r_x;
  /// Defaults to rho sigma_max(B_j^T B_j) + 1 per block.
  std::vector<double> r_y;
  double lipschitz_L = 1.0;
  BatchSampling sampling = BatchSampling::WithReplacement;
  /// Stop before an iteration whose queries would exceed this budget.
  std::optional<std::uint64_t> max_queries;
  /// Stop once the recorded stationarity measure drops to this value.
  std::optional<double> stationarity_tol;
};

/// Validates `config` against `spec` and fills r_x / r_y defaults.
/// Throws InvalidArgument naming the violated invariant.
SolverConfig resolve_config(const ProblemSpec& spec, SolverConfig config);

struct IterateState {
  Vector x;
  std::vector<Vector> y;
  Vector lambda;
  SpiderState spider;
  std::size_t k = 0;
};

/// Everything an observer may inspect about iteration k.
struct IterationView {
  std::size_t k;
  bool anchor;
  const Vector& v;
  const Vector& x_k;
  const Vector& x_next;
  const std::vector<Vector>& y_k;
  const std::vector<Vector>& y_next;
  const Vector& lambda_k;
  const Vector& lambda_next;
};

using IterationObserver = std::function<void(const IterationView&)>;

struct Trace {
  Algorithm algorithm = Algorithm::ZoSpiderAdmmCoo;
  std::vector<TraceRecord> records;
  std::size_t zeta = 0;    // uniformly random output index
  std::size_t k_star = 0;  // argmin_k theta_k
  IterateState final_state;
  QueryLedger ledger;
  std::string stop_reason;  // "budget" | "queries" | "stationarity"
};

/// The ADMM loop shared by all variants: estimator, Gauss-Seidel prox
/// y-updates, linearized or exact x-update, dual ascent.
class AdmmSolver {
 public:
  /// `model` feeds diagnostics only (objective, stationarity). Without it the
  /// objective falls back to diagnostic-phase oracle queries.
  AdmmSolver(const ProblemSpec& spec, const SolverConfig& config,
             std::shared_ptr<const AnalyticModel> model = nullptr);

  const ProblemSpec& spec() const { return spec_; }
  const SolverConfig& config() const { return config_; }
  IterateState& state() { return state_; }
  const IterateState& state() const { return state_; }
  Oracle& oracle() { return oracle_; }

  /// G as configured.
  const Matrix& G() const { return G_; }
  double sigma_min_G() const { return sigma_min_G_; }
  double sigma_max_G() const { return sigma_max_G_; }

  /// prox step for block j using the current state: blocks before j are
  /// expected to hold their k+1 values already.
  Vector y_update(std::size_t j) const;

  /// Closed-form x_{k+1}; requires the linearizing G.
  Vector x_update_linearized(const Vector& v) const;

  /// x_{k+1} = (G/eta + rho A^T A)^{-1} (G x_k / eta - v - rho A^T(sum B y - c - lambda/rho)).
  Vector x_update_exact(const Vector& v) const;

  /// lambda_k - rho (A x + sum B y - c) at the current state.
  Vector lambda_update() const;

  /// Queries that iteration k will consume.
  std::uint64_t iteration_cost(std::size_t k) const;

  /// One full iteration k -> k+1; returns v_k.
  Vector iterate(const IterationObserver& observer = {});

  /// Runs from the current state until K iterations, the query budget or the
  /// stationarity threshold.
  Trace run(const IterationObserver& observer = {});

 private:
  Vector estimate();
  Vector y_update_from_residual(std::size_t j, const Vector& residual) const;
  double objective_f(const Vector& x);
  TraceRecord diagnose(const TraceWindow& window, const Vector& lambda_k);

  const ProblemSpec& spec_;
  SolverConfig config_;
  std::shared_ptr<const AnalyticModel> model_;
  Oracle oracle_;
  IterateState state_;
  Rng rng_;
  Matrix G_;
  double sigma_min_G_ = 1.0;
  double sigma_max_G_ = 1.0;
  mutable std::optional<Eigen::LLT<Matrix>> exact_factor_;
};

/// run() on a fresh solver with x0 = 0, y = 0, lambda = 0.
Trace run(const ProblemSpec& spec, const SolverConfig& config,
          std::shared_ptr<const AnalyticModel> model = nullptr,
          const IterationObserver& observer = {});

/// Step size, penalty, batch/epoch sizes and smoothing targeting an
/// eps-stationary point.
struct HyperparamRecipe {
  Algorithm algorithm = Algorithm::ZoSpiderAdmmCoo;
  double L = 1.0;
  double alpha = 1.0;
  double epsilon = 0.0;
  double C = 1.0;
  double eta = 0.0;
  double rho = 0.0;
  double r_x = 0.0;
  double kappa_G = 1.0;
  std::size_t q = 1;
  std::size_t b = 1;
  std::size_t b1 = 1;
  std::size_t b2 = 1;
  std::size_t K = 1;
  double mu = 0.0;
  double nu = 0.0;
  std::size_t fixed_point_rounds = 0;
  bool batch_capped = false;
};

/// Resolves rho <- kappa_G <- G <- rho by fixed-point iteration with
/// sigma_min(G) = 1, then sets the batch/epoch sizes of the algorithm.
/// Throws NoFixedPoint when the iteration does not settle within 100 rounds.
HyperparamRecipe derive_hyperparams(const ProblemSpec& spec, double L, double alpha,
                                    double epsilon, Algorithm algorithm,
                                    double C = 1.0);

/// Copies a recipe into a config (fixed smoothing schedule).
SolverConfig apply_recipe(SolverConfig base, const HyperparamRecipe& recipe);

}  // namespace zoadmm
