#include "zoadmm/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace zoadmm {

namespace {

constexpr std::array<std::pair<Algorithm, std::string_view>, 5> kAlgorithmNames{{
    {Algorithm::ZoSpiderAdmmCoo, "zo_spider_admm_coo"},
    {Algorithm::ZoSpiderAdmmMixed, "zo_spider_admm_mixed"},
    {Algorithm::ZooAdmmPlusCoo, "zoo_admm_plus_coo"},
    {Algorithm::ZooAdmmPlusMixed, "zoo_admm_plus_mixed"},
    {Algorithm::ZoSgdAdmm, "zo_sgd_admm"},
}};

constexpr std::uint64_t kZetaStream = 0x7a657461;  // "zeta"

bool is_spider(Algorithm a) { return a != Algorithm::ZoSgdAdmm; }

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(Errc::InvalidArgument, what);
}

std::size_t ceil_guarded(double x) {
  return static_cast<std::size_t>(std::max(1.0, std::ceil(x - 1e-9)));
}

bool at_least(double value, double bound) {
  return value >= bound - 1e-12 * std::max(1.0, std::abs(bound));
}

}  // namespace

std::string_view to_string(Algorithm a) {
  for (const auto& [alg, name] : kAlgorithmNames) {
    if (alg == a) return name;
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (const auto& [alg, n] : kAlgorithmNames) {
    if (n == name) return alg;
  }
  return std::nullopt;
}

std::vector<Algorithm> all_algorithms() {
  std::vector<Algorithm> out;
  for (const auto& entry : kAlgorithmNames) out.push_back(entry.first);
  return out;
}

bool is_online(Algorithm a) {
  return a == Algorithm::ZooAdmmPlusCoo || a == Algorithm::ZooAdmmPlusMixed;
}

EstimatorKind inner_estimator(Algorithm a) {
  return (a == Algorithm::ZoSpiderAdmmMixed || a == Algorithm::ZooAdmmPlusMixed)
             ? EstimatorKind::Uni
             : EstimatorKind::Coo;
}

LyapunovVariant lyapunov_variant(Algorithm a) {
  switch (a) {
    case Algorithm::ZoSpiderAdmmMixed:
      return LyapunovVariant::Phi;
    case Algorithm::ZooAdmmPlusCoo:
      return LyapunovVariant::Gamma;
    case Algorithm::ZooAdmmPlusMixed:
      return LyapunovVariant::Psi;
    default:
      return LyapunovVariant::Omega;
  }
}

SolverConfig resolve_config(const ProblemSpec& spec, SolverConfig config) {
  require(config.eta > 0.0 && std::isfinite(config.eta), "eta must be > 0");
  require(config.rho > 0.0 && std::isfinite(config.rho), "rho must be > 0");
  require(config.q >= 1, "q must be >= 1");
  require(config.b >= 1 && config.b1 >= 1 && config.b2 >= 1,
          "batch sizes b, b1, b2 must be >= 1");
  require(config.K >= 1, "K must be >= 1");
  require(!(config.lipschitz_L <= 0.0), "lipschitz_L must be positive");
  if (config.smoothing.schedule == SmoothingParams::Schedule::Fixed) {
    require(config.smoothing.mu >= kMinSmoothing && config.smoothing.nu >= kMinSmoothing,
            "smoothing radii must be >= 1e-8");
  }

  const Regime regime = spec.regime();
  if (!is_online(config.algorithm)) {
    require(regime.is_finite_sum(),
            std::string(to_string(config.algorithm)) + " needs a finite-sum problem");
  }
  if (config.sampling == BatchSampling::WithoutReplacement) {
    require(regime.is_finite_sum(), "sampling without replacement needs a finite sum");
    const std::size_t inner = is_online(config.algorithm) ? config.b2 : config.b;
    require(inner <= regime.n, "batch exceeds n under sampling without replacement");
    if (is_online(config.algorithm)) {
      require(config.b1 <= regime.n, "b1 exceeds n under sampling without replacement");
    }
  }

  const SpectralSummary& s = spec.spectral();
  const double r_floor = config.rho * config.eta * s.sigma_max_A + 1.0;
  if (!config.r_x) config.r_x = r_floor;
  require(at_least(*config.r_x, r_floor),
          "r_x must be >= rho*eta*sigma_max(A^T A) + 1 = " + std::to_string(r_floor));

  if (config.r_y.empty()) {
    for (std::size_t j = 0; j < spec.num_blocks(); ++j) {
      config.r_y.push_back(config.rho * s.sigma_max_B_blocks[j] + 1.0);
    }
  }
  require(config.r_y.size() == spec.num_blocks(), "r_y needs one entry per block");
  for (std::size_t j = 0; j < spec.num_blocks(); ++j) {
    const double floor_j = config.rho * s.sigma_max_B_blocks[j] + 1.0;
    require(at_least(config.r_y[j], floor_j),
            "r_y[" + std::to_string(j) + "] must be >= rho*sigma_max(B_j^T B_j) + 1 = " +
                std::to_string(floor_j));
  }
  return config;
}

AdmmSolver::AdmmSolver(const ProblemSpec& spec, const SolverConfig& config,
                       std::shared_ptr<const AnalyticModel> model)
    : spec_(spec),
      config_(resolve_config(spec, config)),
      model_(std::move(model)),
      oracle_(spec.oracle()),
      rng_(config.seed) {
  const Index d = spec_.dim_x();
  state_.x = Vector::Zero(d);
  for (const PenaltyBlock& blk : spec_.blocks()) state_.y.push_back(Vector::Zero(blk.B.cols()));
  state_.lambda = Vector::Zero(spec_.rows());

  const double r = *config_.r_x;
  const SpectralSummary& s = spec_.spectral();
  if (config_.g_matrix == GMatrix::Linearizing) {
    const double rho_eta = config_.rho * config_.eta;
    G_ = r * Matrix::Identity(d, d) - rho_eta * spec_.AtA();
    sigma_min_G_ = r - rho_eta * s.sigma_max_A;
    sigma_max_G_ = r - rho_eta * s.sigma_min_A;
  } else {
    G_ = r * Matrix::Identity(d, d);
    sigma_min_G_ = sigma_max_G_ = r;
  }
}

Vector AdmmSolver::y_update_from_residual(std::size_t j, const Vector& residual) const {
  const PenaltyBlock& blk = spec_.block(j);
  const double r_j = config_.r_y[j];
  const Vector w = state_.y[j] -
                   blk.B.transpose() * (config_.rho * residual - state_.lambda) / r_j;
  return prox(spec_.effective_penalty(j), w, 1.0 / r_j);
}

Vector AdmmSolver::y_update(std::size_t j) const {
  if (j >= spec_.num_blocks()) {
    throw Error(Errc::IndexOutOfRange, "block " + std::to_string(j));
  }
  return y_update_from_residual(j, spec_.constraint_residual(state_.x, state_.y));
}

Vector AdmmSolver::x_update_linearized(const Vector& v) const {
  if (config_.g_matrix != GMatrix::Linearizing) {
    throw Error(Errc::InvalidArgument, "the closed-form x-update needs G = rI - rho eta A^T A");
  }
  const double r = *config_.r_x;
  const double eta = config_.eta;
  const double rho = config_.rho;
  const Vector by_minus_c =
      spec_.constraint_residual(state_.x, state_.y) - spec_.A() * state_.x;
  const Vector coupling = spec_.A().transpose() * (by_minus_c - state_.lambda / rho);
  return (G_ * state_.x - eta * v - eta * rho * coupling) / r;
}

Vector AdmmSolver::x_update_exact(const Vector& v) const {
  const double eta = config_.eta;
  const double rho = config_.rho;
  if (!exact_factor_) {
    const Matrix system = G_ / eta + rho * spec_.AtA();
    exact_factor_.emplace(system);
    if (exact_factor_->info() != Eigen::Success) {
      exact_factor_.reset();
      throw Error(Errc::FactorizationFailure, "G/eta + rho A^T A is not positive definite");
    }
  }
  const Vector by_minus_c =
      spec_.constraint_residual(state_.x, state_.y) - spec_.A() * state_.x;
  const Vector rhs = G_ * state_.x / eta - v -
                     rho * spec_.A().transpose() * (by_minus_c - state_.lambda / rho);
  return exact_factor_->solve(rhs);
}

Vector AdmmSolver::lambda_update() const {
  return state_.lambda - config_.rho * spec_.constraint_residual(state_.x, state_.y);
}

std::uint64_t AdmmSolver::iteration_cost(std::size_t k) const {
  const std::uint64_t d = static_cast<std::uint64_t>(spec_.dim_x());
  const Algorithm a = config_.algorithm;
  if (a == Algorithm::ZoSgdAdmm) return 2 * d * config_.b;
  const bool coo = inner_estimator(a) == EstimatorKind::Coo;
  if (k % config_.q == 0) {
    return is_online(a) ? 2 * d * config_.b1 : 2 * d * spec_.regime().n;
  }
  const std::uint64_t batch = is_online(a) ? config_.b2 : config_.b;
  return coo ? 4 * batch * d : 4 * batch;
}

Vector AdmmSolver::estimate() {
  const std::size_t k = state_.k;
  const Index d = spec_.dim_x();
  const Algorithm a = config_.algorithm;
  const double mu = config_.smoothing.mu_at(k, d);
  const double nu = config_.smoothing.nu_at(k, d);
  const Regime regime = spec_.regime();

  auto draw = [&](std::size_t size) {
    if (config_.sampling == BatchSampling::WithoutReplacement) {
      return sample_without_replacement(rng_, regime.n, size);
    }
    return sample_batch(rng_, regime, size);
  };

  if (a == Algorithm::ZoSgdAdmm) {
    const auto batch = draw(config_.b);
    return coo_grad_batch(oracle_, batch, state_.x, mu, Phase::Inner);
  }
  if (k % config_.q == 0) {
    std::vector<std::uint64_t> anchor;
    if (is_online(a)) {
      anchor = draw(config_.b1);
    } else {
      anchor.resize(regime.n);
      std::iota(anchor.begin(), anchor.end(), std::uint64_t{0});
    }
    state_.spider = spider_anchor(oracle_, state_.x, mu, anchor, config_.q);
  } else {
    const auto batch = draw(is_online(a) ? config_.b2 : config_.b);
    state_.spider = spider_step(state_.spider, oracle_, state_.x, batch,
                                inner_estimator(a), mu, nu, rng_);
  }
  return state_.spider.v;
}

Vector AdmmSolver::iterate(const IterationObserver& observer) {
  const std::size_t k = state_.k;
  const bool anchor = is_spider(config_.algorithm) && k % config_.q == 0;
  const Vector v = estimate();

  const Vector x_k = state_.x;
  const std::vector<Vector> y_k = state_.y;
  const Vector lambda_k = state_.lambda;

  Vector residual = spec_.constraint_residual(state_.x, state_.y);
  for (std::size_t j = 0; j < spec_.num_blocks(); ++j) {
    Vector y_new = y_update_from_residual(j, residual);
    residual += spec_.block(j).B * (y_new - state_.y[j]);
    state_.y[j] = std::move(y_new);
  }

  state_.x = config_.x_update == XUpdate::Exact ? x_update_exact(v) : x_update_linearized(v);
  state_.lambda = lambda_update();
  state_.k = k + 1;

  if (observer) {
    observer(IterationView{k, anchor, v, x_k, state_.x, y_k, state_.y, lambda_k,
                           state_.lambda});
  }
  return v;
}

double AdmmSolver::objective_f(const Vector& x) {
  if (model_) return model_->mean_value(x);
  const Regime regime = spec_.regime();
  if (!regime.is_finite_sum()) return std::numeric_limits<double>::quiet_NaN();
  double acc = 0.0;
  for (std::uint64_t i = 0; i < regime.n; ++i) acc += oracle_.query(i, x, Phase::Diagnostic);
  return acc / static_cast<double>(regime.n);
}

TraceRecord AdmmSolver::diagnose(const TraceWindow& w, const Vector& lambda_k) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  TraceRecord rec;
  rec.k = w.k;
  const double f = objective_f(w.x);
  double psi = 0.0;
  for (std::size_t j = 0; j < spec_.num_blocks(); ++j) {
    psi += eval_penalty(spec_.effective_penalty(j), w.y[j]);
  }
  rec.obj = f + psi;
  rec.aug_lag = augmented_lagrangian(spec_, config_.rho, w.x, w.y, lambda_k, f);
  rec.residual = spec_.constraint_residual(w.x, w.y).norm();
  rec.stationarity =
      model_ ? stationarity_measure(spec_, w.x, w.y, lambda_k, model_->mean_gradient(w.x))
             : nan;

  const LyapunovVariant variant = lyapunov_variant(config_.algorithm);
  rec.theta = theta_k(w, variant);
  if (std::isnan(config_.lipschitz_L)) {
    rec.lyapunov = nan;
  } else {
    LyapunovConstants c;
    c.L = config_.lipschitz_L;
    c.rho = config_.rho;
    c.eta = config_.eta;
    c.sigma_min_A = spec_.rows() == 0 ? 0.0 : spec_.spectral().sigma_min_A;
    c.sigma_max_G = sigma_max_G_;
    c.batch = static_cast<double>(is_online(config_.algorithm) ? config_.b2 : config_.b);
    c.d = static_cast<double>(spec_.dim_x());
    rec.lyapunov = lyapunov(w, c, variant, rec.aug_lag);
  }
  rec.queries_cum = oracle_.ledger_snapshot().algorithmic();
  return rec;
}

Trace AdmmSolver::run(const IterationObserver& observer) {
  Trace trace;
  trace.algorithm = config_.algorithm;
  trace.stop_reason = "budget";

  TraceWindow window;
  window.q = config_.q;
  Vector x_prev;  // empty at k = 0, read as x_0

  while (state_.k < config_.K) {
    const std::size_t k = state_.k;
    if (config_.max_queries &&
        oracle_.ledger_snapshot().algorithmic() + iteration_cost(k) > *config_.max_queries) {
      trace.stop_reason = "queries";
      break;
    }
    if (k % config_.q == 0 || window.epoch_x.empty()) window.epoch_x.assign(1, state_.x);

    const Vector lambda_k = state_.lambda;
    window.k = k;
    window.x_prev = x_prev;
    window.x = state_.x;
    window.y = state_.y;

    iterate(observer);

    window.x_next = state_.x;
    window.y_next = state_.y;
    window.epoch_x.push_back(state_.x);

    trace.records.push_back(diagnose(window, lambda_k));
    x_prev = window.x;

    if (config_.stationarity_tol &&
        trace.records.back().stationarity <= *config_.stationarity_tol) {
      trace.stop_reason = "stationarity";
      break;
    }
  }

  if (!trace.records.empty()) {
    Rng zeta_rng(mix_seed(config_.seed, kZetaStream));
    std::uniform_int_distribution<std::size_t> pick(0, trace.records.size() - 1);
    trace.zeta = pick(zeta_rng);
    const auto best = std::min_element(
        trace.records.begin(), trace.records.end(),
        [](const TraceRecord& a, const TraceRecord& b) { return a.theta < b.theta; });
    trace.k_star = best->k;
  }
  trace.final_state = state_;
  trace.ledger = oracle_.ledger_snapshot();
  return trace;
}

Trace run(const ProblemSpec& spec, const SolverConfig& config,
          std::shared_ptr<const AnalyticModel> model, const IterationObserver& observer) {
  AdmmSolver solver(spec, config, std::move(model));
  return solver.run(observer);
}

HyperparamRecipe derive_hyperparams(const ProblemSpec& spec, double L, double alpha,
                                    double epsilon, Algorithm algorithm, double C) {
  require(L > 0.0 && std::isfinite(L), "L must be positive and finite");
  require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
  require(epsilon > 0.0 && std::isfinite(epsilon), "epsilon must be positive");
  require(C > 0.0 && std::isfinite(C), "C must be positive");

  const Regime regime = spec.regime();
  if (!is_online(algorithm)) {
    require(regime.is_finite_sum(),
            std::string(to_string(algorithm)) + " needs a finite-sum problem");
  }

  HyperparamRecipe out;
  out.algorithm = algorithm;
  out.L = L;
  out.alpha = alpha;
  out.epsilon = epsilon;
  out.C = C;
  out.eta = alpha / (4.0 * L);

  const SpectralSummary& s = spec.spectral();
  if (spec.rows() == 0) {
    out.rho = 1.0;
    out.r_x = 1.0;
    out.kappa_G = 1.0;
  } else {
    const double two_sqrt_237 = 2.0 * std::sqrt(237.0);
    double kappa = 1.0;
    bool settled = false;
    for (std::size_t round = 1; round <= 100; ++round) {
      out.fixed_point_rounds = round;
      out.rho = two_sqrt_237 * kappa * L / (s.sigma_min_A * alpha);
      out.r_x = out.rho * out.eta * s.sigma_max_A + 1.0;
      const double next = out.r_x - out.rho * out.eta * s.sigma_min_A;
      if (!std::isfinite(next)) break;
      const double change = std::abs(next - kappa) / std::abs(kappa);
      kappa = next;
      if (change < 1e-10) {
        settled = true;
        break;
      }
    }
    if (!settled) {
      throw Error(Errc::NoFixedPoint,
                  "kappa_G did not settle; sigma_max(A^T A)/sigma_min(A^T A) = " +
                      std::to_string(s.sigma_max_A / s.sigma_min_A));
    }
    out.kappa_G = kappa;
    out.rho = two_sqrt_237 * kappa * L / (s.sigma_min_A * alpha);
    out.r_x = out.rho * out.eta * s.sigma_max_A + 1.0;
  }

  const std::size_t d = static_cast<std::size_t>(spec.dim_x());
  switch (algorithm) {
    case Algorithm::ZoSpiderAdmmCoo:
    case Algorithm::ZoSgdAdmm:
      out.q = ceil_guarded(std::sqrt(static_cast<double>(regime.n)));
      out.b = out.q;
      break;
    case Algorithm::ZoSpiderAdmmMixed:
      out.q = ceil_guarded(std::sqrt(static_cast<double>(regime.n)));
      out.b = out.q * d;
      if (out.b > regime.n) {
        out.b = regime.n;
        out.batch_capped = true;
      }
      break;
    case Algorithm::ZooAdmmPlusCoo:
    case Algorithm::ZooAdmmPlusMixed:
      out.q = ceil_guarded(1.0 / std::sqrt(epsilon));
      out.b1 = ceil_guarded(1.0 / epsilon);
      out.b2 = algorithm == Algorithm::ZooAdmmPlusCoo ? out.q : out.q * d;
      out.b = out.b2;
      break;
  }
  out.mu = std::sqrt(epsilon / static_cast<double>(d));
  out.nu = std::sqrt(epsilon) / static_cast<double>(d);
  out.K = ceil_guarded(C / epsilon);
  return out;
}

SolverConfig apply_recipe(SolverConfig base, const HyperparamRecipe& recipe) {
  base.algorithm = recipe.algorithm;
  base.eta = recipe.eta;
  base.rho = recipe.rho;
  base.r_x = recipe.r_x;
  base.r_y.clear();
  base.q = recipe.q;
  base.b = recipe.b;
  base.b1 = recipe.b1;
  base.b2 = recipe.b2;
  base.K = recipe.K;
  base.smoothing.mu = std::max(recipe.mu, kMinSmoothing);
  base.smoothing.nu = std::max(recipe.nu, kMinSmoothing);
  base.smoothing.schedule = SmoothingParams::Schedule::Fixed;
  base.lipschitz_L = recipe.L;
  return base;
}

}  // namespace zoadmm
