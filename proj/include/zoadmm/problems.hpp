#pragma once

#include <memory>
#include <optional>
#include <string>

#include "zoadmm/problem.hpp"

namespace zoadmm {

/// A synthetic problem together with its analytic side-channel and the
/// Lipschitz constant of every component gradient.
struct CatalogProblem {
  std::string name;
  ProblemSpec spec;
  std::shared_ptr<const AnalyticModel> model;
  double L = 1.0;  // NaN when the components are not L-smooth
  std::optional<double> optimum_hint;
};

/// f_i(x) = 0.5 (x - t_i)^T Q_i (x - t_i), Q_i = R_i diag(e_i) R_i^T with
/// e_i ~ U[0.1, L_cap]; constraint x - y = 0 with psi = tau ||y||_1.
CatalogProblem build_quadratic_sanity(Index d, std::size_t n, std::uint64_t seed,
                                      double tau = 0.1, double L_cap = 1.0);

/// Online counterpart: a fixed rotation R, and per-sample curvature
/// e_xi ~ U[0.1, L_cap]^d and target t_xi = t_bar + spread * z, z ~ N(0, I).
/// The population risk is 0.5 e_bar ||x - t_bar||^2 + const.
CatalogProblem build_quadratic_sanity_online(Index d, std::uint64_t seed,
                                             double tau = 0.1, double L_cap = 1.0,
                                             double spread = 0.1);

/// Sigmoid loss f_i(x) = 1 / (1 + exp(l_i a_i^T x)) with a graph penalty
/// tau ||A x||_1, where A = [I; omega D] and D is the edge-incidence matrix
/// of a random chain-plus-shortcuts graph on the d features.
/// Features are a_i = l_i m + noise z_i, z_i ~ N(0, noise^2 / d I).
CatalogProblem build_graph_guided_fused_lasso(std::size_t n, Index d, std::uint64_t seed,
                                              double tau = 0.01, double omega = 0.1,
                                              double noise = 1.0);

/// Universal-perturbation toy: a frozen two-layer tanh classifier on
/// grid x grid inputs, attacked by one perturbation x shared by n samples.
/// Penalties: overlapping group lasso over kernel windows, tau2 ||x||^2 and
/// the indicator of a valid, eps-bounded perturbation.
struct PerturbationToyOptions {
  std::size_t n = 10;
  Index grid = 8;
  Index kernel = 3;
  Index stride = 1;
  Index hidden = 16;
  double beta = 50.0;
  double eps = 0.4;
  double tau1 = 1.0;
  double tau2 = 2.0;
  double tau3 = 1.0;
  bool raw_hinge = false;
};

CatalogProblem build_structured_perturbation_toy(std::uint64_t seed,
                                                 const PerturbationToyOptions& options = {});

/// Number of kernel windows: ((grid - kernel) / stride + 1)^2.
std::size_t window_count(Index grid, Index kernel, Index stride);

/// sup_t |s''(t)| for the logistic function s, i.e. 1 / (6 sqrt 3).
inline constexpr double kSigmoidCurvature = 0.096225044864937627;

/// Compares the analytic per-sample gradient with central differences
/// (mu = 1e-6) at `points` random points; throws SelfTestFailed when the
/// infinity-norm gap exceeds 10 L mu.
void self_test(const CatalogProblem& problem, std::uint64_t seed, int points = 20);

}  // namespace zoadmm
