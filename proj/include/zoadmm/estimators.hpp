#pragma once

#include <span>
#include <vector>

#include "zoadmm/common.hpp"
#include "zoadmm/oracle.hpp"

namespace zoadmm {

/// Smallest admissible smoothing radius.
inline constexpr double kMinSmoothing = 1e-8;

/// Smoothing radii for the two estimators. Under the decaying schedule the
/// radius at 0-based iteration k uses t = k + 1:
///   mu_t = 1 / sqrt(d t),  nu_t = 1 / (d sqrt(t)).
struct SmoothingParams {
  enum class Schedule { Fixed, Decaying };

  double mu = 1e-3;
  double nu = 1e-3;
  Schedule schedule = Schedule::Decaying;

  double mu_at(std::size_t k, Index d) const;
  double nu_at(std::size_t k, Index d) const;
};

enum class EstimatorKind { Coo, Uni };

/// CooGE: sum_j [f_i(x + mu e_j) - f_i(x - mu e_j)] / (2 mu) e_j. 2d queries.
Vector coo_grad_single(Oracle& oracle, std::uint64_t i, const Vector& x, double mu,
                       Phase phase = Phase::Inner);

/// Mean CooGE estimate over an explicit sample set. 2 d |samples| queries.
Vector coo_grad_batch(Oracle& oracle, std::span<const std::uint64_t> samples,
                      const Vector& x, double mu, Phase phase);

/// (1/n) sum_i CooGE f_i(x) over the whole finite sum. 2nd queries.
Vector coo_grad_full(Oracle& oracle, const Vector& x, double mu,
                     Phase phase = Phase::Anchor);

/// UniGE: d [f_i(x + nu u) - f_i(x)] / nu * u for a caller-supplied unit u.
/// 2 queries. Throws NonUnitDirection when | ||u|| - 1 | > 1e-8.
Vector uni_grad_single(Oracle& oracle, std::uint64_t i, const Vector& x, double nu,
                       const Vector& u, Phase phase = Phase::Inner);

/// Uniform draw from the unit sphere S^{d-1} (normalized Gaussian).
Vector sample_unit_sphere(Rng& rng, Index d);

/// SPIDER/SARAH recursion state.
struct SpiderState {
  Vector v;
  Vector x_prev;
  std::size_t k_in_epoch = 0;
  std::size_t epoch_len = 1;
};

/// Restart the recursion at x with the mean CooGE estimate over `anchor_set`
/// (all n indices in the finite-sum case, a fresh batch of b1 online).
SpiderState spider_anchor(Oracle& oracle, const Vector& x, double mu,
                          std::span<const std::uint64_t> anchor_set,
                          std::size_t epoch_len);

/// v_k = (1/b) sum_{i in batch} [g_i(x_k) - g_i(x_prev)] + v_{k-1}, with g
/// the CooGE (4bd queries) or UniGE (4b queries) estimator. UniGE draws one
/// direction per sample, shared by both evaluation points.
SpiderState spider_step(const SpiderState& state, Oracle& oracle, const Vector& x_k,
                        std::span<const std::uint64_t> batch, EstimatorKind kind,
                        double mu, double nu, Rng& rng);

}  // namespace zoadmm
