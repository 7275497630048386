#include "zoadmm/estimators.hpp"

#include <cmath>

namespace zoadmm {

namespace {

void require_radius(double r, const char* name) {
  if (!(r >= kMinSmoothing) || !std::isfinite(r)) {
    throw Error(Errc::InvalidArgument,
                std::string(name) + " must be finite and >= 1e-8, got " +
                    std::to_string(r));
  }
}

}  // namespace

double SmoothingParams::mu_at(std::size_t k, Index d) const {
  if (schedule == Schedule::Fixed) return mu;
  return 1.0 / std::sqrt(static_cast<double>(d) * static_cast<double>(k + 1));
}

double SmoothingParams::nu_at(std::size_t k, Index d) const {
  if (schedule == Schedule::Fixed) return nu;
  return 1.0 / (static_cast<double>(d) * std::sqrt(static_cast<double>(k + 1)));
}

Vector coo_grad_single(Oracle& oracle, std::uint64_t i, const Vector& x, double mu,
                       Phase phase) {
  require_radius(mu, "mu");
  const Index d = x.size();
  Vector g(d);
  Vector probe = x;
  for (Index j = 0; j < d; ++j) {
    const double xj = x[j];
    probe[j] = xj + mu;
    const double plus = oracle.query(i, probe, phase);
    probe[j] = xj - mu;
    const double minus = oracle.query(i, probe, phase);
    probe[j] = xj;
    g[j] = (plus - minus) / (2.0 * mu);
  }
  return g;
}

Vector coo_grad_batch(Oracle& oracle, std::span<const std::uint64_t> samples,
                      const Vector& x, double mu, Phase phase) {
  if (samples.empty()) throw Error(Errc::InvalidArgument, "empty sample set");
  Vector acc = Vector::Zero(x.size());
  for (std::uint64_t i : samples) acc += coo_grad_single(oracle, i, x, mu, phase);
  return acc / static_cast<double>(samples.size());
}

Vector coo_grad_full(Oracle& oracle, const Vector& x, double mu, Phase phase) {
  const Regime regime = oracle.regime();
  if (!regime.is_finite_sum()) {
    throw Error(Errc::InvalidArgument, "full CooGE needs a finite-sum oracle");
  }
  Vector acc = Vector::Zero(x.size());
  for (std::uint64_t i = 0; i < regime.n; ++i) {
    acc += coo_grad_single(oracle, i, x, mu, phase);
  }
  return acc / static_cast<double>(regime.n);
}

Vector uni_grad_single(Oracle& oracle, std::uint64_t i, const Vector& x, double nu,
                       const Vector& u, Phase phase) {
  require_radius(nu, "nu");
  if (u.size() != x.size()) {
    throw Error(Errc::DimensionMismatch, "direction length differs from x");
  }
  if (std::abs(u.norm() - 1.0) > 1e-8) {
    throw Error(Errc::NonUnitDirection, "||u|| = " + std::to_string(u.norm()));
  }
  const double shifted = oracle.query(i, x + nu * u, phase);
  const double base = oracle.query(i, x, phase);
  return (static_cast<double>(x.size()) * (shifted - base) / nu) * u;
}

Vector sample_unit_sphere(Rng& rng, Index d) {
  if (d < 1) throw Error(Errc::InvalidArgument, "sphere dimension must be >= 1");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector u(d);
  double nrm = 0.0;
  do {
    for (Index j = 0; j < d; ++j) u[j] = gauss(rng);
    nrm = u.norm();
  } while (nrm == 0.0);
  return u / nrm;
}

SpiderState spider_anchor(Oracle& oracle, const Vector& x, double mu,
                          std::span<const std::uint64_t> anchor_set,
                          std::size_t epoch_len) {
  if (epoch_len < 1) throw Error(Errc::InvalidArgument, "epoch length must be >= 1");
  SpiderState s;
  s.v = coo_grad_batch(oracle, anchor_set, x, mu, Phase::Anchor);
  s.x_prev = x;
  s.k_in_epoch = 0;
  s.epoch_len = epoch_len;
  return s;
}

SpiderState spider_step(const SpiderState& state, Oracle& oracle, const Vector& x_k,
                        std::span<const std::uint64_t> batch, EstimatorKind kind,
                        double mu, double nu, Rng& rng) {
  if (batch.empty()) throw Error(Errc::InvalidArgument, "empty SPIDER batch");
  if (x_k.size() != state.x_prev.size()) {
    throw Error(Errc::DimensionMismatch, "x_k length differs from the SPIDER state");
  }
  Vector diff = Vector::Zero(x_k.size());
  for (std::uint64_t i : batch) {
    if (kind == EstimatorKind::Coo) {
      diff += coo_grad_single(oracle, i, x_k, mu, Phase::Inner);
      diff -= coo_grad_single(oracle, i, state.x_prev, mu, Phase::Inner);
    } else {
      const Vector u = sample_unit_sphere(rng, x_k.size());
      diff += uni_grad_single(oracle, i, x_k, nu, u, Phase::Inner);
      diff -= uni_grad_single(oracle, i, state.x_prev, nu, u, Phase::Inner);
    }
  }
  SpiderState next;
  next.v = diff / static_cast<double>(batch.size()) + state.v;
  next.x_prev = x_k;
  next.k_in_epoch = state.k_in_epoch + 1;
  next.epoch_len = state.epoch_len;
  return next;
}

}  // namespace zoadmm
