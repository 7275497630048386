#include "zoadmm/diagnostics.hpp"

#include <cmath>

namespace zoadmm {

namespace {

bool uses_uni(LyapunovVariant v) {
  return v == LyapunovVariant::Phi || v == LyapunovVariant::Psi;
}

std::size_t epoch_start(std::size_t k, std::size_t q) { return (k / q) * q; }

// sum_{i=start}^{last} ||x_{i+1} - x_i||^2 read from the epoch history.
double epoch_movement(const TraceWindow& w, std::size_t last_inclusive) {
  const std::size_t start = epoch_start(w.k, w.q);
  const std::size_t steps = last_inclusive + 1 - start;
  if (w.epoch_x.size() < steps + 1) {
    throw Error(Errc::InsufficientHistory,
                "epoch history holds " + std::to_string(w.epoch_x.size()) +
                    " iterates, need " + std::to_string(steps + 1));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < steps; ++i) {
    s += (w.epoch_x[i + 1] - w.epoch_x[i]).squaredNorm();
  }
  return s;
}

}  // namespace

double augmented_lagrangian(const ProblemSpec& spec, double rho, const Vector& x,
                            const std::vector<Vector>& y, const Vector& lambda,
                            double f_value) {
  const Vector r = spec.constraint_residual(x, y);
  double psi = 0.0;
  for (std::size_t j = 0; j < spec.num_blocks(); ++j) {
    psi += eval_penalty(spec.effective_penalty(j), y[j]);
  }
  return f_value + psi - lambda.dot(r) + 0.5 * rho * r.squaredNorm();
}

double stationarity_measure(const ProblemSpec& spec, const Vector& x,
                            const std::vector<Vector>& y, const Vector& lambda,
                            const Vector& grad_f) {
  if (grad_f.size() != x.size() || lambda.size() != spec.rows()) {
    throw Error(Errc::DimensionMismatch, "stationarity inputs do not match the problem");
  }
  double total = (grad_f - spec.A().transpose() * lambda).squaredNorm();
  for (std::size_t j = 0; j < spec.num_blocks(); ++j) {
    const double dj = subgrad_dist(spec.effective_penalty(j), y[j],
                                   spec.block(j).B.transpose() * lambda);
    total += dj * dj;
  }
  total += spec.constraint_residual(x, y).squaredNorm();
  return total;
}

double theta_k(const TraceWindow& w, LyapunovVariant variant) {
  if (w.q < 1) throw Error(Errc::InvalidArgument, "epoch length must be >= 1");
  if (w.x_next.size() == 0 || w.x.size() == 0 || w.y_next.size() != w.y.size()) {
    throw Error(Errc::InsufficientHistory, "theta needs x_{k+1} and y^{k+1}");
  }
  const Vector& x_prev = w.x_prev.size() == 0 ? w.x : w.x_prev;
  const double scale = uses_uni(variant) ? static_cast<double>(w.x.size()) : 1.0;
  double theta = (w.x_next - w.x).squaredNorm() + (w.x - x_prev).squaredNorm();
  theta += scale / static_cast<double>(w.q) * epoch_movement(w, w.k);
  for (std::size_t j = 0; j < w.y.size(); ++j) {
    theta += (w.y[j] - w.y_next[j]).squaredNorm();
  }
  return theta;
}

double lyapunov(const TraceWindow& w, const LyapunovConstants& c,
                LyapunovVariant variant, double aug_lag) {
  if (w.q < 1) throw Error(Errc::InvalidArgument, "epoch length must be >= 1");
  if (w.x.size() == 0) throw Error(Errc::InsufficientHistory, "window has no x_k");
  if (c.sigma_min_A <= 0.0) return aug_lag;
  const Vector& x_prev = w.x_prev.size() == 0 ? w.x : w.x_prev;
  const double scale = uses_uni(variant) ? c.d : 1.0;
  const double c_prev = 5.0 * c.L * c.L / (c.sigma_min_A * c.rho) +
                        5.0 * c.sigma_max_G * c.sigma_max_G /
                            (c.sigma_min_A * c.eta * c.eta * c.rho);
  const double c_epoch = 12.0 * scale * c.L * c.L / (c.sigma_min_A * c.rho * c.batch);
  const std::size_t start = epoch_start(w.k, w.q);
  const double movement = w.k == start ? 0.0 : epoch_movement(w, w.k - 1);
  return aug_lag + c_prev * (w.x - x_prev).squaredNorm() + c_epoch * movement;
}

}  // namespace zoadmm
