#pragma once

#include <cstdint>
#include <vector>

#include "zoadmm/common.hpp"
#include "zoadmm/problem.hpp"

namespace zoadmm {

/// One row of a run trace, describing the iterate (x_k, y^k, lambda_k).
/// theta and queries_cum additionally reflect iteration k itself.
struct TraceRecord {
  std::size_t k = 0;
  double obj = 0.0;           // f(x_k) + sum_j psi_j(y_j^k)
  double aug_lag = 0.0;       // L_rho(x_k, y^k, lambda_k)
  double residual = 0.0;      // ||A x_k + sum_j B_j y_j^k - c||
  double stationarity = 0.0;  // dist(0, dL)^2; NaN without an analytic gradient
  double theta = 0.0;
  double lyapunov = 0.0;
  std::uint64_t queries_cum = 0;  // algorithmic queries through iteration k
};

/// Which member of the Lyapunov/theta family applies.
enum class LyapunovVariant {
  Omega,  // CooGE SPIDER, finite sum (also used for the SGD baseline)
  Phi,    // CooGE+UniGE SPIDER, finite sum
  Gamma,  // CooGE SPIDER, online
  Psi,    // CooGE+UniGE SPIDER, online
};

/// Iterates around index k. x_prev is x_{k-1} (x_0 when k = 0). epoch_x
/// holds x_{c_k q}, x_{c_k q + 1}, ... in order with c_k = floor(k / q);
/// theta needs it through x_{k+1}, the Lyapunov value through x_k.
struct TraceWindow {
  std::size_t k = 0;
  std::size_t q = 1;
  Vector x_prev;
  Vector x;
  Vector x_next;
  std::vector<Vector> epoch_x;
  std::vector<Vector> y;
  std::vector<Vector> y_next;
};

/// Constants entering the Lyapunov corrections.
struct LyapunovConstants {
  double L = 1.0;
  double rho = 1.0;
  double eta = 1.0;
  double sigma_min_A = 1.0;
  double sigma_max_G = 1.0;
  double batch = 1.0;  // b (finite sum) or b2 (online)
  double d = 1.0;
};

/// f + sum psi_j - <lambda, r> + rho/2 ||r||^2 with r the constraint residual.
double augmented_lagrangian(const ProblemSpec& spec, double rho, const Vector& x,
                            const std::vector<Vector>& y, const Vector& lambda,
                            double f_value);

/// ||grad f(x) - A^T lambda||^2 + sum_j dist(B_j^T lambda, dpsi_j(y_j))^2
///   + ||A x + sum_j B_j y_j - c||^2.
double stationarity_measure(const ProblemSpec& spec, const Vector& x,
                            const std::vector<Vector>& y, const Vector& lambda,
                            const Vector& grad_f);

/// Single-path theta_k:
///   ||x_{k+1}-x_k||^2 + ||x_k-x_{k-1}||^2 + (s/q) sum_{i=c_k q}^{k} ||x_{i+1}-x_i||^2
///   + sum_j ||y_j^k - y_j^{k+1}||^2,  with s = d for the UniGE variants, else 1.
/// Throws InsufficientHistory when the window lacks x_{k+1}, y^{k+1} or the
/// epoch history.
double theta_k(const TraceWindow& window, LyapunovVariant variant);

/// Single-path Lyapunov value: aug_lag + c1 ||x_k - x_{k-1}||^2
///   + c2 sum_{i=c_k q}^{k-1} ||x_{i+1}-x_i||^2 with
/// c1 = 5L^2/(sA rho) + 5 sG^2/(sA eta^2 rho) and
/// c2 = 12 s L^2/(sA rho batch), s = d for the UniGE variants, else 1.
/// Corrections vanish for problems without constraint rows (sA = 0).
double lyapunov(const TraceWindow& window, const LyapunovConstants& constants,
                LyapunovVariant variant, double aug_lag);

}  // namespace zoadmm
