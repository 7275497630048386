#pragma once

#include <memory>
#include <vector>

#include "zoadmm/common.hpp"
#include "zoadmm/oracle.hpp"
#include "zoadmm/penalties.hpp"

namespace zoadmm {

/// One nonsmooth block y_j: its coupling matrix B_j (l x p_j), the penalty
/// psi_j and a nonnegative multiplier applied to the penalty.
struct PenaltyBlock {
  Matrix B;
  Penalty penalty;
  double weight = 1.0;

  /// penalty scaled by weight; what the solver actually applies.
  Penalty effective() const { return penalty.scaled(weight); }
};

/// Eigenvalue extremes of A^T A and B_j^T B_j.
struct SpectralSummary {
  double sigma_min_A = 0.0;
  double sigma_max_A = 0.0;
  double sigma_max_B = 0.0;
  std::vector<double> sigma_max_B_blocks;
};

/// min_x f(x) + sum_j psi_j(y_j)  s.t.  A x + sum_j B_j y_j = c.
///
/// Immutable once built; share it across concurrent runs by const reference.
class ProblemSpec {
 public:
  Index dim_x() const { return A_.cols(); }
  Index rows() const { return A_.rows(); }
  std::size_t num_blocks() const { return blocks_.size(); }

  const Matrix& A() const { return A_; }
  const Vector& c() const { return c_; }
  const PenaltyBlock& block(std::size_t j) const { return blocks_[j]; }
  const std::vector<PenaltyBlock>& blocks() const { return blocks_; }
  const Penalty& effective_penalty(std::size_t j) const { return effective_[j]; }

  /// Cached A^T A (d x d).
  const Matrix& AtA() const { return AtA_; }

  const std::shared_ptr<const BlackBox>& oracle() const { return oracle_; }
  Regime regime() const { return oracle_->regime(); }

  const SpectralSummary& spectral() const { return spectral_; }

  /// A x + sum_j B_j y_j - c.
  Vector constraint_residual(const Vector& x, const std::vector<Vector>& y) const;

  friend ProblemSpec build_problem(Matrix A, std::vector<PenaltyBlock> blocks,
                                   Vector c, std::shared_ptr<const BlackBox> oracle);

 private:
  ProblemSpec() = default;

  Matrix A_;
  Vector c_;
  std::vector<PenaltyBlock> blocks_;
  std::vector<Penalty> effective_;
  Matrix AtA_;
  std::shared_ptr<const BlackBox> oracle_;
  SpectralSummary spectral_;
};

/// Smallest eigenvalue of A^T A must be at least this fraction of the largest.
inline constexpr double kRankTolerance = 1e-10;

/// Validates dimensions and rank, and caches the spectral summary. With no
/// blocks the constraint must be empty (A with zero rows, c empty).
/// Throws DimensionMismatch or RankDeficientA.
ProblemSpec build_problem(Matrix A, std::vector<PenaltyBlock> blocks, Vector c,
                          std::shared_ptr<const BlackBox> oracle);

SpectralSummary spectral_summary(const ProblemSpec& spec);

}  // namespace zoadmm
