#include "zoadmm/problem.hpp"

#include <algorithm>

#include <Eigen/Eigenvalues>

namespace zoadmm {

namespace {

std::pair<double, double> extreme_eigenvalues(const Matrix& sym) {
  if (sym.rows() == 0) return {0.0, 0.0};
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw Error(Errc::FactorizationFailure, "symmetric eigensolver failed");
  }
  const auto& ev = eig.eigenvalues();
  return {std::max(ev.minCoeff(), 0.0), std::max(ev.maxCoeff(), 0.0)};
}

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

ProblemSpec build_problem(Matrix A, std::vector<PenaltyBlock> blocks, Vector c,
                          std::shared_ptr<const BlackBox> oracle) {
  if (!oracle) throw Error(Errc::InvalidArgument, "problem needs an oracle");
  if (A.cols() != oracle->dim()) {
    throw Error(Errc::DimensionMismatch,
                "A is " + shape(A) + " but the oracle has dimension " +
                    std::to_string(oracle->dim()));
  }
  if (A.cols() < 1) throw Error(Errc::DimensionMismatch, "d must be positive");
  if (c.size() != A.rows()) {
    throw Error(Errc::DimensionMismatch,
                "c has length " + std::to_string(c.size()) + ", A is " + shape(A));
  }
  if (blocks.empty() && A.rows() != 0) {
    throw Error(Errc::DimensionMismatch,
                "a problem without penalty blocks carries no constraint rows");
  }
  const Regime regime = oracle->regime();
  if (regime.is_finite_sum() && regime.n < 1) {
    throw Error(Errc::InvalidArgument, "finite-sum regime requires n >= 1");
  }
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    const auto& blk = blocks[j];
    if (blk.B.rows() != A.rows()) {
      throw Error(Errc::DimensionMismatch, "B_" + std::to_string(j) + " is " +
                                               shape(blk.B) + ", expected " +
                                               std::to_string(A.rows()) + " rows");
    }
    if (blk.B.cols() != blk.penalty.dim()) {
      throw Error(Errc::DimensionMismatch,
                  "B_" + std::to_string(j) + " has " + std::to_string(blk.B.cols()) +
                      " columns but its penalty acts on dimension " +
                      std::to_string(blk.penalty.dim()));
    }
    if (!(blk.weight >= 0.0)) {
      throw Error(Errc::InvalidArgument, "block weight must be >= 0");
    }
  }

  ProblemSpec spec;
  spec.AtA_ = A.transpose() * A;
  const auto [amin, amax] = extreme_eigenvalues(spec.AtA_);
  if (!blocks.empty()) {
    if (A.rows() < A.cols() || !(amin >= kRankTolerance * amax) || amax == 0.0) {
      throw Error(Errc::RankDeficientA,
                  "A (" + shape(A) + ") is not full column rank: lambda_min(A^T A) = " +
                      std::to_string(amin) + ", lambda_max = " + std::to_string(amax));
    }
  }
  spec.spectral_.sigma_min_A = amin;
  spec.spectral_.sigma_max_A = amax;
  for (const auto& blk : blocks) {
    const double bmax = extreme_eigenvalues(blk.B.transpose() * blk.B).second;
    spec.spectral_.sigma_max_B_blocks.push_back(bmax);
    spec.spectral_.sigma_max_B = std::max(spec.spectral_.sigma_max_B, bmax);
    spec.effective_.push_back(blk.effective());
  }

  spec.A_ = std::move(A);
  spec.c_ = std::move(c);
  spec.blocks_ = std::move(blocks);
  spec.oracle_ = std::move(oracle);
  return spec;
}

SpectralSummary spectral_summary(const ProblemSpec& spec) { return spec.spectral(); }

Vector ProblemSpec::constraint_residual(const Vector& x,
                                        const std::vector<Vector>& y) const {
  if (x.size() != dim_x() || y.size() != blocks_.size()) {
    throw Error(Errc::DimensionMismatch, "iterate does not match the problem");
  }
  Vector r = A_ * x - c_;
  for (std::size_t j = 0; j < blocks_.size(); ++j) {
    if (y[j].size() != blocks_[j].B.cols()) {
      throw Error(Errc::DimensionMismatch, "y_" + std::to_string(j) + " has wrong length");
    }
    r.noalias() += blocks_[j].B * y[j];
  }
  return r;
}

}  // namespace zoadmm
