#pragma once

#include <array>
#include <atomic>
#include <cstddef>
#include <memory>
#include <vector>

#include "zoadmm/common.hpp"

namespace zoadmm {

/// Finite-sum problems index samples 0..n-1; online problems identify a
/// sample f(., xi) by a 64-bit seed drawn from the run's stream.
struct Regime {
  enum class Kind { FiniteSum, Online };

  Kind kind = Kind::FiniteSum;
  std::size_t n = 1;

  static Regime finite_sum(std::size_t n) { return {Kind::FiniteSum, n}; }
  static Regime online() { return {Kind::Online, 0}; }

  bool is_finite_sum() const { return kind == Kind::FiniteSum; }
  bool operator==(const Regime&) const = default;
};

/// Component functions f_i (or f(., xi)) reachable only through values.
class BlackBox {
 public:
  virtual ~BlackBox() = default;

  virtual Index dim() const = 0;
  virtual Regime regime() const = 0;
  virtual double value(std::uint64_t sample, const Vector& x) const = 0;
};

/// Analytic side-channel that synthetic problems expose for diagnostics
/// only. Solvers never consult it to form updates.
class AnalyticModel {
 public:
  virtual ~AnalyticModel() = default;

  /// f(x): the finite-sum mean or the population risk.
  virtual double mean_value(const Vector& x) const = 0;
  virtual Vector mean_gradient(const Vector& x) const = 0;
  virtual Vector sample_gradient(std::uint64_t sample, const Vector& x) const = 0;
};

enum class Phase : std::size_t { Anchor = 0, Inner = 1, Diagnostic = 2 };

inline constexpr std::size_t kPhaseCount = 3;

std::string_view to_string(Phase phase);

/// Snapshot of function-value query counts.
struct QueryLedger {
  std::array<std::uint64_t, kPhaseCount> per_phase{};

  std::uint64_t count(Phase p) const {
    return per_phase[static_cast<std::size_t>(p)];
  }
  std::uint64_t total() const {
    return per_phase[0] + per_phase[1] + per_phase[2];
  }
  /// Queries attributable to the algorithm (diagnostic phase excluded).
  std::uint64_t algorithmic() const { return per_phase[0] + per_phase[1]; }
};

/// Counting handle over a shared BlackBox. One Oracle per solver run; the
/// underlying BlackBox may be shared freely between runs.
class Oracle {
 public:
  explicit Oracle(std::shared_ptr<const BlackBox> fn);

  Oracle(const Oracle&) = delete;
  Oracle& operator=(const Oracle&) = delete;

  /// f_i(x). Counts exactly one query under `phase`.
  double query(std::uint64_t i, const Vector& x, Phase phase);

  QueryLedger ledger_snapshot() const;

  Index dim() const { return fn_->dim(); }
  Regime regime() const { return regime_; }
  const BlackBox& function() const { return *fn_; }

 private:
  std::shared_ptr<const BlackBox> fn_;
  Regime regime_;
  std::array<std::atomic<std::uint64_t>, kPhaseCount> counts_{};
};

/// b indices i.i.d. uniform over {0..n-1}, with replacement.
std::vector<std::uint64_t> sample_batch(Rng& rng, std::size_t n, std::size_t b);

/// Regime-aware draw: uniform indices (finite-sum) or b fresh sample seeds
/// (online).
std::vector<std::uint64_t> sample_batch(Rng& rng, const Regime& regime,
                                        std::size_t b);

/// b distinct indices from {0..n-1} (b <= n); b == n yields a permutation.
std::vector<std::uint64_t> sample_without_replacement(Rng& rng, std::size_t n,
                                                      std::size_t b);

}  // namespace zoadmm
