#include "zoadmm/oracle.hpp"

#include <cmath>
#include <numeric>

namespace zoadmm {

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::Anchor: return "anchor";
    case Phase::Inner: return "inner";
    case Phase::Diagnostic: return "diagnostic";
  }
  return "unknown";
}

Oracle::Oracle(std::shared_ptr<const BlackBox> fn) : fn_(std::move(fn)) {
  if (!fn_) throw Error(Errc::InvalidArgument, "null black-box function");
  regime_ = fn_->regime();
  if (regime_.is_finite_sum() && regime_.n == 0) {
    throw Error(Errc::InvalidArgument, "finite-sum regime requires n >= 1");
  }
}

double Oracle::query(std::uint64_t i, const Vector& x, Phase phase) {
  if (regime_.is_finite_sum() && i >= regime_.n) {
    throw Error(Errc::IndexOutOfRange, "sample " + std::to_string(i) +
                                           " with n = " + std::to_string(regime_.n));
  }
  if (x.size() != fn_->dim()) {
    throw Error(Errc::DimensionMismatch, "query point of length " +
                                             std::to_string(x.size()));
  }
  counts_[static_cast<std::size_t>(phase)].fetch_add(1, std::memory_order_relaxed);
  const double v = fn_->value(i, x);
  if (!std::isfinite(v)) {
    throw Error(Errc::NonFiniteValue, "f_" + std::to_string(i) + "(x) = " +
                                          std::to_string(v));
  }
  return v;
}

QueryLedger Oracle::ledger_snapshot() const {
  QueryLedger out;
  for (std::size_t p = 0; p < kPhaseCount; ++p) {
    out.per_phase[p] = counts_[p].load(std::memory_order_relaxed);
  }
  return out;
}

std::vector<std::uint64_t> sample_batch(Rng& rng, std::size_t n, std::size_t b) {
  if (n == 0) throw Error(Errc::InvalidArgument, "cannot sample from n = 0");
  std::uniform_int_distribution<std::uint64_t> pick(0, n - 1);
  std::vector<std::uint64_t> out(b);
  for (auto& i : out) i = pick(rng);
  return out;
}

std::vector<std::uint64_t> sample_batch(Rng& rng, const Regime& regime,
                                        std::size_t b) {
  if (regime.is_finite_sum()) return sample_batch(rng, regime.n, b);
  std::vector<std::uint64_t> out(b);
  for (auto& s : out) s = rng();
  return out;
}

std::vector<std::uint64_t> sample_without_replacement(Rng& rng, std::size_t n,
                                                      std::size_t b) {
  if (b > n) {
    throw Error(Errc::InvalidArgument, "batch larger than population");
  }
  std::vector<std::uint64_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::uint64_t{0});
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < b; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(b);
  return pool;
}

}  // namespace zoadmm
