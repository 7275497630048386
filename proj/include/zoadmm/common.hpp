#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace zoadmm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Random engine used by every stochastic component. A run owns its engine;
/// nothing in the library touches a global generator.
using Rng = std::mt19937_64;

enum class Errc {
  DimensionMismatch,
  RankDeficientA,
  IndexOutOfRange,
  NonFiniteValue,
  NonUnitDirection,
  InfeasiblePoint,
  FactorizationFailure,
  NoFixedPoint,
  InsufficientHistory,
  InvalidArgument,
  SelfTestFailed,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// SplitMix64 finalizer; used to derive independent per-sample seeds.
constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace zoadmm
