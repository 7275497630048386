#include "zoadmm/common.hpp"

namespace zoadmm {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::RankDeficientA: return "RankDeficientA";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::NonFiniteValue: return "NonFiniteValue";
    case Errc::NonUnitDirection: return "NonUnitDirection";
    case Errc::InfeasiblePoint: return "InfeasiblePoint";
    case Errc::FactorizationFailure: return "FactorizationFailure";
    case Errc::NoFixedPoint: return "NoFixedPoint";
    case Errc::InsufficientHistory: return "InsufficientHistory";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::SelfTestFailed: return "SelfTestFailed";
  }
  return "Unknown";
}

}  // namespace zoadmm
