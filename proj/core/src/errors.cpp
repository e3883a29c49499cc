#include "polyproj/errors.hpp"

namespace polyproj {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidPolygon: return "InvalidPolygon";
    case ErrorCode::PointOnBoundary: return "PointOnBoundary";
    case ErrorCode::PointNotOnBoundary: return "PointNotOnBoundary";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::DegenerateQuad: return "DegenerateQuad";
    case ErrorCode::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorCode::InsufficientQuadrature: return "InsufficientQuadrature";
    case ErrorCode::SingularGram: return "SingularGram";
    case ErrorCode::NonSPD: return "NonSPD";
    case ErrorCode::SolverDiverged: return "SolverDiverged";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace polyproj
