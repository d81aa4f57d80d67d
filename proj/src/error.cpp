#include "graphrbm/error.hpp"

namespace graphrbm {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::EmptyGraph: return "EmptyGraph";
    case Errc::SelfLoop: return "SelfLoop";
    case Errc::NonpositiveLength: return "NonpositiveLength";
    case Errc::UnknownVertex: return "UnknownVertex";
    case Errc::UnknownEdge: return "UnknownEdge";
    case Errc::BoundaryVertexUnknown: return "BoundaryVertexUnknown";
    case Errc::DisconnectedGraph: return "DisconnectedGraph";
    case Errc::OverlappingParts: return "OverlappingParts";
    case Errc::UncoveredEdge: return "UncoveredEdge";
    case Errc::InteriorVertexMissingEdge: return "InteriorVertexMissingEdge";
    case Errc::EmptyBatch: return "EmptyBatch";
    case Errc::BadPartIndex: return "BadPartIndex";
    case Errc::BadBatchIndex: return "BadBatchIndex";
    case Errc::BadProbabilityVector: return "BadProbabilityVector";
    case Errc::ZeroNormalizer: return "ZeroNormalizer";
    case Errc::ScheduleMismatch: return "ScheduleMismatch";
    case Errc::GridMismatch: return "GridMismatch";
    case Errc::MissingBoundaryValue: return "MissingBoundaryValue";
    case Errc::DegenerateFit: return "DegenerateFit";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ParseError: return "ParseError";
    case Errc::IoError: return "IoError";
    case Errc::NonellipticCoefficient: return "NonellipticCoefficient";
    case Errc::SingularSystem: return "SingularSystem";
    case Errc::InconsistentConstraints: return "InconsistentConstraints";
  }
  return "Unknown";
}

bool is_numerical(Errc code) noexcept {
  switch (code) {
    case Errc::NonellipticCoefficient:
    case Errc::SingularSystem:
    case Errc::InconsistentConstraints:
      return true;
    default:
      return false;
  }
}

}  // namespace graphrbm
