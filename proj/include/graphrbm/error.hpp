#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace graphrbm {

enum class Errc {
  // Configuration / input errors (CLI exit code 2).
  EmptyGraph,
  SelfLoop,
  NonpositiveLength,
  UnknownVertex,
  UnknownEdge,
  BoundaryVertexUnknown,
  DisconnectedGraph,
  OverlappingParts,
  UncoveredEdge,
  InteriorVertexMissingEdge,
  EmptyBatch,
  BadPartIndex,
  BadBatchIndex,
  BadProbabilityVector,
  ZeroNormalizer,
  ScheduleMismatch,
  GridMismatch,
  MissingBoundaryValue,
  DegenerateFit,
  InvalidArgument,
  ParseError,
  IoError,
  // Numerical failures (CLI exit code 3).
  NonellipticCoefficient,
  SingularSystem,
  InconsistentConstraints,
};

std::string_view errc_name(Errc code) noexcept;

/// True for numerical failures, false for configuration/input problems.
bool is_numerical(Errc code) noexcept;

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

}  // namespace graphrbm
