#pragma once

#include <stdexcept>
#include <string>

namespace mclab {

/// Base class for all failures raised by the lab; carries a stable code
/// used by the CLI when emitting machine-readable error reports.
struct Error : std::runtime_error {
  std::string code;
  Error(std::string code_, const std::string& msg)
      : std::runtime_error(msg), code(std::move(code_)) {}
};

struct DimensionMismatch : Error {
  explicit DimensionMismatch(const std::string& msg) : Error("DimensionMismatch", msg) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error("ConfigError", msg) {}
};

struct MeshQualityFailure : Error {
  explicit MeshQualityFailure(const std::string& msg) : Error("MeshQualityFailure", msg) {}
};

struct GraphConditionViolated : Error {
  explicit GraphConditionViolated(const std::string& msg) : Error("GraphConditionViolated", msg) {}
};

struct OracleBracketFailure : Error {
  explicit OracleBracketFailure(const std::string& msg) : Error("OracleBracketFailure", msg) {}
};

struct NonConvergence : Error {
  explicit NonConvergence(const std::string& msg) : Error("NonConvergence", msg) {}
};

struct LinearSolveFailure : Error {
  explicit LinearSolveFailure(const std::string& msg) : Error("LinearSolveFailure", msg) {}
};

struct DegenerateField : Error {
  explicit DegenerateField(const std::string& msg) : Error("DegenerateField", msg) {}
};

struct DegeneratePresent : Error {
  explicit DegeneratePresent(const std::string& msg) : Error("DegeneratePresent", msg) {}
};

struct PatchRankFailure : Error {
  int vertex;
  PatchRankFailure(int vertex_, const std::string& msg)
      : Error("PatchRankFailure", msg), vertex(vertex_) {}
};

struct StartNotOnNodal : Error {
  explicit StartNotOnNodal(const std::string& msg) : Error("StartNotOnNodal", msg) {}
};

struct StructureMismatch : Error {
  int item;  // 1..5, the failing item of the annulus structure report
  StructureMismatch(int item_, const std::string& msg)
      : Error("StructureMismatch", msg), item(item_) {}
};

struct MissingArtifacts : Error {
  explicit MissingArtifacts(const std::string& msg) : Error("MissingArtifacts", msg) {}
};

}  // namespace mclab
