#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace region2vec {

// Dense matrices are row-major throughout so buffers can cross the C ABI
// without reshuffling.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using IntMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

enum class ErrorCode {
  InvalidArgument,
  Io,
  Parse,
  EmptyGraph,
  ShapeMismatch,
  NoPositivePairs,
  NoDenominator,
  NonFiniteLoss,
  InvalidK,
  EmptyFlows,
  NoInterFlow,
  DegenerateMean,
  NoPairs,
  LengthMismatch,
  UnknownNodeId,
  DuplicateEdge,
  NonNumericAttribute,
  MissingPovertyColumn,
  InvalidConfig,
  ConfigError,
};

/// Module-qualified error name, e.g. "embedding.NoPositivePairs".
const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }
  const char* name() const { return error_name(code_); }

 private:
  ErrorCode code_;
};

/// Per-node community labels in {1..k}; every community nonempty.
struct CommunityAssignment {
  std::vector<int> labels;
  int k = 0;

  int size() const { return static_cast<int>(labels.size()); }

  // Throws InvalidArgument if a label falls outside {1..k} or a community is empty.
  void validate() const;

  /// Remaps arbitrary positive labels to dense 1..k, ordered by smallest member index.
  static CommunityAssignment from_labels(std::vector<int> raw);
};

}  // namespace region2vec
