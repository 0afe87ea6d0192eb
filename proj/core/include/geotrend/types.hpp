#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace geotrend {

// Points and tangent vectors are stored in ambient coordinates. Matrix-valued
// points (landmark configurations) are flattened column-major.
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class ErrorKind {
  InvalidInput,
  Domain,
  DegenerateConfiguration,
  SingularFiber,
  Unsupported,
  Capability,
  NonConvergence,
  UndefinedVariance,
  Parse,
  Schema,
  Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace geotrend
