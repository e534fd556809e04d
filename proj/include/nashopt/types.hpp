#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace nashopt {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using VectorRef = Eigen::Ref<const Vector>;
using MatrixRef = Eigen::Ref<const Matrix>;

// Loss or derivative evaluation produced a non-finite value (or the model
// itself refused the point, e.g. a degenerate embedding).
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, Index coordinate = -1)
      : std::runtime_error(what), coordinate_(coordinate) {}
  // Offending coordinate of the perturbed point, or -1 when not applicable.
  Index coordinate() const { return coordinate_; }

 private:
  Index coordinate_;
};

// The game Hessian fails positive semi-definiteness or invertibility.
class AdmissibilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Eigensolver non-convergence, singular systems and similar.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the documented domain of a function.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline bool all_finite(const VectorRef& v) { return v.allFinite(); }

}  // namespace nashopt
