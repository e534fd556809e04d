#include "nashopt/finite_difference.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <vector>

namespace nashopt {

namespace {

void check_args(const VectorRef& w, double h, Index begin, Index count) {
  if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
  if (begin < 0 || count < 0 || begin + count > w.size())
    throw DomainError("finite-difference coordinate range out of bounds");
}

double central_scalar(const ScalarFn& loss, const VectorRef& w, double h, Index i) {
  Vector probe = w;
  probe[i] = w[i] + h;
  const double plus = loss(probe);
  probe[i] = w[i] - h;
  const double minus = loss(probe);
  if (!std::isfinite(plus) || !std::isfinite(minus))
    throw EvaluationError("non-finite loss while differencing coordinate " + std::to_string(i), i);
  return (plus - minus) / (2.0 * h);
}

Vector central_vector(const VectorFn& vec_fn, const VectorRef& w, double h, Index j) {
  Vector probe = w;
  probe[j] = w[j] + h;
  Vector plus = vec_fn(probe);
  probe[j] = w[j] - h;
  Vector minus = vec_fn(probe);
  if (plus.size() != minus.size())
    throw EvaluationError("vector function changed output size at coordinate " + std::to_string(j), j);
  if (!plus.allFinite() || !minus.allFinite())
    throw EvaluationError("non-finite value while differencing coordinate " + std::to_string(j), j);
  return (plus - minus) / (2.0 * h);
}

// Re-raises evaluation failures with the coordinate attached.
[[noreturn]] void rethrow_at(std::exception_ptr error, Index coordinate) {
  try {
    std::rethrow_exception(error);
  } catch (const EvaluationError&) {
    throw;
  } catch (const std::exception& e) {
    throw EvaluationError(std::string(e.what()) + " (coordinate " + std::to_string(coordinate) + ")",
                          coordinate);
  }
}

}  // namespace

double default_fd_step(const VectorRef& w) {
  const double scale = w.size() == 0 ? 0.0 : w.cwiseAbs().maxCoeff();
  return std::max(1e-6, 1e-7 * (1.0 + scale));
}

Vector fd_partial_gradient(const ScalarFn& loss, const VectorRef& w, double h, Index begin,
                           Index count) {
  check_args(w, h, begin, count);
  Vector out(count);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(static)
  for (Index k = 0; k < count; ++k) {
    try {
      out[k] = central_scalar(loss, w, h, begin + k);
    } catch (...) {
      errors[static_cast<std::size_t>(k)] = std::current_exception();
    }
  }
  for (Index k = 0; k < count; ++k)
    if (errors[static_cast<std::size_t>(k)]) rethrow_at(errors[static_cast<std::size_t>(k)], begin + k);
  return out;
}

Matrix fd_partial_jacobian(const VectorFn& vec_fn, const VectorRef& w, double h, Index begin,
                           Index count) {
  check_args(w, h, begin, count);
  std::vector<Vector> columns(static_cast<std::size_t>(count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(static)
  for (Index k = 0; k < count; ++k) {
    try {
      columns[static_cast<std::size_t>(k)] = central_vector(vec_fn, w, h, begin + k);
    } catch (...) {
      errors[static_cast<std::size_t>(k)] = std::current_exception();
    }
  }
  for (Index k = 0; k < count; ++k)
    if (errors[static_cast<std::size_t>(k)]) rethrow_at(errors[static_cast<std::size_t>(k)], begin + k);
  if (count == 0) return Matrix(vec_fn(w).size(), 0);
  const Index rows = columns.front().size();
  Matrix jac(rows, count);
  for (Index k = 0; k < count; ++k) {
    if (columns[static_cast<std::size_t>(k)].size() != rows)
      throw EvaluationError("vector function changed output size", begin + k);
    jac.col(k) = columns[static_cast<std::size_t>(k)];
  }
  return jac;
}

namespace serial {

Vector fd_partial_gradient(const ScalarFn& loss, const VectorRef& w, double h, Index begin,
                           Index count) {
  check_args(w, h, begin, count);
  Vector out(count);
  for (Index k = 0; k < count; ++k) {
    try {
      out[k] = central_scalar(loss, w, h, begin + k);
    } catch (...) {
      rethrow_at(std::current_exception(), begin + k);
    }
  }
  return out;
}

Matrix fd_partial_jacobian(const VectorFn& vec_fn, const VectorRef& w, double h, Index begin,
                           Index count) {
  check_args(w, h, begin, count);
  if (count == 0) return Matrix(vec_fn(w).size(), 0);
  Matrix jac;
  for (Index k = 0; k < count; ++k) {
    Vector col;
    try {
      col = central_vector(vec_fn, w, h, begin + k);
    } catch (...) {
      rethrow_at(std::current_exception(), begin + k);
    }
    if (k == 0) jac.resize(col.size(), count);
    if (col.size() != jac.rows()) throw EvaluationError("vector function changed output size", begin + k);
    jac.col(k) = col;
  }
  return jac;
}

}  // namespace serial

}  // namespace nashopt
