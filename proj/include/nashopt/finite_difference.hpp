#pragma once

#include "nashopt/types.hpp"

#include <functional>

namespace nashopt {

using ScalarFn = std::function<double(const VectorRef&)>;
using VectorFn = std::function<Vector(const VectorRef&)>;

// Step used when a game lacks analytic derivatives.
double default_fd_step(const VectorRef& w);

// Central-difference derivative kernels. The default versions distribute
// coordinates (columns) over OpenMP threads; the serial:: versions are the
// reference loops and produce bit-identical results, since every column is
// computed by the same arithmetic regardless of which thread owns it.
//
// All kernels throw EvaluationError carrying the perturbed coordinate when
// an evaluation is non-finite or itself throws.

// d loss / d w_i for i in [begin, begin + count).
Vector fd_partial_gradient(const ScalarFn& loss, const VectorRef& w, double h,
                           Index begin, Index count);

inline Vector fd_gradient(const ScalarFn& loss, const VectorRef& w, double h) {
  return fd_partial_gradient(loss, w, h, 0, w.size());
}

// Columns [begin, begin + count) of the Jacobian of vec_fn at w.
Matrix fd_partial_jacobian(const VectorFn& vec_fn, const VectorRef& w, double h,
                           Index begin, Index count);

inline Matrix fd_jacobian(const VectorFn& vec_fn, const VectorRef& w, double h) {
  return fd_partial_jacobian(vec_fn, w, h, 0, w.size());
}

namespace serial {

Vector fd_partial_gradient(const ScalarFn& loss, const VectorRef& w, double h,
                           Index begin, Index count);

inline Vector fd_gradient(const ScalarFn& loss, const VectorRef& w, double h) {
  return fd_partial_gradient(loss, w, h, 0, w.size());
}

Matrix fd_partial_jacobian(const VectorFn& vec_fn, const VectorRef& w, double h,
                           Index begin, Index count);

inline Matrix fd_jacobian(const VectorFn& vec_fn, const VectorRef& w, double h) {
  return fd_partial_jacobian(vec_fn, w, h, 0, w.size());
}

}  // namespace serial

}  // namespace nashopt
