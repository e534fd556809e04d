#include "nashopt/bounds.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nashopt {

namespace {

Eigen::VectorXd gram_eigenvalues(const MatrixRef& M) {
  if (M.size() == 0) return Eigen::VectorXd();
  const Matrix gram = M.transpose() * M;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("symmetric eigensolver did not converge");
  return solver.eigenvalues();
}

}  // namespace

double spectral_norm(const MatrixRef& M) {
  if (M.size() == 0) return 0.0;
  return std::sqrt(std::max(0.0, gram_eigenvalues(M).maxCoeff()));
}

double min_singular_value(const MatrixRef& M) {
  if (M.size() == 0) return 0.0;
  return std::sqrt(std::max(0.0, gram_eigenvalues(M).minCoeff()));
}

double min_symmetric_eigenvalue(const MatrixRef& S) {
  if (S.rows() != S.cols()) throw DomainError("symmetric eigenvalue of a non-square matrix");
  if (S.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(S, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("symmetric eigensolver did not converge");
  return solver.eigenvalues().minCoeff();
}

double min_real_eigenpart(const MatrixRef& H) {
  if (H.rows() != H.cols()) throw DomainError("eigenvalues of a non-square matrix");
  if (!H.allFinite()) throw DomainError("eigenvalues of a non-finite matrix");
  const Index dim = H.rows();
  if (dim == 0) return 0.0;
  Eigen::EigenSolver<Matrix> solver;
  solver.setMaxIterations(100 * dim);
  solver.compute(H, false);
  if (solver.info() != Eigen::Success)
    throw NumericalError("nonsymmetric eigensolver did not converge within 100*dim iterations");
  return solver.eigenvalues().real().minCoeff();
}

SpectralSummary summarize_spectrum(const HessianDecomposition& dec) {
  SpectralSummary s;
  s.norm_S = spectral_norm(dec.S);
  s.norm_A = spectral_norm(dec.A);
  s.norm_H = spectral_norm(dec.H);
  s.lambda_min_real = min_real_eigenpart(dec.H);
  s.sigma_min = min_singular_value(dec.H);
  return s;
}

double ParameterBounds::eta_max(double tau) const {
  const double a = spectrum.norm_A;
  return tau * spectrum.sigma_min * spectrum.sigma_min /
         ((1.0 + tau * tau * a * a) * spectrum.norm_H * spectrum.norm_H);
}

double ParameterBounds::h(double tau) const { return 0.5 * tau * spectrum.sigma_min * spectrum.sigma_min; }

double ParameterBounds::kappa(double tau) const {
  const double a = spectrum.norm_A;
  return tau / (2.0 * (1.0 + tau * tau * a * a));
}

double ParameterBounds::lipschitz(double tau) const {
  const double a = spectrum.norm_A;
  return std::sqrt(1.0 + tau * tau * a * a) * spectrum.norm_H;
}

ParameterBounds parameter_bounds(const HessianDecomposition& dec, double tol) {
  const double min_sym = min_symmetric_eigenvalue(dec.S);
  if (min_sym < -tol) {
    std::ostringstream msg;
    msg << "not SNE-admissible: game Hessian is not positive semi-definite (min eigenvalue of S = "
        << min_sym << ")";
    throw AdmissibilityError(msg.str());
  }
  ParameterBounds b;
  b.spectrum = summarize_spectrum(dec);
  if (!(b.spectrum.sigma_min > tol * b.spectrum.norm_H)) {
    std::ostringstream msg;
    msg << "not SNE-admissible: game Hessian is not invertible (sigma_min = " << b.spectrum.sigma_min << ")";
    throw AdmissibilityError(msg.str());
  }
  const double inf = std::numeric_limits<double>::infinity();
  b.s_is_zero = b.spectrum.norm_S <= 1e-12 * b.spectrum.norm_H;
  if (b.s_is_zero) {
    b.tau_max = inf;
    b.tau_max_ism = inf;
  } else {
    if (!(b.spectrum.lambda_min_real > 0.0)) {
      std::ostringstream msg;
      msg << "not SNE-admissible: minimum real eigenvalue part is not positive (lambda_min = "
          << b.spectrum.lambda_min_real << ")";
      throw AdmissibilityError(msg.str());
    }
    b.tau_max = 2.0 * b.spectrum.lambda_min_real / (b.spectrum.norm_S * b.spectrum.norm_S);
    b.tau_max_ism = 2.0 / b.spectrum.norm_S;
  }
  return b;
}

double contraction_factor(double eta, double h, double L) {
  if (eta == 0.0) return 1.0;
  const double upper = 2.0 * h / (L * L);
  if (!(eta > 0.0) || !(eta < upper)) {
    std::ostringstream msg;
    msg << "stepsize " << eta << " outside (0, 2h/L^2) = (0, " << upper << ")";
    throw DomainError(msg.str());
  }
  return 1.0 - eta * (2.0 * h - eta * L * L);
}

double antisym_block_norm(const MatrixRef& C) {
  if (C.size() == 0) return 0.0;
  const Matrix cct = C * C.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(cct, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("symmetric eigensolver did not converge");
  return std::sqrt(std::max(0.0, solver.eigenvalues().maxCoeff()));
}

}  // namespace nashopt
