#pragma once

#include "nashopt/game.hpp"
#include "nashopt/types.hpp"

namespace nashopt {

// Largest singular value, from the symmetric eigenproblem of MᵀM.
double spectral_norm(const MatrixRef& M);

// Smallest singular value, from the symmetric eigenproblem of MᵀM.
double min_singular_value(const MatrixRef& M);

// Smallest eigenvalue of a symmetric matrix.
double min_symmetric_eigenvalue(const MatrixRef& S);

// Minimum over eigenvalues of Re(λ). Uses a Hessenberg reduction followed by
// shifted QR with an iteration cap of 100·dim; throws NumericalError when the
// cap is hit.
double min_real_eigenpart(const MatrixRef& H);

struct SpectralSummary {
  double norm_S = 0.0;
  double norm_A = 0.0;
  double norm_H = 0.0;
  double lambda_min_real = 0.0;
  double sigma_min = 0.0;
};

SpectralSummary summarize_spectrum(const HessianDecomposition& dec);

// Admissible parameter ranges for SGA on an SNE-admissible Hessian.
struct ParameterBounds {
  SpectralSummary spectrum;
  bool s_is_zero = false;
  // Strong-monotonicity range, 2·λ_min/‖S‖² (infinite when S = 0).
  double tau_max = 0.0;
  // Inverse-strong-monotonicity range, 2/‖S‖ (infinite when S = 0).
  double tau_max_ism = 0.0;

  double eta_max(double tau) const;
  double h(double tau) const;
  double kappa(double tau) const;
  double lipschitz(double tau) const;
};

// Throws AdmissibilityError ("not SNE-admissible: ...") naming the failed
// check when S has a negative eigenvalue beyond tol or H is singular
// relative to tol.
ParameterBounds parameter_bounds(const HessianDecomposition& dec, double tol = 1e-9);

// 1 − η(2h − ηL²), requires η ∈ (0, 2h/L²) and η = 0 gives exactly 1.
double contraction_factor(double eta, double h, double L);

// ‖[[0, C], [−Cᵀ, 0]]‖₂ computed as √ρ(CCᵀ) = ‖C‖₂.
double antisym_block_norm(const MatrixRef& C);

}  // namespace nashopt
