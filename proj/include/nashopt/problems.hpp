#pragma once

#include "nashopt/game.hpp"

#include <cstdint>
#include <memory>

namespace nashopt {

// f = ½x² + xy, g = ½y² − xy. Equilibrium (0, 0); GD cycles at η = 1.
SmoothGame make_bilinear_intro();

// f = x² + 3xy, g = y² + 3xy. H = [[2,3],[3,2]] is invertible but indefinite.
SmoothGame make_indefinite_example();

// f = xᵀ·payoff·y, g = −f.
SmoothGame make_zero_sum_bilinear(const MatrixRef& payoff);

struct RandomQuadraticSpec {
  std::uint64_t seed = 0;
  Index m = 2;
  Index n = 2;
  double lambda_floor = 1.0;
  double coupling_scale = 0.3;
};

struct GameWithEquilibrium {
  SmoothGame game;
  Vector w_star;
};

// Quadratic game whose symmetric Hessian part has minimum eigenvalue at
// least lambda_floor/2, with a uniformly drawn equilibrium in [−1, 1]^{m+n}.
// Throws DomainError after 1000 rejected draws.
GameWithEquilibrium make_random_sne_quadratic(const RandomQuadraticSpec& spec);

struct ContrastiveGameSpec {
  Index batch_size = 8;  // N
  Index d_img = 6;
  Index d_txt = 6;
  Index embed_dim = 4;  // p
  double temperature = 0.09;
  std::uint64_t data_seed = 0;
  bool analytic_gradients = true;

  void validate() const;
};

// Synthetic paired features for the two-encoder contrastive game.
struct ContrastiveData {
  Matrix image;  // d_img x N, column i is sample i
  Matrix text;   // d_txt x N
};

ContrastiveData make_contrastive_data(const ContrastiveGameSpec& spec);

// Two linear encoders (x: p x d_img weights, y: p x d_txt weights, both
// column-major flattened). Embeddings are normalized, logits are scaled
// inner products, f = image-side softmax cross-entropy, g = text-side.
SmoothGame make_toy_contrastive(const ContrastiveGameSpec& spec);
SmoothGame make_toy_contrastive(const ContrastiveGameSpec& spec, ContrastiveData data);

// The two losses of a logits matrix: rows (image side) and columns (text side).
double contrastive_row_loss(const MatrixRef& logits);
double contrastive_column_loss(const MatrixRef& logits);

// Seeded encoder initialization, entries N(0, 1/d).
Vector contrastive_initial_point(const ContrastiveGameSpec& spec, std::uint64_t seed);

}  // namespace nashopt
