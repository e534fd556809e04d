#include "nashopt/problems.hpp"

#include "nashopt/bounds.hpp"
#include "nashopt/rng.hpp"

#include <Eigen/QR>

#include <cmath>
#include <random>
#include <string>

namespace nashopt {

namespace {

Matrix scalar_matrix(double v) { return Matrix::Constant(1, 1, v); }

Matrix random_orthogonal(Index k, CounterRng& rng) {
  std::normal_distribution<double> normal;
  Matrix G(k, k);
  for (Index j = 0; j < k; ++j)
    for (Index i = 0; i < k; ++i) G(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(G);
  return qr.householderQ() * Matrix::Identity(k, k);
}

Matrix random_spd(Index k, double floor, CounterRng& rng) {
  const Matrix Q = random_orthogonal(k, rng);
  Vector eig(k);
  for (Index i = 0; i < k; ++i) eig[i] = rng.uniform(floor, 1.0 + floor);
  Matrix out = Q * eig.asDiagonal() * Q.transpose();
  return 0.5 * (out + out.transpose());
}

}  // namespace

SmoothGame make_bilinear_intro() {
  QuadraticGame q{scalar_matrix(1.0), scalar_matrix(1.0), scalar_matrix(-1.0), scalar_matrix(1.0),
                  Vector::Zero(1), Vector::Zero(1)};
  return SmoothGame::from_quadratic("bilinear-intro", std::move(q));
}

SmoothGame make_indefinite_example() {
  // ∂x f = 2x + 3y, ∂y g = 2y + 3x.
  QuadraticGame q{scalar_matrix(2.0), scalar_matrix(3.0), scalar_matrix(3.0), scalar_matrix(2.0),
                  Vector::Zero(1), Vector::Zero(1)};
  return SmoothGame::from_quadratic("indefinite-example", std::move(q));
}

SmoothGame make_zero_sum_bilinear(const MatrixRef& payoff) {
  const Index m = payoff.rows();
  const Index n = payoff.cols();
  QuadraticGame q{Matrix::Zero(m, m), payoff, -payoff.transpose(), Matrix::Zero(n, n),
                  Vector::Zero(m), Vector::Zero(n)};
  return SmoothGame::from_quadratic("zero-sum-bilinear", std::move(q));
}

GameWithEquilibrium make_random_sne_quadratic(const RandomQuadraticSpec& spec) {
  if (spec.m < 1 || spec.n < 1) throw DomainError("random quadratic game needs m, n >= 1");
  if (!(spec.lambda_floor > 0.0)) throw DomainError("lambda_floor must be positive");
  if (!(spec.coupling_scale >= 0.0)) throw DomainError("coupling_scale must be non-negative");
  CounterRng root(spec.seed);
  const Index m = spec.m;
  const Index n = spec.n;
  for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
    CounterRng rng = root.split(attempt);
    QuadraticGame q;
    q.P = random_spd(m, spec.lambda_floor, rng);
    q.R = random_spd(n, spec.lambda_floor, rng);
    q.Qf.resize(m, n);
    q.Qg.resize(n, m);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < m; ++i) q.Qf(i, j) = spec.coupling_scale * rng.uniform(-1.0, 1.0);
    for (Index j = 0; j < m; ++j)
      for (Index i = 0; i < n; ++i) q.Qg(i, j) = spec.coupling_scale * rng.uniform(-1.0, 1.0);
    const Matrix H = q.hessian();
    const Matrix S = 0.5 * (H + H.transpose());
    if (min_symmetric_eigenvalue(S) < 0.5 * spec.lambda_floor) continue;

    Vector w_star(m + n);
    for (Index i = 0; i < m + n; ++i) w_star[i] = rng.uniform(-1.0, 1.0);
    const Vector b = -H * w_star;
    q.bf = b.head(m);
    q.bg = b.tail(n);
    return {SmoothGame::from_quadratic("random-quadratic", std::move(q)), std::move(w_star)};
  }
  throw DomainError("random SNE quadratic: no admissible draw in 1000 attempts; lower coupling_scale");
}

void ContrastiveGameSpec::validate() const {
  if (batch_size < 1 || d_img < 1 || d_txt < 1 || embed_dim < 1)
    throw DomainError("contrastive game sizes must be positive");
  if (!(temperature > 0.0)) throw DomainError("temperature must be positive");
}

ContrastiveData make_contrastive_data(const ContrastiveGameSpec& spec) {
  spec.validate();
  // Paired samples share a latent code so the two views are correlated.
  CounterRng rng = CounterRng(spec.data_seed).split(0xda7a);
  std::normal_distribution<double> normal;
  const Index latent = std::min(spec.d_img, spec.d_txt);
  auto gaussian = [&](Index r, Index c) {
    Matrix M(r, c);
    for (Index j = 0; j < c; ++j)
      for (Index i = 0; i < r; ++i) M(i, j) = normal(rng);
    return M;
  };
  const Matrix z = gaussian(latent, spec.batch_size);
  const Matrix mix_img = gaussian(spec.d_img, latent);
  const Matrix mix_txt = gaussian(spec.d_txt, latent);
  ContrastiveData data;
  data.image = mix_img * z + 0.3 * gaussian(spec.d_img, spec.batch_size);
  data.text = mix_txt * z + 0.3 * gaussian(spec.d_txt, spec.batch_size);
  return data;
}

double contrastive_row_loss(const MatrixRef& logits) {
  const Index N = logits.rows();
  double total = 0.0;
  for (Index i = 0; i < N; ++i) {
    const double mx = logits.row(i).maxCoeff();
    const double lse = mx + std::log((logits.row(i).array() - mx).exp().sum());
    total += lse - logits(i, i);
  }
  return total / static_cast<double>(N);
}

double contrastive_column_loss(const MatrixRef& logits) {
  return contrastive_row_loss(logits.transpose());
}

namespace {

// Forward pass shared by losses and gradients.
struct Embedding {
  Matrix raw;        // p x N
  Matrix unit;       // p x N
  Vector norms;      // N
};

Embedding embed(const Eigen::Map<const Matrix>& W, const Matrix& features, const char* side) {
  Embedding e;
  e.raw = W * features;
  e.norms = e.raw.colwise().norm().transpose();
  e.unit.resize(e.raw.rows(), e.raw.cols());
  for (Index i = 0; i < e.raw.cols(); ++i) {
    if (!(e.norms[i] >= 1e-12))
      throw EvaluationError(std::string("zero-norm ") + side + " embedding at sample " + std::to_string(i));
    e.unit.col(i) = e.raw.col(i) / e.norms[i];
  }
  return e;
}

struct ContrastiveModel {
  ContrastiveGameSpec spec;
  ContrastiveData data;

  Index size_x() const { return spec.embed_dim * spec.d_img; }
  Index size_y() const { return spec.embed_dim * spec.d_txt; }

  Eigen::Map<const Matrix> img_weights(const VectorRef& w) const {
    return {w.data(), spec.embed_dim, spec.d_img};
  }
  Eigen::Map<const Matrix> txt_weights(const VectorRef& w) const {
    return {w.data() + size_x(), spec.embed_dim, spec.d_txt};
  }

  Matrix logits(const Embedding& img, const Embedding& txt) const {
    return img.unit.transpose() * txt.unit / spec.temperature;
  }

  double loss_f(const VectorRef& w) const {
    const Embedding img = embed(img_weights(w), data.image, "image");
    const Embedding txt = embed(txt_weights(w), data.text, "text");
    return contrastive_row_loss(logits(img, txt));
  }

  double loss_g(const VectorRef& w) const {
    const Embedding img = embed(img_weights(w), data.image, "image");
    const Embedding txt = embed(txt_weights(w), data.text, "text");
    return contrastive_column_loss(logits(img, txt));
  }

  // d loss / d raw embedding for a side whose unit embeddings received
  // upstream gradient G (p x N): (I − uuᵀ)g / ‖raw‖ per column.
  static Matrix through_normalization(const Embedding& e, const Matrix& upstream) {
    Matrix out(upstream.rows(), upstream.cols());
    for (Index i = 0; i < upstream.cols(); ++i) {
      const auto u = e.unit.col(i);
      out.col(i) = (upstream.col(i) - u * u.dot(upstream.col(i))) / e.norms[i];
    }
    return out;
  }

  static Matrix softmax_rows(const Matrix& L) {
    Matrix P(L.rows(), L.cols());
    for (Index i = 0; i < L.rows(); ++i) {
      const Eigen::RowVectorXd e = (L.row(i).array() - L.row(i).maxCoeff()).exp();
      P.row(i) = e / e.sum();
    }
    return P;
  }

  Vector grad_x_f(const VectorRef& w) const {
    const Embedding img = embed(img_weights(w), data.image, "image");
    const Embedding txt = embed(txt_weights(w), data.text, "text");
    const Matrix L = logits(img, txt);
    const double N = static_cast<double>(L.rows());
    const Matrix G = (softmax_rows(L) - Matrix::Identity(L.rows(), L.cols())) / N;
    const Matrix d_unit = txt.unit * G.transpose() / spec.temperature;  // p x N
    const Matrix d_raw = through_normalization(img, d_unit);
    const Matrix dW = d_raw * data.image.transpose();
    return Eigen::Map<const Vector>(dW.data(), dW.size());
  }

  Vector grad_y_g(const VectorRef& w) const {
    const Embedding img = embed(img_weights(w), data.image, "image");
    const Embedding txt = embed(txt_weights(w), data.text, "text");
    const Matrix L = logits(img, txt);
    const double N = static_cast<double>(L.rows());
    // Column softmax of L is the row softmax of Lᵀ.
    const Matrix G = (softmax_rows(L.transpose()) - Matrix::Identity(L.cols(), L.rows())) / N;
    const Matrix d_unit = img.unit * G.transpose() / spec.temperature;
    const Matrix d_raw = through_normalization(txt, d_unit);
    const Matrix dW = d_raw * data.text.transpose();
    return Eigen::Map<const Vector>(dW.data(), dW.size());
  }
};

}  // namespace

SmoothGame make_toy_contrastive(const ContrastiveGameSpec& spec) {
  return make_toy_contrastive(spec, make_contrastive_data(spec));
}

SmoothGame make_toy_contrastive(const ContrastiveGameSpec& spec, ContrastiveData data) {
  spec.validate();
  if (data.image.rows() != spec.d_img || data.text.rows() != spec.d_txt ||
      data.image.cols() != spec.batch_size || data.text.cols() != spec.batch_size)
    throw DomainError("contrastive data shape does not match the spec");
  auto model = std::make_shared<const ContrastiveModel>(ContrastiveModel{spec, std::move(data)});
  SmoothGame::Callbacks cb;
  cb.loss_f = [model](const VectorRef& w) { return model->loss_f(w); };
  cb.loss_g = [model](const VectorRef& w) { return model->loss_g(w); };
  if (spec.analytic_gradients) {
    cb.grad_x_f = [model](const VectorRef& w) { return model->grad_x_f(w); };
    cb.grad_y_g = [model](const VectorRef& w) { return model->grad_y_g(w); };
  }
  return SmoothGame("toy-contrastive", {model->size_x(), model->size_y()}, std::move(cb));
}

Vector contrastive_initial_point(const ContrastiveGameSpec& spec, std::uint64_t seed) {
  spec.validate();
  CounterRng rng = CounterRng(seed).split(0x1417);
  std::normal_distribution<double> normal;
  const Index size_x = spec.embed_dim * spec.d_img;
  const Index size_y = spec.embed_dim * spec.d_txt;
  Vector w(size_x + size_y);
  for (Index i = 0; i < size_x; ++i) w[i] = normal(rng) / std::sqrt(static_cast<double>(spec.d_img));
  for (Index i = 0; i < size_y; ++i) w[size_x + i] = normal(rng) / std::sqrt(static_cast<double>(spec.d_txt));
  return w;
}

}  // namespace nashopt
