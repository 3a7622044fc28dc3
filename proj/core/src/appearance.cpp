#include "treetrack/appearance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace treetrack {

void SgdHyper::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (momentum < 0.0 || momentum >= 1.0) throw std::invalid_argument("momentum must be in [0,1)");
  if (weight_decay < 0.0) throw std::invalid_argument("weight decay must be non-negative");
  if (batch_pos < 1 || batch_neg < 1) throw std::invalid_argument("minibatch counts must be >= 1");
}

AppearanceHead::AppearanceHead(int input_dim, int hidden) {
  if (input_dim < 1 || hidden < 1) throw std::invalid_argument("head dimensions must be >= 1");
  const std::array<std::pair<int, int>, 3> shapes{
      {{hidden, input_dim}, {hidden, hidden}, {2, hidden}}};
  for (std::size_t l = 0; l < 3; ++l) {
    layers_[l].weight = Eigen::MatrixXd::Zero(shapes[l].first, shapes[l].second);
    layers_[l].bias = Eigen::VectorXd::Zero(shapes[l].first);
  }
}

AppearanceHead AppearanceHead::random(int input_dim, int hidden, RngStream& rng) {
  AppearanceHead head(input_dim, hidden);
  for (auto& layer : head.layers_) {
    const double a = std::sqrt(6.0 / static_cast<double>(layer.weight.rows() + layer.weight.cols()));
    // Row-major fill order so the draw sequence matches the flat layout.
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
        layer.weight(r, c) = rng.uniform(-a, a);
      }
    }
  }
  return head;
}

void AppearanceHead::check_input(Eigen::Index rows) const {
  if (rows != layers_[0].weight.cols()) {
    throw std::invalid_argument("feature dimension " + std::to_string(rows) +
                                " does not match head input " +
                                std::to_string(layers_[0].weight.cols()));
  }
}

Eigen::Matrix2Xd AppearanceHead::logits(const FeatureMatrix& features) const {
  check_input(features.rows());
  Eigen::MatrixXd a1 = ((layers_[0].weight * features).colwise() + layers_[0].bias).cwiseMax(0.0);
  Eigen::MatrixXd a2 = ((layers_[1].weight * a1).colwise() + layers_[1].bias).cwiseMax(0.0);
  return (layers_[2].weight * a2).colwise() + layers_[2].bias;
}

namespace {

// Softmax of a 2-vector, each entry from its own exponent.
std::array<double, 2> softmax2(double z0, double z1) {
  const double m = std::max(z0, z1);
  const double e0 = std::exp(z0 - m);
  const double e1 = std::exp(z1 - m);
  const double sum = e0 + e1;
  return {e0 / sum, e1 / sum};
}

// -log softmax(z)[k]
double cross_entropy(double z0, double z1, int k) {
  const double m = std::max(z0, z1);
  const double lse = m + std::log(std::exp(z0 - m) + std::exp(z1 - m));
  return lse - (k == 0 ? z0 : z1);
}

}  // namespace

Eigen::VectorXd AppearanceHead::score_batch(const FeatureMatrix& features) const {
  const Eigen::Matrix2Xd z = logits(features);
  Eigen::VectorXd out(z.cols());
  for (Eigen::Index i = 0; i < z.cols(); ++i) out[i] = softmax2(z(0, i), z(1, i))[0];
  return out;
}

std::array<double, 2> AppearanceHead::probabilities(const FeatureVector& f) const {
  const Eigen::Matrix2Xd z = logits(f);
  return softmax2(z(0, 0), z(1, 0));
}

double AppearanceHead::score(const FeatureVector& f) const { return probabilities(f)[0]; }

std::size_t AppearanceHead::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

namespace {

void append_layers(const std::array<DenseLayer, 3>& layers, std::vector<double>& out) {
  for (const auto& l : layers) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) out.push_back(l.weight(r, c));
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) out.push_back(l.bias[r]);
  }
}

}  // namespace

std::vector<double> AppearanceHead::flat_parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  append_layers(layers_, out);
  return out;
}

void AppearanceHead::set_flat_parameters(std::span<const double> values) {
  if (values.size() != parameter_count()) {
    throw std::invalid_argument("flat parameter count mismatch");
  }
  std::size_t at = 0;
  for (auto& l : layers_) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = values[at++];
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias[r] = values[at++];
  }
}

std::vector<double> HeadGradient::flat() const {
  std::vector<double> out;
  append_layers(layers, out);
  return out;
}

double mean_loss(const AppearanceHead& head, const FeatureMatrix& features,
                 std::span<const Label> labels) {
  if (static_cast<std::size_t>(features.cols()) != labels.size() || labels.empty()) {
    throw std::invalid_argument("batch must be nonempty with one label per column");
  }
  const Eigen::Matrix2Xd z = head.logits(features);
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.cols(); ++i) {
    total += cross_entropy(z(0, i), z(1, i), static_cast<int>(labels[i]));
  }
  return total / static_cast<double>(labels.size());
}

HeadGradient gradient(const AppearanceHead& head, const FeatureMatrix& x,
                      std::span<const Label> labels) {
  if (static_cast<std::size_t>(x.cols()) != labels.size() || labels.empty()) {
    throw std::invalid_argument("batch must be nonempty with one label per column");
  }
  const auto& L = head.layers();
  const double inv_n = 1.0 / static_cast<double>(labels.size());

  const Eigen::MatrixXd z1 = (L[0].weight * x).colwise() + L[0].bias;
  const Eigen::MatrixXd a1 = z1.cwiseMax(0.0);
  const Eigen::MatrixXd z2 = (L[1].weight * a1).colwise() + L[1].bias;
  const Eigen::MatrixXd a2 = z2.cwiseMax(0.0);
  const Eigen::Matrix2Xd z3 = (L[2].weight * a2).colwise() + L[2].bias;

  HeadGradient g;
  Eigen::Matrix2Xd dz3(2, z3.cols());
  for (Eigen::Index i = 0; i < z3.cols(); ++i) {
    const int k = static_cast<int>(labels[i]);
    const auto p = softmax2(z3(0, i), z3(1, i));
    g.loss += cross_entropy(z3(0, i), z3(1, i), k);
    dz3(0, i) = (p[0] - (k == 0 ? 1.0 : 0.0)) * inv_n;
    dz3(1, i) = (p[1] - (k == 1 ? 1.0 : 0.0)) * inv_n;
  }
  g.loss *= inv_n;

  g.layers[2].weight = dz3 * a2.transpose();
  g.layers[2].bias = dz3.rowwise().sum();

  const Eigen::MatrixXd dz2 =
      (L[2].weight.transpose() * dz3).cwiseProduct((z2.array() > 0.0).cast<double>().matrix());
  g.layers[1].weight = dz2 * a1.transpose();
  g.layers[1].bias = dz2.rowwise().sum();

  const Eigen::MatrixXd dz1 =
      (L[1].weight.transpose() * dz2).cwiseProduct((z1.array() > 0.0).cast<double>().matrix());
  g.layers[0].weight = dz1 * x.transpose();
  g.layers[0].bias = dz1.rowwise().sum();
  return g;
}

namespace {

// Picks `want` indices out of [0, have): distinct when have >= want.
void sample_indices(std::size_t have, std::size_t want, RngStream& rng,
                    std::vector<std::size_t>& scratch, std::vector<std::size_t>& out) {
  out.clear();
  if (have >= want) {
    scratch.resize(have);
    std::iota(scratch.begin(), scratch.end(), std::size_t{0});
    for (std::size_t i = 0; i < want; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(have - i));
      std::swap(scratch[i], scratch[j]);
      out.push_back(scratch[i]);
    }
  } else {
    for (std::size_t i = 0; i < want; ++i) out.push_back(static_cast<std::size_t>(rng.below(have)));
  }
}

}  // namespace

AppearanceHead train(AppearanceHead head, std::span<const TrainingExample* const> pool,
                     const SgdHyper& hyper, RngStream& rng) {
  hyper.validate();
  std::vector<const FeatureVector*> pos, neg;
  for (const auto* ex : pool) {
    if (static_cast<int>(ex->features.size()) != head.input_dim()) {
      throw std::invalid_argument("training example dimension does not match head");
    }
    (ex->label == Label::Positive ? pos : neg).push_back(&ex->features);
  }
  if (pos.empty() || neg.empty()) {
    throw std::invalid_argument("training pool needs at least one positive and one negative");
  }

  const auto n_pos = static_cast<std::size_t>(hyper.batch_pos);
  const auto n_neg = static_cast<std::size_t>(hyper.batch_neg);
  FeatureMatrix batch(head.input_dim(), static_cast<Eigen::Index>(n_pos + n_neg));
  std::vector<Label> labels(n_pos, Label::Positive);
  labels.insert(labels.end(), n_neg, Label::Negative);

  std::array<DenseLayer, 3> velocity;
  for (std::size_t l = 0; l < 3; ++l) {
    velocity[l].weight = Eigen::MatrixXd::Zero(head.layers()[l].weight.rows(),
                                               head.layers()[l].weight.cols());
    velocity[l].bias = Eigen::VectorXd::Zero(head.layers()[l].bias.size());
  }

  std::vector<std::size_t> scratch, picks;
  for (int it = 0; it < hyper.iterations; ++it) {
    Eigen::Index col = 0;
    sample_indices(pos.size(), n_pos, rng, scratch, picks);
    for (auto i : picks) batch.col(col++) = *pos[i];
    sample_indices(neg.size(), n_neg, rng, scratch, picks);
    for (auto i : picks) batch.col(col++) = *neg[i];

    const HeadGradient g = gradient(head, batch, labels);
    for (std::size_t l = 0; l < 3; ++l) {
      auto& layer = head.layers()[l];
      velocity[l].weight = hyper.momentum * velocity[l].weight -
                           hyper.learning_rate *
                               (g.layers[l].weight + hyper.weight_decay * layer.weight);
      velocity[l].bias = hyper.momentum * velocity[l].bias - hyper.learning_rate * g.layers[l].bias;
      layer.weight += velocity[l].weight;
      layer.bias += velocity[l].bias;
    }
  }
  return head;
}

AppearanceHead train(AppearanceHead head, std::span<const TrainingExample> pool,
                     const SgdHyper& hyper, RngStream& rng) {
  std::vector<const TrainingExample*> ptrs;
  ptrs.reserve(pool.size());
  for (const auto& ex : pool) ptrs.push_back(&ex);
  return train(std::move(head), std::span<const TrainingExample* const>(ptrs), hyper, rng);
}

}  // namespace treetrack
