#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "treetrack/features.hpp"
#include "treetrack/rng.hpp"

namespace treetrack {

enum class Label : std::uint8_t { Positive = 0, Negative = 1 };

struct TrainingExample {
  FeatureVector features;
  Label label = Label::Positive;
  int frame = 0;
};

struct SgdHyper {
  double learning_rate = 0.003;
  int iterations = 10;
  double momentum = 0.9;
  double weight_decay = 0.0005;
  int batch_pos = 32;
  int batch_neg = 96;

  /// First-frame schedule: 50 steps at 0.001.
  static SgdHyper initial() {
    SgdHyper h;
    h.learning_rate = 0.001;
    h.iterations = 50;
    return h;
  }
  /// Per-node fine-tuning: 10 steps at 0.003.
  static SgdHyper online() { return SgdHyper{}; }

  void validate() const;
};

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out

  friend bool operator==(const DenseLayer& a, const DenseLayer& b) {
    return a.weight.rows() == b.weight.rows() && a.weight.cols() == b.weight.cols() &&
           a.weight == b.weight && a.bias == b.bias;
  }
};

/// Three dense layers, D -> H -> H -> 2, ReLU between, softmax on top.
/// Output row 0 is the target score phi, row 1 the background score.
class AppearanceHead {
 public:
  AppearanceHead() = default;
  /// All-zero weights and biases.
  AppearanceHead(int input_dim, int hidden);

  /// Glorot-uniform weights, zero biases.
  static AppearanceHead random(int input_dim, int hidden, RngStream& rng);

  int input_dim() const { return static_cast<int>(layers_[0].weight.cols()); }
  int hidden() const { return static_cast<int>(layers_[0].weight.rows()); }

  /// Positive-class probability phi(f).
  double score(const FeatureVector& f) const;
  /// [phi, 1 - phi], each computed from its own exponent.
  std::array<double, 2> probabilities(const FeatureVector& f) const;
  /// phi for every column of a D x N matrix.
  Eigen::VectorXd score_batch(const FeatureMatrix& features) const;
  /// Pre-softmax outputs (2 x N).
  Eigen::Matrix2Xd logits(const FeatureMatrix& features) const;

  AppearanceHead clone() const { return *this; }

  std::array<DenseLayer, 3>& layers() { return layers_; }
  const std::array<DenseLayer, 3>& layers() const { return layers_; }

  std::size_t parameter_count() const;
  /// Parameters in layer order; each layer's weights row-major, then bias.
  std::vector<double> flat_parameters() const;
  void set_flat_parameters(std::span<const double> values);

  friend bool operator==(const AppearanceHead&, const AppearanceHead&) = default;

 private:
  void check_input(Eigen::Index rows) const;

  std::array<DenseLayer, 3> layers_;
};

struct HeadGradient {
  std::array<DenseLayer, 3> layers;
  double loss = 0.0;  // mean cross-entropy of the batch

  std::vector<double> flat() const;
};

/// Mean softmax cross-entropy over the columns of `features`.
double mean_loss(const AppearanceHead& head, const FeatureMatrix& features,
                 std::span<const Label> labels);

/// Exact gradient of mean_loss with respect to every weight and bias.
HeadGradient gradient(const AppearanceHead& head, const FeatureMatrix& features,
                      std::span<const Label> labels);

/// Runs hyper.iterations momentum-SGD steps on minibatches of batch_pos
/// positives and batch_neg negatives (drawn with replacement only when a class
/// has fewer examples than requested). L2 decay applies to weights, not
/// biases, and is added to the gradient rather than the loss.
AppearanceHead train(AppearanceHead head, std::span<const TrainingExample* const> pool,
                     const SgdHyper& hyper, RngStream& rng);
AppearanceHead train(AppearanceHead head, std::span<const TrainingExample> pool,
                     const SgdHyper& hyper, RngStream& rng);

}  // namespace treetrack
