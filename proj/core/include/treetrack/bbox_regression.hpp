#pragma once

#include <Eigen/Core>
#include <array>
#include <span>

#include "treetrack/features.hpp"
#include "treetrack/geometry.hpp"

namespace treetrack {

struct RegressionExample {
  FeatureVector features;  // descriptor of the proposal box
  BoundingBox proposal;
  BoundingBox truth;
};

/// (dx, dy, dw, dh) with center offsets relative to the proposal size and
/// log size ratios.
using BoxDeltas = std::array<double, 4>;

BoxDeltas regression_targets(const BoundingBox& proposal, const BoundingBox& truth);
BoundingBox apply_deltas(const BoundingBox& box, const BoxDeltas& deltas);

/// Solves (X^T X + lambda I) w = X^T y, X holding one sample per row.
Eigen::VectorXd ridge_solve(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda);

/// Four independent ridge regressors (one per delta) over centered features,
/// with unpenalized intercepts, fitted once on first-frame proposals.
class BoxRegressor {
 public:
  static constexpr double kDefaultLambda = 1000.0;
  static constexpr double kDefaultIouGate = 0.6;

  BoxRegressor() = default;

  /// Uses only proposals with IoU > iou_gate against their truth box. If none
  /// pass, the result is untrained and refine() is the identity.
  static BoxRegressor fit(std::span<const RegressionExample> examples,
                          double lambda = kDefaultLambda, double iou_gate = kDefaultIouGate);

  bool trained() const { return trained_; }
  double lambda() const { return lambda_; }
  std::size_t training_count() const { return training_count_; }

  BoxDeltas predict(const FeatureVector& features) const;
  BoundingBox refine(const BoundingBox& box, const FeatureVector& features) const;

  const std::array<Eigen::VectorXd, 4>& weights() const { return weights_; }
  const BoxDeltas& biases() const { return biases_; }

 private:
  bool trained_ = false;
  double lambda_ = kDefaultLambda;
  std::size_t training_count_ = 0;
  std::array<Eigen::VectorXd, 4> weights_;
  BoxDeltas biases_{};
};

}  // namespace treetrack
