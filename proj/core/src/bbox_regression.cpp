#include "treetrack/bbox_regression.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

namespace treetrack {

BoxDeltas regression_targets(const BoundingBox& p, const BoundingBox& g) {
  return {(g.center_x() - p.center_x()) / p.w, (g.center_y() - p.center_y()) / p.h,
          std::log(g.w / p.w), std::log(g.h / p.h)};
}

BoundingBox apply_deltas(const BoundingBox& p, const BoxDeltas& d) {
  // Offsets are applied to the corner so zero deltas reproduce the box exactly.
  const double w = p.w * std::exp(d[2]);
  const double h = p.h * std::exp(d[3]);
  return BoundingBox(p.x + p.w * d[0] + 0.5 * (p.w - w), p.y + p.h * d[1] + 0.5 * (p.h - h), w, h);
}

Eigen::VectorXd ridge_solve(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda) {
  if (x.rows() != y.size()) throw std::invalid_argument("ridge: row count mismatch");
  if (lambda < 0.0) throw std::invalid_argument("ridge: lambda must be non-negative");
  Eigen::MatrixXd gram = x.transpose() * x;
  gram.diagonal().array() += lambda;
  return gram.ldlt().solve(x.transpose() * y);
}

BoxRegressor BoxRegressor::fit(std::span<const RegressionExample> examples, double lambda,
                               double iou_gate) {
  BoxRegressor reg;
  reg.lambda_ = lambda;
  std::vector<const RegressionExample*> kept;
  for (const auto& ex : examples) {
    if (iou(ex.proposal, ex.truth) > iou_gate) kept.push_back(&ex);
  }
  if (kept.empty()) return reg;

  const auto n = static_cast<Eigen::Index>(kept.size());
  const auto d = kept.front()->features.size();
  Eigen::MatrixXd x(n, d);
  Eigen::MatrixXd t(n, 4);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (kept[i]->features.size() != d) throw std::invalid_argument("inconsistent feature sizes");
    x.row(i) = kept[i]->features.transpose();
    const auto target = regression_targets(kept[i]->proposal, kept[i]->truth);
    for (int k = 0; k < 4; ++k) t(i, k) = target[k];
  }
  const Eigen::RowVectorXd x_mean = x.colwise().mean();
  const Eigen::RowVectorXd t_mean = t.colwise().mean();
  x.rowwise() -= x_mean;
  t.rowwise() -= t_mean;

  Eigen::MatrixXd gram = x.transpose() * x;
  gram.diagonal().array() += lambda;
  const Eigen::LDLT<Eigen::MatrixXd> solver(gram);
  const Eigen::MatrixXd w = solver.solve(x.transpose() * t);
  for (int k = 0; k < 4; ++k) {
    reg.weights_[k] = w.col(k);
    reg.biases_[k] = t_mean[k] - x_mean.dot(w.col(k));
    if (!reg.weights_[k].allFinite() || !std::isfinite(reg.biases_[k])) {
      throw std::runtime_error("box regression produced non-finite weights");
    }
  }
  reg.trained_ = true;
  reg.training_count_ = kept.size();
  return reg;
}

BoxDeltas BoxRegressor::predict(const FeatureVector& f) const {
  if (!trained_) return {0.0, 0.0, 0.0, 0.0};
  if (f.size() != weights_[0].size()) {
    throw std::invalid_argument("regressor feature dimension mismatch");
  }
  BoxDeltas out{};
  for (int k = 0; k < 4; ++k) out[k] = weights_[k].dot(f) + biases_[k];
  return out;
}

BoundingBox BoxRegressor::refine(const BoundingBox& box, const FeatureVector& f) const {
  if (!trained_) return box;
  return apply_deltas(box, predict(f));
}

}  // namespace treetrack
