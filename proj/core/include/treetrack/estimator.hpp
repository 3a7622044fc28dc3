#pragma once

#include <Eigen/Core>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "treetrack/geometry.hpp"
#include "treetrack/model_tree.hpp"

namespace treetrack {

/// Ways of combining the active heads. TCNN weights heads by
/// min(affinity, reliability); the others are the internal baselines.
enum class EstimationMode { TCNN, TreeMax, TreeMean, LinearMean, LinearSingle };

std::string to_string(EstimationMode mode);
/// Accepts "TCNN", "TreeMax"/"Tree_max", etc. (case-insensitive, '_' optional).
EstimationMode parse_mode(std::string_view text);
const std::vector<EstimationMode>& all_modes();
/// Tree modes choose parents by reliability; linear modes chain to the newest node.
bool uses_tree_updates(EstimationMode mode);

// Score matrices are (active nodes x candidates), rows in active-set order.

/// alpha_v = max over candidates of phi_v.
std::vector<double> affinities(const Eigen::MatrixXd& scores);

struct WeightResult {
  std::vector<double> weights;
  bool fallback = false;  // TCNN denominator was zero; weights are uniform
};

WeightResult weights(std::span<const double> alpha, std::span<const double> beta,
                     EstimationMode mode);

/// H_i = sum_v w_v * phi_v(i).
std::vector<double> aggregate(std::span<const double> weights, const Eigen::MatrixXd& scores);

/// Index of the maximal H; ties go to the lowest index.
std::size_t best_candidate(std::span<const double> combined);

struct FrameEstimate {
  std::size_t best_index = 0;
  TargetState best_state;
  double best_score = 0.0;
  std::vector<NodeId> nodes;
  std::vector<double> affinities;
  std::vector<double> reliabilities;
  std::vector<double> weights;
  bool weight_fallback = false;
  Eigen::MatrixXd scores;
  std::vector<double> combined;
};

FrameEstimate estimate(std::span<const TargetState> candidates, std::span<const NodeId> nodes,
                       std::span<const double> reliabilities, Eigen::MatrixXd scores,
                       EstimationMode mode);

}  // namespace treetrack
