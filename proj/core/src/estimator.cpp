#include "treetrack/estimator.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace treetrack {

std::string to_string(EstimationMode mode) {
  switch (mode) {
    case EstimationMode::TCNN: return "TCNN";
    case EstimationMode::TreeMax: return "Tree_max";
    case EstimationMode::TreeMean: return "Tree_mean";
    case EstimationMode::LinearMean: return "Linear_mean";
    case EstimationMode::LinearSingle: return "Linear_single";
  }
  return "unknown";
}

EstimationMode parse_mode(std::string_view text) {
  std::string key;
  for (char c : text) {
    if (c != '_' && c != '-') key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (key == "tcnn") return EstimationMode::TCNN;
  if (key == "treemax") return EstimationMode::TreeMax;
  if (key == "treemean") return EstimationMode::TreeMean;
  if (key == "linearmean") return EstimationMode::LinearMean;
  if (key == "linearsingle") return EstimationMode::LinearSingle;
  throw std::invalid_argument("unknown estimation mode: " + std::string(text));
}

const std::vector<EstimationMode>& all_modes() {
  static const std::vector<EstimationMode> modes{
      EstimationMode::LinearSingle, EstimationMode::LinearMean, EstimationMode::TreeMean,
      EstimationMode::TreeMax, EstimationMode::TCNN};
  return modes;
}

bool uses_tree_updates(EstimationMode mode) {
  return mode == EstimationMode::TCNN || mode == EstimationMode::TreeMax ||
         mode == EstimationMode::TreeMean;
}

std::vector<double> affinities(const Eigen::MatrixXd& scores) {
  if (scores.cols() == 0) throw std::invalid_argument("affinities need at least one candidate");
  std::vector<double> out(static_cast<std::size_t>(scores.rows()));
  for (Eigen::Index v = 0; v < scores.rows(); ++v) out[v] = scores.row(v).maxCoeff();
  return out;
}

WeightResult weights(std::span<const double> alpha, std::span<const double> beta,
                     EstimationMode mode) {
  if (alpha.size() != beta.size() || alpha.empty()) {
    throw std::invalid_argument("affinity and reliability lists must match and be nonempty");
  }
  const std::size_t n = alpha.size();
  WeightResult r;
  r.weights.assign(n, 0.0);
  auto uniform = [&] { std::fill(r.weights.begin(), r.weights.end(), 1.0 / static_cast<double>(n)); };

  switch (mode) {
    case EstimationMode::TCNN: {
      double total = 0.0;
      for (std::size_t v = 0; v < n; ++v) total += std::min(alpha[v], beta[v]);
      if (total > 0.0) {
        for (std::size_t v = 0; v < n; ++v) r.weights[v] = std::min(alpha[v], beta[v]) / total;
      } else {
        uniform();
        r.fallback = true;
      }
      break;
    }
    case EstimationMode::TreeMax: {
      std::size_t best = 0;
      for (std::size_t v = 1; v < n; ++v) {
        if (std::min(alpha[v], beta[v]) >= std::min(alpha[best], beta[best])) best = v;
      }
      r.weights[best] = 1.0;
      break;
    }
    case EstimationMode::TreeMean:
    case EstimationMode::LinearMean:
      uniform();
      break;
    case EstimationMode::LinearSingle:
      r.weights[n - 1] = 1.0;
      break;
  }
  return r;
}

std::vector<double> aggregate(std::span<const double> w, const Eigen::MatrixXd& scores) {
  if (static_cast<Eigen::Index>(w.size()) != scores.rows()) {
    throw std::invalid_argument("weight count does not match score rows");
  }
  std::vector<double> h(static_cast<std::size_t>(scores.cols()), 0.0);
  for (Eigen::Index v = 0; v < scores.rows(); ++v) {
    if (w[v] == 0.0) continue;
    for (Eigen::Index i = 0; i < scores.cols(); ++i) h[i] += w[v] * scores(v, i);
  }
  return h;
}

std::size_t best_candidate(std::span<const double> combined) {
  if (combined.empty()) throw std::invalid_argument("no candidates to choose from");
  std::size_t best = 0;
  for (std::size_t i = 1; i < combined.size(); ++i) {
    if (combined[i] > combined[best]) best = i;
  }
  return best;
}

FrameEstimate estimate(std::span<const TargetState> candidates, std::span<const NodeId> nodes,
                       std::span<const double> reliabilities, Eigen::MatrixXd scores,
                       EstimationMode mode) {
  if (scores.rows() != static_cast<Eigen::Index>(nodes.size()) ||
      scores.cols() != static_cast<Eigen::Index>(candidates.size())) {
    throw std::invalid_argument("score matrix shape does not match nodes x candidates");
  }
  FrameEstimate e;
  e.nodes.assign(nodes.begin(), nodes.end());
  e.reliabilities.assign(reliabilities.begin(), reliabilities.end());
  e.affinities = affinities(scores);
  auto w = weights(e.affinities, e.reliabilities, mode);
  e.weights = std::move(w.weights);
  e.weight_fallback = w.fallback;
  e.combined = aggregate(e.weights, scores);
  e.best_index = best_candidate(e.combined);
  e.best_state = candidates[e.best_index];
  e.best_score = e.combined[e.best_index];
  e.scores = std::move(scores);
  return e;
}

}  // namespace treetrack
