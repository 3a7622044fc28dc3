#include "treetrack/model_tree.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace treetrack {

ModelTree::ModelTree(int active_capacity) : capacity_(active_capacity) {
  if (active_capacity < 1) throw TreeError("active set capacity must be >= 1");
}

NodeId ModelTree::insert(ModelNode node) {
  if (node.frames.empty()) throw TreeError("node must own at least one frame");
  node.id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(std::move(node));
  active_.push_back(nodes_.back().id);
  if (active_.size() > static_cast<std::size_t>(capacity_)) active_.erase(active_.begin());
  return nodes_.back().id;
}

NodeId ModelTree::add_root(AppearanceHead head, std::vector<int> frames) {
  if (!nodes_.empty()) throw TreeError("tree already has a root");
  ModelNode n;
  n.head = std::make_shared<const AppearanceHead>(std::move(head));
  n.frames = std::move(frames);
  n.edge_score = 1.0;
  n.reliability = 1.0;
  return insert(std::move(n));
}

NodeId ModelTree::add_node(NodeId parent, AppearanceHead head, std::vector<int> frames,
                           double edge_score) {
  if (!contains(parent)) throw TreeError("unknown parent node " + std::to_string(parent));
  if (!(edge_score >= 0.0 && edge_score <= 1.0)) throw TreeError("edge score must be in [0,1]");
  ModelNode n;
  n.parent = parent;
  n.head = std::make_shared<const AppearanceHead>(std::move(head));
  n.frames = std::move(frames);
  n.edge_score = edge_score;
  n.reliability = std::min(edge_score, nodes_[static_cast<std::size_t>(parent)].reliability);
  return insert(std::move(n));
}

const ModelNode& ModelTree::node(NodeId id) const {
  if (!contains(id)) throw TreeError("unknown node " + std::to_string(id));
  return nodes_[static_cast<std::size_t>(id)];
}

bool ModelTree::is_active(NodeId id) const {
  return std::find(active_.begin(), active_.end(), id) != active_.end();
}

double edge_score(const AppearanceHead& head, std::span<const FeatureVector> state_features) {
  if (state_features.empty()) throw TreeError("edge score needs at least one frame");
  double sum = 0.0;
  for (const auto& f : state_features) sum += head.score(f);
  return sum / static_cast<double>(state_features.size());
}

double edge_score(const AppearanceHead& head, const FeatureMatrix& state_features) {
  if (state_features.cols() == 0) throw TreeError("edge score needs at least one frame");
  return head.score_batch(state_features).mean();
}

NodeId select_parent(const ModelTree& tree, const std::map<NodeId, double>& tentative_scores) {
  const auto active = tree.active();
  if (active.empty()) throw TreeError("active set is empty");
  NodeId best = -1;
  double best_value = -1.0;
  // Active ids are in creation order, so '>=' hands ties to the newest node.
  for (NodeId v : active) {
    const auto it = tentative_scores.find(v);
    if (it == tentative_scores.end()) {
      throw TreeError("missing tentative edge score for node " + std::to_string(v));
    }
    const double value = std::min(it->second, tree.reliability(v));
    if (value >= best_value) {
      best_value = value;
      best = v;
    }
  }
  return best;
}

namespace {

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string frame_range(const std::vector<int>& frames) {
  const auto [lo, hi] = std::minmax_element(frames.begin(), frames.end());
  if (*lo == *hi) return std::to_string(*lo);
  return std::to_string(*lo) + "-" + std::to_string(*hi);
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string export_dot(const ModelTree& tree, const std::map<NodeId, std::string>& annotations) {
  std::ostringstream out;
  out << "digraph model_tree {\n";
  out << "  node [shape=box];\n";
  for (const auto& n : tree.nodes()) {
    std::string label = "#" + std::to_string(n.id) + "\nbeta=" + fixed3(n.reliability) +
                        "\nframes " + frame_range(n.frames);
    if (const auto it = annotations.find(n.id); it != annotations.end()) {
      label += "\n" + it->second;
    }
    out << "  n" << n.id << " [label=\"" << escape(label) << "\"";
    if (tree.is_active(n.id)) out << ", style=bold";
    out << "];\n";
  }
  for (const auto& n : tree.nodes()) {
    if (!n.parent) continue;
    out << "  n" << *n.parent << " -> n" << n.id << " [label=\"" << fixed3(n.edge_score)
        << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace treetrack
