#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "treetrack/appearance.hpp"

namespace treetrack {

using NodeId = int;

class TreeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ModelNode {
  NodeId id = 0;  // equals creation order
  std::optional<NodeId> parent;
  std::shared_ptr<const AppearanceHead> head;
  std::vector<int> frames;    // frames whose examples trained this head
  double edge_score = 1.0;    // s(parent, this); 1 for the root
  double reliability = 1.0;   // bottleneck edge score on the root path
};

/// Append-only tree of appearance heads. Heads are immutable once added and
/// reliabilities are cached at insertion. The active set holds the
/// `active_capacity` most recently created nodes, oldest first.
class ModelTree {
 public:
  explicit ModelTree(int active_capacity = 10);

  NodeId add_root(AppearanceHead head, std::vector<int> frames);
  NodeId add_node(NodeId parent, AppearanceHead head, std::vector<int> frames, double edge_score);

  const ModelNode& node(NodeId id) const;
  double reliability(NodeId id) const { return node(id).reliability; }
  bool contains(NodeId id) const { return id >= 0 && static_cast<std::size_t>(id) < nodes_.size(); }

  std::span<const NodeId> active() const { return active_; }
  bool is_active(NodeId id) const;
  const std::vector<ModelNode>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  int active_capacity() const { return capacity_; }

 private:
  NodeId insert(ModelNode node);

  int capacity_;
  std::vector<ModelNode> nodes_;
  std::vector<NodeId> active_;
};

/// Mean of phi_u over the estimated-state features of a frame set.
double edge_score(const AppearanceHead& head, std::span<const FeatureVector> state_features);
double edge_score(const AppearanceHead& head, const FeatureMatrix& state_features);

/// argmax over active v of min(tentative[v], beta_v); ties go to the most
/// recently created node. Throws TreeError if an active node has no entry.
NodeId select_parent(const ModelTree& tree, const std::map<NodeId, double>& tentative_scores);

/// Graphviz digraph: node labels carry id, beta and frame range; edge labels
/// carry the edge score. Extra per-node text is appended when given.
std::string export_dot(const ModelTree& tree,
                       const std::map<NodeId, std::string>& annotations = {});

/// JSON snapshot: {"format", "active_capacity", "config", "active", "nodes"}.
/// Heads are stored as base64 of their float32 little-endian flat parameters.
std::string tree_to_json(const ModelTree& tree,
                         const std::map<std::string, std::string>& config_echo = {});
ModelTree tree_from_json(const std::string& text);
std::map<std::string, std::string> config_from_snapshot(const std::string& text);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);

}  // namespace treetrack
