#include <bit>
#include <nlohmann/json.hpp>

#include "treetrack/model_tree.hpp"

namespace treetrack {

namespace {

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

nlohmann::json head_to_json(const AppearanceHead& head) {
  const auto params = head.flat_parameters();
  std::vector<std::uint8_t> bytes;
  bytes.reserve(params.size() * 4);
  for (double p : params) {
    const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(p));
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
  return {{"input_dim", head.input_dim()},
          {"hidden", head.hidden()},
          {"weights", base64_encode(bytes)}};
}

AppearanceHead head_from_json(const nlohmann::json& j) {
  AppearanceHead head(j.at("input_dim").get<int>(), j.at("hidden").get<int>());
  const auto bytes = base64_decode(j.at("weights").get<std::string>());
  if (bytes.size() != head.parameter_count() * 4) {
    throw TreeError("snapshot head weight buffer has the wrong size");
  }
  std::vector<double> params(head.parameter_count());
  for (std::size_t i = 0; i < params.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(bytes[4 * i + b]) << (8 * b);
    params[i] = std::bit_cast<float>(bits);
  }
  head.set_flat_parameters(params);
  return head;
}

}  // namespace

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out.push_back(kAlphabet[(v >> 18) & 63]);
    out.push_back(kAlphabet[(v >> 12) & 63]);
    out.push_back(kAlphabet[(v >> 6) & 63]);
    out.push_back(kAlphabet[v & 63]);
  }
  const std::size_t rest = bytes.size() - i;
  if (rest > 0) {
    std::uint32_t v = bytes[i] << 16;
    if (rest == 2) v |= bytes[i + 1] << 8;
    out.push_back(kAlphabet[(v >> 18) & 63]);
    out.push_back(kAlphabet[(v >> 12) & 63]);
    out.push_back(rest == 2 ? kAlphabet[(v >> 6) & 63] : '=');
    out.push_back('=');
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
  auto value = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  if (text.size() % 4 != 0) throw TreeError("base64 length is not a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    std::uint32_t v = 0;
    int pad = 0;
    for (int k = 0; k < 4; ++k) {
      const char c = text[i + k];
      if (c == '=') {
        ++pad;
        v <<= 6;
        continue;
      }
      const int d = value(c);
      if (d < 0 || pad > 0) throw TreeError("invalid base64 input");
      v = (v << 6) | static_cast<std::uint32_t>(d);
    }
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>(v >> 8));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(v));
  }
  return out;
}

std::string tree_to_json(const ModelTree& tree,
                         const std::map<std::string, std::string>& config_echo) {
  nlohmann::json doc;
  doc["format"] = "treetrack-snapshot-1";
  doc["active_capacity"] = tree.active_capacity();
  doc["config"] = config_echo;
  doc["active"] = std::vector<NodeId>(tree.active().begin(), tree.active().end());
  auto nodes = nlohmann::json::array();
  for (const auto& n : tree.nodes()) {
    nlohmann::json j;
    j["id"] = n.id;
    j["parent"] = n.parent ? nlohmann::json(*n.parent) : nlohmann::json(nullptr);
    j["frames"] = n.frames;
    j["edge_score"] = n.edge_score;
    j["beta"] = n.reliability;
    j["head"] = head_to_json(*n.head);
    nodes.push_back(std::move(j));
  }
  doc["nodes"] = std::move(nodes);
  return doc.dump(1) + "\n";
}

ModelTree tree_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw TreeError(std::string("snapshot is not valid JSON: ") + e.what());
  }
  try {
    ModelTree tree(doc.at("active_capacity").get<int>());
    for (const auto& j : doc.at("nodes")) {
      auto frames = j.at("frames").get<std::vector<int>>();
      auto head = head_from_json(j.at("head"));
      NodeId id = 0;
      if (j.at("parent").is_null()) {
        id = tree.add_root(std::move(head), std::move(frames));
      } else {
        id = tree.add_node(j.at("parent").get<NodeId>(), std::move(head), std::move(frames),
                           j.at("edge_score").get<double>());
      }
      if (id != j.at("id").get<NodeId>()) throw TreeError("snapshot node ids out of order");
    }
    return tree;
  } catch (const nlohmann::json::exception& e) {
    throw TreeError(std::string("malformed snapshot: ") + e.what());
  }
}

std::map<std::string, std::string> config_from_snapshot(const std::string& text) {
  try {
    return nlohmann::json::parse(text).at("config").get<std::map<std::string, std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw TreeError(std::string("malformed snapshot: ") + e.what());
  }
}

}  // namespace treetrack
