#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "evonet/attrs.hpp"
#include "evonet/error.hpp"

namespace evonet {

// Dense node index, 0..N-1.
class NodeId {
 public:
  constexpr NodeId() = default;
  constexpr explicit NodeId(std::size_t index) : index_(static_cast<std::uint32_t>(index)) {}

  constexpr std::size_t index() const noexcept { return index_; }

  friend constexpr auto operator<=>(NodeId, NodeId) = default;

 private:
  std::uint32_t index_ = 0;
};

enum class Directedness { Undirected, Directed };

struct Point {
  double x = 0;
  double y = 0;

  friend bool operator==(const Point&, const Point&) = default;
};

struct Edge {
  std::size_t id = 0;
  NodeId origin;
  NodeId target;

  friend bool operator==(const Edge&, const Edge&) = default;
};

using EdgePair = std::pair<std::size_t, std::size_t>;

// Static topology with per-node and per-edge attribute tables.
//
// Adjacency is stored CSR-style: neighbors(id) is a contiguous, ascending,
// duplicate-free span. For directed graphs it lists out-neighbors only.
class Graph {
 public:
  Graph() = default;

  Graph(Directedness directedness, std::size_t node_count, std::span<const EdgePair> edge_pairs,
        AttrSchema node_schema = {}, AttrSchema edge_schema = {}, bool allow_self_loops = false)
      : directedness_(directedness),
        node_count_(node_count),
        node_schema_(std::move(node_schema)),
        edge_schema_(std::move(edge_schema)) {
    if (node_count > UINT32_MAX) throw Error("too many nodes");
    edges_.reserve(edge_pairs.size());
    for (const auto& [u, v] : edge_pairs) {
      if (u >= node_count || v >= node_count) {
        throw Error("edge (" + std::to_string(u) + "," + std::to_string(v) + ") has a dangling endpoint; graph has " +
                    std::to_string(node_count) + " nodes");
      }
      if (u == v && !allow_self_loops) throw Error("self-loop on node " + std::to_string(u));
      edges_.push_back({edges_.size(), NodeId(u), NodeId(v)});
    }
    check_duplicates();
    build_adjacency();
    node_attrs_.reserve(node_count_ * node_schema_.size());
    const auto node_defaults = node_schema_.defaults();
    for (std::size_t i = 0; i < node_count_; ++i) {
      node_attrs_.insert(node_attrs_.end(), node_defaults.begin(), node_defaults.end());
    }
    const auto edge_defaults = edge_schema_.defaults();
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      edge_attrs_.insert(edge_attrs_.end(), edge_defaults.begin(), edge_defaults.end());
    }
    positions_.assign(node_count_, std::nullopt);
  }

  Directedness directedness() const noexcept { return directedness_; }
  bool directed() const noexcept { return directedness_ == Directedness::Directed; }
  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const AttrSchema& node_schema() const noexcept { return node_schema_; }
  const AttrSchema& edge_schema() const noexcept { return edge_schema_; }

  bool contains(NodeId id) const noexcept { return id.index() < node_count_; }

  std::span<const NodeId> neighbors(NodeId id) const {
    require(id);
    return {adjacency_.data() + offsets_[id.index()], adjacency_.data() + offsets_[id.index() + 1]};
  }

  std::size_t degree(NodeId id) const { return neighbors(id).size(); }

  std::span<const AttrValue> attrs(NodeId id) const {
    require(id);
    return {node_attrs_.data() + id.index() * node_schema_.size(), node_schema_.size()};
  }

  const AttrValue& attr(NodeId id, std::size_t index) const {
    require(id);
    if (index >= node_schema_.size()) throw Error("attribute index out of range");
    return node_attrs_[id.index() * node_schema_.size() + index];
  }

  const AttrValue& get_attr(NodeId id, std::string_view name) const { return attr(id, node_schema_.index_of(name)); }

  void set_attr(NodeId id, std::size_t index, AttrValue value) {
    require(id);
    const auto& decl = node_schema_[index];
    if (!validate(value, decl.range)) {
      throw Error("value '" + value.to_string() + "' (" + to_string(value.type()) + ") is invalid for attribute '" +
                  decl.name + "' with range " + decl.range.to_string());
    }
    node_attrs_[id.index() * node_schema_.size() + index] = std::move(value);
  }

  void set_attr(NodeId id, std::string_view name, AttrValue value) {
    set_attr(id, node_schema_.index_of(name), std::move(value));
  }

  // Replaces the whole attribute row; all values are validated first.
  void assign_attrs(NodeId id, std::span<const AttrValue> values) {
    require(id);
    if (values.size() != node_schema_.size()) throw Error("attribute row has the wrong number of values");
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!validate(values[i], node_schema_[i].range)) {
        throw Error("value '" + values[i].to_string() + "' is invalid for attribute '" + node_schema_[i].name + "'");
      }
    }
    std::copy(values.begin(), values.end(), node_attrs_.begin() + static_cast<std::ptrdiff_t>(id.index() * values.size()));
  }

  std::span<const AttrValue> edge_attrs(std::size_t edge_id) const {
    if (edge_id >= edges_.size()) throw Error("unknown edge " + std::to_string(edge_id));
    return {edge_attrs_.data() + edge_id * edge_schema_.size(), edge_schema_.size()};
  }

  void set_edge_attr(std::size_t edge_id, std::string_view name, AttrValue value) {
    if (edge_id >= edges_.size()) throw Error("unknown edge " + std::to_string(edge_id));
    const auto index = edge_schema_.index_of(name);
    if (!validate(value, edge_schema_[index].range)) throw Error("invalid value for edge attribute '" + std::string(name) + "'");
    edge_attrs_[edge_id * edge_schema_.size() + index] = std::move(value);
  }

  std::optional<Point> position(NodeId id) const {
    require(id);
    return positions_[id.index()];
  }

  void set_position(NodeId id, std::optional<Point> p) {
    require(id);
    positions_[id.index()] = p;
  }

  // Adjacency recomputed from the edge array, independent of the CSR arrays.
  std::vector<std::vector<NodeId>> rebuild_adjacency() const {
    std::vector<std::vector<NodeId>> adj(node_count_);
    for (const auto& e : edges_) {
      adj[e.origin.index()].push_back(e.target);
      if (!directed() && e.origin != e.target) adj[e.target.index()].push_back(e.origin);
    }
    for (auto& list : adj) std::sort(list.begin(), list.end());
    return adj;
  }

  bool adjacency_consistent() const {
    const auto adj = rebuild_adjacency();
    for (std::size_t i = 0; i < node_count_; ++i) {
      const auto n = neighbors(NodeId(i));
      if (!std::equal(n.begin(), n.end(), adj[i].begin(), adj[i].end())) return false;
    }
    return true;
  }

 private:
  void require(NodeId id) const {
    if (!contains(id)) throw Error("unknown node " + std::to_string(id.index()));
  }

  void check_duplicates() const {
    std::vector<EdgePair> keys;
    keys.reserve(edges_.size());
    for (const auto& e : edges_) {
      auto u = e.origin.index();
      auto v = e.target.index();
      if (!directed() && v < u) std::swap(u, v);
      keys.emplace_back(u, v);
    }
    std::sort(keys.begin(), keys.end());
    const auto dup = std::adjacent_find(keys.begin(), keys.end());
    if (dup != keys.end()) {
      throw Error("duplicate edge (" + std::to_string(dup->first) + "," + std::to_string(dup->second) + ")");
    }
  }

  void build_adjacency() {
    offsets_.assign(node_count_ + 1, 0);
    for (const auto& e : edges_) {
      ++offsets_[e.origin.index() + 1];
      if (!directed() && e.origin != e.target) ++offsets_[e.target.index() + 1];
    }
    for (std::size_t i = 0; i < node_count_; ++i) offsets_[i + 1] += offsets_[i];
    adjacency_.resize(offsets_.back());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& e : edges_) {
      adjacency_[fill[e.origin.index()]++] = e.target;
      if (!directed() && e.origin != e.target) adjacency_[fill[e.target.index()]++] = e.origin;
    }
    for (std::size_t i = 0; i < node_count_; ++i) {
      std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
                adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]));
    }
  }

  Directedness directedness_ = Directedness::Undirected;
  std::size_t node_count_ = 0;
  AttrSchema node_schema_;
  AttrSchema edge_schema_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> adjacency_;
  std::vector<AttrValue> node_attrs_;
  std::vector<AttrValue> edge_attrs_;
  std::vector<std::optional<Point>> positions_;
};

}  // namespace evonet
