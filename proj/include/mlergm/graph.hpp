// Copyright 2026 The mlergm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mlergm {

/// Dense binary adjacency of one neighborhood. Undirected matrices are kept
/// symmetric by every mutator, so each dyad has exactly one logical state.
class AdjacencyMatrix {
 public:
  AdjacencyMatrix() = default;
  AdjacencyMatrix(std::size_t size, bool directed)
      : size_(size), directed_(directed), cells_(size * size, 0) {}

  std::size_t size() const { return size_; }
  bool directed() const { return directed_; }

  bool operator()(std::size_t i, std::size_t j) const { return cells_[i * size_ + j] != 0; }

  void set(std::size_t i, std::size_t j, bool value) {
    cells_[i * size_ + j] = value;
    if (!directed_) cells_[j * size_ + i] = value;
  }
  void toggle(std::size_t i, std::size_t j) { set(i, j, !(*this)(i, j)); }

  /// Number of dyads: n(n-1)/2 undirected, n(n-1) directed.
  std::size_t num_dyads() const {
    return directed_ ? size_ * (size_ - (size_ > 0)) : size_ * (size_ - (size_ > 0)) / 2;
  }
  std::size_t num_edges() const;

  /// Row pointer for tight loops.
  const std::uint8_t* row(std::size_t i) const { return cells_.data() + i * size_; }

  friend bool operator==(const AdjacencyMatrix&, const AdjacencyMatrix&) = default;

 private:
  std::size_t size_ = 0;
  bool directed_ = false;
  std::vector<std::uint8_t> cells_;
};

struct Neighborhood {
  std::string id;
  /// Local index -> external node id, in input order.
  std::vector<std::string> nodes;
  /// Attribute name -> value per local node.
  std::map<std::string, std::vector<std::string>> attributes;

  friend bool operator==(const Neighborhood&, const Neighborhood&) = default;
};

/// A dyad addressed by neighborhood and local node indices.
struct Dyad {
  std::size_t hood = 0;
  std::size_t tail = 0;
  std::size_t head = 0;

  friend bool operator==(const Dyad&, const Dyad&) = default;
};

struct NodeRef {
  std::size_t hood = 0;
  std::size_t local = 0;

  friend bool operator==(const NodeRef&, const NodeRef&) = default;
};

/// Binary within-neighborhood network over a partitioned node set.
class MultilevelGraph {
 public:
  MultilevelGraph() = default;
  /// Builds an empty graph on the given partition. Throws DataError if the
  /// neighborhoods are empty, overlap, or carry ragged attribute columns.
  MultilevelGraph(bool directed, std::vector<Neighborhood> neighborhoods);

  bool directed() const { return directed_; }
  std::size_t num_neighborhoods() const { return hoods_.size(); }
  const Neighborhood& neighborhood(std::size_t k) const { return hoods_[k]; }
  const std::vector<Neighborhood>& neighborhoods() const { return hoods_; }
  std::size_t size(std::size_t k) const { return hoods_[k].nodes.size(); }
  std::size_t max_size() const;
  std::size_t num_nodes() const;
  std::size_t num_dyads() const;
  std::size_t num_dyads(std::size_t k) const { return adjacency_[k].num_dyads(); }
  std::size_t num_edges() const;

  const AdjacencyMatrix& adjacency(std::size_t k) const { return adjacency_[k]; }
  /// Replaces neighborhood k's adjacency; sizes and directedness must match.
  void set_adjacency(std::size_t k, AdjacencyMatrix adjacency);

  bool has_edge(const Dyad& d) const { return adjacency_[d.hood](d.tail, d.head); }

  /// Canonical form of a dyad (tail < head when undirected). Throws DataError
  /// for self-loops or out-of-range indices.
  Dyad canonical(Dyad d) const;

  /// Flips the state of `d` in place.
  void toggle_edge(const Dyad& d);

  std::optional<NodeRef> find_node(const std::string& id) const;

  /// Same partition (ids, node order) and directedness.
  bool same_partition(const MultilevelGraph& other) const;

  /// Copy of this graph with every dyad empty.
  MultilevelGraph empty_copy() const;

  friend bool operator==(const MultilevelGraph&, const MultilevelGraph&) = default;

 private:
  bool directed_ = false;
  std::vector<Neighborhood> hoods_;
  std::vector<AdjacencyMatrix> adjacency_;
  std::unordered_map<std::string, NodeRef> index_;
};

/// Returns a copy of `graph` with dyad `d` flipped.
MultilevelGraph toggle_edge(MultilevelGraph graph, const Dyad& d);

/// Number of dyads whose states differ. Throws DataError on mismatched partitions.
std::size_t hamming_distance(const MultilevelGraph& a, const MultilevelGraph& b);

/// Parses the node and edge CSV tables (see README for the schema).
MultilevelGraph load_graph(std::istream& nodes, std::istream& edges, bool directed);
MultilevelGraph load_graph_files(const std::string& nodes_path, const std::string& edges_path,
                                 bool directed);
/// Partition only; no edges.
MultilevelGraph load_partition_file(const std::string& nodes_path, bool directed);

void write_nodes(std::ostream& out, const MultilevelGraph& graph);
void write_edges(std::ostream& out, const MultilevelGraph& graph);

/// All dyads of an n-node neighborhood in canonical order: (i, j) with i < j
/// lexicographically when undirected, every i != j row by row when directed.
std::vector<std::pair<std::size_t, std::size_t>> dyad_pairs(std::size_t n, bool directed);

/// Partition with `sizes[k]` nodes in neighborhood k; node ids are "k:i".
MultilevelGraph make_partition(const std::vector<std::size_t>& sizes, bool directed);

}  // namespace mlergm
