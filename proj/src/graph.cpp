// Copyright 2026 The mlergm Authors
// SPDX-License-Identifier: Apache-2.0

#include "mlergm/graph.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "mlergm/csv.hpp"
#include "mlergm/errors.hpp"

namespace mlergm {

std::size_t AdjacencyMatrix::num_edges() const {
  std::size_t count = 0;
  for (auto c : cells_) count += c;
  return directed_ ? count : count / 2;
}

MultilevelGraph::MultilevelGraph(bool directed, std::vector<Neighborhood> neighborhoods)
    : directed_(directed), hoods_(std::move(neighborhoods)) {
  adjacency_.reserve(hoods_.size());
  for (std::size_t k = 0; k < hoods_.size(); ++k) {
    const auto& h = hoods_[k];
    if (h.nodes.empty()) throw DataError("neighborhood '" + h.id + "' has no nodes");
    for (const auto& [name, values] : h.attributes) {
      if (values.size() != h.nodes.size())
        throw DataError("attribute '" + name + "' is ragged in neighborhood '" + h.id + "'");
    }
    for (std::size_t i = 0; i < h.nodes.size(); ++i) {
      if (!index_.emplace(h.nodes[i], NodeRef{k, i}).second)
        throw DataError("node '" + h.nodes[i] + "' appears more than once");
    }
    adjacency_.emplace_back(h.nodes.size(), directed_);
  }
}

std::size_t MultilevelGraph::max_size() const {
  std::size_t m = 0;
  for (const auto& h : hoods_) m = std::max(m, h.nodes.size());
  return m;
}

std::size_t MultilevelGraph::num_nodes() const {
  std::size_t n = 0;
  for (const auto& h : hoods_) n += h.nodes.size();
  return n;
}

std::size_t MultilevelGraph::num_dyads() const {
  std::size_t n = 0;
  for (const auto& a : adjacency_) n += a.num_dyads();
  return n;
}

std::size_t MultilevelGraph::num_edges() const {
  std::size_t n = 0;
  for (const auto& a : adjacency_) n += a.num_edges();
  return n;
}

void MultilevelGraph::set_adjacency(std::size_t k, AdjacencyMatrix adjacency) {
  if (adjacency.size() != size(k) || adjacency.directed() != directed_)
    throw DataError("adjacency shape does not match neighborhood '" + hoods_[k].id + "'");
  adjacency_[k] = std::move(adjacency);
}

Dyad MultilevelGraph::canonical(Dyad d) const {
  if (d.hood >= hoods_.size()) throw DataError("dyad refers to an unknown neighborhood");
  const auto n = size(d.hood);
  if (d.tail >= n || d.head >= n) throw DataError("dyad endpoint outside its neighborhood");
  if (d.tail == d.head) throw DataError("self-loops are not dyads");
  if (!directed_ && d.tail > d.head) std::swap(d.tail, d.head);
  return d;
}

void MultilevelGraph::toggle_edge(const Dyad& d) {
  const auto c = canonical(d);
  adjacency_[c.hood].toggle(c.tail, c.head);
}

std::optional<NodeRef> MultilevelGraph::find_node(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool MultilevelGraph::same_partition(const MultilevelGraph& other) const {
  if (directed_ != other.directed_ || hoods_.size() != other.hoods_.size()) return false;
  for (std::size_t k = 0; k < hoods_.size(); ++k) {
    if (hoods_[k].id != other.hoods_[k].id || hoods_[k].nodes != other.hoods_[k].nodes)
      return false;
  }
  return true;
}

MultilevelGraph MultilevelGraph::empty_copy() const {
  MultilevelGraph g = *this;
  for (std::size_t k = 0; k < g.adjacency_.size(); ++k)
    g.adjacency_[k] = AdjacencyMatrix(size(k), directed_);
  return g;
}

MultilevelGraph toggle_edge(MultilevelGraph graph, const Dyad& d) {
  graph.toggle_edge(d);
  return graph;
}

std::size_t hamming_distance(const MultilevelGraph& a, const MultilevelGraph& b) {
  if (!a.same_partition(b)) throw DataError("hamming distance needs graphs on the same partition");
  std::size_t distance = 0;
  for (std::size_t k = 0; k < a.num_neighborhoods(); ++k) {
    const auto& x = a.adjacency(k);
    const auto& y = b.adjacency(k);
    const auto n = x.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = a.directed() ? 0 : i + 1; j < n; ++j) {
        if (i != j && x(i, j) != y(i, j)) ++distance;
      }
    }
  }
  return distance;
}

namespace {

std::vector<Neighborhood> parse_nodes(const csv::Table& table, const std::string& source) {
  if (table.header.size() < 2 || table.header[0] != "node_id" || table.header[1] != "neighborhood_id")
    throw DataError(source + ": header must start with node_id,neighborhood_id");
  std::vector<Neighborhood> hoods;
  std::unordered_map<std::string, std::size_t> hood_index;
  for (const auto& row : table.rows) {
    auto [it, inserted] = hood_index.emplace(row[1], hoods.size());
    if (inserted) {
      Neighborhood h;
      h.id = row[1];
      for (std::size_t c = 2; c < table.header.size(); ++c) h.attributes[table.header[c]];
      hoods.push_back(std::move(h));
    }
    auto& h = hoods[it->second];
    if (row[0].empty()) throw DataError(source + ": empty node id");
    h.nodes.push_back(row[0]);
    for (std::size_t c = 2; c < table.header.size(); ++c)
      h.attributes[table.header[c]].push_back(row[c]);
  }
  return hoods;
}

MultilevelGraph build(const csv::Table& nodes, const std::string& nodes_source, bool directed) {
  try {
    return MultilevelGraph(directed, parse_nodes(nodes, nodes_source));
  } catch (const DataError& e) {
    throw DataError(nodes_source + ": " + e.what());
  }
}

void add_edges(MultilevelGraph& graph, const csv::Table& edges, const std::string& source) {
  if (edges.header.size() != 2 || edges.header[0] != "tail" || edges.header[1] != "head")
    throw DataError(source + ": header must be tail,head");
  for (std::size_t r = 0; r < edges.rows.size(); ++r) {
    const auto& row = edges.rows[r];
    const auto where = source + ":" + std::to_string(edges.lines[r]) + ": ";
    const auto tail = graph.find_node(row[0]);
    const auto head = graph.find_node(row[1]);
    if (!tail) throw DataError(where + "unknown node '" + row[0] + "'");
    if (!head) throw DataError(where + "unknown node '" + row[1] + "'");
    if (tail->hood != head->hood)
      throw DataError(where + "edge (" + row[0] + "," + row[1] +
                      ") crosses neighborhoods; only within-neighborhood edges are modeled");
    if (tail->local == head->local) throw DataError(where + "self-loop on '" + row[0] + "'");
    const Dyad d = graph.canonical({tail->hood, tail->local, head->local});
    if (graph.has_edge(d))
      throw DataError(where + "duplicate edge (" + row[0] + "," + row[1] + ")");
    graph.toggle_edge(d);
  }
}

}  // namespace

MultilevelGraph load_graph(std::istream& nodes, std::istream& edges, bool directed) {
  auto graph = build(csv::read(nodes, "nodes"), "nodes", directed);
  add_edges(graph, csv::read(edges, "edges"), "edges");
  return graph;
}

MultilevelGraph load_graph_files(const std::string& nodes_path, const std::string& edges_path,
                                 bool directed) {
  auto graph = build(csv::read_file(nodes_path), nodes_path, directed);
  add_edges(graph, csv::read_file(edges_path), edges_path);
  return graph;
}

MultilevelGraph load_partition_file(const std::string& nodes_path, bool directed) {
  return build(csv::read_file(nodes_path), nodes_path, directed);
}

void write_nodes(std::ostream& out, const MultilevelGraph& graph) {
  std::vector<std::string> header{"node_id", "neighborhood_id"};
  if (graph.num_neighborhoods() > 0)
    for (const auto& [name, values] : graph.neighborhood(0).attributes) header.push_back(name);
  csv::write_row(out, header);
  for (const auto& h : graph.neighborhoods()) {
    for (std::size_t i = 0; i < h.nodes.size(); ++i) {
      std::vector<std::string> row{h.nodes[i], h.id};
      for (const auto& [name, values] : h.attributes) row.push_back(values[i]);
      csv::write_row(out, row);
    }
  }
}

void write_edges(std::ostream& out, const MultilevelGraph& graph) {
  csv::write_row(out, {"tail", "head"});
  for (std::size_t k = 0; k < graph.num_neighborhoods(); ++k) {
    const auto& h = graph.neighborhood(k);
    const auto& adj = graph.adjacency(k);
    for (std::size_t i = 0; i < adj.size(); ++i) {
      for (std::size_t j = graph.directed() ? 0 : i + 1; j < adj.size(); ++j) {
        if (i != j && adj(i, j)) csv::write_row(out, {h.nodes[i], h.nodes[j]});
      }
    }
  }
}

std::vector<std::pair<std::size_t, std::size_t>> dyad_pairs(std::size_t n, bool directed) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = directed ? 0 : i + 1; j < n; ++j)
      if (i != j) out.emplace_back(i, j);
  return out;
}

MultilevelGraph make_partition(const std::vector<std::size_t>& sizes, bool directed) {
  std::vector<Neighborhood> hoods;
  hoods.reserve(sizes.size());
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    Neighborhood h;
    h.id = std::to_string(k);
    for (std::size_t i = 0; i < sizes[k]; ++i)
      h.nodes.push_back(std::to_string(k) + ":" + std::to_string(i));
    hoods.push_back(std::move(h));
  }
  return MultilevelGraph(directed, std::move(hoods));
}

}  // namespace mlergm
