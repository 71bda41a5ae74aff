// Copyright 2026 The mlergm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mlergm/graph.hpp"

namespace mlergm {

enum class TermKind {
  Edges,
  Mutual,      ///< reciprocated pairs; directed graphs only
  NodeMatch,   ///< edges joining nodes with equal `attribute`
  Transitive,  ///< edges with at least one shared partner
  Esp,         ///< edgewise shared partner counts, bins 1..|A_k|-2
};

struct Term {
  TermKind kind = TermKind::Edges;
  std::string attribute;  // NodeMatch only

  std::string label() const;
  friend bool operator==(const Term&, const Term&) = default;
};

/// Number of shared-partner bins for a neighborhood of `size` nodes.
inline std::size_t shared_partner_bins(std::size_t size) { return size >= 3 ? size - 2 : 0; }

/// Ordered list of model terms. Statistic vectors of a neighborhood with n
/// nodes are the concatenation of each term's block; the Esp block has
/// shared_partner_bins(n) entries, all others one.
class TermSet {
 public:
  TermSet() = default;
  explicit TermSet(std::vector<Term> terms) : terms_(std::move(terms)) {}

  const std::vector<Term>& terms() const { return terms_; }
  std::size_t num_terms() const { return terms_.size(); }
  std::size_t block_size(std::size_t term, std::size_t n) const;
  std::size_t offset(std::size_t term, std::size_t n) const;
  std::size_t dim(std::size_t n) const;
  /// Statistic names for a neighborhood of size n, e.g. "edges", "esp.3".
  std::vector<std::string> names(std::size_t n) const;

  /// Throws DataError when a term cannot be evaluated on `graph`.
  void validate(const MultilevelGraph& graph) const;

 private:
  std::vector<Term> terms_;
};

/// Per-neighborhood sufficient statistics s_k(x_k).
struct StatisticVector {
  std::vector<std::size_t> sizes;
  std::vector<Eigen::VectorXd> per_hood;

  /// Sum over neighborhoods in the layout of the largest neighborhood
  /// (shared-partner blocks zero padded).
  Eigen::VectorXd aggregate(const TermSet& terms) const;
};

/// Adds `local` (layout for size `from`) into `out` (layout for size `to`, to >= from).
void accumulate_into(const TermSet& terms, std::size_t from, const Eigen::VectorXd& local,
                     std::size_t to, Eigen::VectorXd& out);

/// Exact statistics of one neighborhood, computed directly from the definitions.
Eigen::VectorXd neighborhood_stats(const MultilevelGraph& graph, std::size_t k,
                                   const TermSet& terms);
StatisticVector compute_stats(const MultilevelGraph& graph, const TermSet& terms);

/// Incrementally maintained neighborhood state: adjacency plus shared-partner
/// counts, supporting O(n) change statistics and toggles.
///
/// Shared partners of (a, b): common neighbors when undirected, intermediate
/// nodes h of two-paths a -> h -> b when directed.
class NeighborhoodState {
 public:
  NeighborhoodState(const MultilevelGraph& graph, std::size_t k, const TermSet& terms);

  std::size_t size() const { return adjacency_.size(); }
  bool directed() const { return adjacency_.directed(); }
  std::size_t dim() const { return dim_; }
  const AdjacencyMatrix& adjacency() const { return adjacency_; }
  bool edge(std::size_t i, std::size_t j) const { return adjacency_(i, j); }
  int partners(std::size_t i, std::size_t j) const { return partners_[i * size() + j]; }

  /// s(x with (i,j) on) - s(x with (i,j) off), written to `out` (length dim()).
  void change_stats(std::size_t i, std::size_t j, std::span<double> out) const;

  void toggle(std::size_t i, std::size_t j);
  /// Resets to `adjacency` and recomputes partner counts.
  void assign(const AdjacencyMatrix& adjacency);

 private:
  void recount();

  AdjacencyMatrix adjacency_;
  std::vector<std::int32_t> partners_;
  TermSet terms_;
  std::vector<std::size_t> offsets_;
  std::vector<std::vector<int>> match_codes_;  // per term; empty unless NodeMatch
  std::size_t dim_ = 0;
};

/// Change statistic of dyad `d` as a full per-neighborhood vector: zero for
/// every neighborhood except d.hood.
StatisticVector change_stat(const MultilevelGraph& graph, const TermSet& terms, const Dyad& d);

/// Goodness-of-fit summaries, pooled over neighborhoods.
struct GofSummary {
  /// geodesic[d-1] = number of dyads at distance d (ordered pairs when directed).
  std::vector<double> geodesic;
  double unreachable = 0;
  /// dsp[i-1] / esp[i-1] = dyads / edges with exactly i shared partners.
  std::vector<double> dsp;
  std::vector<double> esp;
};

GofSummary neighborhood_gof_summary(const AdjacencyMatrix& adjacency);
/// Adds `local` into `total`, growing bins as needed.
void accumulate_summary(const GofSummary& local, GofSummary& total);
GofSummary gof_summaries(const MultilevelGraph& graph);

}  // namespace mlergm
