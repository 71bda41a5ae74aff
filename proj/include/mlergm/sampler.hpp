// Copyright 2026 The mlergm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "mlergm/graph.hpp"
#include "mlergm/model.hpp"
#include "mlergm/rng.hpp"
#include "mlergm/statistics.hpp"

namespace mlergm {

/// Metropolis tuning. Unset step counts scale with the neighborhood's dyad
/// count: burn_in = burn_in_per_dyad * dyads, interval = interval_per_dyad * dyads.
struct SamplerConfig {
  std::optional<std::size_t> burn_in;
  std::optional<std::size_t> interval;
  double burn_in_per_dyad = 20.0;
  double interval_per_dyad = 1.0;
  std::size_t draws = 1;
  std::uint64_t seed = 0;

  std::size_t burn_in_steps(std::size_t dyads) const;
  std::size_t interval_steps(std::size_t dyads) const;
  /// Throws UsageError on interval < 1 or draws < 1.
  void validate() const;
};

using StatMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Retained draws of one neighborhood's chain.
struct NeighborhoodSample {
  StatMatrix stats;                       // draws x dim
  std::vector<std::uint32_t> edge_counts;  // per draw
  AdjacencyMatrix final_state;
  double acceptance_rate = 0.0;
  /// More than 95% of draws within two toggles of the empty or complete graph.
  bool degenerate = false;
};

struct SampleBatch {
  std::vector<std::size_t> sizes;
  std::vector<NeighborhoodSample> hoods;

  std::size_t draws() const { return hoods.empty() ? 0 : static_cast<std::size_t>(hoods[0].stats.rows()); }
  bool degenerate() const;
};

/// Single-site Metropolis chain on one neighborhood: propose a uniformly
/// chosen dyad toggle, accept with min(1, exp(+-<eta, Delta>)).
class NeighborhoodChain {
 public:
  NeighborhoodChain(const MultilevelGraph& graph, std::size_t k, const TermSet& terms,
                    Eigen::VectorXd eta, std::uint64_t seed);

  void step();
  /// `steps` proposals plus, with probability 1/2, one more. The random extra
  /// step keeps draws aperiodic when every proposal is accepted (eta = 0).
  void run(std::size_t steps) {
    steps += rng_() >> 63;
    for (std::size_t s = 0; s < steps; ++s) step();
  }

  const NeighborhoodState& state() const { return state_; }
  const Eigen::VectorXd& stats() const { return stats_; }
  std::size_t edges() const { return edges_; }
  std::size_t num_dyads() const { return dyads_.size(); }
  double acceptance_rate() const {
    return proposed_ ? static_cast<double>(accepted_) / static_cast<double>(proposed_) : 0.0;
  }

 private:
  NeighborhoodState state_;
  Eigen::VectorXd eta_;
  Eigen::VectorXd stats_;
  Eigen::VectorXd delta_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> dyads_;
  CounterRng rng_;
  std::size_t edges_ = 0;
  std::size_t proposed_ = 0;
  std::size_t accepted_ = 0;
};

/// Runs neighborhood k's chain from its state in `graph`. The stream is
/// derived from (config.seed, k).
NeighborhoodSample sample_neighborhood(const EtaMap& map, const Theta& theta,
                                       const MultilevelGraph& graph, std::size_t k,
                                       const SamplerConfig& config);

/// All neighborhoods, in parallel, merged in neighborhood order.
SampleBatch sample_batch(const EtaMap& map, const Theta& theta, const MultilevelGraph& graph,
                         const SamplerConfig& config);

/// One draw: every neighborhood's chain starts empty and runs its burn-in.
MultilevelGraph simulate_graph(const EtaMap& map, const Theta& theta,
                               const MultilevelGraph& partition, const SamplerConfig& config);

}  // namespace mlergm
