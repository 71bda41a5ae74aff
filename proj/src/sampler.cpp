// Copyright 2026 The mlergm Authors
// SPDX-License-Identifier: Apache-2.0

#include "mlergm/sampler.hpp"

#include <cmath>

#include "mlergm/errors.hpp"
#include "mlergm/parallel.hpp"

namespace mlergm {

std::size_t SamplerConfig::burn_in_steps(std::size_t dyads) const {
  if (burn_in) return *burn_in;
  return static_cast<std::size_t>(std::llround(burn_in_per_dyad * static_cast<double>(dyads)));
}

std::size_t SamplerConfig::interval_steps(std::size_t dyads) const {
  if (interval) return *interval;
  const auto steps = static_cast<std::size_t>(std::llround(interval_per_dyad * static_cast<double>(dyads)));
  return steps > 0 ? steps : 1;
}

void SamplerConfig::validate() const {
  if (interval && *interval < 1) throw UsageError("sampler interval must be at least 1");
  if (!interval && !(interval_per_dyad > 0)) throw UsageError("sampler interval_per_dyad must be positive");
  if (!burn_in && burn_in_per_dyad < 0) throw UsageError("sampler burn_in_per_dyad must be nonnegative");
  if (draws < 1) throw UsageError("sampler draws must be at least 1");
}

bool SampleBatch::degenerate() const {
  for (const auto& h : hoods)
    if (h.degenerate) return true;
  return false;
}

NeighborhoodChain::NeighborhoodChain(const MultilevelGraph& graph, std::size_t k,
                                     const TermSet& terms, Eigen::VectorXd eta, std::uint64_t seed)
    : state_(graph, k, terms),
      eta_(std::move(eta)),
      stats_(neighborhood_stats(graph, k, terms)),
      delta_(state_.dim()),
      rng_(seed),
      edges_(graph.adjacency(k).num_edges()) {
  for (auto [i, j] : dyad_pairs(state_.size(), state_.directed()))
    dyads_.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
}

void NeighborhoodChain::step() {
  if (dyads_.empty()) return;
  const auto [i, j] = dyads_[rng_.below(dyads_.size())];
  state_.change_stats(i, j, std::span<double>(delta_.data(), delta_.size()));
  const bool present = state_.edge(i, j);
  double log_ratio = eta_.dot(delta_);
  if (present) log_ratio = -log_ratio;
  ++proposed_;
  if (log_ratio >= 0.0 || rng_.uniform() < std::exp(log_ratio)) {
    ++accepted_;
    if (present) {
      stats_ -= delta_;
      --edges_;
    } else {
      stats_ += delta_;
      ++edges_;
    }
    state_.toggle(i, j);
  }
}

NeighborhoodSample sample_neighborhood(const EtaMap& map, const Theta& theta,
                                       const MultilevelGraph& graph, std::size_t k,
                                       const SamplerConfig& config) {
  config.validate();
  const auto n = graph.size(k);
  NeighborhoodChain chain(graph, k, map.terms(), map.eta(theta, n), derive_seed(config.seed, {k}));
  const auto dyads = chain.num_dyads();
  chain.run(config.burn_in_steps(dyads));
  const auto interval = config.interval_steps(dyads);

  NeighborhoodSample out;
  out.stats.resize(static_cast<Eigen::Index>(config.draws), static_cast<Eigen::Index>(chain.state().dim()));
  out.edge_counts.resize(config.draws);
  std::size_t near_extreme = 0;
  for (std::size_t m = 0; m < config.draws; ++m) {
    chain.run(interval);
    out.stats.row(static_cast<Eigen::Index>(m)) = chain.stats().transpose();
    out.edge_counts[m] = static_cast<std::uint32_t>(chain.edges());
    if (chain.edges() <= 2 || chain.edges() + 2 >= dyads) ++near_extreme;
  }
  out.final_state = chain.state().adjacency();
  out.acceptance_rate = chain.acceptance_rate();
  out.degenerate = dyads > 0 && static_cast<double>(near_extreme) > 0.95 * static_cast<double>(config.draws);
  return out;
}

SampleBatch sample_batch(const EtaMap& map, const Theta& theta, const MultilevelGraph& graph,
                         const SamplerConfig& config) {
  map.terms().validate(graph);
  map.check_domain(theta);
  SampleBatch batch;
  const auto K = graph.num_neighborhoods();
  batch.hoods.resize(K);
  for (std::size_t k = 0; k < K; ++k) batch.sizes.push_back(graph.size(k));
  parallel_for(K, [&](std::size_t k) { batch.hoods[k] = sample_neighborhood(map, theta, graph, k, config); });
  return batch;
}

MultilevelGraph simulate_graph(const EtaMap& map, const Theta& theta,
                               const MultilevelGraph& partition, const SamplerConfig& config) {
  config.validate();
  map.terms().validate(partition);
  map.check_domain(theta);
  MultilevelGraph out = partition.empty_copy();
  const auto K = out.num_neighborhoods();
  std::vector<AdjacencyMatrix> states(K);
  parallel_for(K, [&](std::size_t k) {
    NeighborhoodChain chain(out, k, map.terms(), map.eta(theta, out.size(k)),
                            derive_seed(config.seed, {k}));
    chain.run(config.burn_in_steps(chain.num_dyads()));
    states[k] = chain.state().adjacency();
  });
  for (std::size_t k = 0; k < K; ++k) out.set_adjacency(k, std::move(states[k]));
  return out;
}

}  // namespace mlergm
