// Copyright 2026 The mlergm Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mlergm/errors.hpp"
#include "mlergm/oracle.hpp"
#include "mlergm/sampler.hpp"
#include "test_util.hpp"

using namespace mlergm;
using testing::vec;

namespace {

double chain_total_variation(const EtaMap& map, const Theta& theta, const MultilevelGraph& g, std::size_t draws,
                             std::uint64_t seed) {
  const auto exact = exact_state_distribution(map, theta, g, 0);
  const auto pairs = dyad_pairs(g.size(0), g.directed());
  NeighborhoodChain chain(g, 0, map.terms(), map.eta(theta, g.size(0)), seed);
  chain.run(20 * pairs.size());
  std::vector<double> freq(exact.size(), 0.0);
  for (std::size_t m = 0; m < draws; ++m) {
    chain.run(pairs.size());
    std::size_t mask = 0;
    for (std::size_t b = 0; b < pairs.size(); ++b)
      if (chain.state().edge(pairs[b].first, pairs[b].second)) mask |= std::size_t{1} << b;
    freq[mask] += 1.0 / static_cast<double>(draws);
  }
  double tv = 0;
  for (std::size_t s = 0; s < exact.size(); ++s) tv += 0.5 * std::abs(freq[s] - exact[s]);
  return tv;
}

double column_mean(const StatMatrix& m, Eigen::Index c) { return m.col(c).mean(); }

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

}  // namespace

TEST_CASE("sampler config validation") {
  SamplerConfig c;
  CHECK_NOTHROW(c.validate());
  c.interval = 0;
  CHECK_THROWS_AS(c.validate(), UsageError);
  c = {};
  c.draws = 0;
  CHECK_THROWS_AS(c.validate(), UsageError);
  c = {};
  CHECK(c.burn_in_steps(10) == 200);
  CHECK(c.interval_steps(10) == 10);
  c.burn_in = 7;
  c.interval = 3;
  CHECK(c.burn_in_steps(10) == 7);
  CHECK(c.interval_steps(10) == 3);
}

TEST_CASE("uniform graphs under a zero edge parameter") {
  SamplerConfig c;
  c.draws = 20000;
  c.seed = 5;
  const auto s = sample_neighborhood(testing::edges_only_map(), vec({0}), make_partition({4}, false), 0, c);
  CHECK(column_mean(s.stats, 0) == doctest::Approx(3.0).epsilon(0.02));
  CHECK_FALSE(s.degenerate);
  CHECK(s.acceptance_rate == doctest::Approx(1.0));
}

TEST_CASE("independence when the transitive parameter is zero") {
  SamplerConfig c;
  c.draws = 20000;
  c.seed = 6;
  const auto s = sample_neighborhood(testing::edges_transitive_map(), vec({-0.8, 0}), make_partition({6}, false), 0, c);
  CHECK(column_mean(s.stats, 0) == doctest::Approx(logistic(-0.8) * 15).epsilon(0.02));
}

TEST_CASE("chain frequencies match exact probabilities on three nodes") {
  CHECK(chain_total_variation(testing::edges_transitive_map(), vec({0, 0.5}), make_partition({3}, false), 100000, 1) <
        0.02);
  CHECK(chain_total_variation(testing::gwesp_map(), vec({-0.5, 0.8, 1.5}), make_partition({3}, false), 100000, 2) <
        0.02);
  const auto directed = EtaMap::canonical(
      TermSet({{TermKind::Edges, ""}, {TermKind::Mutual, ""}, {TermKind::Transitive, ""}}));
  CHECK(chain_total_variation(directed, vec({-0.5, 1.0, 0.4}), make_partition({3}, true), 100000, 3) < 0.02);
}

TEST_CASE("batches are reproducible") {
  SamplerConfig c;
  c.draws = 200;
  c.seed = 42;
  const auto g = make_partition({5, 8, 8}, false);
  const auto map = testing::gwesp_map();
  const Theta theta = vec({-1, 0.3, 1.2});
  const auto a = sample_batch(map, theta, g, c);
  const auto b = sample_batch(map, theta, g, c);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(a.hoods[k].stats == b.hoods[k].stats);
    CHECK(a.hoods[k].final_state == b.hoods[k].final_state);
  }
  CHECK(a.draws() == 200);
  c.seed = 43;
  CHECK_FALSE(sample_batch(map, theta, g, c).hoods[1].stats == a.hoods[1].stats);
  CHECK(simulate_graph(map, theta, g, c) == simulate_graph(map, theta, g, c));
}

TEST_CASE("identical neighborhoods have exchangeable statistics") {
  SamplerConfig c;
  c.draws = 2000;
  c.interval_per_dyad = 5;
  c.seed = 17;
  const auto batch = sample_batch(testing::edges_transitive_map(), vec({-1, 0.5}), make_partition({6, 6}, false), c);
  const auto& s0 = batch.hoods[0].stats;
  const auto& s1 = batch.hoods[1].stats;
  std::vector<double> a(s0.col(0).data(), s0.col(0).data() + s0.rows());
  std::vector<double> b(s1.col(0).data(), s1.col(0).data() + s1.rows());
  // alpha = 0.01 critical value for two samples of 2000
  CHECK(ks_statistic(a, b) < 1.628 * std::sqrt(2.0 / 2000.0));
}

TEST_CASE("simulated density concentrates at the logistic edge probability") {
  SamplerConfig c;
  c.seed = 3;
  const auto g = simulate_graph(testing::edges_only_map(), vec({-1}), make_partition(std::vector<std::size_t>(100, 10), false), c);
  CHECK(static_cast<double>(g.num_edges()) / g.num_dyads() == doctest::Approx(logistic(-1)).epsilon(0.05));
}

TEST_CASE("large neighborhoods stay nondegenerate") {
  SamplerConfig c;
  c.seed = 8;
  const auto g = simulate_graph(testing::edges_transitive_map(), vec({-1, 0.5}),
                                make_partition(std::vector<std::size_t>(100, 50), false), c);
  for (std::size_t k = 0; k < g.num_neighborhoods(); ++k) {
    CHECK(g.adjacency(k).num_edges() > 0);
    CHECK(g.adjacency(k).num_edges() < g.adjacency(k).num_dyads());
  }
}

TEST_CASE("degeneracy flag") {
  SamplerConfig c;
  c.draws = 500;
  c.seed = 1;
  const auto g = make_partition({8}, false);
  CHECK(sample_neighborhood(testing::edges_only_map(), vec({-8}), g, 0, c).degenerate);
  CHECK(sample_neighborhood(testing::edges_only_map(), vec({8}), g, 0, c).degenerate);
  CHECK_FALSE(sample_neighborhood(testing::edges_only_map(), vec({0}), g, 0, c).degenerate);
}

TEST_CASE("chain statistics are tracked incrementally") {
  SamplerConfig c;
  c.draws = 50;
  c.seed = 9;
  const auto g = make_partition({9}, true);
  const auto map = EtaMap::canonical(TermSet({{TermKind::Edges, ""}, {TermKind::Mutual, ""}, {TermKind::Transitive, ""}}));
  const auto s = sample_neighborhood(map, vec({-1, 0.5, 0.2}), g, 0, c);
  auto last = g;
  last.set_adjacency(0, s.final_state);
  CHECK(Eigen::VectorXd(s.stats.row(49).transpose()) == compute_stats(last, map.terms()).per_hood[0]);
}
