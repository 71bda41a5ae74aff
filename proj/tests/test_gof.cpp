// Copyright 2026 The mlergm Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mlergm/errors.hpp"
#include "mlergm/estimator.hpp"
#include "mlergm/gof.hpp"
#include "test_util.hpp"

using namespace mlergm;
using testing::vec;

namespace {

GofConfig small_config(std::size_t R, std::uint64_t seed) {
  GofConfig c;
  c.replicates = R;
  c.sampler.seed = seed;
  return c;
}

double band_coverage(const GofReport& report) {
  std::size_t inside = 0;
  for (const auto& r : report.rows) inside += r.observed >= r.simulated_q05 && r.observed <= r.simulated_q95;
  return static_cast<double>(inside) / static_cast<double>(report.rows.size());
}

}  // namespace

TEST_CASE("quantiles interpolate linearly between order statistics") {
  std::vector<double> v{4, 1, 3, 2};
  CHECK(quantile(v, 0.0) == 1);
  CHECK(quantile(v, 1.0) == 4);
  CHECK(quantile(v, 0.5) == doctest::Approx(2.5));
  CHECK(quantile(v, 0.05) == doctest::Approx(1.15));
  std::vector<double> one{7};
  CHECK(quantile(one, 0.95) == 7);
  std::vector<double> none;
  CHECK_THROWS_AS(quantile(none, 0.5), UsageError);
}

TEST_CASE("too few replicates are rejected") {
  const auto g = make_partition({5}, false);
  CHECK_THROWS_AS(gof(testing::edges_only_map(), vec({0}), g, small_config(9, 1)), UsageError);
  CHECK_NOTHROW(gof(testing::edges_only_map(), vec({0}), g, small_config(10, 1)));
}

TEST_CASE("report layout and band order") {
  SamplerConfig sim;
  sim.seed = 4;
  const auto map = testing::edges_transitive_map();
  const auto g = simulate_graph(map, vec({-1, 0.5}), make_partition({6, 8}, false), sim);
  const auto report = gof(map, vec({-1, 0.5}), g, small_config(50, 2));
  CHECK(report.replicates == 50);
  CHECK(report.rows.front().statistic == "geodesic");
  CHECK(report.rows.front().bin == "1");
  CHECK(report.rows.back().statistic == "model");
  CHECK(report.rows.back().bin == "transitive");
  CHECK(std::count_if(report.rows.begin(), report.rows.end(),
                      [](const GofRow& r) { return r.bin == "unreachable"; }) == 1);
  for (const auto& r : report.rows) CHECK(r.simulated_q05 <= r.simulated_q95);
  CHECK(report.esp_rmse >= 0);

  const auto model_edges = std::find_if(report.rows.begin(), report.rows.end(),
                                        [](const GofRow& r) { return r.bin == "edges"; });
  REQUIRE(model_edges != report.rows.end());
  CHECK(model_edges->observed == static_cast<double>(g.num_edges()));
}

TEST_CASE("report is deterministic given the seed") {
  SamplerConfig sim;
  sim.seed = 6;
  const auto map = testing::gwesp_map();
  const Theta theta = vec({-1, 0.3, 1.2});
  const auto g = simulate_graph(map, theta, make_partition({7, 7, 9}, false), sim);
  std::ostringstream a, b;
  write_gof_csv(a, gof(map, theta, g, small_config(40, 8)));
  write_gof_csv(b, gof(map, theta, g, small_config(40, 8)));
  CHECK(a.str() == b.str());
}

TEST_CASE("self-simulated data falls inside the bands") {
  const auto map = testing::edges_transitive_map();
  const Theta theta = vec({-1, 0.5});
  std::vector<double> coverage;
  for (std::uint64_t rep = 0; rep < 5; ++rep) {
    SamplerConfig sim;
    sim.seed = 100 + rep;
    const auto g = simulate_graph(map, theta, make_partition(std::vector<std::size_t>(20, 10), false), sim);
    coverage.push_back(band_coverage(gof(map, theta, g, small_config(200, 200 + rep))));
  }
  std::sort(coverage.begin(), coverage.end());
  CHECK(coverage[2] >= 0.9);
}

TEST_CASE("a transitive fit predicts shared partners better than independence") {
  SamplerConfig sim;
  sim.seed = 17;
  const auto transitive = testing::edges_transitive_map();
  const auto g = simulate_graph(transitive, vec({-1.5, 0.7}), make_partition(std::vector<std::size_t>(20, 12), false), sim);

  const auto independence = testing::edges_only_map();
  const auto p_fit = mple(g, independence);
  REQUIRE_FALSE(p_fit.boundary_suspect);
  EstimatorConfig est;
  est.draws = 500;
  est.seed = 3;
  const auto t_fit = mcmle(g, transitive, est);
  REQUIRE(t_fit.status != FitStatus::BoundarySuspect);

  const auto a = gof(independence, p_fit.theta, g, small_config(100, 5));
  const auto b = gof(transitive, t_fit.theta, g, small_config(100, 5));
  CHECK(a.esp_rmse > b.esp_rmse);
}
