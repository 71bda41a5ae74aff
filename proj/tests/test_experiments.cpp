// Copyright 2026 The mlergm Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "mlergm/errors.hpp"
#include "mlergm/experiments.hpp"
#include "test_util.hpp"

using namespace mlergm;
using testing::vec;

namespace {

ExperimentConfig small_consistency() {
  ExperimentConfig x;
  x.theta_star = vec({-1, 0.5});
  x.grid = {4, 8};
  x.sizes = SizeSpec::uniform(8);
  x.replications = 3;
  x.seed = 42;
  x.simulation.burn_in_per_dyad = 10;
  x.estimator.draws = 300;
  return x;
}

}  // namespace

TEST_CASE("neighborhood sizes follow shares") {
  CHECK(neighborhood_sizes(SizeSpec::uniform(15), 3) == std::vector<std::size_t>{15, 15, 15});
  SizeSpec mix{{{10, 1.0}, {20, 1.0}, {30, 1.0}}};
  const auto s = neighborhood_sizes(mix, 10);
  CHECK(s.size() == 10);
  CHECK(std::count(s.begin(), s.end(), 10) == 4);
  CHECK(std::count(s.begin(), s.end(), 20) == 3);
  CHECK(std::count(s.begin(), s.end(), 30) == 3);
  SizeSpec skew{{{5, 0.25}, {9, 0.75}}};
  const auto t = neighborhood_sizes(skew, 8);
  CHECK(std::count(t.begin(), t.end(), 5) == 2);
  CHECK_THROWS_AS(neighborhood_sizes(SizeSpec{}, 3), UsageError);
  CHECK_THROWS_AS(neighborhood_sizes(SizeSpec{{{4, 0.0}}}, 3), UsageError);
}

TEST_CASE("experiment validation") {
  const auto map = testing::edges_transitive_map();
  auto x = small_consistency();
  CHECK_NOTHROW(x.validate(map));
  x.replications = 1;
  CHECK_THROWS_AS(x.validate(map), UsageError);
  x = small_consistency();
  x.grid.clear();
  CHECK_THROWS_AS(x.validate(map), UsageError);
  x = small_consistency();
  x.theta_star = vec({1});
  CHECK_THROWS_AS(x.validate(map), UsageError);
}

TEST_CASE("consistency runs are deterministic and summaries recompute from rows") {
  const auto map = testing::edges_transitive_map();
  const auto x = small_consistency();
  const auto a = run_consistency(map, x);
  const auto b = run_consistency(map, x);
  std::ostringstream sa, sb;
  write_consistency_rows(sa, a);
  write_consistency_summary(sa, a);
  write_consistency_rows(sb, b);
  write_consistency_summary(sb, b);
  CHECK(sa.str() == sb.str());
  CHECK(a.rows.size() == 2 * 3 * 2);

  // Independent recomputation of the K=8 edges RMSE.
  double sq = 0;
  std::size_t n = 0;
  for (const auto& r : a.rows)
    if (r.K == 8 && r.coordinate == 0 && (r.status == "converged" || r.status == "max-iters")) {
      sq += (r.estimate + 1) * (r.estimate + 1);
      ++n;
    }
  const auto& s = a.summary[2];
  CHECK(s.K == 8);
  CHECK(s.coordinate == 0);
  CHECK(s.fits == n);
  if (n > 0) CHECK(s.rmse == doctest::Approx(std::sqrt(sq / static_cast<double>(n))));
}

TEST_CASE("summary statistics on fixed rows") {
  std::vector<ReplicationRow> rows{{5, 0, 0, 1.0, "converged"},
                                   {5, 1, 0, 2.0, "max-iters"},
                                   {5, 2, 0, 4.0, "converged"},
                                   {5, 3, 0, std::nan(""), "error"},
                                   {5, 4, 0, 99.0, "boundary-suspect"}};
  const auto s = summarize_consistency(rows, vec({2.0}));
  REQUIRE(s.size() == 1);
  CHECK(s[0].fits == 3);
  CHECK(s[0].bias == doctest::Approx(1.0 / 3.0));
  CHECK(s[0].rmse == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(s[0].median_abs_error == doctest::Approx(1.0));
  CHECK(s[0].sd == doctest::Approx(std::sqrt((16.0 / 9.0 + 1.0 / 9.0 + 25.0 / 9.0) / 2.0)));
}

TEST_CASE("concentration at zero dependence matches the binomial spread") {
  const auto map = testing::edges_transitive_map();
  ExperimentConfig x;
  x.design = Design::Concentration;
  x.theta_star = vec({-1, 0});
  x.grid = {5, 20};
  x.sizes = SizeSpec::uniform(10);
  x.replications = 400;
  x.seed = 3;
  const auto result = run_concentration(map, x);
  REQUIRE(result.summary.size() == 2);
  const double p = logistic(-1);
  for (const auto& s : result.summary) {
    const double binomial = std::sqrt(p * (1 - p) / static_cast<double>(s.dyads));
    CHECK(s.sd_density == doctest::Approx(binomial).epsilon(0.1));
    CHECK(s.mean_density == doctest::Approx(p).epsilon(0.02));
  }
  CHECK(result.summary[1].sd_density < result.summary[0].sd_density);
}
