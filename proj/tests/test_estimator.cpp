// Copyright 2026 The mlergm Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "mlergm/errors.hpp"
#include "mlergm/estimator.hpp"
#include "mlergm/oracle.hpp"
#include "test_util.hpp"

using namespace mlergm;
using testing::vec;

namespace {

MultilevelGraph with_edges(std::vector<std::size_t> sizes, std::size_t per_hood) {
  auto g = make_partition(sizes, false);
  for (std::size_t k = 0; k < g.num_neighborhoods(); ++k) {
    const auto pairs = dyad_pairs(g.size(k), false);
    for (std::size_t e = 0; e < per_hood; ++e) g.toggle_edge({k, pairs[e].first, pairs[e].second});
  }
  return g;
}

SampleBatch batch_at(const EtaMap& map, const Theta& theta, const MultilevelGraph& g, std::size_t draws,
                     std::uint64_t seed) {
  SamplerConfig c;
  c.draws = draws;
  c.seed = seed;
  return sample_batch(map, theta, g, c);
}

}  // namespace

TEST_CASE("pseudolikelihood under the edge-only model is the logit of density") {
  const auto map = testing::edges_only_map();
  const auto quarter = mple(with_edges({9}, 9), map);
  CHECK(quarter.theta[0] == doctest::Approx(std::log(1.0 / 3.0)).epsilon(1e-9));
  CHECK_FALSE(quarter.boundary_suspect);
  CHECK(mple(with_edges({5, 5}, 5), map).theta[0] == doctest::Approx(0).epsilon(1e-9));
}

TEST_CASE("pseudolikelihood separation is flagged") {
  const auto map = testing::edges_only_map();
  CHECK(mple(with_edges({3}, 3), map).boundary_suspect);
  CHECK(mple(make_partition({4}, false), map).boundary_suspect);
}

TEST_CASE("pseudolikelihood lands near the truth on simulated data") {
  SamplerConfig c;
  c.seed = 31;
  const auto map = testing::edges_transitive_map();
  const Theta truth = vec({-1, 0.5});
  const auto g = simulate_graph(map, truth, make_partition(std::vector<std::size_t>(50, 15), false), c);
  const auto fit = mple(g, map);
  CHECK((fit.theta - truth).cwiseAbs().maxCoeff() < 1.0);
  const auto curved = mple(g, testing::gwesp_map());
  CHECK(curved.theta.allFinite());
  CHECK(curved.theta[2] > kMinDecay);
}

TEST_CASE("loglikelihood ratio basics") {
  const auto map = testing::gwesp_map();
  std::mt19937_64 rng(3);
  const auto g = testing::random_graph({5, 6, 6}, false, 0.4, rng);
  const Theta ref = vec({-0.5, 0.4, 1.3});
  const auto batch = batch_at(map, ref, g, 500, 1);
  const auto observed = compute_stats(g, map.terms());
  CHECK(mc_loglik_ratio(map, ref, ref, observed, batch) == 0.0);

  SUBCASE("shifting every statistic by a constant leaves the ratio unchanged") {
    auto shifted_batch = batch;
    auto shifted_obs = observed;
    for (std::size_t k = 0; k < 3; ++k) {
      Eigen::RowVectorXd shift(shifted_batch.hoods[k].stats.cols());
      for (Eigen::Index i = 0; i < shift.size(); ++i) shift[i] = static_cast<double>(rng() % 7) - 3.0;
      shifted_batch.hoods[k].stats.rowwise() += shift;
      shifted_obs.per_hood[k] += shift.transpose();
    }
    for (const Theta& t : {vec({-0.3, 0.5, 1.2}), vec({-0.6, 0.2, 1.5})})
      CHECK(mc_loglik_ratio(map, t, ref, shifted_obs, shifted_batch) ==
            doctest::Approx(mc_loglik_ratio(map, t, ref, observed, batch)).epsilon(1e-10));
  }

  SUBCASE("score at the reference point uses uniform weights") {
    const auto si = mc_score_info(map, ref, ref, observed, batch);
    Eigen::VectorXd expected = Eigen::VectorXd::Zero(3);
    for (std::size_t k = 0; k < 3; ++k) {
      const Eigen::VectorXd mean = batch.hoods[k].stats.colwise().mean().transpose();
      expected += map.eta_gradient(ref, g.size(k)).transpose() * (observed.per_hood[k] - mean);
    }
    CHECK((si.gradient - expected).norm() < 1e-10);
    CHECK(si.min_ess_fraction == doctest::Approx(1.0));
  }

  SUBCASE("score matches central differences of the ratio") {
    for (const Theta& t : {vec({-0.4, 0.45, 1.25}), vec({-0.55, 0.3, 1.4})}) {
      const auto si = mc_score_info(map, t, ref, observed, batch);
      for (Eigen::Index c = 0; c < 3; ++c) {
        Theta up = t, down = t;
        up[c] += 1e-5;
        down[c] -= 1e-5;
        const double fd =
            (mc_loglik_ratio(map, up, ref, observed, batch) - mc_loglik_ratio(map, down, ref, observed, batch)) / 2e-5;
        CHECK(std::abs(fd - si.gradient[c]) <= 1e-4 * std::max(1.0, std::abs(si.gradient[c])));
      }
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(si.info);
      CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
      CHECK((si.info - si.info.transpose()).norm() == 0.0);
    }
  }

  SUBCASE("degenerate importance weights are refused") {
    CHECK_THROWS_AS(mc_score_info(map, vec({3, 3, 3}), ref, observed, batch), LowEffectiveSampleSize);
  }

  CHECK_THROWS_AS(mc_loglik_ratio(map, ref, ref, compute_stats(make_partition({5}, false), map.terms()), batch),
                  UsageError);
}

TEST_CASE("loglikelihood ratio agrees with exact enumeration on three nodes") {
  const auto map = testing::edges_only_map();
  const auto g = with_edges({3}, 2);
  const Theta ref = vec({0.2});
  const auto batch = batch_at(map, ref, g, 100000, 9);
  const auto observed = compute_stats(g, map.terms());
  for (double t : {-0.3, 0.0, 0.45, 0.7}) {
    const double exact = exact_loglik(map, vec({t}), g) - exact_loglik(map, ref, g);
    CHECK(std::abs(mc_loglik_ratio(map, vec({t}), ref, observed, batch) - exact) < 0.01);
  }
}

TEST_CASE("edge-only MCMLE recovers the logit of density") {
  EstimatorConfig c;
  c.draws = 2000;
  c.seed = 4;
  const auto g = with_edges(std::vector<std::size_t>(20, 8), 9);
  const auto fit = mcmle(g, testing::edges_only_map(), c);
  CHECK(fit.status == FitStatus::Converged);
  CHECK(std::abs(fit.theta[0] - std::log(9.0 / 19.0)) < 0.02);
  CHECK(fit.score_norm < c.tol_score + 0.01);
}

TEST_CASE("MCMLE matches the exact MLE on a five-node neighborhood") {
  SamplerConfig sim;
  sim.seed = 12;
  const auto map = testing::edges_transitive_map();
  const auto g = simulate_graph(map, vec({-0.5, 0.4}), make_partition({5, 5, 5, 5}, false), sim);
  const auto exact = exact_mle(g, map);
  EstimatorConfig c;
  c.draws = 100000;
  c.seed = 5;
  const auto fit = mcmle(g, map, c);
  CHECK(fit.status == FitStatus::Converged);
  CHECK((fit.theta - exact.theta).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("MCMLE is deterministic given its seed") {
  SamplerConfig sim;
  sim.seed = 2;
  const auto map = testing::edges_transitive_map();
  const auto g = simulate_graph(map, vec({-1, 0.5}), make_partition(std::vector<std::size_t>(10, 12), false), sim);
  EstimatorConfig c;
  c.draws = 500;
  c.seed = 77;
  const auto a = mcmle(g, map, c);
  const auto b = mcmle(g, map, c);
  CHECK(a.theta == b.theta);
  CHECK(a.iterations == b.iterations);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t t = 0; t < a.trace.size(); ++t) CHECK(a.trace[t].theta == b.trace[t].theta);
}

TEST_CASE("MCMLE flags a complete graph as boundary-suspect") {
  EstimatorConfig c;
  c.draws = 200;
  const auto fit = mcmle(with_edges({3}, 3), testing::edges_only_map(), c);
  CHECK(fit.status == FitStatus::BoundarySuspect);
  CHECK(to_string(fit.status) == "boundary-suspect");
}

TEST_CASE("estimator configuration checks") {
  EstimatorConfig c;
  c.draws = 1;
  CHECK_THROWS_AS(c.validate(), UsageError);
  c = {};
  c.trust_radius = 0;
  CHECK_THROWS_AS(c.validate(), UsageError);
}

TEST_CASE("bootstrap standard errors") {
  const auto map = testing::edges_only_map();
  EstimatorConfig c;
  c.draws = 300;
  c.seed = 8;
  SamplerConfig sim;
  sim.seed = 9;
  const double p = logistic(-0.5);

  SUBCASE("fewer than two replicates is an error") {
    CHECK_THROWS_AS(bootstrap_se(map, vec({-0.5}), make_partition({6}, false), 1, c, sim), UsageError);
  }

  SUBCASE("edge-only standard errors follow the binomial delta method") {
    const auto partition = make_partition(std::vector<std::size_t>(200, 10), false);
    const auto boot = bootstrap_se(map, vec({-0.5}), partition, 100, c, sim);
    const double analytic = 1.0 / std::sqrt(partition.num_dyads() * p * (1 - p));
    CHECK(boot.failures == 0);
    CHECK(boot.replicates.size() == 100);
    CHECK(boot.se[0] == doctest::Approx(analytic).epsilon(0.15));
  }

  SUBCASE("standard errors shrink like one over root K") {
    const auto small = bootstrap_se(map, vec({-0.5}), make_partition(std::vector<std::size_t>(20, 10), false), 100, c, sim);
    const auto large = bootstrap_se(map, vec({-0.5}), make_partition(std::vector<std::size_t>(80, 10), false), 100, c, sim);
    const double ratio = large.se[0] / small.se[0];
    CHECK(ratio > 0.4);
    CHECK(ratio < 0.6);
  }
}
