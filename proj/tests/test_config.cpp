// Copyright 2026 The mlergm Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "mlergm/config.hpp"
#include "mlergm/errors.hpp"

using namespace mlergm;

namespace {

const char* kBase = R"(
directed: false
size_buckets: [10]
parameters:
  - {name: edges, init: -1}
  - {name: edges.large}
  - {name: same.group, init: 0.2}
  - {name: gwesp.scale, init: 0.3}
  - {name: gwesp.decay}
terms:
  - {term: edges, coef: edges, deviations: [~, edges.large]}
  - {term: nodematch, attribute: group, coef: same.group}
  - {term: gwesp, scale: gwesp.scale, decay: gwesp.decay}
sampler: {burn_in_per_dyad: 5, interval: 3, seed: 11}
estimator: {draws: 700, noise_z: 2}
gof: {replicates: 30}
)";

}  // namespace

TEST_CASE("a full configuration parses") {
  const auto run = parse_config(kBase);
  CHECK_FALSE(run.directed);
  CHECK(run.map.num_parameters() == 5);
  CHECK(run.map.parameter_names()[3] == "gwesp.scale");
  CHECK(run.init[0] == -1);
  CHECK(run.init[1] == 0);
  CHECK(run.init[4] == 1);  // decay defaults to 1
  CHECK(run.sampler.seed == 11);
  CHECK(run.sampler.interval == 3);
  CHECK(run.estimator.draws == 700);
  CHECK(run.estimator.noise_z == 2);
  CHECK(run.estimator.seed == 11);
  CHECK(run.gof.replicates == 30);
  CHECK(run.gof.sampler.seed == 11);
  CHECK_FALSE(run.experiment.has_value());

  // Bucket deviation applies from size 10 upwards.
  Theta t = run.init;
  t[1] = 0.5;
  CHECK(run.map.eta(t, 9)[0] == doctest::Approx(-1));
  CHECK(run.map.eta(t, 10)[0] == doctest::Approx(-0.5));
}

TEST_CASE("experiment section") {
  const auto run = parse_config(std::string(kBase) + R"(
experiment:
  design: concentration
  seed: 5
  grid: [10, 40]
  sizes: {mixed: [{size: 10, share: 1}, {size: 20, share: 3}]}
  replications: 4
  theta_star: {gwesp.decay: 1.5}
)");
  REQUIRE(run.experiment.has_value());
  const auto& x = *run.experiment;
  CHECK(x.design == Design::Concentration);
  CHECK(x.grid == std::vector<std::size_t>{10, 40});
  CHECK(x.sizes.mix.size() == 2);
  CHECK(x.theta_star[4] == 1.5);
  CHECK(x.theta_star[0] == -1);
  CHECK(x.simulation.seed == 11);
}

TEST_CASE("schema violations are usage errors") {
  CHECK_THROWS_AS(parse_config(std::string(kBase) + "extra: 1\n"), UsageError);
  CHECK_THROWS_AS(parse_config("parameters: [{name: a}]\nterms: [{term: edges, coef: b}]\n"), UsageError);
  CHECK_THROWS_AS(parse_config("parameters: [{name: a}]\nterms: [{term: stars, coef: a}]\n"), UsageError);
  CHECK_THROWS_AS(parse_config("parameters: [{name: a}, {name: a}]\nterms: [{term: edges, coef: a}]\n"),
                  UsageError);
  CHECK_THROWS_AS(parse_config("parameters: [{name: a}]\nterms: [{term: edges, coef: a, colour: 1}]\n"),
                  UsageError);
  CHECK_THROWS_AS(parse_config("parameters: [{name: a}, {name: b, init: 0.5}]\n"
                               "terms: [{term: gwesp, scale: a, decay: b}]\n"),
                  UsageError);
  CHECK_THROWS_AS(parse_config("parameters: [{name: a}]\nterms: [{term: edges, coef: a}]\nsampler: {draws: x}\n"),
                  UsageError);
  CHECK_THROWS_AS(parse_config("{{{"), UsageError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.yaml"), UsageError);
}

TEST_CASE("shipped configurations parse") {
  for (const char* name : {"edges_transitive.yaml", "gwesp_curved.yaml", "concentration.yaml", "mixed_sizes.yaml"}) {
    CAPTURE(name);
    const auto run = load_config(std::string(MLERGM_SOURCE_DIR) + "/configs/" + name);
    CHECK(run.experiment.has_value());
  }
}
