// Copyright 2026 The mlergm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mlergm/graph.hpp"
#include "mlergm/model.hpp"
#include "mlergm/sampler.hpp"

namespace mlergm {

struct GofConfig {
  std::size_t replicates = 1000;
  /// Burn-in, spacing and seed of the simulation chains; `draws` is ignored.
  SamplerConfig sampler;

  void validate() const;
};

struct GofRow {
  std::string statistic;  ///< "geodesic", "dsp", "esp" or "model"
  std::string bin;        ///< distance, partner count, "unreachable" or a term name
  double simulated_mean = 0;
  double simulated_q05 = 0;
  double simulated_q95 = 0;
  double observed = 0;
};

struct GofReport {
  std::vector<GofRow> rows;
  /// sqrt(sum_i mean_r (esp_ri - observed_i)^2) over simulated replicates r.
  double esp_rmse = 0;
  std::size_t replicates = 0;
};

/// Simulates `replicates` graphs at theta (one chain per neighborhood started
/// empty, burned in, then sampled every interval) and compares the geodesic,
/// shared-partner and model-term distributions with the observed graph.
GofReport gof(const EtaMap& map, const Theta& theta, const MultilevelGraph& observed, const GofConfig& config);

/// Linear-interpolation quantile of a sample, p in [0, 1]. Reorders `values`.
double quantile(std::vector<double>& values, double p);

void write_gof_csv(std::ostream& out, const GofReport& report);
void write_gof_summary_csv(std::ostream& out, const GofReport& report);

}  // namespace mlergm
