// Copyright 2026 The mlergm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>

#include "mlergm/estimator.hpp"
#include "mlergm/experiments.hpp"
#include "mlergm/gof.hpp"
#include "mlergm/model.hpp"
#include "mlergm/sampler.hpp"

namespace mlergm {

/// Everything one YAML run file describes. See configs/ for annotated examples.
struct RunConfig {
  bool directed = false;
  EtaMap map;
  Theta init;  ///< per-parameter `init` values; starting or simulation point
  SamplerConfig sampler;
  EstimatorConfig estimator;
  GofConfig gof;
  std::optional<ExperimentConfig> experiment;
};

/// Throws UsageError with the offending key on any schema violation.
RunConfig parse_config(const std::string& yaml_text);
RunConfig load_config(const std::string& path);

}  // namespace mlergm
