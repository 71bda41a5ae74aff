// Copyright 2026 The mlergm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mlergm/errors.hpp"
#include "mlergm/graph.hpp"
#include "mlergm/model.hpp"
#include "mlergm/sampler.hpp"
#include "mlergm/statistics.hpp"

namespace mlergm {

struct EstimatorConfig {
  std::size_t draws = 5000;  ///< Monte Carlo draws per neighborhood and iteration
  double tol_step = 1e-4;
  double tol_score = 1e-4;  ///< on the score norm divided by the total dyad count
  std::size_t max_outer = 30;
  std::size_t max_inner = 50;
  double trust_radius = 0.5;
  double min_ess_fraction = 0.05;
  /// Tolerances are widened by this many Monte Carlo standard errors.
  double noise_z = 3.0;
  /// Consecutive outer iterations with the observed statistic outside the
  /// sampled hull before the fit is declared boundary-suspect.
  std::size_t boundary_patience = 3;
  std::uint64_t seed = 0;
  /// Burn-in and interval settings; `draws` and `seed` are overridden per iteration.
  SamplerConfig sampler;

  void validate() const;
};

enum class FitStatus { Converged, MaxIterations, BoundarySuspect };
std::string to_string(FitStatus status);

struct IterationRecord {
  std::size_t iteration = 0;
  Theta theta;            ///< reference point the batch was drawn at
  double score_norm = 0;  ///< normalized score at `theta`
  double step_norm = 0;
  double min_ess_fraction = 1;
  bool outside_hull = false;
};

struct EstimateResult {
  Theta theta;
  std::size_t iterations = 0;
  double score_norm = 0;
  double step_norm = 0;
  FitStatus status = FitStatus::MaxIterations;
  std::vector<IterationRecord> trace;
  std::optional<Eigen::VectorXd> se;
  std::string message;
};

struct MpleResult {
  Theta theta;
  std::size_t iterations = 0;
  double log_pseudolikelihood = 0;
  bool boundary_suspect = false;
};

/// Maximum pseudolikelihood: logistic regression of dyad states on their
/// change statistics, maximized by damped Fisher scoring through the eta map.
MpleResult mple(const MultilevelGraph& graph, const EtaMap& map, std::optional<Theta> start = {});

/// Default starting point: zeros, with geometric decays at 1.
Theta default_start(const EtaMap& map);

/// Monte Carlo loglikelihood ratio l(theta) - l(theta_ref) from a batch drawn
/// at theta_ref (per-neighborhood importance sampling).
double mc_loglik_ratio(const EtaMap& map, const Theta& theta, const Theta& theta_ref,
                       const StatisticVector& observed, const SampleBatch& batch);

struct ScoreInfo {
  Eigen::VectorXd gradient;
  Eigen::MatrixXd info;
  /// Smallest per-neighborhood effective sample size, as a fraction of draws.
  double min_ess_fraction = 1;
};

/// Raised when importance weights degenerate; the caller should resample.
class LowEffectiveSampleSize : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

/// Gradient and information of mc_loglik_ratio at theta. Throws
/// LowEffectiveSampleSize if some neighborhood's ESS falls below the fraction.
ScoreInfo mc_score_info(const EtaMap& map, const Theta& theta, const Theta& theta_ref,
                        const StatisticVector& observed, const SampleBatch& batch,
                        double min_ess_fraction = 0.05);

/// Monte Carlo maximum likelihood, starting from the MPLE unless `start` is given.
EstimateResult mcmle(const MultilevelGraph& graph, const EtaMap& map, const EstimatorConfig& config,
                     std::optional<Theta> start = {});

struct BootstrapResult {
  Eigen::VectorXd se;
  std::vector<Theta> replicates;  ///< successful fits only
  std::size_t failures = 0;
};

/// Parametric bootstrap: simulate `replicates` graphs at theta_hat on the
/// partition, refit each, and report per-coordinate sample standard deviations.
/// Throws UsageError for fewer than two replicates and EstimationError when
/// more than 20% of refits fail.
BootstrapResult bootstrap_se(const EtaMap& map, const Theta& theta_hat,
                             const MultilevelGraph& partition, std::size_t replicates,
                             const EstimatorConfig& config, const SamplerConfig& simulation);

}  // namespace mlergm
