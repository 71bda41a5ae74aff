// Copyright 2026 The mlergm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "mlergm/estimator.hpp"
#include "mlergm/model.hpp"
#include "mlergm/sampler.hpp"

namespace mlergm {

enum class Design { Consistency, Concentration };

/// Neighborhood sizes as (size, share) pairs; a uniform design has one entry.
struct SizeSpec {
  std::vector<std::pair<std::size_t, double>> mix;

  static SizeSpec uniform(std::size_t size) { return {{{size, 1.0}}}; }
};

/// Sizes of K neighborhoods, grouped by size in the order of `spec.mix`.
/// Counts follow the shares, rounded by largest remainder.
std::vector<std::size_t> neighborhood_sizes(const SizeSpec& spec, std::size_t K);

struct ExperimentConfig {
  Design design = Design::Consistency;
  Theta theta_star;
  std::vector<std::size_t> grid;  ///< neighborhood counts K
  SizeSpec sizes = SizeSpec::uniform(15);
  std::size_t replications = 50;
  std::uint64_t seed = 0;
  bool directed = false;
  SamplerConfig simulation;  ///< burn-in used to draw each dataset
  EstimatorConfig estimator;

  void validate(const EtaMap& map) const;
};

struct ReplicationRow {
  std::size_t K = 0;
  std::size_t replication = 0;
  std::size_t coordinate = 0;
  double estimate = 0;  ///< NaN when the fit failed
  std::string status;   ///< fit status, or "error"
};

struct ConsistencySummaryRow {
  std::size_t K = 0;
  std::size_t coordinate = 0;
  double rmse = 0;
  double bias = 0;
  double sd = 0;
  double median_abs_error = 0;
  std::size_t fits = 0;  ///< replications entering the summary
};

struct ConsistencyResult {
  std::vector<std::string> coordinates;
  std::vector<ReplicationRow> rows;
  std::vector<ConsistencySummaryRow> summary;
};

/// For each K: simulate `replications` datasets at theta_star and fit each.
/// Fits that end boundary-suspect or throw are kept as rows and left out of
/// the summary.
ConsistencyResult run_consistency(const EtaMap& map, const ExperimentConfig& config);

/// Recomputes the summary from replication rows.
std::vector<ConsistencySummaryRow> summarize_consistency(const std::vector<ReplicationRow>& rows,
                                                         const Theta& theta_star);

struct ConcentrationRow {
  std::size_t K = 0;
  std::size_t replication = 0;
  std::size_t edges = 0;
  std::size_t dyads = 0;
  double density = 0;  ///< edges / dyads
};

struct ConcentrationSummaryRow {
  std::size_t K = 0;
  std::size_t dyads = 0;
  double mean_density = 0;
  double sd_density = 0;  ///< sd of f(X) / total dyads
  double min_density = 0;
  double max_density = 0;
};

struct ConcentrationResult {
  std::vector<ConcentrationRow> rows;
  std::vector<ConcentrationSummaryRow> summary;
};

ConcentrationResult run_concentration(const EtaMap& map, const ExperimentConfig& config);
std::vector<ConcentrationSummaryRow> summarize_concentration(const std::vector<ConcentrationRow>& rows);

void write_consistency_rows(std::ostream& out, const ConsistencyResult& result);
void write_consistency_summary(std::ostream& out, const ConsistencyResult& result);
void write_concentration_rows(std::ostream& out, const ConcentrationResult& result);
void write_concentration_summary(std::ostream& out, const ConcentrationResult& result);

}  // namespace mlergm
