// Copyright 2026 The mlergm Authors
// SPDX-License-Identifier: Apache-2.0

#include "mlergm/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>

#include "mlergm/csv.hpp"
#include "mlergm/errors.hpp"
#include "mlergm/parallel.hpp"

namespace mlergm {

std::vector<std::size_t> neighborhood_sizes(const SizeSpec& spec, std::size_t K) {
  if (spec.mix.empty()) throw UsageError("size specification is empty");
  double total = 0;
  for (const auto& [size, share] : spec.mix) {
    if (size < 1) throw UsageError("neighborhood sizes must be positive");
    if (!(share > 0)) throw UsageError("size shares must be positive");
    total += share;
  }
  std::vector<std::size_t> counts(spec.mix.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < spec.mix.size(); ++i) {
    const double exact = spec.mix[i].second / total * static_cast<double>(K);
    counts[i] = static_cast<std::size_t>(std::floor(exact));
    assigned += counts[i];
    remainders.emplace_back(exact - static_cast<double>(counts[i]), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; assigned < K; ++r, ++assigned) ++counts[remainders[r].second];

  std::vector<std::size_t> sizes;
  sizes.reserve(K);
  for (std::size_t i = 0; i < spec.mix.size(); ++i) sizes.insert(sizes.end(), counts[i], spec.mix[i].first);
  return sizes;
}

void ExperimentConfig::validate(const EtaMap& map) const {
  if (grid.empty()) throw UsageError("experiment grid is empty");
  for (auto K : grid)
    if (K < 1) throw UsageError("experiment grid entries must be positive");
  if (replications < 2) throw UsageError("experiments need at least two replications");
  if (static_cast<std::size_t>(theta_star.size()) != map.num_parameters())
    throw UsageError("theta_star has " + std::to_string(theta_star.size()) + " coordinates, the model has " +
                     std::to_string(map.num_parameters()));
  map.check_domain(theta_star);
  neighborhood_sizes(sizes, 1);
  simulation.validate();
  if (design == Design::Consistency) estimator.validate();
}

namespace {

MultilevelGraph partition_for(const ExperimentConfig& config, std::size_t K) {
  return make_partition(neighborhood_sizes(config.sizes, K), config.directed);
}

SamplerConfig dataset_sampler(const ExperimentConfig& config, std::size_t K, std::size_t r) {
  SamplerConfig s = config.simulation;
  s.seed = derive_seed(config.seed, {K, r, 0});
  return s;
}

double sample_sd(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const auto m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

bool usable(const std::string& status) { return status == "converged" || status == "max-iters"; }

}  // namespace

ConsistencyResult run_consistency(const EtaMap& map, const ExperimentConfig& config) {
  config.validate(map);
  const auto q = map.num_parameters();
  ConsistencyResult result;
  result.coordinates = map.parameter_names();

  for (auto K : config.grid) {
    const auto partition = partition_for(config, K);
    map.terms().validate(partition);
    std::vector<std::pair<Theta, std::string>> fits(config.replications);
    parallel_for(config.replications, [&](std::size_t r) {
      EstimatorConfig est = config.estimator;
      est.seed = derive_seed(config.seed, {K, r, 1});
      try {
        const auto data = simulate_graph(map, config.theta_star, partition, dataset_sampler(config, K, r));
        const auto fit = mcmle(data, map, est);
        fits[r] = {fit.theta, to_string(fit.status)};
      } catch (const EstimationError&) {
        fits[r] = {Theta::Constant(static_cast<Eigen::Index>(q), std::numeric_limits<double>::quiet_NaN()),
                   "error"};
      } catch (const DomainError&) {
        fits[r] = {Theta::Constant(static_cast<Eigen::Index>(q), std::numeric_limits<double>::quiet_NaN()),
                   "error"};
      }
    });
    for (std::size_t r = 0; r < config.replications; ++r)
      for (std::size_t c = 0; c < q; ++c)
        result.rows.push_back({K, r, c, fits[r].first[static_cast<Eigen::Index>(c)], fits[r].second});
  }
  result.summary = summarize_consistency(result.rows, config.theta_star);
  return result;
}

std::vector<ConsistencySummaryRow> summarize_consistency(const std::vector<ReplicationRow>& rows,
                                                         const Theta& theta_star) {
  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> estimates;
  std::vector<std::size_t> order;
  for (const auto& row : rows) {
    auto& v = estimates[{row.K, row.coordinate}];
    if (std::find(order.begin(), order.end(), row.K) == order.end()) order.push_back(row.K);
    if (usable(row.status)) v.push_back(row.estimate);
  }
  std::vector<ConsistencySummaryRow> out;
  for (auto K : order) {
    for (const auto& [key, values] : estimates) {
      if (key.first != K) continue;
      const double truth = theta_star[static_cast<Eigen::Index>(key.second)];
      ConsistencySummaryRow s;
      s.K = K;
      s.coordinate = key.second;
      s.fits = values.size();
      double sum = 0, sq = 0;
      std::vector<double> abs_err;
      for (double v : values) {
        sum += v;
        sq += (v - truth) * (v - truth);
        abs_err.push_back(std::abs(v - truth));
      }
      const double n = static_cast<double>(values.size());
      const double mean = sum / n;
      s.rmse = std::sqrt(sq / n);
      s.bias = mean - truth;
      s.sd = sample_sd(values, mean);
      s.median_abs_error = median(abs_err);
      out.push_back(s);
    }
  }
  return out;
}

ConcentrationResult run_concentration(const EtaMap& map, const ExperimentConfig& config) {
  config.validate(map);
  ConcentrationResult result;
  for (auto K : config.grid) {
    const auto partition = partition_for(config, K);
    map.terms().validate(partition);
    std::vector<ConcentrationRow> rows(config.replications);
    parallel_for(config.replications, [&](std::size_t r) {
      const auto g = simulate_graph(map, config.theta_star, partition, dataset_sampler(config, K, r));
      auto& row = rows[r];
      row.K = K;
      row.replication = r;
      row.edges = g.num_edges();
      row.dyads = g.num_dyads();
      row.density = static_cast<double>(row.edges) / static_cast<double>(row.dyads);
    });
    result.rows.insert(result.rows.end(), rows.begin(), rows.end());
  }
  result.summary = summarize_concentration(result.rows);
  return result;
}

std::vector<ConcentrationSummaryRow> summarize_concentration(const std::vector<ConcentrationRow>& rows) {
  std::vector<ConcentrationSummaryRow> out;
  std::size_t begin = 0;
  while (begin < rows.size()) {
    auto end = begin;
    while (end < rows.size() && rows[end].K == rows[begin].K) ++end;
    ConcentrationSummaryRow s;
    s.K = rows[begin].K;
    s.dyads = rows[begin].dyads;
    std::vector<double> d;
    for (auto i = begin; i < end; ++i) d.push_back(rows[i].density);
    s.mean_density = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
    s.sd_density = sample_sd(d, s.mean_density);
    s.min_density = *std::min_element(d.begin(), d.end());
    s.max_density = *std::max_element(d.begin(), d.end());
    out.push_back(s);
    begin = end;
  }
  return out;
}

void write_consistency_rows(std::ostream& out, const ConsistencyResult& result) {
  csv::write_row(out, {"K", "replication", "coordinate", "estimate", "status"});
  for (const auto& r : result.rows)
    csv::write_row(out, {std::to_string(r.K), std::to_string(r.replication), result.coordinates[r.coordinate],
                         csv::format_double(r.estimate), r.status});
}

void write_consistency_summary(std::ostream& out, const ConsistencyResult& result) {
  csv::write_row(out, {"K", "coordinate", "rmse", "bias", "sd", "median_abs_error", "fits"});
  for (const auto& s : result.summary)
    csv::write_row(out, {std::to_string(s.K), result.coordinates[s.coordinate], csv::format_double(s.rmse),
                         csv::format_double(s.bias), csv::format_double(s.sd),
                         csv::format_double(s.median_abs_error), std::to_string(s.fits)});
}

void write_concentration_rows(std::ostream& out, const ConcentrationResult& result) {
  csv::write_row(out, {"K", "replication", "edges", "dyads", "density"});
  for (const auto& r : result.rows)
    csv::write_row(out, {std::to_string(r.K), std::to_string(r.replication), std::to_string(r.edges),
                         std::to_string(r.dyads), csv::format_double(r.density)});
}

void write_concentration_summary(std::ostream& out, const ConcentrationResult& result) {
  csv::write_row(out, {"K", "dyads", "mean_density", "sd_density", "min_density", "max_density"});
  for (const auto& s : result.summary)
    csv::write_row(out, {std::to_string(s.K), std::to_string(s.dyads), csv::format_double(s.mean_density),
                         csv::format_double(s.sd_density), csv::format_double(s.min_density),
                         csv::format_double(s.max_density)});
}

}  // namespace mlergm
