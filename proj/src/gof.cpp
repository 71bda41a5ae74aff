// Copyright 2026 The mlergm Authors
// SPDX-License-Identifier: Apache-2.0

#include "mlergm/gof.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "mlergm/csv.hpp"
#include "mlergm/errors.hpp"
#include "mlergm/parallel.hpp"

namespace mlergm {

void GofConfig::validate() const {
  if (replicates < 10) throw UsageError("goodness of fit needs at least 10 simulated graphs");
  sampler.validate();
}

double quantile(std::vector<double>& values, double p) {
  if (values.empty()) throw UsageError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {

// Flat layout of one replicate's summaries in the largest neighborhood's shape:
// geodesic 1..n-1, unreachable, dsp 1..n-2, esp 1..n-2, model terms.
struct Layout {
  std::size_t geodesic = 0, unreachable = 0, dsp = 0, esp = 0, model = 0, width = 0, bins = 0;

  Layout(const TermSet& terms, std::size_t n_max) {
    const std::size_t g = n_max > 1 ? n_max - 1 : 0;
    bins = shared_partner_bins(n_max);
    unreachable = g;
    dsp = g + 1;
    esp = dsp + bins;
    model = esp + bins;
    width = model + terms.dim(n_max);
  }
};

void flatten(const GofSummary& s, const TermSet& terms, std::size_t n, const Eigen::VectorXd& stats,
             std::size_t n_max, const Layout& layout, double* out) {
  for (std::size_t i = 0; i < s.geodesic.size(); ++i) out[layout.geodesic + i] += s.geodesic[i];
  out[layout.unreachable] += s.unreachable;
  for (std::size_t i = 0; i < s.dsp.size(); ++i) out[layout.dsp + i] += s.dsp[i];
  for (std::size_t i = 0; i < s.esp.size(); ++i) out[layout.esp + i] += s.esp[i];
  Eigen::VectorXd padded = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(terms.dim(n_max)));
  accumulate_into(terms, n, stats, n_max, padded);
  for (Eigen::Index i = 0; i < padded.size(); ++i) out[layout.model + static_cast<std::size_t>(i)] += padded[i];
}

std::vector<std::pair<std::string, std::string>> row_labels(const TermSet& terms, std::size_t n_max,
                                                            const Layout& layout) {
  std::vector<std::pair<std::string, std::string>> labels(layout.width);
  for (std::size_t i = 0; i < layout.unreachable; ++i) labels[layout.geodesic + i] = {"geodesic", std::to_string(i + 1)};
  labels[layout.unreachable] = {"geodesic", "unreachable"};
  for (std::size_t i = 0; i < layout.bins; ++i) {
    labels[layout.dsp + i] = {"dsp", std::to_string(i + 1)};
    labels[layout.esp + i] = {"esp", std::to_string(i + 1)};
  }
  const auto names = terms.names(n_max);
  for (std::size_t i = 0; i < names.size(); ++i) labels[layout.model + i] = {"model", names[i]};
  return labels;
}

}  // namespace

GofReport gof(const EtaMap& map, const Theta& theta, const MultilevelGraph& observed, const GofConfig& config) {
  config.validate();
  map.terms().validate(observed);
  map.check_domain(theta);
  const auto& terms = map.terms();
  const auto n_max = observed.max_size();
  const Layout layout(terms, n_max);
  const auto R = config.replicates;
  const auto K = observed.num_neighborhoods();

  std::vector<double> obs(layout.width, 0.0);
  for (std::size_t k = 0; k < K; ++k)
    flatten(neighborhood_gof_summary(observed.adjacency(k)), terms, observed.size(k),
            neighborhood_stats(observed, k, terms), n_max, layout, obs.data());

  // sims[r * width + c]; neighborhoods are simulated in chunks to bound memory.
  std::vector<double> sims(R * layout.width, 0.0);
  const auto empty = observed.empty_copy();
  const std::size_t chunk = std::max<std::size_t>(1, 4 * static_cast<std::size_t>(worker_count()));
  for (std::size_t first = 0; first < K; first += chunk) {
    const auto last = std::min(K, first + chunk);
    std::vector<std::vector<double>> local(last - first);
    parallel_for(last - first, [&](std::size_t c) {
      const auto k = first + c;
      const auto n = empty.size(k);
      NeighborhoodChain chain(empty, k, terms, map.eta(theta, n), derive_seed(config.sampler.seed, {k}));
      chain.run(config.sampler.burn_in_steps(chain.num_dyads()));
      const auto interval = config.sampler.interval_steps(chain.num_dyads());
      auto& out = local[c];
      out.assign(R * layout.width, 0.0);
      for (std::size_t r = 0; r < R; ++r) {
        if (r > 0) chain.run(interval);
        flatten(neighborhood_gof_summary(chain.state().adjacency()), terms, n, chain.stats(), n_max, layout,
                out.data() + r * layout.width);
      }
    });
    for (const auto& l : local)
      for (std::size_t i = 0; i < sims.size(); ++i) sims[i] += l[i];
  }

  GofReport report;
  report.replicates = R;
  const auto labels = row_labels(terms, n_max, layout);
  std::vector<double> column(R);
  for (std::size_t c = 0; c < layout.width; ++c) {
    double mean = 0;
    for (std::size_t r = 0; r < R; ++r) {
      column[r] = sims[r * layout.width + c];
      mean += column[r];
    }
    mean /= static_cast<double>(R);
    GofRow row;
    row.statistic = labels[c].first;
    row.bin = labels[c].second;
    row.simulated_mean = mean;
    row.simulated_q05 = quantile(column, 0.05);
    row.simulated_q95 = quantile(column, 0.95);
    row.observed = obs[c];
    report.rows.push_back(std::move(row));
  }

  double sq = 0;
  for (std::size_t i = 0; i < layout.bins; ++i) {
    const auto c = layout.esp + i;
    double acc = 0;
    for (std::size_t r = 0; r < R; ++r) {
      const double d = sims[r * layout.width + c] - obs[c];
      acc += d * d;
    }
    sq += acc / static_cast<double>(R);
  }
  report.esp_rmse = std::sqrt(sq);
  return report;
}

void write_gof_csv(std::ostream& out, const GofReport& report) {
  csv::write_row(out, {"statistic", "bin", "simulated_mean", "simulated_q05", "simulated_q95", "observed"});
  for (const auto& r : report.rows)
    csv::write_row(out, {r.statistic, r.bin, csv::format_double(r.simulated_mean), csv::format_double(r.simulated_q05),
                         csv::format_double(r.simulated_q95), csv::format_double(r.observed)});
}

void write_gof_summary_csv(std::ostream& out, const GofReport& report) {
  csv::write_row(out, {"metric", "value"});
  csv::write_row(out, {"replicates", std::to_string(report.replicates)});
  csv::write_row(out, {"esp_rmse", csv::format_double(report.esp_rmse)});
}

}  // namespace mlergm
