// Copyright 2026 The mlergm Authors
// SPDX-License-Identifier: Apache-2.0

#include "mlergm/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "mlergm/parallel.hpp"

namespace mlergm {

void EstimatorConfig::validate() const {
  if (draws < 2) throw UsageError("estimator draws must be at least 2");
  if (max_outer < 1) throw UsageError("estimator max_outer must be at least 1");
  if (!(trust_radius > 0)) throw UsageError("estimator trust_radius must be positive");
  if (!(tol_step > 0) || !(tol_score > 0)) throw UsageError("estimator tolerances must be positive");
  if (!(min_ess_fraction >= 0 && min_ess_fraction < 1))
    throw UsageError("estimator min_ess_fraction must lie in [0, 1)");
  sampler.validate();
}

std::string to_string(FitStatus status) {
  switch (status) {
    case FitStatus::Converged: return "converged";
    case FitStatus::MaxIterations: return "max-iters";
    case FitStatus::BoundarySuspect: return "boundary-suspect";
  }
  return "?";
}

Theta default_start(const EtaMap& map) {
  Theta theta = Theta::Zero(static_cast<Eigen::Index>(map.num_parameters()));
  for (const auto& m : map.mappings())
    if (m.kind == MappingKind::Geometric) theta[static_cast<Eigen::Index>(m.decay.base)] = 1.0;
  return theta;
}

namespace {

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

// Distinct (size, state, change statistic) rows of the pseudolikelihood design.
struct DesignRow {
  std::size_t size;
  double y;
  Eigen::VectorXd delta;
  double count;
};

std::vector<DesignRow> pseudolikelihood_design(const MultilevelGraph& graph, const TermSet& terms) {
  std::map<std::tuple<std::size_t, int, std::vector<double>>, double> counts;
  for (std::size_t k = 0; k < graph.num_neighborhoods(); ++k) {
    NeighborhoodState state(graph, k, terms);
    std::vector<double> delta(state.dim());
    for (auto [i, j] : dyad_pairs(state.size(), state.directed())) {
      state.change_stats(i, j, delta);
      counts[{graph.size(k), state.edge(i, j) ? 1 : 0, delta}] += 1.0;
    }
  }
  std::vector<DesignRow> rows;
  rows.reserve(counts.size());
  for (const auto& [key, count] : counts) {
    const auto& [size, y, delta] = key;
    rows.push_back({size, static_cast<double>(y),
                    Eigen::Map<const Eigen::VectorXd>(delta.data(), static_cast<Eigen::Index>(delta.size())),
                    count});
  }
  return rows;
}

struct PseudoEval {
  double value = 0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd fisher;
};

PseudoEval evaluate_pseudo(const EtaMap& map, const Theta& theta, const std::vector<DesignRow>& rows,
                           const std::vector<std::size_t>& sizes, bool derivatives) {
  EtaCache cache(map, theta, sizes, derivatives);
  const auto q = theta.size();
  PseudoEval out;
  if (derivatives) {
    out.gradient = Eigen::VectorXd::Zero(q);
    out.fisher = Eigen::MatrixXd::Zero(q, q);
  }
  for (const auto& row : rows) {
    const double logit = cache.eta(row.size).dot(row.delta);
    out.value += row.count * (row.y * logit - softplus(logit));
    if (!derivatives) continue;
    const double p = logistic(logit);
    const Eigen::VectorXd u = cache.gradient(row.size).transpose() * row.delta;
    out.gradient += row.count * (row.y - p) * u;
    out.fisher.noalias() += row.count * p * (1 - p) * u * u.transpose();
  }
  return out;
}

std::vector<std::size_t> distinct_sizes(const std::vector<std::size_t>& sizes) {
  auto out = sizes;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Solves (A + ridge) x = b for a symmetric positive semidefinite A.
Eigen::VectorXd solve_psd(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double relative_ridge) {
  const double scale = std::max(a.diagonal().cwiseAbs().maxCoeff(), 1e-12);
  Eigen::MatrixXd m = a;
  m.diagonal().array() += relative_ridge * scale;
  return m.ldlt().solve(b);
}

}  // namespace

MpleResult mple(const MultilevelGraph& graph, const EtaMap& map, std::optional<Theta> start) {
  map.terms().validate(graph);
  const auto rows = pseudolikelihood_design(graph, map.terms());
  std::vector<std::size_t> sizes;
  for (const auto& r : rows) sizes.push_back(r.size);
  sizes = distinct_sizes(sizes);

  MpleResult result;
  Theta theta = start ? *start : default_start(map);
  map.check_domain(theta);
  constexpr double kDivergence = 25.0;
  constexpr std::size_t kMaxIterations = 200;
  auto current = evaluate_pseudo(map, theta, rows, sizes, true);
  for (std::size_t it = 0; it < kMaxIterations; ++it) {
    result.iterations = it + 1;
    const Eigen::VectorXd step = solve_psd(current.fisher, current.gradient, 1e-10);
    double alpha = 1.0;
    bool moved = false;
    for (int halving = 0; halving < 40; ++halving, alpha *= 0.5) {
      const Theta candidate = theta + alpha * step;
      if (!map.in_domain(candidate)) continue;
      const auto value = evaluate_pseudo(map, candidate, rows, sizes, false).value;
      if (value >= current.value - 1e-12 * std::abs(current.value)) {
        theta = candidate;
        moved = true;
        break;
      }
    }
    if (!moved) break;
    current = evaluate_pseudo(map, theta, rows, sizes, true);
    if (theta.cwiseAbs().maxCoeff() > kDivergence) break;
    // Stop on the step only: under separation the gradient vanishes while theta keeps growing.
    if ((alpha * step).cwiseAbs().maxCoeff() < 1e-10) break;
  }
  result.theta = theta;
  result.log_pseudolikelihood = current.value;
  result.boundary_suspect = !theta.allFinite() || theta.cwiseAbs().maxCoeff() > kDivergence;
  return result;
}

namespace {

double log_mean_exp(const Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  return m + std::log((v.array() - m).exp().mean());
}

struct RatioEval {
  double ratio = 0;
  double min_ess_fraction = 1;
};

// Per-neighborhood q_theta(X^(m)) = <eta_k(theta) - eta_k(theta_ref), s_k(X^(m))>.
RatioEval evaluate_ratio(const EtaCache& at, const EtaCache& ref, const StatisticVector& observed,
                         const SampleBatch& batch) {
  RatioEval out;
  for (std::size_t k = 0; k < batch.hoods.size(); ++k) {
    const auto n = batch.sizes[k];
    const Eigen::VectorXd diff = at.eta(n) - ref.eta(n);
    const Eigen::VectorXd q = batch.hoods[k].stats * diff;
    out.ratio += observed.per_hood[k].dot(diff) - log_mean_exp(q);
    const Eigen::ArrayXd w = (q.array() - q.maxCoeff()).exp();
    const double ess = w.sum() * w.sum() / w.square().sum();
    out.min_ess_fraction = std::min(out.min_ess_fraction, ess / static_cast<double>(q.size()));
  }
  return out;
}

void check_batch(const StatisticVector& observed, const SampleBatch& batch) {
  if (observed.per_hood.size() != batch.hoods.size() || observed.sizes != batch.sizes)
    throw UsageError("observed statistics and sample batch describe different partitions");
}

}  // namespace

double mc_loglik_ratio(const EtaMap& map, const Theta& theta, const Theta& theta_ref,
                       const StatisticVector& observed, const SampleBatch& batch) {
  check_batch(observed, batch);
  if (theta == theta_ref) return 0.0;
  const EtaCache at(map, theta, batch.sizes), ref(map, theta_ref, batch.sizes);
  return evaluate_ratio(at, ref, observed, batch).ratio;
}

ScoreInfo mc_score_info(const EtaMap& map, const Theta& theta, const Theta& theta_ref,
                        const StatisticVector& observed, const SampleBatch& batch,
                        double min_ess_fraction) {
  check_batch(observed, batch);
  const EtaCache at(map, theta, batch.sizes, true), ref(map, theta_ref, batch.sizes);
  const auto q = theta.size();
  ScoreInfo out;
  out.gradient = Eigen::VectorXd::Zero(q);
  out.info = Eigen::MatrixXd::Zero(q, q);
  for (std::size_t k = 0; k < batch.hoods.size(); ++k) {
    const auto n = batch.sizes[k];
    const auto& stats = batch.hoods[k].stats;
    const Eigen::VectorXd diff = at.eta(n) - ref.eta(n);
    const Eigen::VectorXd log_w = stats * diff;
    Eigen::VectorXd w = (log_w.array() - log_w.maxCoeff()).exp();
    w /= w.sum();
    const double ess = 1.0 / w.squaredNorm() / static_cast<double>(w.size());
    out.min_ess_fraction = std::min(out.min_ess_fraction, ess);
    const Eigen::RowVectorXd mean = w.transpose() * stats;
    const StatMatrix centered = stats.rowwise() - mean;
    const Eigen::MatrixXd cov = centered.transpose() * w.asDiagonal() * centered;
    const auto& jac = at.gradient(n);
    out.gradient += jac.transpose() * (observed.per_hood[k] - mean.transpose());
    out.info += jac.transpose() * cov * jac;
  }
  out.info = 0.5 * (out.info + out.info.transpose());
  if (out.min_ess_fraction < min_ess_fraction)
    throw LowEffectiveSampleSize("effective sample size fell to " + std::to_string(out.min_ess_fraction) +
                                 " of the draws");
  return out;
}

namespace {

// Coordinates where the observed projected statistic lies outside the
// Minkowski sum of per-neighborhood sampled ranges. Neighborhoods are
// independent, so any combination of their draws is a sampled graph.
bool outside_sampled_hull(const EtaCache& cache, const StatisticVector& observed,
                          const SampleBatch& batch, Eigen::Index q) {
  Eigen::VectorXd lo = Eigen::VectorXd::Zero(q), hi = Eigen::VectorXd::Zero(q),
                  obs = Eigen::VectorXd::Zero(q);
  for (std::size_t k = 0; k < batch.hoods.size(); ++k) {
    const auto& jac = cache.gradient(batch.sizes[k]);
    const Eigen::MatrixXd projected = batch.hoods[k].stats * jac;
    lo += projected.colwise().minCoeff().transpose();
    hi += projected.colwise().maxCoeff().transpose();
    obs += jac.transpose() * observed.per_hood[k];
  }
  for (Eigen::Index i = 0; i < q; ++i) {
    const double slack = 1e-9 * std::max(1.0, std::abs(obs[i]));
    if (obs[i] < lo[i] - slack || obs[i] > hi[i] + slack) return true;
  }
  return false;
}

// Maximizes the Monte Carlo loglikelihood ratio within the trust region
// around theta_ref. Returns the best admissible point found.
Theta inner_maximize(const EtaMap& map, const Theta& theta_ref, const StatisticVector& observed,
                     const SampleBatch& batch, const EstimatorConfig& config) {
  const EtaCache ref(map, theta_ref, batch.sizes);
  Theta theta = theta_ref;
  double value = 0.0;
  double radius = config.trust_radius;
  for (std::size_t it = 0; it < config.max_inner && radius > 1e-8; ++it) {
    ScoreInfo si;
    try {
      si = mc_score_info(map, theta, theta_ref, observed, batch, config.min_ess_fraction);
    } catch (const LowEffectiveSampleSize&) {
      break;
    }
    Theta candidate = theta + solve_psd(si.info, si.gradient, 1e-10);
    const Eigen::VectorXd offset = candidate - theta_ref;
    if (offset.norm() > radius) candidate = theta_ref + offset * (radius / offset.norm());
    if (!candidate.allFinite() || !map.in_domain(candidate)) {
      radius *= 0.5;
      continue;
    }
    const auto eval = evaluate_ratio(EtaCache(map, candidate, batch.sizes), ref, observed, batch);
    if (eval.ratio > value && eval.min_ess_fraction >= config.min_ess_fraction) {
      const double moved = (candidate - theta).norm();
      theta = candidate;
      value = eval.ratio;
      if (moved < 1e-10) break;
    } else {
      radius *= 0.5;
    }
  }
  return theta;
}

}  // namespace

EstimateResult mcmle(const MultilevelGraph& graph, const EtaMap& map, const EstimatorConfig& config,
                     std::optional<Theta> start) {
  config.validate();
  map.terms().validate(graph);
  const auto observed = compute_stats(graph, map.terms());
  const double dyads = std::max<double>(1.0, static_cast<double>(graph.num_dyads()));
  const auto q = static_cast<Eigen::Index>(map.num_parameters());

  EstimateResult result;
  if (start) {
    map.check_domain(*start);
    result.theta = *start;
  } else {
    const auto initial = mple(graph, map);
    result.theta = initial.theta;
    if (initial.boundary_suspect) {
      result.status = FitStatus::BoundarySuspect;
      result.message = "pseudolikelihood diverges; the MLE likely does not exist";
      return result;
    }
  }

  std::size_t outside_streak = 0;
  Theta theta = result.theta;
  for (std::size_t t = 1; t <= config.max_outer; ++t) {
    SamplerConfig sampler = config.sampler;
    sampler.draws = config.draws;
    sampler.seed = derive_seed(config.seed, {t});
    const auto batch = sample_batch(map, theta, graph, sampler);

    const auto si = mc_score_info(map, theta, theta, observed, batch, 0.0);
    IterationRecord record;
    record.iteration = t;
    record.theta = theta;
    record.score_norm = si.gradient.norm() / dyads;

    const EtaCache cache(map, theta, batch.sizes, true);
    record.outside_hull = outside_sampled_hull(cache, observed, batch, q);
    outside_streak = record.outside_hull ? outside_streak + 1 : 0;

    const Theta next = inner_maximize(map, theta, observed, batch, config);
    record.step_norm = (next - theta).norm();
    record.min_ess_fraction =
        evaluate_ratio(EtaCache(map, next, batch.sizes), EtaCache(map, theta, batch.sizes), observed, batch)
            .min_ess_fraction;
    result.trace.push_back(record);
    result.iterations = t;
    result.score_norm = record.score_norm;
    result.step_norm = record.step_norm;

    if (outside_streak >= config.boundary_patience) {
      result.theta = next;
      result.status = FitStatus::BoundarySuspect;
      result.message = "observed statistics outside the sampled range for " +
                       std::to_string(outside_streak) + " consecutive iterations";
      return result;
    }

    // Monte Carlo noise floors: sd of the score is ~ sqrt(tr(I)/M), of the
    // step ~ sqrt(tr(I^-1)/M).
    const double m = static_cast<double>(config.draws);
    const double score_floor = config.noise_z * std::sqrt(std::max(0.0, si.info.trace()) / m) / dyads;
    const Eigen::MatrixXd inverse = si.info.ldlt().solve(Eigen::MatrixXd::Identity(q, q));
    const double inv_trace = inverse.allFinite() ? std::max(0.0, inverse.trace()) : 0.0;
    const double step_floor = config.noise_z * std::sqrt(inv_trace / m);

    theta = next;
    result.theta = next;
    if (!record.outside_hull && record.score_norm < config.tol_score + score_floor &&
        record.step_norm < config.tol_step + step_floor) {
      result.status = FitStatus::Converged;
      return result;
    }
  }
  result.status = FitStatus::MaxIterations;
  result.message = "no convergence within " + std::to_string(config.max_outer) + " iterations";
  return result;
}

BootstrapResult bootstrap_se(const EtaMap& map, const Theta& theta_hat,
                             const MultilevelGraph& partition, std::size_t replicates,
                             const EstimatorConfig& config, const SamplerConfig& simulation) {
  if (replicates < 2) throw UsageError("the bootstrap needs at least two replicates");
  map.check_domain(theta_hat);
  std::vector<std::optional<Theta>> fits(replicates);
  parallel_for(replicates, [&](std::size_t b) {
    SamplerConfig sim = simulation;
    sim.seed = derive_seed(simulation.seed, {b});
    EstimatorConfig est = config;
    est.seed = derive_seed(config.seed, {b});
    try {
      const auto data = simulate_graph(map, theta_hat, partition, sim);
      const auto fit = mcmle(data, map, est);
      if (fit.status != FitStatus::BoundarySuspect) fits[b] = fit.theta;
    } catch (const EstimationError&) {
    } catch (const DomainError&) {
    }
  });

  BootstrapResult out;
  for (auto& f : fits) {
    if (f)
      out.replicates.push_back(*f);
    else
      ++out.failures;
  }
  if (static_cast<double>(out.failures) > 0.2 * static_cast<double>(replicates))
    throw EstimationError(std::to_string(out.failures) + " of " + std::to_string(replicates) +
                          " bootstrap refits failed");
  if (out.replicates.size() < 2) throw EstimationError("fewer than two successful bootstrap refits");
  const auto q = theta_hat.size();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(q);
  for (const auto& t : out.replicates) mean += t;
  mean /= static_cast<double>(out.replicates.size());
  Eigen::VectorXd ss = Eigen::VectorXd::Zero(q);
  for (const auto& t : out.replicates) ss += (t - mean).cwiseAbs2();
  out.se = (ss / static_cast<double>(out.replicates.size() - 1)).cwiseSqrt();
  return out;
}

}  // namespace mlergm
