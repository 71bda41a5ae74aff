// Copyright 2026 The mlergm Authors
// SPDX-License-Identifier: Apache-2.0

#include "mlergm/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>

namespace mlergm {

void EnumerationBudget::check(std::size_t dyads) const {
  if (dyads >= 63 || (std::uint64_t{1} << dyads) > max_states)
    throw BudgetExceeded("enumerating 2^" + std::to_string(dyads) + " graphs exceeds the budget of " +
                         std::to_string(max_states) + " states");
}

namespace {

// Visits every graph on neighborhood k in Gray-code order, passing the
// dyad bitmask and the statistic vector of that graph.
template <typename Visit>
void enumerate_graphs(const MultilevelGraph& graph, std::size_t k, const TermSet& terms,
                      const EnumerationBudget& budget, Visit&& visit) {
  terms.validate(graph);
  const auto n = graph.size(k);
  const auto dyads = dyad_pairs(n, graph.directed());
  budget.check(dyads.size());
  NeighborhoodState state(graph, k, terms);
  state.assign(AdjacencyMatrix(n, graph.directed()));
  std::vector<double> stats(state.dim(), 0.0), delta(state.dim());
  std::uint64_t mask = 0;
  visit(mask, stats);
  const std::uint64_t total = std::uint64_t{1} << dyads.size();
  for (std::uint64_t t = 1; t < total; ++t) {
    const auto b = static_cast<std::size_t>(std::countr_zero(t));
    const auto [i, j] = dyads[b];
    state.change_stats(i, j, delta);
    const double sign = state.edge(i, j) ? -1.0 : 1.0;
    for (std::size_t c = 0; c < stats.size(); ++c) stats[c] += sign * delta[c];
    state.toggle(i, j);
    mask ^= std::uint64_t{1} << b;
    visit(mask, stats);
  }
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::vector<StatClass> enumerate_stat_classes(const MultilevelGraph& graph, std::size_t k,
                                              const TermSet& terms, const EnumerationBudget& budget) {
  std::map<std::vector<double>, double> counts;
  enumerate_graphs(graph, k, terms, budget,
                   [&](std::uint64_t, const std::vector<double>& s) { counts[s] += 1.0; });
  std::vector<StatClass> out;
  out.reserve(counts.size());
  for (const auto& [s, c] : counts) out.push_back({to_vector(s), c});
  return out;
}

double log_partition(const std::vector<StatClass>& classes, const Eigen::VectorXd& eta) {
  double shift = -std::numeric_limits<double>::infinity();
  std::vector<double> logs(classes.size());
  for (std::size_t c = 0; c < classes.size(); ++c) {
    logs[c] = std::log(classes[c].count) + eta.dot(classes[c].stats);
    shift = std::max(shift, logs[c]);
  }
  double sum = 0;
  for (double l : logs) sum += std::exp(l - shift);
  return shift + std::log(sum);
}

double exact_psi(const EtaMap& map, const Theta& theta, const MultilevelGraph& graph, std::size_t k,
                 const EnumerationBudget& budget) {
  map.check_domain(theta);
  return log_partition(enumerate_stat_classes(graph, k, map.terms(), budget), map.eta(theta, graph.size(k)));
}

ExactMoments exact_moments(const std::vector<StatClass>& classes, const Eigen::VectorXd& eta) {
  ExactMoments out;
  out.psi = log_partition(classes, eta);
  const auto d = eta.size();
  out.mean = Eigen::VectorXd::Zero(d);
  std::vector<double> p(classes.size());
  for (std::size_t c = 0; c < classes.size(); ++c) {
    p[c] = std::exp(std::log(classes[c].count) + eta.dot(classes[c].stats) - out.psi);
    out.mean += p[c] * classes[c].stats;
  }
  out.cov = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const Eigen::VectorXd r = classes[c].stats - out.mean;
    out.cov.noalias() += p[c] * r * r.transpose();
  }
  return out;
}

std::vector<double> exact_state_distribution(const EtaMap& map, const Theta& theta,
                                             const MultilevelGraph& graph, std::size_t k,
                                             const EnumerationBudget& budget) {
  map.check_domain(theta);
  const Eigen::VectorXd eta = map.eta(theta, graph.size(k));
  std::vector<double> logp;
  enumerate_graphs(graph, k, map.terms(), budget, [&](std::uint64_t mask, const std::vector<double>& s) {
    if (logp.empty()) logp.resize(std::size_t{1} << dyad_pairs(graph.size(k), graph.directed()).size());
    logp[mask] = eta.dot(to_vector(s));
  });
  double shift = -std::numeric_limits<double>::infinity();
  for (double l : logp) shift = std::max(shift, l);
  double sum = 0;
  for (double& l : logp) sum += (l = std::exp(l - shift));
  for (double& l : logp) l /= sum;
  return logp;
}

double exact_loglik(const EtaMap& map, const Theta& theta, const MultilevelGraph& graph,
                    const EnumerationBudget& budget) {
  map.check_domain(theta);
  const auto observed = compute_stats(graph, map.terms());
  double value = 0;
  for (std::size_t k = 0; k < graph.num_neighborhoods(); ++k) {
    const auto eta = map.eta(theta, graph.size(k));
    value += eta.dot(observed.per_hood[k]) -
             log_partition(enumerate_stat_classes(graph, k, map.terms(), budget), eta);
  }
  return value;
}

namespace {

struct ExactFit {
  double loglik = 0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd info;
};

ExactFit evaluate_exact(const EtaMap& map, const Theta& theta, const StatisticVector& observed,
                        const std::vector<std::vector<StatClass>>& classes, bool derivatives) {
  const auto q = theta.size();
  ExactFit out;
  if (derivatives) {
    out.gradient = Eigen::VectorXd::Zero(q);
    out.info = Eigen::MatrixXd::Zero(q, q);
  }
  for (std::size_t k = 0; k < classes.size(); ++k) {
    const auto n = observed.sizes[k];
    const Eigen::VectorXd eta = map.eta(theta, n);
    if (!derivatives) {
      out.loglik += eta.dot(observed.per_hood[k]) - log_partition(classes[k], eta);
      continue;
    }
    const auto m = exact_moments(classes[k], eta);
    const Eigen::MatrixXd jac = map.eta_gradient(theta, n);
    out.loglik += eta.dot(observed.per_hood[k]) - m.psi;
    out.gradient += jac.transpose() * (observed.per_hood[k] - m.mean);
    out.info += jac.transpose() * m.cov * jac;
  }
  return out;
}

bool all_linear(const EtaMap& map) {
  for (const auto& m : map.mappings())
    if (m.kind != MappingKind::Linear) return false;
  return true;
}

// With a linear map the theta-space statistic sum_k J_k^T s_k is sufficient;
// a coordinate at its attainable minimum or maximum rules out an MLE.
void check_linear_support(const EtaMap& map, const Theta& theta, const StatisticVector& observed,
                          const std::vector<std::vector<StatClass>>& classes) {
  const auto q = theta.size();
  Eigen::VectorXd lo = Eigen::VectorXd::Zero(q), hi = Eigen::VectorXd::Zero(q), obs = Eigen::VectorXd::Zero(q);
  for (std::size_t k = 0; k < classes.size(); ++k) {
    const Eigen::MatrixXd jac = map.eta_gradient(theta, observed.sizes[k]);
    Eigen::VectorXd klo = Eigen::VectorXd::Constant(q, std::numeric_limits<double>::infinity());
    Eigen::VectorXd khi = -klo;
    for (const auto& c : classes[k]) {
      const Eigen::VectorXd t = jac.transpose() * c.stats;
      klo = klo.cwiseMin(t);
      khi = khi.cwiseMax(t);
    }
    lo += klo;
    hi += khi;
    obs += jac.transpose() * observed.per_hood[k];
  }
  for (Eigen::Index i = 0; i < q; ++i)
    if (obs[i] <= lo[i] + 1e-9 || obs[i] >= hi[i] - 1e-9)
      throw MleNonexistence("observed statistic for '" + map.parameter_names()[static_cast<std::size_t>(i)] +
                            "' is at the edge of its support; the MLE does not exist");
}

}  // namespace

ExactMleResult exact_mle(const MultilevelGraph& graph, const EtaMap& map, std::optional<Theta> start,
                         const EnumerationBudget& budget) {
  const auto observed = compute_stats(graph, map.terms());
  std::vector<std::vector<StatClass>> classes;
  for (std::size_t k = 0; k < graph.num_neighborhoods(); ++k)
    classes.push_back(enumerate_stat_classes(graph, k, map.terms(), budget));

  Theta theta = start ? *start : Theta::Zero(static_cast<Eigen::Index>(map.num_parameters()));
  if (!start)
    for (const auto& m : map.mappings())
      if (m.kind == MappingKind::Geometric) theta[static_cast<Eigen::Index>(m.decay.base)] = 1.0;
  map.check_domain(theta);
  if (all_linear(map)) check_linear_support(map, theta, observed, classes);

  constexpr double kDivergence = 30.0;
  const double dyads = std::max<double>(1.0, static_cast<double>(graph.num_dyads()));
  ExactMleResult result;
  auto current = evaluate_exact(map, theta, observed, classes, true);
  for (std::size_t it = 0; it < 500; ++it) {
    result.iterations = it + 1;
    if (current.gradient.norm() < 1e-12 * dyads) break;
    Eigen::MatrixXd info = current.info;
    info.diagonal().array() += 1e-12 * std::max(1.0, info.diagonal().maxCoeff());
    const Eigen::VectorXd step = info.ldlt().solve(current.gradient);
    double alpha = 1.0;
    bool moved = false;
    for (int h = 0; h < 60; ++h, alpha *= 0.5) {
      const Theta candidate = theta + alpha * step;
      if (!candidate.allFinite() || !map.in_domain(candidate)) continue;
      if (evaluate_exact(map, candidate, observed, classes, false).loglik >= current.loglik - 1e-13 * dyads) {
        theta = candidate;
        moved = true;
        break;
      }
    }
    if (!moved) break;
    current = evaluate_exact(map, theta, observed, classes, true);
    if (theta.cwiseAbs().maxCoeff() > kDivergence)
      throw MleNonexistence("exact likelihood increases without bound; the MLE does not exist");
    if ((alpha * step).norm() < 1e-14) break;
  }
  result.theta = theta;
  result.gradient = current.gradient;
  return result;
}

double bernoulli_transitive_mean(double p, std::size_t n) {
  if (n < 3) throw UsageError("transitive edges need at least three nodes");
  if (!(p >= 0 && p <= 1)) throw UsageError("edge probability must lie in [0, 1]");
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  return p * (1.0 - std::pow(1.0 - p * p, static_cast<double>(n - 2))) * pairs;
}

std::pair<double, double> conditional_bounds(double theta1, double theta2, std::size_t n) {
  return {logistic(theta1), logistic(theta1 + theta2 * (2.0 * static_cast<double>(n) - 3.0))};
}

}  // namespace mlergm
