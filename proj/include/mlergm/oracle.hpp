// Copyright 2026 The mlergm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mlergm/errors.hpp"
#include "mlergm/graph.hpp"
#include "mlergm/model.hpp"
#include "mlergm/statistics.hpp"

namespace mlergm {

/// Upper limit on the number of graphs enumerated for one neighborhood.
struct EnumerationBudget {
  std::uint64_t max_states = std::uint64_t{1} << 24;

  /// Throws BudgetExceeded if 2^dyads exceeds the limit.
  void check(std::size_t dyads) const;
};

/// A distinct statistic vector and the number of graphs attaining it.
struct StatClass {
  Eigen::VectorXd stats;
  double count = 0;
};

/// All distinct s_k(x) over the 2^dyads graphs on neighborhood k, with
/// multiplicities. Classes are sorted lexicographically by statistic.
std::vector<StatClass> enumerate_stat_classes(const MultilevelGraph& graph, std::size_t k,
                                              const TermSet& terms, const EnumerationBudget& budget = {});

/// log sum_s count(s) exp<eta, s>.
double log_partition(const std::vector<StatClass>& classes, const Eigen::VectorXd& eta);

/// Log normalizer psi_k(theta) of neighborhood k.
double exact_psi(const EtaMap& map, const Theta& theta, const MultilevelGraph& graph, std::size_t k,
                 const EnumerationBudget& budget = {});

struct ExactMoments {
  double psi = 0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

ExactMoments exact_moments(const std::vector<StatClass>& classes, const Eigen::VectorXd& eta);

/// Probability of every graph on neighborhood k. Entry `mask` is the graph
/// whose edges are the dyads dyad_pairs(n, directed)[b] with bit b set.
std::vector<double> exact_state_distribution(const EtaMap& map, const Theta& theta,
                                             const MultilevelGraph& graph, std::size_t k,
                                             const EnumerationBudget& budget = {});

/// Exact loglikelihood sum_k [<eta_k, s_k(x)> - psi_k].
double exact_loglik(const EtaMap& map, const Theta& theta, const MultilevelGraph& graph,
                    const EnumerationBudget& budget = {});

/// The observed statistic lies on the boundary of its support, so the MLE does not exist.
class MleNonexistence : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

struct ExactMleResult {
  Theta theta;
  Eigen::VectorXd gradient;
  std::size_t iterations = 0;
};

/// Newton's method on the exact loglikelihood. Throws MleNonexistence.
ExactMleResult exact_mle(const MultilevelGraph& graph, const EtaMap& map, std::optional<Theta> start = {},
                         const EnumerationBudget& budget = {});

/// Expected number of transitive edges in a Bernoulli(p) graph on n nodes:
/// p (1 - (1 - p^2)^(n-2)) C(n, 2).
double bernoulli_transitive_mean(double p, std::size_t n);

/// Envelope [logistic(theta1), logistic(theta1 + theta2 (2n - 3))] of the
/// full conditional edge probabilities under the edges + transitive model.
std::pair<double, double> conditional_bounds(double theta1, double theta2, std::size_t n);

}  // namespace mlergm
