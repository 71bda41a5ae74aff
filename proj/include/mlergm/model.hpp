// Copyright 2026 The mlergm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "mlergm/graph.hpp"
#include "mlergm/statistics.hpp"

namespace mlergm {

/// Parameter vector theta. Coordinates are named by the EtaMap.
using Theta = Eigen::VectorXd;

/// Smallest admissible decay of a geometrically weighted term; the domain is
/// the open half line above one half.
inline constexpr double kMinDecay = 0.5 + 1e-9;

/// Assigns neighborhoods to size buckets by closed-open thresholds on |A_k|:
/// bucket b covers [thresholds[b-1], thresholds[b]).
class SizeBuckets {
 public:
  SizeBuckets() = default;
  explicit SizeBuckets(std::vector<std::size_t> thresholds);

  std::size_t count() const { return thresholds_.size() + 1; }
  std::size_t bucket(std::size_t size) const;
  const std::vector<std::size_t>& thresholds() const { return thresholds_; }

 private:
  std::vector<std::size_t> thresholds_;
};

/// theta[base] plus the deviation coordinate of the neighborhood's size bucket,
/// if that bucket has one.
struct Coefficient {
  std::size_t base = 0;
  std::vector<std::optional<std::size_t>> deviations;  // indexed by bucket

  double value(const Theta& theta, std::size_t bucket) const;
  void add_gradient(double weight, std::size_t bucket, Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row) const;
};

enum class MappingKind { Linear, Geometric };

/// How one term's natural parameters are produced from theta.
///   Linear:    eta = coef(theta)                       (scalar terms)
///   Geometric: eta_i = a * b * (1 - (1 - 1/b)^i),      (shared-partner bins)
///              a = coef(theta), b = decay(theta), i = 1..|A_k|-2
struct TermMapping {
  MappingKind kind = MappingKind::Linear;
  Coefficient coef;
  Coefficient decay;  // Geometric only
};

/// The map theta -> eta_k(theta) for every neighborhood size.
class EtaMap {
 public:
  EtaMap() = default;
  EtaMap(TermSet terms, std::vector<TermMapping> mappings, std::vector<std::string> parameter_names,
         SizeBuckets buckets = {});

  /// One identity-mapped coordinate per scalar term. Esp terms are not allowed.
  static EtaMap canonical(TermSet terms);

  const TermSet& terms() const { return terms_; }
  const std::vector<TermMapping>& mappings() const { return mappings_; }
  const std::vector<std::string>& parameter_names() const { return names_; }
  const SizeBuckets& buckets() const { return buckets_; }
  std::size_t num_parameters() const { return names_.size(); }

  /// Throws DomainError if a geometric decay is not above one half for any bucket.
  void check_domain(const Theta& theta) const;
  bool in_domain(const Theta& theta) const;

  /// Natural parameters of a neighborhood with `size` nodes.
  Eigen::VectorXd eta(const Theta& theta, std::size_t size) const;
  /// dim(size) x q Jacobian d eta / d theta.
  Eigen::MatrixXd eta_gradient(const Theta& theta, std::size_t size) const;

 private:
  TermSet terms_;
  std::vector<TermMapping> mappings_;
  std::vector<std::string> names_;
  SizeBuckets buckets_;
};

/// Sum over neighborhoods of <eta_k(theta), s_k(x_k)>, without the log normalizer.
double log_unnormalized(const EtaMap& map, const Theta& theta, const MultilevelGraph& graph);
double log_unnormalized(const EtaMap& map, const Theta& theta, const StatisticVector& stats);

/// <eta_k(theta), Delta_ij s_k(x)>; the full conditional of the dyad is the
/// logistic function of this value.
double conditional_edge_logit(const EtaMap& map, const Theta& theta, const MultilevelGraph& graph,
                              const Dyad& d);

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// eta_k (and optionally its Jacobian) evaluated once per distinct
/// neighborhood size. Immutable after construction.
class EtaCache {
 public:
  EtaCache(const EtaMap& map, const Theta& theta, const std::vector<std::size_t>& sizes,
           bool with_gradient = false);
  const Eigen::VectorXd& eta(std::size_t size) const { return eta_.at(size).value(); }
  const Eigen::MatrixXd& gradient(std::size_t size) const { return grad_.at(size).value(); }

 private:
  std::vector<std::optional<Eigen::VectorXd>> eta_;
  std::vector<std::optional<Eigen::MatrixXd>> grad_;
};

}  // namespace mlergm
