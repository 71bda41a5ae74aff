// Copyright 2026 The mlergm Authors
// SPDX-License-Identifier: Apache-2.0

#include "mlergm/model.hpp"

#include <algorithm>
#include <cmath>

#include "mlergm/errors.hpp"

namespace mlergm {

SizeBuckets::SizeBuckets(std::vector<std::size_t> thresholds) : thresholds_(std::move(thresholds)) {
  if (!std::is_sorted(thresholds_.begin(), thresholds_.end()) ||
      std::adjacent_find(thresholds_.begin(), thresholds_.end()) != thresholds_.end())
    throw UsageError("size bucket thresholds must be strictly increasing");
}

std::size_t SizeBuckets::bucket(std::size_t size) const {
  return static_cast<std::size_t>(
      std::upper_bound(thresholds_.begin(), thresholds_.end(), size) - thresholds_.begin());
}

double Coefficient::value(const Theta& theta, std::size_t bucket) const {
  double v = theta[static_cast<Eigen::Index>(base)];
  if (bucket < deviations.size() && deviations[bucket])
    v += theta[static_cast<Eigen::Index>(*deviations[bucket])];
  return v;
}

void Coefficient::add_gradient(double weight, std::size_t bucket,
                               Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row) const {
  row[static_cast<Eigen::Index>(base)] += weight;
  if (bucket < deviations.size() && deviations[bucket])
    row[static_cast<Eigen::Index>(*deviations[bucket])] += weight;
}

EtaMap::EtaMap(TermSet terms, std::vector<TermMapping> mappings,
               std::vector<std::string> parameter_names, SizeBuckets buckets)
    : terms_(std::move(terms)),
      mappings_(std::move(mappings)),
      names_(std::move(parameter_names)),
      buckets_(std::move(buckets)) {
  if (mappings_.size() != terms_.num_terms())
    throw UsageError("every term needs exactly one parameter mapping");
  const auto q = names_.size();
  auto check_coef = [&](const Coefficient& c) {
    if (c.base >= q) throw UsageError("mapping refers to an unknown parameter");
    if (c.deviations.size() > buckets_.count())
      throw UsageError("more deviation coordinates than size buckets");
    for (const auto& d : c.deviations)
      if (d && *d >= q) throw UsageError("deviation refers to an unknown parameter");
  };
  for (std::size_t t = 0; t < mappings_.size(); ++t) {
    const bool esp = terms_.terms()[t].kind == TermKind::Esp;
    if (esp != (mappings_[t].kind == MappingKind::Geometric))
      throw UsageError("esp terms take geometric weights and scalar terms take linear coefficients");
    check_coef(mappings_[t].coef);
    if (esp) check_coef(mappings_[t].decay);
  }
}

EtaMap EtaMap::canonical(TermSet terms) {
  std::vector<TermMapping> mappings;
  std::vector<std::string> names;
  for (std::size_t t = 0; t < terms.num_terms(); ++t) {
    TermMapping m;
    m.coef.base = t;
    mappings.push_back(m);
    names.push_back(terms.terms()[t].label());
  }
  return EtaMap(std::move(terms), std::move(mappings), std::move(names));
}

void EtaMap::check_domain(const Theta& theta) const {
  if (static_cast<std::size_t>(theta.size()) != names_.size())
    throw DomainError("parameter vector has " + std::to_string(theta.size()) + " coordinates, model has " +
                      std::to_string(names_.size()));
  if (!theta.allFinite()) throw DomainError("parameter vector is not finite");
  for (const auto& m : mappings_) {
    if (m.kind != MappingKind::Geometric) continue;
    for (std::size_t b = 0; b < buckets_.count(); ++b) {
      const double decay = m.decay.value(theta, b);
      if (!(decay > kMinDecay))
        throw DomainError("geometric decay must exceed 1/2, got " + std::to_string(decay));
    }
  }
}

bool EtaMap::in_domain(const Theta& theta) const {
  try {
    check_domain(theta);
    return true;
  } catch (const DomainError&) {
    return false;
  }
}

Eigen::VectorXd EtaMap::eta(const Theta& theta, std::size_t size) const {
  check_domain(theta);
  const auto bucket = buckets_.bucket(size);
  Eigen::VectorXd out(terms_.dim(size));
  for (std::size_t t = 0; t < mappings_.size(); ++t) {
    const auto off = terms_.offset(t, size);
    const auto& m = mappings_[t];
    const double a = m.coef.value(theta, bucket);
    if (m.kind == MappingKind::Linear) {
      out[off] = a;
      continue;
    }
    const double b = m.decay.value(theta, bucket);
    const double r = 1.0 - 1.0 / b;
    double power = 1.0;
    for (std::size_t i = 1; i <= terms_.block_size(t, size); ++i) {
      power *= r;
      out[off + i - 1] = a * b * (1.0 - power);
    }
  }
  return out;
}

Eigen::MatrixXd EtaMap::eta_gradient(const Theta& theta, std::size_t size) const {
  check_domain(theta);
  const auto bucket = buckets_.bucket(size);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(terms_.dim(size), theta.size());
  for (std::size_t t = 0; t < mappings_.size(); ++t) {
    const auto off = terms_.offset(t, size);
    const auto& m = mappings_[t];
    if (m.kind == MappingKind::Linear) {
      m.coef.add_gradient(1.0, bucket, out.row(off));
      continue;
    }
    const double a = m.coef.value(theta, bucket);
    const double b = m.decay.value(theta, bucket);
    const double r = 1.0 - 1.0 / b;
    double prev = 1.0;  // r^(i-1)
    for (std::size_t i = 1; i <= terms_.block_size(t, size); ++i) {
      const double power = prev * r;
      const auto row = off + i - 1;
      m.coef.add_gradient(b * (1.0 - power), bucket, out.row(row));
      m.decay.add_gradient(a * (1.0 - power - static_cast<double>(i) / b * prev), bucket,
                           out.row(row));
      prev = power;
    }
  }
  return out;
}

double log_unnormalized(const EtaMap& map, const Theta& theta, const StatisticVector& stats) {
  EtaCache cache(map, theta, stats.sizes);
  double total = 0.0;
  for (std::size_t k = 0; k < stats.per_hood.size(); ++k)
    total += cache.eta(stats.sizes[k]).dot(stats.per_hood[k]);
  return total;
}

double log_unnormalized(const EtaMap& map, const Theta& theta, const MultilevelGraph& graph) {
  return log_unnormalized(map, theta, compute_stats(graph, map.terms()));
}

double conditional_edge_logit(const EtaMap& map, const Theta& theta, const MultilevelGraph& graph,
                              const Dyad& d) {
  const Dyad c = graph.canonical(d);
  map.terms().validate(graph);
  NeighborhoodState state(graph, c.hood, map.terms());
  Eigen::VectorXd delta(state.dim());
  state.change_stats(c.tail, c.head, std::span<double>(delta.data(), delta.size()));
  return map.eta(theta, graph.size(c.hood)).dot(delta);
}

EtaCache::EtaCache(const EtaMap& map, const Theta& theta, const std::vector<std::size_t>& sizes,
                   bool with_gradient) {
  const std::size_t n_max = sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end());
  eta_.resize(n_max + 1);
  grad_.resize(n_max + 1);
  for (auto n : sizes) {
    if (eta_[n]) continue;
    eta_[n] = map.eta(theta, n);
    if (with_gradient) grad_[n] = map.eta_gradient(theta, n);
  }
}

}  // namespace mlergm
