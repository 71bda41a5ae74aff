// Copyright 2026 The mlergm Authors
// SPDX-License-Identifier: Apache-2.0

#include "mlergm/statistics.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "mlergm/errors.hpp"

namespace mlergm {

std::string Term::label() const {
  switch (kind) {
    case TermKind::Edges: return "edges";
    case TermKind::Mutual: return "mutual";
    case TermKind::NodeMatch: return "nodematch." + attribute;
    case TermKind::Transitive: return "transitive";
    case TermKind::Esp: return "esp";
  }
  return "?";
}

std::size_t TermSet::block_size(std::size_t term, std::size_t n) const {
  return terms_[term].kind == TermKind::Esp ? shared_partner_bins(n) : 1;
}

std::size_t TermSet::offset(std::size_t term, std::size_t n) const {
  std::size_t off = 0;
  for (std::size_t t = 0; t < term; ++t) off += block_size(t, n);
  return off;
}

std::size_t TermSet::dim(std::size_t n) const { return offset(terms_.size(), n); }

std::vector<std::string> TermSet::names(std::size_t n) const {
  std::vector<std::string> out;
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    if (terms_[t].kind == TermKind::Esp) {
      for (std::size_t i = 1; i <= shared_partner_bins(n); ++i)
        out.push_back("esp." + std::to_string(i));
    } else {
      out.push_back(terms_[t].label());
    }
  }
  return out;
}

void TermSet::validate(const MultilevelGraph& graph) const {
  for (const auto& term : terms_) {
    if (term.kind == TermKind::Mutual && !graph.directed())
      throw DataError("the mutual term requires a directed graph");
    if (term.kind == TermKind::NodeMatch) {
      for (const auto& h : graph.neighborhoods()) {
        if (!h.attributes.contains(term.attribute))
          throw DataError("nodematch attribute '" + term.attribute + "' missing on nodes");
      }
    }
  }
}

Eigen::VectorXd StatisticVector::aggregate(const TermSet& terms) const {
  const std::size_t n_max = sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(terms.dim(n_max));
  for (std::size_t k = 0; k < per_hood.size(); ++k)
    accumulate_into(terms, sizes[k], per_hood[k], n_max, out);
  return out;
}

void accumulate_into(const TermSet& terms, std::size_t from, const Eigen::VectorXd& local,
                     std::size_t to, Eigen::VectorXd& out) {
  for (std::size_t t = 0; t < terms.num_terms(); ++t) {
    const auto src = terms.offset(t, from);
    const auto dst = terms.offset(t, to);
    for (std::size_t i = 0; i < terms.block_size(t, from); ++i) out[dst + i] += local[src + i];
  }
}

namespace {

std::vector<int> match_codes(const Neighborhood& h, const std::string& attribute) {
  const auto& values = h.attributes.at(attribute);
  std::map<std::string, int> codes;
  std::vector<int> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(codes.emplace(v, static_cast<int>(codes.size())).first->second);
  return out;
}

// Shared partners of an ordered pair per the directedness rule.
int count_partners(const AdjacencyMatrix& x, std::size_t i, std::size_t j) {
  int c = 0;
  for (std::size_t h = 0; h < x.size(); ++h) {
    if (h == i || h == j) continue;
    c += x.directed() ? (x(i, h) && x(h, j)) : (x(i, h) && x(j, h));
  }
  return c;
}

}  // namespace

Eigen::VectorXd neighborhood_stats(const MultilevelGraph& graph, std::size_t k,
                                   const TermSet& terms) {
  const auto& x = graph.adjacency(k);
  const auto n = x.size();
  const bool directed = graph.directed();
  Eigen::VectorXd s = Eigen::VectorXd::Zero(terms.dim(n));
  for (std::size_t t = 0; t < terms.num_terms(); ++t) {
    const auto& term = terms.terms()[t];
    const auto off = terms.offset(t, n);
    std::vector<int> codes;
    if (term.kind == TermKind::NodeMatch) codes = match_codes(graph.neighborhood(k), term.attribute);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = directed ? 0 : i + 1; j < n; ++j) {
        if (i == j || !x(i, j)) continue;
        switch (term.kind) {
          case TermKind::Edges: s[off] += 1; break;
          case TermKind::Mutual:
            if (i < j && x(j, i)) s[off] += 1;
            break;
          case TermKind::NodeMatch:
            if (codes[i] == codes[j]) s[off] += 1;
            break;
          case TermKind::Transitive: {
            int best = 0;
            for (std::size_t h = 0; h < n; ++h) {
              if (h == i || h == j) continue;
              best = std::max(best, directed ? int(x(i, h) && x(h, j)) : int(x(i, h) && x(j, h)));
            }
            s[off] += best;
            break;
          }
          case TermKind::Esp: {
            const int c = count_partners(x, i, j);
            if (c >= 1) s[off + c - 1] += 1;
            break;
          }
        }
      }
    }
  }
  return s;
}

StatisticVector compute_stats(const MultilevelGraph& graph, const TermSet& terms) {
  terms.validate(graph);
  StatisticVector out;
  out.sizes.reserve(graph.num_neighborhoods());
  out.per_hood.reserve(graph.num_neighborhoods());
  for (std::size_t k = 0; k < graph.num_neighborhoods(); ++k) {
    out.sizes.push_back(graph.size(k));
    out.per_hood.push_back(neighborhood_stats(graph, k, terms));
  }
  return out;
}

NeighborhoodState::NeighborhoodState(const MultilevelGraph& graph, std::size_t k,
                                     const TermSet& terms)
    : adjacency_(graph.adjacency(k)), terms_(terms) {
  const auto n = adjacency_.size();
  dim_ = terms.dim(n);
  offsets_.resize(terms.num_terms());
  match_codes_.resize(terms.num_terms());
  for (std::size_t t = 0; t < terms.num_terms(); ++t) {
    offsets_[t] = terms.offset(t, n);
    if (terms.terms()[t].kind == TermKind::NodeMatch)
      match_codes_[t] = match_codes(graph.neighborhood(k), terms.terms()[t].attribute);
  }
  recount();
}

void NeighborhoodState::assign(const AdjacencyMatrix& adjacency) {
  adjacency_ = adjacency;
  recount();
}

void NeighborhoodState::recount() {
  const auto n = size();
  partners_.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) partners_[i * n + j] = count_partners(adjacency_, i, j);
}

void NeighborhoodState::change_stats(std::size_t i, std::size_t j, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  const auto n = size();
  const int e = adjacency_(i, j) ? 1 : 0;
  const std::uint8_t* row_i = adjacency_.row(i);
  const std::uint8_t* row_j = adjacency_.row(j);
  for (std::size_t t = 0; t < terms_.num_terms(); ++t) {
    const auto off = offsets_[t];
    switch (terms_.terms()[t].kind) {
      case TermKind::Edges: out[off] = 1; break;
      case TermKind::Mutual: out[off] = adjacency_(j, i) ? 1 : 0; break;
      case TermKind::NodeMatch:
        out[off] = match_codes_[t][i] == match_codes_[t][j] ? 1 : 0;
        break;
      case TermKind::Transitive: {
        // The dyad itself, plus every adjacent edge that gains its first partner.
        // Diagonal cells are zero, so h = i and h = j drop out of the sums.
        int d = partners(i, j) > 0 ? 1 : 0;
        const std::int32_t* p_i = partners_.data() + i * n;
        if (directed()) {
          for (std::size_t h = 0; h < n; ++h) {
            d += (row_i[h] & row_j[h]) & (p_i[h] == e);                                  // i->h via i->j->h
            d += (adjacency_(h, j) & adjacency_(h, i)) & (partners_[h * n + j] == e);  // h->j via h->i->j
          }
        } else {
          const std::int32_t* p_j = partners_.data() + j * n;
          for (std::size_t h = 0; h < n; ++h) d += (row_i[h] & row_j[h]) * ((p_i[h] == e) + (p_j[h] == e));
        }
        out[off] = d;
        break;
      }
      case TermKind::Esp: {
        const int bins = static_cast<int>(shared_partner_bins(n));
        auto move = [&](int before) {
          if (before >= 1) out[off + before - 1] -= 1;
          if (before + 1 <= bins) out[off + before] += 1;
        };
        const int own = partners(i, j);
        if (own >= 1) out[off + own - 1] += 1;
        if (directed()) {
          for (std::size_t h = 0; h < n; ++h) {
            if (h == i || h == j) continue;
            if (row_i[h] && row_j[h]) move(partners(i, h) - e);
            if (adjacency_(h, j) && adjacency_(h, i)) move(partners(h, j) - e);
          }
        } else {
          for (std::size_t h = 0; h < n; ++h) {
            if (h == i || h == j || !row_i[h] || !row_j[h]) continue;
            move(partners(i, h) - e);
            move(partners(j, h) - e);
          }
        }
        break;
      }
    }
  }
}

void NeighborhoodState::toggle(std::size_t i, std::size_t j) {
  const auto n = size();
  const int delta = adjacency_(i, j) ? -1 : 1;
  const std::uint8_t* row_i = adjacency_.row(i);
  const std::uint8_t* row_j = adjacency_.row(j);
  std::int32_t* p = partners_.data();
  if (directed()) {
    // i->j is the first leg of i->j->b and the second leg of a->i->j.
    for (std::size_t b = 0; b < n; ++b) p[i * n + b] += delta * row_j[b];
    for (std::size_t a = 0; a < n; ++a) p[a * n + j] += delta * adjacency_(a, i);
  } else {
    // Branch-free over all h; h = i and h = j only reach diagonal cells.
    for (std::size_t h = 0; h < n; ++h) {
      p[i * n + h] += delta * row_j[h];
      p[j * n + h] += delta * row_i[h];
    }
    for (std::size_t h = 0; h < n; ++h) {
      p[h * n + i] += delta * row_j[h];
      p[h * n + j] += delta * row_i[h];
    }
  }
  p[i * n + i] = 0;
  p[j * n + j] = 0;
  adjacency_.toggle(i, j);
}

StatisticVector change_stat(const MultilevelGraph& graph, const TermSet& terms, const Dyad& d) {
  terms.validate(graph);
  const Dyad c = graph.canonical(d);
  StatisticVector out;
  for (std::size_t k = 0; k < graph.num_neighborhoods(); ++k) {
    out.sizes.push_back(graph.size(k));
    out.per_hood.push_back(Eigen::VectorXd::Zero(terms.dim(graph.size(k))));
  }
  NeighborhoodState state(graph, c.hood, terms);
  Eigen::VectorXd& delta = out.per_hood[c.hood];
  state.change_stats(c.tail, c.head, std::span<double>(delta.data(), delta.size()));
  return out;
}

GofSummary neighborhood_gof_summary(const AdjacencyMatrix& x) {
  const auto n = x.size();
  const bool directed = x.directed();
  GofSummary out;
  out.geodesic.assign(n > 1 ? n - 1 : 0, 0.0);
  out.dsp.assign(shared_partner_bins(n), 0.0);
  out.esp.assign(shared_partner_bins(n), 0.0);

  std::vector<int> dist(n);
  std::deque<std::size_t> queue;
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[s] = 0;
    queue.assign(1, s);
    while (!queue.empty()) {
      const auto u = queue.front();
      queue.pop_front();
      for (std::size_t v = 0; v < n; ++v) {
        if (dist[v] < 0 && x(u, v)) {
          dist[v] = dist[u] + 1;
          queue.push_back(v);
        }
      }
    }
    for (std::size_t t = directed ? 0 : s + 1; t < n; ++t) {
      if (t == s) continue;
      if (dist[t] < 0)
        out.unreachable += 1;
      else
        out.geodesic[dist[t] - 1] += 1;
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = directed ? 0 : i + 1; j < n; ++j) {
      if (i == j) continue;
      const int c = count_partners(x, i, j);
      if (c < 1) continue;
      out.dsp[c - 1] += 1;
      if (x(i, j)) out.esp[c - 1] += 1;
    }
  }
  return out;
}

void accumulate_summary(const GofSummary& local, GofSummary& total) {
  auto add = [](const std::vector<double>& src, std::vector<double>& dst) {
    if (dst.size() < src.size()) dst.resize(src.size(), 0.0);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] += src[i];
  };
  add(local.geodesic, total.geodesic);
  add(local.dsp, total.dsp);
  add(local.esp, total.esp);
  total.unreachable += local.unreachable;
}

GofSummary gof_summaries(const MultilevelGraph& graph) {
  GofSummary total;
  for (std::size_t k = 0; k < graph.num_neighborhoods(); ++k)
    accumulate_summary(neighborhood_gof_summary(graph.adjacency(k)), total);
  return total;
}

}  // namespace mlergm
