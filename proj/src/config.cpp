// Copyright 2026 The mlergm Authors
// SPDX-License-Identifier: Apache-2.0

#include "mlergm/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mlergm/errors.hpp"

namespace mlergm {

namespace {

void allow_keys(const YAML::Node& node, const std::string& where, std::initializer_list<const char*> keys) {
  if (!node.IsMap()) throw UsageError(where + " must be a mapping");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.contains(key)) throw UsageError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get(const YAML::Node& node, const std::string& key, const std::string& where) {
  try {
    return node[key].as<T>();
  } catch (const YAML::Exception&) {
    throw UsageError("bad value for '" + key + "' in " + where);
  }
}

template <typename T>
void read_opt(const YAML::Node& node, const std::string& key, const std::string& where, T& out) {
  if (node[key]) out = get<T>(node, key, where);
}

std::size_t read_count(const YAML::Node& node, const std::string& key, const std::string& where) {
  const auto v = get<long long>(node, key, where);
  if (v < 0) throw UsageError("'" + key + "' in " + where + " must be nonnegative");
  return static_cast<std::size_t>(v);
}

void read_count_opt(const YAML::Node& node, const std::string& key, const std::string& where,
                    std::size_t& out) {
  if (node[key]) out = read_count(node, key, where);
}

TermKind term_kind(const std::string& name, const std::string& where) {
  static const std::map<std::string, TermKind> kinds{{"edges", TermKind::Edges},
                                                     {"mutual", TermKind::Mutual},
                                                     {"nodematch", TermKind::NodeMatch},
                                                     {"transitive", TermKind::Transitive},
                                                     {"gwesp", TermKind::Esp}};
  auto it = kinds.find(name);
  if (it == kinds.end()) throw UsageError("unknown term '" + name + "' in " + where);
  return it->second;
}

struct Parameters {
  std::vector<std::string> names;
  std::vector<double> init;
  std::map<std::string, std::size_t> index;

  std::size_t at(const std::string& name, const std::string& where) const {
    auto it = index.find(name);
    if (it == index.end()) throw UsageError("unknown parameter '" + name + "' in " + where);
    return it->second;
  }
};

Coefficient read_coefficient(const YAML::Node& term, const std::string& base_key, const std::string& dev_key,
                             const Parameters& params, const std::string& where) {
  if (!term[base_key]) throw UsageError("missing '" + base_key + "' in " + where);
  Coefficient c;
  c.base = params.at(get<std::string>(term, base_key, where), where);
  if (const auto devs = term[dev_key]) {
    if (!devs.IsSequence()) throw UsageError("'" + dev_key + "' in " + where + " must be a list");
    for (const auto& d : devs) {
      if (d.IsNull())
        c.deviations.emplace_back();
      else
        c.deviations.emplace_back(params.at(d.as<std::string>(), where));
    }
  }
  return c;
}

SamplerConfig read_sampler(const YAML::Node& node) {
  SamplerConfig s;
  if (!node) return s;
  const std::string where = "sampler";
  allow_keys(node, where, {"burn_in", "interval", "burn_in_per_dyad", "interval_per_dyad", "draws", "seed"});
  if (node["burn_in"]) s.burn_in = read_count(node, "burn_in", where);
  if (node["interval"]) s.interval = read_count(node, "interval", where);
  read_opt(node, "burn_in_per_dyad", where, s.burn_in_per_dyad);
  read_opt(node, "interval_per_dyad", where, s.interval_per_dyad);
  read_count_opt(node, "draws", where, s.draws);
  read_opt(node, "seed", where, s.seed);
  s.validate();
  return s;
}

EstimatorConfig read_estimator(const YAML::Node& node, const SamplerConfig& sampler) {
  EstimatorConfig e;
  e.sampler = sampler;
  e.seed = sampler.seed;
  if (node) {
    const std::string where = "estimator";
    allow_keys(node, where,
               {"draws", "tol_step", "tol_score", "max_outer", "max_inner", "trust_radius", "min_ess_fraction",
                "noise_z", "boundary_patience", "seed"});
    read_count_opt(node, "draws", where, e.draws);
    read_opt(node, "tol_step", where, e.tol_step);
    read_opt(node, "tol_score", where, e.tol_score);
    read_count_opt(node, "max_outer", where, e.max_outer);
    read_count_opt(node, "max_inner", where, e.max_inner);
    read_opt(node, "trust_radius", where, e.trust_radius);
    read_opt(node, "min_ess_fraction", where, e.min_ess_fraction);
    read_opt(node, "noise_z", where, e.noise_z);
    read_count_opt(node, "boundary_patience", where, e.boundary_patience);
    read_opt(node, "seed", where, e.seed);
  }
  e.validate();
  return e;
}

GofConfig read_gof(const YAML::Node& node, const SamplerConfig& sampler) {
  GofConfig g;
  g.sampler = sampler;
  if (node) {
    allow_keys(node, "gof", {"replicates", "seed"});
    read_count_opt(node, "replicates", "gof", g.replicates);
    read_opt(node, "seed", "gof", g.sampler.seed);
  }
  g.validate();
  return g;
}

SizeSpec read_sizes(const YAML::Node& node) {
  const std::string where = "experiment.sizes";
  allow_keys(node, where, {"uniform", "mixed"});
  if (node["uniform"] && node["mixed"]) throw UsageError(where + " takes either 'uniform' or 'mixed'");
  if (node["uniform"]) return SizeSpec::uniform(read_count(node, "uniform", where));
  if (!node["mixed"] || !node["mixed"].IsSequence()) throw UsageError(where + " needs 'uniform' or a 'mixed' list");
  SizeSpec spec;
  for (const auto& entry : node["mixed"]) {
    allow_keys(entry, where + ".mixed", {"size", "share"});
    spec.mix.emplace_back(read_count(entry, "size", where), get<double>(entry, "share", where));
  }
  return spec;
}

ExperimentConfig read_experiment(const YAML::Node& node, const RunConfig& run) {
  const std::string where = "experiment";
  allow_keys(node, where, {"design", "seed", "grid", "sizes", "replications", "theta_star"});
  ExperimentConfig x;
  const auto design = get<std::string>(node, "design", where);
  if (design == "consistency")
    x.design = Design::Consistency;
  else if (design == "concentration")
    x.design = Design::Concentration;
  else
    throw UsageError("experiment.design must be consistency or concentration");
  x.directed = run.directed;
  x.simulation = run.sampler;
  x.estimator = run.estimator;
  read_opt(node, "seed", where, x.seed);
  if (node["grid"]) {
    if (!node["grid"].IsSequence()) throw UsageError("experiment.grid must be a list");
    for (const auto& k : node["grid"]) x.grid.push_back(k.as<std::size_t>());
  }
  if (node["sizes"]) x.sizes = read_sizes(node["sizes"]);
  read_count_opt(node, "replications", where, x.replications);
  x.theta_star = run.init;
  if (const auto ts = node["theta_star"]) {
    if (ts.IsSequence()) {
      if (ts.size() != run.map.num_parameters())
        throw UsageError("experiment.theta_star needs one value per parameter");
      for (std::size_t i = 0; i < ts.size(); ++i) x.theta_star[static_cast<Eigen::Index>(i)] = ts[i].as<double>();
    } else if (ts.IsMap()) {
      const auto& names = run.map.parameter_names();
      for (const auto& kv : ts) {
        const auto name = kv.first.as<std::string>();
        auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) throw UsageError("unknown parameter '" + name + "' in experiment.theta_star");
        x.theta_star[it - names.begin()] = kv.second.as<double>();
      }
    } else {
      throw UsageError("experiment.theta_star must be a list or a mapping");
    }
  }
  x.validate(run.map);
  return x;
}

RunConfig build(const YAML::Node& root) {
  allow_keys(root, "config", {"directed", "size_buckets", "parameters", "terms", "sampler", "estimator", "gof",
                              "experiment"});
  RunConfig run;
  read_opt(root, "directed", "config", run.directed);

  std::vector<std::size_t> thresholds;
  if (const auto b = root["size_buckets"]) {
    if (!b.IsSequence()) throw UsageError("size_buckets must be a list of thresholds");
    for (const auto& t : b) thresholds.push_back(t.as<std::size_t>());
  }

  Parameters params;
  if (!root["parameters"] || !root["parameters"].IsSequence() || root["parameters"].size() == 0)
    throw UsageError("config needs a nonempty 'parameters' list");
  std::vector<bool> has_init;
  for (const auto& p : root["parameters"]) {
    allow_keys(p, "parameters", {"name", "init"});
    const auto name = get<std::string>(p, "name", "parameters");
    if (!params.index.emplace(name, params.names.size()).second)
      throw UsageError("parameter '" + name + "' declared twice");
    params.names.push_back(name);
    params.init.push_back(p["init"] ? get<double>(p, "init", "parameter " + name) : 0.0);
    has_init.push_back(static_cast<bool>(p["init"]));
  }

  if (!root["terms"] || !root["terms"].IsSequence() || root["terms"].size() == 0)
    throw UsageError("config needs a nonempty 'terms' list");
  std::vector<Term> terms;
  std::vector<TermMapping> mappings;
  for (std::size_t t = 0; t < root["terms"].size(); ++t) {
    const auto node = root["terms"][t];
    const std::string where = "terms[" + std::to_string(t) + "]";
    allow_keys(node, where,
               {"term", "coef", "deviations", "attribute", "scale", "scale_deviations", "decay", "decay_deviations"});
    Term term;
    term.kind = term_kind(get<std::string>(node, "term", where), where);
    TermMapping m;
    if (term.kind == TermKind::NodeMatch) term.attribute = get<std::string>(node, "attribute", where);
    if (term.kind == TermKind::Esp) {
      m.kind = MappingKind::Geometric;
      m.coef = read_coefficient(node, "scale", "scale_deviations", params, where);
      m.decay = read_coefficient(node, "decay", "decay_deviations", params, where);
      if (!has_init[m.decay.base]) params.init[m.decay.base] = 1.0;
    } else {
      m.coef = read_coefficient(node, "coef", "deviations", params, where);
    }
    terms.push_back(term);
    mappings.push_back(m);
  }
  run.map = EtaMap(TermSet(std::move(terms)), std::move(mappings), params.names, SizeBuckets(thresholds));
  run.init = Eigen::Map<const Eigen::VectorXd>(params.init.data(), static_cast<Eigen::Index>(params.init.size()));
  run.map.check_domain(run.init);

  run.sampler = read_sampler(root["sampler"]);
  run.estimator = read_estimator(root["estimator"], run.sampler);
  run.gof = read_gof(root["gof"], run.sampler);
  if (root["experiment"]) run.experiment = read_experiment(root["experiment"], run);
  return run;
}

}  // namespace

RunConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw UsageError(std::string("config is not valid YAML: ") + e.what());
  }
  try {
    return build(root);
  } catch (const DomainError& e) {
    throw UsageError(std::string("config: ") + e.what());
  } catch (const YAML::Exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace mlergm
