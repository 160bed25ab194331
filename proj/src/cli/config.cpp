// Copyright 2026 The dcbo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dcbo/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dcbo/errors.hpp"

namespace dcbo::cli {
namespace {

using nlohmann::json;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

void rejectUnknown(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError(where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(where.empty() ? key : where + "." + key, "unknown key");
    }
  }
}

std::string join(const std::string& where, std::string_view key) {
  return where.empty() ? std::string(key) : where + "." + std::string(key);
}

double getReal(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field, "expected a number");
  return v.get<double>();
}

long long getInt(const json& v, const std::string& field) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d == static_cast<double>(static_cast<long long>(d))) return static_cast<long long>(d);
  }
  throw ConfigError(field, "expected an integer");
}

int getIntInRange(const json& v, const std::string& field, long long lo) {
  const long long x = getInt(v, field);
  if (x < lo || x > std::numeric_limits<int>::max()) {
    throw ConfigError(field, "must be an integer >= " + std::to_string(lo));
  }
  return static_cast<int>(x);
}

std::string getString(const json& v, const std::string& field) {
  if (!v.is_string()) throw ConfigError(field, "expected a string");
  return v.get<std::string>();
}

Vector getVector(const json& v, const std::string& field) {
  if (!v.is_array() || v.empty()) throw ConfigError(field, "expected a non-empty array of numbers");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = getReal(v[i], field);
  return out;
}

json toArray(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

PolicyKind policyKindFromName(const std::string& name, const std::string& field) {
  const std::string n = lower(name);
  if (n == "ei") return PolicyKind::EI;
  if (n == "poi") return PolicyKind::PoI;
  if (n == "ucb") return PolicyKind::UCB;
  if (n == "cei") return PolicyKind::CEI;
  if (n == "dcbo") return PolicyKind::DCBO;
  throw ConfigError(field, "unknown policy \"" + name + "\"");
}

Policy parsePolicy(const json& v, const std::string& field) {
  if (v.is_string()) {
    Policy p;
    p.kind = policyKindFromName(v.get<std::string>(), field);
    return p;
  }
  if (!v.is_object()) throw ConfigError(field, "expected a policy name or object");
  if (!v.contains("name")) throw ConfigError(join(field, "name"), "missing policy name");
  Policy p;
  p.kind = policyKindFromName(getString(v["name"], join(field, "name")), join(field, "name"));
  switch (p.kind) {
    case PolicyKind::UCB:
      rejectUnknown(v, field, {"name", "kappa"});
      break;
    case PolicyKind::DCBO:
      rejectUnknown(v, field, {"name", "updater", "samples", "kappa_init", "direction_model", "oracle_pairs"});
      break;
    default:
      rejectUnknown(v, field, {"name"});
  }
  if (v.contains("kappa")) p.ucb.kappa = getReal(v["kappa"], join(field, "kappa"));
  if (v.contains("updater")) {
    const std::string f = join(field, "updater");
    const std::string u = lower(getString(v["updater"], f));
    if (u == "general") {
      p.dcbo.updater = VmfUpdater::General;
    } else if (u == "dim2") {
      p.dcbo.updater = VmfUpdater::Dim2;
    } else {
      throw ConfigError(f, "unknown updater \"" + u + "\" (general, dim2)");
    }
  }
  if (v.contains("samples")) p.dcbo.minimizerSamples = getIntInRange(v["samples"], join(field, "samples"), 1);
  if (v.contains("kappa_init")) p.dcbo.kappaInit = getReal(v["kappa_init"], join(field, "kappa_init"));
  if (v.contains("direction_model")) {
    const std::string f = join(field, "direction_model");
    const std::string m = lower(getString(v["direction_model"], f));
    if (m == "analytic") {
      p.dcbo.directionModel = DirectionModel::Analytic;
    } else if (m == "oracle") {
      p.dcbo.directionModel = DirectionModel::RejectionOracle;
    } else {
      throw ConfigError(f, "unknown direction model \"" + m + "\" (analytic, oracle)");
    }
  }
  if (v.contains("oracle_pairs")) p.dcbo.oraclePairs = getIntInRange(v["oracle_pairs"], join(field, "oracle_pairs"), 1);
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(field, e.what());
  }
  return p;
}

json policyToJson(const Policy& p) {
  json out = {{"name", std::string(toString(p.kind))}};
  if (p.kind == PolicyKind::UCB) out["kappa"] = p.ucb.kappa;
  if (p.kind == PolicyKind::DCBO) {
    out["updater"] = std::string(toString(p.dcbo.updater));
    out["samples"] = p.dcbo.minimizerSamples;
    out["kappa_init"] = p.dcbo.kappaInit;
    out["direction_model"] = std::string(toString(p.dcbo.directionModel));
    out["oracle_pairs"] = p.dcbo.oraclePairs;
  }
  return out;
}

ExperimentConfig fromJson(const json& root) {
  rejectUnknown(root, "",
                {"problem", "output", "box", "budget", "repeats", "seed", "policies", "candidates",
                 "thompson_candidates", "kernel", "metric", "external"});
  ExperimentConfig c;
  if (!root.contains("problem")) throw ConfigError("problem", "missing required key");
  c.problem = problemKindFromString(getString(root["problem"], "problem"));
  if (root.contains("output")) c.output = getString(root["output"], "output");

  if (root.contains("box")) {
    const json& b = root["box"];
    rejectUnknown(b, "box", {"lo", "hi"});
    if (!b.contains("lo") || !b.contains("hi")) throw ConfigError("box", "needs both lo and hi");
    try {
      c.box = Box(getVector(b["lo"], "box.lo"), getVector(b["hi"], "box.hi"));
    } catch (const InvalidArgument& e) {
      throw ConfigError("box", e.what());
    }
  }
  if (root.contains("budget")) c.budget = getIntInRange(root["budget"], "budget", 2);
  if (root.contains("repeats")) c.repeats = getIntInRange(root["repeats"], "repeats", 1);
  if (root.contains("seed")) {
    const json& s = root["seed"];
    if (s.is_number_unsigned()) {
      c.seed = s.get<std::uint64_t>();
    } else {
      const long long v = getInt(s, "seed");
      if (v < 0) throw ConfigError("seed", "must be non-negative");
      c.seed = static_cast<std::uint64_t>(v);
    }
  }
  if (root.contains("candidates")) c.loop.candidateCount = getIntInRange(root["candidates"], "candidates", 1);
  if (root.contains("thompson_candidates")) {
    c.loop.thompsonCandidates = getIntInRange(root["thompson_candidates"], "thompson_candidates", 1);
  }

  if (root.contains("kernel")) {
    const json& k = root["kernel"];
    rejectUnknown(k, "kernel", {"variant", "jitter", "lengthscale_min", "lengthscale_max", "grid_points"});
    if (k.contains("variant")) {
      try {
        c.loop.kernel.variant = kernelVariantFromString(getString(k["variant"], "kernel.variant"));
      } catch (const InvalidArgument& e) {
        throw ConfigError("kernel.variant", e.what());
      }
    }
    if (k.contains("jitter")) {
      c.loop.kernel.noiseJitter = getReal(k["jitter"], "kernel.jitter");
      if (!(c.loop.kernel.noiseJitter >= 0.0)) throw ConfigError("kernel.jitter", "must be >= 0");
    }
    double lo = c.loop.lengthscales.front();
    double hi = c.loop.lengthscales.back();
    int n = static_cast<int>(c.loop.lengthscales.size());
    if (k.contains("lengthscale_min")) lo = getReal(k["lengthscale_min"], "kernel.lengthscale_min");
    if (k.contains("lengthscale_max")) hi = getReal(k["lengthscale_max"], "kernel.lengthscale_max");
    if (k.contains("grid_points")) n = getIntInRange(k["grid_points"], "kernel.grid_points", 1);
    if (!(lo > 0.0)) throw ConfigError("kernel.lengthscale_min", "must be positive");
    if (!(hi >= lo)) throw ConfigError("kernel.lengthscale_max", "must be >= lengthscale_min");
    c.loop.lengthscales = logSpaced(lo, hi, n);
  }

  if (root.contains("metric")) {
    const json& m = root["metric"];
    rejectUnknown(m, "metric", {"penalty", "true_minimum", "grid_resolution"});
    if (m.contains("penalty")) c.metric.penalty = getReal(m["penalty"], "metric.penalty");
    if (m.contains("true_minimum") && !m["true_minimum"].is_null()) {
      c.metric.trueMinimum = getReal(m["true_minimum"], "metric.true_minimum");
    }
    if (m.contains("grid_resolution")) {
      c.metric.gridResolution = getIntInRange(m["grid_resolution"], "metric.grid_resolution", 2);
    }
  }

  if (root.contains("external") && !root["external"].is_null()) {
    const json& e = root["external"];
    rejectUnknown(e, "external", {"command", "timeout_ms", "constraint_threshold"});
    ExternalSettings ext;
    if (!e.contains("command")) throw ConfigError("external.command", "missing required key");
    ext.command = getString(e["command"], "external.command");
    if (e.contains("timeout_ms")) ext.timeoutMs = getIntInRange(e["timeout_ms"], "external.timeout_ms", 1);
    if (e.contains("constraint_threshold") && !e["constraint_threshold"].is_null()) {
      ext.constraintThreshold = getReal(e["constraint_threshold"], "external.constraint_threshold");
    }
    c.external = ext;
  }

  const bool constrained = c.problem == ProblemKind::SyntheticConstrained ||
                           (c.external && c.external->constraintThreshold.has_value());
  if (root.contains("policies")) {
    const json& ps = root["policies"];
    if (!ps.is_array()) throw ConfigError("policies", "expected an array");
    for (std::size_t i = 0; i < ps.size(); ++i) {
      c.policies.push_back(parsePolicy(ps[i], "policies[" + std::to_string(i) + "]"));
    }
  } else {
    c.policies = defaultPolicies(c.problem, constrained);
    if (c.box.dim() < 2) std::erase_if(c.policies, [](const Policy& p) { return p.kind == PolicyKind::DCBO; });
  }

  validateConfig(c);
  return c;
}

}  // namespace

ProblemKind problemKindFromString(std::string_view s) {
  for (auto k : {ProblemKind::SyntheticUnconstrained, ProblemKind::SyntheticConstrained, ProblemKind::External}) {
    if (s == toString(k)) return k;
  }
  throw ConfigError("problem",
                    "unknown problem \"" + std::string(s) +
                        "\" (synthetic-unconstrained, synthetic-constrained, external)");
}

std::vector<Policy> defaultPolicies(ProblemKind problem, bool constrained) {
  (void)problem;
  if (constrained) return {Policy::cei(), Policy::dcboWith()};
  return {Policy::ei(), Policy::poi(), Policy::dcboWith()};
}

void validateConfig(const ExperimentConfig& c) {
  if (c.budget < 2) throw ConfigError("budget", "must be >= 2");
  if (c.repeats < 1) throw ConfigError("repeats", "must be >= 1");
  if (c.policies.empty()) throw ConfigError("policies", "policy list is empty");
  const bool external = c.problem == ProblemKind::External;
  if (external) {
    if (!c.external) throw ConfigError("external", "external problems need a command and timeout");
    if (c.external->command.empty()) throw ConfigError("external.command", "empty command");
    if (c.external->timeoutMs < 1) throw ConfigError("external.timeout_ms", "must be >= 1");
  } else {
    if (c.external) throw ConfigError("external", "only valid for the external problem");
    if (c.box.dim() != 2) throw ConfigError("box", "the synthetic problem is two-dimensional");
  }
  const bool constrained = external ? c.external->constraintThreshold.has_value()
                                    : c.problem == ProblemKind::SyntheticConstrained;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < c.policies.size(); ++i) {
    const Policy& p = c.policies[i];
    const std::string field = "policies[" + std::to_string(i) + "]";
    try {
      p.validate();
    } catch (const InvalidArgument& e) {
      throw ConfigError(field, e.what());
    }
    if (p.kind == PolicyKind::CEI && !constrained) throw ConfigError(field, "cEI needs a constrained problem");
    if (p.kind == PolicyKind::DCBO && c.box.dim() < 2) throw ConfigError(field, "DCBO needs at least two dimensions");
    if (p.kind == PolicyKind::DCBO && c.box.dim() != 2 &&
        (p.dcbo.updater == VmfUpdater::Dim2 || p.dcbo.directionModel == DirectionModel::RejectionOracle)) {
      throw ConfigError(field, "the dim2 updater and the oracle direction model need a 2-D box");
    }
    if (!ids.insert(p.id()).second) throw ConfigError(field, "duplicate policy \"" + p.id() + "\"");
  }
  try {
    c.loop.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError("kernel", e.what());
  }
  if (c.loop.rhoOverride) throw ConfigError("rho", "not configurable");
  if (c.metric.gridResolution < 2) throw ConfigError("metric.grid_resolution", "must be >= 2");
  if (!std::isfinite(c.metric.penalty)) throw ConfigError("metric.penalty", "must be finite");
}

ExperimentConfig parseConfigText(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  return fromJson(root);
}

ExperimentConfig parseConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parseConfigText(buf.str());
}

std::string emitConfig(const ExperimentConfig& c) {
  json root;
  root["problem"] = std::string(toString(c.problem));
  root["output"] = c.output;
  root["box"] = {{"lo", toArray(c.box.lo)}, {"hi", toArray(c.box.hi)}};
  root["budget"] = c.budget;
  root["repeats"] = c.repeats;
  root["seed"] = c.seed;
  json ps = json::array();
  for (const auto& p : c.policies) ps.push_back(policyToJson(p));
  root["policies"] = ps;
  root["candidates"] = c.loop.candidateCount;
  root["thompson_candidates"] = c.loop.thompsonCandidates;
  root["kernel"] = {{"variant", std::string(toString(c.loop.kernel.variant))},
                    {"jitter", c.loop.kernel.noiseJitter},
                    {"lengthscale_min", c.loop.lengthscales.front()},
                    {"lengthscale_max", c.loop.lengthscales.back()},
                    {"grid_points", c.loop.lengthscales.size()}};
  json metric = {{"penalty", c.metric.penalty}, {"grid_resolution", c.metric.gridResolution}};
  metric["true_minimum"] = c.metric.trueMinimum ? json(*c.metric.trueMinimum) : json(nullptr);
  root["metric"] = metric;
  if (c.external) {
    json e = {{"command", c.external->command}, {"timeout_ms", c.external->timeoutMs}};
    e["constraint_threshold"] =
        c.external->constraintThreshold ? json(*c.external->constraintThreshold) : json(nullptr);
    root["external"] = e;
  }
  return root.dump(2) + "\n";
}

}  // namespace dcbo::cli
