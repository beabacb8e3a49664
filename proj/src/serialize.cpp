// Copyright 2026 The hgx Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hgx/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "hgx/errors.hpp"

namespace hgx {

namespace {

/// Reads optional keys from an object and rejects keys nobody asked for.
class Fields {
 public:
  Fields(const Json& j, std::string what) : j_(j), what_(std::move(what)) {
    if (!j_.is_object()) throw ParseError(what_ + " must be a JSON object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    used_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->get<T>();
    } catch (const Json::exception& ex) {
      throw ParseError(what_ + "." + key + ": " + ex.what());
    }
  }

  const Json* find(const char* key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) throw ParseError(what_ + ": unknown key '" + it.key() + "'");
    }
  }

 private:
  const Json& j_;
  std::string what_;
  std::set<std::string> used_;
};

template <typename T>
T required(const Json& j, const char* key, const char* what) {
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& ex) {
    throw ParseError(std::string(what) + "." + key + ": " + ex.what());
  }
}

}  // namespace

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json data = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
  const auto rows = required<Eigen::Index>(j, "rows", "matrix");
  const auto cols = required<Eigen::Index>(j, "cols", "matrix");
  const Json& data = j.at("data");
  if (rows < 0 || cols < 0 || !data.is_array() ||
      data.size() != static_cast<std::size_t>(rows * cols)) {
    throw ParseError("matrix data does not match its shape");
  }
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[k++].get<double>();
  }
  return m;
}

Json to_json(const Hyperparameters& h) {
  return {{"rank", h.rank},
          {"lambda_laplacian", h.lambda_laplacian},
          {"lambda_frobenius", h.lambda_frobenius},
          {"learning_rate", h.learning_rate},
          {"epochs", h.epochs},
          {"tolerance", h.tolerance},
          {"reconstruction_weight", h.reconstruction_weight}};
}

Hyperparameters hyperparameters_from_json(const Json& j, Hyperparameters h) {
  Fields f(j, "model");
  f.get("rank", h.rank);
  f.get("lambda_laplacian", h.lambda_laplacian);
  f.get("lambda_frobenius", h.lambda_frobenius);
  f.get("learning_rate", h.learning_rate);
  f.get("epochs", h.epochs);
  f.get("tolerance", h.tolerance);
  f.get("reconstruction_weight", h.reconstruction_weight);
  f.finish();
  if (h.rank < 1) throw DomainError("rank must be at least 1");
  if (h.epochs < 1) throw DomainError("epochs must be at least 1");
  if (h.lambda_laplacian < 0 || h.lambda_frobenius < 0 || h.learning_rate <= 0) {
    throw DomainError("regularization weights must be nonnegative, learning rate positive");
  }
  return h;
}

Json to_json(const RefineConfig& c) {
  return {{"steps", c.steps},
          {"learning_rate", c.learning_rate},
          {"feedback_weight", c.feedback_weight},
          {"confidence_decay", c.confidence_decay}};
}

RefineConfig refine_config_from_json(const Json& j, RefineConfig c) {
  Fields f(j, "refine");
  f.get("steps", c.steps);
  f.get("learning_rate", c.learning_rate);
  f.get("feedback_weight", c.feedback_weight);
  f.get("confidence_decay", c.confidence_decay);
  f.finish();
  if (c.steps < 0) throw DomainError("refinement steps must be nonnegative");
  if (!(c.confidence_decay > 0.0 && c.confidence_decay <= 1.0)) {
    throw DomainError("confidence decay must lie in (0,1]");
  }
  return c;
}

Json to_json(const TrainConfig& c) {
  Json j = {{"model", to_json(c.hyper)},
            {"seed", c.seed},
            {"supervision_fraction", c.supervision_fraction}};
  j["mask_seed"] = c.mask_seed ? Json(*c.mask_seed) : Json(nullptr);
  return j;
}

TrainConfig train_config_from_json(const Json& j, TrainConfig c) {
  Fields f(j, "train");
  if (const Json* model = f.find("model")) c.hyper = hyperparameters_from_json(*model, c.hyper);
  f.get("seed", c.seed);
  f.get("supervision_fraction", c.supervision_fraction);
  if (const Json* ms = f.find("mask_seed")) {
    c.mask_seed = ms->is_null() ? std::nullopt : std::optional(ms->get<std::uint64_t>());
  }
  f.finish();
  return c;
}

Json to_json(const PlantedConfig& c) {
  return {{"nodes", c.nodes},
          {"edges", c.edges},
          {"timesteps", c.timesteps},
          {"communities", c.communities},
          {"noise", c.noise},
          {"categories_per_community", c.categories_per_community},
          {"explicit_in", c.explicit_in},
          {"explicit_out", c.explicit_out},
          {"seed", c.seed}};
}

PlantedConfig planted_config_from_json(const Json& j) {
  PlantedConfig c;
  Fields f(j, "generator");
  f.get("nodes", c.nodes);
  f.get("edges", c.edges);
  f.get("timesteps", c.timesteps);
  f.get("communities", c.communities);
  f.get("noise", c.noise);
  f.get("categories_per_community", c.categories_per_community);
  f.get("explicit_in", c.explicit_in);
  f.get("explicit_out", c.explicit_out);
  f.get("seed", c.seed);
  f.finish();
  return c;
}

Json to_json(const ModelParams& p) {
  return {{"seed", p.seed},
          {"rank", p.rank()},
          {"model", to_json(p.hyper)},
          {"node_factors", matrix_to_json(p.node_factors)},
          {"edge_factors", matrix_to_json(p.edge_factors)},
          {"loss_trace", p.loss_trace}};
}

ModelParams model_params_from_json(const Json& j) {
  ModelParams p;
  p.seed = required<std::uint64_t>(j, "seed", "params");
  p.hyper = hyperparameters_from_json(j.at("model"));
  p.node_factors = matrix_from_json(j.at("node_factors"));
  p.edge_factors = matrix_from_json(j.at("edge_factors"));
  p.loss_trace = required<std::vector<double>>(j, "loss_trace", "params");
  if (p.node_factors.cols() != p.edge_factors.cols() ||
      p.rank() != required<int>(j, "rank", "params")) {
    throw ParseError("factor matrices disagree on rank");
  }
  return p;
}

Json to_json(const ModelSnapshot& s) {
  Json horizons = Json::array();
  for (std::size_t h = 0; h < s.forecast.params.size(); ++h) {
    const PredictionMatrix& p = s.forecast.predictions[h];
    horizons.push_back({{"horizon", p.horizon},
                        {"confidence", p.confidence},
                        {"params", to_json(s.forecast.params[h])}});
  }
  Json feedback = Json::array();
  for (const auto& a : s.feedback) feedback.push_back(to_json(a));
  return {{"format", "hgx-snapshot"},
          {"version", kSnapshotVersion},
          {"id", s.id},
          {"training", to_json(s.training)},
          {"horizons", std::move(horizons)},
          {"feedback", std::move(feedback)}};
}

SnapshotPtr snapshot_from_json(const Json& j) {
  if (j.value("format", "") != "hgx-snapshot") throw ParseError("not a snapshot document");
  if (j.value("version", -1) != kSnapshotVersion) {
    throw IncompatibleError("unsupported snapshot version");
  }
  ModelParams training = model_params_from_json(j.at("training"));
  Forecast forecast;
  for (const Json& h : j.at("horizons")) {
    forecast.params.push_back(model_params_from_json(h.at("params")));
    forecast.predictions.push_back(predict(forecast.params.back(), h.at("horizon").get<int>(),
                                           h.at("confidence").get<double>()));
  }
  std::vector<Assertion> feedback;
  for (const Json& a : j.at("feedback")) feedback.push_back(assertion_from_json(a));
  SnapshotPtr snap = make_snapshot(std::move(training), std::move(forecast), std::move(feedback));
  if (snap->id != required<std::string>(j, "id", "snapshot")) {
    throw IncompatibleError("snapshot content does not match its id");
  }
  return snap;
}

Json to_json(const Assertion& a) {
  return {{"node", a.node}, {"edge", a.edge}, {"strength", a.strength}, {"timestep", a.timestep}};
}

Assertion assertion_from_json(const Json& j) {
  Assertion a;
  Fields f(j, "assertion");
  f.get("node", a.node);
  f.get("edge", a.edge);
  f.get("strength", a.strength);
  f.get("timestep", a.timestep);
  f.finish();
  if (!j.contains("node") || !j.contains("edge") || !j.contains("strength")) {
    throw ParseError("assertion needs node, edge and strength");
  }
  return a;
}

Json to_json(const FeedbackSet& f) {
  Json items = Json::array();
  for (const auto& a : f.assertions) items.push_back(to_json(a));
  return {{"assertions", std::move(items)}, {"session", f.session_id}, {"created_ms", f.created_ms}};
}

FeedbackSet feedback_from_json(const Json& j) {
  FeedbackSet out;
  Fields f(j, "feedback");
  if (const Json* items = f.find("assertions")) {
    if (!items->is_array()) throw ParseError("feedback.assertions must be an array");
    for (const Json& a : *items) out.assertions.push_back(assertion_from_json(a));
  }
  f.get("session", out.session_id);
  f.get("created_ms", out.created_ms);
  f.finish();
  return out;
}

Json to_json(const OrderingRequest& r) {
  return {{"axis", to_string(r.axis)},
          {"strategy", to_string(r.strategy)},
          {"metric", to_string(r.metric.kind)},
          {"jaccard_threshold", r.metric.threshold},
          {"linkage", to_string(r.linkage)},
          {"respect_filter", r.respect_filter},
          {"filter_threshold", r.filter_threshold}};
}

OrderingRequest ordering_request_from_json(const Json& j) {
  OrderingRequest r;
  Fields f(j, "ordering");
  std::string axis = to_string(r.axis), strategy = to_string(r.strategy),
              metric = to_string(r.metric.kind), linkage = to_string(r.linkage);
  f.get("axis", axis);
  f.get("strategy", strategy);
  f.get("metric", metric);
  f.get("jaccard_threshold", r.metric.threshold);
  f.get("linkage", linkage);
  f.get("respect_filter", r.respect_filter);
  f.get("filter_threshold", r.filter_threshold);
  f.finish();
  r.axis = axis_from_string(axis);
  r.strategy = strategy_from_string(strategy);
  r.metric.kind = metric_from_string(metric);
  r.linkage = linkage_from_string(linkage);
  return r;
}

Json to_json(const Ordering& o) {
  return {{"id", o.id},
          {"axis", to_string(o.axis)},
          {"strategy", to_string(o.strategy)},
          {"permutation", o.permutation}};
}

Json to_json(const EntryRef& e) {
  if (e.kind == EntryRef::Kind::Group) return {{"group", e.group}};
  return {{"leaf", e.leaf}};
}

EntryRef entry_from_json(const Json& j) {
  if (j.is_number_unsigned()) return EntryRef::of_leaf(j.get<std::size_t>());
  if (j.is_object() && j.contains("leaf")) {
    return EntryRef::of_leaf(required<std::size_t>(j, "leaf", "entry"));
  }
  if (j.is_object() && j.contains("group")) {
    return EntryRef::of_group(required<std::string>(j, "group", "entry"));
  }
  throw ParseError("entry must be a leaf index, {\"leaf\": i} or {\"group\": name}");
}

Json to_json(const HierarchyEdit& e) {
  Json entries = Json::array();
  for (const auto& x : e.entries) entries.push_back(to_json(x));
  return {{"op", to_string(e.kind)},       {"name", e.name},
          {"new_name", e.new_name},        {"target", e.target},
          {"entries", std::move(entries)}, {"cascade", e.cascade},
          {"collapsed", e.collapsed}};
}

HierarchyEdit hierarchy_edit_from_json(const Json& j) {
  HierarchyEdit e;
  Fields f(j, "hierarchy edit");
  std::string op;
  f.get("op", op);
  e.kind = edit_kind_from_string(op);
  f.get("name", e.name);
  f.get("new_name", e.new_name);
  f.get("target", e.target);
  if (const Json* entries = f.find("entries")) {
    if (!entries->is_array()) throw ParseError("entries must be an array");
    for (const Json& x : *entries) e.entries.push_back(entry_from_json(x));
  }
  f.get("cascade", e.cascade);
  f.get("collapsed", e.collapsed);
  std::string axis;
  f.get("axis", axis);  // read by the caller
  f.finish();
  return e;
}

Json to_json(const PartitionTree& t) {
  const auto& nodes = t.nodes();
  auto walk = [&](auto&& self, std::size_t id) -> Json {
    const auto& n = nodes[id];
    if (!n.is_group) return Json(n.leaf);
    Json children = Json::array();
    for (std::size_t c : n.children) children.push_back(self(self, c));
    Json g = {{"children", std::move(children)}};
    if (id != 0) {
      g["name"] = n.name;
      g["collapsed"] = n.collapsed;
    }
    g["manual_order"] = n.manual_order;
    return g;
  };
  return {{"axis", to_string(t.axis())}, {"leaves", t.leaf_count()}, {"root", walk(walk, 0)}};
}

Json to_json(const VisibleEntry& v) {
  Json j = {{"leaves", v.leaves}, {"enclosing", v.enclosing}};
  j["group"] = v.group ? Json(*v.group) : Json(nullptr);
  return j;
}

Json to_json(const EngineConfig& c) {
  return {{"model", to_json(c.hyper)},
          {"refine", to_json(c.refine)},
          {"supervision_fraction", c.supervision_fraction},
          {"seed", c.seed},
          {"horizons", c.horizons},
          {"threshold", c.threshold},
          {"aggregator", to_string(c.aggregator)},
          {"budgets",
           {{"binary", c.budgets.binary},
            {"strength", c.budgets.strength},
            {"timeline", c.budgets.timeline},
            {"keywords", c.budgets.keywords},
            {"page_default", c.budgets.page_default},
            {"page_max", c.budgets.page_max}}},
          {"keyword_count", c.keyword_count},
          {"excerpt_chars", c.excerpt_chars},
          {"search_page_size", c.search_page_size}};
}

EngineConfig engine_config_from_json(const Json& j) {
  EngineConfig c;
  Fields f(j, "config");
  if (const Json* m = f.find("model")) c.hyper = hyperparameters_from_json(*m, c.hyper);
  if (const Json* r = f.find("refine")) c.refine = refine_config_from_json(*r, c.refine);
  f.get("supervision_fraction", c.supervision_fraction);
  f.get("seed", c.seed);
  f.get("horizons", c.horizons);
  f.get("threshold", c.threshold);
  std::string aggregator = to_string(c.aggregator);
  f.get("aggregator", aggregator);
  c.aggregator = aggregator_from_string(aggregator);
  if (const Json* b = f.find("budgets")) {
    Fields g(*b, "budgets");
    g.get("binary", c.budgets.binary);
    g.get("strength", c.budgets.strength);
    g.get("timeline", c.budgets.timeline);
    g.get("keywords", c.budgets.keywords);
    g.get("page_default", c.budgets.page_default);
    g.get("page_max", c.budgets.page_max);
    g.finish();
  }
  f.get("keyword_count", c.keyword_count);
  f.get("excerpt_chars", c.excerpt_chars);
  f.get("search_page_size", c.search_page_size);
  f.finish();
  if (c.horizons < 1) throw DomainError("horizons must be at least 1");
  if (!(c.threshold >= 0.0 && c.threshold <= 1.0)) throw DomainError("threshold must lie in [0,1]");
  if (!(c.supervision_fraction > 0.0 && c.supervision_fraction <= 0.5)) {
    throw DomainError("supervision fraction must lie in (0, 0.5]");
  }
  if (c.budgets.page_default == 0 || c.budgets.page_default > c.budgets.page_max) {
    throw DomainError("page size default must lie in 1..page_max");
  }
  return c;
}

EngineConfig load_engine_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LookupError("cannot open config " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& ex) {
    throw ParseError("config " + path + ": " + ex.what());
  }
  return engine_config_from_json(j);
}

std::string to_csv(const Eigen::MatrixXd& m) {
  std::string out;
  char buf[32];
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
      if (c) out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace hgx
