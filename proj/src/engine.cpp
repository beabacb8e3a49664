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

#include "hgx/engine.hpp"

#include <fstream>
#include <sstream>

#include "hgx/digest.hpp"
#include "hgx/errors.hpp"
#include "hgx/serialize.hpp"

namespace hgx {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LookupError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void digest_graph(Digest& d, const TemporalHypergraph& h) {
  d.text(to_string(h.role()));
  for (const auto* labels : {&h.node_labels(), &h.edge_labels(), &h.time_labels()}) {
    d.integer(static_cast<std::int64_t>(labels->size()));
    for (const auto& l : *labels) d.text(l);
  }
  for (const auto& step : h.steps()) {
    for (std::size_t v = 0; v < step.rows(); ++v) {
      for (const auto& e : step.row(static_cast<NodeId>(v))) {
        d.integer(static_cast<std::int64_t>(v)).integer(e.edge).number(e.strength);
      }
    }
    d.integer(-1);
  }
}

SnapshotPtr train_snapshot(const Dataset& data, const TrainConfig& config,
                           const RefineConfig& refine, int horizons) {
  const std::size_t t = data.timesteps();
  if (t < 2) throw StateError("training needs at least two timesteps");
  const IncidenceMatrix& input = data.implicit_graph.at(static_cast<TimeIndex>(t - 2));
  const IncidenceMatrix& latest = data.implicit_graph.at(static_cast<TimeIndex>(t - 1));
  TrainResult fit = train(input, data.laplacian, latest, config);
  Forecast forecast = extrapolate(fit.params, latest.dense(), data.laplacian, horizons, refine);
  return make_snapshot(std::move(fit.params), std::move(forecast), {});
}

SnapshotPtr compute_preview(const Dataset& data, const ModelSnapshot& before,
                            const FeedbackSet& feedback, const RefineConfig& refine) {
  const IncidenceMatrix& latest =
      data.implicit_graph.at(static_cast<TimeIndex>(data.timesteps() - 1));
  return preview_feedback(before, latest, data.laplacian, feedback, refine);
}

std::string ordering_id(const Ordering& o) {
  Digest d;
  d.text(to_string(o.axis)).text(to_string(o.strategy));
  for (std::size_t p : o.permutation) d.integer(static_cast<std::int64_t>(p));
  return d.hex();
}

Eigen::MatrixXd ordering_source(const SessionState& s) {
  if (s.snapshot) return s.snapshot->forecast.predictions.front().values;
  return s.dataset->implicit_graph.at(static_cast<TimeIndex>(s.dataset->timesteps() - 1)).dense();
}

void require_dataset(const SessionState& s) {
  if (!s.dataset) throw StateError("session '" + s.id + "' has no data; ingest first");
}

void expect_equal(const Json& payload, const char* key, const std::string& actual) {
  auto it = payload.find(key);
  if (it != payload.end() && !it->is_null() && it->get<std::string>() != actual) {
    throw IncompatibleError(std::string("replay diverged: ") + key + " " + it->get<std::string>() +
                            " recomputed as " + actual);
  }
}

}  // namespace

struct Engine::Caches {
  std::mutex mutex;
  std::map<std::string, std::shared_ptr<const Dataset>> datasets;
  std::map<std::string, SnapshotPtr> results;    // train and preview keys
  std::map<std::string, SnapshotPtr> snapshots;  // by id

  template <typename T>
  std::optional<T> find(std::map<std::string, T>& m, const std::string& key) {
    std::lock_guard lock(mutex);
    auto it = m.find(key);
    if (it == m.end()) return std::nullopt;
    return it->second;
  }
  template <typename T>
  void put(std::map<std::string, T>& m, const std::string& key, T value) {
    std::lock_guard lock(mutex);
    m.emplace(key, std::move(value));
  }
};

std::shared_ptr<const Dataset> make_dataset(TemporalHypergraph explicit_graph,
                                            TemporalHypergraph implicit_graph,
                                            std::shared_ptr<const CorpusIndex> index) {
  if (explicit_graph.node_count() != implicit_graph.node_count() ||
      explicit_graph.timestep_count() != implicit_graph.timestep_count()) {
    throw DimensionError("explicit and implicit hypergraphs disagree in shape");
  }
  const auto latest = static_cast<TimeIndex>(explicit_graph.timestep_count() - 1);
  LaplacianMatrix lap = normalized_laplacian(explicit_graph, latest);
  Digest d;
  digest_graph(d, explicit_graph);
  digest_graph(d, implicit_graph);
  return std::make_shared<const Dataset>(Dataset{std::move(explicit_graph),
                                                 std::move(implicit_graph), std::move(index),
                                                 std::move(lap), d.hex()});
}

const PartitionTree& SessionState::row_tree(std::optional<std::size_t> version) const {
  const std::size_t v = version.value_or(hierarchy_version());
  if (v >= hierarchy_versions.size()) {
    throw LookupError("unknown hierarchy version " + std::to_string(v));
  }
  return *row_trees.at(hierarchy_versions[v].first);
}

const PartitionTree& SessionState::col_tree(std::optional<std::size_t> version) const {
  const std::size_t v = version.value_or(hierarchy_version());
  if (v >= hierarchy_versions.size()) {
    throw LookupError("unknown hierarchy version " + std::to_string(v));
  }
  return *col_trees.at(hierarchy_versions[v].second);
}

const Ordering* SessionState::active_ordering(Axis axis) const {
  const std::string& id = axis == Axis::Rows ? row_ordering : col_ordering;
  if (id.empty()) return nullptr;
  return &orderings.at(id);
}

const char* to_string(JobState s) {
  switch (s) {
    case JobState::Running: return "running";
    case JobState::PreviewReady: return "preview-ready";
    case JobState::Failed: return "failed";
  }
  return "running";
}

Engine::Engine(EngineConfig config, ProvenanceLog log)
    : config_(std::move(config)), log_(std::move(log)), caches_(std::make_unique<Caches>()) {
  for (const std::string& s : log_.sessions()) {
    auto state = rebuild(s, log_.head(s), caches_.get());
    auto copy = std::make_shared<SessionState>(*state);
    copy->head = log_.head(s);
    sessions_[s] = std::move(copy);
  }
}

Engine::~Engine() {
  for (auto& w : workers_) {
    if (w.joinable()) w.join();
  }
}

std::unique_ptr<Engine> Engine::open(const std::filesystem::path& data_dir, EngineConfig config) {
  std::filesystem::create_directories(data_dir);
  return std::make_unique<Engine>(std::move(config), ProvenanceLog::open(data_dir / "provenance.log"));
}

std::shared_ptr<const SessionState> Engine::empty_state(const std::string& session) const {
  auto s = std::make_shared<SessionState>();
  s->id = session;
  s->threshold = config_.threshold;
  s->hierarchy_versions = {{0, 0}};
  s->row_trees = {std::make_shared<const PartitionTree>(PartitionTree::flat(Axis::Rows, 0))};
  s->col_trees = {std::make_shared<const PartitionTree>(PartitionTree::flat(Axis::Cols, 0))};
  return s;
}

std::shared_ptr<const SessionState> Engine::current(const std::string& session) const {
  std::lock_guard lock(state_);
  auto it = sessions_.find(session);
  if (it != sessions_.end()) return it->second;
  if (session == "main") return empty_state(session);
  throw LookupError("unknown session '" + session + "'");
}

std::shared_ptr<const SessionState> Engine::session(const std::string& id) const {
  return current(id);
}

std::vector<std::string> Engine::sessions() const {
  std::lock_guard lock(state_);
  std::vector<std::string> out{"main"};
  for (const auto& [id, s] : sessions_) {
    if (id != "main") out.push_back(id);
  }
  return out;
}

void Engine::register_snapshot(const SnapshotPtr& s) const {
  if (s) caches_->put(caches_->snapshots, s->id, s);
}

SnapshotPtr Engine::snapshot(const std::string& id) const {
  if (auto s = caches_->find(caches_->snapshots, id)) return *s;
  throw LookupError("unknown snapshot '" + id + "'");
}

std::vector<ProvenanceEvent> Engine::events() const {
  std::lock_guard lock(state_);
  return log_.events();
}

std::size_t Engine::event_count() const {
  std::lock_guard lock(state_);
  return log_.size();
}

void Engine::set_job_hook(std::function<void()> hook) {
  std::lock_guard lock(state_);
  job_hook_ = std::move(hook);
}

SessionState Engine::apply(const SessionState& state, const ProvenanceEvent& event, Mode mode,
                           Caches* caches) const {
  SessionState next = state;
  next.head = event.seq;
  const Json& p = event.payload;

  switch (event.kind) {
    case EventKind::Ingest: {
      const std::string key = "dataset:" + p.dump();
      std::shared_ptr<const Dataset> data;
      if (caches) {
        if (auto hit = caches->find(caches->datasets, key)) data = *hit;
      }
      if (!data) {
        if (p.at("source") == "generator") {
          PlantedDataset g = generate_planted(planted_config_from_json(p.at("generator")));
          data = make_dataset(std::move(g.explicit_graph), std::move(g.implicit_graph), nullptr);
        } else {
          const std::string corpus = read_file(p.at("corpus").get<std::string>());
          const std::string ontology = read_file(p.at("ontology").get<std::string>());
          expect_equal(p, "corpus_digest", Digest().bytes(corpus.data(), corpus.size()).hex());
          expect_equal(p, "ontology_digest",
                       Digest().bytes(ontology.data(), ontology.size()).hex());
          ParsedCorpus parsed = parse_corpus_text(corpus);
          Ontology ont = Ontology::parse_text(ontology);
          IngestResult r = build_temporal_hypergraphs(
              parsed.documents, ont, binning_from_string(p.at("bin").get<std::string>()));
          data = make_dataset(std::move(r.explicit_graph), std::move(r.implicit_graph),
                              std::make_shared<const CorpusIndex>(std::move(r.index)));
        }
        if (caches) caches->put(caches->datasets, key, data);
      }
      expect_equal(p, "dataset", data->digest);
      SessionState fresh = *empty_state(state.id);
      fresh.head = event.seq;
      fresh.threshold = state.threshold;
      fresh.dataset = data;
      fresh.row_trees = {std::make_shared<const PartitionTree>(
          PartitionTree::flat(Axis::Rows, data->nodes()))};
      fresh.col_trees = {std::make_shared<const PartitionTree>(
          PartitionTree::flat(Axis::Cols, data->edges()))};
      return fresh;
    }

    case EventKind::Train: {
      require_dataset(state);
      const TrainConfig cfg = train_config_from_json(p.at("train"));
      const RefineConfig refine = refine_config_from_json(p.at("refine"));
      const int horizons = p.at("horizons").get<int>();
      const std::string key = "train:" + state.dataset->digest + p.at("train").dump() +
                              p.at("refine").dump() + std::to_string(horizons);
      SnapshotPtr snap;
      if (caches) {
        if (auto hit = caches->find(caches->results, key)) snap = *hit;
      }
      if (!snap) {
        snap = train_snapshot(*state.dataset, cfg, refine, horizons);
        if (caches) caches->put(caches->results, key, snap);
      }
      expect_equal(p, "snapshot", snap->id);
      register_snapshot(snap);
      next.snapshot = snap;
      next.train_config = cfg;
      next.pending = nullptr;
      next.pending_job.reset();
      return next;
    }

    case EventKind::Reorder: {
      require_dataset(state);
      const OrderingRequest request = ordering_request_from_json(p.at("request"));
      Ordering o = compute_ordering(ordering_source(state), request);
      o.id = ordering_id(o);
      expect_equal(p, "ordering", o.id);
      (request.axis == Axis::Rows ? next.row_ordering : next.col_ordering) = o.id;
      next.orderings[o.id] = std::move(o);
      return next;
    }

    case EventKind::HierarchyEdit: {
      require_dataset(state);
      const Axis axis = axis_from_string(p.at("axis").get<std::string>());
      const HierarchyEdit edit = hierarchy_edit_from_json(p.at("edit"));
      auto [rv, cv] = state.hierarchy_versions.back();
      if (axis == Axis::Rows) {
        next.row_trees.push_back(std::make_shared<const PartitionTree>(state.row_tree().mutate(edit)));
        rv = next.row_trees.size() - 1;
      } else {
        next.col_trees.push_back(std::make_shared<const PartitionTree>(state.col_tree().mutate(edit)));
        cv = next.col_trees.size() - 1;
      }
      next.hierarchy_versions.emplace_back(rv, cv);
      return next;
    }

    case EventKind::FilterChange: {
      const double t = p.at("threshold").get<double>();
      if (!(t >= 0.0 && t <= 1.0)) throw DomainError("threshold must lie in [0,1]");
      next.threshold = t;
      return next;
    }

    case EventKind::Marking: {
      require_dataset(state);
      const CellIndex cell{p.at("node").get<NodeId>(), p.at("edge").get<EdgeId>()};
      if (cell.node >= state.dataset->nodes() || cell.edge >= state.dataset->edges()) {
        throw IndexError("marked cell outside the matrix");
      }
      if (p.at("starred").get<bool>()) {
        next.marks.insert(cell);
      } else {
        next.marks.erase(cell);
      }
      return next;
    }

    case EventKind::Annotation:
      next.notes.push_back({event.seq, p.at("target"), p.at("text").get<std::string>()});
      return next;

    case EventKind::Search:
      return next;

    case EventKind::FeedbackPreview: {
      require_dataset(state);
      if (!state.snapshot) throw StateError("feedback needs a trained model");
      if (state.pending) throw ConflictError("a feedback transaction is already pending");
      expect_equal(p, "before", state.snapshot->id);
      FeedbackSet feedback = feedback_from_json(p.at("feedback"));
      feedback.validate();
      for (const auto& a : feedback.assertions) {
        if (a.node >= state.dataset->nodes() || a.edge >= state.dataset->edges()) {
          throw IndexError("assertion (" + std::to_string(a.node) + ", " + std::to_string(a.edge) +
                           ") outside the matrix");
        }
      }
      auto tx = std::make_shared<FeedbackTransaction>(state.snapshot, feedback);
      if (mode == Mode::Replay) {
        const RefineConfig refine = refine_config_from_json(p.at("refine"));
        const std::string key =
            "preview:" + state.snapshot->id + p.at("feedback").dump() + p.at("refine").dump();
        SnapshotPtr after;
        if (caches) {
          if (auto hit = caches->find(caches->results, key)) after = *hit;
        }
        try {
          if (!after) after = compute_preview(*state.dataset, *state.snapshot, feedback, refine);
          if (caches) caches->put(caches->results, key, after);
          register_snapshot(after);
          tx->set_preview(after);
        } catch (const std::exception& e) {
          tx->set_failure(e.what());
        }
      }
      next.pending = tx;
      next.pending_job = event.seq;
      return next;
    }

    case EventKind::FeedbackAccept:
    case EventKind::FeedbackReject: {
      if (!state.pending) throw StateError("no feedback transaction to resolve");
      if (!state.pending->ready() && !state.pending->diagnostic()) {
        throw StateError("feedback preview is not ready");
      }
      auto tx = std::make_shared<FeedbackTransaction>(*state.pending);
      const bool accept = event.kind == EventKind::FeedbackAccept;
      SnapshotPtr committed = tx->resolve(accept ? Decision::Accept : Decision::Reject);
      expect_equal(p, "snapshot", committed->id);
      next.snapshot = committed;
      next.pending = nullptr;
      next.pending_job.reset();
      return next;
    }

    case EventKind::Undo:
    case EventKind::Checkout:
      return next;
  }
  return next;
}

std::shared_ptr<const SessionState> Engine::rebuild(const std::string& session,
                                                    std::optional<std::uint64_t> seq,
                                                    Caches* caches) const {
  SessionState state = *empty_state(session);
  std::vector<ProvenanceEvent> chain;
  {
    std::lock_guard lock(state_);
    for (std::uint64_t s : log_.effective_chain(seq)) chain.push_back(log_.at(s));
  }
  for (const auto& e : chain) {
    if (e.compute_digest() != e.digest) {
      throw StructureError("digest mismatch on event " + std::to_string(e.seq));
    }
  }
  for (const auto& e : chain) state = apply(state, e, Mode::Replay, caches);
  state.head = seq;
  return std::make_shared<const SessionState>(std::move(state));
}

std::shared_ptr<const SessionState> Engine::replay_to(std::optional<std::uint64_t> seq) const {
  return rebuild("replay", seq, nullptr);
}

std::uint64_t Engine::commit(const std::string& session, EventKind kind, Json payload,
                             std::optional<std::uint64_t> parent,
                             const std::function<SessionState(const ProvenanceEvent&)>& next) {
  ProvenanceEvent provisional;
  {
    std::lock_guard lock(state_);
    provisional.seq = log_.size() + 1;
  }
  provisional.session = session;
  provisional.kind = kind;
  provisional.payload = payload;
  provisional.parent = parent;
  SessionState state = next(provisional);

  std::lock_guard lock(state_);
  const ProvenanceEvent& recorded =
      log_.record(session, kind, std::move(payload), provisional.parent);
  state.head = recorded.seq;
  sessions_[session] = std::make_shared<const SessionState>(std::move(state));
  return recorded.seq;
}

std::string Engine::create_session(const std::string& from, const std::string& id) {
  std::lock_guard w(writer_);
  auto base = current(from);
  std::string name = id;
  if (name.empty()) {
    std::lock_guard lock(state_);
    for (std::size_t i = sessions_.size() + 1;; ++i) {
      name = "s" + std::to_string(i);
      if (!sessions_.count(name) && name != "main") break;
    }
  }
  {
    std::lock_guard lock(state_);
    if (sessions_.count(name) || name == "main") {
      throw NameError("session '" + name + "' already exists");
    }
  }
  Json payload = {{"from", from}, {"restore", base->head ? Json(*base->head) : Json(nullptr)}};
  commit(name, EventKind::Checkout, payload, base->head, [&](const ProvenanceEvent&) {
    auto state = rebuild(name, base->head, caches_.get());
    return *state;
  });
  return name;
}

std::uint64_t Engine::ingest_corpus(const std::string& session, const std::string& corpus_path,
                                    const std::string& ontology_path, TimeBinning binning) {
  std::lock_guard w(writer_);
  const std::string corpus = read_file(corpus_path);
  const std::string ontology = read_file(ontology_path);
  ParsedCorpus parsed = parse_corpus_text(corpus);
  Ontology ont = Ontology::parse_text(ontology);
  IngestResult r = build_temporal_hypergraphs(parsed.documents, ont, binning);
  auto data = make_dataset(std::move(r.explicit_graph), std::move(r.implicit_graph),
                           std::make_shared<const CorpusIndex>(std::move(r.index)));
  Json payload = {{"source", "corpus"},
                  {"corpus", std::filesystem::absolute(corpus_path).string()},
                  {"ontology", std::filesystem::absolute(ontology_path).string()},
                  {"bin", to_string(binning)},
                  {"corpus_digest", Digest().bytes(corpus.data(), corpus.size()).hex()},
                  {"ontology_digest", Digest().bytes(ontology.data(), ontology.size()).hex()},
                  {"documents", parsed.documents.size()},
                  {"skipped_lines", parsed.errors.size()},
                  {"dataset", data->digest}};
  caches_->put(caches_->datasets, "dataset:" + payload.dump(), data);
  auto base = current(session);
  return commit(session, EventKind::Ingest, payload, base->head,
                [&](const ProvenanceEvent& e) { return apply(*base, e, Mode::Live, caches_.get()); });
}

std::uint64_t Engine::generate(const std::string& session, const PlantedConfig& config) {
  std::lock_guard w(writer_);
  PlantedDataset g = generate_planted(config);
  auto data = make_dataset(std::move(g.explicit_graph), std::move(g.implicit_graph), nullptr);
  Json payload = {{"source", "generator"}, {"generator", to_json(config)}, {"dataset", data->digest}};
  caches_->put(caches_->datasets, "dataset:" + payload.dump(), data);
  auto base = current(session);
  return commit(session, EventKind::Ingest, payload, base->head,
                [&](const ProvenanceEvent& e) { return apply(*base, e, Mode::Live, caches_.get()); });
}

std::uint64_t Engine::train(const std::string& session) {
  TrainConfig cfg;
  cfg.hyper = config_.hyper;
  cfg.seed = config_.seed;
  cfg.supervision_fraction = config_.supervision_fraction;
  return train(session, cfg);
}

std::uint64_t Engine::train(const std::string& session, const TrainConfig& config) {
  std::lock_guard w(writer_);
  auto base = current(session);
  require_dataset(*base);
  if (base->pending) throw ConflictError("resolve the pending feedback transaction first");
  const Json train_json = to_json(config);
  const Json refine_json = to_json(config_.refine);
  const std::string key = "train:" + base->dataset->digest + train_json.dump() +
                          refine_json.dump() + std::to_string(config_.horizons);
  SnapshotPtr snap;
  if (auto hit = caches_->find(caches_->results, key)) snap = *hit;
  if (!snap) {
    snap = train_snapshot(*base->dataset, config, config_.refine, config_.horizons);
    caches_->put(caches_->results, key, snap);
  }
  Json payload = {{"train", train_json},
                  {"refine", refine_json},
                  {"horizons", config_.horizons},
                  {"dataset", base->dataset->digest},
                  {"snapshot", snap->id}};
  return commit(session, EventKind::Train, payload, base->head,
                [&](const ProvenanceEvent& e) { return apply(*base, e, Mode::Live, caches_.get()); });
}

std::pair<std::uint64_t, Ordering> Engine::reorder(const std::string& session,
                                                   const OrderingRequest& request) {
  std::lock_guard w(writer_);
  auto base = current(session);
  require_dataset(*base);
  Ordering o = compute_ordering(ordering_source(*base), request);
  o.id = ordering_id(o);
  Json payload = {{"request", to_json(request)},
                  {"ordering", o.id},
                  {"source", base->snapshot ? "prediction" : "observed"}};
  const std::uint64_t seq = commit(session, EventKind::Reorder, payload, base->head, [&](const ProvenanceEvent& e) {
    return apply(*base, e, Mode::Live, caches_.get());
  });
  return {seq, o};
}

std::uint64_t Engine::edit_hierarchy(const std::string& session, Axis axis,
                                     const HierarchyEdit& edit) {
  std::lock_guard w(writer_);
  auto base = current(session);
  Json payload = {{"axis", to_string(axis)}, {"edit", to_json(edit)}};
  return commit(session, EventKind::HierarchyEdit, payload, base->head,
                [&](const ProvenanceEvent& e) { return apply(*base, e, Mode::Live, caches_.get()); });
}

std::uint64_t Engine::set_threshold(const std::string& session, double threshold) {
  std::lock_guard w(writer_);
  auto base = current(session);
  Json payload = {{"threshold", threshold}, {"previous", base->threshold}};
  return commit(session, EventKind::FilterChange, payload, base->head,
                [&](const ProvenanceEvent& e) { return apply(*base, e, Mode::Live, caches_.get()); });
}

std::uint64_t Engine::mark(const std::string& session, CellIndex cell, bool starred) {
  std::lock_guard w(writer_);
  auto base = current(session);
  Json payload = {{"node", cell.node}, {"edge", cell.edge}, {"starred", starred}};
  return commit(session, EventKind::Marking, payload, base->head,
                [&](const ProvenanceEvent& e) { return apply(*base, e, Mode::Live, caches_.get()); });
}

std::uint64_t Engine::annotate(const std::string& session, const Json& target,
                               const std::string& text) {
  std::lock_guard w(writer_);
  auto base = current(session);
  Json payload = {{"target", target}, {"text", text}};
  return commit(session, EventKind::Annotation, payload, base->head,
                [&](const ProvenanceEvent& e) { return apply(*base, e, Mode::Live, caches_.get()); });
}

std::uint64_t Engine::record_search(const std::string& session, const std::string& query) {
  std::lock_guard w(writer_);
  auto base = current(session);
  Json payload = {{"query", query}};
  return commit(session, EventKind::Search, payload, base->head,
                [&](const ProvenanceEvent& e) { return apply(*base, e, Mode::Live, caches_.get()); });
}

std::uint64_t Engine::submit_feedback(const std::string& session, FeedbackSet feedback) {
  std::lock_guard w(writer_);
  auto base = current(session);
  if (base->pending) throw ConflictError("a feedback transaction is already pending");
  feedback.session_id = session;
  Json payload = {{"feedback", to_json(feedback)},
                  {"refine", to_json(config_.refine)},
                  {"before", base->snapshot ? Json(base->snapshot->id) : Json(nullptr)}};
  const std::uint64_t id = commit(session, EventKind::FeedbackPreview, payload, base->head,
                                  [&](const ProvenanceEvent& e) {
                                    return apply(*base, e, Mode::Live, caches_.get());
                                  });
  {
    std::lock_guard lock(state_);
    jobs_[id] = JobStatus{id, session, JobState::Running, std::nullopt, base->snapshot->id, "", 0.0};
  }
  workers_.emplace_back(&Engine::run_job, this, id, session, base->snapshot, std::move(feedback));
  return id;
}

void Engine::run_job(std::uint64_t id, std::string session, SnapshotPtr before,
                     FeedbackSet feedback) {
  const auto started = std::chrono::steady_clock::now();
  std::function<void()> hook;
  std::shared_ptr<const Dataset> data;
  {
    std::lock_guard lock(state_);
    hook = job_hook_;
    data = sessions_.at(session)->dataset;
  }
  if (hook) hook();

  SnapshotPtr after;
  std::optional<std::string> failure;
  try {
    after = compute_preview(*data, *before, feedback, config_.refine);
  } catch (const std::exception& e) {
    failure = e.what();
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  std::lock_guard w(writer_);
  if (after) {
    register_snapshot(after);
    caches_->put(caches_->results,
                 "preview:" + before->id + to_json(feedback).dump() + to_json(config_.refine).dump(),
                 after);
  }
  std::lock_guard lock(state_);
  JobStatus& status = jobs_[id];
  status.seconds = seconds;
  status.state = after ? JobState::PreviewReady : JobState::Failed;
  status.diagnostic = failure;
  if (after) status.after = after->id;

  auto it = sessions_.find(session);
  if (it != sessions_.end() && it->second->pending_job == id && it->second->job_running()) {
    auto next = std::make_shared<SessionState>(*it->second);
    auto tx = std::make_shared<FeedbackTransaction>(*next->pending);
    if (after) {
      tx->set_preview(after);
    } else {
      tx->set_failure(*failure);
    }
    next->pending = tx;
    it->second = next;
  }
  job_done_.notify_all();
}

JobStatus Engine::job(std::uint64_t id) const {
  std::lock_guard lock(state_);
  auto it = jobs_.find(id);
  if (it == jobs_.end()) throw LookupError("unknown job " + std::to_string(id));
  return it->second;
}

JobStatus Engine::wait_job(std::uint64_t id, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(state_);
  auto it = jobs_.find(id);
  if (it == jobs_.end()) throw LookupError("unknown job " + std::to_string(id));
  job_done_.wait_for(lock, timeout, [&] { return jobs_.at(id).state != JobState::Running; });
  return jobs_.at(id);
}

std::uint64_t Engine::resolve_feedback(const std::string& session, Decision decision) {
  std::lock_guard w(writer_);
  auto base = current(session);
  if (!base->pending) throw StateError("no feedback transaction to resolve");
  if (base->job_running()) throw StateError("feedback preview is not ready");
  FeedbackTransaction probe(*base->pending);
  SnapshotPtr committed = probe.resolve(decision);
  Json payload = {{"job", *base->pending_job}, {"snapshot", committed->id}};
  if (decision == Decision::Reject && base->pending->after()) {
    payload["discarded"] = base->pending->after()->id;
  }
  const EventKind kind =
      decision == Decision::Accept ? EventKind::FeedbackAccept : EventKind::FeedbackReject;
  return commit(session, kind, payload, base->head,
                [&](const ProvenanceEvent& e) { return apply(*base, e, Mode::Live, caches_.get()); });
}

std::uint64_t Engine::undo(const std::string& session) {
  std::lock_guard w(writer_);
  auto base = current(session);
  if (base->job_running()) throw ConflictError("cannot undo while a feedback job runs");
  std::pair<std::uint64_t, std::optional<std::uint64_t>> target;
  {
    std::lock_guard lock(state_);
    target = log_.undo_target(session);
  }
  const auto [undone, restore] = target;
  Json payload = {{"undone", undone}, {"restore", restore ? Json(*restore) : Json(nullptr)}};
  return commit(session, EventKind::Undo, payload, base->head, [&](const ProvenanceEvent&) {
    return *rebuild(session, restore, caches_.get());
  });
}

}  // namespace hgx
