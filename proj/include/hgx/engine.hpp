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

#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "hgx/config.hpp"
#include "hgx/feedback.hpp"
#include "hgx/hierarchy.hpp"
#include "hgx/ingest.hpp"
#include "hgx/provenance.hpp"
#include "hgx/reorder.hpp"
#include "hgx/synthetic.hpp"

namespace hgx {

/// Loaded data: both hypergraphs, the optional corpus behind them and the
/// relatedness operator of the explicit graph's latest slice.
struct Dataset {
  TemporalHypergraph explicit_graph;
  TemporalHypergraph implicit_graph;
  std::shared_ptr<const CorpusIndex> index;  // null for generated data
  LaplacianMatrix laplacian;
  std::string digest;

  std::size_t nodes() const { return implicit_graph.node_count(); }
  std::size_t edges() const { return implicit_graph.edge_count(); }
  std::size_t timesteps() const { return implicit_graph.timestep_count(); }
};

std::shared_ptr<const Dataset> make_dataset(TemporalHypergraph explicit_graph,
                                            TemporalHypergraph implicit_graph,
                                            std::shared_ptr<const CorpusIndex> index);

struct Note {
  std::uint64_t id = 0;
  Json target;
  std::string text;
};

/// One analysis session. Values are immutable once published; every change
/// produces a new state.
struct SessionState {
  std::string id;
  std::optional<std::uint64_t> head;
  std::shared_ptr<const Dataset> dataset;
  SnapshotPtr snapshot;
  std::optional<TrainConfig> train_config;
  double threshold = 0.5;

  std::map<std::string, Ordering> orderings;
  std::string row_ordering;  // empty: identity
  std::string col_ordering;

  std::vector<std::shared_ptr<const PartitionTree>> row_trees;  // append-only history
  std::vector<std::shared_ptr<const PartitionTree>> col_trees;
  std::vector<std::pair<std::size_t, std::size_t>> hierarchy_versions;

  std::set<CellIndex> marks;
  std::vector<Note> notes;

  std::shared_ptr<const FeedbackTransaction> pending;
  std::optional<std::uint64_t> pending_job;

  std::size_t hierarchy_version() const { return hierarchy_versions.size() - 1; }
  const PartitionTree& row_tree(std::optional<std::size_t> version = {}) const;
  const PartitionTree& col_tree(std::optional<std::size_t> version = {}) const;
  const Ordering* active_ordering(Axis axis) const;
  bool job_running() const { return pending && !pending->ready() && !pending->diagnostic(); }
};

enum class JobState { Running, PreviewReady, Failed };
const char* to_string(JobState s);

struct JobStatus {
  std::uint64_t id = 0;
  std::string session;
  JobState state = JobState::Running;
  std::optional<std::string> diagnostic;
  std::string before;
  std::string after;
  double seconds = 0.0;
};

/// The engine behind the CLI and the HTTP service. Every state-changing
/// call records exactly one provenance event; state is rebuilt from the log
/// by replay, so live and replayed sessions go through the same code.
class Engine {
 public:
  explicit Engine(EngineConfig config = {}, ProvenanceLog log = {});
  ~Engine();
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  /// Opens <dir>/provenance.log (created when missing) and replays every
  /// session in it.
  static std::unique_ptr<Engine> open(const std::filesystem::path& data_dir,
                                      EngineConfig config = {});

  const EngineConfig& config() const { return config_; }

  std::shared_ptr<const SessionState> session(const std::string& id) const;
  std::vector<std::string> sessions() const;

  /// New session starting from the current state of `from`.
  std::string create_session(const std::string& from, const std::string& id = "");

  std::uint64_t ingest_corpus(const std::string& session, const std::string& corpus_path,
                              const std::string& ontology_path, TimeBinning binning);
  std::uint64_t generate(const std::string& session, const PlantedConfig& config);
  std::uint64_t train(const std::string& session, const TrainConfig& config);
  std::uint64_t train(const std::string& session);  // engine defaults
  std::pair<std::uint64_t, Ordering> reorder(const std::string& session,
                                             const OrderingRequest& request);
  std::uint64_t edit_hierarchy(const std::string& session, Axis axis, const HierarchyEdit& edit);
  std::uint64_t set_threshold(const std::string& session, double threshold);
  std::uint64_t mark(const std::string& session, CellIndex cell, bool starred);
  std::uint64_t annotate(const std::string& session, const Json& target, const std::string& text);
  std::uint64_t record_search(const std::string& session, const std::string& query);

  /// Starts an asynchronous preview; the returned job id is the sequence
  /// number of the recorded feedback-preview event.
  std::uint64_t submit_feedback(const std::string& session, FeedbackSet feedback);
  JobStatus job(std::uint64_t id) const;
  /// Blocks until the job leaves the running state or `timeout` elapses.
  JobStatus wait_job(std::uint64_t id, std::chrono::milliseconds timeout) const;
  std::uint64_t resolve_feedback(const std::string& session, Decision decision);

  std::uint64_t undo(const std::string& session);

  SnapshotPtr snapshot(const std::string& id) const;
  std::vector<ProvenanceEvent> events() const;
  std::size_t event_count() const;

  /// Fresh state rebuilt from the log up to `seq`, bypassing all caches.
  std::shared_ptr<const SessionState> replay_to(std::optional<std::uint64_t> seq) const;

  /// Test hook run at the start of every feedback job.
  void set_job_hook(std::function<void()> hook);

 private:
  struct Caches;
  enum class Mode { Live, Replay };

  std::shared_ptr<const SessionState> current(const std::string& session) const;
  std::shared_ptr<const SessionState> empty_state(const std::string& session) const;
  SessionState apply(const SessionState& state, const ProvenanceEvent& event, Mode mode,
                     Caches* caches) const;
  std::shared_ptr<const SessionState> rebuild(const std::string& session,
                                              std::optional<std::uint64_t> seq,
                                              Caches* caches) const;
  std::uint64_t commit(const std::string& session, EventKind kind, Json payload,
                       std::optional<std::uint64_t> parent,
                       const std::function<SessionState(const ProvenanceEvent&)>& next);
  void run_job(std::uint64_t id, std::string session, SnapshotPtr before, FeedbackSet feedback);
  void register_snapshot(const SnapshotPtr& s) const;

  EngineConfig config_;
  ProvenanceLog log_;
  std::unique_ptr<Caches> caches_;
  std::map<std::string, std::shared_ptr<const SessionState>> sessions_;
  std::map<std::uint64_t, JobStatus> jobs_;
  std::vector<std::thread> workers_;
  std::function<void()> job_hook_;

  mutable std::mutex writer_;  // serializes state changes
  mutable std::mutex state_;   // guards the members above for readers
  mutable std::condition_variable job_done_;
};

}  // namespace hgx
