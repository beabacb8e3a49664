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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace hgx {

using Json = nlohmann::json;

/// Format version written to and required from log files.
inline constexpr int kLogVersion = 1;

enum class EventKind {
  Ingest,
  Train,
  Reorder,
  HierarchyEdit,
  FilterChange,
  Search,
  FeedbackPreview,
  FeedbackAccept,
  FeedbackReject,
  Annotation,
  Marking,
  Undo,      // marker: payload {"restore": seq|null, "undone": seq}
  Checkout,  // marker: payload {"restore": seq|null}
};

const char* to_string(EventKind kind);
EventKind event_kind_from_string(const std::string& s);  // IncompatibleError if unknown
bool is_marker(EventKind kind);

struct ProvenanceEvent {
  std::uint64_t seq = 0;  // 1-based, strictly increasing
  std::int64_t wall_ms = 0;
  std::string session;
  EventKind kind = EventKind::Ingest;
  Json payload = Json::object();
  std::optional<std::uint64_t> parent;
  std::string digest;

  std::string compute_digest() const;
  Json to_json() const;
  static ProvenanceEvent from_json(const Json& j);
};

/// Append-only event log. Events form a tree through their parents; each
/// session follows one path through it. Optionally mirrored to a file with
/// one JSON record per line after a version header.
class ProvenanceLog {
 public:
  ProvenanceLog() = default;

  /// Loads `path` when it exists, otherwise creates it. Later records are
  /// appended and flushed before record() returns.
  static ProvenanceLog open(const std::filesystem::path& path);
  static ProvenanceLog parse(std::istream& in);
  /// Empty log appending to `sink` (header first); `name` labels errors.
  static ProvenanceLog attach(std::unique_ptr<std::ostream> sink, std::string name);

  ProvenanceLog(ProvenanceLog&&) noexcept = default;
  ProvenanceLog& operator=(ProvenanceLog&&) noexcept = default;

  /// Appends an event. Throws StructureError for an unknown parent and
  /// AvailabilityError (with the event withdrawn) when the file write fails.
  const ProvenanceEvent& record(const std::string& session, EventKind kind, Json payload,
                                std::optional<std::uint64_t> parent);

  const std::vector<ProvenanceEvent>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  const ProvenanceEvent& at(std::uint64_t seq) const;

  /// Most recent event recorded in `session`.
  std::optional<std::uint64_t> head(const std::string& session) const;
  std::vector<std::string> sessions() const;

  /// Events whose effects make up the state after `seq`, oldest first,
  /// with undo and checkout markers resolved. Empty for nullopt.
  std::vector<std::uint64_t> effective_chain(std::optional<std::uint64_t> seq) const;

  /// State the session returns to when its latest undoable event is
  /// undone: {undone event, restore point}. Throws StateError if none.
  std::pair<std::uint64_t, std::optional<std::uint64_t>> undo_target(
      const std::string& session) const;

  /// Recomputes every digest and checks parents; throws StructureError.
  void verify() const;

  std::string serialize() const;
  const std::optional<std::filesystem::path>& path() const { return path_; }

 private:
  std::vector<ProvenanceEvent> events_;
  std::optional<std::filesystem::path> path_;
  std::unique_ptr<std::ostream> out_;
};

/// Applies the chain ending at `up_to` through `apply`. Every event kind on
/// the chain is checked before the first one is applied.
void replay(const ProvenanceLog& log, std::optional<std::uint64_t> up_to,
            const std::function<void(const ProvenanceEvent&)>& apply);

}  // namespace hgx
