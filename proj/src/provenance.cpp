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

#include "hgx/provenance.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <sstream>

#include "hgx/digest.hpp"
#include "hgx/errors.hpp"

namespace hgx {

namespace {

constexpr const char* kFormat = "hgx-provenance";

constexpr EventKind kAllKinds[] = {
    EventKind::Ingest,          EventKind::Train,          EventKind::Reorder,
    EventKind::HierarchyEdit,   EventKind::FilterChange,   EventKind::Search,
    EventKind::FeedbackPreview, EventKind::FeedbackAccept, EventKind::FeedbackReject,
    EventKind::Annotation,      EventKind::Marking,        EventKind::Undo,
    EventKind::Checkout,
};

Json header() { return Json{{"format", kFormat}, {"version", kLogVersion}}; }

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::optional<std::uint64_t> restore_point(const ProvenanceEvent& e) {
  const auto it = e.payload.find("restore");
  if (it == e.payload.end() || it->is_null()) return std::nullopt;
  return it->get<std::uint64_t>();
}

}  // namespace

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Ingest: return "ingest";
    case EventKind::Train: return "train";
    case EventKind::Reorder: return "reorder";
    case EventKind::HierarchyEdit: return "hierarchy-edit";
    case EventKind::FilterChange: return "filter-change";
    case EventKind::Search: return "search";
    case EventKind::FeedbackPreview: return "feedback-preview";
    case EventKind::FeedbackAccept: return "feedback-accept";
    case EventKind::FeedbackReject: return "feedback-reject";
    case EventKind::Annotation: return "annotation";
    case EventKind::Marking: return "marking";
    case EventKind::Undo: return "undo";
    case EventKind::Checkout: return "checkout";
  }
  return "?";
}

EventKind event_kind_from_string(const std::string& s) {
  for (EventKind k : kAllKinds) {
    if (s == to_string(k)) return k;
  }
  throw IncompatibleError("unknown provenance event kind '" + s + "'");
}

bool is_marker(EventKind kind) { return kind == EventKind::Undo || kind == EventKind::Checkout; }

Json ProvenanceEvent::to_json() const {
  Json j = {{"seq", seq},
            {"wall_ms", wall_ms},
            {"session", session},
            {"kind", to_string(kind)},
            {"payload", payload},
            {"parent", parent ? Json(*parent) : Json(nullptr)}};
  if (!digest.empty()) j["digest"] = digest;
  return j;
}

std::string ProvenanceEvent::compute_digest() const {
  ProvenanceEvent copy = *this;
  copy.digest.clear();
  return Digest().text(copy.to_json().dump()).hex();
}

ProvenanceEvent ProvenanceEvent::from_json(const Json& j) {
  ProvenanceEvent e;
  try {
    e.seq = j.at("seq").get<std::uint64_t>();
    e.wall_ms = j.at("wall_ms").get<std::int64_t>();
    e.session = j.at("session").get<std::string>();
    e.kind = event_kind_from_string(j.at("kind").get<std::string>());
    e.payload = j.at("payload");
    if (!j.at("parent").is_null()) e.parent = j.at("parent").get<std::uint64_t>();
    e.digest = j.at("digest").get<std::string>();
  } catch (const Json::exception& ex) {
    throw ParseError(std::string("malformed provenance event: ") + ex.what());
  }
  return e;
}

ProvenanceLog ProvenanceLog::parse(std::istream& in) {
  ProvenanceLog log;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& ex) {
      throw ParseError("provenance line " + std::to_string(line_no) + ": " + ex.what());
    }
    if (!have_header) {
      if (!j.is_object() || j.value("format", "") != kFormat) {
        throw IncompatibleError("not a provenance log");
      }
      if (j.value("version", -1) != kLogVersion) {
        throw IncompatibleError("provenance log version " + j.value("version", Json()).dump() +
                                " is not supported (expected " + std::to_string(kLogVersion) +
                                ")");
      }
      have_header = true;
      continue;
    }
    ProvenanceEvent e = ProvenanceEvent::from_json(j);
    if (e.seq != log.events_.size() + 1) {
      throw StructureError("provenance line " + std::to_string(line_no) +
                           ": sequence number out of order");
    }
    log.events_.push_back(std::move(e));
  }
  log.verify();
  return log;
}

ProvenanceLog ProvenanceLog::open(const std::filesystem::path& path) {
  ProvenanceLog log;
  const bool exists = std::filesystem::is_regular_file(path) && std::filesystem::file_size(path) > 0;
  if (exists) {
    std::ifstream in(path);
    if (!in) throw AvailabilityError("cannot read " + path.string());
    log = parse(in);
  }
  log.path_ = path;
  log.out_ = std::make_unique<std::ofstream>(path, std::ios::app);
  if (!*log.out_) throw AvailabilityError("cannot open " + path.string() + " for writing");
  if (!exists) {
    *log.out_ << header().dump() << '\n';
    log.out_->flush();
    if (!*log.out_) throw AvailabilityError("cannot write " + path.string());
  }
  return log;
}

ProvenanceLog ProvenanceLog::attach(std::unique_ptr<std::ostream> sink, std::string name) {
  ProvenanceLog log;
  log.path_ = std::move(name);
  log.out_ = std::move(sink);
  *log.out_ << header().dump() << '\n';
  log.out_->flush();
  if (!*log.out_) throw AvailabilityError("cannot write " + log.path_->string());
  return log;
}

const ProvenanceEvent& ProvenanceLog::record(const std::string& session, EventKind kind,
                                             Json payload, std::optional<std::uint64_t> parent) {
  if (parent && (*parent == 0 || *parent > events_.size())) {
    throw StructureError("unknown parent event " + std::to_string(*parent));
  }
  ProvenanceEvent e;
  e.seq = events_.size() + 1;
  e.wall_ms = now_ms();
  e.session = session;
  e.kind = kind;
  e.payload = std::move(payload);
  e.parent = parent;
  e.digest = e.compute_digest();
  if (out_) {
    *out_ << e.to_json().dump() << '\n';
    out_->flush();
    if (!*out_) {
      out_->clear();
      throw AvailabilityError("provenance write to " + path_->string() + " failed");
    }
  }
  events_.push_back(std::move(e));
  return events_.back();
}

const ProvenanceEvent& ProvenanceLog::at(std::uint64_t seq) const {
  if (seq == 0 || seq > events_.size()) {
    throw LookupError("unknown provenance event " + std::to_string(seq));
  }
  return events_[seq - 1];
}

std::optional<std::uint64_t> ProvenanceLog::head(const std::string& session) const {
  for (auto it = events_.rbegin(); it != events_.rend(); ++it) {
    if (it->session == session) return it->seq;
  }
  return std::nullopt;
}

std::vector<std::string> ProvenanceLog::sessions() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& e : events_) {
    if (seen.insert(e.session).second) out.push_back(e.session);
  }
  return out;
}

std::vector<std::uint64_t> ProvenanceLog::effective_chain(std::optional<std::uint64_t> seq) const {
  std::vector<std::uint64_t> reversed;
  while (seq) {
    const ProvenanceEvent& e = at(*seq);
    if (is_marker(e.kind)) {
      const auto restore = restore_point(e);
      if (restore && *restore >= e.seq) throw StructureError("marker restores a later event");
      seq = restore;
      continue;
    }
    reversed.push_back(e.seq);
    seq = e.parent;
  }
  return {reversed.rbegin(), reversed.rend()};
}

std::pair<std::uint64_t, std::optional<std::uint64_t>> ProvenanceLog::undo_target(
    const std::string& session) const {
  const std::vector<std::uint64_t> chain = effective_chain(head(session));
  for (std::size_t i = chain.size(); i-- > 0;) {
    if (at(chain[i]).kind == EventKind::Search) continue;
    std::optional<std::uint64_t> restore;
    if (i > 0) restore = chain[i - 1];
    return {chain[i], restore};
  }
  throw StateError("nothing to undo in session '" + session + "'");
}

void ProvenanceLog::verify() const {
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const ProvenanceEvent& e = events_[i];
    if (e.seq != i + 1) throw StructureError("sequence numbers are not contiguous");
    if (e.parent && (*e.parent == 0 || *e.parent >= e.seq)) {
      throw StructureError("event " + std::to_string(e.seq) + " has an invalid parent");
    }
    if (e.compute_digest() != e.digest) {
      throw StructureError("digest mismatch on event " + std::to_string(e.seq));
    }
  }
}

std::string ProvenanceLog::serialize() const {
  std::ostringstream out;
  out << header().dump() << '\n';
  for (const auto& e : events_) out << e.to_json().dump() << '\n';
  return out.str();
}

void replay(const ProvenanceLog& log, std::optional<std::uint64_t> up_to,
            const std::function<void(const ProvenanceEvent&)>& apply) {
  const std::vector<std::uint64_t> chain = log.effective_chain(up_to);
  for (std::uint64_t seq : chain) {
    const ProvenanceEvent& e = log.at(seq);
    if (e.compute_digest() != e.digest) {
      throw StructureError("digest mismatch on event " + std::to_string(seq));
    }
  }
  for (std::uint64_t seq : chain) apply(log.at(seq));
}

}  // namespace hgx
