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

#include <fstream>
#include <sstream>
#include <streambuf>
#include <vector>

#include "doctest.h"
#include "hgx/errors.hpp"
#include "hgx/provenance.hpp"
#include "support.hpp"

namespace hgx {
namespace {

using namespace testing;

// Stream buffer that accepts writes until `broken` is set.
class Breakable : public std::streambuf {
 public:
  bool broken = false;
  std::string data;

 protected:
  int_type overflow(int_type c) override {
    if (broken) return traits_type::eof();
    if (c != traits_type::eof()) data.push_back(static_cast<char>(c));
    return traits_type::not_eof(c);
  }
  std::streamsize xsputn(const char* s, std::streamsize n) override {
    if (broken) return 0;
    data.append(s, static_cast<std::size_t>(n));
    return n;
  }
};

class BreakableStream : public std::ostream {
 public:
  BreakableStream() : std::ostream(&buf) {}
  Breakable buf;
};

std::vector<std::uint64_t> chain(const ProvenanceLog& log, std::optional<std::uint64_t> seq) {
  return log.effective_chain(seq);
}

TEST_SUITE("provenance") {

TEST_CASE("recorded events keep payload and sequence") {
  ProvenanceLog log;
  const auto& a = log.record("main", EventKind::Train, {{"seed", 42}}, std::nullopt);
  CHECK(a.seq == 1);
  const auto& b = log.record("main", EventKind::Reorder, Json::object(), 1);
  CHECK(b.seq == 2);
  CHECK(log.at(1).payload["seed"] == 42);
  CHECK(log.head("main") == std::optional<std::uint64_t>(2));
  CHECK(!log.head("other"));
  CHECK_THROWS_AS(log.record("main", EventKind::Train, {}, 7), StructureError);
  CHECK_THROWS_AS(log.at(9), LookupError);
}

TEST_CASE("digests cover the payload bit-exactly") {
  ProvenanceLog log;
  const auto& e = log.record("main", EventKind::FilterChange, {{"threshold", 0.5}}, std::nullopt);
  ProvenanceEvent copy = e;
  CHECK(copy.compute_digest() == e.digest);
  copy.payload["threshold"] = std::nextafter(0.5, 1.0);
  CHECK(copy.compute_digest() != e.digest);
  const ProvenanceEvent back = ProvenanceEvent::from_json(e.to_json());
  CHECK(back.digest == e.digest);
  CHECK(back.compute_digest() == e.digest);
}

TEST_CASE("serialize and parse round-trip") {
  ProvenanceLog log;
  log.record("main", EventKind::Ingest, {{"source", "generator"}}, std::nullopt);
  log.record("main", EventKind::Annotation, {{"text", "ünïcode \"quoted\""}}, 1);
  std::istringstream in(log.serialize());
  const ProvenanceLog back = ProvenanceLog::parse(in);
  REQUIRE(back.size() == 2);
  CHECK(back.at(2).payload == log.at(2).payload);
  CHECK(back.at(2).digest == log.at(2).digest);
}

TEST_CASE("tampering and version mismatches are detected") {
  ProvenanceLog log;
  log.record("main", EventKind::Train, {{"seed", 42}}, std::nullopt);
  std::string text = log.serialize();
  std::string tampered = text;
  tampered.replace(tampered.find("42"), 2, "43");
  std::istringstream bad(tampered);
  CHECK_THROWS_AS(ProvenanceLog::parse(bad), StructureError);

  std::string future = text;
  future.replace(future.find("\"version\":1"), 11, "\"version\":9");
  std::istringstream later(future);
  CHECK_THROWS_AS(ProvenanceLog::parse(later), IncompatibleError);

  std::istringstream unknown(
      text.substr(0, text.find('\n') + 1) +
      R"({"digest":"0","kind":"teleport","parent":null,"payload":{},"seq":1,"session":"main","wall_ms":0})" "\n");
  CHECK_THROWS_AS(ProvenanceLog::parse(unknown), IncompatibleError);
  std::istringstream garbage("not a log\n");
  CHECK_THROWS((void)ProvenanceLog::parse(garbage));
}

TEST_CASE("open appends to an existing file") {
  testing::TempDir dir;
  const auto path = dir / "provenance.log";
  {
    ProvenanceLog log = ProvenanceLog::open(path);
    log.record("main", EventKind::Ingest, {}, std::nullopt);
  }
  {
    ProvenanceLog log = ProvenanceLog::open(path);
    CHECK(log.size() == 1);
    log.record("main", EventKind::Train, {}, 1);
  }
  ProvenanceLog log = ProvenanceLog::open(path);
  CHECK(log.size() == 2);
  CHECK(log.at(2).parent == std::optional<std::uint64_t>(1));
}

TEST_CASE("unwritable destinations are availability errors") {
  if (std::filesystem::exists("/dev/full")) {
    CHECK_THROWS_AS(ProvenanceLog::open("/dev/full"), AvailabilityError);
  }
  auto sink = std::make_unique<BreakableStream>();
  Breakable& buf = sink->buf;
  ProvenanceLog log = ProvenanceLog::attach(std::move(sink), "memory");
  log.record("main", EventKind::Ingest, {}, std::nullopt);
  buf.broken = true;
  CHECK_THROWS_AS(log.record("main", EventKind::Train, {}, 1), AvailabilityError);
  CHECK(log.size() == 1);
  buf.broken = false;
  CHECK(log.record("main", EventKind::Train, {}, 1).seq == 2);
  std::istringstream in(buf.data);
  CHECK(ProvenanceLog::parse(in).size() == 2);
}

TEST_CASE("undo markers resolve in the effective chain") {
  ProvenanceLog log;
  log.record("main", EventKind::Ingest, {}, std::nullopt);  // 1
  log.record("main", EventKind::Train, {}, 1);              // 2
  log.record("main", EventKind::Search, {}, 2);             // 3
  CHECK(chain(log, 3) == std::vector<std::uint64_t>{1, 2, 3});
  const auto [undone, restore] = log.undo_target("main");
  CHECK(undone == 2);
  CHECK(restore == std::optional<std::uint64_t>(1));
  log.record("main", EventKind::Undo, {{"undone", 2}, {"restore", 1}}, 3);  // 4
  CHECK(chain(log, 4) == std::vector<std::uint64_t>{1});
  log.record("main", EventKind::Reorder, {}, 4);  // 5
  CHECK(chain(log, 5) == std::vector<std::uint64_t>{1, 5});
  const auto second = log.undo_target("main");
  CHECK(second.first == 5);
  log.record("main", EventKind::Undo, {{"undone", 5}, {"restore", 1}}, 5);  // 6
  const auto third = log.undo_target("main");
  CHECK(third.first == 1);
  CHECK(!third.second);
  log.record("main", EventKind::Undo, {{"undone", 1}, {"restore", nullptr}}, 6);  // 7
  CHECK(chain(log, 7).empty());
  CHECK_THROWS_AS(log.undo_target("main"), StateError);
  CHECK_THROWS_AS(ProvenanceLog{}.undo_target("main"), StateError);
}

TEST_CASE("branches share a prefix and leave the trunk alone") {
  ProvenanceLog log;
  log.record("main", EventKind::Ingest, {}, std::nullopt);            // 1
  log.record("main", EventKind::Train, {}, 1);                        // 2
  log.record("alt", EventKind::Checkout, {{"restore", 2}}, 2);        // 3
  log.record("alt", EventKind::Reorder, {}, 3);                       // 4
  log.record("main", EventKind::FilterChange, {}, 2);                 // 5
  CHECK(chain(log, log.head("alt")) == std::vector<std::uint64_t>{1, 2, 4});
  CHECK(chain(log, log.head("main")) == std::vector<std::uint64_t>{1, 2, 5});
  CHECK(log.sessions().size() == 2);
  CHECK(log.undo_target("alt").first == 4);
}

TEST_CASE("replay checks digests before applying") {
  ProvenanceLog log;
  log.record("main", EventKind::Ingest, {}, std::nullopt);
  log.record("main", EventKind::Train, {{"seed", 42}}, 1);
  log.record("main", EventKind::Reorder, {}, 2);
  std::vector<std::uint64_t> seen;
  replay(log, 2, [&](const ProvenanceEvent& e) { seen.push_back(e.seq); });
  CHECK(seen == std::vector<std::uint64_t>{1, 2});
  seen.clear();
  replay(log, std::nullopt, [&](const ProvenanceEvent& e) { seen.push_back(e.seq); });
  CHECK(seen.empty());
}

TEST_CASE("kind names round-trip") {
  for (int k = 0; k <= static_cast<int>(EventKind::Checkout); ++k) {
    const auto kind = static_cast<EventKind>(k);
    CHECK(event_kind_from_string(to_string(kind)) == kind);
  }
  CHECK(is_marker(EventKind::Undo));
  CHECK(!is_marker(EventKind::Train));
}

}  // TEST_SUITE

}  // namespace
}  // namespace hgx
