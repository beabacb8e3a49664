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

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "hgx/errors.hpp"
#include "hgx/ingest.hpp"

namespace hgx {
namespace {


RawDocument doc(std::string id, std::string author, std::string when, std::string text,
                std::optional<std::string> category = {}) {
  return {std::move(id), std::move(author), parse_timestamp(when), std::move(text),
          std::move(category)};
}

TEST_SUITE("ingest") {

TEST_CASE("parse_corpus keeps input order") {
  const auto parsed = parse_corpus_text(
      R"({"id":"d1","author":"a","timestamp":"2015-01-01T00:00:00Z","text":"x"}
{"id":"d2","author":"b","timestamp":"2015-02-01","text":"y","category":"c"}
{"id":"d3","author":"a","timestamp":"2016-03-01T10:00:00+02:00","text":"z"})");
  REQUIRE(parsed.documents.size() == 3);
  CHECK(parsed.documents[0].id == "d1");
  CHECK(parsed.documents[1].category == std::optional<std::string>("c"));
  CHECK(parsed.documents[2].id == "d3");
  CHECK(parsed.errors.empty());
}

TEST_CASE("parse_corpus collects per-line errors") {
  const auto parsed = parse_corpus_text(
      R"({"id":"d1","author":"a","timestamp":"2015-01-01","text":"x"}
{"id":"d2","timestamp":"2015-01-01","text":"y"})");
  CHECK(parsed.documents.size() == 1);
  REQUIRE(parsed.errors.size() == 1);
  CHECK(parsed.errors[0].line == 2);
}

TEST_CASE("empty corpus warns, all-bad corpus fails") {
  const auto empty = parse_corpus_text("");
  CHECK(empty.documents.empty());
  REQUIRE(empty.warnings.size() == 1);
  CHECK(empty.warnings[0] == "empty corpus");
  CHECK_THROWS_AS(parse_corpus_text("not json\n{\"id\":1}"), ParseError);
}

TEST_CASE("timestamps") {
  CHECK(parse_timestamp("1970-01-01") == 0);
  CHECK(parse_timestamp("1970-01-02T00:00:01Z") == 86401);
  CHECK(parse_timestamp("1970-01-01T02:00:00+02:00") == 0);
  CHECK(parse_timestamp("2015-03-01T12:00:00.250Z") == parse_timestamp("2015-03-01T12:00:00Z"));
  CHECK_THROWS_AS(parse_timestamp("2015-02-30"), ParseError);
  CHECK_THROWS_AS(parse_timestamp("2015-1-01"), ParseError);
  CHECK_THROWS_AS(parse_timestamp("2015-01-01T25:00"), ParseError);
  for (const std::int64_t t : {0LL, 86399LL, 1277858268LL, -86400LL * 400 + 17}) {
    CHECK(parse_timestamp(format_timestamp(t)) == t);
  }
}

TEST_CASE("ontology formats and validation") {
  const Ontology a = Ontology::parse_text(R"({"market": ["Market", "price rise"], "arms": ["bomb"]})");
  REQUIRE(a.topics.size() == 2);
  CHECK(a.topics[0].name == "market");
  CHECK(a.topics[0].keywords == std::vector<std::string>{"market", "price rise"});
  const Ontology b = Ontology::parse_text(R"([{"name": "arms", "keywords": ["bomb"]}])");
  CHECK(b.topics[0].name == "arms");
  CHECK_THROWS_AS(
      Ontology::parse_text(R"([{"name": "a", "keywords": ["x"]}, {"name": "a", "keywords": ["y"]}])"),
      NameError);
  CHECK_THROWS_AS(Ontology::parse_text(R"({"a": []})"), DomainError);
  CHECK_THROWS_AS(Ontology::parse_text("{"), ParseError);
}

TEST_CASE("tokenize") {
  CHECK(tokenize("The market-price ROSE, 2x!") ==
        std::vector<std::string>{"the", "market", "price", "rose", "2x"});
}

TEST_CASE("keyword containment builds implicit cells") {
  const Ontology o = Ontology::parse_text(R"({"market": ["market"]})");
  const std::vector<RawDocument> docs = {doc("d1", "u1", "2015-06-01", "the market price rose")};
  const IngestResult r = build_temporal_hypergraphs(docs, o, TimeBinning::Year);
  CHECK(r.implicit_graph.at(0).at(0, 0) == 1.0);
  CHECK(r.implicit_graph.time_labels() == std::vector<std::string>{"2015"});
}

TEST_CASE("whole words only") {
  const Ontology o = Ontology::parse_text(R"({"market": ["market"], "other": ["price"]})");
  const std::vector<RawDocument> docs = {doc("d1", "u1", "2015-06-01", "marketplace"),
                                         doc("d2", "u1", "2015-06-01", "price")};
  const IngestResult r = build_temporal_hypergraphs(docs, o, TimeBinning::Year);
  CHECK(r.implicit_graph.at(0).at(0, 0) == 0.0);
  CHECK(r.implicit_graph.at(0).at(0, 1) == 1.0);
}

TEST_CASE("multi-word keywords match token sequences") {
  const Ontology o = Ontology::parse_text(R"({"t": ["price rise"]})");
  const std::vector<RawDocument> docs = {doc("d1", "u1", "2015-06-01", "a Price  rise today"),
                                         doc("d2", "u2", "2015-06-01", "rise price")};
  const IngestResult r = build_temporal_hypergraphs(docs, o, TimeBinning::Year);
  CHECK(r.implicit_graph.at(0).at(0, 0) == 1.0);
  CHECK(r.implicit_graph.at(0).at(1, 0) == 0.0);
}

TEST_CASE("binning covers the calendar range") {
  const Ontology o = Ontology::parse_text(R"({"t": ["x"]})");
  const std::vector<RawDocument> docs = {doc("d1", "a", "2015-06-01", "x"),
                                         doc("d2", "b", "2016-01-01", "x"),
                                         doc("d3", "a", "2016-12-31T23:59:59Z", "x")};
  const IngestResult r = build_temporal_hypergraphs(docs, o, TimeBinning::Year);
  CHECK(r.implicit_graph.node_count() == 2);
  CHECK(r.implicit_graph.timestep_count() == 2);
  CHECK(r.implicit_graph.time_labels() == std::vector<std::string>{"2015", "2016"});
  CHECK(r.implicit_graph.node_labels() == std::vector<std::string>{"a", "b"});

  const IngestResult gap = build_temporal_hypergraphs(
      {doc("d1", "a", "2013-01-01", "x"), doc("d2", "a", "2015-01-01", "x")}, o, TimeBinning::Year);
  CHECK(gap.implicit_graph.time_labels() == std::vector<std::string>{"2013", "2014", "2015"});
  CHECK(gap.implicit_graph.at(1).nonzeros() == 0);

  const IngestResult months = build_temporal_hypergraphs(
      {doc("d1", "a", "2015-11-03", "x"), doc("d2", "a", "2016-01-20", "x")}, o, TimeBinning::Month);
  CHECK(months.implicit_graph.time_labels() ==
        std::vector<std::string>{"2015-11", "2015-12", "2016-01"});
}

TEST_CASE("categories become explicit edges") {
  const Ontology o = Ontology::parse_text(R"({"t": ["x"]})");
  const std::vector<RawDocument> docs = {doc("d1", "a", "2015-06-01", "x", "forum-1"),
                                         doc("d2", "b", "2015-06-01", "y", "forum-2"),
                                         doc("d3", "b", "2015-06-01", "y")};
  const IngestResult r = build_temporal_hypergraphs(docs, o, TimeBinning::Year);
  CHECK(r.explicit_graph.edge_labels() == std::vector<std::string>{"forum-1", "forum-2"});
  CHECK(r.explicit_graph.at(0).at(0, 0) == 1.0);
  CHECK(r.explicit_graph.at(0).at(1, 1) == 1.0);
  CHECK(r.explicit_graph.at(0).at(0, 1) == 0.0);
}

TEST_CASE("no topic matches is a domain error") {
  const Ontology o = Ontology::parse_text(R"({"t": ["x"]})");
  CHECK_THROWS_AS(build_temporal_hypergraphs({doc("d1", "a", "2015-06-01", "y")}, o, TimeBinning::Year),
                  DomainError);
}

TEST_CASE("corpus index maps are consistent") {
  const Ontology o = Ontology::parse_text(R"({"m": ["market"], "p": ["price"]})");
  const std::vector<RawDocument> docs = {doc("d1", "a", "2015-06-01", "market price"),
                                         doc("d2", "b", "2016-06-01", "market"),
                                         doc("d3", "a", "2016-06-01", "nothing")};
  const IngestResult r = build_temporal_hypergraphs(docs, o, TimeBinning::Year);
  const CorpusIndex& ix = r.index;
  CHECK(ix.documents.size() == 3);
  for (const auto& [name, id] : ix.author_ids) CHECK(ix.authors[id] == name);
  for (const auto& [name, id] : ix.topic_ids) CHECK(ix.topics[id] == name);
  const auto d1 = ix.documents_of(0, 0, 0);
  REQUIRE(d1.size() == 1);
  CHECK(ix.documents[d1[0]].id == "d1");
  CHECK(ix.cells_of_document(0).size() == 2);
  CHECK(ix.cells_of_document(2).empty());
  CHECK(ix.documents_of(1, 1, 0).empty());
  for (const auto& [key, list] : ix.cell_documents) {
    CHECK(r.implicit_graph.at(key.time).at(key.node, key.edge) == 1.0);
    CHECK(std::is_sorted(list.begin(), list.end()));
  }
}

TEST_CASE("tf-idf keywords, computed by hand") {
  const Ontology o = Ontology::parse_text(R"({"m": ["market"]})");
  const std::vector<RawDocument> docs = {doc("d1", "a", "2015-06-01", "bomb bomb market"),
                                         doc("d2", "b", "2015-06-01", "market price")};
  const IngestResult r = build_temporal_hypergraphs(docs, o, TimeBinning::Year);
  const auto top = extract_keywords(r.index, 0, 0, 0, 1);
  REQUIRE(top.size() == 1);
  CHECK(top[0].term == "bomb");
  // tf 2, df 1 of N 2: 2 * (ln(3/2) + 1).
  CHECK(top[0].score == doctest::Approx(2.0 * (std::log(1.5) + 1.0)));

  const auto all = extract_keywords(r.index, 0, 0, 0, 10);
  REQUIRE(all.size() == 2);
  CHECK(all[1].term == "market");
  CHECK(all[1].score == doctest::Approx(1.0));
  CHECK(extract_keywords(r.index, 1, 0, 0, 0).empty());
}

TEST_CASE("empty cell has no keywords") {
  const Ontology o = Ontology::parse_text(R"({"m": ["market"]})");
  const IngestResult r =
      build_temporal_hypergraphs({doc("d1", "a", "2015-06-01", "market")}, o, TimeBinning::Year);
  CHECK(extract_keywords(r.index, 0, 0, 0, 5).size() == 1);
  const std::vector<std::uint32_t> none;
  CHECK(rank_keywords(r.index, none, 5).empty());
}

}  // TEST_SUITE

}  // namespace
}  // namespace hgx
