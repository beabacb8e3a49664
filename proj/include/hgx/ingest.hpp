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

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "hgx/hypergraph.hpp"

namespace hgx {

struct RawDocument {
  std::string id;
  std::string author;
  std::int64_t timestamp = 0;  // seconds since the Unix epoch, UTC
  std::string text;
  std::optional<std::string> category;
};

struct CorpusLineError {
  std::size_t line = 0;  // 1-based
  std::string message;
};

struct ParsedCorpus {
  std::vector<RawDocument> documents;
  std::vector<CorpusLineError> errors;
  std::vector<std::string> warnings;
};

/// Reads line-delimited JSON records
///   {"id": .., "author": .., "timestamp": "2015-03-01T12:00:00Z", "text": .., "category": ..}
/// Malformed lines are collected in `errors`; throws ParseError only when
/// every non-blank line fails.
ParsedCorpus parse_corpus(std::istream& in);
ParsedCorpus parse_corpus_text(std::string_view text);

/// Parses an ISO-8601 date or date-time; a missing offset means UTC.
/// Throws ParseError.
std::int64_t parse_timestamp(std::string_view text);

/// Inverse of parse_timestamp: "YYYY-MM-DDThh:mm:ssZ".
std::string format_timestamp(std::int64_t seconds);

struct Topic {
  std::string name;
  std::vector<std::string> keywords;  // lowercase; may be multi-word phrases
};

struct Ontology {
  std::vector<Topic> topics;

  /// Accepts either {"topic": ["kw", ..], ..} (file order kept) or
  /// [{"name": .., "keywords": [..]}, ..]. Throws ParseError / NameError.
  static Ontology parse(std::istream& in);
  static Ontology parse_text(std::string_view text);

  /// Throws NameError for duplicate names, DomainError for empty keywords.
  void validate() const;
};

enum class TimeBinning { Year, Month, Week };

const char* to_string(TimeBinning binning);
TimeBinning binning_from_string(const std::string& name);

/// Lowercased alphanumeric tokens in text order.
std::vector<std::string> tokenize(std::string_view text);

struct CellKey {
  NodeId node = 0;
  EdgeId edge = 0;
  TimeIndex time = 0;
  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

/// Raw-content index behind the keyword and document views.
struct CorpusIndex {
  std::vector<RawDocument> documents;
  std::vector<TimeIndex> document_bin;                 // parallel to documents
  std::vector<NodeId> document_author;                 // parallel to documents
  std::vector<std::vector<std::string>> document_tokens;  // parallel to documents
  std::vector<std::string> authors;                    // NodeId -> label
  std::vector<std::string> topics;                     // EdgeId -> name
  std::map<std::string, NodeId> author_ids;
  std::map<std::string, EdgeId> topic_ids;
  std::map<CellKey, std::vector<std::uint32_t>> cell_documents;  // ascending doc indices
  std::map<std::string, std::uint32_t> document_frequency;

  /// Document indices of one implicit cell (empty if none).
  std::span<const std::uint32_t> documents_of(NodeId node, EdgeId edge, TimeIndex t) const;

  /// Implicit cells (topic memberships) a document contributes to.
  std::vector<CellKey> cells_of_document(std::uint32_t doc) const;

  friend bool operator==(const CorpusIndex&, const CorpusIndex&) = default;
};

struct IngestResult {
  TemporalHypergraph explicit_graph;  // forum categories as edges
  TemporalHypergraph implicit_graph;  // ontology topics as edges
  CorpusIndex index;
};

/// Authors become nodes in first-appearance order; topics become edges in
/// ontology order. Bins cover the contiguous calendar range between the
/// earliest and latest document. Throws DomainError when no document matches
/// any topic.
IngestResult build_temporal_hypergraphs(const std::vector<RawDocument>& docs,
                                        const Ontology& ontology, TimeBinning binning);

struct RankedKeyword {
  std::string term;
  double score = 0.0;
  friend bool operator==(const RankedKeyword&, const RankedKeyword&) = default;
};

/// Top-k tf-idf terms of a set of documents, idf = ln((1+N)/(1+df)) + 1 over
/// the whole corpus. Ties go to the lexicographically smaller term.
std::vector<RankedKeyword> rank_keywords(const CorpusIndex& index,
                                         std::span<const std::uint32_t> docs, std::size_t k);

std::vector<RankedKeyword> extract_keywords(const CorpusIndex& index, NodeId node, EdgeId edge,
                                            TimeIndex t, std::size_t k);

}  // namespace hgx
