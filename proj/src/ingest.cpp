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

#include "hgx/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hgx/errors.hpp"

namespace hgx {

namespace {

using json = nlohmann::json;

int read_int(std::string_view text, std::size_t& pos, std::size_t digits) {
  if (pos + digits > text.size()) throw ParseError("timestamp '" + std::string(text) + "' truncated");
  int value = 0;
  const auto* first = text.data() + pos;
  const auto [ptr, ec] = std::from_chars(first, first + digits, value);
  if (ec != std::errc() || ptr != first + digits) {
    throw ParseError("timestamp '" + std::string(text) + "' has a malformed field");
  }
  pos += digits;
  return value;
}

void expect(std::string_view text, std::size_t& pos, char c) {
  if (pos >= text.size() || text[pos] != c) {
    throw ParseError("timestamp '" + std::string(text) + "': expected '" + std::string(1, c) + "'");
  }
  ++pos;
}

std::string json_string(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<std::int64_t>());
  throw ParseError("expected a string");
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  return a / b - ((a % b != 0) && ((a < 0) != (b < 0)) ? 1 : 0);
}

std::chrono::sys_days day_of(std::int64_t ts) {
  return std::chrono::floor<std::chrono::days>(std::chrono::sys_seconds{std::chrono::seconds{ts}});
}

std::int64_t bin_index(std::int64_t ts, TimeBinning binning) {
  using namespace std::chrono;
  const sys_days d = day_of(ts);
  const year_month_day ymd{d};
  switch (binning) {
    case TimeBinning::Year:
      return static_cast<int>(ymd.year());
    case TimeBinning::Month:
      return static_cast<std::int64_t>(static_cast<int>(ymd.year())) * 12 +
             static_cast<unsigned>(ymd.month()) - 1;
    case TimeBinning::Week:
      // 1970-01-05 was a Monday; weeks run Monday..Sunday.
      return floor_div(d.time_since_epoch().count() - 4, 7);
  }
  return 0;
}

std::string bin_label(std::int64_t index, TimeBinning binning) {
  using namespace std::chrono;
  char buf[64];
  switch (binning) {
    case TimeBinning::Year:
      std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(index));
      break;
    case TimeBinning::Month: {
      const std::int64_t y = floor_div(index, 12);
      std::snprintf(buf, sizeof buf, "%04lld-%02lld", static_cast<long long>(y),
                    static_cast<long long>(index - y * 12 + 1));
      break;
    }
    case TimeBinning::Week: {
      // ISO week: the year owning the week's Thursday.
      const sys_days thursday{days{index * 7 + 7}};
      const year_month_day ymd{thursday};
      const sys_days jan1{ymd.year() / January / 1};
      const auto week = (thursday - jan1).count() / 7 + 1;
      std::snprintf(buf, sizeof buf, "%04d-W%02lld", static_cast<int>(ymd.year()),
                    static_cast<long long>(week));
      break;
    }
  }
  return buf;
}

bool matches_phrase(const std::vector<std::string>& tokens,
                    const std::vector<std::string>& phrase) {
  if (phrase.empty() || phrase.size() > tokens.size()) return false;
  for (std::size_t i = 0; i + phrase.size() <= tokens.size(); ++i) {
    if (std::equal(phrase.begin(), phrase.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
      return true;
    }
  }
  return false;
}

}  // namespace

std::int64_t parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  std::size_t pos = 0;
  const int y = read_int(text, pos, 4);
  expect(text, pos, '-');
  const int mo = read_int(text, pos, 2);
  expect(text, pos, '-');
  const int d = read_int(text, pos, 2);
  const year_month_day ymd{year{y} / month{static_cast<unsigned>(mo)} / day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw ParseError("timestamp '" + std::string(text) + "' is not a valid date");
  std::int64_t seconds = sys_days{ymd}.time_since_epoch().count() * 86400LL;
  if (pos == text.size()) return seconds;

  if (text[pos] != 'T' && text[pos] != ' ') {
    throw ParseError("timestamp '" + std::string(text) + "': expected 'T'");
  }
  ++pos;
  const int hh = read_int(text, pos, 2);
  expect(text, pos, ':');
  const int mm = read_int(text, pos, 2);
  int ss = 0;
  if (pos < text.size() && text[pos] == ':') {
    ++pos;
    ss = read_int(text, pos, 2);
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    }
  }
  if (hh > 23 || mm > 59 || ss > 60) {
    throw ParseError("timestamp '" + std::string(text) + "' has an invalid time of day");
  }
  seconds += hh * 3600LL + mm * 60LL + ss;
  if (pos == text.size()) return seconds;
  if (text[pos] == 'Z' && pos + 1 == text.size()) return seconds;
  if (text[pos] == '+' || text[pos] == '-') {
    const int sign = text[pos] == '+' ? 1 : -1;
    ++pos;
    const int oh = read_int(text, pos, 2);
    expect(text, pos, ':');
    const int om = read_int(text, pos, 2);
    if (pos != text.size()) throw ParseError("timestamp '" + std::string(text) + "' has trailing text");
    return seconds - sign * (oh * 3600LL + om * 60LL);
  }
  throw ParseError("timestamp '" + std::string(text) + "' has trailing text");
}

std::string format_timestamp(std::int64_t seconds) {
  using namespace std::chrono;
  const std::int64_t days = floor_div(seconds, 86400);
  const std::int64_t rem = seconds - days * 86400;
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long long>(rem / 3600), static_cast<long long>(rem / 60 % 60),
                static_cast<long long>(rem % 60));
  return buf;
}

ParsedCorpus parse_corpus(std::istream& in) {
  ParsedCorpus out;
  std::string line;
  std::size_t line_no = 0;
  std::size_t non_blank = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) {
      continue;
    }
    ++non_blank;
    try {
      const json rec = json::parse(line);
      if (!rec.is_object()) throw ParseError("record is not an object");
      RawDocument doc;
      for (const char* field : {"id", "author", "timestamp", "text"}) {
        if (!rec.contains(field) || rec[field].is_null()) {
          throw ParseError(std::string("missing field '") + field + "'");
        }
      }
      doc.id = json_string(rec["id"]);
      doc.author = json_string(rec["author"]);
      if (doc.author.empty()) throw ParseError("empty author");
      doc.timestamp = parse_timestamp(rec["timestamp"].get<std::string>());
      doc.text = rec["text"].get<std::string>();
      if (rec.contains("category") && !rec["category"].is_null()) {
        doc.category = json_string(rec["category"]);
      }
      out.documents.push_back(std::move(doc));
    } catch (const json::exception& e) {
      out.errors.push_back({line_no, e.what()});
    } catch (const Error& e) {
      out.errors.push_back({line_no, e.what()});
    }
  }
  if (non_blank == 0) {
    out.warnings.emplace_back("empty corpus");
  } else if (out.documents.empty()) {
    throw ParseError("no corpus line could be parsed (first error at line " +
                     std::to_string(out.errors.front().line) + ": " + out.errors.front().message +
                     ")");
  }
  return out;
}

ParsedCorpus parse_corpus_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_corpus(in);
}

Ontology Ontology::parse(std::istream& in) {
  using ojson = nlohmann::ordered_json;
  ojson doc;
  try {
    doc = ojson::parse(in);
  } catch (const ojson::exception& e) {
    throw ParseError(std::string("ontology: ") + e.what());
  }
  auto keywords_of = [](const ojson& arr) {
    if (!arr.is_array()) throw ParseError("ontology: keywords must be an array");
    std::vector<std::string> kws;
    for (const auto& k : arr) {
      if (!k.is_string()) throw ParseError("ontology: keywords must be strings");
      // Normalize through the tokenizer so phrases match token sequences.
      const auto tokens = tokenize(k.get<std::string>());
      std::string joined;
      for (const auto& t : tokens) joined += (joined.empty() ? "" : " ") + t;
      kws.push_back(joined);
    }
    return kws;
  };

  Ontology out;
  if (doc.is_object()) {
    for (const auto& [name, kws] : doc.items()) out.topics.push_back({name, keywords_of(kws)});
  } else if (doc.is_array()) {
    for (const auto& t : doc) {
      if (!t.is_object() || !t.contains("name") || !t.contains("keywords")) {
        throw ParseError("ontology: topic entries need 'name' and 'keywords'");
      }
      out.topics.push_back({t["name"].get<std::string>(), keywords_of(t["keywords"])});
    }
  } else {
    throw ParseError("ontology: expected an object or an array");
  }
  out.validate();
  return out;
}

Ontology Ontology::parse_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse(in);
}

void Ontology::validate() const {
  std::set<std::string> seen;
  for (const auto& t : topics) {
    if (t.name.empty()) throw NameError("ontology: empty topic name");
    if (!seen.insert(t.name).second) throw NameError("ontology: duplicate topic '" + t.name + "'");
    if (t.keywords.empty()) throw DomainError("ontology: topic '" + t.name + "' has no keywords");
    for (const auto& k : t.keywords) {
      if (k.empty()) throw DomainError("ontology: topic '" + t.name + "' has an empty keyword");
    }
  }
}

const char* to_string(TimeBinning binning) {
  switch (binning) {
    case TimeBinning::Year: return "year";
    case TimeBinning::Month: return "month";
    case TimeBinning::Week: return "week";
  }
  return "year";
}

TimeBinning binning_from_string(const std::string& name) {
  if (name == "year") return TimeBinning::Year;
  if (name == "month") return TimeBinning::Month;
  if (name == "week") return TimeBinning::Week;
  throw ParseError("unknown time binning '" + name + "'");
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::span<const std::uint32_t> CorpusIndex::documents_of(NodeId node, EdgeId edge,
                                                         TimeIndex t) const {
  const auto it = cell_documents.find(CellKey{node, edge, t});
  if (it == cell_documents.end()) return {};
  return it->second;
}

std::vector<CellKey> CorpusIndex::cells_of_document(std::uint32_t doc) const {
  std::vector<CellKey> out;
  if (doc >= documents.size()) return out;
  const NodeId node = document_author[doc];
  const TimeIndex t = document_bin[doc];
  for (EdgeId e = 0; e < topics.size(); ++e) {
    const auto docs = documents_of(node, e, t);
    if (std::binary_search(docs.begin(), docs.end(), doc)) out.push_back({node, e, t});
  }
  return out;
}

IngestResult build_temporal_hypergraphs(const std::vector<RawDocument>& docs,
                                        const Ontology& ontology, TimeBinning binning) {
  ontology.validate();
  CorpusIndex index;
  index.documents = docs;

  std::vector<std::string> categories;
  std::map<std::string, EdgeId> category_ids;
  for (const auto& d : docs) {
    if (index.author_ids.emplace(d.author, static_cast<NodeId>(index.authors.size())).second) {
      index.authors.push_back(d.author);
    }
    if (d.category &&
        category_ids.emplace(*d.category, static_cast<EdgeId>(categories.size())).second) {
      categories.push_back(*d.category);
    }
  }
  for (const auto& t : ontology.topics) {
    index.topic_ids.emplace(t.name, static_cast<EdgeId>(index.topics.size()));
    index.topics.push_back(t.name);
  }

  std::int64_t first_bin = 0;
  std::int64_t last_bin = 0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const std::int64_t b = bin_index(docs[i].timestamp, binning);
    first_bin = i == 0 ? b : std::min(first_bin, b);
    last_bin = i == 0 ? b : std::max(last_bin, b);
  }
  const std::size_t steps = docs.empty() ? 1 : static_cast<std::size_t>(last_bin - first_bin + 1);
  std::vector<std::string> time_labels;
  for (std::size_t t = 0; t < steps; ++t) {
    time_labels.push_back(bin_label(first_bin + static_cast<std::int64_t>(t), binning));
  }

  std::vector<std::vector<std::string>> phrases;
  std::vector<std::size_t> phrase_topic;
  for (std::size_t k = 0; k < ontology.topics.size(); ++k) {
    for (const auto& kw : ontology.topics[k].keywords) {
      phrases.push_back(tokenize(kw));
      phrase_topic.push_back(k);
    }
  }

  std::vector<std::vector<Membership>> implicit_cells(steps), explicit_cells(steps);
  std::size_t matched = 0;
  for (std::uint32_t i = 0; i < docs.size(); ++i) {
    const auto& d = docs[i];
    const NodeId node = index.author_ids.at(d.author);
    const auto t = static_cast<TimeIndex>(bin_index(d.timestamp, binning) - first_bin);
    auto tokens = tokenize(d.text);
    std::set<std::string> unique(tokens.begin(), tokens.end());
    for (const auto& term : unique) ++index.document_frequency[term];

    std::vector<bool> topic_hit(ontology.topics.size(), false);
    for (std::size_t p = 0; p < phrases.size(); ++p) {
      if (!topic_hit[phrase_topic[p]] && matches_phrase(tokens, phrases[p])) {
        topic_hit[phrase_topic[p]] = true;
      }
    }
    for (EdgeId e = 0; e < topic_hit.size(); ++e) {
      if (!topic_hit[e]) continue;
      ++matched;
      implicit_cells[t].push_back({node, e, 1.0});
      index.cell_documents[CellKey{node, e, t}].push_back(i);
    }
    if (d.category) explicit_cells[t].push_back({node, category_ids.at(*d.category), 1.0});

    index.document_bin.push_back(t);
    index.document_author.push_back(node);
    index.document_tokens.push_back(std::move(tokens));
  }
  if (matched == 0) {
    throw DomainError("unusable ontology: no document matches any topic keyword");
  }

  std::vector<IncidenceMatrix> implicit_steps, explicit_steps;
  for (std::size_t t = 0; t < steps; ++t) {
    implicit_steps.push_back(
        build_incidence(implicit_cells[t], index.authors.size(), index.topics.size()));
    explicit_steps.push_back(
        build_incidence(explicit_cells[t], index.authors.size(), categories.size()));
  }
  TemporalHypergraph explicit_graph(Role::Explicit, index.authors, categories, time_labels,
                                    std::move(explicit_steps));
  TemporalHypergraph implicit_graph(Role::Implicit, index.authors, index.topics, time_labels,
                                    std::move(implicit_steps));
  return {std::move(explicit_graph), std::move(implicit_graph), std::move(index)};
}

std::vector<RankedKeyword> rank_keywords(const CorpusIndex& index,
                                         std::span<const std::uint32_t> docs, std::size_t k) {
  std::map<std::string, std::size_t> tf;
  for (const auto doc : docs) {
    if (doc >= index.document_tokens.size()) continue;
    for (const auto& term : index.document_tokens[doc]) ++tf[term];
  }
  const double n = static_cast<double>(index.documents.size());
  std::vector<RankedKeyword> ranked;
  ranked.reserve(tf.size());
  for (const auto& [term, count] : tf) {
    const auto it = index.document_frequency.find(term);
    const double df = it == index.document_frequency.end() ? 0.0 : it->second;
    const double idf = std::log((1.0 + n) / (1.0 + df)) + 1.0;
    ranked.push_back({term, static_cast<double>(count) * idf});
  }
  // tf is a std::map, so equal scores are already in lexicographic order.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedKeyword& a, const RankedKeyword& b) { return a.score > b.score; });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

std::vector<RankedKeyword> extract_keywords(const CorpusIndex& index, NodeId node, EdgeId edge,
                                            TimeIndex t, std::size_t k) {
  return rank_keywords(index, index.documents_of(node, edge, t), k);
}

}  // namespace hgx
