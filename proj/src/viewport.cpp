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

#include "hgx/viewport.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "hgx/errors.hpp"
#include "hgx/serialize.hpp"

namespace hgx {

namespace {

// Strengths and deltas are served rounded to this step.
constexpr double kPrecision = 1e-6;

double rounded(double v) { return std::round(v * 1e6) / 1e6; }

AxisLayout axis_layout(const PartitionTree& tree, const Ordering* ordering) {
  AxisLayout out;
  std::vector<std::size_t> rank;
  if (ordering) rank = ordering->rank();
  out.entries = tree.visible(rank);
  out.position.assign(tree.leaf_count(), 0);
  for (std::size_t i = 0; i < out.entries.size(); ++i) {
    for (std::size_t leaf : out.entries[i].leaves) out.position[leaf] = i;
  }
  return out;
}

const Ordering* pick_ordering(const SessionState& s, Axis axis, const std::optional<std::string>& id) {
  if (!id) return s.active_ordering(axis);
  if (id->empty() || *id == "identity") return nullptr;
  auto it = s.orderings.find(*id);
  if (it == s.orderings.end()) throw LookupError("unknown ordering '" + *id + "'");
  if (it->second.axis != axis) throw DomainError("ordering '" + *id + "' is for the other axis");
  return &it->second;
}

/// Value of one leaf cell in the selected matrix.
struct Source {
  const IncidenceMatrix* observed = nullptr;
  const Eigen::MatrixXd* dense = nullptr;

  double at(std::size_t r, std::size_t c) const {
    if (dense) return (*dense)(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    return observed->at(static_cast<NodeId>(r), static_cast<EdgeId>(c));
  }
};

double aggregate(const Source& src, const VisibleEntry& row, const VisibleEntry& col,
                 Aggregator aggregator) {
  if (row.leaves.size() == 1 && col.leaves.size() == 1) return src.at(row.leaves[0], col.leaves[0]);
  double acc = aggregator == Aggregator::Max ? -std::numeric_limits<double>::infinity() : 0.0;
  for (std::size_t r : row.leaves) {
    for (std::size_t c : col.leaves) {
      const double v = src.at(r, c);
      acc = aggregator == Aggregator::Max ? std::max(acc, v) : acc + v;
    }
  }
  if (aggregator == Aggregator::Mean) {
    acc /= static_cast<double>(row.leaves.size() * col.leaves.size());
  }
  return acc;
}

struct TimeSelection {
  std::size_t index = 0;
  bool predicted = false;
  int horizon = 0;
  double confidence = 1.0;
  std::string label;
};

std::size_t horizons(const SessionState& s) {
  return s.snapshot ? s.snapshot->forecast.predictions.size() : 0;
}

TimeSelection select_time(const SessionState& s, std::optional<std::size_t> requested) {
  const std::size_t t = s.dataset->timesteps();
  const std::size_t h = horizons(s);
  const std::size_t index = requested.value_or(h > 0 ? t : t - 1);
  if (index >= t + h) {
    throw IndexError("timestep " + std::to_string(index) + " outside 0.." +
                     std::to_string(t + h - 1));
  }
  TimeSelection sel;
  sel.index = index;
  if (index < t) {
    sel.label = s.dataset->implicit_graph.time_labels()[index];
    return sel;
  }
  sel.predicted = true;
  sel.horizon = static_cast<int>(index - t + 1);
  sel.confidence = s.snapshot->forecast.predictions[index - t].confidence;
  sel.label = "+" + std::to_string(sel.horizon);
  return sel;
}

const FeedbackTransaction& ready_preview(const SessionState& s) {
  if (!s.pending || !s.pending->ready()) throw StateError("no feedback preview is ready");
  return *s.pending;
}

Source source_for(const SessionState& s, const TimeSelection& sel, bool change) {
  if (change) {
    if (!sel.predicted) throw DomainError("change mode needs a predicted timestep");
    return {nullptr, &ready_preview(s).changes()[static_cast<std::size_t>(sel.horizon - 1)].delta};
  }
  if (sel.predicted) {
    return {nullptr, &s.snapshot->forecast.predictions[static_cast<std::size_t>(sel.horizon - 1)].values};
  }
  return {&s.dataset->implicit_graph.at(static_cast<TimeIndex>(sel.index)), nullptr};
}

std::string entry_label(const VisibleEntry& e, const std::vector<std::string>& labels) {
  if (e.group) return *e.group;
  return labels[e.leaves.front()];
}

Json axis_json(const AxisLayout& axis, std::size_t begin, std::size_t end,
               const std::vector<std::string>& labels) {
  Json entries = Json::array();
  for (std::size_t i = begin; i < end; ++i) {
    const VisibleEntry& e = axis.entries[i];
    Json j = to_json(e);
    j["index"] = i;
    j["label"] = entry_label(e, labels);
    entries.push_back(std::move(j));
  }
  return {{"begin", begin}, {"end", end}, {"total", axis.entries.size()}, {"entries", entries}};
}

/// Documents behind a visible cell: all leaf cells, restricted to one bin
/// when an observed timestep is selected, otherwise across the history.
std::vector<std::uint32_t> cell_documents(const SessionState& s, const VisibleEntry& row,
                                          const VisibleEntry& col, const TimeSelection& sel) {
  std::vector<std::uint32_t> docs;
  if (!s.dataset->index) return docs;
  const CorpusIndex& index = *s.dataset->index;
  const std::size_t t_end = sel.predicted ? s.dataset->timesteps() : sel.index + 1;
  const std::size_t t_begin = sel.predicted ? 0 : sel.index;
  for (std::size_t r : row.leaves) {
    for (std::size_t c : col.leaves) {
      for (std::size_t t = t_begin; t < t_end; ++t) {
        auto d = index.documents_of(static_cast<NodeId>(r), static_cast<EdgeId>(c),
                                    static_cast<TimeIndex>(t));
        docs.insert(docs.end(), d.begin(), d.end());
      }
    }
  }
  std::sort(docs.begin(), docs.end());
  docs.erase(std::unique(docs.begin(), docs.end()), docs.end());
  return docs;
}

Json timeline_json(const SessionState& s, const VisibleEntry& row, const VisibleEntry& col,
                   bool change, Aggregator aggregator) {
  Json history = Json::array();
  for (std::size_t t = 0; t < s.dataset->timesteps(); ++t) {
    Source src{&s.dataset->implicit_graph.at(static_cast<TimeIndex>(t)), nullptr};
    history.push_back(rounded(aggregate(src, row, col, aggregator)));
  }
  Json predicted = Json::array();
  Json confidence = Json::array();
  for (std::size_t h = 0; h < horizons(s); ++h) {
    const Eigen::MatrixXd& m = change ? ready_preview(s).changes()[h].delta
                                      : s.snapshot->forecast.predictions[h].values;
    predicted.push_back(rounded(aggregate({nullptr, &m}, row, col, aggregator)));
    confidence.push_back(s.snapshot->forecast.predictions[h].confidence);
  }
  return {{"history", std::move(history)},
          {"predicted", std::move(predicted)},
          {"confidence", std::move(confidence)}};
}

Json document_json(const SessionState& s, std::uint32_t doc, std::size_t excerpt_chars) {
  const CorpusIndex& index = *s.dataset->index;
  const RawDocument& d = index.documents[doc];
  Json j = {{"id", d.id},
            {"index", doc},
            {"author", d.author},
            {"timestamp", format_timestamp(d.timestamp)},
            {"time", index.document_bin[doc]},
            {"time_label", s.dataset->implicit_graph.time_labels()[index.document_bin[doc]]},
            {"excerpt", d.text.substr(0, excerpt_chars)},
            {"truncated", d.text.size() > excerpt_chars}};
  j["category"] = d.category ? Json(*d.category) : Json(nullptr);
  return j;
}

void check_range(std::size_t begin, std::size_t end, std::size_t total, const char* axis) {
  if (begin >= end || end > total) {
    throw IndexError(std::string(axis) + " range [" + std::to_string(begin) + ", " +
                     std::to_string(end) + ") outside 0.." + std::to_string(total));
  }
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

Json spans_of(const std::string& haystack_lower, const std::string& needle) {
  Json spans = Json::array();
  for (std::size_t pos = haystack_lower.find(needle); pos != std::string::npos;
       pos = haystack_lower.find(needle, pos + 1)) {
    spans.push_back({pos, pos + needle.size()});
  }
  return spans;
}

}  // namespace

Layout layout(const SessionState& state, const std::optional<std::string>& row_ordering,
              const std::optional<std::string>& col_ordering, std::optional<std::size_t> hierarchy) {
  return {axis_layout(state.row_tree(hierarchy), pick_ordering(state, Axis::Rows, row_ordering)),
          axis_layout(state.col_tree(hierarchy), pick_ordering(state, Axis::Cols, col_ordering))};
}

Json viewport(const SessionState& s, const ViewportQuery& q, const EngineConfig& config) {
  if (q.level < 1 || q.level > 6) throw DomainError("zoom level must lie in 1..6");
  if (!s.dataset) throw StateError("session '" + s.id + "' has no data");
  const double threshold = q.threshold.value_or(s.threshold);
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw DomainError("threshold must lie in [0,1]");
  if (q.change && (q.level == 1 || q.level >= 5)) {
    throw DomainError("change mode serves levels 2 to 4");
  }

  const Layout lay = layout(s, q.row_ordering, q.col_ordering, q.hierarchy);
  const std::size_t r0 = q.row_begin, r1 = q.row_end.value_or(lay.rows.entries.size());
  const std::size_t c0 = q.col_begin, c1 = q.col_end.value_or(lay.cols.entries.size());
  check_range(r0, r1, lay.rows.entries.size(), "row");
  check_range(c0, c1, lay.cols.entries.size(), "col");
  const std::size_t cells = (r1 - r0) * (c1 - c0);

  const LevelBudgets& b = config.budgets;
  const std::size_t budget = q.level == 1 ? b.binary
                             : q.level == 2 ? b.strength
                             : q.level <= 4 ? b.timeline
                             : q.level == 5 ? b.keywords
                                            : std::numeric_limits<std::size_t>::max();
  if (cells > budget) {
    throw BudgetError("level " + std::to_string(q.level) + " request of " + std::to_string(cells) +
                      " cells exceeds the budget of " + std::to_string(budget));
  }

  const TimeSelection sel = select_time(s, q.timestep);
  const auto& node_labels = s.dataset->implicit_graph.node_labels();
  const auto& edge_labels = s.dataset->implicit_graph.edge_labels();

  Json out = {{"level", q.level},
              {"session", s.id},
              {"mode", q.change ? "change" : "predictions"},
              {"threshold", threshold},
              {"hierarchy", q.hierarchy.value_or(s.hierarchy_version())},
              {"timestep",
               {{"index", sel.index},
                {"label", sel.label},
                {"predicted", sel.predicted},
                {"horizon", sel.horizon},
                {"confidence", sel.confidence}}},
              {"rows", axis_json(lay.rows, r0, r1, node_labels)},
              {"cols", axis_json(lay.cols, c0, c1, edge_labels)},
              {"cells", cells}};
  out["snapshot"] = s.snapshot ? Json(s.snapshot->id) : Json(nullptr);
  if (q.change) out["preview"] = ready_preview(s).after()->id;

  Json marks = Json::array();
  for (const CellIndex& m : s.marks) {
    const std::size_t r = lay.rows.position[m.node], c = lay.cols.position[m.edge];
    if (r >= r0 && r < r1 && c >= c0 && c < c1) {
      marks.push_back({{"row", r}, {"col", c}, {"node", m.node}, {"edge", m.edge}});
    }
  }
  out["marks"] = std::move(marks);

  switch (q.level) {
    case 1: {
      const Source src = source_for(s, sel, false);
      std::string bits;
      bits.reserve(cells);
      for (std::size_t r = r0; r < r1; ++r) {
        for (std::size_t c = c0; c < c1; ++c) {
          const double v = aggregate(src, lay.rows.entries[r], lay.cols.entries[c], config.aggregator);
          bits.push_back(v >= threshold ? '1' : '0');
        }
      }
      out["bits"] = std::move(bits);
      break;
    }
    case 2: {
      const Source src = source_for(s, sel, q.change);
      Json values = Json::array();
      for (std::size_t r = r0; r < r1; ++r) {
        for (std::size_t c = c0; c < c1; ++c) {
          const double v = aggregate(src, lay.rows.entries[r], lay.cols.entries[c], config.aggregator);
          if (q.change || v >= threshold) {
            values.push_back(rounded(v));
          } else {
            values.push_back(nullptr);
          }
        }
      }
      out["values"] = std::move(values);
      out["precision"] = kPrecision;
      break;
    }
    case 3:
    case 4: {
      if (q.change) ready_preview(s);
      Json timelines = Json::array();
      for (std::size_t r = r0; r < r1; ++r) {
        for (std::size_t c = c0; c < c1; ++c) {
          timelines.push_back(
              timeline_json(s, lay.rows.entries[r], lay.cols.entries[c], q.change, config.aggregator));
        }
      }
      out["timelines"] = std::move(timelines);
      out["precision"] = kPrecision;
      break;
    }
    case 5: {
      Json keywords = Json::array();
      for (std::size_t r = r0; r < r1; ++r) {
        for (std::size_t c = c0; c < c1; ++c) {
          Json list = Json::array();
          if (s.dataset->index) {
            const auto docs = cell_documents(s, lay.rows.entries[r], lay.cols.entries[c], sel);
            for (const auto& k : rank_keywords(*s.dataset->index, docs, config.keyword_count)) {
              list.push_back({{"term", k.term}, {"score", k.score}});
            }
          }
          keywords.push_back(std::move(list));
        }
      }
      out["keywords"] = std::move(keywords);
      out["corpus"] = s.dataset->index != nullptr;
      break;
    }
    case 6: {
      const std::size_t page_size = q.page_size.value_or(b.page_default);
      if (page_size == 0 || page_size > b.page_max) {
        throw BudgetError("level 6 page size must lie in 1.." + std::to_string(b.page_max));
      }
      std::vector<std::tuple<std::uint32_t, std::size_t, std::size_t>> items;
      for (std::size_t r = r0; r < r1; ++r) {
        for (std::size_t c = c0; c < c1; ++c) {
          for (std::uint32_t d : cell_documents(s, lay.rows.entries[r], lay.cols.entries[c], sel)) {
            items.emplace_back(d, r, c);
          }
        }
      }
      Json documents = Json::array();
      const std::size_t first = q.page * page_size;
      for (std::size_t i = first; i < std::min(items.size(), first + page_size); ++i) {
        const auto& [d, r, c] = items[i];
        Json j = document_json(s, d, config.excerpt_chars);
        j["row"] = r;
        j["col"] = c;
        j["node"] = s.dataset->index->document_author[d];
        documents.push_back(std::move(j));
      }
      out["documents"] = std::move(documents);
      out["page"] = q.page;
      out["page_size"] = page_size;
      out["total"] = items.size();
      out["pages"] = (items.size() + page_size - 1) / page_size;
      out["corpus"] = s.dataset->index != nullptr;
      break;
    }
  }
  return out;
}

Json cell_detail(const SessionState& s, std::size_t row, std::size_t col, const std::string& aspect,
                 const ViewportQuery& base, const EngineConfig& config) {
  ViewportQuery q = base;
  q.row_begin = row;
  q.row_end = row + 1;
  q.col_begin = col;
  q.col_end = col + 1;
  if (aspect == "timeline") {
    q.level = 3;
  } else if (aspect == "keywords") {
    q.level = 5;
  } else if (aspect == "documents") {
    q.level = 6;
  } else {
    throw LookupError("unknown cell aspect '" + aspect + "'");
  }
  Json j = viewport(s, q, config);
  Json out = {{"aspect", aspect},
              {"row", j["rows"]["entries"][0]},
              {"col", j["cols"]["entries"][0]},
              {"timestep", j["timestep"]},
              {"snapshot", j["snapshot"]}};
  if (aspect == "timeline") {
    out["timeline"] = j["timelines"][0];
    out["precision"] = j["precision"];
  } else if (aspect == "keywords") {
    out["keywords"] = j["keywords"][0];
    out["corpus"] = j["corpus"];
  } else {
    for (const char* k : {"documents", "page", "page_size", "total", "pages", "corpus"}) out[k] = j[k];
  }
  return out;
}

Json search(const SessionState& s, const std::string& query, std::size_t page,
            std::optional<std::size_t> page_size, const EngineConfig& config) {
  if (query.empty()) throw DomainError("search query must be nonempty");
  if (!s.dataset) throw StateError("session '" + s.id + "' has no data");
  const std::string needle = lower(query);
  const Layout lay = layout(s);
  const auto& g = s.dataset->implicit_graph;

  Json nodes = Json::array();
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    Json spans = spans_of(lower(g.node_labels()[i]), needle);
    if (spans.empty()) continue;
    nodes.push_back({{"node", i}, {"label", g.node_labels()[i]}, {"spans", spans},
                     {"row", lay.rows.position[i]}});
  }
  Json edges = Json::array();
  for (std::size_t j = 0; j < g.edge_count(); ++j) {
    Json spans = spans_of(lower(g.edge_labels()[j]), needle);
    if (spans.empty()) continue;
    edges.push_back({{"edge", j}, {"label", g.edge_labels()[j]}, {"spans", spans},
                     {"col", lay.cols.position[j]}});
  }

  std::vector<std::pair<std::uint32_t, Json>> hits;
  if (s.dataset->index) {
    const CorpusIndex& index = *s.dataset->index;
    for (std::uint32_t d = 0; d < index.documents.size(); ++d) {
      Json spans = spans_of(lower(index.documents[d].text), needle);
      if (!spans.empty()) hits.emplace_back(d, std::move(spans));
    }
  }
  const std::size_t size = page_size.value_or(config.search_page_size);
  if (size == 0) throw DomainError("page size must be positive");
  Json documents = Json::array();
  for (std::size_t i = page * size; i < std::min(hits.size(), (page + 1) * size); ++i) {
    const auto& [d, spans] = hits[i];
    Json j = document_json(s, d, config.excerpt_chars);
    j["spans"] = spans;
    Json cells = Json::array();
    for (const CellKey& k : s.dataset->index->cells_of_document(d)) {
      cells.push_back({{"node", k.node}, {"edge", k.edge}, {"time", k.time},
                       {"row", lay.rows.position[k.node]}, {"col", lay.cols.position[k.edge]}});
    }
    j["cells"] = std::move(cells);
    documents.push_back(std::move(j));
  }
  return {{"query", query},
          {"nodes", std::move(nodes)},
          {"edges", std::move(edges)},
          {"documents", std::move(documents)},
          {"document_total", hits.size()},
          {"page", page},
          {"page_size", size}};
}

Json session_json(const SessionState& s, const EngineConfig& config) {
  Json out = {{"id", s.id}, {"threshold", s.threshold}, {"aggregator", to_string(config.aggregator)}};
  out["head"] = s.head ? Json(*s.head) : Json(nullptr);
  out["snapshot"] = s.snapshot ? Json(s.snapshot->id) : Json(nullptr);
  if (s.dataset) {
    const auto& g = s.dataset->implicit_graph;
    Json times = g.time_labels();
    for (std::size_t h = 1; h <= horizons(s); ++h) times.push_back("+" + std::to_string(h));
    out["dataset"] = {{"digest", s.dataset->digest},
                      {"nodes", g.node_count()},
                      {"edges", g.edge_count()},
                      {"timesteps", g.timestep_count()},
                      {"horizons", horizons(s)},
                      {"time_labels", times},
                      {"corpus", s.dataset->index != nullptr}};
    const Layout lay = layout(s);
    out["visible"] = {{"rows", lay.rows.entries.size()}, {"cols", lay.cols.entries.size()}};
  } else {
    out["dataset"] = nullptr;
  }
  Json orderings = Json::array();
  for (const auto& [id, o] : s.orderings) {
    orderings.push_back({{"id", id}, {"axis", to_string(o.axis)}, {"strategy", to_string(o.strategy)}});
  }
  out["orderings"] = std::move(orderings);
  out["active_orderings"] = {{"rows", s.row_ordering}, {"cols", s.col_ordering}};
  out["hierarchy"] = {{"version", s.hierarchy_version()},
                      {"rows", to_json(s.row_tree())},
                      {"cols", to_json(s.col_tree())}};
  Json marks = Json::array();
  for (const CellIndex& m : s.marks) marks.push_back({{"node", m.node}, {"edge", m.edge}});
  out["marks"] = std::move(marks);
  Json notes = Json::array();
  for (const Note& n : s.notes) notes.push_back({{"id", n.id}, {"target", n.target}, {"text", n.text}});
  out["notes"] = std::move(notes);
  if (s.pending) {
    Json p = {{"job", s.pending_job ? Json(*s.pending_job) : Json(nullptr)},
              {"state", s.job_running() ? "running"
                        : s.pending->ready() ? "preview-ready"
                                             : "failed"},
              {"before", s.pending->before()->id}};
    p["after"] = s.pending->after() ? Json(s.pending->after()->id) : Json(nullptr);
    p["diagnostic"] = s.pending->diagnostic() ? Json(*s.pending->diagnostic()) : Json(nullptr);
    out["pending"] = std::move(p);
  } else {
    out["pending"] = nullptr;
  }
  return out;
}

}  // namespace hgx
