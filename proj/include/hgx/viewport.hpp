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
#include <optional>
#include <string>
#include <vector>

#include "hgx/config.hpp"
#include "hgx/engine.hpp"

namespace hgx {

/// Payload levels: 1 binary cells, 2 strengths, 3-4 timelines, 5 keywords,
/// 6 documents. Ranges are half-open, in visible (ordered, projected)
/// coordinates; open ends mean the full axis.
struct ViewportQuery {
  int level = 2;
  std::size_t row_begin = 0;
  std::optional<std::size_t> row_end;
  std::size_t col_begin = 0;
  std::optional<std::size_t> col_end;
  std::optional<std::size_t> timestep;  // 0..T-1 observed, T.. predicted horizons
  std::optional<double> threshold;      // defaults to the session cutoff
  std::optional<std::string> row_ordering;
  std::optional<std::string> col_ordering;
  std::optional<std::size_t> hierarchy;
  bool change = false;  // signed preview deltas instead of strengths
  std::size_t page = 0;
  std::optional<std::size_t> page_size;
};

/// Visible axis: projected entries plus the entry index of every leaf.
struct AxisLayout {
  std::vector<VisibleEntry> entries;
  std::vector<std::size_t> position;
};

struct Layout {
  AxisLayout rows;
  AxisLayout cols;
};

Layout layout(const SessionState& state, const std::optional<std::string>& row_ordering = {},
              const std::optional<std::string>& col_ordering = {},
              std::optional<std::size_t> hierarchy = {});

/// Throws IndexError on ranges outside the visible axes, BudgetError when
/// the requested block exceeds the level budget, StateError when the
/// session lacks what the level needs.
Json viewport(const SessionState& state, const ViewportQuery& query, const EngineConfig& config);

/// Case-insensitive substring search over node labels, edge labels and
/// document text. Documents are paged.
Json search(const SessionState& state, const std::string& query, std::size_t page,
            std::optional<std::size_t> page_size, const EngineConfig& config);

/// Single-cell detail: "timeline", "keywords" or "documents".
Json cell_detail(const SessionState& state, std::size_t row, std::size_t col,
                 const std::string& aspect, const ViewportQuery& base, const EngineConfig& config);

Json session_json(const SessionState& state, const EngineConfig& config);

}  // namespace hgx
