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

#include "hgx/hierarchy.hpp"
#include "hgx/predictor.hpp"

namespace hgx {

/// Per-level payload budgets in cells (documents for level 6).
struct LevelBudgets {
  std::size_t binary = 262144;     // level 1
  std::size_t strength = 262144;   // level 2
  std::size_t timeline = 65536;    // levels 3 and 4
  std::size_t keywords = 4096;     // level 5
  std::size_t page_default = 4;    // level 6
  std::size_t page_max = 8;        // level 6

  friend bool operator==(const LevelBudgets&, const LevelBudgets&) = default;
};

/// Engine defaults, loadable from a JSON config file.
struct EngineConfig {
  Hyperparameters hyper;
  RefineConfig refine;
  double supervision_fraction = 0.05;
  std::uint64_t seed = 42;
  int horizons = 2;
  double threshold = 0.5;
  Aggregator aggregator = Aggregator::Max;
  LevelBudgets budgets;
  std::size_t keyword_count = 8;
  std::size_t excerpt_chars = 240;
  std::size_t search_page_size = 20;

  friend bool operator==(const EngineConfig&, const EngineConfig&) = default;
};

}  // namespace hgx
