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
#include <vector>

#include <Eigen/Dense>

#include "hgx/hypergraph.hpp"
#include "hgx/ingest.hpp"

namespace hgx {

/// Planted-community temporal hypergraph. Nodes and implicit edges are split
/// into communities; a node is linked to exactly the edges of its own
/// community, then every cell is flipped independently with probability
/// `noise` at each timestep. Explicit edges (categories) follow the same
/// communities with membership probabilities `explicit_in` / `explicit_out`.
struct PlantedConfig {
  std::size_t nodes = 100;
  std::size_t edges = 30;
  std::size_t timesteps = 6;
  std::size_t communities = 2;
  double noise = 0.1;
  std::size_t categories_per_community = 2;
  double explicit_in = 0.8;
  double explicit_out = 0.05;
  std::uint64_t seed = 1;

  friend bool operator==(const PlantedConfig&, const PlantedConfig&) = default;
};

struct PlantedDataset {
  TemporalHypergraph explicit_graph;
  TemporalHypergraph implicit_graph;
  std::vector<std::size_t> node_community;
  std::vector<std::size_t> edge_community;
  Eigen::MatrixXd base;  // noise-free implicit pattern
};

PlantedDataset generate_planted(const PlantedConfig& config);

/// Text corpus and ontology whose ingest reproduces a planted implicit graph
/// on yearly bins: one document per linked (node, edge, timestep) cell, whose
/// text carries the edge's keyword and whose category is one of the node's
/// explicit edges.
struct PlantedCorpus {
  std::vector<RawDocument> documents;
  Ontology ontology;
  PlantedDataset planted;
};

PlantedCorpus generate_corpus(const PlantedConfig& config);

/// Block-structured square matrix for seriation checks: `blocks` diagonal
/// blocks of ones with rows and columns shuffled by `seed`.
struct BlockMatrix {
  Eigen::MatrixXd values;
  std::vector<std::size_t> row_block;
  std::vector<std::size_t> col_block;
};

BlockMatrix generate_blocks(std::size_t size, std::size_t blocks, std::uint64_t seed);

}  // namespace hgx
