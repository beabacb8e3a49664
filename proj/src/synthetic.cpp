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

#include "hgx/synthetic.hpp"

#include <cstdio>
#include <numeric>
#include <string>

#include "hgx/errors.hpp"
#include "hgx/rng.hpp"

namespace hgx {

namespace {

std::vector<std::size_t> balanced_assignment(std::size_t count, std::size_t groups, Rng& rng) {
  std::vector<std::size_t> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = i % groups;
  rng.shuffle(std::span<std::size_t>(out));
  return out;
}

std::string numbered(const char* prefix, std::size_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, i);
  return buf;
}

}  // namespace

PlantedDataset generate_planted(const PlantedConfig& config) {
  if (config.nodes == 0 || config.edges == 0 || config.timesteps == 0) {
    throw DomainError("planted dataset needs nodes, edges and timesteps");
  }
  if (config.communities == 0 || config.communities > config.nodes ||
      config.communities > config.edges) {
    throw DomainError("community count must lie in 1..min(nodes, edges)");
  }
  for (double p : {config.noise, config.explicit_in, config.explicit_out}) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("probabilities must lie in [0,1]");
  }
  Rng rng(config.seed);
  const std::size_t n = config.nodes;
  const std::size_t m = config.edges;
  const std::size_t k = config.communities;
  const std::size_t categories = k * config.categories_per_community;

  PlantedDataset out{
      TemporalHypergraph(Role::Explicit, {"n"}, {"e"}, {"t"},
                         {IncidenceMatrix(1, 1)}),
      TemporalHypergraph(Role::Implicit, {"n"}, {"e"}, {"t"},
                         {IncidenceMatrix(1, 1)}),
      balanced_assignment(n, k, rng),
      balanced_assignment(m, k, rng),
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m))};

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (out.node_community[i] == out.edge_community[j]) {
        out.base(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
      }
    }
  }

  std::vector<std::string> nodes(n), edges(m), cats(categories), times(config.timesteps);
  for (std::size_t i = 0; i < n; ++i) nodes[i] = numbered("user-", i, 4);
  for (std::size_t j = 0; j < m; ++j) edges[j] = numbered("topic-", j, 3);
  for (std::size_t c = 0; c < categories; ++c) cats[c] = numbered("category-", c, 2);
  for (std::size_t t = 0; t < config.timesteps; ++t) times[t] = std::to_string(2010 + t);

  std::vector<IncidenceMatrix> implicit_steps;
  std::vector<IncidenceMatrix> explicit_steps;
  for (std::size_t t = 0; t < config.timesteps; ++t) {
    std::vector<Membership> cells;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        bool linked = out.base(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > 0.5;
        if (rng.bernoulli(config.noise)) linked = !linked;
        if (linked) cells.push_back({static_cast<NodeId>(i), static_cast<EdgeId>(j), 1.0});
      }
    }
    implicit_steps.push_back(build_incidence(cells, n, m));

    std::vector<Membership> member;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < categories; ++c) {
        const bool own = c / config.categories_per_community == out.node_community[i];
        if (rng.bernoulli(own ? config.explicit_in : config.explicit_out)) {
          member.push_back({static_cast<NodeId>(i), static_cast<EdgeId>(c), 1.0});
        }
      }
    }
    explicit_steps.push_back(build_incidence(member, n, categories));
  }

  out.implicit_graph =
      TemporalHypergraph(Role::Implicit, nodes, edges, times, std::move(implicit_steps));
  out.explicit_graph =
      TemporalHypergraph(Role::Explicit, nodes, cats, times, std::move(explicit_steps));
  return out;
}

PlantedCorpus generate_corpus(const PlantedConfig& config) {
  PlantedCorpus out{{}, {}, generate_planted(config)};
  const auto& implicit = out.planted.implicit_graph;
  const auto& explicit_graph = out.planted.explicit_graph;
  const std::size_t m = implicit.edge_count();

  for (std::size_t j = 0; j < m; ++j) {
    out.ontology.topics.push_back({implicit.edge_labels()[j], {numbered("kw", j, 3)}});
  }

  static const char* kFiller[] = {"report", "market", "shipment", "forum", "price",
                                  "contact", "update", "review", "question", "offer"};
  Rng rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::size_t doc = 0;
  for (std::size_t t = 0; t < implicit.timestep_count(); ++t) {
    // Mid-year timestamps keep every document inside its yearly bin.
    const std::int64_t year = 2010 + static_cast<std::int64_t>(t);
    const std::int64_t days = (year - 1970) * 365 + (year - 1969) / 4 + 180;
    for (std::size_t i = 0; i < implicit.node_count(); ++i) {
      const auto cats = explicit_graph.at(static_cast<TimeIndex>(t)).row(static_cast<NodeId>(i));
      for (const auto& entry : implicit.at(static_cast<TimeIndex>(t)).row(static_cast<NodeId>(i))) {
        RawDocument d;
        d.id = numbered("doc-", doc++, 6);
        d.author = implicit.node_labels()[i];
        d.timestamp = days * 86400 + static_cast<std::int64_t>(rng.below(3600));
        d.text = std::string(kFiller[rng.below(10)]) + " about " + numbered("kw", entry.edge, 3) +
                 " " + kFiller[rng.below(10)] + " " + kFiller[rng.below(10)];
        if (!cats.empty()) {
          d.category = explicit_graph.edge_labels()[cats[rng.below(cats.size())].edge];
        }
        out.documents.push_back(std::move(d));
      }
    }
  }
  return out;
}

BlockMatrix generate_blocks(std::size_t size, std::size_t blocks, std::uint64_t seed) {
  if (blocks == 0 || blocks > size) throw DomainError("block count must lie in 1..size");
  Rng rng(seed);
  BlockMatrix out;
  out.row_block.resize(size);
  out.col_block.resize(size);
  for (std::size_t i = 0; i < size; ++i) out.row_block[i] = out.col_block[i] = i * blocks / size;
  rng.shuffle(std::span<std::size_t>(out.row_block));
  rng.shuffle(std::span<std::size_t>(out.col_block));
  const auto s = static_cast<Eigen::Index>(size);
  out.values = Eigen::MatrixXd::Zero(s, s);
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = 0; j < size; ++j) {
      if (out.row_block[i] == out.col_block[j]) {
        out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
      }
    }
  }
  return out;
}

}  // namespace hgx
