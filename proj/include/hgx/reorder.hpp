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
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hgx {

enum class Metric { Euclidean, Cosine, Jaccard };

/// Jaccard compares the sets {k : v_k >= threshold}; the other metrics use
/// raw strengths.
struct DistanceMetric {
  Metric kind = Metric::Jaccard;
  double threshold = 0.5;
};

enum class Linkage { Single, Complete, Average, Ward };

enum class Axis { Rows, Cols };

enum class Strategy { Dendrogram, Size, FirstOccurrence };

const char* to_string(Metric m);
const char* to_string(Linkage l);
const char* to_string(Axis a);
const char* to_string(Strategy s);
Metric metric_from_string(const std::string& s);
Linkage linkage_from_string(const std::string& s);
Axis axis_from_string(const std::string& s);
Strategy strategy_from_string(const std::string& s);

/// Symmetric distances between the rows of `vectors`, zero diagonal.
/// Cosine distance of a zero vector is 1 to any nonzero vector and 0 to
/// another zero vector; Jaccard distance of two empty sets is 0.
Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& vectors, const DistanceMetric& metric);

/// Same for a list of vectors; throws DimensionError on unequal lengths.
Eigen::MatrixXd pairwise_distances(std::span<const std::vector<double>> vectors,
                                   const DistanceMetric& metric);

/// One agglomeration step. Node ids follow the usual convention: leaves are
/// 0..n-1 and the k-th merge creates node n+k. `left` is the child holding the
/// smaller leaf index.
struct Merge {
  std::size_t left = 0;
  std::size_t right = 0;
  double height = 0.0;
  std::size_t size = 0;
};

struct Dendrogram {
  std::size_t leaves = 0;
  std::vector<Merge> merges;  // leaves - 1 entries

  /// Depth-first leaf order, lower-index subtree first.
  std::vector<std::size_t> leaf_order() const;
};

/// Agglomerative clustering with Lance-Williams updates. Among equal minimal
/// distances the pair with the lexicographically smallest (i, j) smallest-leaf
/// indices merges first. Throws DomainError for non-finite, negative or
/// asymmetric input.
Dendrogram hierarchical_cluster(const Eigen::MatrixXd& distances, Linkage linkage);

struct OrderingRequest {
  Axis axis = Axis::Rows;
  Strategy strategy = Strategy::Dendrogram;
  DistanceMetric metric;
  Linkage linkage = Linkage::Average;
  bool respect_filter = false;
  double filter_threshold = 0.0;  // cells below it count as zero when respected
};

struct Ordering {
  std::vector<std::size_t> permutation;  // visible position -> original index
  Axis axis = Axis::Rows;
  Strategy strategy = Strategy::FirstOccurrence;
  std::string id;

  /// original index -> visible position
  std::vector<std::size_t> rank() const;
  static Ordering identity(std::size_t size, Axis axis);
};

/// Throws DomainError for ward linkage with a non-euclidean metric.
Ordering compute_ordering(const Eigen::MatrixXd& matrix, const OrderingRequest& request);

bool is_permutation_of_iota(std::span<const std::size_t> permutation);

}  // namespace hgx
