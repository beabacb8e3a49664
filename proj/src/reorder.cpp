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

#include "hgx/reorder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hgx/errors.hpp"

namespace hgx {

const char* to_string(Metric m) {
  switch (m) {
    case Metric::Euclidean: return "euclidean";
    case Metric::Cosine: return "cosine";
    case Metric::Jaccard: return "jaccard";
  }
  return "jaccard";
}

const char* to_string(Linkage l) {
  switch (l) {
    case Linkage::Single: return "single";
    case Linkage::Complete: return "complete";
    case Linkage::Average: return "average";
    case Linkage::Ward: return "ward";
  }
  return "average";
}

const char* to_string(Axis a) { return a == Axis::Rows ? "rows" : "cols"; }

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::Dendrogram: return "dendrogram";
    case Strategy::Size: return "size";
    case Strategy::FirstOccurrence: return "first_occurrence";
  }
  return "first_occurrence";
}

Metric metric_from_string(const std::string& s) {
  if (s == "euclidean") return Metric::Euclidean;
  if (s == "cosine") return Metric::Cosine;
  if (s == "jaccard") return Metric::Jaccard;
  throw ParseError("unknown metric '" + s + "'");
}

Linkage linkage_from_string(const std::string& s) {
  if (s == "single") return Linkage::Single;
  if (s == "complete") return Linkage::Complete;
  if (s == "average") return Linkage::Average;
  if (s == "ward") return Linkage::Ward;
  throw ParseError("unknown linkage '" + s + "'");
}

Axis axis_from_string(const std::string& s) {
  if (s == "rows") return Axis::Rows;
  if (s == "cols") return Axis::Cols;
  throw ParseError("unknown axis '" + s + "'");
}

Strategy strategy_from_string(const std::string& s) {
  if (s == "dendrogram") return Strategy::Dendrogram;
  if (s == "size") return Strategy::Size;
  if (s == "first_occurrence") return Strategy::FirstOccurrence;
  throw ParseError("unknown ordering strategy '" + s + "'");
}

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& vectors, const DistanceMetric& metric) {
  const Eigen::Index k = vectors.rows();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(k, k);
  if (k == 0) return d;

  if (metric.kind == Metric::Jaccard) {
    if (!(metric.threshold > 0.0 && metric.threshold <= 1.0)) {
      throw DomainError("jaccard threshold must lie in (0,1]");
    }
    const Eigen::MatrixXd b =
        (vectors.array() >= metric.threshold).cast<double>().matrix();
    const Eigen::MatrixXd inter = b * b.transpose();  // exact small integers
    const Eigen::VectorXd count = b.rowwise().sum();
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = i + 1; j < k; ++j) {
        const double uni = count(i) + count(j) - inter(i, j);
        d(i, j) = d(j, i) = uni == 0.0 ? 0.0 : 1.0 - inter(i, j) / uni;
      }
    }
    return d;
  }

  const Eigen::MatrixXd gram = vectors * vectors.transpose();
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i + 1; j < k; ++j) {
      double v = 0.0;
      if (vectors.row(i) == vectors.row(j)) {
        v = 0.0;
      } else if (metric.kind == Metric::Euclidean) {
        v = std::sqrt(std::max(0.0, gram(i, i) + gram(j, j) - 2.0 * gram(i, j)));
      } else {
        const double ni = gram(i, i);
        const double nj = gram(j, j);
        if (ni == 0.0 || nj == 0.0) {
          v = 1.0;  // exactly one is zero; two zero vectors compared equal above
        } else {
          v = std::clamp(1.0 - gram(i, j) / std::sqrt(ni * nj), 0.0, 2.0);
        }
      }
      d(i, j) = d(j, i) = v;
    }
  }
  return d;
}

Eigen::MatrixXd pairwise_distances(std::span<const std::vector<double>> vectors,
                                   const DistanceMetric& metric) {
  if (vectors.empty()) return Eigen::MatrixXd(0, 0);
  const std::size_t len = vectors.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(vectors.size()), static_cast<Eigen::Index>(len));
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != len) {
      throw DimensionError("vector " + std::to_string(i) + " has length " +
                           std::to_string(vectors[i].size()) + ", expected " +
                           std::to_string(len));
    }
    for (std::size_t c = 0; c < len; ++c) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = vectors[i][c];
    }
  }
  return pairwise_distances(m, metric);
}

std::vector<std::size_t> Dendrogram::leaf_order() const {
  std::vector<std::size_t> order;
  order.reserve(leaves);
  if (leaves == 0) return order;
  if (merges.empty()) {
    order.push_back(0);
    return order;
  }
  std::vector<std::size_t> stack{leaves + merges.size() - 1};
  while (!stack.empty()) {
    const std::size_t node = stack.back();
    stack.pop_back();
    if (node < leaves) {
      order.push_back(node);
      continue;
    }
    const Merge& m = merges[node - leaves];
    stack.push_back(m.right);
    stack.push_back(m.left);
  }
  return order;
}

Dendrogram hierarchical_cluster(const Eigen::MatrixXd& distances, Linkage linkage) {
  const Eigen::Index n = distances.rows();
  if (distances.cols() != n) throw DomainError("distance matrix must be square");
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = distances(i, j);
      if (!std::isfinite(v)) throw DomainError("non-finite distance");
      if (v < 0.0) throw DomainError("negative distance");
      if (std::abs(v - distances(j, i)) > 1e-12 * std::max(1.0, std::abs(v))) {
        throw DomainError("distance matrix is not symmetric");
      }
    }
  }

  Dendrogram out;
  out.leaves = static_cast<std::size_t>(n);
  if (n < 2) return out;

  // Slot i holds the cluster whose smallest leaf is i.
  Eigen::MatrixXd d = distances;
  std::vector<bool> active(static_cast<std::size_t>(n), true);
  std::vector<std::size_t> size(static_cast<std::size_t>(n), 1);
  std::vector<std::size_t> node_id(static_cast<std::size_t>(n));
  std::iota(node_id.begin(), node_id.end(), 0);

  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr auto kNone = static_cast<Eigen::Index>(-1);
  std::vector<Eigen::Index> nn(static_cast<std::size_t>(n), kNone);
  std::vector<double> nn_dist(static_cast<std::size_t>(n), kInf);
  auto refresh = [&](Eigen::Index i) {
    nn[i] = kNone;
    nn_dist[i] = kInf;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (active[j] && d(i, j) < nn_dist[i]) {
        nn_dist[i] = d(i, j);
        nn[i] = j;
      }
    }
  };
  for (Eigen::Index i = 0; i < n; ++i) refresh(i);

  for (Eigen::Index step = 0; step + 1 < n; ++step) {
    Eigen::Index a = kNone;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (active[i] && nn[i] != kNone && (a == kNone || nn_dist[i] < nn_dist[a])) a = i;
    }
    const Eigen::Index b = nn[a];
    const double height = d(a, b);
    const double na = static_cast<double>(size[a]);
    const double nb = static_cast<double>(size[b]);

    for (Eigen::Index k = 0; k < n; ++k) {
      if (!active[k] || k == a || k == b) continue;
      const double dak = d(a, k);
      const double dbk = d(b, k);
      double v = 0.0;
      switch (linkage) {
        case Linkage::Single: v = std::min(dak, dbk); break;
        case Linkage::Complete: v = std::max(dak, dbk); break;
        case Linkage::Average: v = (na * dak + nb * dbk) / (na + nb); break;
        case Linkage::Ward: {
          const double nk = static_cast<double>(size[k]);
          v = std::sqrt(std::max(
              0.0, ((na + nk) * dak * dak + (nb + nk) * dbk * dbk - nk * height * height) /
                       (na + nb + nk)));
          break;
        }
      }
      d(a, k) = d(k, a) = v;
    }

    out.merges.push_back({node_id[a], node_id[b], height, size[a] + size[b]});
    node_id[a] = static_cast<std::size_t>(n + step);
    size[a] += size[b];
    active[b] = false;

    refresh(a);
    for (Eigen::Index i = 0; i < a; ++i) {
      if (!active[i]) continue;
      if (nn[i] == a || nn[i] == b) {
        refresh(i);
      } else if (d(i, a) < nn_dist[i] || (d(i, a) == nn_dist[i] && a < nn[i])) {
        nn_dist[i] = d(i, a);
        nn[i] = a;
      }
    }
    for (Eigen::Index i = a + 1; i < n; ++i) {
      if (active[i] && (nn[i] == b)) refresh(i);
    }
  }
  return out;
}

std::vector<std::size_t> Ordering::rank() const {
  std::vector<std::size_t> out(permutation.size());
  for (std::size_t pos = 0; pos < permutation.size(); ++pos) out[permutation[pos]] = pos;
  return out;
}

Ordering Ordering::identity(std::size_t size, Axis axis) {
  Ordering o;
  o.axis = axis;
  o.strategy = Strategy::FirstOccurrence;
  o.permutation.resize(size);
  std::iota(o.permutation.begin(), o.permutation.end(), 0);
  return o;
}

Ordering compute_ordering(const Eigen::MatrixXd& matrix, const OrderingRequest& request) {
  Eigen::MatrixXd vectors = request.axis == Axis::Rows ? matrix : matrix.transpose();
  if (request.respect_filter) {
    vectors = (vectors.array() >= request.filter_threshold).select(vectors, 0.0);
  }
  const auto k = static_cast<std::size_t>(vectors.rows());
  Ordering out = Ordering::identity(k, request.axis);
  out.strategy = request.strategy;

  switch (request.strategy) {
    case Strategy::FirstOccurrence:
      break;
    case Strategy::Size: {
      const Eigen::VectorXd sums = vectors.rowwise().sum();
      std::stable_sort(out.permutation.begin(), out.permutation.end(),
                       [&](std::size_t a, std::size_t b) {
                         return sums(static_cast<Eigen::Index>(a)) >
                                sums(static_cast<Eigen::Index>(b));
                       });
      break;
    }
    case Strategy::Dendrogram: {
      if (request.linkage == Linkage::Ward && request.metric.kind != Metric::Euclidean) {
        throw DomainError("ward linkage requires the euclidean metric");
      }
      if (k < 2) break;
      const Eigen::MatrixXd d = pairwise_distances(vectors, request.metric);
      out.permutation = hierarchical_cluster(d, request.linkage).leaf_order();
      break;
    }
  }
  return out;
}

bool is_permutation_of_iota(std::span<const std::size_t> permutation) {
  std::vector<std::size_t> sorted(permutation.begin(), permutation.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] != i) return false;
  }
  return true;
}

}  // namespace hgx
