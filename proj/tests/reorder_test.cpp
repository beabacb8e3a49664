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
#include <limits>
#include <numeric>
#include <set>
#include <vector>

#include "doctest.h"
#include "hgx/errors.hpp"
#include "hgx/reorder.hpp"
#include "hgx/synthetic.hpp"
#include "support.hpp"

namespace hgx {
namespace {

using namespace testing;

using Cluster = std::vector<std::size_t>;

struct NaiveMerge {
  std::set<std::size_t> members;
  double height;
};

// Agglomeration that recomputes every cluster distance from its definition.
std::vector<NaiveMerge> naive_cluster(const Eigen::MatrixXd& points, const Eigen::MatrixXd& d,
                                      Linkage linkage) {
  std::vector<Cluster> clusters;
  for (Eigen::Index i = 0; i < d.rows(); ++i) clusters.push_back({static_cast<std::size_t>(i)});
  auto distance = [&](const Cluster& a, const Cluster& b) {
    if (linkage == Linkage::Ward) {
      Eigen::VectorXd ca = Eigen::VectorXd::Zero(points.cols());
      Eigen::VectorXd cb = ca;
      for (auto i : a) ca += points.row(static_cast<Eigen::Index>(i)).transpose();
      for (auto j : b) cb += points.row(static_cast<Eigen::Index>(j)).transpose();
      const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
      ca /= na;
      cb /= nb;
      return std::sqrt(2.0 * na * nb / (na + nb)) * (ca - cb).norm();
    }
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0, sum = 0.0;
    for (auto i : a) {
      for (auto j : b) {
        const double v = d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        sum += v;
      }
    }
    if (linkage == Linkage::Single) return lo;
    if (linkage == Linkage::Complete) return hi;
    return sum / static_cast<double>(a.size() * b.size());
  };
  std::vector<NaiveMerge> out;
  while (clusters.size() > 1) {
    std::size_t bi = 0, bj = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        const double v = distance(clusters[i], clusters[j]);
        if (v < best) {
          best = v;
          bi = i;
          bj = j;
        }
      }
    }
    Cluster merged = clusters[bi];
    merged.insert(merged.end(), clusters[bj].begin(), clusters[bj].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
    clusters[bi] = merged;
    out.push_back({std::set<std::size_t>(merged.begin(), merged.end()), best});
  }
  return out;
}

std::set<std::size_t> members_of(const Dendrogram& d, std::size_t node) {
  if (node < d.leaves) return {node};
  const Merge& m = d.merges[node - d.leaves];
  auto out = members_of(d, m.left);
  const auto right = members_of(d, m.right);
  out.insert(right.begin(), right.end());
  return out;
}

TEST_SUITE("reorder") {

TEST_CASE("distance metrics") {
  Eigen::MatrixXd v(2, 3);
  v << 1, 1, 0, 0, 1, 1;
  const Eigen::MatrixXd j = pairwise_distances(v, {Metric::Jaccard, 0.5});
  CHECK(j(0, 1) == doctest::Approx(2.0 / 3.0));
  CHECK(j(0, 0) == 0.0);

  Eigen::MatrixXd o(2, 2);
  o << 1, 0, 0, 1;
  CHECK(pairwise_distances(o, {Metric::Cosine, 0.5})(0, 1) == doctest::Approx(1.0));
  CHECK(pairwise_distances(o, {Metric::Euclidean, 0.5})(0, 1) == doctest::Approx(std::sqrt(2.0)));

  Eigen::MatrixXd same(2, 3);
  same << 0.3, 0.9, 0.1, 0.3, 0.9, 0.1;
  for (const Metric m : {Metric::Euclidean, Metric::Cosine, Metric::Jaccard}) {
    CHECK(pairwise_distances(same, {m, 0.5})(0, 1) == doctest::Approx(0.0));
  }
  Eigen::MatrixXd zeros = Eigen::MatrixXd::Zero(3, 2);
  zeros(2, 0) = 1.0;
  const Eigen::MatrixXd zc = pairwise_distances(zeros, {Metric::Cosine, 0.5});
  CHECK(zc(0, 1) == 0.0);
  CHECK(zc(0, 2) == 1.0);
  CHECK(pairwise_distances(zeros, {Metric::Jaccard, 0.5})(0, 1) == 0.0);
  CHECK_THROWS_AS(pairwise_distances(v, {Metric::Jaccard, 0.0}), DomainError);

  const std::vector<std::vector<double>> ragged = {{1, 2}, {1}};
  CHECK_THROWS_AS(pairwise_distances(ragged, {Metric::Euclidean, 0.5}), DimensionError);
}

TEST_CASE("single linkage on three points on a line") {
  Eigen::MatrixXd p(3, 1);
  p << 0, 1, 5;
  const Eigen::MatrixXd d = pairwise_distances(p, {Metric::Euclidean, 0.5});
  const Dendrogram single = hierarchical_cluster(d, Linkage::Single);
  REQUIRE(single.merges.size() == 2);
  CHECK(single.merges[0].left == 0);
  CHECK(single.merges[0].right == 1);
  CHECK(single.merges[0].height == 1.0);
  CHECK(single.merges[1].height == 4.0);
  CHECK(single.merges[1].size == 3);

  const Dendrogram complete = hierarchical_cluster(d, Linkage::Complete);
  CHECK(complete.merges[0].left == 0);
  CHECK(complete.merges[0].right == 1);
  CHECK(complete.merges[1].height == 5.0);
}

TEST_CASE("two leaves merge once at their distance") {
  Eigen::MatrixXd d(2, 2);
  d << 0, 2.5, 2.5, 0;
  const Dendrogram t = hierarchical_cluster(d, Linkage::Average);
  REQUIRE(t.merges.size() == 1);
  CHECK(t.merges[0].height == 2.5);
  CHECK(t.leaf_order() == std::vector<std::size_t>{0, 1});
}

TEST_CASE("linkages agree with direct agglomeration") {
  Rng rng(21);
  for (const Linkage linkage : {Linkage::Single, Linkage::Complete, Linkage::Average, Linkage::Ward}) {
    for (int trial = 0; trial < 25; ++trial) {
      const auto n = static_cast<Eigen::Index>(2 + rng.below(9));
      const Eigen::MatrixXd points = Eigen::MatrixXd::NullaryExpr(n, 3, [&] { return rng.uniform(); });
      const Eigen::MatrixXd d = pairwise_distances(points, {Metric::Euclidean, 0.5});
      const Dendrogram tree = hierarchical_cluster(d, linkage);
      const auto naive = naive_cluster(points, d, linkage);
      REQUIRE(tree.merges.size() == naive.size());
      for (std::size_t k = 0; k < naive.size(); ++k) {
        CHECK(tree.merges[k].height == doctest::Approx(naive[k].height).epsilon(1e-9));
        CHECK(members_of(tree, tree.leaves + k) == naive[k].members);
        CHECK(tree.merges[k].size == naive[k].members.size());
      }
      if (linkage != Linkage::Ward) {
        for (std::size_t k = 0; k < tree.merges.size(); ++k) {
          for (const std::size_t child : {tree.merges[k].left, tree.merges[k].right}) {
            if (child >= tree.leaves) {
              CHECK(tree.merges[child - tree.leaves].height <= tree.merges[k].height);
            }
          }
        }
      }
      const auto order = tree.leaf_order();
      CHECK(is_permutation_of_iota(order));
    }
  }
}

TEST_CASE("clustering rejects bad distances") {
  Eigen::MatrixXd asym(2, 2);
  asym << 0, 1, 2, 0;
  CHECK_THROWS_AS(hierarchical_cluster(asym, Linkage::Average), DomainError);
  Eigen::MatrixXd neg(2, 2);
  neg << 0, -1, -1, 0;
  CHECK_THROWS_AS(hierarchical_cluster(neg, Linkage::Average), DomainError);
  Eigen::MatrixXd nan(2, 2);
  nan << 0, std::nan(""), std::nan(""), 0;
  CHECK_THROWS_AS(hierarchical_cluster(nan, Linkage::Average), DomainError);
}

TEST_CASE("size and first-occurrence orderings") {
  Eigen::MatrixXd m(3, 3);
  m << 1, 1, 1, 0, 1, 0, 1, 1, 0;
  OrderingRequest size;
  size.strategy = Strategy::Size;
  CHECK(compute_ordering(m, size).permutation == std::vector<std::size_t>{0, 2, 1});
  OrderingRequest first;
  first.strategy = Strategy::FirstOccurrence;
  CHECK(compute_ordering(m, first).permutation == std::vector<std::size_t>{0, 1, 2});

  Eigen::MatrixXd ties(4, 1);
  ties << 1, 2, 1, 2;
  CHECK(compute_ordering(ties, size).permutation == std::vector<std::size_t>{1, 3, 0, 2});
  size.axis = Axis::Cols;
  CHECK(compute_ordering(m, size).permutation == std::vector<std::size_t>{1, 0, 2});
}

TEST_CASE("filter threshold zeroes weak cells") {
  Eigen::MatrixXd m(2, 2);
  m << 0.3, 0.3, 0.9, 0.0;
  OrderingRequest size;
  size.strategy = Strategy::Size;
  CHECK(compute_ordering(m, size).permutation == std::vector<std::size_t>{1, 0});
  size.respect_filter = true;
  size.filter_threshold = 0.5;
  CHECK(compute_ordering(m, size).permutation == std::vector<std::size_t>{1, 0});
  size.filter_threshold = 0.95;
  CHECK(compute_ordering(m, size).permutation == std::vector<std::size_t>{0, 1});
}

TEST_CASE("planted blocks come out contiguous") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const BlockMatrix b = generate_blocks(30, 3, seed);
    OrderingRequest req;
    req.metric = {Metric::Jaccard, 0.5};
    req.linkage = Linkage::Average;
    const Ordering o = compute_ordering(b.values, req);
    CHECK(is_permutation_of_iota(o.permutation));
    std::set<std::size_t> closed;
    for (std::size_t i = 0; i < o.permutation.size(); ++i) {
      const std::size_t block = b.row_block[o.permutation[i]];
      if (i > 0 && b.row_block[o.permutation[i - 1]] != block) {
        CHECK(closed.count(block) == 0);
        closed.insert(b.row_block[o.permutation[i - 1]]);
      }
    }
  }
}

TEST_CASE("ward needs the euclidean metric") {
  OrderingRequest req;
  req.linkage = Linkage::Ward;
  req.metric = {Metric::Cosine, 0.5};
  CHECK_THROWS_AS(compute_ordering(Eigen::MatrixXd::Ones(3, 3), req), DomainError);
  req.metric = {Metric::Euclidean, 0.5};
  CHECK_NOTHROW(compute_ordering(Eigen::MatrixXd::Ones(3, 3), req));
}

TEST_CASE("orderings are permutations with consistent ranks") {
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::MatrixXd m = testing::random_binary(1 + rng.below(15), 1 + rng.below(10), 0.4, rng);
    for (const Strategy s : {Strategy::Dendrogram, Strategy::Size, Strategy::FirstOccurrence}) {
      for (const Axis axis : {Axis::Rows, Axis::Cols}) {
        OrderingRequest req;
        req.strategy = s;
        req.axis = axis;
        const Ordering o = compute_ordering(m, req);
        const auto k = static_cast<std::size_t>(axis == Axis::Rows ? m.rows() : m.cols());
        REQUIRE(o.permutation.size() == k);
        CHECK(is_permutation_of_iota(o.permutation));
        const auto rank = o.rank();
        for (std::size_t i = 0; i < k; ++i) CHECK(rank[o.permutation[i]] == i);
      }
    }
  }
  const std::vector<std::size_t> bad = {0, 2, 2};
  CHECK(!is_permutation_of_iota(bad));
}

TEST_CASE("names round-trip") {
  for (const Metric m : {Metric::Euclidean, Metric::Cosine, Metric::Jaccard}) {
    CHECK(metric_from_string(to_string(m)) == m);
  }
  for (const Linkage l : {Linkage::Single, Linkage::Complete, Linkage::Average, Linkage::Ward}) {
    CHECK(linkage_from_string(to_string(l)) == l);
  }
  for (const Strategy s : {Strategy::Dendrogram, Strategy::Size, Strategy::FirstOccurrence}) {
    CHECK(strategy_from_string(to_string(s)) == s);
  }
  CHECK_THROWS_AS(metric_from_string("manhattan"), ParseError);
}

}  // TEST_SUITE

}  // namespace
}  // namespace hgx
