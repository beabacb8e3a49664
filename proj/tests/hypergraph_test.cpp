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

#include <vector>

#include "doctest.h"
#include "hgx/errors.hpp"
#include "hgx/hypergraph.hpp"
#include "support.hpp"

namespace hgx {
namespace {

using namespace testing;

TemporalHypergraph single_step(const IncidenceMatrix& m) {
  std::vector<std::string> nodes, edges;
  for (std::size_t i = 0; i < m.rows(); ++i) nodes.push_back("u" + std::to_string(i + 1));
  for (std::size_t j = 0; j < m.cols(); ++j) edges.push_back("e" + std::to_string(j + 1));
  return TemporalHypergraph(Role::Explicit, nodes, edges, {"2015"}, {m});
}

TEST_SUITE("hypergraph") {

TEST_CASE("build_incidence from memberships") {
  const std::vector<Membership> ms = {{0, 0, 1.0}, {1, 0, 1.0}, {1, 1, 1.0}, {2, 1, 1.0}};
  const IncidenceMatrix h = build_incidence(ms, 3, 2);
  Eigen::MatrixXd expected(3, 2);
  expected << 1, 0, 1, 1, 0, 1;
  CHECK(h.dense() == expected);
  CHECK(h.nonzeros() == 4);
}

TEST_CASE("empty memberships give the zero matrix") {
  const IncidenceMatrix h = build_incidence({}, 2, 2);
  CHECK(h.dense() == Eigen::MatrixXd::Zero(2, 2));
  CHECK(h.nonzeros() == 0);
}

TEST_CASE("duplicate cells keep the maximum") {
  const std::vector<Membership> ms = {{0, 0, 0.3}, {0, 0, 0.8}};
  CHECK(build_incidence(ms, 1, 1).at(0, 0) == 0.8);
}

TEST_CASE("build_incidence rejects bad input") {
  const std::vector<Membership> out_of_range = {{3, 0, 1.0}};
  CHECK_THROWS_AS(build_incidence(out_of_range, 3, 2), IndexError);
  const std::vector<Membership> too_strong = {{0, 0, 1.5}};
  CHECK_THROWS_AS(build_incidence(too_strong, 3, 2), DomainError);
  CHECK_THROWS_AS(chain_example().at(0, 5), IndexError);
}

TEST_CASE("zero strength stores nothing") {
  const std::vector<Membership> ms = {{0, 0, 0.0}, {1, 1, 0.4}};
  const IncidenceMatrix h = build_incidence(ms, 2, 2);
  CHECK(h.nonzeros() == 1);
  CHECK(h.at(0, 0) == 0.0);
}

TEST_CASE("overwritten and binarized") {
  const IncidenceMatrix h = testing::chain_example();
  const std::vector<Membership> cells = {{0, 0, 0.0}, {2, 0, 0.25}};
  const IncidenceMatrix o = h.overwritten(cells);
  CHECK(o.at(0, 0) == 0.0);
  CHECK(o.at(2, 0) == 0.25);
  CHECK(o.nonzeros() == 4);
  CHECK(o.binarized(0.5).nonzeros() == 3);
  CHECK(o.binarized(0.2).at(2, 0) == 1.0);
}

TEST_CASE("temporal hypergraph shape checks") {
  const IncidenceMatrix a = testing::chain_example();
  CHECK_THROWS_AS(TemporalHypergraph(Role::Implicit, {"a", "b", "c"}, {"x", "y"}, {"t"},
                                     std::vector<IncidenceMatrix>{}),
                  DimensionError);
  CHECK_THROWS_AS(TemporalHypergraph(Role::Implicit, {"a", "b"}, {"x", "y"}, {"t"}, {a}),
                  DimensionError);
  const TemporalHypergraph h(Role::Implicit, {"a", "b", "c"}, {"x", "y"}, {"t0", "t1"}, {a, a});
  CHECK(h.timestep_count() == 2);
  CHECK_THROWS_AS(h.at(2), IndexError);
}

TEST_CASE("neighborhood") {
  const TemporalHypergraph h = single_step(testing::chain_example());
  CHECK(neighborhood(h, 0, 0, 0.5) == std::vector<NodeId>{1});
  CHECK(neighborhood(h, 0, 1, 0.5) == std::vector<NodeId>{0, 2});
  const TemporalHypergraph zero = single_step(IncidenceMatrix(3, 2));
  CHECK(neighborhood(zero, 0, 1, 0.5).empty());
}

TEST_CASE("degrees") {
  const Degrees d = degrees(testing::chain_example());
  CHECK(d.vertex == Eigen::Vector3d(1, 2, 1));
  CHECK(d.edge == Eigen::Vector2d(2, 2));
  const Degrees z = degrees(IncidenceMatrix(3, 2));
  CHECK(z.vertex.isZero());
  CHECK(z.edge.isZero());
  const Degrees one = degrees(IncidenceMatrix::from_dense(Eigen::MatrixXd::Ones(4, 1)));
  CHECK(one.vertex == Eigen::Vector4d::Ones());
  CHECK(one.edge(0) == 4.0);
}

TEST_CASE("laplacian of the chain example, computed by hand") {
  const LaplacianMatrix l = normalized_laplacian(testing::chain_example(), Role::Explicit);
  const double off = -1.0 / (2.0 * std::sqrt(2.0));
  Eigen::Matrix3d expected;
  expected << 0.5, off, 0.0, off, 0.5, off, 0.0, off, 0.5;
  CHECK((l.values - expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(l.values(0, 1) == doctest::Approx(-0.35355).epsilon(1e-5));
}

TEST_CASE("laplacian of a single edge over every node") {
  for (int n = 1; n <= 6; ++n) {
    const LaplacianMatrix l =
        normalized_laplacian(IncidenceMatrix::from_dense(Eigen::MatrixXd::Ones(n, 1)), Role::Explicit);
    const Eigen::MatrixXd expected =
        Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
    CHECK((l.values - expected).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((l.values * Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("laplacian treats isolated nodes and empty edges") {
  Eigen::MatrixXd h(3, 3);
  h << 1, 0, 0, 1, 0, 0, 0, 0, 0;
  const LaplacianMatrix l = normalized_laplacian(IncidenceMatrix::from_dense(h), Role::Explicit);
  CHECK(l.values(2, 2) == 1.0);
  CHECK(l.values.row(2).sum() == 1.0);
  CHECK(l.values.allFinite());
}

TEST_CASE("laplacian edge weights") {
  Eigen::MatrixXd h(3, 2);
  h << 1, 0, 1, 1, 0, 1;
  const std::vector<double> w = {2.0, 0.5};
  const LaplacianMatrix l = normalized_laplacian(IncidenceMatrix::from_dense(h), Role::Explicit, w);
  const Eigen::MatrixXd oracle = testing::laplacian_by_formula(h, Eigen::Vector2d(2.0, 0.5));
  CHECK((l.values - oracle).cwiseAbs().maxCoeff() < 1e-12);
  const std::vector<double> short_w = {1.0};
  CHECK_THROWS_AS(normalized_laplacian(IncidenceMatrix::from_dense(h), Role::Explicit, short_w),
                  DimensionError);
}

TEST_CASE("laplacian properties on random hypergraphs") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(12);
    const std::size_t m = 1 + rng.below(8);
    Eigen::MatrixXd h = testing::random_binary(n, m, 0.4, rng);
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
      for (Eigen::Index j = 0; j < h.cols(); ++j) {
        if (h(i, j) > 0) h(i, j) = 0.1 + 0.9 * rng.uniform();
      }
    }
    const LaplacianMatrix l = normalized_laplacian(IncidenceMatrix::from_dense(h), Role::Explicit);
    const Eigen::MatrixXd& v = l.values;
    CHECK((v - v.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(v.diagonal().minCoeff() >= -1e-12);

    // Sqrt-degree vector spans the kernel of every normalized Laplacian.
    const Degrees d = degrees(IncidenceMatrix::from_dense(h));
    const Eigen::VectorXd root = d.vertex.cwiseSqrt();
    CHECK((v * root).cwiseAbs().maxCoeff() <= 1e-9);

    // Positive semidefinite.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v);
    CHECK(es.eigenvalues().minCoeff() >= -1e-9);
  }
}

}  // TEST_SUITE

}  // namespace
}  // namespace hgx
