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
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "hgx/errors.hpp"
#include "hgx/predictor.hpp"
#include "hgx/synthetic.hpp"
#include "support.hpp"

namespace hgx {
namespace {

using namespace testing;

double bce(double z, double t) {
  const double p = 1.0 / (1.0 + std::exp(-z));
  return -t * std::log(p) - (1.0 - t) * std::log(1.0 - p);
}

// Straight-line re-evaluation of the training objective.
double loss_by_formula(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const Eigen::MatrixXd& t,
                       const Eigen::MatrixXd& lap, const std::vector<CellIndex>& mask,
                       const Eigen::MatrixXd& labels, const Hyperparameters& hp,
                       const std::vector<WeightedCell>& emphasized) {
  const auto n = x.rows();
  const auto m = y.rows();
  const auto r = x.cols();
  auto z = [&](Eigen::Index i, Eigen::Index j) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < r; ++k) s += x(i, k) * y(j, k);
    return s;
  };
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      double w = hp.reconstruction_weight;
      for (const auto& e : emphasized) {
        if (e.cell.node == i && e.cell.edge == j) w = e.weight;
      }
      total += w * bce(z(i, j), t(i, j));
    }
  }
  for (const auto& c : mask) total += bce(z(c.node, c.edge), labels(c.node, c.edge));
  double smooth = 0.0;
  for (Eigen::Index k = 0; k < r; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) smooth += x(i, k) * lap(i, j) * x(j, k);
    }
  }
  double frob = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < r; ++k) frob += x(i, k) * x(i, k);
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index k = 0; k < r; ++k) frob += y(j, k) * y(j, k);
  }
  return total + hp.lambda_laplacian * smooth + hp.lambda_frobenius * frob;
}

struct Instance {
  Eigen::MatrixXd targets;
  Eigen::MatrixXd labels;
  LaplacianMatrix lap;
  SupervisionMask mask;
  Hyperparameters hp;
  std::vector<WeightedCell> emphasized;
  Eigen::MatrixXd x, y;
};

Instance random_instance(Rng& rng, std::size_t n, std::size_t m, int r) {
  Instance in;
  in.targets = Eigen::MatrixXd::Zero(n, m);
  for (Eigen::Index i = 0; i < in.targets.size(); ++i) {
    in.targets(i) = rng.bernoulli(0.3) ? rng.uniform() : 0.0;
  }
  in.labels = testing::random_binary(n, m, 0.5, rng);
  in.lap = normalized_laplacian(IncidenceMatrix::from_dense(testing::random_binary(n, 3, 0.5, rng)),
                                Role::Explicit);
  for (NodeId i = 0; i < n; ++i) {
    for (EdgeId j = 0; j < m; ++j) {
      if (rng.bernoulli(0.2)) in.mask.cells.push_back({i, j});
    }
  }
  in.hp.rank = r;
  in.hp.lambda_laplacian = 0.3;
  in.hp.lambda_frobenius = 0.01;
  in.hp.reconstruction_weight = 0.7;
  in.emphasized.push_back({{0, 0}, 5.0});
  in.x = Eigen::MatrixXd::NullaryExpr(n, r, [&] { return rng.normal(); });
  in.y = Eigen::MatrixXd::NullaryExpr(m, r, [&] { return rng.normal(); });
  return in;
}

Objective objective_of(const Instance& in) {
  return Objective(in.targets, in.lap, in.mask, in.labels, in.hp, in.emphasized);
}

TEST_SUITE("predictor") {

TEST_CASE("supervision split sizes and determinism") {
  Rng rng(3);
  const IncidenceMatrix next = IncidenceMatrix::from_dense(testing::random_binary(20, 20, 0.5, rng));
  const SupervisionSplit a = split_supervision(next, 0.05, 9);
  CHECK(a.train.cells.size() == 20);
  CHECK(a.eval.cells.size() == 20);
  const SupervisionSplit b = split_supervision(next, 0.05, 9);
  CHECK(a.train == b.train);
  CHECK(a.eval == b.eval);
  std::set<CellIndex> seen(a.train.cells.begin(), a.train.cells.end());
  for (const auto& c : a.eval.cells) CHECK(seen.count(c) == 0);
  CHECK_THROWS_AS(split_supervision(next, 0.6, 1), DomainError);
  CHECK_THROWS_AS(split_supervision(next, 0.0, 1), DomainError);
}

TEST_CASE("split balances classes and warns when one is scarce") {
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(10, 10);
  dense(0, 0) = 1.0;
  const SupervisionSplit s = split_supervision(IncidenceMatrix::from_dense(dense), 0.1, 1);
  CHECK(!s.warnings.empty());
  Rng rng(4);
  const IncidenceMatrix next = IncidenceMatrix::from_dense(testing::random_binary(10, 10, 0.5, rng));
  const SupervisionSplit full = split_supervision(next, 0.1, 2);
  CHECK(full.warnings.empty());
  for (const SupervisionMask* m : {&full.train, &full.eval}) {
    std::size_t pos = 0;
    for (const auto& c : m->cells) pos += next.at(c.node, c.edge) >= 0.5 ? 1 : 0;
    CHECK(pos == 5);
    CHECK(m->cells.size() == 10);
  }
}

TEST_CASE("loss of empty sums is zero") {
  Hyperparameters hp;
  hp.lambda_laplacian = 0.0;
  hp.lambda_frobenius = 0.0;
  hp.reconstruction_weight = 0.0;
  const Objective obj(Eigen::MatrixXd::Zero(3, 2), {}, {}, Eigen::MatrixXd(), hp);
  CHECK(obj.value(Eigen::MatrixXd::Ones(3, 2), Eigen::MatrixXd::Ones(2, 2)) == 0.0);
}

TEST_CASE("one masked positive at zero factors costs ln 2") {
  Hyperparameters hp;
  hp.lambda_laplacian = 0.0;
  hp.lambda_frobenius = 0.0;
  hp.reconstruction_weight = 0.0;
  SupervisionMask mask;
  mask.cells.push_back({1, 0});
  const Eigen::MatrixXd labels = Eigen::MatrixXd::Ones(2, 2);
  const Objective obj(Eigen::MatrixXd::Zero(2, 2), {}, mask, labels, hp);
  CHECK(obj.value(Eigen::MatrixXd::Zero(2, 1), Eigen::MatrixXd::Zero(2, 1)) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("loss matches the formula evaluated directly") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Instance in = random_instance(rng, 2 + rng.below(6), 2 + rng.below(6), 1 + rng.below(3));
    const double got = objective_of(in).value(in.x, in.y);
    const double want =
        loss_by_formula(in.x, in.y, in.targets, in.lap.values, in.mask.cells, in.labels, in.hp, in.emphasized);
    CHECK(std::abs(got - want) <= 1e-10 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("gradient matches central differences on a 4x3 instance") {
  Rng rng(5);
  const Instance in = random_instance(rng, 4, 3, 2);
  const Objective obj = objective_of(in);
  Eigen::MatrixXd dx, dy;
  obj.value_and_gradient(in.x, in.y, dx, dy);
  const double h = 1e-5;
  double worst = 0.0;
  auto check = [&](Eigen::MatrixXd& p, const Eigen::MatrixXd& analytic, bool is_x) {
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      const double keep = p(i);
      p(i) = keep + h;
      const double up = is_x ? obj.value(p, in.y) : obj.value(in.x, p);
      p(i) = keep - h;
      const double down = is_x ? obj.value(p, in.y) : obj.value(in.x, p);
      p(i) = keep;
      const double fd = (up - down) / (2 * h);
      worst = std::max(worst, std::abs(fd - analytic(i)) /
                                  std::max({1e-6, std::abs(fd), std::abs(analytic(i))}));
    }
  };
  Eigen::MatrixXd x = in.x, y = in.y;
  check(x, dx, true);
  check(y, dy, false);
  CHECK(worst < 1e-4);
}

TEST_CASE("laplacian term vanishes when its weight is zero") {
  Rng rng(6);
  Instance in = random_instance(rng, 5, 4, 2);
  in.hp.lambda_laplacian = 0.0;
  Eigen::MatrixXd dx1, dy1, dx2, dy2;
  objective_of(in).value_and_gradient(in.x, in.y, dx1, dy1);
  in.lap.values = Eigen::MatrixXd::Random(5, 5);
  objective_of(in).value_and_gradient(in.x, in.y, dx2, dy2);
  CHECK(dx1 == dx2);
  CHECK(dy1 == dy2);
}

TEST_CASE("stationary point of the frobenius-only objective") {
  Hyperparameters hp;
  hp.lambda_laplacian = 0.0;
  hp.reconstruction_weight = 0.0;
  hp.lambda_frobenius = 0.5;
  const Objective obj(Eigen::MatrixXd::Zero(3, 4), {}, {}, Eigen::MatrixXd(), hp);
  Eigen::MatrixXd dx, dy;
  obj.value_and_gradient(Eigen::MatrixXd::Zero(3, 2), Eigen::MatrixXd::Zero(4, 2), dx, dy);
  CHECK(dx.isZero(0.0));
  CHECK(dy.isZero(0.0));
}

TEST_CASE("shape mismatch is a dimension error") {
  const Objective obj(Eigen::MatrixXd::Zero(3, 4), {}, {}, Eigen::MatrixXd(), Hyperparameters{0, 0.0});
  CHECK_THROWS_AS(obj.value(Eigen::MatrixXd::Zero(2, 1), Eigen::MatrixXd::Zero(4, 1)), DimensionError);
}

TEST_CASE("roc_auc enumerates pairs") {
  const std::vector<double> s = {0.9, 0.8, 0.4, 0.2};
  const std::vector<int> l = {1, 0, 1, 0};
  CHECK(roc_auc(s, l) == doctest::Approx(0.75));
  const std::vector<int> perfect = {1, 1, 0, 0};
  CHECK(roc_auc(s, perfect) == 1.0);
  const std::vector<double> tied = {0.5, 0.5};
  const std::vector<int> split = {1, 0};
  CHECK(roc_auc(tied, split) == 0.5);
  const std::vector<int> one_class = {1, 1, 1, 1};
  CHECK_THROWS_AS(roc_auc(s, one_class), UndefinedMetricError);
}

TEST_CASE("roc_auc agrees with exhaustive pair counting") {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + rng.below(30);
    std::vector<double> s(k);
    std::vector<int> l(k);
    for (std::size_t i = 0; i < k; ++i) {
      s[i] = static_cast<double>(rng.below(6)) / 5.0;  // plenty of ties
      l[i] = rng.bernoulli(0.5) ? 1 : 0;
    }
    l[0] = 1;
    l[1] = 0;
    double good = 0.0, pairs = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        if (l[i] != 1 || l[j] != 0) continue;
        pairs += 1.0;
        good += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
      }
    }
    const double auc = roc_auc(s, l);
    CHECK(auc == doctest::Approx(good / pairs).epsilon(1e-12));
    CHECK(auc >= 0.0);
    CHECK(auc <= 1.0);
  }
}

TEST_CASE("evaluate computes recall at the threshold") {
  PredictionMatrix p;
  p.values.resize(1, 4);
  p.values << 0.9, 0.6, 0.4, 0.1;
  Eigen::MatrixXd truth(1, 4);
  truth << 1, 1, 0, 0;
  SupervisionMask mask;
  for (EdgeId j = 0; j < 4; ++j) mask.cells.push_back({0, j});
  const EvalReport r = evaluate(p, mask, IncidenceMatrix::from_dense(truth), 0.5);
  CHECK(r.auc == 1.0);
  CHECK(r.recall == 1.0);
  CHECK(r.positives == 2);
  CHECK(evaluate(p, mask, IncidenceMatrix::from_dense(truth), 0.7).recall == 0.5);
}

TEST_CASE("zero epochs predict the seeded initialization") {
  Hyperparameters hp;
  hp.epochs = 0;
  hp.rank = 3;
  Rng rng(2);
  const IncidenceMatrix in = IncidenceMatrix::from_dense(testing::random_binary(6, 5, 0.4, rng));
  const LaplacianMatrix lap = normalized_laplacian(in, Role::Explicit);
  TrainConfig cfg;
  cfg.hyper = hp;
  cfg.seed = 17;
  cfg.supervision_fraction = 0.1;
  const TrainResult r = train(in, lap, in, cfg);
  const ModelParams init = initialize_params(6, 5, hp, 17);
  CHECK(r.params.node_factors == init.node_factors);
  CHECK(r.prediction == predict(init));
  CHECK(r.epochs_run == 0);
}

TEST_CASE("predictions stay strictly inside the unit interval") {
  ModelParams p;
  p.node_factors = Eigen::MatrixXd::Constant(2, 1, 100.0);
  p.edge_factors = Eigen::MatrixXd::Constant(2, 1, 100.0);
  p.edge_factors(1, 0) = -100.0;
  const PredictionMatrix pred = predict(p);
  CHECK(pred.values.maxCoeff() < 1.0);
  CHECK(pred.values.minCoeff() > 0.0);
}

TEST_CASE("planted 2-block 20x10 with seed 42") {
  PlantedConfig pc;
  pc.nodes = 20;
  pc.edges = 10;
  pc.timesteps = 3;
  pc.seed = 42;
  const PlantedDataset d = generate_planted(pc);
  const auto& steps = d.implicit_graph.steps();
  const LaplacianMatrix lap = normalized_laplacian(d.explicit_graph, 2);
  TrainConfig cfg;
  cfg.seed = 42;
  const TrainResult r = train(steps[1], lap, steps[2], cfg);
  const auto& trace = r.params.loss_trace;
  for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1]);
  const EvalReport report = evaluate(r.prediction, r.split.eval, steps[2]);
  CHECK(report.auc >= 0.85);

  const TrainResult again = train(steps[1], lap, steps[2], cfg);
  CHECK(again.params == r.params);
  CHECK(again.prediction == r.prediction);
}

TEST_CASE("descent never increases the loss") {
  Rng rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const Instance in = random_instance(rng, 6, 5, 2);
    ModelParams start;
    start.node_factors = in.x;
    start.edge_factors = in.y;
    start.hyper = in.hp;
    const ModelParams out = descend(objective_of(in), start, {200, 1.0, 0.0});
    for (std::size_t i = 1; i < out.loss_trace.size(); ++i) {
      CHECK(out.loss_trace[i] <= out.loss_trace[i - 1]);
    }
  }
}

TEST_CASE("forecast confidences decay per horizon") {
  Rng rng(13);
  const IncidenceMatrix in = IncidenceMatrix::from_dense(testing::random_binary(8, 6, 0.4, rng));
  const ModelParams p = initialize_params(8, 6, Hyperparameters{}, 1);
  RefineConfig rc;
  rc.steps = 5;
  const Forecast f = extrapolate(p, in.dense(), normalized_laplacian(in, Role::Explicit), 3, rc);
  REQUIRE(f.predictions.size() == 3);
  CHECK(f.predictions[0].confidence == doctest::Approx(0.8));
  CHECK(f.predictions[1].confidence == doctest::Approx(0.64));
  for (int h = 0; h < 3; ++h) CHECK(f.predictions[h].horizon == h + 1);
  CHECK(f.predictions[2].confidence < f.predictions[1].confidence);
  CHECK_THROWS_AS(extrapolate(p, in.dense(), {}, 0, rc), DomainError);
}

}  // TEST_SUITE

}  // namespace
}  // namespace hgx
