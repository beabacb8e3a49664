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

#include "hgx/predictor.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "hgx/digest.hpp"
#include "hgx/rng.hpp"

namespace hgx {

namespace {

constexpr double kProbabilityFloor = 1e-12;
constexpr int kMaxStepRetries = 60;
constexpr double kStepGrowth = 1.2;

// exp(-|z|) shared by the sigmoid and the softplus.
struct LogitTerms {
  double sigmoid;
  double bce;  // softplus(z) - z*t
};

inline LogitTerms logit_terms(double z, double t) {
  const double e = std::exp(-std::abs(z));
  const double sig = z >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
  return {sig, std::max(z, 0.0) - z * t + std::log1p(e)};
}

inline double sigmoid(double z) {
  const double e = std::exp(-std::abs(z));
  return z >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
}

[[noreturn]] void throw_non_finite(Eigen::Index r, Eigen::Index c) {
  throw NumericError("non-finite logit at cell (" + std::to_string(r) + "," + std::to_string(c) +
                     ")");
}

}  // namespace

bool ModelParams::operator==(const ModelParams& other) const {
  return node_factors.rows() == other.node_factors.rows() &&
         node_factors.cols() == other.node_factors.cols() &&
         edge_factors.rows() == other.edge_factors.rows() &&
         edge_factors.cols() == other.edge_factors.cols() &&
         node_factors == other.node_factors && edge_factors == other.edge_factors &&
         hyper == other.hyper && seed == other.seed && loss_trace == other.loss_trace;
}

bool PredictionMatrix::operator==(const PredictionMatrix& other) const {
  return values.rows() == other.values.rows() && values.cols() == other.values.cols() &&
         values == other.values && horizon == other.horizon && confidence == other.confidence;
}

SupervisionSplit split_supervision(const IncidenceMatrix& next, double fraction,
                                   std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 0.5)) {
    throw DomainError("supervision fraction " + std::to_string(fraction) +
                      " outside (0, 0.5]");
  }
  const std::size_t n = next.rows();
  const std::size_t m = next.cols();
  const auto k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n * m)));

  std::vector<CellIndex> positives, negatives;
  for (NodeId r = 0; r < n; ++r) {
    std::size_t cursor = 0;
    const auto row = next.row(r);
    for (EdgeId c = 0; c < m; ++c) {
      double s = 0.0;
      if (cursor < row.size() && row[cursor].edge == c) s = row[cursor++].strength;
      (s >= 0.5 ? positives : negatives).push_back({r, c});
    }
  }
  Rng rng(seed);
  rng.shuffle(std::span<CellIndex>(positives));
  rng.shuffle(std::span<CellIndex>(negatives));

  SupervisionSplit out;
  out.train.fraction = out.eval.fraction = fraction;
  const std::size_t want_pos = (k + 1) / 2;
  const std::size_t train_pos = std::min(want_pos, (positives.size() + 1) / 2);
  const std::size_t eval_pos = std::min(want_pos, positives.size() - train_pos);
  const std::size_t train_neg = std::min(k - train_pos, (negatives.size() + 1) / 2);
  const std::size_t eval_neg = std::min(k - eval_pos, negatives.size() - train_neg);
  if (train_pos < want_pos || eval_pos < want_pos) {
    out.warnings.push_back("only " + std::to_string(positives.size()) +
                           " positive cells available; requested " + std::to_string(want_pos) +
                           " per mask");
  }
  if (train_pos + train_neg < k || eval_pos + eval_neg < k) {
    out.warnings.push_back("masks hold fewer than " + std::to_string(k) + " cells");
  }

  auto take = [](std::vector<CellIndex>& dst, const std::vector<CellIndex>& src,
                 std::size_t from, std::size_t count) {
    dst.insert(dst.end(), src.begin() + static_cast<std::ptrdiff_t>(from),
               src.begin() + static_cast<std::ptrdiff_t>(from + count));
  };
  take(out.train.cells, positives, 0, train_pos);
  take(out.train.cells, negatives, 0, train_neg);
  take(out.eval.cells, positives, train_pos, eval_pos);
  take(out.eval.cells, negatives, train_neg, eval_neg);
  std::sort(out.train.cells.begin(), out.train.cells.end());
  std::sort(out.eval.cells.begin(), out.eval.cells.end());
  return out;
}

Objective::Objective(Eigen::MatrixXd targets, LaplacianMatrix laplacian, SupervisionMask mask,
                     const Eigen::MatrixXd& labels, Hyperparameters hyper,
                     std::vector<WeightedCell> emphasized)
    : targets_(std::move(targets)),
      laplacian_(std::move(laplacian)),
      mask_(std::move(mask)),
      hyper_(hyper) {
  const auto n = targets_.rows();
  const auto m = targets_.cols();
  if (hyper_.lambda_laplacian != 0.0 || laplacian_.values.size() != 0) {
    if (laplacian_.values.rows() != n || laplacian_.values.cols() != n) {
      throw DimensionError("Laplacian is " + std::to_string(laplacian_.values.rows()) + "x" +
                           std::to_string(laplacian_.values.cols()) + ", expected " +
                           std::to_string(n) + "x" + std::to_string(n));
    }
  }
  if (!mask_.empty() && (labels.rows() != n || labels.cols() != m)) {
    throw DimensionError("label matrix does not match the input shape");
  }
  mask_labels_.reserve(mask_.cells.size());
  for (const auto& c : mask_.cells) {
    if (c.node >= n || c.edge >= m) throw IndexError("mask cell out of range");
    mask_labels_.push_back(labels(c.node, c.edge));
  }
  // Last weight wins for repeated cells.
  std::map<CellIndex, double> weights;
  for (const auto& w : emphasized) {
    if (w.cell.node >= n || w.cell.edge >= m) throw IndexError("emphasized cell out of range");
    weights[w.cell] = w.weight;
  }
  for (const auto& [cell, weight] : weights) emphasized_.push_back({cell, weight});
}

double Objective::value(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) const {
  return evaluate(x, y, nullptr, nullptr);
}

double Objective::value_and_gradient(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                     Eigen::MatrixXd& dx, Eigen::MatrixXd& dy) const {
  return evaluate(x, y, &dx, &dy);
}

double Objective::evaluate(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                           Eigen::MatrixXd* dx, Eigen::MatrixXd* dy) const {
  const auto n = targets_.rows();
  const auto m = targets_.cols();
  if (x.rows() != n || y.rows() != m || x.cols() != y.cols()) {
    throw DimensionError("factor shapes " + std::to_string(x.rows()) + "x" +
                         std::to_string(x.cols()) + " / " + std::to_string(y.rows()) + "x" +
                         std::to_string(y.cols()) + " do not match a " + std::to_string(n) +
                         "x" + std::to_string(m) + " input");
  }
  const bool want_grad = dx != nullptr;
  const Eigen::MatrixXd z = x * y.transpose();
  Eigen::MatrixXd g;
  if (want_grad) g.resize(n, m);

  const double rw = hyper_.reconstruction_weight;
  double reconstruction = 0.0;
  for (Eigen::Index c = 0; c < m; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) {
      const double zv = z(r, c);
      if (!std::isfinite(zv)) throw_non_finite(r, c);
      if (rw == 0.0) {
        if (want_grad) g(r, c) = 0.0;
        continue;
      }
      const auto terms = logit_terms(zv, targets_(r, c));
      reconstruction += terms.bce;
      if (want_grad) g(r, c) = rw * (terms.sigmoid - targets_(r, c));
    }
  }
  double loss = rw * reconstruction;

  for (const auto& w : emphasized_) {
    const double extra = w.weight - rw;
    const auto terms = logit_terms(z(w.cell.node, w.cell.edge), targets_(w.cell.node, w.cell.edge));
    loss += extra * terms.bce;
    if (want_grad) {
      g(w.cell.node, w.cell.edge) += extra * (terms.sigmoid - targets_(w.cell.node, w.cell.edge));
    }
  }
  for (std::size_t i = 0; i < mask_.cells.size(); ++i) {
    const auto& c = mask_.cells[i];
    const auto terms = logit_terms(z(c.node, c.edge), mask_labels_[i]);
    loss += terms.bce;
    if (want_grad) g(c.node, c.edge) += terms.sigmoid - mask_labels_[i];
  }

  if (want_grad) {
    *dx = g * y;
    *dy = g.transpose() * x;
  }
  if (hyper_.lambda_laplacian != 0.0) {
    const Eigen::MatrixXd lx = laplacian_.values * x;
    loss += hyper_.lambda_laplacian * x.cwiseProduct(lx).sum();
    if (want_grad) *dx += (2.0 * hyper_.lambda_laplacian) * lx;
  }
  if (hyper_.lambda_frobenius != 0.0) {
    loss += hyper_.lambda_frobenius * (x.squaredNorm() + y.squaredNorm());
    if (want_grad) {
      *dx += (2.0 * hyper_.lambda_frobenius) * x;
      *dy += (2.0 * hyper_.lambda_frobenius) * y;
    }
  }
  if (!std::isfinite(loss)) throw NumericError("non-finite loss");
  return loss;
}

namespace {

Objective make_objective(const ModelParams& params, const IncidenceMatrix& input,
                         const SupervisionMask& mask, const IncidenceMatrix& labels,
                         const LaplacianMatrix& laplacian) {
  if (labels.rows() != input.rows() || labels.cols() != input.cols()) {
    throw DimensionError("labels and input differ in shape");
  }
  return Objective(input.dense(), laplacian, mask, labels.dense(), params.hyper);
}

}  // namespace

double compute_loss(const ModelParams& params, const IncidenceMatrix& input,
                    const SupervisionMask& mask, const IncidenceMatrix& labels,
                    const LaplacianMatrix& laplacian) {
  return make_objective(params, input, mask, labels, laplacian)
      .value(params.node_factors, params.edge_factors);
}

Gradients gradients(const ModelParams& params, const IncidenceMatrix& input,
                    const SupervisionMask& mask, const IncidenceMatrix& labels,
                    const LaplacianMatrix& laplacian) {
  Gradients out;
  make_objective(params, input, mask, labels, laplacian)
      .value_and_gradient(params.node_factors, params.edge_factors, out.node, out.edge);
  return out;
}

ModelParams descend(const Objective& objective, ModelParams start, const DescentOptions& options) {
  Eigen::MatrixXd x = std::move(start.node_factors);
  Eigen::MatrixXd y = std::move(start.edge_factors);
  Eigen::MatrixXd dx, dy;
  double loss = objective.value_and_gradient(x, y, dx, dy);

  ModelParams out;
  out.hyper = start.hyper;
  out.seed = start.seed;
  out.loss_trace.push_back(loss);

  double step = options.learning_rate;
  Eigen::MatrixXd cx, cy, cdx, cdy;
  for (int epoch = 0; epoch < options.max_epochs; ++epoch) {
    bool accepted = false;
    bool saw_finite = false;
    double candidate = 0.0;
    for (int attempt = 0; attempt < kMaxStepRetries; ++attempt) {
      cx = x - step * dx;
      cy = y - step * dy;
      try {
        candidate = objective.value_and_gradient(cx, cy, cdx, cdy);
        saw_finite = true;
      } catch (const NumericError&) {
        step *= 0.5;
        continue;
      }
      if (candidate <= loss) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!saw_finite) {
        out.node_factors = x;
        out.edge_factors = y;
        throw DivergenceError("descent produced no finite loss at epoch " +
                                  std::to_string(epoch) + " (last finite loss " +
                                  std::to_string(loss) + ")",
                              out);
      }
      break;  // no decrease at any tried step: stationary to working precision
    }
    const double improvement = (loss - candidate) / std::max(std::abs(loss), 1e-300);
    x.swap(cx);
    y.swap(cy);
    dx.swap(cdx);
    dy.swap(cdy);
    loss = candidate;
    out.loss_trace.push_back(loss);
    step *= kStepGrowth;
    if (options.tolerance > 0.0 && improvement < options.tolerance) break;
  }
  out.node_factors = std::move(x);
  out.edge_factors = std::move(y);
  return out;
}

ModelParams initialize_params(std::size_t n, std::size_t m, const Hyperparameters& hyper,
                              std::uint64_t seed) {
  if (hyper.rank < 1) throw DomainError("rank must be at least 1");
  const auto r = static_cast<Eigen::Index>(hyper.rank);
  const double scale = 1.0 / std::sqrt(static_cast<double>(hyper.rank));
  Rng rng(seed);
  ModelParams p;
  p.hyper = hyper;
  p.seed = seed;
  p.node_factors.resize(static_cast<Eigen::Index>(n), r);
  p.edge_factors.resize(static_cast<Eigen::Index>(m), r);
  for (Eigen::Index i = 0; i < p.node_factors.rows(); ++i) {
    for (Eigen::Index k = 0; k < r; ++k) p.node_factors(i, k) = rng.normal() * scale;
  }
  for (Eigen::Index j = 0; j < p.edge_factors.rows(); ++j) {
    for (Eigen::Index k = 0; k < r; ++k) p.edge_factors(j, k) = rng.normal() * scale;
  }
  return p;
}

PredictionMatrix predict(const ModelParams& params, int horizon, double confidence) {
  PredictionMatrix out;
  out.horizon = horizon;
  out.confidence = confidence;
  out.values = (params.node_factors * params.edge_factors.transpose()).unaryExpr([](double z) {
    return std::clamp(sigmoid(z), kProbabilityFloor, 1.0 - kProbabilityFloor);
  });
  return out;
}

TrainResult train(const IncidenceMatrix& input, const LaplacianMatrix& laplacian,
                  const IncidenceMatrix& labels_next, const TrainConfig& config) {
  auto split = split_supervision(labels_next, config.supervision_fraction,
                                 config.effective_mask_seed());
  auto mask = split.train;
  auto result = train(input, laplacian, labels_next, mask, config);
  result.split = std::move(split);
  return result;
}

TrainResult train(const IncidenceMatrix& input, const LaplacianMatrix& laplacian,
                  const IncidenceMatrix& labels_next, const SupervisionMask& mask,
                  const TrainConfig& config) {
  if (config.hyper.epochs < 0) throw DomainError("epochs must be nonnegative");
  ModelParams start = initialize_params(input.rows(), input.cols(), config.hyper, config.seed);
  const Objective objective = make_objective(start, input, mask, labels_next, laplacian);

  TrainResult out;
  out.split.train = mask;
  out.params = descend(objective, std::move(start),
                       {config.hyper.epochs, config.hyper.learning_rate, config.hyper.tolerance});
  out.epochs_run = static_cast<int>(out.params.loss_trace.size()) - 1;
  out.prediction = predict(out.params);
  return out;
}

std::string Forecast::digest() const {
  Digest d;
  for (const auto& p : predictions) {
    d.integer(p.horizon).number(p.confidence).matrix(p.values);
  }
  for (const auto& p : params) d.matrix(p.node_factors).matrix(p.edge_factors);
  return d.hex();
}

Forecast extrapolate(const ModelParams& start, const Eigen::MatrixXd& latest,
                     const LaplacianMatrix& laplacian, int horizons, const RefineConfig& config,
                     const std::vector<WeightedCell>& emphasized) {
  return extrapolate(std::span<const ModelParams>(&start, 1), latest, laplacian, horizons, config,
                     emphasized);
}

Forecast extrapolate(std::span<const ModelParams> starts, const Eigen::MatrixXd& latest,
                     const LaplacianMatrix& laplacian, int horizons, const RefineConfig& config,
                     const std::vector<WeightedCell>& emphasized) {
  if (starts.empty()) throw DomainError("extrapolate needs starting parameters");
  if (horizons < 1) throw DomainError("horizon count must be at least 1");
  if (config.steps < 0) throw DomainError("refinement steps must be nonnegative");
  Forecast out;
  Eigen::MatrixXd targets = latest;
  double confidence = 1.0;
  for (int h = 1; h <= horizons; ++h) {
    const ModelParams& from =
        static_cast<std::size_t>(h) <= starts.size() ? starts[h - 1] : out.params.back();
    const Objective objective(targets, laplacian, {}, Eigen::MatrixXd(), from.hyper,
                              h == 1 ? emphasized : std::vector<WeightedCell>{});
    ModelParams refined = descend(objective, from, {config.steps, config.learning_rate, 0.0});
    confidence *= config.confidence_decay;
    out.predictions.push_back(predict(refined, h, confidence));
    targets = out.predictions.back().values;
    out.params.push_back(std::move(refined));
  }
  return out;
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw DimensionError("scores and labels differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);  // average of ranks i+1..j
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] != 0) {
        positive_rank_sum += mid_rank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = scores.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw UndefinedMetricError("AUC undefined: evaluation set has a single class");
  }
  const double p = static_cast<double>(positives);
  return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(negatives));
}

EvalReport evaluate(const PredictionMatrix& prediction, const SupervisionMask& eval_mask,
                    const IncidenceMatrix& truth, double threshold) {
  const auto started = std::chrono::steady_clock::now();
  if (prediction.rows() != truth.rows() || prediction.cols() != truth.cols()) {
    throw DimensionError("prediction and truth differ in shape");
  }
  if (eval_mask.empty()) throw UndefinedMetricError("evaluation mask is empty");
  std::vector<double> scores;
  std::vector<int> labels;
  EvalReport report;
  report.threshold = threshold;
  std::size_t true_positives = 0;
  for (const auto& c : eval_mask.cells) {
    const double s = prediction.values(c.node, c.edge);
    const int label = truth.at(c.node, c.edge) >= 0.5 ? 1 : 0;
    scores.push_back(s);
    labels.push_back(label);
    if (label) {
      ++report.positives;
      if (s >= threshold) ++true_positives;
    } else {
      ++report.negatives;
    }
  }
  report.auc = roc_auc(scores, labels);
  report.recall = static_cast<double>(true_positives) / static_cast<double>(report.positives);
  report.per_horizon_auc = {report.auc};
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace hgx
