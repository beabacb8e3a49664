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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hgx/errors.hpp"
#include "hgx/hypergraph.hpp"

namespace hgx {

// Link prediction as sigmoid-linked low-rank matrix completion,
//
//   P = sigmoid(X Y^T),  X: n x r node factors, Y: m x r edge factors,
//
// fitted by minimizing
//
//   sum_{cells}  w_ij * BCE(P_ij, I_t(i,j))          reconstruction of the input
// + sum_{mask}   BCE(P_ij, L(i,j))                    known next-step links
// + lambda_lap * tr(X^T Delta X)                      relatedness smoothing
// + lambda_frob * (|X|_F^2 + |Y|_F^2)
//
// with w_ij = reconstruction_weight, raised to the feedback weight on cells
// an analyst asserted. Optimization is full-batch gradient descent with an
// adaptive step (grow on success, halve and retry on an increase), so every
// recorded epoch loss is no larger than the previous one.

struct Hyperparameters {
  int rank = 16;
  double lambda_laplacian = 0.1;
  double lambda_frobenius = 1e-3;
  double learning_rate = 0.05;
  int epochs = 500;
  double tolerance = 1e-6;
  double reconstruction_weight = 1.0;

  friend bool operator==(const Hyperparameters&, const Hyperparameters&) = default;
};

struct ModelParams {
  Eigen::MatrixXd node_factors;  // n x r
  Eigen::MatrixXd edge_factors;  // m x r
  Hyperparameters hyper;
  std::uint64_t seed = 0;
  std::vector<double> loss_trace;  // loss after 0, 1, 2, ... epochs

  int rank() const { return static_cast<int>(node_factors.cols()); }
  bool operator==(const ModelParams& other) const;
};

struct PredictionMatrix {
  Eigen::MatrixXd values;  // strictly inside (0,1)
  int horizon = 1;
  double confidence = 1.0;

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
  bool operator==(const PredictionMatrix& other) const;
};

struct SupervisionMask {
  std::vector<CellIndex> cells;
  double fraction = 0.0;

  bool empty() const { return cells.empty(); }
  friend bool operator==(const SupervisionMask&, const SupervisionMask&) = default;
};

struct SupervisionSplit {
  SupervisionMask train;
  SupervisionMask eval;
  std::vector<std::string> warnings;
};

/// Samples floor(fraction * n * m) training cells without replacement, half
/// positive (strength >= 0.5) and half negative where available, plus an
/// equally sized disjoint evaluation sample. fraction must lie in (0, 0.5].
SupervisionSplit split_supervision(const IncidenceMatrix& next, double fraction,
                                   std::uint64_t seed);

struct WeightedCell {
  CellIndex cell;
  double weight = 1.0;
};

/// The training objective over fixed data; evaluates loss and exact gradients.
class Objective {
 public:
  /// `targets` is the dense input slice; `labels` is only read on mask cells.
  /// An empty Laplacian is allowed when lambda_laplacian is zero.
  Objective(Eigen::MatrixXd targets, LaplacianMatrix laplacian, SupervisionMask mask,
            const Eigen::MatrixXd& labels, Hyperparameters hyper,
            std::vector<WeightedCell> emphasized = {});

  double value(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) const;

  /// Loss plus gradients with respect to X and Y.
  double value_and_gradient(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                            Eigen::MatrixXd& dx, Eigen::MatrixXd& dy) const;

  std::size_t rows() const { return static_cast<std::size_t>(targets_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(targets_.cols()); }
  const Hyperparameters& hyper() const { return hyper_; }

 private:
  double evaluate(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, Eigen::MatrixXd* dx,
                  Eigen::MatrixXd* dy) const;

  Eigen::MatrixXd targets_;
  LaplacianMatrix laplacian_;
  SupervisionMask mask_;
  std::vector<double> mask_labels_;
  Hyperparameters hyper_;
  std::vector<WeightedCell> emphasized_;
};

/// Convenience wrapper around Objective for one parameter set.
double compute_loss(const ModelParams& params, const IncidenceMatrix& input,
                    const SupervisionMask& mask, const IncidenceMatrix& labels,
                    const LaplacianMatrix& laplacian);

struct Gradients {
  Eigen::MatrixXd node;  // dL/dX
  Eigen::MatrixXd edge;  // dL/dY
};

Gradients gradients(const ModelParams& params, const IncidenceMatrix& input,
                    const SupervisionMask& mask, const IncidenceMatrix& labels,
                    const LaplacianMatrix& laplacian);

/// Raised when descent cannot produce a finite loss; carries the last finite
/// parameters.
class DivergenceError : public NumericError {
 public:
  DivergenceError(const std::string& what, ModelParams last_finite)
      : NumericError(what), last_finite_(std::move(last_finite)) {}
  const ModelParams& last_finite() const { return last_finite_; }

 private:
  ModelParams last_finite_;
};

struct DescentOptions {
  int max_epochs = 500;
  double learning_rate = 0.05;
  double tolerance = 1e-6;  // relative improvement below which descent stops; <= 0 disables
};

/// Runs adaptive-step gradient descent from `start`, appending one loss per
/// completed epoch to the returned trace (which starts with the initial loss).
ModelParams descend(const Objective& objective, ModelParams start, const DescentOptions& options);

/// Seeded initialization: entries drawn from N(0,1) scaled by 1/sqrt(r),
/// X first then Y, row-major.
ModelParams initialize_params(std::size_t n, std::size_t m, const Hyperparameters& hyper,
                              std::uint64_t seed);

/// sigmoid(X Y^T), clamped into the open unit interval.
PredictionMatrix predict(const ModelParams& params, int horizon = 1, double confidence = 1.0);

struct TrainConfig {
  Hyperparameters hyper;
  std::uint64_t seed = 42;
  double supervision_fraction = 0.05;
  std::optional<std::uint64_t> mask_seed;  // defaults to seed

  std::uint64_t effective_mask_seed() const { return mask_seed.value_or(seed); }
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct TrainResult {
  PredictionMatrix prediction;
  ModelParams params;
  SupervisionSplit split;
  int epochs_run = 0;
};

/// Fits the model predicting `labels_next` from `input`, supervised by the
/// training half of split_supervision(labels_next, fraction, mask seed).
TrainResult train(const IncidenceMatrix& input, const LaplacianMatrix& laplacian,
                  const IncidenceMatrix& labels_next, const TrainConfig& config);

/// Same, with an explicit training mask.
TrainResult train(const IncidenceMatrix& input, const LaplacianMatrix& laplacian,
                  const IncidenceMatrix& labels_next, const SupervisionMask& mask,
                  const TrainConfig& config);

/// Settings for warm-started refinement (forecast horizons and feedback).
struct RefineConfig {
  int steps = 50;
  double learning_rate = 0.02;
  double feedback_weight = 10.0;
  double confidence_decay = 0.8;

  friend bool operator==(const RefineConfig&, const RefineConfig&) = default;
};

struct Forecast {
  std::vector<ModelParams> params;            // one per horizon
  std::vector<PredictionMatrix> predictions;  // one per horizon

  std::string digest() const;
};

/// Rolls the model forward `horizons` steps past `latest`: horizon 1 refines
/// `start` on the latest observed slice, each further horizon refines the
/// previous horizon's parameters on the previous prediction. Confidence of
/// horizon h is decay^h. `emphasized` cells (feedback) apply to horizon 1.
Forecast extrapolate(const ModelParams& start, const Eigen::MatrixXd& latest,
                     const LaplacianMatrix& laplacian, int horizons, const RefineConfig& config,
                     const std::vector<WeightedCell>& emphasized = {});

/// Variant with one warm start per horizon; horizons beyond `starts` chain
/// from the previous horizon's refined parameters.
Forecast extrapolate(std::span<const ModelParams> starts, const Eigen::MatrixXd& latest,
                     const LaplacianMatrix& laplacian, int horizons, const RefineConfig& config,
                     const std::vector<WeightedCell>& emphasized = {});

struct EvalReport {
  double auc = 0.0;
  double recall = 0.0;
  double threshold = 0.5;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::vector<double> per_horizon_auc;
  double runtime_seconds = 0.0;
};

/// Tie-aware AUC: fraction of (positive, negative) pairs ranked correctly,
/// ties counting one half. Throws UndefinedMetricError for a single class.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

/// AUC and recall of `prediction` on the evaluation cells; truth is
/// binarized at 0.5 and a cell counts as predicted positive when its score
/// is >= threshold.
EvalReport evaluate(const PredictionMatrix& prediction, const SupervisionMask& eval_mask,
                    const IncidenceMatrix& truth, double threshold = 0.5);

}  // namespace hgx
