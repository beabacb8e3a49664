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

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hgx/hypergraph.hpp"
#include "hgx/predictor.hpp"

namespace hgx {

/// One analyst statement: the (node, edge) connection has this strength.
struct Assertion {
  NodeId node = 0;
  EdgeId edge = 0;
  double strength = 1.0;
  TimeIndex timestep = 0;

  friend bool operator==(const Assertion&, const Assertion&) = default;
};

struct FeedbackSet {
  std::vector<Assertion> assertions;
  std::string session_id;
  std::int64_t created_ms = 0;

  /// Throws DomainError for strengths outside [0,1] or a repeated
  /// (node, edge, timestep).
  void validate() const;
  bool empty() const { return assertions.empty(); }

  friend bool operator==(const FeedbackSet&, const FeedbackSet&) = default;
};

/// Copy of `input` with every asserted cell overwritten by its strength.
/// Throws IndexError naming the first out-of-range assertion.
IncidenceMatrix apply_feedback(const IncidenceMatrix& input, const FeedbackSet& feedback);

/// Warm-started refinement of one parameter set on the updated input;
/// asserted cells carry `config.feedback_weight` in the reconstruction term.
std::pair<PredictionMatrix, ModelParams> fine_tune(const ModelParams& params,
                                                   const IncidenceMatrix& updated_input,
                                                   const LaplacianMatrix& laplacian,
                                                   const std::vector<CellIndex>& asserted,
                                                   const RefineConfig& config);

/// Committed model state: the supervised fit, the served forecast and the
/// assertions accepted so far.
struct ModelSnapshot {
  ModelParams training;
  Forecast forecast;
  std::vector<Assertion> feedback;
  std::string id;

  /// Content digest over the forecast, the fit and the feedback.
  static std::string compute_id(const ModelParams& training, const Forecast& forecast,
                                const std::vector<Assertion>& feedback);
};

using SnapshotPtr = std::shared_ptr<const ModelSnapshot>;

SnapshotPtr make_snapshot(ModelParams training, Forecast forecast,
                          std::vector<Assertion> feedback);

/// Signed per-cell change after - before, in [-1, 1].
struct ChangeMatrix {
  Eigen::MatrixXd delta;
  int horizon = 1;
  std::string before_id;
  std::string after_id;
};

/// Throws DimensionError on shape or horizon mismatch.
ChangeMatrix change_matrix(const PredictionMatrix& before, const PredictionMatrix& after);

/// Accepted assertions merged with new ones (new ones win per cell).
std::vector<Assertion> merge_feedback(const std::vector<Assertion>& accepted,
                                      const std::vector<Assertion>& incoming);

/// Fine-tunes every horizon of `before` on the base input with `feedback`
/// (accumulated plus new) applied. Returns the candidate snapshot.
SnapshotPtr preview_feedback(const ModelSnapshot& before, const IncidenceMatrix& base_input,
                             const LaplacianMatrix& laplacian, const FeedbackSet& feedback,
                             const RefineConfig& config);

enum class TransactionState { Previewing, Accepted, Rejected };
enum class Decision { Accept, Reject };

const char* to_string(TransactionState state);

/// A previewed feedback retraining awaiting an accept or reject decision.
class FeedbackTransaction {
 public:
  FeedbackTransaction(SnapshotPtr before, FeedbackSet feedback);

  /// Installs the fine-tuned candidate and computes the per-horizon changes.
  void set_preview(SnapshotPtr after);
  /// Records a failed retraining; the transaction stays previewing.
  void set_failure(std::string diagnostic);

  /// Accept commits the candidate, reject keeps the prior snapshot. Either
  /// way the transaction becomes terminal. Throws StateError when already
  /// resolved, or when accepting a preview that failed.
  SnapshotPtr resolve(Decision decision);

  TransactionState state() const { return state_; }
  bool ready() const { return after_ != nullptr; }
  const SnapshotPtr& before() const { return before_; }
  const SnapshotPtr& after() const { return after_; }
  const FeedbackSet& feedback() const { return feedback_; }
  const std::vector<ChangeMatrix>& changes() const { return changes_; }
  const std::optional<std::string>& diagnostic() const { return diagnostic_; }

 private:
  TransactionState state_ = TransactionState::Previewing;
  SnapshotPtr before_;
  SnapshotPtr after_;
  FeedbackSet feedback_;
  std::vector<ChangeMatrix> changes_;
  std::optional<std::string> diagnostic_;
};

}  // namespace hgx
