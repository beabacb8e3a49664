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

#include "hgx/feedback.hpp"

#include <map>
#include <set>
#include <tuple>

#include "hgx/digest.hpp"
#include "hgx/errors.hpp"

namespace hgx {

void FeedbackSet::validate() const {
  std::set<std::tuple<NodeId, EdgeId, TimeIndex>> seen;
  for (std::size_t i = 0; i < assertions.size(); ++i) {
    const auto& a = assertions[i];
    if (!(a.strength >= 0.0 && a.strength <= 1.0)) {
      throw DomainError("assertion " + std::to_string(i) + ": strength " +
                        std::to_string(a.strength) + " outside [0,1]");
    }
    if (!seen.emplace(a.node, a.edge, a.timestep).second) {
      throw DomainError("assertion " + std::to_string(i) + " repeats cell (" +
                        std::to_string(a.node) + "," + std::to_string(a.edge) + ") at timestep " +
                        std::to_string(a.timestep));
    }
  }
}

IncidenceMatrix apply_feedback(const IncidenceMatrix& input, const FeedbackSet& feedback) {
  feedback.validate();
  std::vector<Membership> cells;
  cells.reserve(feedback.assertions.size());
  for (std::size_t i = 0; i < feedback.assertions.size(); ++i) {
    const auto& a = feedback.assertions[i];
    if (a.node >= input.rows() || a.edge >= input.cols()) {
      throw IndexError("assertion " + std::to_string(i) + " targets cell (" +
                       std::to_string(a.node) + "," + std::to_string(a.edge) + ") outside " +
                       std::to_string(input.rows()) + "x" + std::to_string(input.cols()));
    }
    cells.push_back({a.node, a.edge, a.strength});
  }
  return input.overwritten(cells);
}

std::pair<PredictionMatrix, ModelParams> fine_tune(const ModelParams& params,
                                                   const IncidenceMatrix& updated_input,
                                                   const LaplacianMatrix& laplacian,
                                                   const std::vector<CellIndex>& asserted,
                                                   const RefineConfig& config) {
  if (static_cast<std::size_t>(params.node_factors.rows()) != updated_input.rows() ||
      static_cast<std::size_t>(params.edge_factors.rows()) != updated_input.cols()) {
    throw DimensionError("parameters do not match the input matrix");
  }
  std::vector<WeightedCell> emphasized;
  for (const auto& c : asserted) emphasized.push_back({c, config.feedback_weight});
  RefineConfig one = config;
  Forecast f = extrapolate(params, updated_input.dense(), laplacian, 1, one, emphasized);
  return {std::move(f.predictions.front()), std::move(f.params.front())};
}

std::string ModelSnapshot::compute_id(const ModelParams& training, const Forecast& forecast,
                                      const std::vector<Assertion>& feedback) {
  Digest d;
  d.text(forecast.digest());
  d.matrix(training.node_factors).matrix(training.edge_factors);
  for (const auto& a : feedback) {
    d.integer(a.node).integer(a.edge).number(a.strength).integer(a.timestep);
  }
  return d.hex();
}

SnapshotPtr make_snapshot(ModelParams training, Forecast forecast,
                          std::vector<Assertion> feedback) {
  auto snap = std::make_shared<ModelSnapshot>();
  snap->id = ModelSnapshot::compute_id(training, forecast, feedback);
  snap->training = std::move(training);
  snap->forecast = std::move(forecast);
  snap->feedback = std::move(feedback);
  return snap;
}

ChangeMatrix change_matrix(const PredictionMatrix& before, const PredictionMatrix& after) {
  if (before.rows() != after.rows() || before.cols() != after.cols()) {
    throw DimensionError("change matrix needs equal shapes");
  }
  if (before.horizon != after.horizon) throw DimensionError("change matrix needs equal horizons");
  ChangeMatrix out;
  out.horizon = after.horizon;
  out.delta = after.values - before.values;
  return out;
}

std::vector<Assertion> merge_feedback(const std::vector<Assertion>& accepted,
                                      const std::vector<Assertion>& incoming) {
  std::map<std::pair<NodeId, EdgeId>, Assertion> by_cell;
  for (const auto& a : accepted) by_cell[{a.node, a.edge}] = a;
  for (const auto& a : incoming) by_cell[{a.node, a.edge}] = a;
  std::vector<Assertion> out;
  for (const auto& [cell, a] : by_cell) out.push_back(a);
  return out;
}

SnapshotPtr preview_feedback(const ModelSnapshot& before, const IncidenceMatrix& base_input,
                             const LaplacianMatrix& laplacian, const FeedbackSet& feedback,
                             const RefineConfig& config) {
  feedback.validate();
  std::vector<Assertion> merged = merge_feedback(before.feedback, feedback.assertions);
  FeedbackSet all;
  all.assertions = merged;
  const IncidenceMatrix updated = apply_feedback(base_input, all);

  std::vector<WeightedCell> emphasized;
  for (const auto& a : merged) emphasized.push_back({{a.node, a.edge}, config.feedback_weight});
  const int horizons = static_cast<int>(before.forecast.predictions.size());
  Forecast after = extrapolate(before.forecast.params, updated.dense(), laplacian, horizons,
                               config, emphasized);
  return make_snapshot(before.training, std::move(after), std::move(merged));
}

const char* to_string(TransactionState state) {
  switch (state) {
    case TransactionState::Previewing: return "previewing";
    case TransactionState::Accepted: return "accepted";
    case TransactionState::Rejected: return "rejected";
  }
  return "previewing";
}

FeedbackTransaction::FeedbackTransaction(SnapshotPtr before, FeedbackSet feedback)
    : before_(std::move(before)), feedback_(std::move(feedback)) {
  if (!before_) throw StateError("feedback needs a committed model");
}

void FeedbackTransaction::set_preview(SnapshotPtr after) {
  if (state_ != TransactionState::Previewing) throw StateError("transaction already resolved");
  const auto& b = before_->forecast.predictions;
  const auto& a = after->forecast.predictions;
  if (a.size() != b.size()) throw DimensionError("preview horizon count differs");
  changes_.clear();
  for (std::size_t h = 0; h < a.size(); ++h) {
    ChangeMatrix c = change_matrix(b[h], a[h]);
    c.before_id = before_->id;
    c.after_id = after->id;
    changes_.push_back(std::move(c));
  }
  after_ = std::move(after);
  diagnostic_.reset();
}

void FeedbackTransaction::set_failure(std::string diagnostic) {
  if (state_ != TransactionState::Previewing) throw StateError("transaction already resolved");
  diagnostic_ = std::move(diagnostic);
}

SnapshotPtr FeedbackTransaction::resolve(Decision decision) {
  if (state_ != TransactionState::Previewing) {
    throw StateError(std::string("transaction already ") + to_string(state_));
  }
  if (decision == Decision::Accept) {
    if (!after_) throw StateError("no preview to accept" + (diagnostic_ ? ": " + *diagnostic_ : ""));
    state_ = TransactionState::Accepted;
    return after_;
  }
  state_ = TransactionState::Rejected;
  return before_;
}

}  // namespace hgx
