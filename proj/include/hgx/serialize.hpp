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

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hgx/config.hpp"
#include "hgx/feedback.hpp"
#include "hgx/hierarchy.hpp"
#include "hgx/predictor.hpp"
#include "hgx/provenance.hpp"
#include "hgx/reorder.hpp"
#include "hgx/synthetic.hpp"

namespace hgx {

// JSON forms of the engine's value types. Doubles are written with 17
// significant digits, so every round trip is bit-exact.

inline constexpr int kSnapshotVersion = 1;

Json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const Json& j);

Json to_json(const Hyperparameters& h);
Hyperparameters hyperparameters_from_json(const Json& j, Hyperparameters defaults = {});

Json to_json(const RefineConfig& c);
RefineConfig refine_config_from_json(const Json& j, RefineConfig defaults = {});

Json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const Json& j, TrainConfig defaults = {});

Json to_json(const PlantedConfig& c);
PlantedConfig planted_config_from_json(const Json& j);

Json to_json(const ModelParams& p);
ModelParams model_params_from_json(const Json& j);

/// Full snapshot document. Predictions are regenerated from the stored
/// parameters on load and the id is checked; a mismatch raises
/// IncompatibleError.
Json to_json(const ModelSnapshot& s);
SnapshotPtr snapshot_from_json(const Json& j);

Json to_json(const Assertion& a);
Assertion assertion_from_json(const Json& j);
Json to_json(const FeedbackSet& f);
FeedbackSet feedback_from_json(const Json& j);

Json to_json(const OrderingRequest& r);
OrderingRequest ordering_request_from_json(const Json& j);
Json to_json(const Ordering& o);

Json to_json(const EntryRef& e);
EntryRef entry_from_json(const Json& j);
Json to_json(const HierarchyEdit& e);
HierarchyEdit hierarchy_edit_from_json(const Json& j);
Json to_json(const PartitionTree& t);
Json to_json(const VisibleEntry& v);

Json to_json(const EngineConfig& c);
/// Unknown keys raise ParseError; missing keys keep defaults.
EngineConfig engine_config_from_json(const Json& j);
EngineConfig load_engine_config(const std::string& path);

/// Prediction matrix as comma-separated rows.
std::string to_csv(const Eigen::MatrixXd& m);

}  // namespace hgx
