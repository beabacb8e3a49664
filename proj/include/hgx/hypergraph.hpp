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
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hgx {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;
using TimeIndex = std::uint32_t;

/// One (node, edge) membership with its strength in [0,1].
struct Membership {
  NodeId node = 0;
  EdgeId edge = 0;
  double strength = 1.0;
};

/// A (node, edge) cell coordinate.
struct CellIndex {
  NodeId node = 0;
  EdgeId edge = 0;

  friend bool operator==(const CellIndex&, const CellIndex&) = default;
  friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

/// Sparse row-major incidence matrix with strengths in [0,1].
/// Unstored cells are exactly zero; stored cells are strictly positive.
class IncidenceMatrix {
 public:
  struct Entry {
    EdgeId edge;
    double strength;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  IncidenceMatrix() = default;
  IncidenceMatrix(std::size_t rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nonzeros() const { return entries_.size(); }

  /// Bounds-checked cell read; throws IndexError.
  double at(NodeId node, EdgeId edge) const;

  /// Stored entries of one row, sorted by edge.
  std::span<const Entry> row(NodeId node) const;

  Eigen::MatrixXd dense() const;

  /// Builds from a dense matrix; throws DomainError for values outside [0,1].
  static IncidenceMatrix from_dense(const Eigen::MatrixXd& values);

  /// Copy with the given cells overwritten (a zero strength erases the cell).
  IncidenceMatrix overwritten(std::span<const Membership> cells) const;

  /// Copy with every strength replaced by 1 where strength >= threshold.
  IncidenceMatrix binarized(double threshold) const;

  friend bool operator==(const IncidenceMatrix&, const IncidenceMatrix&) = default;

 private:
  friend IncidenceMatrix build_incidence(std::span<const Membership>, std::size_t,
                                         std::size_t);

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_begin_{0};
  std::vector<Entry> entries_;
};

/// Builds an n x m matrix from memberships. Duplicate cells keep the maximum
/// strength. Throws IndexError for ids out of range and DomainError for
/// strengths outside [0,1].
IncidenceMatrix build_incidence(std::span<const Membership> memberships, std::size_t n,
                                std::size_t m);

enum class Role { Explicit, Implicit };

const char* to_string(Role role);
Role role_from_string(const std::string& name);

/// A node set, an edge set and one incidence matrix per timestep.
class TemporalHypergraph {
 public:
  TemporalHypergraph(Role role, std::vector<std::string> node_labels,
                     std::vector<std::string> edge_labels,
                     std::vector<std::string> time_labels,
                     std::vector<IncidenceMatrix> steps);

  Role role() const { return role_; }
  std::size_t node_count() const { return node_labels_.size(); }
  std::size_t edge_count() const { return edge_labels_.size(); }
  std::size_t timestep_count() const { return steps_.size(); }

  const std::vector<std::string>& node_labels() const { return node_labels_; }
  const std::vector<std::string>& edge_labels() const { return edge_labels_; }
  const std::vector<std::string>& time_labels() const { return time_labels_; }

  /// Throws IndexError for t >= timestep_count().
  const IncidenceMatrix& at(TimeIndex t) const;
  const std::vector<IncidenceMatrix>& steps() const { return steps_; }

  friend bool operator==(const TemporalHypergraph&, const TemporalHypergraph&) = default;

 private:
  Role role_;
  std::vector<std::string> node_labels_;
  std::vector<std::string> edge_labels_;
  std::vector<std::string> time_labels_;
  std::vector<IncidenceMatrix> steps_;
};

/// Dense symmetric n x n relatedness operator.
struct LaplacianMatrix {
  Eigen::MatrixXd values;
  Role source = Role::Explicit;

  std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
};

struct Degrees {
  Eigen::VectorXd vertex;  // row sums
  Eigen::VectorXd edge;    // column sums
};

Degrees degrees(const IncidenceMatrix& incidence);

/// Nodes sharing at least one edge with `v` at time t, where both memberships
/// reach `membership_threshold`. Excludes v itself; sorted ascending.
std::vector<NodeId> neighborhood(const TemporalHypergraph& h, TimeIndex t, NodeId v,
                                 double membership_threshold);

/// Normalized hypergraph Laplacian
///   L = I - Dv^{-1/2} H W De^{-1} H^T Dv^{-1/2}
/// with vertex degree d(v) = sum_e w(e) h(v,e) and edge degree
/// delta(e) = sum_v h(v,e). Zero degrees use the pseudo-inverse convention, so
/// an isolated node gets a unit diagonal and an otherwise empty row.
/// `edge_weights` may be empty (all ones) or hold one weight per edge.
LaplacianMatrix normalized_laplacian(const TemporalHypergraph& h, TimeIndex t,
                                     std::span<const double> edge_weights = {});

LaplacianMatrix normalized_laplacian(const IncidenceMatrix& incidence, Role source,
                                     std::span<const double> edge_weights = {});

}  // namespace hgx
