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

#include "hgx/hypergraph.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "hgx/errors.hpp"

namespace hgx {

namespace {

void check_strength(double s) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw DomainError("strength " + std::to_string(s) + " outside [0,1]");
  }
}

}  // namespace

IncidenceMatrix::IncidenceMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_begin_(rows + 1, 0) {}

double IncidenceMatrix::at(NodeId node, EdgeId edge) const {
  if (node >= rows_ || edge >= cols_) {
    throw IndexError("cell (" + std::to_string(node) + "," + std::to_string(edge) +
                     ") outside " + std::to_string(rows_) + "x" + std::to_string(cols_));
  }
  const auto r = row(node);
  const auto it = std::lower_bound(r.begin(), r.end(), edge,
                                   [](const Entry& e, EdgeId k) { return e.edge < k; });
  return (it != r.end() && it->edge == edge) ? it->strength : 0.0;
}

std::span<const IncidenceMatrix::Entry> IncidenceMatrix::row(NodeId node) const {
  if (node >= rows_) throw IndexError("row " + std::to_string(node) + " out of range");
  return {entries_.data() + row_begin_[node], row_begin_[node + 1] - row_begin_[node]};
}

Eigen::MatrixXd IncidenceMatrix::dense() const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows_),
                                              static_cast<Eigen::Index>(cols_));
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_begin_[r]; k < row_begin_[r + 1]; ++k) {
      out(static_cast<Eigen::Index>(r), entries_[k].edge) = entries_[k].strength;
    }
  }
  return out;
}

IncidenceMatrix IncidenceMatrix::from_dense(const Eigen::MatrixXd& values) {
  IncidenceMatrix out(static_cast<std::size_t>(values.rows()),
                      static_cast<std::size_t>(values.cols()));
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      const double s = values(r, c);
      check_strength(s);
      if (s > 0.0) out.entries_.push_back({static_cast<EdgeId>(c), s});
    }
    out.row_begin_[static_cast<std::size_t>(r) + 1] = out.entries_.size();
  }
  return out;
}

IncidenceMatrix IncidenceMatrix::overwritten(std::span<const Membership> cells) const {
  for (const auto& c : cells) {
    if (c.node >= rows_ || c.edge >= cols_) {
      throw IndexError("cell (" + std::to_string(c.node) + "," + std::to_string(c.edge) +
                       ") out of range");
    }
    check_strength(c.strength);
  }
  std::vector<Membership> merged;
  merged.reserve(entries_.size() + cells.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_begin_[r]; k < row_begin_[r + 1]; ++k) {
      merged.push_back({static_cast<NodeId>(r), entries_[k].edge, entries_[k].strength});
    }
  }
  // Later writes win: stable sort keeps input order among equal cells.
  for (const auto& c : cells) merged.push_back(c);
  std::stable_sort(merged.begin(), merged.end(), [](const Membership& a, const Membership& b) {
    return std::tie(a.node, a.edge) < std::tie(b.node, b.edge);
  });
  IncidenceMatrix out(rows_, cols_);
  for (std::size_t i = 0; i < merged.size(); ++i) {
    const bool last_of_cell = i + 1 == merged.size() || merged[i + 1].node != merged[i].node ||
                              merged[i + 1].edge != merged[i].edge;
    if (!last_of_cell || merged[i].strength == 0.0) continue;
    out.entries_.push_back({merged[i].edge, merged[i].strength});
    out.row_begin_[merged[i].node + 1] = out.entries_.size();
  }
  for (std::size_t r = 1; r <= rows_; ++r) {
    out.row_begin_[r] = std::max(out.row_begin_[r], out.row_begin_[r - 1]);
  }
  return out;
}

IncidenceMatrix IncidenceMatrix::binarized(double threshold) const {
  IncidenceMatrix out(rows_, cols_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_begin_[r]; k < row_begin_[r + 1]; ++k) {
      if (entries_[k].strength >= threshold) out.entries_.push_back({entries_[k].edge, 1.0});
    }
    out.row_begin_[r + 1] = out.entries_.size();
  }
  return out;
}

IncidenceMatrix build_incidence(std::span<const Membership> memberships, std::size_t n,
                                std::size_t m) {
  std::vector<Membership> cells(memberships.begin(), memberships.end());
  for (const auto& c : cells) {
    if (c.node >= n || c.edge >= m) {
      throw IndexError("membership (" + std::to_string(c.node) + "," +
                       std::to_string(c.edge) + ") outside " + std::to_string(n) + "x" +
                       std::to_string(m));
    }
    check_strength(c.strength);
  }
  std::sort(cells.begin(), cells.end(), [](const Membership& a, const Membership& b) {
    return std::tie(a.node, a.edge, a.strength) < std::tie(b.node, b.edge, b.strength);
  });
  IncidenceMatrix out(n, m);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    // Sorted ascending by strength within a cell, so the last one is the max.
    const bool last_of_cell = i + 1 == cells.size() || cells[i + 1].node != cells[i].node ||
                              cells[i + 1].edge != cells[i].edge;
    if (!last_of_cell || cells[i].strength == 0.0) continue;
    out.entries_.push_back({cells[i].edge, cells[i].strength});
    out.row_begin_[cells[i].node + 1] = out.entries_.size();
  }
  for (std::size_t r = 1; r <= n; ++r) {
    out.row_begin_[r] = std::max(out.row_begin_[r], out.row_begin_[r - 1]);
  }
  return out;
}

const char* to_string(Role role) { return role == Role::Explicit ? "explicit" : "implicit"; }

Role role_from_string(const std::string& name) {
  if (name == "explicit") return Role::Explicit;
  if (name == "implicit") return Role::Implicit;
  throw ParseError("unknown hypergraph role '" + name + "'");
}

TemporalHypergraph::TemporalHypergraph(Role role, std::vector<std::string> node_labels,
                                       std::vector<std::string> edge_labels,
                                       std::vector<std::string> time_labels,
                                       std::vector<IncidenceMatrix> steps)
    : role_(role),
      node_labels_(std::move(node_labels)),
      edge_labels_(std::move(edge_labels)),
      time_labels_(std::move(time_labels)),
      steps_(std::move(steps)) {
  if (steps_.empty()) throw DimensionError("temporal hypergraph needs at least one timestep");
  if (time_labels_.size() != steps_.size()) {
    throw DimensionError("time label count does not match timestep count");
  }
  for (const auto& s : steps_) {
    if (s.rows() != node_labels_.size() || s.cols() != edge_labels_.size()) {
      throw DimensionError("incidence matrix " + std::to_string(s.rows()) + "x" +
                           std::to_string(s.cols()) + " does not match hypergraph " +
                           std::to_string(node_labels_.size()) + "x" +
                           std::to_string(edge_labels_.size()));
    }
  }
}

const IncidenceMatrix& TemporalHypergraph::at(TimeIndex t) const {
  if (t >= steps_.size()) {
    throw IndexError("timestep " + std::to_string(t) + " out of range (have " +
                     std::to_string(steps_.size()) + ")");
  }
  return steps_[t];
}

Degrees degrees(const IncidenceMatrix& incidence) {
  Degrees d{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(incidence.rows())),
            Eigen::VectorXd::Zero(static_cast<Eigen::Index>(incidence.cols()))};
  for (NodeId r = 0; r < incidence.rows(); ++r) {
    for (const auto& e : incidence.row(r)) {
      d.vertex(r) += e.strength;
      d.edge(e.edge) += e.strength;
    }
  }
  return d;
}

std::vector<NodeId> neighborhood(const TemporalHypergraph& h, TimeIndex t, NodeId v,
                                 double membership_threshold) {
  const IncidenceMatrix& inc = h.at(t);
  if (v >= inc.rows()) throw IndexError("node " + std::to_string(v) + " out of range");
  if (!(membership_threshold > 0.0 && membership_threshold <= 1.0)) {
    throw DomainError("membership threshold must lie in (0,1]");
  }
  std::vector<bool> edge_hit(inc.cols(), false);
  bool any = false;
  for (const auto& e : inc.row(v)) {
    if (e.strength >= membership_threshold) edge_hit[e.edge] = any = true;
  }
  std::vector<NodeId> out;
  if (!any) return out;
  for (NodeId w = 0; w < inc.rows(); ++w) {
    if (w == v) continue;
    for (const auto& e : inc.row(w)) {
      if (e.strength >= membership_threshold && edge_hit[e.edge]) {
        out.push_back(w);
        break;
      }
    }
  }
  return out;
}

LaplacianMatrix normalized_laplacian(const IncidenceMatrix& incidence, Role source,
                                     std::span<const double> edge_weights) {
  const auto n = static_cast<Eigen::Index>(incidence.rows());
  const auto m = static_cast<Eigen::Index>(incidence.cols());
  if (!edge_weights.empty() && edge_weights.size() != incidence.cols()) {
    throw DimensionError("edge weight count " + std::to_string(edge_weights.size()) +
                         " does not match edge count " + std::to_string(incidence.cols()));
  }
  Eigen::VectorXd w = Eigen::VectorXd::Ones(m);
  for (Eigen::Index e = 0; e < static_cast<Eigen::Index>(edge_weights.size()); ++e) {
    if (!(edge_weights[e] >= 0.0) || !std::isfinite(edge_weights[e])) {
      throw DomainError("edge weights must be finite and nonnegative");
    }
    w(e) = edge_weights[e];
  }

  const Eigen::MatrixXd h = incidence.dense();
  const Eigen::VectorXd vertex_degree = h * w;
  const Eigen::VectorXd edge_degree = h.colwise().sum().transpose();

  // B = Dv^{-1/2} H (W De^{-1})^{1/2}, so that the operator is I - B B^T.
  Eigen::VectorXd row_scale(n), col_scale(m);
  for (Eigen::Index v = 0; v < n; ++v) {
    row_scale(v) = vertex_degree(v) > 0.0 ? 1.0 / std::sqrt(vertex_degree(v)) : 0.0;
  }
  for (Eigen::Index e = 0; e < m; ++e) {
    col_scale(e) = edge_degree(e) > 0.0 ? std::sqrt(w(e) / edge_degree(e)) : 0.0;
  }
  const Eigen::MatrixXd b = row_scale.asDiagonal() * h * col_scale.asDiagonal();

  LaplacianMatrix out;
  out.source = source;
  out.values = Eigen::MatrixXd::Identity(n, n);
  out.values.noalias() -= b * b.transpose();
  // Mirror the upper triangle so symmetry is exact.
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) out.values(j, i) = out.values(i, j);
  }
  return out;
}

LaplacianMatrix normalized_laplacian(const TemporalHypergraph& h, TimeIndex t,
                                     std::span<const double> edge_weights) {
  return normalized_laplacian(h.at(t), h.role(), edge_weights);
}

}  // namespace hgx
