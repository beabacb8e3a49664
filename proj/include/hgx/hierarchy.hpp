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
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hgx/reorder.hpp"

namespace hgx {

/// Reference to a tree entry: either an axis leaf or a named group.
struct EntryRef {
  enum class Kind { Leaf, Group };
  Kind kind = Kind::Leaf;
  std::size_t leaf = 0;
  std::string group;

  static EntryRef of_leaf(std::size_t index) { return {Kind::Leaf, index, {}}; }
  static EntryRef of_group(std::string name) { return {Kind::Group, 0, std::move(name)}; }
  friend bool operator==(const EntryRef&, const EntryRef&) = default;
};

/// One analyst edit. Group fields left empty mean the root.
struct HierarchyEdit {
  enum class Kind { CreateGroup, MoveEntry, Rename, DeleteGroup, ReorderSiblings, SetCollapse };
  Kind kind = Kind::CreateGroup;
  std::string name;                  // group created, renamed, deleted or (un)collapsed
  std::string new_name;              // rename
  std::string target;                // parent for create/move, group for reorder
  std::vector<EntryRef> entries;     // members (create), moved entry (move), order (reorder)
  bool cascade = false;              // delete
  bool collapsed = false;            // set-collapse
};

const char* to_string(HierarchyEdit::Kind kind);
HierarchyEdit::Kind edit_kind_from_string(const std::string& s);

/// Row or column of the projected view.
struct VisibleEntry {
  std::optional<std::string> group;  // set when a collapsed group stands in for its leaves
  std::vector<std::size_t> leaves;
  std::vector<std::string> enclosing;  // expanded ancestor groups, outermost first
};

/// Nested analyst-defined groups over one axis. Values are immutable; every
/// edit returns a new tree.
class PartitionTree {
 public:
  static PartitionTree flat(Axis axis, std::size_t leaves);

  PartitionTree mutate(const HierarchyEdit& edit) const;
  PartitionTree set_collapse(const std::string& group, bool collapsed) const;

  Axis axis() const { return axis_; }
  std::size_t leaf_count() const { return leaf_node_.size(); }
  bool has_group(const std::string& name) const;
  bool collapsed(const std::string& group) const;
  std::vector<std::string> group_names() const;

  /// Leaves under a group in display order.
  std::vector<std::size_t> leaves_of(const std::string& group) const;

  /// Children of a group (root when empty), in sibling order.
  std::vector<EntryRef> children_of(const std::string& group) const;

  /// Parent group name of an entry ("" for the root).
  std::string parent_of(const EntryRef& entry) const;

  /// Visible axis. With `rank` (original index -> ordering position), children
  /// of groups without an analyst-set sibling order are sorted by the
  /// smallest rank they contain.
  std::vector<VisibleEntry> visible(std::span<const std::size_t> rank = {}) const;

  /// Every leaf in tree order.
  std::vector<std::size_t> all_leaves() const;

  friend bool operator==(const PartitionTree&, const PartitionTree&) = default;

  struct Node {
    bool is_group = false;
    std::size_t leaf = 0;
    std::string name;
    bool collapsed = false;
    bool manual_order = false;
    bool alive = true;
    std::size_t parent = 0;
    std::vector<std::size_t> children;
    friend bool operator==(const Node&, const Node&) = default;
  };
  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  std::size_t find_group(const std::string& name) const;  // root for ""
  std::size_t resolve(const EntryRef& ref) const;
  bool is_descendant(std::size_t node, std::size_t ancestor) const;
  void detach(std::size_t node);
  void attach(std::size_t node, std::size_t parent, std::size_t position);
  void collect_leaves(std::size_t node, std::vector<std::size_t>& out) const;

  PartitionTree create_group(const HierarchyEdit& edit) const;
  PartitionTree move_entry(const HierarchyEdit& edit) const;
  PartitionTree rename(const HierarchyEdit& edit) const;
  PartitionTree delete_group(const HierarchyEdit& edit) const;
  PartitionTree reorder_siblings(const HierarchyEdit& edit) const;

  Axis axis_ = Axis::Rows;
  std::vector<Node> nodes_;  // nodes_[0] is the root group
  std::vector<std::size_t> leaf_node_;
};

enum class Aggregator { Max, Mean };

const char* to_string(Aggregator a);
Aggregator aggregator_from_string(const std::string& s);

/// Aggregate over the leaf block rows x cols.
double aggregate_block(const Eigen::MatrixXd& matrix, std::span<const std::size_t> rows,
                       std::span<const std::size_t> cols, Aggregator aggregator);

struct ProjectedMatrix {
  Eigen::MatrixXd values;
  std::vector<VisibleEntry> rows;
  std::vector<VisibleEntry> cols;
};

/// Collapsed groups become single rows/columns holding the aggregate of their
/// member cells; expanded leaves pass through.
ProjectedMatrix project(const Eigen::MatrixXd& matrix, const PartitionTree& rows,
                        const PartitionTree& cols, Aggregator aggregator = Aggregator::Max,
                        std::span<const std::size_t> row_rank = {},
                        std::span<const std::size_t> col_rank = {});

/// Append-only version history of one axis tree.
class TreeHistory {
 public:
  explicit TreeHistory(PartitionTree initial);

  std::size_t push(PartitionTree next);
  std::size_t current_version() const { return versions_.size() - 1; }
  const PartitionTree& current() const { return *versions_.back(); }
  const PartitionTree& at(std::size_t version) const;
  std::size_t size() const { return versions_.size(); }

 private:
  std::vector<std::shared_ptr<const PartitionTree>> versions_;
};

}  // namespace hgx
