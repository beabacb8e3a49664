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

#include "hgx/hierarchy.hpp"

#include <algorithm>
#include <limits>

#include "hgx/errors.hpp"

namespace hgx {

namespace {

constexpr std::size_t kRoot = 0;

}  // namespace

const char* to_string(HierarchyEdit::Kind kind) {
  switch (kind) {
    case HierarchyEdit::Kind::CreateGroup: return "create_group";
    case HierarchyEdit::Kind::MoveEntry: return "move_entry";
    case HierarchyEdit::Kind::Rename: return "rename";
    case HierarchyEdit::Kind::DeleteGroup: return "delete_group";
    case HierarchyEdit::Kind::ReorderSiblings: return "reorder_siblings";
    case HierarchyEdit::Kind::SetCollapse: return "set_collapse";
  }
  return "?";
}

HierarchyEdit::Kind edit_kind_from_string(const std::string& s) {
  for (auto k : {HierarchyEdit::Kind::CreateGroup, HierarchyEdit::Kind::MoveEntry,
                 HierarchyEdit::Kind::Rename, HierarchyEdit::Kind::DeleteGroup,
                 HierarchyEdit::Kind::ReorderSiblings, HierarchyEdit::Kind::SetCollapse}) {
    if (s == to_string(k)) return k;
  }
  throw DomainError("unknown hierarchy edit '" + s + "'");
}

PartitionTree PartitionTree::flat(Axis axis, std::size_t leaves) {
  PartitionTree t;
  t.axis_ = axis;
  t.nodes_.reserve(leaves + 1);
  Node root;
  root.is_group = true;
  t.nodes_.push_back(root);
  t.leaf_node_.resize(leaves);
  for (std::size_t i = 0; i < leaves; ++i) {
    Node n;
    n.leaf = i;
    n.parent = kRoot;
    t.leaf_node_[i] = t.nodes_.size();
    t.nodes_[kRoot].children.push_back(t.nodes_.size());
    t.nodes_.push_back(n);
  }
  return t;
}

std::size_t PartitionTree::find_group(const std::string& name) const {
  if (name.empty()) return kRoot;
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (n.alive && n.is_group && n.name == name) return i;
  }
  throw LookupError("unknown group '" + name + "'");
}

std::size_t PartitionTree::resolve(const EntryRef& ref) const {
  if (ref.kind == EntryRef::Kind::Group) {
    if (ref.group.empty()) throw StructureError("the root group cannot be referenced");
    return find_group(ref.group);
  }
  if (ref.leaf >= leaf_node_.size()) {
    throw IndexError("leaf " + std::to_string(ref.leaf) + " out of range");
  }
  return leaf_node_[ref.leaf];
}

bool PartitionTree::has_group(const std::string& name) const {
  if (name.empty()) return false;
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (nodes_[i].alive && nodes_[i].is_group && nodes_[i].name == name) return true;
  }
  return false;
}

bool PartitionTree::collapsed(const std::string& group) const {
  return nodes_[find_group(group)].collapsed;
}

std::vector<std::string> PartitionTree::group_names() const {
  std::vector<std::string> out;
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (nodes_[i].alive && nodes_[i].is_group) out.push_back(nodes_[i].name);
  }
  return out;
}

bool PartitionTree::is_descendant(std::size_t node, std::size_t ancestor) const {
  while (true) {
    if (node == ancestor) return true;
    if (node == kRoot) return false;
    node = nodes_[node].parent;
  }
}

void PartitionTree::detach(std::size_t node) {
  auto& siblings = nodes_[nodes_[node].parent].children;
  siblings.erase(std::find(siblings.begin(), siblings.end(), node));
}

void PartitionTree::attach(std::size_t node, std::size_t parent, std::size_t position) {
  auto& siblings = nodes_[parent].children;
  position = std::min(position, siblings.size());
  siblings.insert(siblings.begin() + static_cast<std::ptrdiff_t>(position), node);
  nodes_[node].parent = parent;
}

void PartitionTree::collect_leaves(std::size_t node, std::vector<std::size_t>& out) const {
  const Node& n = nodes_[node];
  if (!n.is_group) {
    out.push_back(n.leaf);
    return;
  }
  for (std::size_t c : n.children) collect_leaves(c, out);
}

std::vector<std::size_t> PartitionTree::leaves_of(const std::string& group) const {
  std::vector<std::size_t> out;
  collect_leaves(find_group(group), out);
  return out;
}

std::vector<std::size_t> PartitionTree::all_leaves() const {
  std::vector<std::size_t> out;
  collect_leaves(kRoot, out);
  return out;
}

std::vector<EntryRef> PartitionTree::children_of(const std::string& group) const {
  std::vector<EntryRef> out;
  for (std::size_t c : nodes_[find_group(group)].children) {
    const Node& n = nodes_[c];
    out.push_back(n.is_group ? EntryRef::of_group(n.name) : EntryRef::of_leaf(n.leaf));
  }
  return out;
}

std::string PartitionTree::parent_of(const EntryRef& entry) const {
  return nodes_[nodes_[resolve(entry)].parent].name;
}

PartitionTree PartitionTree::mutate(const HierarchyEdit& edit) const {
  switch (edit.kind) {
    case HierarchyEdit::Kind::CreateGroup: return create_group(edit);
    case HierarchyEdit::Kind::MoveEntry: return move_entry(edit);
    case HierarchyEdit::Kind::Rename: return rename(edit);
    case HierarchyEdit::Kind::DeleteGroup: return delete_group(edit);
    case HierarchyEdit::Kind::ReorderSiblings: return reorder_siblings(edit);
    case HierarchyEdit::Kind::SetCollapse: return set_collapse(edit.name, edit.collapsed);
  }
  throw DomainError("unknown hierarchy edit");
}

PartitionTree PartitionTree::create_group(const HierarchyEdit& edit) const {
  if (edit.name.empty()) throw NameError("group name must be nonempty");
  if (has_group(edit.name)) throw NameError("duplicate group name '" + edit.name + "'");

  std::vector<std::size_t> members;
  for (const auto& e : edit.entries) {
    std::size_t m = resolve(e);
    if (std::find(members.begin(), members.end(), m) != members.end()) {
      throw StructureError("entry listed twice in new group");
    }
    members.push_back(m);
  }

  std::size_t parent = kRoot;
  if (!edit.target.empty()) {
    parent = find_group(edit.target);
  } else if (!members.empty()) {
    parent = nodes_[members.front()].parent;
  }
  for (std::size_t m : members) {
    if (is_descendant(parent, m)) {
      throw StructureError("group '" + edit.name + "' would contain its own parent");
    }
  }

  PartitionTree t = *this;
  const auto& siblings = t.nodes_[parent].children;
  std::size_t position = siblings.size();
  if (!members.empty()) {
    auto it = std::find(siblings.begin(), siblings.end(), members.front());
    if (it != siblings.end()) position = static_cast<std::size_t>(it - siblings.begin());
  }
  for (std::size_t m : members) t.detach(m);
  position = std::min(position, t.nodes_[parent].children.size());

  Node g;
  g.is_group = true;
  g.name = edit.name;
  std::size_t id = t.nodes_.size();
  t.nodes_.push_back(g);
  t.attach(id, parent, position);
  for (std::size_t m : members) t.attach(m, id, t.nodes_[id].children.size());
  return t;
}

PartitionTree PartitionTree::move_entry(const HierarchyEdit& edit) const {
  if (edit.entries.size() != 1) throw StructureError("move_entry takes exactly one entry");
  std::size_t node = resolve(edit.entries.front());
  std::size_t target = find_group(edit.target);
  if (is_descendant(target, node)) {
    throw StructureError("cannot move an entry into itself or its descendant");
  }
  PartitionTree t = *this;
  t.detach(node);
  t.attach(node, target, t.nodes_[target].children.size());
  return t;
}

PartitionTree PartitionTree::rename(const HierarchyEdit& edit) const {
  std::size_t g = find_group(edit.name);
  if (g == kRoot) throw LookupError("the root group cannot be renamed");
  if (edit.new_name.empty()) throw NameError("group name must be nonempty");
  if (edit.new_name != edit.name && has_group(edit.new_name)) {
    throw NameError("duplicate group name '" + edit.new_name + "'");
  }
  PartitionTree t = *this;
  t.nodes_[g].name = edit.new_name;
  return t;
}

PartitionTree PartitionTree::delete_group(const HierarchyEdit& edit) const {
  std::size_t g = find_group(edit.name);
  if (g == kRoot) throw LookupError("the root group cannot be deleted");
  PartitionTree t = *this;
  std::size_t parent = t.nodes_[g].parent;
  auto& siblings = t.nodes_[parent].children;
  std::size_t position = static_cast<std::size_t>(
      std::find(siblings.begin(), siblings.end(), g) - siblings.begin());
  t.detach(g);
  t.nodes_[g].alive = false;

  std::vector<std::size_t> moved;
  if (edit.cascade) {
    std::vector<std::size_t> leaves;
    collect_leaves(g, leaves);
    for (std::size_t leaf : leaves) moved.push_back(leaf_node_[leaf]);
    std::vector<std::size_t> stack(nodes_[g].children.begin(), nodes_[g].children.end());
    while (!stack.empty()) {
      std::size_t n = stack.back();
      stack.pop_back();
      if (!t.nodes_[n].is_group) continue;
      t.nodes_[n].alive = false;
      for (std::size_t c : nodes_[n].children) stack.push_back(c);
      t.nodes_[n].children.clear();
    }
  } else {
    moved = nodes_[g].children;
  }
  t.nodes_[g].children.clear();
  for (std::size_t n : moved) t.attach(n, parent, position++);
  return t;
}

PartitionTree PartitionTree::reorder_siblings(const HierarchyEdit& edit) const {
  std::size_t g = find_group(edit.target);
  std::vector<std::size_t> order;
  for (const auto& e : edit.entries) order.push_back(resolve(e));
  std::vector<std::size_t> a = order;
  std::vector<std::size_t> b = nodes_[g].children;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) throw StructureError("sibling order must list every child exactly once");
  PartitionTree t = *this;
  t.nodes_[g].children = order;
  t.nodes_[g].manual_order = true;
  return t;
}

PartitionTree PartitionTree::set_collapse(const std::string& group, bool collapsed) const {
  if (group.empty()) throw LookupError("the root group cannot be collapsed");
  std::size_t g = find_group(group);
  PartitionTree t = *this;
  t.nodes_[g].collapsed = collapsed;
  return t;
}

std::vector<VisibleEntry> PartitionTree::visible(std::span<const std::size_t> rank) const {
  const bool ranked = !rank.empty();
  if (ranked && rank.size() != leaf_node_.size()) {
    throw DimensionError("rank vector does not cover the axis");
  }
  std::vector<std::size_t> min_rank;
  if (ranked) {
    min_rank.assign(nodes_.size(), std::numeric_limits<std::size_t>::max());
    std::vector<std::pair<std::size_t, bool>> stack{{kRoot, false}};
    while (!stack.empty()) {
      auto [n, done] = stack.back();
      stack.pop_back();
      const Node& node = nodes_[n];
      if (!node.is_group) {
        min_rank[n] = rank[node.leaf];
        continue;
      }
      if (done) {
        for (std::size_t c : node.children) min_rank[n] = std::min(min_rank[n], min_rank[c]);
        continue;
      }
      stack.push_back({n, true});
      for (std::size_t c : node.children) stack.push_back({c, false});
    }
  }

  std::vector<VisibleEntry> out;
  out.reserve(leaf_node_.size());
  std::vector<std::string> path;
  auto walk = [&](auto&& self, std::size_t g) -> void {
    std::vector<std::size_t> kids = nodes_[g].children;
    if (ranked && !nodes_[g].manual_order) {
      std::stable_sort(kids.begin(), kids.end(),
                       [&](std::size_t x, std::size_t y) { return min_rank[x] < min_rank[y]; });
    }
    for (std::size_t c : kids) {
      const Node& n = nodes_[c];
      if (!n.is_group) {
        out.push_back({std::nullopt, {n.leaf}, path});
      } else if (n.collapsed) {
        VisibleEntry e{n.name, {}, path};
        collect_leaves(c, e.leaves);
        if (ranked) {
          std::sort(e.leaves.begin(), e.leaves.end(),
                    [&](std::size_t x, std::size_t y) { return rank[x] < rank[y]; });
        }
        out.push_back(std::move(e));
      } else {
        path.push_back(n.name);
        self(self, c);
        path.pop_back();
      }
    }
  };
  walk(walk, kRoot);
  return out;
}

const char* to_string(Aggregator a) { return a == Aggregator::Max ? "max" : "mean"; }

Aggregator aggregator_from_string(const std::string& s) {
  if (s == "max") return Aggregator::Max;
  if (s == "mean") return Aggregator::Mean;
  throw DomainError("unknown aggregator '" + s + "'");
}

double aggregate_block(const Eigen::MatrixXd& matrix, std::span<const std::size_t> rows,
                       std::span<const std::size_t> cols, Aggregator aggregator) {
  if (rows.size() == 1 && cols.size() == 1) {
    return matrix(static_cast<Eigen::Index>(rows[0]), static_cast<Eigen::Index>(cols[0]));
  }
  double acc = aggregator == Aggregator::Max ? -std::numeric_limits<double>::infinity() : 0.0;
  for (std::size_t r : rows) {
    for (std::size_t c : cols) {
      double v = matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      if (aggregator == Aggregator::Max) {
        acc = std::max(acc, v);
      } else {
        acc += v;
      }
    }
  }
  if (aggregator == Aggregator::Mean) acc /= static_cast<double>(rows.size() * cols.size());
  return acc;
}

ProjectedMatrix project(const Eigen::MatrixXd& matrix, const PartitionTree& rows,
                        const PartitionTree& cols, Aggregator aggregator,
                        std::span<const std::size_t> row_rank,
                        std::span<const std::size_t> col_rank) {
  if (static_cast<std::size_t>(matrix.rows()) != rows.leaf_count() ||
      static_cast<std::size_t>(matrix.cols()) != cols.leaf_count()) {
    throw DimensionError("partition trees do not cover the matrix axes");
  }
  ProjectedMatrix p;
  p.rows = rows.visible(row_rank);
  p.cols = cols.visible(col_rank);
  p.values.resize(static_cast<Eigen::Index>(p.rows.size()),
                  static_cast<Eigen::Index>(p.cols.size()));
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    for (std::size_t j = 0; j < p.cols.size(); ++j) {
      p.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          aggregate_block(matrix, p.rows[i].leaves, p.cols[j].leaves, aggregator);
    }
  }
  return p;
}

TreeHistory::TreeHistory(PartitionTree initial) {
  versions_.push_back(std::make_shared<const PartitionTree>(std::move(initial)));
}

std::size_t TreeHistory::push(PartitionTree next) {
  versions_.push_back(std::make_shared<const PartitionTree>(std::move(next)));
  return versions_.size() - 1;
}

const PartitionTree& TreeHistory::at(std::size_t version) const {
  if (version >= versions_.size()) {
    throw LookupError("unknown hierarchy version " + std::to_string(version));
  }
  return *versions_[version];
}

}  // namespace hgx
