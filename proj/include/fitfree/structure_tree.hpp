#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "fitfree/blocks.hpp"
#include "fitfree/common.hpp"
#include "fitfree/perm_group.hpp"

namespace fitfree {

/// Layered view of a structure tree. layers[0] = {whole domain},
/// layers.back() = singleton points; consecutive layers are nested
/// partitions and every internal node has a primitive stabilizer action on
/// its children.
struct StructureTree {
  std::vector<std::vector<std::vector<int>>> layers;

  int depth() const { return static_cast<int>(layers.size()) - 1; }

  std::string str() const {
    std::string s;
    for (std::size_t l = 0; l < layers.size(); ++l) {
      if (l)
        s += " | ";
      for (std::size_t b = 0; b < layers[l].size(); ++b) {
        if (b)
          s += ' ';
        s += '{';
        for (std::size_t i = 0; i < layers[l][b].size(); ++i) {
          if (i)
            s += ',';
          s += std::to_string(layers[l][b][i] + 1);
        }
        s += '}';
      }
    }
    return s;
  }

  bool operator<(const StructureTree &o) const { return layers < o.layers; }
  bool operator==(const StructureTree &o) const { return layers == o.layers; }
};

namespace detail {

inline std::vector<std::vector<int>> singleton_layer(int m) {
  std::vector<std::vector<int>> out;
  out.reserve(m);
  for (int i = 0; i < m; ++i)
    out.push_back({i});
  return out;
}

// expands a partition of block indices into original points
inline std::vector<std::vector<int>> expand_blocks(const std::vector<std::vector<int>> &coarse,
                                                   const std::vector<std::vector<int>> &fine) {
  std::vector<std::vector<int>> out;
  for (const auto &c : coarse) {
    std::vector<int> pts;
    for (int bi : c)
      pts.insert(pts.end(), fine[bi].begin(), fine[bi].end());
    std::sort(pts.begin(), pts.end());
    out.push_back(std::move(pts));
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline void enumerate_trees_rec(const PermGroup &act,
                                const std::vector<std::vector<int>> &blocks,
                                std::vector<std::vector<std::vector<int>>> &below,
                                std::set<StructureTree> &out) {
  if (blocks.size() == 1) {
    // `below` was collected bottom-up; emit root-first
    StructureTree t;
    t.layers.push_back(blocks);
    for (auto it = below.rbegin(); it != below.rend(); ++it)
      t.layers.push_back(*it);
    out.insert(std::move(t));
    return;
  }
  std::vector<std::vector<int>> min_blocks = minimal_blocks_containing(act, 0);
  if (min_blocks.empty()) {
    // primitive action: the only continuation is the root
    below.push_back(blocks);
    std::vector<int> all;
    for (const auto &b : blocks)
      all.insert(all.end(), b.begin(), b.end());
    std::sort(all.begin(), all.end());
    PermGroup top(1);
    enumerate_trees_rec(top, {all}, below, out);
    below.pop_back();
    return;
  }
  for (const auto &mb : min_blocks) {
    BlockSystem bs = block_system_from_block(act, mb);
    BlocksAction ba = blocks_action(act, bs);
    std::vector<std::vector<int>> coarse = expand_blocks(bs.blocks, blocks);
    below.push_back(blocks);
    enumerate_trees_rec(ba.action, coarse, below, out);
    below.pop_back();
  }
}

} // namespace detail

/// Complete duplicate-free list of structure trees of a transitive group,
/// canonically ordered.
inline std::vector<StructureTree> enumerate_structure_trees(const PermGroup &g) {
  require(is_transitive(g), "NotTransitive", "structure trees need a transitive group");
  std::set<StructureTree> out;
  std::vector<std::vector<std::vector<int>>> below;
  detail::enumerate_trees_rec(g, detail::singleton_layer(g.degree()), below, out);
  return std::vector<StructureTree>(out.begin(), out.end());
}

/// Post-hoc validation of the structure-tree invariants: nesting, >=2
/// children, and primitivity of each stabilizer action on children.
inline bool verify_structure_tree(const PermGroup &g, const StructureTree &t) {
  const int m = g.degree();
  if (t.layers.empty() || t.layers.front().size() != 1 ||
      static_cast<int>(t.layers.front()[0].size()) != m)
    return false;
  if (static_cast<int>(t.layers.back().size()) != m)
    return false;
  if (t.depth() > static_cast<int>(std::ceil(std::log2(std::max(2, m)))) + 1)
    return false;
  for (std::size_t l = 0; l + 1 < t.layers.size(); ++l) {
    const auto &coarse = t.layers[l];
    const auto &fine = t.layers[l + 1];
    for (const auto &node : coarse) {
      std::vector<std::vector<int>> children;
      for (const auto &c : fine)
        if (std::includes(node.begin(), node.end(), c.begin(), c.end()))
          children.push_back(c);
      std::size_t covered = 0;
      for (const auto &c : children)
        covered += c.size();
      if (covered != node.size())
        return false;
      if (children.size() < 2 && node.size() != 1)
        return false;
      if (node.size() == 1)
        continue;
      // stabilizer of the node acts primitively on its children
      PermGroup stab = node.size() == static_cast<std::size_t>(m)
                           ? g
                           : setwise_stabilizer(g, node);
      std::vector<Perm> images;
      int k = static_cast<int>(children.size());
      std::vector<int> child_of(m, -1);
      for (int ci = 0; ci < k; ++ci)
        for (int p : children[ci])
          child_of[p] = ci;
      for (const Perm &s : stab.generators()) {
        std::vector<int> img(k);
        for (int ci = 0; ci < k; ++ci) {
          int target = child_of[s[children[ci][0]]];
          if (target < 0)
            return false;
          for (int p : children[ci])
            if (child_of[s[p]] != target)
              return false;
          img[ci] = target;
        }
        images.push_back(Perm(img));
      }
      PermGroup child_action(k, images);
      if (!is_transitive(child_action))
        return false;
      if (k > 2 && !minimal_blocks_containing(child_action, 0).empty())
        return false;
    }
  }
  return true;
}

} // namespace fitfree
