#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <vector>

#include "fitfree/common.hpp"
#include "fitfree/perm.hpp"
#include "fitfree/perm_group.hpp"

namespace fitfree {

/// Orbit partition, blocks ordered by their minimum point.
inline std::vector<std::vector<int>> orbits(const PermGroup &g) {
  const int m = g.degree();
  std::vector<int> owner(m, -1);
  std::vector<std::vector<int>> out;
  for (int x = 0; x < m; ++x) {
    if (owner[x] >= 0)
      continue;
    std::vector<int> orbit{x};
    owner[x] = static_cast<int>(out.size());
    for (std::size_t i = 0; i < orbit.size(); ++i)
      for (const Perm &p : g.generators()) {
        int y = p[orbit[i]];
        if (owner[y] < 0) {
          owner[y] = owner[x];
          orbit.push_back(y);
        }
      }
    std::sort(orbit.begin(), orbit.end());
    out.push_back(std::move(orbit));
  }
  return out;
}

inline bool is_transitive(const PermGroup &g) { return orbits(g).size() == 1; }

/// All minimal non-trivial blocks containing x, via connected components of
/// the orbital digraphs through x. Empty result means G is primitive.
inline std::vector<std::vector<int>> minimal_blocks_containing(const PermGroup &g, int x) {
  require(is_transitive(g), "NotTransitive", "minimal blocks need a transitive group");
  const int m = g.degree();
  std::vector<std::vector<int>> candidates;
  for (int y = 0; y < m; ++y) {
    if (y == x)
      continue;
    // orbital of (x, y): BFS on ordered pairs
    std::vector<char> in_orbital(static_cast<std::size_t>(m) * m, 0);
    std::vector<std::pair<int, int>> queue{{x, y}};
    in_orbital[static_cast<std::size_t>(x) * m + y] = 1;
    // union-find over points for the weak components of this digraph
    std::vector<int> parent(m);
    for (int i = 0; i < m; ++i)
      parent[i] = i;
    std::function<int(int)> find = [&](int v) {
      while (parent[v] != v)
        v = parent[v] = parent[parent[v]];
      return v;
    };
    auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
    unite(x, y);
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      auto [a, b] = queue[qi];
      for (const Perm &p : g.generators()) {
        int a2 = p[a], b2 = p[b];
        if (!in_orbital[static_cast<std::size_t>(a2) * m + b2]) {
          in_orbital[static_cast<std::size_t>(a2) * m + b2] = 1;
          queue.emplace_back(a2, b2);
          unite(a2, b2);
        }
      }
    }
    std::vector<int> comp;
    for (int v = 0; v < m; ++v)
      if (find(v) == find(x))
        comp.push_back(v);
    if (static_cast<int>(comp.size()) < m) // whole domain is a trivial block
      candidates.push_back(std::move(comp));
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  // keep the set-minimal ones
  std::vector<std::vector<int>> minimal;
  for (const auto &c : candidates) {
    bool min = true;
    for (const auto &d : candidates) {
      if (d.size() >= c.size() || d == c)
        continue;
      if (std::includes(c.begin(), c.end(), d.begin(), d.end())) {
        min = false;
        break;
      }
    }
    if (min)
      minimal.push_back(c);
  }
  return minimal;
}

/// A system of imprimitivity: equal-size blocks partitioning the domain,
/// each generator mapping blocks to blocks.
struct BlockSystem {
  std::vector<std::vector<int>> blocks; // sorted by minimum point, members sorted
  std::vector<int> block_of;            // point -> block index

  int block_size() const { return blocks.empty() ? 0 : static_cast<int>(blocks[0].size()); }
  int count() const { return static_cast<int>(blocks.size()); }
};

inline BlockSystem make_block_system(int degree, std::vector<std::vector<int>> blocks) {
  BlockSystem bs;
  for (auto &b : blocks)
    std::sort(b.begin(), b.end());
  std::sort(blocks.begin(), blocks.end());
  bs.blocks = std::move(blocks);
  bs.block_of.assign(degree, -1);
  std::size_t sz = bs.blocks.empty() ? 0 : bs.blocks[0].size();
  int covered = 0;
  for (std::size_t i = 0; i < bs.blocks.size(); ++i) {
    require(bs.blocks[i].size() == sz, "NotABlockSystem", "blocks of unequal size");
    for (int p : bs.blocks[i]) {
      require(p >= 0 && p < degree && bs.block_of[p] < 0, "NotABlockSystem",
              "blocks overlap or leave the domain");
      bs.block_of[p] = static_cast<int>(i);
      ++covered;
    }
  }
  require(covered == degree, "NotABlockSystem", "blocks do not cover the domain");
  return bs;
}

/// Orbit of one block under the generators; validates invariance.
inline BlockSystem block_system_from_block(const PermGroup &g, const std::vector<int> &block) {
  std::set<std::vector<int>> seen;
  std::vector<int> b0 = block;
  std::sort(b0.begin(), b0.end());
  seen.insert(b0);
  std::vector<std::vector<int>> queue{b0};
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    for (const Perm &p : g.generators()) {
      std::vector<int> img;
      img.reserve(queue[qi].size());
      for (int v : queue[qi])
        img.push_back(p[v]);
      std::sort(img.begin(), img.end());
      if (seen.insert(img).second)
        queue.push_back(img);
    }
  }
  BlockSystem bs = make_block_system(g.degree(),
                                     std::vector<std::vector<int>>(seen.begin(), seen.end()));
  // invariance: the image of every block is a block of the partition
  for (const auto &b : bs.blocks)
    for (const Perm &p : g.generators()) {
      int target = bs.block_of[p[b[0]]];
      for (int v : b)
        require(bs.block_of[p[v]] == target, "NotABlockSystem",
                "generator splits the block of point " + std::to_string(b[0] + 1));
    }
  return bs;
}

/// Induced action on the blocks plus its kernel.
struct BlocksAction {
  PermGroup action; // degree = number of blocks
  PermGroup kernel; // subgroup of g
};

inline BlocksAction blocks_action(const PermGroup &g, const BlockSystem &bs) {
  const int k = bs.count();
  std::vector<Perm> images;
  for (const Perm &p : g.generators()) {
    std::vector<int> img(k);
    for (int i = 0; i < k; ++i) {
      int target = bs.block_of[p[bs.blocks[i][0]]];
      for (int v : bs.blocks[i])
        require(bs.block_of[p[v]] == target, "NotABlockSystem",
                "generator splits block " + std::to_string(i + 1));
      img[i] = target;
    }
    images.push_back(Perm(img));
  }
  BlocksAction out;
  out.action = PermGroup(k, images);
  out.kernel = action_kernel(g, images, k);
  return out;
}

/// Setwise stabilizer by chain-based backtrack over base images.
inline PermGroup setwise_stabilizer(const PermGroup &g, const std::vector<int> &set,
                                    std::size_t leaf_limit = 2000000) {
  const int m = g.degree();
  std::vector<char> in_set(m, 0);
  for (int p : set)
    in_set[p] = 1;
  const auto &ch = g.chain_with_prefix({});
  const auto &levels = ch.levels();
  std::vector<Perm> found;
  std::size_t leaves = 0;
  std::function<void(std::size_t, const Perm &)> dfs = [&](std::size_t level, const Perm &v) {
    if (level == levels.size()) {
      require(++leaves <= leaf_limit, "BudgetExceeded", "setwise stabilizer backtrack");
      bool ok = true;
      for (int p : set)
        ok = ok && in_set[v[p]];
      if (ok && !v.is_identity())
        found.push_back(v);
      return;
    }
    const auto &lv = levels[level];
    std::vector<int> pts = lv.orbit;
    std::sort(pts.begin(), pts.end());
    for (int p : pts) {
      int q = v[p];
      if (in_set[lv.base_point] != in_set[q])
        continue;
      dfs(level + 1, lv.reps[lv.rep_of[p]] * v);
    }
  };
  dfs(0, Perm::identity(m));
  return PermGroup(m, found).reduce_generators();
}

} // namespace fitfree
