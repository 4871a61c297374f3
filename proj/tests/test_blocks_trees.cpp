#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "fitfree/blocks.hpp"
#include "fitfree/perm.hpp"
#include "fitfree/perm_group.hpp"
#include "fitfree/structure_tree.hpp"

using namespace fitfree;

namespace {

PermGroup c4() { return PermGroup(4, {Perm::from_cycles(4, {{0, 1, 2, 3}})}); }
PermGroup a5() {
  return PermGroup(5, {Perm::from_cycles(5, {{0, 1, 2, 3, 4}}), Perm::from_cycles(5, {{0, 1, 2}})});
}

// oracle: blocks found by scanning all subsets containing x against the
// full element list
std::vector<std::vector<int>> exhaustive_min_blocks(const PermGroup &g, int x) {
  const int m = g.degree();
  std::vector<Perm> elems = g.elements();
  std::vector<std::vector<int>> blocks;
  for (int mask = 0; mask < (1 << m); ++mask) {
    if (!(mask & (1 << x)))
      continue;
    int size = __builtin_popcount(mask);
    if (size < 2 || size == m)
      continue;
    bool ok = true;
    for (const Perm &e : elems) {
      int img = 0;
      for (int p = 0; p < m; ++p)
        if (mask & (1 << p))
          img |= 1 << e[p];
      if (img != mask && (img & mask)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      std::vector<int> b;
      for (int p = 0; p < m; ++p)
        if (mask & (1 << p))
          b.push_back(p);
      blocks.push_back(b);
    }
  }
  std::vector<std::vector<int>> minimal;
  for (const auto &c : blocks) {
    bool min = true;
    for (const auto &d : blocks)
      if (d != c && d.size() < c.size() &&
          std::includes(c.begin(), c.end(), d.begin(), d.end()))
        min = false;
    if (min)
      minimal.push_back(c);
  }
  std::sort(minimal.begin(), minimal.end());
  return minimal;
}

void oracle_trees_rec(const PermGroup &act, const std::vector<std::vector<int>> &blocks,
                      std::vector<std::vector<std::vector<int>>> &below,
                      std::set<StructureTree> &out) {
  if (blocks.size() == 1) {
    StructureTree t;
    t.layers.push_back(blocks);
    for (auto it = below.rbegin(); it != below.rend(); ++it)
      t.layers.push_back(*it);
    out.insert(std::move(t));
    return;
  }
  auto mins = exhaustive_min_blocks(act, 0);
  if (mins.empty()) {
    below.push_back(blocks);
    std::vector<int> all;
    for (const auto &b : blocks)
      all.insert(all.end(), b.begin(), b.end());
    std::sort(all.begin(), all.end());
    oracle_trees_rec(PermGroup(1), {all}, below, out);
    below.pop_back();
    return;
  }
  for (const auto &mb : mins) {
    BlockSystem bs = block_system_from_block(act, mb);
    BlocksAction ba = blocks_action(act, bs);
    std::vector<std::vector<int>> coarse;
    for (const auto &c : bs.blocks) {
      std::vector<int> pts;
      for (int bi : c)
        pts.insert(pts.end(), blocks[bi].begin(), blocks[bi].end());
      std::sort(pts.begin(), pts.end());
      coarse.push_back(pts);
    }
    std::sort(coarse.begin(), coarse.end());
    below.push_back(blocks);
    oracle_trees_rec(ba.action, coarse, below, out);
    below.pop_back();
  }
}

std::set<StructureTree> oracle_trees(const PermGroup &g) {
  std::set<StructureTree> out;
  std::vector<std::vector<std::vector<int>>> below;
  std::vector<std::vector<int>> singles;
  for (int i = 0; i < g.degree(); ++i)
    singles.push_back({i});
  oracle_trees_rec(g, singles, below, out);
  return out;
}

} // namespace

TEST_CASE("orbits") {
  PermGroup g(4, {Perm::from_cycles(4, {{0, 1}, {2, 3}})});
  auto o = orbits(g);
  REQUIRE(o.size() == 2);
  CHECK(o[0] == std::vector<int>{0, 1});
  CHECK(o[1] == std::vector<int>{2, 3});

  CHECK(orbits(a5()).size() == 1);

  auto o3 = orbits(PermGroup(3));
  REQUIRE(o3.size() == 3);
  CHECK(o3[2] == std::vector<int>{2});
}

TEST_CASE("minimal blocks containing a point") {
  auto b = minimal_blocks_containing(c4(), 0);
  REQUIRE(b.size() == 1);
  CHECK(b[0] == std::vector<int>{0, 2});

  CHECK(minimal_blocks_containing(a5(), 0).empty());

  PermGroup g(4, {Perm::from_cycles(4, {{0, 1}}), Perm::from_cycles(4, {{2, 3}}),
                  Perm::from_cycles(4, {{0, 2}, {1, 3}})});
  auto b2 = minimal_blocks_containing(g, 0);
  REQUIRE(b2.size() == 1);
  CHECK(b2[0] == std::vector<int>{0, 1});

  CHECK_THROWS_AS(minimal_blocks_containing(PermGroup(3), 0), Error);
}

TEST_CASE("minimal blocks equal exhaustive enumeration") {
  std::vector<PermGroup> pool = {
      c4(),
      PermGroup(6, {Perm::from_cycles(6, {{0, 1, 2, 3, 4, 5}})}),
      PermGroup(6, {Perm::from_cycles(6, {{0, 1, 2, 3, 4, 5}}), Perm::from_cycles(6, {{1, 5}, {2, 4}})}),
      PermGroup(4, {Perm::from_cycles(4, {{0, 1}, {2, 3}}), Perm::from_cycles(4, {{0, 2}, {1, 3}})}),
      PermGroup::symmetric(4),
      PermGroup(6, {Perm::from_cycles(6, {{0, 1, 2}}), Perm::from_cycles(6, {{3, 4, 5}}),
                    Perm::from_cycles(6, {{0, 3}, {1, 4}, {2, 5}})}),
      a5(),
  };
  for (const auto &g : pool) {
    if (!is_transitive(g))
      continue;
    auto got = minimal_blocks_containing(g, 0);
    std::sort(got.begin(), got.end());
    auto want = exhaustive_min_blocks(g, 0);
    CHECK(got == want);
  }
}

TEST_CASE("blocks_action") {
  SECTION("singleton blocks give the group itself") {
    PermGroup g = c4();
    std::vector<std::vector<int>> singles = {{0}, {1}, {2}, {3}};
    BlockSystem bs = make_block_system(4, singles);
    BlocksAction ba = blocks_action(g, bs);
    CHECK(static_cast<long long>(ba.action.order()) == 4);
    CHECK(static_cast<long long>(ba.kernel.order()) == 1);
  }

  SECTION("C4 on {0,2},{1,3}") {
    BlockSystem bs = make_block_system(4, {{0, 2}, {1, 3}});
    BlocksAction ba = blocks_action(c4(), bs);
    CHECK(static_cast<long long>(ba.action.order()) == 2);
    CHECK(static_cast<long long>(ba.kernel.order()) == 2);
    CHECK(ba.kernel.contains(Perm::from_cycles(4, {{0, 2}, {1, 3}})));
  }

  SECTION("whole domain as one block") {
    BlockSystem bs = make_block_system(4, {{0, 1, 2, 3}});
    BlocksAction ba = blocks_action(c4(), bs);
    CHECK(static_cast<long long>(ba.action.order()) == 1);
    CHECK(static_cast<long long>(ba.kernel.order()) == 4);
  }

  SECTION("broken blocks rejected") {
    CHECK_THROWS_AS(blocks_action(c4(), make_block_system(4, {{0, 1}, {2, 3}})), Error);
  }
}

TEST_CASE("structure trees of named groups") {
  auto ts_a5 = enumerate_structure_trees(a5());
  REQUIRE(ts_a5.size() == 1);
  CHECK(ts_a5[0].depth() == 1);

  auto ts_c4 = enumerate_structure_trees(c4());
  REQUIRE(ts_c4.size() == 1);
  CHECK(ts_c4[0].depth() == 2);
  REQUIRE(ts_c4[0].layers[1].size() == 2);
  CHECK(ts_c4[0].layers[1][0] == std::vector<int>{0, 2});
  CHECK(ts_c4[0].layers[1][1] == std::vector<int>{1, 3});

  auto ts_triv = enumerate_structure_trees(PermGroup(1));
  REQUIRE(ts_triv.size() == 1);
  CHECK(ts_triv[0].depth() == 0);
}

TEST_CASE("structure trees match exhaustive enumeration and invariants") {
  std::vector<PermGroup> pool = {
      c4(),
      PermGroup(6, {Perm::from_cycles(6, {{0, 1, 2, 3, 4, 5}})}),
      PermGroup(8, {Perm::from_cycles(8, {{0, 1, 2, 3, 4, 5, 6, 7}})}),
      PermGroup(8, {Perm::from_cycles(8, {{0, 1, 2, 3, 4, 5, 6, 7}}),
                    Perm::from_cycles(8, {{1, 7}, {2, 6}, {3, 5}})}),
      PermGroup(6, {Perm::from_cycles(6, {{0, 1, 2}}), Perm::from_cycles(6, {{3, 4, 5}}),
                    Perm::from_cycles(6, {{0, 3}, {1, 4}, {2, 5}})}),
      PermGroup::symmetric(4),
      PermGroup(4, {Perm::from_cycles(4, {{0, 1}, {2, 3}}), Perm::from_cycles(4, {{0, 2}, {1, 3}})}),
  };
  for (const auto &g : pool) {
    auto got = enumerate_structure_trees(g);
    auto want = oracle_trees(g);
    CHECK(std::set<StructureTree>(got.begin(), got.end()) == want);
    const double m = g.degree();
    const double bound = std::pow(m, 2.0 * std::log2(std::max(2.0, m)));
    CHECK(static_cast<double>(got.size()) <= bound);
    for (const auto &t : got)
      CHECK(verify_structure_tree(g, t));
  }
}

TEST_CASE("structure tree layers are orbits of a member block") {
  PermGroup g(8, {Perm::from_cycles(8, {{0, 1, 2, 3, 4, 5, 6, 7}})});
  for (const auto &t : enumerate_structure_trees(g)) {
    for (std::size_t l = 1; l + 1 < t.layers.size(); ++l) {
      BlockSystem bs = block_system_from_block(g, t.layers[l][0]);
      CHECK(bs.blocks == t.layers[l]);
    }
  }
}

TEST_CASE("setwise stabilizer") {
  PermGroup s4 = PermGroup::symmetric(4);
  PermGroup stab = setwise_stabilizer(s4, {0, 1});
  CHECK(static_cast<long long>(stab.order()) == 4);
  for (const Perm &p : stab.generators()) {
    bool maps_in = (p[0] == 0 || p[0] == 1) && (p[1] == 0 || p[1] == 1);
    CHECK(maps_in);
  }

  // against exhaustive filter
  std::size_t expect = 0;
  for (const Perm &p : s4.elements()) {
    std::set<int> img{p[0], p[1]};
    if (img == std::set<int>{0, 1})
      ++expect;
  }
  CHECK(static_cast<std::size_t>(stab.order()) == expect);
}
