#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "fitfree/cayley.hpp"
#include "fitfree/common.hpp"

namespace fitfree {

/// Generator-enumeration isomorphism search between Cayley-table groups:
/// images of a greedy irredundant generating sequence are tried in
/// lexicographic order, pruned by class/order fingerprints, and each
/// partial assignment is validated by rebuilding the generated subgroup
/// with the candidate map.
class IsoSearch {
public:
  IsoSearch(const CayleyGroup &g, const CayleyGroup &h) : g_(g), h_(h) {
    if (g.order() != h.order())
      return;
    gens_ = greedy_generating_sequence(g);
    ConjugacyClasses cg = conjugacy_classes(g);
    ConjugacyClasses ch = conjugacy_classes(h);
    std::vector<std::uint64_t> fg = element_fingerprints(g, cg);
    std::vector<std::uint64_t> fh = element_fingerprints(h, ch);
    candidates_.resize(gens_.size());
    feasible_ = true;
    for (std::size_t i = 0; i < gens_.size(); ++i) {
      for (int y = 0; y < h.order(); ++y)
        if (fh[y] == fg[gens_[i]])
          candidates_[i].push_back(y);
      if (candidates_[i].empty())
        feasible_ = false;
    }
  }

  /// All isomorphisms (element maps old->new), or just the first when
  /// limit == 1. Lexicographic in the image tuple of the sequence.
  std::vector<std::vector<int>> run(std::size_t limit) {
    results_.clear();
    limit_ = limit;
    if (g_.order() != h_.order() || !feasible_)
      return {};
    if (g_.order() == 1)
      return {{0}};
    images_.assign(gens_.size(), -1);
    dfs(0);
    return std::move(results_);
  }

  std::optional<std::vector<int>> first() {
    auto r = run(1);
    if (r.empty())
      return std::nullopt;
    return r[0];
  }

private:
  // rebuilds the closure of the first `count` generators, carrying the
  // candidate map; false on any multiplicative or injectivity conflict
  bool check_partial(std::size_t count, std::vector<int> *full_map) {
    const int n = g_.order();
    std::vector<int> map(n, -1), inv(n, -1);
    map[0] = 0;
    inv[0] = 0;
    std::vector<int> list{0};
    for (std::size_t i = 0; i < list.size(); ++i) {
      int a = list[i];
      for (std::size_t j = 0; j < count; ++j) {
        int b = g_.mul(a, gens_[j]);
        int hb = h_.mul(map[a], images_[j]);
        if (map[b] < 0) {
          if (inv[hb] >= 0)
            return false;
          map[b] = hb;
          inv[hb] = b;
          list.push_back(b);
        } else if (map[b] != hb) {
          return false;
        }
      }
    }
    if (full_map) {
      if (static_cast<int>(list.size()) != n)
        return false;
      *full_map = std::move(map);
    }
    return true;
  }

  void dfs(std::size_t level) {
    if (results_.size() >= limit_)
      return;
    if (level == gens_.size()) {
      std::vector<int> full;
      if (check_partial(level, &full))
        results_.push_back(std::move(full));
      return;
    }
    for (int y : candidates_[level]) {
      if (g_.element_order(gens_[level]) != h_.element_order(y))
        continue;
      images_[level] = y;
      if (check_partial(level + 1, nullptr))
        dfs(level + 1);
      images_[level] = -1;
      if (results_.size() >= limit_)
        return;
    }
  }

  const CayleyGroup &g_;
  const CayleyGroup &h_;
  std::vector<int> gens_;
  std::vector<std::vector<int>> candidates_;
  std::vector<int> images_;
  std::vector<std::vector<int>> results_;
  std::size_t limit_ = 0;
  bool feasible_ = false;
};

/// Every isomorphism G -> H as an element map; capped by `limit`.
inline std::vector<std::vector<int>> list_isomorphisms(const CayleyGroup &g, const CayleyGroup &h,
                                                       std::size_t limit = 1000000) {
  return IsoSearch(g, h).run(limit);
}

inline std::optional<std::vector<int>> find_isomorphism(const CayleyGroup &g,
                                                        const CayleyGroup &h) {
  return IsoSearch(g, h).first();
}

} // namespace fitfree
