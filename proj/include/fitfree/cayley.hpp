#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fitfree/common.hpp"
#include "fitfree/perm.hpp"

namespace fitfree {

/// Fixed-width bitset over the elements 0..n-1 of a Cayley-table group.
class Subset {
public:
  Subset() : n_(0) {}
  explicit Subset(int n) : n_(n), w_((n + 63) / 64, 0) {}

  int universe() const { return n_; }

  bool test(int i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
  void set(int i) { w_[i >> 6] |= 1ULL << (i & 63); }
  void reset(int i) { w_[i >> 6] &= ~(1ULL << (i & 63)); }

  int count() const {
    int c = 0;
    for (std::uint64_t x : w_)
      c += __builtin_popcountll(x);
    return c;
  }

  bool empty() const {
    for (std::uint64_t x : w_)
      if (x)
        return false;
    return true;
  }

  std::vector<int> members() const {
    std::vector<int> out;
    out.reserve(count());
    for (int i = 0; i < n_; ++i)
      if (test(i))
        out.push_back(i);
    return out;
  }

  bool subset_of(const Subset &o) const {
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i] & ~o.w_[i])
        return false;
    return true;
  }

  Subset operator&(const Subset &o) const {
    Subset r(n_);
    for (std::size_t i = 0; i < w_.size(); ++i)
      r.w_[i] = w_[i] & o.w_[i];
    return r;
  }

  Subset operator|(const Subset &o) const {
    Subset r(n_);
    for (std::size_t i = 0; i < w_.size(); ++i)
      r.w_[i] = w_[i] | o.w_[i];
    return r;
  }

  bool operator==(const Subset &o) const { return n_ == o.n_ && w_ == o.w_; }
  bool operator!=(const Subset &o) const { return !(*this == o); }

  std::uint64_t hash() const {
    std::uint64_t h = 0x53ULL;
    for (std::uint64_t x : w_)
      h = hash_mix(h, x);
    return h;
  }

  static Subset of(int n, std::initializer_list<int> elems) {
    Subset s(n);
    for (int e : elems)
      s.set(e);
    return s;
  }

  static Subset of(int n, const std::vector<int> &elems) {
    Subset s(n);
    for (int e : elems)
      s.set(e);
    return s;
  }

private:
  int n_;
  std::vector<std::uint64_t> w_;
};

/// A finite group given by its full multiplication table. Elements are
/// 0..n-1 internally with 0 the identity; files use 1-based indices with
/// element 1 the identity. Immutable once built.
class CayleyGroup {
public:
  CayleyGroup() : n_(0) {}

  int order() const { return n_; }
  int mul(int a, int b) const { return tab_[static_cast<std::size_t>(a) * n_ + b]; }
  int inv(int a) const { return inv_[a]; }
  int element_order(int a) const { return ord_[a]; }

  // x^k for k >= 0
  int power(int x, int k) const {
    int r = 0;
    while (k-- > 0)
      r = mul(r, x);
    return r;
  }

  int conj(int g, int x) const { return mul(mul(g, x), inv(g)); }

  friend CayleyGroup validate_cayley(const std::vector<std::vector<int>> &, int);

private:
  int n_;
  std::vector<std::uint16_t> tab_;
  std::vector<std::uint16_t> inv_;
  std::vector<int> ord_;
};

enum AssocCheck {
  kAssocAuto = 0, // check when n <= 256
  kAssocOn = 1,
  kAssocOff = -1,
};

/// Validates a 1-based multiplication table: identity at index 1, Latin
/// square, inverses, and (policy permitting) full associativity.
inline CayleyGroup validate_cayley(const std::vector<std::vector<int>> &table,
                                   int assoc_policy = kAssocAuto) {
  const int n = static_cast<int>(table.size());
  require(n >= 1, "EmptyTable", "group must have at least the identity");
  require(n <= 65535, "TableTooLarge", "order " + std::to_string(n) + " exceeds 65535");
  for (int r = 0; r < n; ++r) {
    require(static_cast<int>(table[r].size()) == n, "RaggedTable",
            "row " + std::to_string(r + 1) + " has wrong length");
    for (int c = 0; c < n; ++c)
      require(table[r][c] >= 1 && table[r][c] <= n, "EntryOutOfRange",
              "cell (" + std::to_string(r + 1) + "," + std::to_string(c + 1) + ")");
  }
  for (int j = 0; j < n; ++j) {
    require(table[0][j] == j + 1, "NoIdentityAtOne",
            "table[1][" + std::to_string(j + 1) + "] = " + std::to_string(table[0][j]));
    require(table[j][0] == j + 1, "NoIdentityAtOne",
            "table[" + std::to_string(j + 1) + "][1] = " + std::to_string(table[j][0]));
  }
  {
    std::vector<char> seen(n);
    for (int r = 0; r < n; ++r) {
      std::fill(seen.begin(), seen.end(), 0);
      for (int c = 0; c < n; ++c) {
        int v = table[r][c] - 1;
        require(!seen[v], "NotLatinSquare",
                "row " + std::to_string(r + 1) + " repeats " + std::to_string(v + 1) +
                    " at column " + std::to_string(c + 1));
        seen[v] = 1;
      }
    }
    for (int c = 0; c < n; ++c) {
      std::fill(seen.begin(), seen.end(), 0);
      for (int r = 0; r < n; ++r) {
        int v = table[r][c] - 1;
        require(!seen[v], "NotLatinSquare",
                "column " + std::to_string(c + 1) + " repeats " + std::to_string(v + 1) +
                    " at row " + std::to_string(r + 1));
        seen[v] = 1;
      }
    }
  }

  CayleyGroup g;
  g.n_ = n;
  g.tab_.resize(static_cast<std::size_t>(n) * n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      g.tab_[static_cast<std::size_t>(r) * n + c] = static_cast<std::uint16_t>(table[r][c] - 1);

  g.inv_.resize(n);
  for (int a = 0; a < n; ++a) {
    int found = -1;
    for (int b = 0; b < n; ++b)
      if (g.mul(a, b) == 0) {
        found = b;
        break;
      }
    require(found >= 0 && g.mul(found, a) == 0, "NoInverse",
            "element " + std::to_string(a + 1));
    g.inv_[a] = static_cast<std::uint16_t>(found);
  }

  bool check_assoc = assoc_policy == kAssocOn || (assoc_policy == kAssocAuto && n <= 256);
  if (check_assoc) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        int ab = g.mul(a, b);
        for (int c = 0; c < n; ++c)
          require(g.mul(ab, c) == g.mul(a, g.mul(b, c)), "NotAssociative",
                  "triple (" + std::to_string(a + 1) + "," + std::to_string(b + 1) + "," +
                      std::to_string(c + 1) + ")");
      }
  }

  g.ord_.resize(n);
  for (int a = 0; a < n; ++a) {
    int x = a, o = 1;
    while (x != 0) {
      x = g.mul(x, a);
      require(++o <= n, "NotAssociative",
              "powers of " + std::to_string(a + 1) + " never reach the identity");
    }
    g.ord_[a] = o;
  }
  return g;
}

/// Smallest subgroup containing a nonempty seed, by Wolf-style doubling:
/// T <- T*T until fixed.
inline Subset subgroup_closure(const CayleyGroup &g, const Subset &seed) {
  require(!seed.empty(), "EmptySeed", "subgroup closure of an empty set");
  Subset cur = seed;
  cur.set(0);
  for (;;) {
    std::vector<int> elems = cur.members();
    Subset next = cur;
    for (int a : elems)
      for (int b : elems)
        next.set(g.mul(a, b));
    if (next == cur)
      return cur;
    cur = next;
  }
}

/// The normal closure ncl_G(x) as an element set: generated by the whole
/// conjugate set { g x g^-1 }.
inline Subset normal_closure_elements(const CayleyGroup &g, int x) {
  Subset seed(g.order());
  for (int h = 0; h < g.order(); ++h)
    seed.set(g.conj(h, x));
  return subgroup_closure(g, seed);
}

inline bool subset_is_abelian(const CayleyGroup &g, const std::vector<int> &elems) {
  for (std::size_t i = 0; i < elems.size(); ++i)
    for (std::size_t j = i + 1; j < elems.size(); ++j)
      if (g.mul(elems[i], elems[j]) != g.mul(elems[j], elems[i]))
        return false;
  return true;
}

/// For each member of `actors`, the permutation of `parts` induced by
/// conjugation. Parts must be disjoint and permuted setwise.
inline std::vector<Perm> conjugation_action(const CayleyGroup &g, const Subset &actors,
                                            const std::vector<Subset> &parts) {
  const int k = static_cast<int>(parts.size());
  // a representative nontrivial (when possible) element of each part
  std::vector<int> probe(k, -1);
  std::vector<int> part_of(g.order(), -1);
  for (int p = 0; p < k; ++p) {
    for (int e : parts[p].members()) {
      require(part_of[e] < 0, "PartsNotDisjoint", "element " + std::to_string(e + 1));
      part_of[e] = p;
      if (probe[p] < 0 || probe[p] == 0)
        probe[p] = e;
    }
    require(probe[p] >= 0, "EmptyPart", "part " + std::to_string(p + 1));
  }
  std::vector<Perm> out;
  out.reserve(actors.count());
  for (int a : actors.members()) {
    std::vector<int> img(k, -1);
    for (int p = 0; p < k; ++p) {
      int target = part_of[g.conj(a, probe[p])];
      require(target >= 0, "PartsNotPermuted",
              "g=" + std::to_string(a + 1) + " moves part " + std::to_string(p + 1) +
                  " outside the listed parts");
      img[p] = target;
    }
    Perm perm;
    try {
      perm = Perm(img);
    } catch (const Error &) {
      fail("PartsNotPermuted", "g=" + std::to_string(a + 1) + " does not permute the parts");
    }
    // conjugation must carry the whole part, not just the probe
    for (int p = 0; p < k; ++p)
      for (int e : parts[p].members())
        require(parts[perm[p]].test(g.conj(a, e)), "PartsNotPermuted",
                "g=" + std::to_string(a + 1) + " splits part " + std::to_string(p + 1));
    out.push_back(std::move(perm));
  }
  return out;
}

// ---- analysis helpers shared by the isomorphism machinery ----

struct ConjugacyClasses {
  std::vector<int> class_of;          // element -> class id
  std::vector<std::vector<int>> classes; // class id -> sorted members
};

inline ConjugacyClasses conjugacy_classes(const CayleyGroup &g) {
  const int n = g.order();
  ConjugacyClasses cc;
  cc.class_of.assign(n, -1);
  for (int x = 0; x < n; ++x) {
    if (cc.class_of[x] >= 0)
      continue;
    int id = static_cast<int>(cc.classes.size());
    std::vector<int> mem;
    for (int h = 0; h < n; ++h) {
      int y = g.conj(h, x);
      if (cc.class_of[y] < 0) {
        cc.class_of[y] = id;
        mem.push_back(y);
      }
    }
    std::sort(mem.begin(), mem.end());
    cc.classes.push_back(std::move(mem));
  }
  return cc;
}

/// Isomorphism-invariant per-element fingerprints: element order, class
/// size, and the class data of small powers. Used to prune image candidates.
inline std::vector<std::uint64_t> element_fingerprints(const CayleyGroup &g,
                                                       const ConjugacyClasses &cc) {
  const int n = g.order();
  std::vector<std::uint64_t> base(n), fp(n);
  for (int x = 0; x < n; ++x) {
    std::uint64_t h = 0x11ULL;
    h = hash_mix(h, g.element_order(x));
    h = hash_mix(h, cc.classes[cc.class_of[x]].size());
    base[x] = h;
  }
  // refine by power maps: x -> x^2, x -> x^3
  for (int x = 0; x < n; ++x) {
    std::uint64_t h = base[x];
    h = hash_mix(h, base[g.mul(x, x)]);
    h = hash_mix(h, base[g.mul(g.mul(x, x), x)]);
    fp[x] = h;
  }
  // one round of class-level refinement: multiset of class fingerprints is
  // not available count-free, so fold in the class of the inverse as well
  for (int x = 0; x < n; ++x)
    fp[x] = hash_mix(fp[x], base[g.inv(x)]);
  return fp;
}

/// Greedy irredundant generating sequence. Each step picks, among elements
/// outside the current closure, one whose fingerprint class is rarest
/// (ties by index): rare fingerprints shrink image-candidate sets downstream.
inline std::vector<int> greedy_generating_sequence(const CayleyGroup &g) {
  const int n = g.order();
  ConjugacyClasses cc = conjugacy_classes(g);
  std::vector<std::uint64_t> fp = element_fingerprints(g, cc);
  std::vector<int> rarity(n, 0);
  {
    std::vector<std::uint64_t> sorted(fp);
    std::sort(sorted.begin(), sorted.end());
    for (int x = 0; x < n; ++x) {
      auto lo = std::lower_bound(sorted.begin(), sorted.end(), fp[x]);
      auto hi = std::upper_bound(sorted.begin(), sorted.end(), fp[x]);
      rarity[x] = static_cast<int>(hi - lo);
    }
  }
  std::vector<int> gens;
  Subset closure(n);
  closure.set(0);
  while (closure.count() < n) {
    int best = -1;
    for (int x = 0; x < n; ++x) {
      if (closure.test(x))
        continue;
      if (best < 0 || rarity[x] < rarity[best])
        best = x;
    }
    gens.push_back(best);
    Subset seed = closure;
    seed.set(best);
    closure = subgroup_closure(g, seed);
  }
  return gens;
}

/// Extracts the subgroup on `sub` as its own CayleyGroup. Element i of the
/// result is elems[i] of the parent; ascending order keeps identity first.
struct SubgroupCayley {
  CayleyGroup group;
  std::vector<int> elems;           // sub index -> parent element
  std::vector<int> index_in_sub;    // parent element -> sub index or -1
};

inline SubgroupCayley subgroup_cayley(const CayleyGroup &g, const Subset &sub) {
  SubgroupCayley out;
  out.elems = sub.members();
  const int m = static_cast<int>(out.elems.size());
  out.index_in_sub.assign(g.order(), -1);
  for (int i = 0; i < m; ++i)
    out.index_in_sub[out.elems[i]] = i;
  require(m >= 1 && out.elems[0] == 0, "NotASubgroup", "identity missing from subset");
  std::vector<std::vector<int>> table(m, std::vector<int>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      int prod = g.mul(out.elems[i], out.elems[j]);
      int idx = out.index_in_sub[prod];
      require(idx >= 0, "NotASubgroup",
              "subset not closed: " + std::to_string(out.elems[i] + 1) + "*" +
                  std::to_string(out.elems[j] + 1));
      table[i][j] = idx + 1;
    }
  out.group = validate_cayley(table, kAssocOff);
  return out;
}

/// Relabels a group by a bijection rho (new index = rho[old index]);
/// rho[0] must be 0 so the identity stays at slot one.
inline CayleyGroup relabel_cayley(const CayleyGroup &g, const std::vector<int> &rho) {
  const int n = g.order();
  require(rho[0] == 0, "BadRelabeling", "identity must stay fixed");
  std::vector<std::vector<int>> table(n, std::vector<int>(n));
  std::vector<int> inv_rho(n);
  for (int i = 0; i < n; ++i)
    inv_rho[rho[i]] = i;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      table[a][b] = rho[g.mul(inv_rho[a], inv_rho[b])] + 1;
  return validate_cayley(table, kAssocOff);
}

/// Exhaustive check that `map` (old -> new element) is an isomorphism
/// between equal-order groups: bijective and multiplicative on all pairs.
inline bool is_group_isomorphism(const CayleyGroup &a, const CayleyGroup &b,
                                 const std::vector<int> &map) {
  const int n = a.order();
  if (b.order() != n || static_cast<int>(map.size()) != n)
    return false;
  std::vector<char> hit(n, 0);
  for (int x = 0; x < n; ++x) {
    if (map[x] < 0 || map[x] >= n || hit[map[x]])
      return false;
    hit[map[x]] = 1;
  }
  if (map[0] != 0)
    return false;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (map[a.mul(x, y)] != b.mul(map[x], map[y]))
        return false;
  return true;
}

} // namespace fitfree
