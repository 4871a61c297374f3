#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "fitfree/cayley.hpp"
#include "fitfree/common.hpp"
#include "fitfree/parallel.hpp"
#include "fitfree/perm.hpp"
#include "fitfree/perm_group.hpp"
#include "fitfree/subcoset.hpp"

namespace fitfree {

/// One alphabet class: the letters, how many positions use it, and the
/// acting group with its letter action.
struct TwistedAlphabet {
  int letters = 0;
  int positions = 0;
  CayleyGroup group;
  std::vector<std::vector<int>> action; // element -> image of each letter
};

/// Codes A and B over shared position layout: positions 0..m-1 grouped by
/// alphabet class (class 0 first). Strings assign a letter to each position.
struct TwistedCodeInstance {
  std::vector<TwistedAlphabet> alphabets;
  std::vector<std::vector<int>> code_a;
  std::vector<std::vector<int>> code_b;

  // derived layout
  std::vector<int> class_of;   // position -> alphabet class
  std::vector<int> point_base; // position -> first composite point of its fiber
  int total_positions = 0;
  int total_points = 0;

  void finalize() {
    class_of.clear();
    point_base.clear();
    total_positions = 0;
    total_points = 0;
    for (std::size_t i = 0; i < alphabets.size(); ++i)
      for (int k = 0; k < alphabets[i].positions; ++k) {
        class_of.push_back(static_cast<int>(i));
        point_base.push_back(total_points);
        total_points += alphabets[i].letters;
        ++total_positions;
      }
  }

  int letters_at(int pos) const { return alphabets[class_of[pos]].letters; }
};

inline void validate_twisted_instance(const TwistedCodeInstance &inst) {
  require(!inst.alphabets.empty(), "MalformedInstance", "no alphabets");
  long long group_total = 0;
  for (const auto &al : inst.alphabets) {
    require(al.letters >= 1 && al.positions >= 1, "MalformedInstance",
            "alphabet needs letters and positions");
    group_total += al.group.order();
    require(static_cast<int>(al.action.size()) == al.group.order(), "MalformedInstance",
            "action table must have one row per group element");
    for (const auto &row : al.action) {
      require(static_cast<int>(row.size()) == al.letters, "MalformedInstance",
              "action row length");
      std::vector<char> seen(al.letters, 0);
      for (int v : row) {
        require(v >= 0 && v < al.letters && !seen[v], "MalformedInstance",
                "action row is not a letter permutation");
        seen[v] = 1;
      }
    }
    // identity law and compatibility: a genuine action of the group
    for (int l = 0; l < al.letters; ++l)
      require(al.action[0][l] == l, "MalformedInstance", "identity must act trivially");
    for (int a = 0; a < al.group.order(); ++a)
      for (int b = 0; b < al.group.order(); ++b) {
        int ab = al.group.mul(a, b);
        for (int l = 0; l < al.letters; ++l)
          require(al.action[ab][l] == al.action[b][al.action[a][l]], "MalformedInstance",
                  "action is not compatible with the group product");
      }
  }
  require(inst.total_positions <= 16, "MalformedInstance",
          "total length beyond the supported limit of 16");
  require(group_total <= 10000, "MalformedInstance", "total acting-group size beyond 10^4");
  for (const auto *code : {&inst.code_a, &inst.code_b})
    for (const auto &s : *code) {
      require(static_cast<int>(s.size()) == inst.total_positions, "MalformedInstance",
              "string length mismatch");
      for (int p = 0; p < inst.total_positions; ++p)
        require(s[p] >= 0 && s[p] < inst.letters_at(p), "MalformedInstance",
                "letter outside the position's alphabet");
    }
}

/// A twisted equivalence in structured form: a class-preserving position
/// bijection plus, per target position, a letter map realized by an acting
/// group element.
struct TwistedEquivalence {
  std::vector<int> pos_map;                  // position -> position
  std::vector<std::vector<int>> letter_map;  // per target position
  std::vector<int> twist_elem;               // per target position, acting element id
};

inline Perm encode_equivalence(const TwistedCodeInstance &inst, const TwistedEquivalence &eq) {
  std::vector<int> img(inst.total_points);
  for (int p = 0; p < inst.total_positions; ++p) {
    int q = eq.pos_map[p];
    require(inst.class_of[p] == inst.class_of[q], "MalformedInstance",
            "position map must preserve alphabet classes");
    for (int l = 0; l < inst.letters_at(p); ++l)
      img[inst.point_base[p] + l] = inst.point_base[q] + eq.letter_map[q][l];
  }
  return Perm(img);
}

inline std::optional<TwistedEquivalence> decode_equivalence(const TwistedCodeInstance &inst,
                                                            const Perm &psi) {
  if (psi.degree() != inst.total_points)
    return std::nullopt;
  TwistedEquivalence eq;
  eq.pos_map.assign(inst.total_positions, -1);
  eq.letter_map.assign(inst.total_positions, {});
  eq.twist_elem.assign(inst.total_positions, -1);
  std::vector<int> pos_of_point(inst.total_points);
  for (int p = 0; p < inst.total_positions; ++p)
    for (int l = 0; l < inst.letters_at(p); ++l)
      pos_of_point[inst.point_base[p] + l] = p;
  for (int p = 0; p < inst.total_positions; ++p) {
    int q = pos_of_point[psi[inst.point_base[p]]];
    if (inst.class_of[q] != inst.class_of[p])
      return std::nullopt;
    std::vector<int> lmap(inst.letters_at(p));
    for (int l = 0; l < inst.letters_at(p); ++l) {
      int img = psi[inst.point_base[p] + l];
      if (pos_of_point[img] != q)
        return std::nullopt;
      lmap[l] = img - inst.point_base[q];
    }
    // the letter map must be realized by some acting group element
    const auto &al = inst.alphabets[inst.class_of[p]];
    int elem = -1;
    for (int e = 0; e < al.group.order(); ++e)
      if (al.action[e] == lmap) {
        elem = e;
        break;
      }
    if (elem < 0)
      return std::nullopt;
    eq.pos_map[p] = q;
    eq.letter_map[q] = std::move(lmap);
    eq.twist_elem[q] = elem;
  }
  return eq;
}

inline std::vector<int> apply_equivalence(const TwistedCodeInstance &inst, const Perm &psi,
                                          const std::vector<int> &str) {
  std::vector<int> pos_of_point(inst.total_points), letter_of_point(inst.total_points);
  for (int p = 0; p < inst.total_positions; ++p)
    for (int l = 0; l < inst.letters_at(p); ++l) {
      pos_of_point[inst.point_base[p] + l] = p;
      letter_of_point[inst.point_base[p] + l] = l;
    }
  std::vector<int> out(inst.total_positions, -1);
  for (int p = 0; p < inst.total_positions; ++p) {
    int img = psi[inst.point_base[p] + str[p]];
    out[pos_of_point[img]] = letter_of_point[img];
  }
  return out;
}

/// Empty or a subcoset of encoded twisted equivalences.
struct TwistedEquivalenceCoset {
  Subcoset coset;

  bool empty() const { return coset.empty; }
};

namespace detail {

struct VecHash {
  std::size_t operator()(const std::vector<int> &v) const {
    std::uint64_t h = 0x9e;
    for (int x : v)
      h = hash_mix(h, static_cast<std::uint64_t>(x) + 1);
    return h;
  }
};

class TwistedSolver {
public:
  explicit TwistedSolver(const TwistedCodeInstance &inst) : inst_(inst), m_(inst.total_positions) {}

  TwistedEquivalenceCoset solve() {
    if (inst_.code_a.size() != inst_.code_b.size())
      return {};
    if (inst_.code_a.empty())
      return {Subcoset::of(PermGroup(inst_.total_points), Perm::identity(inst_.total_points))};
    build_prefix_counts();
    build_reachable();
    evaluate_stages();
    auto it = table_[0].find(root_key());
    if (it == table_[0].end() || it->second.empty)
      return {};
    TwistedEquivalenceCoset out{it->second};
    verify(out);
    return out;
  }

private:
  // entry key: y letters on the prefix 0..level-1, then the z-partial as
  // (position, letter) pairs in position order
  struct Entry {
    std::vector<int> y;                        // size = level
    std::vector<std::pair<int, int>> z;        // defined B-positions
  };

  std::vector<int> key_of(const Entry &e) const {
    std::vector<int> k;
    k.reserve(e.y.size() + 2 * e.z.size() + 1);
    for (int v : e.y)
      k.push_back(v);
    k.push_back(-1);
    for (auto &pr : e.z) {
      k.push_back(pr.first);
      k.push_back(pr.second);
    }
    return k;
  }

  std::vector<int> root_key() const { return key_of(Entry{}); }

  void build_prefix_counts() {
    a_prefix_counts_.assign(m_ + 1, {});
    for (const auto &s : inst_.code_a)
      for (int l = 0; l <= m_; ++l) {
        std::vector<int> pre(s.begin(), s.begin() + l);
        ++a_prefix_counts_[l][pre];
      }
  }

  int count_b(const std::vector<std::pair<int, int>> &z) const {
    int c = 0;
    for (const auto &s : inst_.code_b) {
      bool ok = true;
      for (auto &pr : z)
        if (s[pr.first] != pr.second) {
          ok = false;
          break;
        }
      if (ok)
        ++c;
    }
    return c;
  }

  int count_a_prefix(const std::vector<int> &y) const {
    const auto &mp = a_prefix_counts_[y.size()];
    auto it = mp.find(y);
    return it == mp.end() ? 0 : it->second;
  }

  // letters reachable from `letter` under the acting group of class ci
  std::vector<int> letter_orbit(int ci, int letter) const {
    const auto &al = inst_.alphabets[ci];
    std::vector<char> seen(al.letters, 0);
    std::vector<int> out;
    for (int e = 0; e < al.group.order(); ++e) {
      int img = al.action[e][letter];
      if (!seen[img]) {
        seen[img] = 1;
        out.push_back(img);
      }
    }
    return out;
  }

  void build_reachable() {
    reachable_.assign(m_ + 1, {});
    table_.assign(m_ + 1, {});
    reachable_[0].push_back(Entry{});
    std::set<std::vector<int>> seen;
    seen.insert(root_key());
    long long total = 1;
    for (int level = 0; level < m_; ++level) {
      for (const Entry &e : reachable_[level]) {
        if (count_a_prefix(e.y) == 0 || count_b(e.z) == 0)
          continue;
        int t = level;
        int ci = inst_.class_of[t];
        // realized letters at t among A-strings extending y
        std::vector<char> realized(inst_.letters_at(t), 0);
        for (const auto &s : inst_.code_a) {
          bool ok = true;
          for (int p = 0; p < level; ++p)
            if (s[p] != e.y[p]) {
              ok = false;
              break;
            }
          if (ok)
            realized[s[t]] = 1;
        }
        std::vector<char> in_z(m_, 0);
        for (auto &pr : e.z)
          in_z[pr.first] = 1;
        for (int s_pos = 0; s_pos < m_; ++s_pos) {
          if (in_z[s_pos] || inst_.class_of[s_pos] != ci)
            continue;
          for (int gamma = 0; gamma < inst_.letters_at(t); ++gamma) {
            if (!realized[gamma])
              continue;
            for (int delta : letter_orbit(ci, gamma)) {
              Entry child;
              child.y = e.y;
              child.y.push_back(gamma);
              child.z = e.z;
              child.z.emplace_back(s_pos, delta);
              std::sort(child.z.begin(), child.z.end());
              if (count_a_prefix(child.y) == 0 || count_b(child.z) == 0)
                continue;
              auto key = key_of(child);
              if (seen.insert(key).second) {
                reachable_[level + 1].push_back(std::move(child));
                require(++total <= 2000000, "BudgetExceeded",
                        "twisted-code table exceeds 2e6 entries");
              }
            }
          }
        }
      }
    }
  }

  // classwise sorted pairing of the defined A-prefix with the defined
  // B-positions
  std::vector<std::pair<int, int>> defined_pairing(int level,
                                                   const std::vector<int> &z_domain) const {
    std::vector<std::vector<int>> z_by_class(inst_.alphabets.size());
    for (int p : z_domain)
      z_by_class[inst_.class_of[p]].push_back(p);
    std::vector<std::vector<int>> y_by_class(inst_.alphabets.size());
    for (int p = 0; p < level; ++p)
      y_by_class[inst_.class_of[p]].push_back(p);
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t ci = 0; ci < inst_.alphabets.size(); ++ci) {
      auto ys = y_by_class[ci];
      auto zs = z_by_class[ci];
      std::sort(ys.begin(), ys.end());
      std::sort(zs.begin(), zs.end());
      require(ys.size() == zs.size(), "MalformedInstance", "filler class mismatch");
      for (std::size_t i = 0; i < ys.size(); ++i)
        pairs.emplace_back(ys[i], zs[i]);
    }
    return pairs;
  }

  // full-string filler (base case of the table): the defined pairing with
  // identity letter maps; at full length nothing remains undefined
  Perm filler_perm(int level, const std::vector<std::pair<int, int>> &z) const {
    std::vector<int> domain;
    for (auto &pr : z)
      domain.push_back(pr.first);
    std::vector<int> img(inst_.total_points);
    for (int i = 0; i < inst_.total_points; ++i)
      img[i] = i;
    for (auto &pr : defined_pairing(level, domain))
      for (int l = 0; l < inst_.letters_at(pr.first); ++l)
        img[inst_.point_base[pr.first] + l] = inst_.point_base[pr.second] + l;
    return Perm(img);
  }

  void evaluate_stages() {
    // deepest stage: realized full-string pairs hold exactly the filler
    for (int level = m_; level >= 0; --level) {
      auto &entries = reachable_[level];
      std::vector<std::pair<std::vector<int>, Subcoset>> results(entries.size());
      parallel_for(entries.size(), [&](std::size_t idx) {
        const Entry &e = entries[idx];
        results[idx] = {key_of(e), evaluate_entry(e, level)};
      });
      for (auto &r : results)
        table_[level].emplace(std::move(r.first), std::move(r.second));
    }
  }

  Subcoset evaluate_entry(const Entry &e, int level) {
    int ca = count_a_prefix(e.y);
    int cb = count_b(e.z);
    if (ca == 0 || cb == 0 || ca != cb)
      return Subcoset::none();
    if (level == m_)
      return Subcoset::of(PermGroup(inst_.total_points), filler_perm(level, e.z));
    int t = level;
    int ci = inst_.class_of[t];
    const auto &al = inst_.alphabets[ci];
    std::vector<char> realized(inst_.letters_at(t), 0);
    for (const auto &s : inst_.code_a) {
      bool ok = true;
      for (int p = 0; p < level; ++p)
        if (s[p] != e.y[p]) {
          ok = false;
          break;
        }
      if (ok)
        realized[s[t]] = 1;
    }
    std::vector<char> in_z(m_, 0);
    for (auto &pr : e.z)
      in_z[pr.first] = 1;
    std::vector<int> parent_domain;
    for (auto &pr : e.z)
      parent_domain.push_back(pr.first);
    std::vector<int> parent_target(m_, -1); // defined A-position -> B-position
    for (auto &pr : defined_pairing(level, parent_domain))
      parent_target[pr.first] = pr.second;
    std::vector<Subcoset> branches;
    for (int s_pos = 0; s_pos < m_; ++s_pos) {
      if (in_z[s_pos] || inst_.class_of[s_pos] != ci)
        continue;
      for (int w = 0; w < al.group.order(); ++w) {
        // children across all realized letters, balanced intersection
        std::vector<Subcoset> kids;
        bool dead = false;
        for (int gamma = 0; gamma < inst_.letters_at(t) && !dead; ++gamma) {
          if (!realized[gamma])
            continue;
          Entry child;
          child.y = e.y;
          child.y.push_back(gamma);
          child.z = e.z;
          child.z.emplace_back(s_pos, al.action[w][gamma]);
          std::sort(child.z.begin(), child.z.end());
          auto it = table_[level + 1].find(key_of(child));
          if (it == table_[level + 1].end() || it->second.empty)
            dead = true;
          else
            kids.push_back(it->second);
        }
        if (dead || kids.empty())
          continue;
        while (kids.size() > 1) {
          std::vector<Subcoset> next;
          for (std::size_t i = 0; i + 1 < kids.size(); i += 2) {
            Subcoset merged = subcoset_intersect(kids[i], kids[i + 1]);
            if (merged.empty) {
              next.clear();
              break;
            }
            next.push_back(std::move(merged));
          }
          if (next.empty() && kids.size() > 1) {
            kids.clear();
            break;
          }
          if (kids.size() % 2)
            next.push_back(kids.back());
          kids = std::move(next);
        }
        if (kids.empty() || kids[0].empty)
          continue;
        // translate from the child filler convention to the parent one,
        // inserting the real extension t -> s_pos twisted by w; identity
        // outside the child-defined B-fibers
        std::vector<int> child_domain = parent_domain;
        child_domain.push_back(s_pos);
        std::vector<int> lam(inst_.total_points);
        for (int i = 0; i < inst_.total_points; ++i)
          lam[i] = i;
        for (auto &pr : defined_pairing(level + 1, child_domain)) {
          int a_pos = pr.first, b_pos = pr.second;
          for (int l = 0; l < inst_.letters_at(a_pos); ++l) {
            int src = inst_.point_base[b_pos] + l;
            if (a_pos == t)
              lam[src] = inst_.point_base[s_pos] + al.action[w][l];
            else
              lam[src] = inst_.point_base[parent_target[a_pos]] + l;
          }
        }
        branches.push_back(Subcoset::of(kids[0].group, kids[0].rep * Perm(lam)));
      }
    }
    while (branches.size() > 1) {
      std::vector<Subcoset> next;
      for (std::size_t i = 0; i + 1 < branches.size(); i += 2)
        next.push_back(coset_union_as_coset({branches[i], branches[i + 1]}));
      if (branches.size() % 2)
        next.push_back(branches.back());
      branches = std::move(next);
    }
    return branches.empty() ? Subcoset::none() : branches[0];
  }

  void verify(const TwistedEquivalenceCoset &out) const {
    auto as_set = [](std::vector<std::vector<int>> v) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
      return v;
    };
    std::vector<std::vector<int>> image;
    for (const auto &s : inst_.code_a)
      image.push_back(apply_equivalence(inst_, out.coset.rep, s));
    require(as_set(image) == as_set(inst_.code_b), "InvariantViolation",
            "representative does not map code A onto code B");
    require(decode_equivalence(inst_, out.coset.rep).has_value(), "InvariantViolation",
            "representative does not decode to a (pi, g) pair");
    for (const Perm &g : out.coset.group.generators()) {
      std::vector<std::vector<int>> self;
      for (const auto &s : inst_.code_a)
        self.push_back(apply_equivalence(inst_, g, s));
      require(as_set(self) == as_set(inst_.code_a), "InvariantViolation",
              "group generator is not a self-equivalence of code A");
    }
  }

  const TwistedCodeInstance &inst_;
  int m_;
  std::vector<std::map<std::vector<int>, int>> a_prefix_counts_;
  std::vector<std::vector<Entry>> reachable_;
  std::vector<std::unordered_map<std::vector<int>, Subcoset, VecHash>> table_;
};

} // namespace detail

/// EQ(A, B) as a subcoset of encoded equivalences over the composite
/// domain; empty when the codes are inequivalent.
inline TwistedEquivalenceCoset solve_twisted_codeq(const TwistedCodeInstance &inst) {
  validate_twisted_instance(inst);
  detail::TwistedSolver solver(inst);
  return solver.solve();
}

/// Packaging helper for group codes: one string per group element whose
/// letter at position p is letters[p][element]. The combined letter tuple
/// must identify the element.
struct GroupCodeSpec {
  int group_order = 0;
  std::vector<std::vector<int>> letters; // per position: element -> letter
};

inline std::vector<std::vector<int>> code_of_group_embedding(const GroupCodeSpec &spec) {
  require(spec.group_order >= 1, "RestrictionNotIsomorphism", "empty group spec");
  require(!spec.letters.empty(), "RestrictionNotIsomorphism", "no positions");
  std::vector<std::vector<int>> code;
  for (int e = 0; e < spec.group_order; ++e) {
    std::vector<int> s;
    s.reserve(spec.letters.size());
    for (const auto &chi : spec.letters) {
      require(static_cast<int>(chi.size()) == spec.group_order, "RestrictionNotIsomorphism",
              "restriction map size mismatch");
      s.push_back(chi[e]);
    }
    code.push_back(std::move(s));
  }
  std::vector<std::vector<int>> dedup = code;
  std::sort(dedup.begin(), dedup.end());
  dedup.erase(std::unique(dedup.begin(), dedup.end()), dedup.end());
  require(dedup.size() == code.size(), "RestrictionNotIsomorphism",
          "restriction tuple does not separate group elements");
  return code;
}

} // namespace fitfree
