#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "fitfree/common.hpp"
#include "fitfree/perm.hpp"

namespace fitfree {

using u128 = unsigned __int128;

inline std::string u128_str(u128 v) {
  if (v == 0)
    return "0";
  std::string s;
  while (v) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

/// A word over a generating sequence: signed 1-based indices, negative for
/// the inverse generator. Evaluates left to right.
using Word = std::vector<int>;

inline Perm evaluate_word(const Word &w, const std::vector<Perm> &gens, int degree) {
  Perm r = Perm::identity(degree);
  for (int t : w) {
    require(t != 0 && std::abs(t) <= static_cast<int>(gens.size()), "BadWord",
            "generator index " + std::to_string(t));
    r = r * (t > 0 ? gens[t - 1] : gens[-t - 1].inverse());
  }
  return r;
}

inline Word inverse_word(const Word &w) {
  Word r;
  r.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it)
    r.push_back(-*it);
  return r;
}

namespace detail {

struct WPerm {
  Perm p;
  Word word; // over the original generating sequence
};

struct ChainLevel {
  int base_point = -1;
  std::vector<int> gen_idx;          // indices into StabChain::strong
  std::vector<int> orbit;            // discovery order, orbit[0] == base_point
  std::vector<int> rep_of;           // point -> index into reps, or -1
  std::vector<Perm> reps;            // transversal: base^rep == point
  std::vector<std::pair<int, int>> back; // per rep: (previous rep index, signed strong-gen ref)
};

// Deterministic Schreier-Sims with word tracking. `forced_prefix` pins the
// first base points (used for pointwise stabilizers / transporters).
class StabChain {
public:
  StabChain(int degree, const std::vector<Perm> &gens, const std::vector<int> &forced_prefix)
      : degree_(degree) {
    for (int b : forced_prefix)
      push_base_point(b);
    for (std::size_t i = 0; i < gens.size(); ++i) {
      if (gens[i].is_identity())
        continue;
      add_strong(WPerm{gens[i], Word{static_cast<int>(i) + 1}});
    }
    while (!verify_pass()) {
    }
  }

  int degree() const { return degree_; }
  const std::vector<ChainLevel> &levels() const { return levels_; }
  const std::vector<WPerm> &strong() const { return strong_; }

  u128 order() const {
    u128 o = 1;
    for (const auto &lv : levels_)
      o *= static_cast<u128>(lv.orbit.size());
    return o;
  }

  std::vector<int> base() const {
    std::vector<int> b;
    for (const auto &lv : levels_)
      b.push_back(lv.base_point);
    return b;
  }

  // Strips sigma through the chain. Returns the residue and, when the
  // residue is trivial, the membership word (over original generators).
  struct SiftResult {
    Perm residue;
    int stuck_level; // level where stripping stopped, or levels().size()
    Word word;       // valid only when residue is the identity
  };

  SiftResult sift(const Perm &sigma) const {
    SiftResult r{sigma, 0, {}};
    std::vector<Word> parts;
    for (std::size_t i = 0; i < levels_.size(); ++i) {
      const ChainLevel &lv = levels_[i];
      int q = r.residue[lv.base_point];
      if (q == lv.base_point) {
        r.stuck_level = static_cast<int>(i) + 1;
        continue;
      }
      int rep = lv.rep_of[q];
      if (rep < 0) {
        r.stuck_level = static_cast<int>(i);
        return r;
      }
      r.residue = r.residue * lv.reps[rep].inverse();
      parts.push_back(transversal_word(static_cast<int>(i), rep));
      r.stuck_level = static_cast<int>(i) + 1;
    }
    if (r.residue.is_identity()) {
      Word w;
      for (auto it = parts.rbegin(); it != parts.rend(); ++it)
        w.insert(w.end(), it->begin(), it->end());
      r.word = std::move(w);
    }
    return r;
  }

  bool contains(const Perm &sigma) const { return sift(sigma).residue.is_identity(); }

  // All strong generators fixing base[0..k-1]; generates the k-th stabilizer.
  std::vector<Perm> level_group_gens(int k) const {
    std::vector<Perm> out;
    if (k >= static_cast<int>(levels_.size()))
      return out;
    for (int gi : levels_[k].gen_idx)
      out.push_back(strong_[gi].p);
    return out;
  }

  // Deterministic element enumeration (transversal product order).
  void enumerate(std::vector<Perm> &out, std::size_t limit) const {
    Perm id = Perm::identity(degree_);
    enumerate_rec(static_cast<int>(levels_.size()) - 1, id, out, limit);
  }

  Word transversal_word(int level, int rep_index) const {
    Word w;
    const ChainLevel &lv = levels_[level];
    int cur = rep_index;
    std::vector<int> refs;
    while (cur > 0) {
      refs.push_back(lv.back[cur].second);
      cur = lv.back[cur].first;
    }
    for (auto it = refs.rbegin(); it != refs.rend(); ++it) {
      int ref = *it;
      const Word &gw = strong_[std::abs(ref) - 1].word;
      if (ref > 0)
        w.insert(w.end(), gw.begin(), gw.end());
      else {
        Word gwi = inverse_word(gw);
        w.insert(w.end(), gwi.begin(), gwi.end());
      }
    }
    return w;
  }

private:
  void enumerate_rec(int level, const Perm &suffix, std::vector<Perm> &out,
                     std::size_t limit) const {
    if (out.size() >= limit)
      fail("BudgetExceeded", "element enumeration past " + std::to_string(limit));
    if (level < 0) {
      out.push_back(suffix);
      return;
    }
    const ChainLevel &lv = levels_[level];
    std::vector<int> pts = lv.orbit;
    std::sort(pts.begin(), pts.end());
    for (int p : pts)
      enumerate_rec(level - 1, suffix * lv.reps[lv.rep_of[p]], out, limit);
  }

  void push_base_point(int b) {
    ChainLevel lv;
    lv.base_point = b;
    lv.rep_of.assign(degree_, -1);
    levels_.push_back(std::move(lv));
  }

  void add_strong(WPerm g) {
    // find the first base point g moves; extend the base if it fixes all
    std::size_t lvl = 0;
    for (; lvl < levels_.size(); ++lvl)
      if (g.p[levels_[lvl].base_point] != levels_[lvl].base_point)
        break;
    if (lvl == levels_.size())
      push_base_point(g.p.first_moved());
    strong_.push_back(std::move(g));
    int gi = static_cast<int>(strong_.size()) - 1;
    const Perm &p = strong_[gi].p;
    for (std::size_t i = 0; i < levels_.size(); ++i) {
      bool fixes_prefix = true;
      for (std::size_t j = 0; j < i && fixes_prefix; ++j)
        fixes_prefix = p[levels_[j].base_point] == levels_[j].base_point;
      if (fixes_prefix)
        levels_[i].gen_idx.push_back(gi);
    }
    for (std::size_t i = 0; i < levels_.size(); ++i)
      rebuild_orbit(static_cast<int>(i));
  }

  void rebuild_orbit(int li) {
    ChainLevel &lv = levels_[li];
    lv.orbit.clear();
    lv.reps.clear();
    lv.back.clear();
    std::fill(lv.rep_of.begin(), lv.rep_of.end(), -1);
    lv.orbit.push_back(lv.base_point);
    lv.reps.push_back(Perm::identity(degree_));
    lv.back.emplace_back(-1, 0);
    lv.rep_of[lv.base_point] = 0;
    for (std::size_t qi = 0; qi < lv.orbit.size(); ++qi) {
      int q = lv.orbit[qi];
      for (int gi : lv.gen_idx) {
        const Perm &s = strong_[gi].p;
        int r = s[q];
        if (lv.rep_of[r] < 0) {
          lv.rep_of[r] = static_cast<int>(lv.reps.size());
          lv.reps.push_back(lv.reps[lv.rep_of[q]] * s);
          lv.back.emplace_back(lv.rep_of[q], gi + 1);
          lv.orbit.push_back(r);
        }
      }
    }
  }

  // One verification sweep over all Schreier generators; adds at most one
  // missing strong generator per call.
  bool verify_pass() {
    for (std::size_t i = 0; i < levels_.size(); ++i) {
      ChainLevel &lv = levels_[i];
      for (std::size_t qi = 0; qi < lv.orbit.size(); ++qi) {
        int q = lv.orbit[qi];
        const Perm &t = lv.reps[lv.rep_of[q]];
        for (int gi : lv.gen_idx) {
          const Perm &s = strong_[gi].p;
          const Perm &t2 = lv.reps[lv.rep_of[s[q]]];
          Perm schreier = t * s * t2.inverse();
          if (schreier.is_identity())
            continue;
          // strip through deeper levels
          Perm h = schreier;
          std::size_t j = i + 1;
          for (; j < levels_.size(); ++j) {
            const ChainLevel &dl = levels_[j];
            int p = h[dl.base_point];
            if (dl.rep_of[p] < 0)
              break;
            h = h * dl.reps[dl.rep_of[p]].inverse();
          }
          if (h.is_identity())
            continue;
          Word w = transversal_word(static_cast<int>(i), lv.rep_of[q]);
          const Word &gw = strong_[gi].word;
          w.insert(w.end(), gw.begin(), gw.end());
          Word tw = inverse_word(transversal_word(static_cast<int>(i), lv.rep_of[s[q]]));
          w.insert(w.end(), tw.begin(), tw.end());
          // rebuild the residue's word by stripping again, recording reps
          Perm hh = schreier;
          for (std::size_t jj = i + 1; jj < levels_.size(); ++jj) {
            const ChainLevel &dl = levels_[jj];
            int p = hh[dl.base_point];
            if (dl.rep_of[p] < 0)
              break;
            Word rw = inverse_word(transversal_word(static_cast<int>(jj), dl.rep_of[p]));
            w.insert(w.end(), rw.begin(), rw.end());
            hh = hh * dl.reps[dl.rep_of[p]].inverse();
          }
          add_strong(WPerm{hh, std::move(w)});
          return false;
        }
      }
    }
    return true;
  }

  int degree_;
  std::vector<WPerm> strong_;
  std::vector<ChainLevel> levels_;
};

} // namespace detail

/// A permutation group given by generators, with a lazily built
/// deterministic stabilizer chain. Logically immutable; the chain cache is
/// guarded so concurrent queries are safe.
class PermGroup {
public:
  PermGroup() : degree_(0) {}

  explicit PermGroup(int degree, std::vector<Perm> gens = {})
      : degree_(degree), gens_(std::move(gens)) {
    for (const Perm &g : gens_)
      require(g.degree() == degree_, "DegreeMismatch", "generator degree");
  }

  static PermGroup trivial(int degree) { return PermGroup(degree); }

  static PermGroup symmetric(int degree) {
    std::vector<Perm> gens;
    if (degree >= 2) {
      std::vector<int> cyc(degree);
      for (int i = 0; i < degree; ++i)
        cyc[i] = (i + 1) % degree;
      gens.push_back(Perm(cyc));
      if (degree >= 3)
        gens.push_back(Perm::from_cycles(degree, {{0, 1}}));
    }
    return PermGroup(degree, gens);
  }

  static PermGroup alternating(int degree) {
    std::vector<Perm> gens;
    for (int i = 0; i + 2 < degree; ++i)
      gens.push_back(Perm::from_cycles(degree, {{i, i + 1, i + 2}}));
    return PermGroup(degree, gens);
  }

  int degree() const { return degree_; }
  const std::vector<Perm> &generators() const { return gens_; }

  u128 order() const { return chain().order(); }

  std::vector<int> base() const { return chain().base(); }

  bool contains(const Perm &p) const {
    if (p.degree() != degree_)
      return false;
    return chain().contains(p);
  }

  /// Membership with certificate: a word over the generating sequence
  /// evaluating to sigma, or nullopt.
  std::optional<Word> membership(const Perm &sigma) const {
    require(sigma.degree() == degree_, "DegreeMismatch",
            "membership query degree " + std::to_string(sigma.degree()) + " vs " +
                std::to_string(degree_));
    auto r = chain().sift(sigma);
    if (!r.residue.is_identity())
      return std::nullopt;
    return r.word;
  }

  /// Chain whose base starts with the given points (their order preserved).
  const detail::StabChain &chain_with_prefix(const std::vector<int> &prefix) const {
    std::lock_guard<std::mutex> lock(*mu_);
    auto it = prefix_chains_->find(prefix);
    if (it == prefix_chains_->end())
      it = prefix_chains_->emplace(prefix,
                                   std::make_shared<detail::StabChain>(degree_, gens_, prefix))
               .first;
    return *it->second;
  }

  PermGroup pointwise_stabilizer(const std::vector<int> &points) const {
    std::vector<int> prefix = points;
    std::sort(prefix.begin(), prefix.end());
    prefix.erase(std::unique(prefix.begin(), prefix.end()), prefix.end());
    if (prefix.empty())
      return *this;
    const auto &ch = chain_with_prefix(prefix);
    // strong generators fixing every requested point
    std::vector<Perm> gens;
    for (const auto &wp : ch.strong()) {
      bool fixes = true;
      for (int b : prefix)
        if (wp.p[b] != b) {
          fixes = false;
          break;
        }
      if (fixes)
        gens.push_back(wp.p);
    }
    return PermGroup(degree_, dedupe(gens));
  }

  PermGroup normal_closure(const std::vector<Perm> &seed) const {
    for (const Perm &s : seed)
      require(contains(s), "ElementNotInGroup", "normal closure seed");
    std::vector<Perm> ngens;
    for (const Perm &s : seed)
      if (!s.is_identity())
        ngens.push_back(s);
    PermGroup n(degree_, ngens);
    for (;;) {
      bool grew = false;
      const std::vector<Perm> snapshot = ngens;
      for (const Perm &g : gens_) {
        for (const Perm &s : snapshot) {
          Perm c = Perm::conjugate(s, g);
          if (!n.contains(c)) {
            ngens.push_back(c);
            n = PermGroup(degree_, ngens);
            grew = true;
          }
        }
      }
      if (!grew)
        return n.reduce_generators();
    }
  }

  /// Non-redundant generating sequence: greedily keeps strong generators
  /// that enlarge the generated subgroup, so the result has at most
  /// log2(order) members and generates the same group.
  PermGroup reduce_generators() const {
    const auto &ch = chain();
    std::vector<Perm> kept;
    PermGroup cur(degree_);
    u128 target = ch.order();
    if (target == 1)
      return PermGroup(degree_);
    for (const Perm &g : gens_) {
      if (g.is_identity() || cur.contains(g))
        continue;
      kept.push_back(g);
      cur = PermGroup(degree_, kept);
      if (cur.order() == target)
        return cur;
    }
    for (const auto &wp : ch.strong()) {
      if (cur.contains(wp.p))
        continue;
      kept.push_back(wp.p);
      cur = PermGroup(degree_, kept);
      if (cur.order() == target)
        return cur;
    }
    return cur;
  }

  std::vector<Perm> elements(std::size_t limit = 2000000) const {
    std::vector<Perm> out;
    chain().enumerate(out, limit);
    std::sort(out.begin(), out.end());
    return out;
  }

  bool is_trivial() const { return order() == 1; }

private:
  static std::vector<Perm> dedupe(std::vector<Perm> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    std::vector<Perm> out;
    for (auto &p : v)
      if (!p.is_identity())
        out.push_back(std::move(p));
    return out;
  }

  const detail::StabChain &chain() const {
    std::lock_guard<std::mutex> lock(*mu_);
    if (!chain_)
      chain_ = std::make_shared<detail::StabChain>(degree_, gens_, std::vector<int>{});
    return *chain_;
  }

  int degree_;
  std::vector<Perm> gens_;
  mutable std::shared_ptr<detail::StabChain> chain_;
  mutable std::shared_ptr<std::map<std::vector<int>, std::shared_ptr<detail::StabChain>>>
      prefix_chains_ = std::make_shared<std::map<std::vector<int>, std::shared_ptr<detail::StabChain>>>();
  mutable std::shared_ptr<std::mutex> mu_ = std::make_shared<std::mutex>();
};

/// Kernel of the action of G defined on generators by `images` (acting on a
/// separate domain of size target_degree). The generator map must define a
/// homomorphism; this is verified exactly via the graph-group order.
inline PermGroup action_kernel(const PermGroup &g, const std::vector<Perm> &images,
                               int target_degree) {
  require(images.size() == g.generators().size(), "NotAHomomorphism",
          "one image per generator required");
  const int m = g.degree();
  // graph group on the disjoint union of the two domains
  std::vector<Perm> diag;
  for (std::size_t i = 0; i < images.size(); ++i) {
    require(images[i].degree() == target_degree, "DegreeMismatch", "action image degree");
    std::vector<int> img(m + target_degree);
    for (int x = 0; x < m; ++x)
      img[x] = g.generators()[i][x];
    for (int y = 0; y < target_degree; ++y)
      img[m + y] = m + images[i][y];
    diag.push_back(Perm(img));
  }
  PermGroup graph(m + target_degree, diag);
  require(graph.order() == g.order(), "NotAHomomorphism",
          "generator images do not respect the relations of G");
  std::vector<int> target_pts(target_degree);
  for (int y = 0; y < target_degree; ++y)
    target_pts[y] = m + y;
  PermGroup stab = graph.pointwise_stabilizer(target_pts);
  std::vector<Perm> kgens;
  for (const Perm &k : stab.generators()) {
    std::vector<int> img(m);
    for (int x = 0; x < m; ++x)
      img[x] = k[x];
    kgens.push_back(Perm(img));
  }
  return PermGroup(m, kgens).reduce_generators();
}

/// Whether the domain bijection f conjugates G onto H: f^-1 g f in H for
/// all generators g, f h f^-1 in G for all generators h, and |G| = |H|.
inline bool is_perm_isomorphism(const PermGroup &g, const PermGroup &h, const Perm &f) {
  require(g.degree() == h.degree() && f.degree() == g.degree(), "DegreeMismatch",
          "permutational isomorphism check");
  if (g.order() != h.order())
    return false;
  for (const Perm &x : g.generators())
    if (!h.contains(Perm::conjugate(x, f)))
      return false;
  Perm fi = f.inverse();
  for (const Perm &y : h.generators())
    if (!g.contains(Perm::conjugate(y, fi)))
      return false;
  return true;
}

/// Coset {x in G : from_i^x = to_i for all i} as (pointwise stabilizer of
/// the from-points, representative), or nullopt when empty.
struct TransporterCoset {
  PermGroup stabilizer;
  Perm rep;
};

inline std::optional<TransporterCoset> point_transporter(const PermGroup &g,
                                                         const std::vector<std::pair<int, int>> &pairs) {
  std::vector<int> prefix;
  for (auto &pr : pairs)
    prefix.push_back(pr.first);
  const auto &ch = g.chain_with_prefix(prefix);
  Perm rep = Perm::identity(g.degree());
  // walk the forced-prefix chain transporting each point in turn
  const auto &levels = ch.levels();
  std::size_t li = 0;
  for (auto &pr : pairs) {
    int from = pr.first;
    int want = pr.second;
    // locate the chain level for this point (fixed earlier points may share)
    while (li < levels.size() && levels[li].base_point != from)
      ++li;
    int target = rep.inverse()[want];
    if (li >= levels.size()) {
      // group fixes `from`: transporter exists iff already correct
      if (from != target)
        return std::nullopt;
      continue;
    }
    const auto &lv = levels[li];
    if (lv.rep_of[target] < 0)
      return std::nullopt;
    rep = lv.reps[lv.rep_of[target]] * rep;
    ++li;
  }
  for (auto &pr : pairs)
    if (rep[pr.first] != pr.second)
      return std::nullopt;
  std::vector<int> from_pts;
  for (auto &pr : pairs)
    from_pts.push_back(pr.first);
  return TransporterCoset{g.pointwise_stabilizer(from_pts), rep};
}

} // namespace fitfree
