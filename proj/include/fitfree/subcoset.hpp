#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "fitfree/common.hpp"
#include "fitfree/perm.hpp"
#include "fitfree/perm_group.hpp"

namespace fitfree {

/// The empty set or a coset group*rep of a permutation group.
struct Subcoset {
  bool empty = true;
  PermGroup group;
  Perm rep;

  static Subcoset none() { return Subcoset{}; }
  static Subcoset of(PermGroup g, Perm r) { return Subcoset{false, std::move(g), std::move(r)}; }

  bool contains(const Perm &p) const {
    if (empty)
      return false;
    return group.contains(p * rep.inverse());
  }

  u128 size() const { return empty ? 0 : group.order(); }

  std::vector<Perm> elements(std::size_t limit = 2000000) const {
    std::vector<Perm> out;
    if (empty)
      return out;
    for (const Perm &k : group.elements(limit))
      out.push_back(k * rep);
    std::sort(out.begin(), out.end());
    return out;
  }
};

inline bool subcoset_equal(const Subcoset &a, const Subcoset &b) {
  if (a.empty || b.empty)
    return a.empty == b.empty;
  if (a.group.order() != b.group.order())
    return false;
  for (const Perm &g : a.group.generators())
    if (!b.group.contains(g))
      return false;
  return b.contains(a.rep);
}

/// Union of subcosets that is known a priori to be a single coset (or
/// empty): collects generators plus representative offsets and prunes.
inline Subcoset coset_union_as_coset(const std::vector<Subcoset> &parts) {
  std::vector<const Subcoset *> live;
  for (const auto &p : parts)
    if (!p.empty)
      live.push_back(&p);
  if (live.empty())
    return Subcoset::none();
  const Perm &r0 = live[0]->rep;
  int degree = r0.degree();
  std::vector<Perm> gens = live[0]->group.generators();
  Perm r0_inv = r0.inverse();
  for (std::size_t i = 1; i < live.size(); ++i) {
    for (const Perm &g : live[i]->group.generators())
      gens.push_back(g);
    gens.push_back(live[i]->rep * r0_inv);
  }
  PermGroup merged = PermGroup(degree, gens).reduce_generators();
  return Subcoset::of(std::move(merged), r0);
}

struct SubcosetStats {
  long long problem_ii_calls = 0;
  int max_depth = 0;
  int depth_bound = 0;
  bool depth_ok = true;
};

/// Luks Problem II instance: L <= Sym(Gamma) x Sym(Delta) on the disjoint
/// union (Gamma points first), z a permutation of Gamma x Delta given as a
/// table over composite indices g*delta_size+d, Pi a composite subset, and
/// the rectangle Theta = Phi x Psi with power-of-two sides stabilized by L.
struct ProblemIIInstance {
  int gamma_size = 0;
  int delta_size = 0;
  PermGroup L;            // degree gamma_size + delta_size
  std::vector<int> z;     // composite permutation table
  std::vector<char> pi;   // composite membership
  std::vector<int> phi;   // sorted subset of Gamma
  std::vector<int> psi;   // sorted subset of Delta

  int composite(int g, int d) const { return g * delta_size + d; }
};

namespace detail {

inline bool is_pow2(std::size_t v) { return v && (v & (v - 1)) == 0; }

struct PairSolver {
  const ProblemIIInstance &inst;
  std::vector<int> z_inv;
  SubcosetStats *stats;

  explicit PairSolver(const ProblemIIInstance &i, SubcosetStats *s) : inst(i), stats(s) {
    z_inv.assign(inst.z.size(), 0);
    for (std::size_t c = 0; c < inst.z.size(); ++c)
      z_inv[inst.z[c]] = static_cast<int>(c);
  }

  // composite image under (union element u) then z
  int apply_uz(const Perm &u, int c) const {
    int g = c / inst.delta_size, d = c % inst.delta_size;
    return inst.z[inst.composite(u[g], u[inst.gamma_size + d] - inst.gamma_size)];
  }

  int apply_u(const Perm &u, int c) const {
    int g = c / inst.delta_size, d = c % inst.delta_size;
    return inst.composite(u[g], u[inst.gamma_size + d] - inst.gamma_size);
  }

  std::vector<int> theta_points(const std::vector<int> &phi, const std::vector<int> &psi) const {
    std::vector<int> out;
    out.reserve(phi.size() * psi.size());
    for (int g : phi)
      for (int d : psi)
        out.push_back(inst.composite(g, d));
    return out;
  }

  // orbit of the point set `set` under N with coset representatives
  struct SetOrbit {
    std::vector<Perm> transversal;
    std::vector<Perm> schreier;
  };

  SetOrbit set_orbit(const PermGroup &n, const std::vector<int> &set) const {
    SetOrbit so;
    std::map<std::vector<int>, int> index;
    std::vector<std::vector<int>> sets{set};
    index[set] = 0;
    so.transversal.push_back(Perm::identity(n.degree()));
    for (std::size_t i = 0; i < sets.size(); ++i) {
      for (const Perm &g : n.generators()) {
        std::vector<int> img;
        img.reserve(sets[i].size());
        for (int p : sets[i])
          img.push_back(g[p]);
        std::sort(img.begin(), img.end());
        auto it = index.find(img);
        if (it == index.end()) {
          index.emplace(img, static_cast<int>(sets.size()));
          so.transversal.push_back(so.transversal[i] * g);
          sets.push_back(std::move(img));
        } else {
          // Schreier generator stabilizing `set`
          so.schreier.push_back(so.transversal[i] * g * so.transversal[it->second].inverse());
        }
      }
    }
    return so;
  }

  // { x in N*u*z : (Pi cap Theta)^x = Pi cap Theta^x } with N stabilizing
  // Theta = phi x psi. Returns (group <= N, rep in N*u).
  Subcoset solve(const PermGroup &n, const Perm &u, const std::vector<int> &phi,
                 const std::vector<int> &psi, int depth) {
    if (stats) {
      ++stats->problem_ii_calls;
      stats->max_depth = std::max(stats->max_depth, depth);
      if (depth > stats->depth_bound)
        stats->depth_ok = false;
    }
    std::vector<int> theta = theta_points(phi, psi);
    std::vector<int> source, target;
    for (int c : theta)
      if (inst.pi[c])
        source.push_back(c);
    for (int c : theta) {
      int img = apply_uz(u, c);
      if (inst.pi[img])
        target.push_back(img);
    }
    if (source.size() != target.size())
      return Subcoset::none(); // Case 1
    if (source.empty())
      return Subcoset::of(n, u); // Case 2
    if (source.size() == 1) {
      // Case 3: point transporter
      int p = source[0];
      int q = target[0];
      int r = apply_u(u.inverse(), z_inv[q]);
      int pg = p / inst.delta_size, pd = p % inst.delta_size;
      int rg = r / inst.delta_size, rd = r % inst.delta_size;
      auto t = point_transporter(
          n, {{pg, rg}, {inst.gamma_size + pd, inst.gamma_size + rd}});
      if (!t)
        return Subcoset::none();
      return Subcoset::of(t->stabilizer, t->rep * u);
    }
    // Case 4: split the rectangle
    std::vector<int> half1, half2;
    bool split_phi = phi.size() > 1;
    const std::vector<int> &to_split = split_phi ? phi : psi;
    half1.assign(to_split.begin(), to_split.begin() + to_split.size() / 2);
    half2.assign(to_split.begin() + to_split.size() / 2, to_split.end());
    std::vector<int> stab_set = half1;
    if (!split_phi)
      for (int &p : stab_set)
        p += inst.gamma_size;
    SetOrbit so = set_orbit(n, stab_set);
    PermGroup m = PermGroup(n.degree(), so.schreier).reduce_generators();
    std::vector<Subcoset> branches;
    for (const Perm &t : so.transversal) {
      Subcoset c1 = split_phi ? solve(m, t * u, half1, psi, depth + 1)
                              : solve(m, t * u, phi, half1, depth + 1);
      if (c1.empty) {
        branches.push_back(Subcoset::none());
        continue;
      }
      Subcoset c2 = split_phi ? solve(c1.group, c1.rep, half2, psi, depth + 1)
                              : solve(c1.group, c1.rep, phi, half2, depth + 1);
      branches.push_back(std::move(c2));
    }
    // binary-tree merge keeps generator counts small
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
};

} // namespace detail

inline void validate_problem_ii(const ProblemIIInstance &inst) {
  require(detail::is_pow2(inst.phi.size()) && detail::is_pow2(inst.psi.size()),
          "InvariantViolation", "|Phi| and |Psi| must be powers of 2");
  require(static_cast<int>(inst.z.size()) == inst.gamma_size * inst.delta_size,
          "InvariantViolation", "z must cover Gamma x Delta");
  for (const Perm &g : inst.L.generators()) {
    require(g.degree() == inst.gamma_size + inst.delta_size, "InvariantViolation",
            "L degree mismatch");
    for (int p = 0; p < inst.gamma_size; ++p)
      require(g[p] < inst.gamma_size, "InvariantViolation", "L mixes Gamma and Delta");
    // Theta stabilized: Phi and Psi setwise invariant
    std::vector<char> in_phi(inst.gamma_size, 0), in_psi(inst.delta_size, 0);
    for (int p : inst.phi)
      in_phi[p] = 1;
    for (int p : inst.psi)
      in_psi[p] = 1;
    for (int p : inst.phi)
      require(in_phi[g[p]], "InvariantViolation", "Theta not stabilized by L (Phi side)");
    for (int p : inst.psi)
      require(in_psi[g[inst.gamma_size + p] - inst.gamma_size], "InvariantViolation",
              "Theta not stabilized by L (Psi side)");
  }
}

/// Solves Problem II. The returned subcoset is (group, rep) with group <= L
/// and rep in L; the solution set is {k * rep * z : k in group}.
inline Subcoset solve_problem_II(const ProblemIIInstance &inst, SubcosetStats *stats = nullptr) {
  validate_problem_ii(inst);
  SubcosetStats local;
  if (!stats)
    stats = &local;
  auto log2_exact = [](std::size_t v) {
    int b = 0;
    while (v > 1) {
      v >>= 1;
      ++b;
    }
    return b;
  };
  stats->depth_bound = log2_exact(inst.phi.size()) + log2_exact(inst.psi.size());
  detail::PairSolver solver(inst, stats);
  Subcoset out = solver.solve(inst.L, Perm::identity(inst.gamma_size + inst.delta_size),
                              inst.phi, inst.psi, 0);
  if (!out.empty) {
    // the representative must satisfy the defining property, and every
    // group generator must stabilize Pi cap Theta
    std::vector<int> theta = solver.theta_points(inst.phi, inst.psi);
    std::vector<char> src(inst.z.size(), 0), img(inst.z.size(), 0), target(inst.z.size(), 0);
    for (int c : theta)
      if (inst.pi[c])
        src[c] = 1;
    for (int c : theta) {
      int im = solver.apply_uz(out.rep, c);
      if (src[c])
        img[im] = 1;
      if (inst.pi[im])
        target[im] = 1;
    }
    require(img == target, "InvariantViolation",
            "representative does not satisfy the defining property");
    for (const Perm &k : out.group.generators())
      for (int c : theta)
        require((src[c] != 0) == (src[solver.apply_u(k, c)] != 0), "InvariantViolation",
                "group generator moves Pi cap Theta");
  }
  return out;
}

/// Gx cap Hy as a subcoset of Sym(m), via the product-domain reduction to
/// Problem II with the diagonal as Pi.
inline Subcoset coset_intersect(const PermGroup &g, const Perm &x, const PermGroup &h,
                                const Perm &y, SubcosetStats *stats = nullptr) {
  const int m = g.degree();
  require(h.degree() == m && x.degree() == m && y.degree() == m, "DegreeMismatch",
          "coset intersection requires a common degree");
  int mp = 1;
  while (mp < m)
    mp <<= 1;
  ProblemIIInstance inst;
  inst.gamma_size = mp;
  inst.delta_size = mp;
  auto pad_union = [&](const Perm &p, bool first) {
    std::vector<int> img(2 * mp);
    for (int i = 0; i < 2 * mp; ++i)
      img[i] = i;
    for (int i = 0; i < m; ++i) {
      if (first)
        img[i] = p[i];
      else
        img[mp + i] = mp + p[i];
    }
    return Perm(img);
  };
  std::vector<Perm> lgens;
  for (const Perm &gg : g.generators())
    lgens.push_back(pad_union(gg, true));
  for (const Perm &hh : h.generators())
    lgens.push_back(pad_union(hh, false));
  inst.L = PermGroup(2 * mp, lgens);
  inst.z.resize(static_cast<std::size_t>(mp) * mp);
  auto padded_image = [&](const Perm &p, int v) { return v < m ? p[v] : v; };
  for (int a = 0; a < mp; ++a)
    for (int b = 0; b < mp; ++b)
      inst.z[inst.composite(a, b)] = inst.composite(padded_image(x, a), padded_image(y, b));
  inst.pi.assign(static_cast<std::size_t>(mp) * mp, 0);
  for (int w = 0; w < m; ++w)
    inst.pi[inst.composite(w, w)] = 1;
  inst.phi.resize(mp);
  inst.psi.resize(mp);
  for (int i = 0; i < mp; ++i)
    inst.phi[i] = inst.psi[i] = i;
  Subcoset pair = solve_problem_II(inst, stats);
  if (pair.empty)
    return Subcoset::none();
  // project to the first coordinate and strip the padding
  auto project = [&](const Perm &p) {
    std::vector<int> img(m);
    for (int i = 0; i < m; ++i)
      img[i] = p[i];
    return Perm(img);
  };
  std::vector<Perm> kg;
  for (const Perm &k : pair.group.generators())
    kg.push_back(project(k));
  return Subcoset::of(PermGroup(m, kg).reduce_generators(), project(pair.rep) * x);
}

/// Intersection of two subcosets over the same symmetric group; expands the
/// smaller side when cheap, otherwise runs the product-domain solver.
inline Subcoset subcoset_intersect(const Subcoset &a, const Subcoset &b,
                                   std::size_t expand_budget = 4096) {
  if (a.empty || b.empty)
    return Subcoset::none();
  const Subcoset &small = a.size() <= b.size() ? a : b;
  const Subcoset &big = a.size() <= b.size() ? b : a;
  if (small.size() <= expand_budget) {
    std::vector<Perm> kept;
    for (const Perm &e : small.elements())
      if (big.contains(e))
        kept.push_back(e);
    if (kept.empty())
      return Subcoset::none();
    std::vector<Perm> gens;
    Perm r0_inv = kept[0].inverse();
    for (const Perm &e : kept)
      gens.push_back(e * r0_inv);
    return Subcoset::of(PermGroup(kept[0].degree(), gens).reduce_generators(), kept[0]);
  }
  return coset_intersect(a.group, a.rep, b.group, b.rep);
}

} // namespace fitfree
