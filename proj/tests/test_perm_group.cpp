#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <vector>

#include "fitfree/common.hpp"
#include "fitfree/perm.hpp"
#include "fitfree/perm_group.hpp"

using namespace fitfree;

namespace {

// independent oracle: closure of a generator set by repeated multiplication
std::set<Perm> exhaustive_closure(int degree, const std::vector<Perm> &gens) {
  std::set<Perm> elems{Perm::identity(degree)};
  std::vector<Perm> frontier{Perm::identity(degree)};
  while (!frontier.empty()) {
    std::vector<Perm> next;
    for (const Perm &e : frontier)
      for (const Perm &g : gens) {
        Perm p = e * g;
        if (elems.insert(p).second)
          next.push_back(p);
      }
    frontier = std::move(next);
  }
  return elems;
}

std::vector<Perm> random_perms(Rng &rng, int degree, int count) {
  std::vector<Perm> out;
  for (int c = 0; c < count; ++c) {
    std::vector<int> img(degree);
    for (int i = 0; i < degree; ++i)
      img[i] = i;
    for (int i = degree - 1; i > 0; --i)
      std::swap(img[i], img[rng.below_int(i + 1)]);
    out.push_back(Perm(std::move(img)));
  }
  return out;
}

} // namespace

TEST_CASE("permutation arithmetic") {
  Perm a = Perm::from_cycles(5, {{0, 1, 2, 3, 4}});
  Perm b = Perm::from_cycles(5, {{0, 1, 2}});
  CHECK((a * a.inverse()).is_identity());
  CHECK(perm_order(a) == 5);
  CHECK(perm_order(b) == 3);
  CHECK(a.is_even());
  CHECK_FALSE(Perm::from_cycles(4, {{0, 1}}).is_even());
  CHECK(parse_perm("2 3 1", 3) == Perm::from_cycles(3, {{0, 1, 2}}));
  CHECK_THROWS_AS(parse_perm("2 2 1", 3), Error);
}

TEST_CASE("chain orders on known groups") {
  CHECK(PermGroup(5).order() == 1);
  PermGroup a5(5, {Perm::from_cycles(5, {{0, 1, 2, 3, 4}}), Perm::from_cycles(5, {{0, 1, 2}})});
  CHECK(static_cast<long long>(a5.order()) == 60);
  PermGroup c2(5, {Perm::from_cycles(5, {{0, 1}})});
  CHECK(static_cast<long long>(c2.order()) == 2);
  CHECK(c2.base() == std::vector<int>{0});
  CHECK(static_cast<long long>(PermGroup::symmetric(6).order()) == 720);
  CHECK(static_cast<long long>(PermGroup::alternating(6).order()) == 360);
}

TEST_CASE("chain order equals exhaustive closure on random generator sets") {
  Rng rng(12345);
  for (int trial = 0; trial < 60; ++trial) {
    int degree = 2 + rng.below_int(6); // up to 7
    int count = 1 + rng.below_int(3);
    std::vector<Perm> gens = random_perms(rng, degree, count);
    PermGroup g(degree, gens);
    auto closure = exhaustive_closure(degree, gens);
    REQUIRE(static_cast<std::size_t>(g.order()) == closure.size());
    // membership agrees with the closure, words evaluate back
    std::vector<Perm> all = random_perms(rng, degree, 8);
    for (const Perm &p : all) {
      auto w = g.membership(p);
      bool in_closure = closure.count(p) > 0;
      REQUIRE(w.has_value() == in_closure);
      if (w)
        REQUIRE(evaluate_word(*w, gens, degree) == p);
    }
  }
}

TEST_CASE("membership words") {
  PermGroup c3(3, {Perm::from_cycles(3, {{0, 1, 2}})});
  auto w_id = c3.membership(Perm::identity(3));
  REQUIRE(w_id.has_value());
  CHECK(w_id->empty());

  CHECK_FALSE(c3.membership(Perm::from_cycles(3, {{0, 1}})).has_value());

  auto w = c3.membership(Perm::from_cycles(3, {{0, 2, 1}}));
  REQUIRE(w.has_value());
  CHECK(*w == Word{1, 1});

  PermGroup other(4, {Perm::from_cycles(4, {{0, 1}})});
  CHECK_THROWS_AS(other.membership(Perm::identity(3)), Error);
}

TEST_CASE("pointwise stabilizer") {
  PermGroup s3(3, {Perm::from_cycles(3, {{0, 1}}), Perm::from_cycles(3, {{0, 1, 2}})});
  CHECK(static_cast<long long>(s3.pointwise_stabilizer({}).order()) == 6);

  PermGroup stab = s3.pointwise_stabilizer({2});
  CHECK(static_cast<long long>(stab.order()) == 2);
  CHECK(stab.contains(Perm::from_cycles(3, {{0, 1}})));

  PermGroup c3(3, {Perm::from_cycles(3, {{0, 1, 2}})});
  CHECK(static_cast<long long>(c3.pointwise_stabilizer({0}).order()) == 1);
}

TEST_CASE("pointwise stabilizer equals exhaustive filter") {
  Rng rng(777);
  for (int trial = 0; trial < 25; ++trial) {
    int degree = 3 + rng.below_int(4);
    std::vector<Perm> gens = random_perms(rng, degree, 2);
    PermGroup g(degree, gens);
    std::vector<int> pts = {rng.below_int(degree)};
    if (trial % 2)
      pts.push_back(rng.below_int(degree));
    PermGroup stab = g.pointwise_stabilizer(pts);
    auto closure = exhaustive_closure(degree, gens);
    std::size_t expect = 0;
    for (const Perm &p : closure) {
      bool fixes = true;
      for (int q : pts)
        fixes = fixes && p[q] == q;
      if (fixes) {
        ++expect;
        REQUIRE(stab.contains(p));
      }
    }
    REQUIRE(static_cast<std::size_t>(stab.order()) == expect);
  }
}

TEST_CASE("action kernel") {
  PermGroup c4(4, {Perm::from_cycles(4, {{0, 1, 2, 3}})});

  SECTION("trivial action has full kernel") {
    PermGroup k = action_kernel(c4, {Perm::identity(2)}, 2);
    CHECK(static_cast<long long>(k.order()) == 4);
  }

  SECTION("block action of C4") {
    // blocks {0,2},{1,3}; the 4-cycle swaps them
    PermGroup k = action_kernel(c4, {Perm::from_cycles(2, {{0, 1}})}, 2);
    CHECK(static_cast<long long>(k.order()) == 2);
    CHECK(k.contains(Perm::from_cycles(4, {{0, 2}, {1, 3}})));
  }

  SECTION("faithful action has trivial kernel") {
    PermGroup k = action_kernel(c4, c4.generators(), 4);
    CHECK(static_cast<long long>(k.order()) == 1);
  }

  SECTION("quotient onto C2 is accepted") {
    PermGroup k = action_kernel(c4, {Perm::from_cycles(3, {{0, 1}})}, 3);
    CHECK(static_cast<long long>(k.order()) == 2);
  }

  SECTION("non-homomorphism rejected") {
    // generator of order 4 cannot map to a 3-cycle
    CHECK_THROWS_AS(action_kernel(c4, {Perm::from_cycles(3, {{0, 1, 2}})}, 3), Error);
  }
}

TEST_CASE("normal closure") {
  PermGroup s3(3, {Perm::from_cycles(3, {{0, 1}}), Perm::from_cycles(3, {{0, 1, 2}})});
  CHECK(static_cast<long long>(s3.normal_closure({Perm::identity(3)}).order()) == 1);
  PermGroup n = s3.normal_closure({Perm::from_cycles(3, {{0, 1, 2}})});
  CHECK(static_cast<long long>(n.order()) == 3);
  PermGroup whole = s3.normal_closure(s3.generators());
  CHECK(static_cast<long long>(whole.order()) == 6);
}

TEST_CASE("normal closure rejects outside elements") {
  PermGroup c3(3, {Perm::from_cycles(3, {{0, 1, 2}})});
  CHECK_THROWS_AS(c3.normal_closure({Perm::from_cycles(3, {{0, 1}})}), Error);
}

TEST_CASE("reduce_generators") {
  std::vector<Perm> many(50, Perm::from_cycles(4, {{0, 1}}));
  PermGroup g(4, many);
  PermGroup r = g.reduce_generators();
  CHECK(r.generators().size() == 1);
  CHECK(static_cast<long long>(r.order()) == 2);

  PermGroup a5(5, {Perm::from_cycles(5, {{0, 1, 2, 3, 4}}), Perm::from_cycles(5, {{0, 1, 2}})});
  std::vector<Perm> all = a5.elements();
  PermGroup fat(5, all);
  PermGroup slim = fat.reduce_generators();
  CHECK(slim.generators().size() <= 10);
  CHECK(static_cast<long long>(slim.order()) == 60);

  CHECK(PermGroup(5).reduce_generators().generators().empty());
}

TEST_CASE("reduce_generators preserves membership answers") {
  Rng rng(424242);
  std::vector<Perm> gens = random_perms(rng, 6, 3);
  PermGroup g(6, gens);
  PermGroup r = g.reduce_generators();
  REQUIRE(g.order() == r.order());
  for (const Perm &p : random_perms(rng, 6, 100))
    REQUIRE(g.contains(p) == r.contains(p));
}

TEST_CASE("is_perm_isomorphism") {
  PermGroup c4(4, {Perm::from_cycles(4, {{0, 1, 2, 3}})});
  CHECK(is_perm_isomorphism(c4, c4, Perm::identity(4)));
  // (1 3) in 1-based = swap of points 0 and 2: normalizes C4
  CHECK(is_perm_isomorphism(c4, c4, Perm::from_cycles(4, {{0, 2}})));

  PermGroup c3(3, {Perm::from_cycles(3, {{0, 1, 2}})});
  PermGroup c2(3, {Perm::from_cycles(3, {{0, 1}})});
  for (const Perm &f : PermGroup::symmetric(3).elements())
    CHECK_FALSE(is_perm_isomorphism(c3, c2, f));
}

TEST_CASE("point transporter") {
  PermGroup c4(4, {Perm::from_cycles(4, {{0, 1, 2, 3}})});
  auto t = point_transporter(c4, {{0, 2}});
  REQUIRE(t.has_value());
  CHECK(t->rep[0] == 2);
  CHECK(static_cast<long long>(t->stabilizer.order()) == 1);

  PermGroup v4(4, {Perm::from_cycles(4, {{0, 1}, {2, 3}}), Perm::from_cycles(4, {{0, 2}, {1, 3}})});
  auto t2 = point_transporter(v4, {{0, 1}, {2, 3}});
  REQUIRE(t2.has_value());
  CHECK(t2->rep[0] == 1);
  CHECK(t2->rep[2] == 3);

  auto t3 = point_transporter(v4, {{0, 1}, {2, 2}});
  CHECK_FALSE(t3.has_value());
}

TEST_CASE("element enumeration is the full group") {
  PermGroup s4 = PermGroup::symmetric(4);
  std::vector<Perm> elems = s4.elements();
  CHECK(elems.size() == 24);
  std::set<Perm> uniq(elems.begin(), elems.end());
  CHECK(uniq.size() == 24);
  for (const Perm &p : elems)
    CHECK(s4.contains(p));
}
