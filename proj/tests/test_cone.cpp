#include "conekit/cone.hpp"

#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"

using namespace conekit;

namespace {

Cone quadrant() { return Cone::from_generators(2, {{1, 0}, {0, 1}}); }

Cone random_pointed_cone(std::mt19937& rng, int rank, int nrays, Int amp) {
  std::uniform_int_distribution<Int> d(-amp, amp);
  for (int attempt = 0; attempt < 200; ++attempt) {
    std::vector<Vec> gens;
    for (int i = 0; i < nrays; ++i) {
      Vec v(static_cast<std::size_t>(rank));
      for (auto& x : v) x = d(rng);
      if (!is_zero_vec(v)) gens.push_back(v);
    }
    if (gens.empty()) continue;
    try {
      return Cone::from_generators(rank, gens);
    } catch (const error&) {
      continue;
    }
  }
  return quadrant();
}

}  // namespace

TEST_CASE("containment and minimal faces") {
  Cone q = quadrant();
  CHECK(q.contains({2, 3}));
  CHECK(q.minimal_face({2, 3}).cone == q);

  auto mf = q.minimal_face({4, 0});
  CHECK(mf.cone.dim() == 1);
  CHECK(mf.cone.rays() == std::vector<Vec>{{1, 0}});

  Cone c = Cone::from_generators(2, {{1, 0}, {1, 2}});
  CHECK(c.contains({1, 1}));
  CHECK(c.minimal_face({1, 1}).cone == c);
  CHECK_FALSE(c.contains({0, 1}));
  CHECK_FALSE(c.contains({-1, 0}));
  CHECK_THROWS_AS(q.minimal_face({-1, -1}), error);
}

TEST_CASE("construction canonicalizes generators") {
  Cone c = Cone::from_generators(2, {{2, 0}, {0, 3}, {1, 1}});  // (1,1) is not extreme
  CHECK(c.rays() == std::vector<Vec>{{0, 1}, {1, 0}});
  CHECK_THROWS_AS(Cone::from_generators(2, {{1, 0}, {-1, 0}}), error);
  Cone z = Cone::zero(3);
  CHECK(z.dim() == 0);
  CHECK(z.contains({0, 0, 0}));
  CHECK_FALSE(z.contains({1, 0, 0}));
}

TEST_CASE("face lattices") {
  CHECK(quadrant().faces().size() == 4);
  CHECK(Cone::from_generators(2, {{1, 0}}).faces().size() == 2);
  Cone octant = Cone::from_generators(3, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  CHECK(octant.faces().size() == 8);

  // Closure under intersection, and minimal_face as the intersection of the
  // faces containing the point.
  Cone c = Cone::from_generators(3, {{1, 0, 0}, {0, 1, 0}, {1, 0, 2}, {0, 1, 2}});
  auto fs = c.faces();
  for (const auto& a : fs)
    for (const auto& b : fs) {
      Cone meet = intersect_cones(a.cone, b.cone);
      bool found = false;
      for (const auto& f : fs) found = found || f.cone == meet;
      CHECK(found);
    }
  Vec v{1, 0, 2};
  auto mf = c.minimal_face(v);
  for (const auto& f : fs)
    if (f.cone.contains(v)) CHECK(f.cone.has_face(mf.cone));
}

TEST_CASE("hilbert bases on pinned cones") {
  CHECK(quadrant().hilbert_basis() == std::vector<Vec>{{0, 1}, {1, 0}});

  Cone a1 = Cone::from_generators(2, {{1, 0}, {1, 2}});
  CHECK(a1.hilbert_basis() == std::vector<Vec>{{1, 0}, {1, 1}, {1, 2}});

  Cone a4 = Cone::from_generators(2, {{1, 0}, {1, 5}});
  std::vector<Vec> expected;
  for (Int j = 0; j <= 5; ++j) expected.push_back({1, j});
  CHECK(a4.hilbert_basis() == expected);
}

TEST_CASE("dual hilbert bases on pinned cones") {
  CHECK(quadrant().dual_hilbert_basis() == std::vector<Vec>{{0, 1}, {1, 0}});
  Cone a1 = Cone::from_generators(2, {{1, 0}, {1, 2}});
  CHECK(a1.dual_hilbert_basis() == std::vector<Vec>{{0, 1}, {1, 0}, {2, -1}});
  Cone ray = Cone::from_generators(2, {{1, 0}});
  CHECK(ray.dual_hilbert_basis() == std::vector<Vec>{{1}});
}

TEST_CASE("multiplicity and smoothness") {
  CHECK(quadrant().multiplicity() == 1);
  CHECK(quadrant().is_smooth());
  Cone a1 = Cone::from_generators(2, {{1, 0}, {1, 2}});
  CHECK(a1.multiplicity() == 2);
  CHECK_FALSE(a1.is_smooth());
  Cone sq = Cone::from_generators(3, {{1, 0, 0}, {0, 1, 0}, {1, 0, 1}, {0, 1, 1}});
  CHECK_FALSE(sq.is_simplicial());
  CHECK_FALSE(sq.is_smooth());
  CHECK_THROWS_AS(sq.multiplicity(), error);
  CHECK(sq.rays().size() == 4);
}

TEST_CASE("duality pairing invariants") {
  std::mt19937 rng(23);
  for (int t = 0; t < 40; ++t) {
    Cone c = random_pointed_cone(rng, 2 + static_cast<int>(rng() % 2), 3, 3);
    auto hb = c.hilbert_basis();
    auto dual = c.dual_hilbert_basis();
    for (const Vec& xi : dual)
      for (const Vec& v : hb) CHECK(checked_dot(xi, c.to_span(v)) >= 0);
    // The dual basis cuts the cone out of its span.
    for (const Vec& v : hb) {
      bool all_nonneg = true;
      for (const Vec& xi : dual) all_nonneg = all_nonneg && checked_dot(xi, c.to_span(v)) >= 0;
      CHECK(all_nonneg);
    }
  }
}

TEST_CASE("smooth cones are generated by their rays") {
  std::mt19937 rng(29);
  for (int t = 0; t < 60; ++t) {
    Cone c = random_pointed_cone(rng, 3, 3, 2);
    if (c.is_smooth()) CHECK(c.hilbert_basis() == c.rays());
  }
}

TEST_CASE("hilbert basis matches the bounding-box oracle") {
  std::mt19937 rng(31);
  int checked = 0;
  for (int t = 0; t < 60 && checked < 25; ++t) {
    Cone c = random_pointed_cone(rng, 2 + static_cast<int>(rng() % 2), 3, 3);
    if (c.dim() < 2) continue;
    auto expected = oracle::hilbert_basis(c.rays(), oracle::hilbert_box(c.rays()));
    REQUIRE_FALSE(expected.empty());
    CHECK(c.hilbert_basis() == expected);
    ++checked;
  }
  CHECK(checked >= 10);
}

TEST_CASE("expand_nonneg recovers cone coordinates") {
  Cone c = Cone::from_generators(2, {{1, 1}, {0, 1}});
  auto t = c.expand_nonneg({2, 3});
  REQUIRE(t.size() == 2);
  // rays sorted: (0,1) then (1,1); (2,3) = 1*(0,1) + 2*(1,1)
  CHECK(t[0] == Rat(1));
  CHECK(t[1] == Rat(2));
  Cone sq = Cone::from_generators(3, {{1, 0, 0}, {0, 1, 0}, {1, 0, 1}, {0, 1, 1}});
  auto u = sq.expand_nonneg({1, 1, 1});
  Vec back(3, 0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    CHECK(Rat(0) <= u[i]);
    if (u[i].is_integer())
      back = vec_add(back, vec_scale(u[i].num, sq.rays()[i]));
  }
}

TEST_CASE("relative interiors") {
  Cone q = quadrant();
  Cone left = Cone::from_generators(2, {{1, 0}, {1, 1}});
  Cone right = Cone::from_generators(2, {{1, 1}, {0, 1}});
  CHECK_FALSE(relative_interiors_meet(left, right));
  CHECK(relative_interiors_meet(left, q));
  CHECK(relative_interiors_meet(q, q));
  Cone diag = Cone::from_generators(2, {{1, 1}});
  CHECK(relative_interiors_meet(diag, q));
  CHECK_FALSE(relative_interiors_meet(diag, left));
}
