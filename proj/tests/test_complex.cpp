#include "conekit/complex.hpp"

#include <random>

#include "doctest.h"
#include "testutil.hpp"

using namespace conekit;
using testutil::cyclic_octant;
using testutil::quadrant_fan;
using testutil::swap_quadrant;

TEST_CASE("from_fan builds the face closure") {
  ConeComplex q = quadrant_fan();
  CHECK(q.size() == 4);  // {0}, two rays, the quadrant

  ConeComplex blowup = ConeComplex::from_fan(2, {{{1, 0}, {1, 1}}, {{1, 1}, {0, 1}}});
  CHECK(blowup.size() == 6);
  int ray_count = 0;
  for (int i = 0; i < blowup.size(); ++i) ray_count += blowup.cone(i).dim() == 1;
  CHECK(ray_count == 3);

  ConeComplex half = ConeComplex::from_fan(2, {{{1, 0}, {0, 1}}, {{0, 1}, {-1, 0}}});
  CHECK(half.size() == 6);  // {0}, three rays, two half-quadrants
  CHECK(half.validate().valid);
}

TEST_CASE("from_fan rejects non-face overlaps") {
  CHECK_THROWS_AS(ConeComplex::from_fan(2, {{{1, 0}, {0, 1}}, {{1, 1}, {-1, 1}}}), error);
}

TEST_CASE("validation and faithfulness") {
  CHECK(quadrant_fan().validate().valid);
  CHECK(quadrant_fan().is_faithful());

  ConeComplex swap = swap_quadrant();
  CHECK(swap.validate().valid);
  CHECK_FALSE(swap.is_faithful());

  ConeComplex rot = cyclic_octant();
  CHECK(rot.validate().valid);
  CHECK_FALSE(rot.is_faithful());

  // Missing ray chart: face-completeness violation.
  std::vector<Cone> cones = {Cone::zero(2), Cone::from_generators(2, {{1, 0}, {0, 1}})};
  std::vector<FaceMapArrow> arrows = {{0, 1, Mat::identity(2)}};
  ConeComplex broken = ConeComplex::assemble(ConeComplex::Mode::diagram, 2, cones, arrows);
  ValidationReport report = broken.validate();
  CHECK_FALSE(report.valid);
  bool found = false;
  for (const auto& d : report.issues) found = found || d.code == "face_incomplete";
  CHECK(found);
  CHECK_THROWS_AS(ConeComplex::from_diagram(2, cones, arrows), error);
}

TEST_CASE("point orbits and representatives") {
  ConeComplex q = quadrant_fan();
  auto orbits = q.points_up_to(1);
  CHECK(orbits.size() == 4);  // 0, (1,0), (0,1), (1,1)

  ConeComplex swap = swap_quadrant();
  auto sorbits = swap.points_up_to(1);
  CHECK(sorbits.size() == 3);  // the two ray points are identified

  CHECK_THROWS_AS(q.points_up_to(0), error);
}

TEST_CASE("orbit representatives are prefix-consistent across bounds") {
  std::mt19937 rng(41);
  ConeComplex blowup = ConeComplex::from_fan(2, {{{1, 0}, {1, 1}}, {{1, 1}, {0, 1}}});
  for (const ConeComplex& x : {quadrant_fan(), blowup, swap_quadrant()}) {
    auto small = x.points_up_to(2);
    auto large = x.points_up_to(3);
    for (const auto& o : small) {
      bool found = false;
      for (const auto& l : large) found = found || l.rep == o.rep;
      CHECK(found);
    }
  }
}

TEST_CASE("stability of vectors") {
  ConeComplex q = quadrant_fan();
  std::mt19937 rng(43);
  for (int id = 0; id < q.size(); ++id) {
    if (q.cone(id).dim() == 0) continue;
    Vec v = testutil::random_cone_point(rng, q.cone(id), 3);
    CHECK(q.is_stable_vector({id, v}));  // embedded fans have no monodromy
  }

  ConeComplex swap = swap_quadrant();
  int big = swap.size() - 1;  // the 2-dim chart sorts last
  REQUIRE(swap.cone(big).dim() == 2);
  CHECK_FALSE(swap.is_stable_vector({big, {1, 2}}));
  CHECK(swap.is_stable_vector({big, {1, 1}}));
  CHECK_THROWS_AS(swap.is_stable_vector({big, {0, 0}}), error);
}

TEST_CASE("ray orbits and the boundary labeling") {
  ConeComplex q = quadrant_fan();
  auto labeling = q.boundary_map();
  CHECK(labeling.s.size() == 2);
  // The 2-dim chart carries both labels, each once.
  CHECK(labeling.labels_per_cone.back() == std::vector<int>{0, 1});

  ConeComplex blowup = ConeComplex::from_fan(2, {{{1, 0}, {1, 1}}, {{1, 1}, {0, 1}}});
  CHECK(blowup.ray_orbits().size() == 3);
  CHECK_NOTHROW(blowup.boundary_map());

  ConeComplex swap = swap_quadrant();
  CHECK(swap.ray_orbits().size() == 1);  // e1 and e2 glued
  CHECK_FALSE(swap.all_ray_points_stable());
  CHECK_THROWS_AS(swap.boundary_map(), error);  // UnstableRay
}

TEST_CASE("cone orbits and maximal cones") {
  ConeComplex rot = cyclic_octant();
  // zero, ray, 2-face, octant: one isomorphism class each (self-glued).
  CHECK(rot.cone_orbits().size() == 4);
  CHECK(rot.maximal_cones() == std::vector<int>{3});

  ConeComplex blowup = ConeComplex::from_fan(2, {{{1, 0}, {1, 1}}, {{1, 1}, {0, 1}}});
  CHECK(blowup.maximal_cones().size() == 2);
  CHECK(blowup.cone_orbits().size() == 6);
}

TEST_CASE("cyclic monodromy identifies the three coordinate rays") {
  ConeComplex rot = cyclic_octant();
  auto orbits = rot.points_up_to(1);
  // Orbits of lattice points in the box: 0; e-rays (one orbit); the three
  // 2-face interior points (one orbit); (1,1,1).
  CHECK(orbits.size() == 4);
  CHECK_FALSE(rot.is_stable_vector({3, {1, 0, 0}}));
  CHECK(rot.is_stable_vector({3, {1, 1, 1}}));
}
