#pragma once

#include <random>
#include <vector>

#include "conekit/complex.hpp"

namespace testutil {

using conekit::ConeComplex;
using conekit::Cone;
using conekit::ComplexPoint;
using conekit::FaceMapArrow;
using conekit::Int;
using conekit::Mat;
using conekit::Vec;

inline ConeComplex quadrant_fan() { return ConeComplex::from_fan(2, {{{1, 0}, {0, 1}}}); }

inline ConeComplex octant_fan() {
  return ConeComplex::from_fan(3, {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}});
}

// One 2-dim chart glued to itself by the coordinate swap, with the face
// charts it needs to be complete.
inline ConeComplex swap_quadrant() {
  std::vector<Cone> cones = {Cone::zero(2), Cone::from_generators(2, {{1, 0}}),
                             Cone::from_generators(2, {{1, 0}, {0, 1}})};
  Mat id = Mat::identity(2);
  Mat swap(2, 2);
  swap.at(0, 1) = 1;
  swap.at(1, 0) = 1;
  std::vector<FaceMapArrow> arrows = {
      {0, 1, id}, {0, 2, id}, {1, 2, id}, {1, 2, swap}, {2, 2, swap}};
  return ConeComplex::from_diagram(2, std::move(cones), std::move(arrows));
}

// The octant glued to itself by the cyclic rotation of coordinates.
inline ConeComplex cyclic_octant() {
  std::vector<Cone> cones = {Cone::zero(3), Cone::from_generators(3, {{1, 0, 0}}),
                             Cone::from_generators(3, {{1, 0, 0}, {0, 1, 0}}),
                             Cone::from_generators(3, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}})};
  Mat id = Mat::identity(3);
  Mat rot(3, 3);  // e1 -> e2 -> e3 -> e1
  rot.at(1, 0) = 1;
  rot.at(2, 1) = 1;
  rot.at(0, 2) = 1;
  std::vector<FaceMapArrow> arrows = {{0, 1, id}, {0, 2, id}, {0, 3, id}, {1, 2, id},
                                      {1, 2, rot}, {1, 3, id}, {2, 3, id}, {3, 3, rot}};
  return ConeComplex::from_diagram(3, std::move(cones), std::move(arrows));
}

inline Vec random_cone_point(std::mt19937& rng, const Cone& c, Int bound) {
  std::uniform_int_distribution<Int> d(-bound, bound);
  for (int attempt = 0; attempt < 500; ++attempt) {
    Vec v(static_cast<std::size_t>(c.ambient_rank()));
    for (auto& x : v) x = d(rng);
    if (!conekit::is_zero_vec(v) && c.contains(v)) return v;
  }
  // Fall back to the generator sum, always a cone point.
  Vec v(static_cast<std::size_t>(c.ambient_rank()), 0);
  for (const Vec& r : c.rays()) v = conekit::vec_add(v, r);
  return v;
}

}  // namespace testutil
