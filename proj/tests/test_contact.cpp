#include "conekit/contact.hpp"

#include <numeric>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace conekit;
using testutil::quadrant_fan;

namespace {

int find_ray_orbit(const ConeComplex& x, const Vec& dir) {
  auto orbits = x.ray_orbits();
  for (std::size_t i = 0; i < orbits.size(); ++i)
    for (const ComplexPoint& m : orbits[i].members)
      if (m.point == dir) return static_cast<int>(i);
  REQUIRE(false);
  return -1;
}

SubdivisionMap quadrant_blowup() {
  ConeComplex q = quadrant_fan();
  return star_subdivide(q, {q.size() - 1, {1, 1}});
}

}  // namespace

TEST_CASE("contact components of the quadrant") {
  ConeComplex q = quadrant_fan();
  auto comps = contact_components(q, 1);
  REQUIRE(comps.size() == 4);
  for (const auto& c : comps) {
    if (is_zero_vec(c.rep.point))
      CHECK(c.band == 0);
    else
      CHECK(c.band == 1);
  }
  CHECK(band_of(q, {q.size() - 1, {2, 4}}) == 2);
}

TEST_CASE("bands match the gcd over the full dual Hilbert basis") {
  std::mt19937 rng(61);
  int tested = 0;
  while (tested < 40) {
    int rank = 2 + static_cast<int>(rng() % 2);
    std::uniform_int_distribution<Int> d(-3, 3);
    std::vector<Vec> gens;
    for (int i = 0; i < 3; ++i) {
      Vec v(static_cast<std::size_t>(rank));
      for (auto& x : v) x = d(rng);
      if (!is_zero_vec(v)) gens.push_back(v);
    }
    if (gens.empty()) continue;
    Cone c;
    try {
      c = Cone::from_generators(rank, gens);
    } catch (const error&) {
      continue;
    }
    if (c.dim() == 0) continue;
    ConeComplex x = ConeComplex::from_fan(rank, {c.rays()});
    Vec phi = testutil::random_cone_point(rng, c, 4);
    ComplexPoint p{x.size() - 1, phi};

    Int expected = 0;
    const Cone& top = x.cone(x.size() - 1);
    for (const Vec& xi : top.dual_hilbert_basis()) {
      Int pairing = checked_dot(xi, top.to_span(phi));
      expected = std::gcd(expected, pairing < 0 ? -pairing : pairing);
    }
    CHECK(band_of(x, p) == expected);
    CHECK(band_of(x, {x.size() - 1, Vec(static_cast<std::size_t>(rank), 0)}) == 0);
    ++tested;
  }
}

TEST_CASE("band scales linearly along a ray of the same face") {
  ConeComplex q = quadrant_fan();
  int top = q.size() - 1;
  for (Int k = 1; k <= 5; ++k) {
    CHECK(band_of(q, {top, {k, k}}) == k * band_of(q, {top, {1, 1}}));
    CHECK(band_of(q, {top, {2 * k, 4 * k}}) == k * band_of(q, {top, {2, 4}}));
  }
}

TEST_CASE("vanishing locus is the minimal face") {
  Cone q = Cone::from_generators(2, {{1, 0}, {0, 1}});
  CHECK(vanishing_locus(q, {1, 1}).cone == q);
  CHECK(vanishing_locus(q, {3, 0}).cone.dim() == 1);
  CHECK(vanishing_locus(q, {0, 0}).cone.dim() == 0);
  CHECK_THROWS_AS(vanishing_locus(q, {-1, 2}), error);
}

TEST_CASE("lifting contact components through the blowup") {
  SubdivisionMap f = quadrant_blowup();
  const ConeComplex& x = f.target;

  ContactComponent diag = contact_component(x, {x.size() - 1, {1, 1}});
  ContactComponent lifted = lift_contact(f, diag);
  CHECK(lifted.rep.point == Vec{1, 1});
  CHECK(f.source.cone(lifted.rep.cone).dim() == 1);  // lands on the exceptional ray
  CHECK(lifted.band == diag.band);

  ContactComponent off = contact_component(x, {x.size() - 1, {2, 1}});
  ContactComponent lifted_off = lift_contact(f, off);
  Cone face = f.source.cone(lifted_off.rep.cone).minimal_face(lifted_off.rep.point).cone;
  CHECK(face.dim() == 2);
  CHECK(face.rays() == std::vector<Vec>{{1, 0}, {1, 1}});

  ContactComponent zero = contact_component(x, {0, {0, 0}});
  ContactComponent lifted_zero = lift_contact(f, zero);
  CHECK(is_zero_vec(lifted_zero.rep.point));
  CHECK(lifted_zero.band == 0);
}

TEST_CASE("lift_contact is a bijection on bounded components") {
  SubdivisionMap f = quadrant_blowup();
  auto target_comps = contact_components(f.target, 8);
  auto source_comps = contact_components(f.source, 8);
  REQUIRE(target_comps.size() == source_comps.size());

  std::set<ComplexPoint> hit;
  for (const auto& c : target_comps) {
    ContactComponent l = lift_contact(f, c);
    CHECK(hit.insert(l.rep).second);  // injective
    bool found = false;
    for (const auto& s : source_comps) found = found || s.rep == l.rep;
    CHECK(found);  // lands in the bounded set (fan subdivisions preserve coordinates)
  }
}

TEST_CASE("contact orders against rays") {
  SubdivisionMap f = quadrant_blowup();
  const ConeComplex& y = f.source;
  int e = find_ray_orbit(y, {1, 1});

  int exc_ray_cone = -1;
  for (int i = 0; i < y.size(); ++i)
    if (y.cone(i).dim() == 1 && y.cone(i).rays().front() == Vec{1, 1}) exc_ray_cone = i;
  REQUIRE(exc_ray_cone >= 0);
  CHECK(contact_order_against_ray(y, {exc_ray_cone, {1, 1}}, e) == 1);

  int chart = -1;
  for (int i = 0; i < y.size(); ++i)
    if (y.cone(i).rays() == std::vector<Vec>{{0, 1}, {1, 1}}) chart = i;
  REQUIRE(chart >= 0);
  CHECK(contact_order_against_ray(y, {chart, {2, 3}}, e) == 2);  // (2,3) = 2(1,1) + 1(0,1)
  int e1 = find_ray_orbit(y, {1, 0});
  CHECK(contact_order_against_ray(y, {chart, {2, 3}}, e1) == 0);

  // Well defined on orbit representatives regardless of the carrying chart.
  ComplexPoint other{y.size() - 1, {2, 3}};
  for (int i = 0; i < y.size(); ++i)
    if (y.cone(i).contains({2, 3})) CHECK(contact_order_against_ray(y, {i, {2, 3}}, e) == 2);
  (void)other;
}

TEST_CASE("degree formulas on the blowup fixture") {
  SubdivisionMap f = quadrant_blowup();
  const ConeComplex& y = f.source;
  int e = find_ray_orbit(y, {1, 1});
  PLDivisor m;
  m.coeff[e] = -1;

  int exc_ray_cone = -1, chart = -1;
  for (int i = 0; i < y.size(); ++i) {
    if (y.cone(i).dim() == 1 && y.cone(i).rays().front() == Vec{1, 1}) exc_ray_cone = i;
    if (y.cone(i).rays() == std::vector<Vec>{{0, 1}, {1, 1}}) chart = i;
  }
  std::vector<ComplexPoint> contacts = {{exc_ray_cone, {1, 1}}, {chart, {2, 3}}};

  CHECK(degree_l(f, m, contacts) == -3);
  CHECK(degree_total(5, f, m, contacts) == 2);
  CHECK(degree_l(f, m, {}) == 0);
  CHECK(degree_l(f, PLDivisor{}, contacts) == 0);
  CHECK(degree_total(4, f, m, {{exc_ray_cone, {1, 1}}}) == 3);

  PLDivisor off;
  off.coeff[find_ray_orbit(y, {1, 0})] = -1;
  CHECK_THROWS_AS(degree_l(f, off, contacts), error);
}

TEST_CASE("degree additivity") {
  std::mt19937 rng(67);
  SubdivisionMap f = quadrant_blowup();
  const ConeComplex& y = f.source;
  int e = find_ray_orbit(y, {1, 1});

  std::uniform_int_distribution<Int> coeff(-5, -1);
  for (int t = 0; t < 30; ++t) {
    PLDivisor m1, m2, sum;
    m1.coeff[e] = coeff(rng);
    m2.coeff[e] = coeff(rng);
    sum.coeff[e] = m1.coeff[e] + m2.coeff[e];

    std::vector<ComplexPoint> contacts;
    int top = y.size() - 1;
    for (int i = 0; i < 3; ++i) {
      Vec v = testutil::random_cone_point(rng, y.cone(top), 4);
      contacts.push_back({top, v});
    }
    CHECK(degree_l(f, sum, contacts) == degree_l(f, m1, contacts) + degree_l(f, m2, contacts));
    // additive in the contact list
    std::vector<ComplexPoint> head(contacts.begin(), contacts.begin() + 1);
    std::vector<ComplexPoint> tail(contacts.begin() + 1, contacts.end());
    CHECK(degree_l(f, m1, contacts) == degree_l(f, m1, head) + degree_l(f, m1, tail));
    CHECK(degree_total(7, f, m1, contacts) - degree_total(0, f, m1, contacts) == 7);
  }
}

TEST_CASE("degree is invariant under further subdivision") {
  std::mt19937 rng(71);
  ConeComplex a3 = ConeComplex::from_fan(2, {{{1, 0}, {1, 3}}});
  SubdivisionMap f = resolve(a3);
  PLDivisor m = ample_coefficients(f);

  std::vector<ComplexPoint> contacts;
  for (int i = 0; i < 4; ++i) {
    int top = a3.size() - 1;
    Vec v = testutil::random_cone_point(rng, a3.cone(top), 5);
    contacts.push_back(lift_point(f, {top, v}));
  }
  Int before = degree_l(f, m, contacts);

  // Refine further at a smooth two-ray sum and pull everything back.
  int chart = -1;
  for (int id : f.source.maximal_cones())
    if (chart < 0) chart = id;
  Vec center(2, 0);
  for (const Vec& r : f.source.cone(chart).rays()) center = vec_add(center, r);
  SubdivisionMap g = star_subdivide(f.source, {chart, center});
  PLDivisor m_up = pullback(g, m);
  std::vector<ComplexPoint> lifted;
  for (const ComplexPoint& c : contacts) lifted.push_back(lift_point(g, c));
  CHECK(degree_l(compose(g, f), m_up, lifted) == before);
}

TEST_CASE("lift_discrete_data composes the pieces") {
  SubdivisionMap f = quadrant_blowup();
  PLDivisor m = ample_coefficients(f);
  DiscreteData gamma;
  gamma.genus = 1;
  gamma.base_degree = 4;
  gamma.markings = {contact_component(f.target, {f.target.size() - 1, {1, 1}})};

  LiftedDiscreteData lifted = lift_discrete_data(f, gamma, m);
  CHECK(lifted.data.genus == 1);
  CHECK(lifted.data.markings.size() == 1);
  CHECK(lifted.degree_l == -1);
  CHECK(lifted.degree_total == 3);

  DiscreteData empty;
  empty.base_degree = 9;
  LiftedDiscreteData le = lift_discrete_data(f, empty, m);
  CHECK(le.degree_l == 0);
  CHECK(le.degree_total == 9);

  // Identity subdivision leaves the data unchanged.
  SubdivisionMap id = identity_subdivision(f.target);
  LiftedDiscreteData li = lift_discrete_data(id, gamma, PLDivisor{});
  CHECK(li.data.markings == gamma.markings);
  CHECK(li.degree_total == 4);
}
