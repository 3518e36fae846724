#pragma once

#include <vector>

#include "conekit/subdivision.hpp"

namespace conekit {

// A connected component of the space of logarithmic points of a complex:
// the orbit of a lattice point, with the band of its gerbe. Band 0 encodes
// the multiplicative-group case of the zero contact order; mu_d otherwise.
struct ContactComponent {
  ComplexPoint rep;  // canonical orbit representative
  Int band = 0;

  bool operator==(const ContactComponent& o) const { return rep == o.rep && band == o.band; }
  bool operator<(const ContactComponent& o) const { return rep < o.rep; }
};

// Numerical data of a marked curve: genus, per-marking contact components,
// and the degree against a fixed ample class on the base.
struct DiscreteData {
  Int genus = 0;
  std::vector<ContactComponent> markings;
  Int base_degree = 0;
};

struct LiftedDiscreteData {
  DiscreteData data;     // markings replaced by their unique lifts
  Int degree_l = 0;      // contribution of the exceptional coefficients
  Int degree_total = 0;  // base_degree + degree_l
};

// gcd of the pairings of the point with the dual Hilbert basis of its
// minimal chart; 0 exactly for the zero point.
Int band_of(const ConeComplex& x, const ComplexPoint& p);

ContactComponent contact_component(const ConeComplex& x, const ComplexPoint& p);

// One component per orbit of lattice points with max-norm <= bound,
// including the zero component.
std::vector<ContactComponent> contact_components(const ConeComplex& x, Int bound);

// The stratum attached to a contact order: the minimal face containing it.
ConeFace vanishing_locus(const Cone& sigma, const Vec& phi);

// The unique source component over a target component (the map of components
// along a subdivision is a bijection).
ContactComponent lift_contact(const SubdivisionMap& f, const ContactComponent& c);

// Coefficient of the ray orbit in the expansion of phi over the primitive
// ray generators of its minimal cone; 0 if the orbit is not a ray of it.
Int contact_order_against_ray(const ConeComplex& y, const ComplexPoint& phi, int ray_orbit);

// sum_i m_i * sum_j c_j(E_i) over the exceptional rays E_i.
Int degree_l(const SubdivisionMap& f, const PLDivisor& m, const std::vector<ComplexPoint>& contacts);

Int degree_total(Int base_degree, const SubdivisionMap& f, const PLDivisor& m,
                 const std::vector<ComplexPoint>& contacts);

LiftedDiscreteData lift_discrete_data(const SubdivisionMap& f, const DiscreteData& gamma,
                                      const PLDivisor& m);

}  // namespace conekit
