#include "conekit/contact.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace conekit {

Int band_of(const ConeComplex& x, const ComplexPoint& p) {
  x.check_point(p);
  if (is_zero_vec(p.point)) return 0;
  Cone face = x.cone(p.cone).minimal_face(p.point).cone;
  Vec coords = face.to_span(p.point);
  Int g = 0;
  for (const Vec& xi : face.dual_hilbert_basis()) {
    Int pairing = checked_dot(xi, coords);
    g = std::gcd(g, pairing < 0 ? -pairing : pairing);
  }
  if (g == 0) raise(errc::internal, "nonzero contact order pairs to zero with the whole dual");
  return g;
}

ContactComponent contact_component(const ConeComplex& x, const ComplexPoint& p) {
  ComplexPoint rep = x.canonical_rep(p);
  return {rep, band_of(x, rep)};
}

std::vector<ContactComponent> contact_components(const ConeComplex& x, Int bound) {
  std::vector<ContactComponent> out;
  for (const PointOrbit& o : x.points_up_to(bound)) out.push_back({o.rep, band_of(x, o.rep)});
  return out;
}

ConeFace vanishing_locus(const Cone& sigma, const Vec& phi) {
  return sigma.minimal_face(phi);  // raises not_contained when phi is outside
}

ContactComponent lift_contact(const SubdivisionMap& f, const ContactComponent& c) {
  ComplexPoint lifted = lift_point(f, c.rep);
  return contact_component(f.source, lifted);
}

Int contact_order_against_ray(const ConeComplex& y, const ComplexPoint& phi, int ray_orbit) {
  y.check_point(phi);
  Cone face = y.cone(phi.cone).minimal_face(phi.point).cone;
  if (!face.is_smooth())
    raise(errc::not_smooth, "contact order needs a smooth minimal cone");
  if (face.dim() == 0) return 0;
  Vec coords = face.to_span(phi.point);
  Mat rows(face.dim(), face.dim());
  for (int i = 0; i < face.dim(); ++i) {
    Vec rc = face.to_span(face.rays()[static_cast<std::size_t>(i)]);
    for (int j = 0; j < face.dim(); ++j) rows.at(i, j) = rc[static_cast<std::size_t>(j)];
  }
  auto sol = solve_square_rational(rows.transpose(), coords);
  if (!sol) raise(errc::internal, "rays of a smooth cone are dependent");
  Int total = 0;
  for (std::size_t i = 0; i < face.rays().size(); ++i) {
    if (!(*sol)[i].is_integer() || (*sol)[i].num < 0)
      raise(errc::internal, "smooth expansion is not a nonnegative integer combination");
    if (y.ray_orbit_index({phi.cone, face.rays()[i]}) == ray_orbit)
      total = checked_add(total, (*sol)[i].num);
  }
  return total;
}

Int degree_l(const SubdivisionMap& f, const PLDivisor& m, const std::vector<ComplexPoint>& contacts) {
  std::vector<int> exc = exceptional_rays(f);
  std::set<int> exceptional(exc.begin(), exc.end());
  for (const auto& [idx, coeff] : m.coeff)
    if (coeff != 0 && !exceptional.count(idx))
      raise(errc::unsupported_coefficient,
            "divisor has a coefficient on non-exceptional ray orbit " + std::to_string(idx));

  Int total = 0;
  for (const auto& [idx, coeff] : m.coeff) {
    if (coeff == 0) continue;
    Int orders = 0;
    for (const ComplexPoint& phi : contacts)
      orders = checked_add(orders, contact_order_against_ray(f.source, phi, idx));
    total = checked_add(total, checked_mul(coeff, orders));
  }
  return total;
}

Int degree_total(Int base_degree, const SubdivisionMap& f, const PLDivisor& m,
                 const std::vector<ComplexPoint>& contacts) {
  return checked_add(base_degree, degree_l(f, m, contacts));
}

LiftedDiscreteData lift_discrete_data(const SubdivisionMap& f, const DiscreteData& gamma,
                                      const PLDivisor& m) {
  LiftedDiscreteData out;
  out.data.genus = gamma.genus;
  out.data.base_degree = gamma.base_degree;
  std::vector<ComplexPoint> contacts;
  for (const ContactComponent& c : gamma.markings) {
    ContactComponent lifted = lift_contact(f, c);
    contacts.push_back(lifted.rep);
    out.data.markings.push_back(lifted);
  }
  out.degree_l = degree_l(f, m, contacts);
  out.degree_total = checked_add(gamma.base_degree, out.degree_l);
  return out;
}

}  // namespace conekit
