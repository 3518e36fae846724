#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "conekit/complex.hpp"

namespace conekit {

struct StarStep {
  ComplexPoint center;              // canonical representative of the center's image in the target
  std::vector<int> affected_targets;  // target cone ids whose charts were refined
  bool created_ray = false;
  ComplexPoint new_ray;             // canonical target representative of the new ray point
  std::string phase;                // "star" | "barycentric" | "simplicial" | "multiplicity"
};

// Integer coefficients on ray orbits of a complex; the induced support
// function takes value -m at the primitive generator of each ray.
struct PLDivisor {
  std::map<int, Int> coeff;

  Int at(int ray_orbit) const {
    auto it = coeff.find(ray_orbit);
    return it == coeff.end() ? 0 : it->second;
  }
  bool has_nonzero() const {
    for (auto& [k, v] : coeff)
      if (v != 0) return true;
    return false;
  }
};

// A morphism of complexes refining each target chart: per source cone, the
// target cone containing its image plus the lattice map, with the star
// subdivision history and exceptional-ray bookkeeping.
struct SubdivisionMap {
  ConeComplex source;  // Y
  ConeComplex target;  // X
  std::vector<std::pair<int, Mat>> assignment;  // per source cone id
  std::vector<StarStep> history;

  // Per ray-creating step, the support-function values of the step's
  // exceptional divisor at the current source rays, keyed by the canonical
  // representative of the ray point's image in the target.
  std::vector<std::map<ComplexPoint, Rat>> psi;

  // Coefficients carried by parsed reports (already verified when produced).
  std::optional<PLDivisor> stored_ample;

  // Multiset trace of maximal-cone multiplicities, recorded by resolve.
  std::vector<std::vector<Int>> multiplicity_trace;

  // Image of a source point in the target, before orbit canonicalization.
  ComplexPoint image_point(const ComplexPoint& p) const;
  // Canonical target representative of the image of a source ray generator.
  ComplexPoint ray_image_key(const ComplexPoint& ray_point) const;
};

SubdivisionMap identity_subdivision(const ConeComplex& x);

// Star subdivision at a stable nonzero point. Raises unstable_center /
// zero_vector. Subdividing at a point on an existing ray is a no-op and
// returns the identity map with the step recorded.
SubdivisionMap star_subdivide(const ConeComplex& x, const ComplexPoint& center);

// Iterated star subdivision at the barycenters of the cones of x, in
// decreasing dimension order.
SubdivisionMap barycentric(const ConeComplex& x);

struct ResolveOptions {
  enum class Barycentric { automatic, always, never };
  // automatic: run the barycentric pass only when some vector is unstable.
  Barycentric barycentric = Barycentric::automatic;
};

// Smooth subdivision with stable vectors and a strict boundary labeling.
SubdivisionMap resolve(const ConeComplex& x, const ResolveOptions& opts = {});

// Composite of later: Z -> Y with earlier: Y -> X.
SubdivisionMap compose(const SubdivisionMap& later, const SubdivisionMap& earlier);

struct SubdivisionCheck {
  bool ok = true;
  std::string reason;
  std::optional<ComplexPoint> witness;  // a point of the target complex
};

// The per-chart subdivision test: containment, disjoint relative interiors,
// wall coverage, and a lattice point census up to the bound.
SubdivisionCheck is_subdivision(const SubdivisionMap& f, Int point_bound = 4);

struct EmbeddedPiece {
  int source_cone = 0;
  Mat embed;   // composite lattice map into the chart
  Cone image;  // embedded cone inside the chart
};

// Distinct embedded images of source cones inside one target chart.
std::vector<EmbeddedPiece> embedded_pieces(const SubdivisionMap& f, int target_cone);

// Unique source point over a target point (the target point must lie in the
// relative interior of exactly one embedded piece).
ComplexPoint lift_point(const SubdivisionMap& f, const ComplexPoint& target_point);

// Source ray orbits whose image in the target is not a ray of the target.
std::vector<int> exceptional_rays(const SubdivisionMap& f);

// m_rho = -(support function of d at the image of rho's primitive generator).
PLDivisor pullback(const SubdivisionMap& f, const PLDivisor& d_on_target);

// Strict relative convexity of the support function of d across every
// interior wall of every target chart.
bool is_relatively_ample(const SubdivisionMap& f, const PLDivisor& d_on_source);

// Negative coefficients supported on the exceptional rays certifying relative
// ampleness, built from the star history and verified; no_certificate if the
// verification fails.
PLDivisor ample_coefficients(const SubdivisionMap& f);

// Validates an externally assembled source/target/assignment triple enough to
// run is_subdivision on it (shape, containment, commutation with face maps).
SubdivisionMap assemble_subdivision(ConeComplex source, ConeComplex target,
                                    std::vector<std::pair<int, Mat>> assignment);

}  // namespace conekit
