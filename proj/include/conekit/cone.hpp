#pragma once

#include <cstddef>
#include <vector>

#include "conekit/lattice.hpp"

namespace conekit {

struct ConeFace;

// Strongly convex rational polyhedral cone with primitive extreme-ray generators.
// Construction canonicalizes: generators are primitivized, deduplicated and
// reduced to the extreme rays; facet normals are computed and cached. All
// dual-description work happens in the saturated span lattice, so cones of any
// codimension are supported. Span dimension is capped at 6.
class Cone {
 public:
  Cone() = default;

  static Cone zero(int ambient_rank);
  static Cone from_generators(int ambient_rank, std::vector<Vec> gens);

  int ambient_rank() const { return ambient_rank_; }
  int dim() const { return dim_; }
  const std::vector<Vec>& rays() const { return rays_; }
  const std::vector<Vec>& facet_normals() const { return facet_normals_; }
  const std::vector<Vec>& facet_normals_span() const { return facet_normals_span_; }
  const Mat& span_basis() const { return span_basis_; }

  bool is_zero_cone() const { return rays_.empty(); }

  // Membership in the underlying lattice span.
  bool span_contains(const Vec& v) const;
  // Coordinates in the span basis; raises not_contained if v is off the span lattice.
  Vec to_span(const Vec& v) const;
  Vec to_ambient(const Vec& span_coords) const;

  bool contains(const Vec& v) const;
  bool contains_in_relative_interior(const Vec& v) const;

  ConeFace minimal_face(const Vec& v) const;
  std::vector<ConeFace> faces() const;
  std::vector<ConeFace> facets() const;

  // Is `other` (living in the same ambient lattice) a face of this cone?
  bool has_face(const Cone& other) const;

  std::vector<Vec> hilbert_basis() const;       // ambient coordinates, sorted
  std::vector<Vec> dual_hilbert_basis() const;  // span-dual coordinates, sorted

  bool is_simplicial() const { return static_cast<int>(rays_.size()) == dim_; }
  Int multiplicity() const;  // not_simplicial on non-simplicial input
  bool is_smooth() const;

  // Nonnegative rational expansion of a cone point over the cone's rays.
  // Zero coefficients for rays outside the supporting simplicial piece.
  std::vector<Rat> expand_nonneg(const Vec& v) const;

  bool operator==(const Cone& o) const { return ambient_rank_ == o.ambient_rank_ && rays_ == o.rays_; }
  bool operator<(const Cone& o) const;

 private:
  void build_dual();
  std::vector<std::vector<Vec>> triangulate() const;  // ray subsets of simplicial pieces

  int ambient_rank_ = 0;
  int dim_ = 0;
  std::vector<Vec> rays_;               // ambient, primitive, sorted lexicographically
  Mat span_basis_;                      // dim x ambient, saturated, canonical
  Mat span_proj_;                       // dim x ambient, span_proj * span_basis^T = I
  std::vector<Vec> rays_span_;          // rays in span coordinates
  std::vector<Vec> facet_normals_span_; // primitive, sorted
  std::vector<Vec> facet_normals_;      // ambient extensions, aligned with span normals
};

// A face of a parent cone: the face as a cone in its own right, plus the
// selector of parent facet normals that vanish on it (the maximal such set).
struct ConeFace {
  std::vector<std::size_t> selector;
  Cone cone;
};

// Intersection of two cones in a common ambient lattice.
Cone intersect_cones(const Cone& a, const Cone& b);

// Do the relative interiors of two cones meet?
bool relative_interiors_meet(const Cone& a, const Cone& b);

}  // namespace conekit
