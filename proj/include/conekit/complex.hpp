#pragma once

#include <optional>
#include <string>
#include <vector>

#include "conekit/cone.hpp"

namespace conekit {

// A lattice point of the complex: a point of one chart cone. Two points are
// equivalent when the gluing groupoid carries one to the other.
struct ComplexPoint {
  int cone = 0;
  Vec point;

  bool operator==(const ComplexPoint& o) const { return cone == o.cone && point == o.point; }
  bool operator<(const ComplexPoint& o) const {
    if (cone != o.cone) return cone < o.cone;
    return point < o.point;
  }
};

struct FaceMapArrow {
  int src = 0;
  int dst = 0;
  Mat map;  // ambient_rank x ambient_rank lattice map
};

struct Diagnostic {
  std::string code;
  std::string message;
};

struct ValidationReport {
  bool valid = true;
  std::vector<Diagnostic> issues;
};

struct RayOrbit {
  ComplexPoint rep;                  // canonical representative of the generator point
  std::vector<ComplexPoint> members; // orbit, sorted
};

struct PointOrbit {
  ComplexPoint rep;
  std::vector<ComplexPoint> members;
};

struct BoundaryLabeling {
  std::vector<RayOrbit> s;                      // the label set S
  std::vector<std::vector<int>> labels_per_cone; // for each cone, sorted S-indices of its rays
};

// Generalized cone complex: a diagram of cones and face maps over one ambient
// lattice, possibly with self-gluing (monodromy). Cones are stored sorted by
// (dimension, rays); identity arrows are always present.
class ConeComplex {
 public:
  enum class Mode { fan, diagram };

  ConeComplex() = default;

  // Embedded-fan input: gluing inferred from intersections; raises not_a_fan
  // if two listed cones meet in a non-face.
  static ConeComplex from_fan(int ambient_rank, const std::vector<std::vector<Vec>>& maximal_cones);

  // Explicit diagram input; validates and raises invalid_complex on failure.
  static ConeComplex from_diagram(int ambient_rank, std::vector<Cone> cones,
                                  std::vector<FaceMapArrow> arrows);

  // Internal assembly for subdivision outputs: arrows are trusted to be valid.
  // old_to_new, when given, receives the canonical reindexing of the cones.
  static ConeComplex assemble(Mode mode, int ambient_rank, std::vector<Cone> cones,
                              std::vector<FaceMapArrow> arrows,
                              std::vector<int>* old_to_new = nullptr);

  Mode mode() const { return mode_; }
  int ambient_rank() const { return ambient_rank_; }
  int size() const { return static_cast<int>(cones_.size()); }
  const Cone& cone(int id) const { return cones_[static_cast<std::size_t>(id)]; }
  const std::vector<Cone>& cones() const { return cones_; }
  std::vector<FaceMapArrow> stored_arrows() const;  // includes identities

  ValidationReport validate() const;
  bool is_faithful() const;

  void check_point(const ComplexPoint& p) const;  // in-range + containment

  std::vector<ComplexPoint> orbit(const ComplexPoint& p) const;  // sorted
  ComplexPoint canonical_rep(const ComplexPoint& p) const;
  bool is_stable_vector(const ComplexPoint& p) const;  // zero_vector on p = 0

  std::vector<PointOrbit> points_up_to(Int bound) const;

  std::vector<RayOrbit> ray_orbits() const;
  // Index into ray_orbits() of the orbit of a ray generator point; the point
  // must be a primitive generator of a 1-dimensional face of its cone.
  int ray_orbit_index(const ComplexPoint& ray_point) const;
  bool all_ray_points_stable() const;

  BoundaryLabeling boundary_map() const;  // not_smooth / unstable_ray

  std::vector<int> maximal_cones() const;

  // Isomorphism classes of cones under the gluing groupoid; each entry is the
  // sorted list of cone ids in one class.
  std::vector<std::vector<int>> cone_orbits() const;

  // All full-domain germ morphisms out of `src`: (dst cone, images of src rays).
  std::vector<std::pair<int, std::vector<Vec>>> full_morphisms_from(int src) const;

  // Composition closure of the stored arrows (capped; groupoid_blowup beyond).
  struct ClosureArrow {
    int src, dst;
    Mat map;
  };
  const std::vector<ClosureArrow>& closure() const;

  // Closure arrows from src to dst (possibly several under monodromy).
  std::vector<Mat> closure_maps(int src, int dst) const;

 private:
  struct ArrowData {
    int src = 0, dst = 0;
    Mat map;
    Cone image;    // image face inside cone(dst)
    Mat left_inv;  // inverse on the span of cone(src)
  };

  static ArrowData build_arrow(const std::vector<Cone>& cones, int ambient_rank,
                               const FaceMapArrow& a, bool validate);

  std::vector<ComplexPoint> orbit_impl(const ComplexPoint& p, std::size_t cap) const;

  Mode mode_ = Mode::fan;
  int ambient_rank_ = 0;
  std::vector<Cone> cones_;
  std::vector<ArrowData> arrows_;
  mutable std::optional<std::vector<ClosureArrow>> closure_;
  mutable std::optional<std::vector<RayOrbit>> ray_orbits_;
};

std::size_t groupoid_cap();

}  // namespace conekit
