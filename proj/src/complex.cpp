#include "conekit/complex.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

namespace conekit {

std::size_t groupoid_cap() {
  static std::size_t cap = [] {
    if (const char* env = std::getenv("CONEKIT_GROUPOID_CAP")) {
      char* end = nullptr;
      unsigned long long v = std::strtoull(env, &end, 10);
      if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return static_cast<std::size_t>(1'000'000);
  }();
  return cap;
}

ConeComplex::ArrowData ConeComplex::build_arrow(const std::vector<Cone>& cones, int ambient_rank,
                                                const FaceMapArrow& a, bool validate) {
  if (a.src < 0 || a.src >= static_cast<int>(cones.size()) || a.dst < 0 ||
      a.dst >= static_cast<int>(cones.size()))
    raise(errc::invalid_complex, "face map references a missing cone id");
  if (a.map.rows != ambient_rank || a.map.cols != ambient_rank)
    raise(errc::invalid_complex, "face map matrix has wrong shape");

  const Cone& src = cones[static_cast<std::size_t>(a.src)];
  const Cone& dst = cones[static_cast<std::size_t>(a.dst)];

  std::vector<Vec> image_rays;
  for (const Vec& r : src.rays()) {
    Vec w = a.map.apply(r);
    if (validate && (is_zero_vec(w) || content(w) != 1))
      raise(errc::invalid_complex, "face map does not carry rays to primitive rays");
    image_rays.push_back(w);
  }

  Cone image = Cone::from_generators(ambient_rank, image_rays);
  if (validate) {
    std::vector<Vec> sorted = image_rays;
    std::sort(sorted.begin(), sorted.end());
    if (image.rays() != sorted || image.dim() != src.dim())
      raise(errc::invalid_complex, "face map is not injective on its source cone");
    if (!dst.has_face(image)) raise(errc::invalid_complex, "face map image is not a face of its target");
  }

  // Lattice bijectivity onto the image face, and the inverse on the span.
  Mat basis_images(src.dim(), ambient_rank);
  for (int i = 0; i < src.dim(); ++i) {
    Vec w = a.map.apply(src.span_basis().row(i));
    for (int j = 0; j < ambient_rank; ++j) basis_images.at(i, j) = w[j];
  }
  if (validate) {
    Mat coords(src.dim(), src.dim());
    for (int i = 0; i < src.dim(); ++i) {
      Vec c = image.to_span(basis_images.row(i));
      for (int j = 0; j < src.dim(); ++j) coords.at(i, j) = c[j];
    }
    if (src.dim() > 0 && abs_determinant(coords) != 1)
      raise(errc::invalid_complex, "face map is not a bijection on lattice points of the face");
  }
  // left_inv composes the coordinate map of the image span with the source
  // basis; together with `map` it is the identity on span(src).
  Mat left_inv = src.span_basis().transpose().mul(left_inverse_of_saturated(basis_images));

  return {a.src, a.dst, a.map, std::move(image), std::move(left_inv)};
}

std::vector<FaceMapArrow> ConeComplex::stored_arrows() const {
  std::vector<FaceMapArrow> out;
  out.reserve(arrows_.size());
  for (const auto& a : arrows_) out.push_back({a.src, a.dst, a.map});
  return out;
}

ConeComplex ConeComplex::assemble(Mode mode, int ambient_rank, std::vector<Cone> cones,
                                  std::vector<FaceMapArrow> arrows, std::vector<int>* old_to_new) {
  ConeComplex x;
  x.mode_ = mode;
  x.ambient_rank_ = ambient_rank;

  // Canonical cone order: (dim, rays); stable under input order for duplicates.
  std::vector<int> perm(cones.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[static_cast<std::size_t>(i)] = static_cast<int>(i);
  std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
    return cones[static_cast<std::size_t>(a)] < cones[static_cast<std::size_t>(b)];
  });
  std::vector<int> where(cones.size());
  for (std::size_t i = 0; i < perm.size(); ++i) where[static_cast<std::size_t>(perm[i])] = static_cast<int>(i);
  if (old_to_new) *old_to_new = where;
  x.cones_.reserve(cones.size());
  for (std::size_t i = 0; i < perm.size(); ++i) x.cones_.push_back(cones[static_cast<std::size_t>(perm[i])]);

  std::set<std::pair<std::pair<int, int>, std::vector<Vec>>> seen;
  auto add_arrow = [&](const FaceMapArrow& fm, bool validate) {
    ArrowData d = build_arrow(x.cones_, ambient_rank, fm, validate);
    std::vector<Vec> key_images;
    for (const Vec& r : x.cones_[static_cast<std::size_t>(d.src)].rays()) key_images.push_back(d.map.apply(r));
    if (seen.insert({{d.src, d.dst}, key_images}).second) x.arrows_.push_back(std::move(d));
  };

  for (std::size_t i = 0; i < x.cones_.size(); ++i)
    add_arrow({static_cast<int>(i), static_cast<int>(i), Mat::identity(ambient_rank)}, false);
  for (FaceMapArrow& a : arrows) {
    a.src = where[static_cast<std::size_t>(a.src)];
    a.dst = where[static_cast<std::size_t>(a.dst)];
    add_arrow(a, true);
  }
  return x;
}

ConeComplex ConeComplex::from_fan(int ambient_rank,
                                  const std::vector<std::vector<Vec>>& maximal_cones) {
  std::vector<Cone> listed;
  for (const auto& rays : maximal_cones) listed.push_back(Cone::from_generators(ambient_rank, rays));

  for (std::size_t i = 0; i < listed.size(); ++i)
    for (std::size_t j = i + 1; j < listed.size(); ++j) {
      Cone meet = intersect_cones(listed[i], listed[j]);
      if (!listed[i].has_face(meet) || !listed[j].has_face(meet))
        raise(errc::not_a_fan, "cones " + std::to_string(i) + " and " + std::to_string(j) +
                                   " meet in a non-face");
    }

  std::map<std::vector<Vec>, Cone> all;
  for (const Cone& c : listed)
    for (auto& f : c.faces()) all.emplace(f.cone.rays(), f.cone);

  std::vector<Cone> cones;
  for (auto& [rays, c] : all) cones.push_back(c);
  std::sort(cones.begin(), cones.end());

  std::vector<FaceMapArrow> arrows;
  for (std::size_t i = 0; i < cones.size(); ++i)
    for (std::size_t j = 0; j < cones.size(); ++j) {
      if (i == j) continue;
      if (cones[j].has_face(cones[i]))
        arrows.push_back({static_cast<int>(i), static_cast<int>(j), Mat::identity(ambient_rank)});
    }
  return assemble(Mode::fan, ambient_rank, std::move(cones), std::move(arrows));
}

ConeComplex ConeComplex::from_diagram(int ambient_rank, std::vector<Cone> cones,
                                      std::vector<FaceMapArrow> arrows) {
  ConeComplex x = assemble(Mode::diagram, ambient_rank, std::move(cones), std::move(arrows));
  ValidationReport report = x.validate();
  if (!report.valid) {
    std::string msg = "diagram is not a valid cone complex:";
    for (const auto& d : report.issues) msg += " [" + d.code + "] " + d.message;
    raise(errc::invalid_complex, msg);
  }
  return x;
}

void ConeComplex::check_point(const ComplexPoint& p) const {
  if (p.cone < 0 || p.cone >= size()) raise(errc::not_contained, "point references a missing cone id");
  if (!cone(p.cone).contains(p.point))
    raise(errc::not_contained, "point " + vec_to_string(p.point) + " is not in cone " +
                                   std::to_string(p.cone));
}

std::vector<ComplexPoint> ConeComplex::orbit_impl(const ComplexPoint& p, std::size_t cap) const {
  std::set<ComplexPoint> visited;
  std::vector<ComplexPoint> queue = {p};
  visited.insert(p);
  while (!queue.empty()) {
    ComplexPoint cur = queue.back();
    queue.pop_back();
    for (const ArrowData& a : arrows_) {
      if (a.src == cur.cone) {
        ComplexPoint next{a.dst, a.map.apply(cur.point)};
        if (visited.insert(next).second) {
          if (visited.size() > cap) raise(errc::groupoid_blowup, "point orbit exceeds the resource cap");
          queue.push_back(next);
        }
      }
      if (a.dst == cur.cone && a.image.contains(cur.point)) {
        Vec back = a.left_inv.apply(cur.point);
        if (a.map.apply(back) == cur.point && cone(a.src).contains(back)) {
          ComplexPoint next{a.src, back};
          if (visited.insert(next).second) {
            if (visited.size() > cap) raise(errc::groupoid_blowup, "point orbit exceeds the resource cap");
            queue.push_back(next);
          }
        }
      }
    }
  }
  return {visited.begin(), visited.end()};
}

std::vector<ComplexPoint> ConeComplex::orbit(const ComplexPoint& p) const {
  check_point(p);
  return orbit_impl(p, groupoid_cap());
}

ComplexPoint ConeComplex::canonical_rep(const ComplexPoint& p) const { return orbit(p).front(); }

bool ConeComplex::is_stable_vector(const ComplexPoint& p) const {
  check_point(p);
  if (is_zero_vec(p.point)) raise(errc::zero_vector, "stability of the zero vector");
  std::vector<ComplexPoint> orb = orbit(p);
  for (std::size_t i = 1; i < orb.size(); ++i)
    if (orb[i].cone == orb[i - 1].cone) return false;
  return true;
}

std::vector<PointOrbit> ConeComplex::points_up_to(Int bound) const {
  if (bound < 1) raise(errc::not_contained, "points_up_to requires bound >= 1");
  Int cells = 1;
  for (int j = 0; j < ambient_rank_; ++j) cells = checked_mul(cells, checked_add(checked_mul(2, bound), 1));
  if (checked_mul(cells, static_cast<Int>(size())) > 5'000'000)
    raise(errc::overflow, "points_up_to enumeration box too large");

  std::map<ComplexPoint, std::vector<ComplexPoint>> orbits;  // rep -> members
  std::set<ComplexPoint> visited;
  for (int id = 0; id < size(); ++id) {
    const Cone& c = cone(id);
    Vec v(static_cast<std::size_t>(ambient_rank_), -bound);
    while (true) {
      ComplexPoint p{id, v};
      if (!visited.count(p) && c.contains(v)) {
        std::vector<ComplexPoint> orb = orbit_impl(p, groupoid_cap());
        visited.insert(orb.begin(), orb.end());
        orbits[orb.front()] = orb;
      }
      int j = 0;
      while (j < ambient_rank_ && v[static_cast<std::size_t>(j)] == bound) {
        v[static_cast<std::size_t>(j)] = -bound;
        ++j;
      }
      if (j == ambient_rank_) break;
      ++v[static_cast<std::size_t>(j)];
    }
  }
  std::vector<PointOrbit> out;
  for (auto& [rep, members] : orbits) out.push_back({rep, members});
  return out;
}

std::vector<RayOrbit> ConeComplex::ray_orbits() const {
  if (ray_orbits_) return *ray_orbits_;
  std::map<ComplexPoint, std::vector<ComplexPoint>> orbits;
  for (int id = 0; id < size(); ++id) {
    if (cone(id).dim() != 1) continue;
    ComplexPoint gen{id, cone(id).rays().front()};
    std::vector<ComplexPoint> orb = orbit_impl(gen, groupoid_cap());
    orbits[orb.front()] = orb;
  }
  std::vector<RayOrbit> out;
  for (auto& [rep, members] : orbits) out.push_back({rep, members});
  ray_orbits_ = out;
  return out;
}

int ConeComplex::ray_orbit_index(const ComplexPoint& ray_point) const {
  std::vector<RayOrbit> s = ray_orbits();
  ComplexPoint rep = canonical_rep(ray_point);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i].rep == rep) return static_cast<int>(i);
  raise(errc::internal, "ray generator point is not in any ray orbit");
}

bool ConeComplex::all_ray_points_stable() const {
  for (const RayOrbit& o : ray_orbits())
    for (std::size_t i = 1; i < o.members.size(); ++i)
      if (o.members[i].cone == o.members[i - 1].cone) return false;
  return true;
}

BoundaryLabeling ConeComplex::boundary_map() const {
  for (int id = 0; id < size(); ++id)
    if (!cone(id).is_smooth())
      raise(errc::not_smooth, "cone " + std::to_string(id) + " is not smooth");

  BoundaryLabeling out;
  out.s = ray_orbits();
  std::map<ComplexPoint, int> index;
  for (std::size_t i = 0; i < out.s.size(); ++i) index[out.s[i].rep] = static_cast<int>(i);

  out.labels_per_cone.resize(static_cast<std::size_t>(size()));
  for (int id = 0; id < size(); ++id) {
    std::vector<int> labels;
    for (const Vec& r : cone(id).rays()) {
      ComplexPoint rep = canonical_rep({id, r});
      auto it = index.find(rep);
      if (it == index.end()) raise(errc::internal, "ray of a cone has no orbit label");
      labels.push_back(it->second);
    }
    std::vector<int> sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i)
      if (sorted[i] == sorted[i - 1])
        raise(errc::unstable_ray, "cone " + std::to_string(id) +
                                      " carries two rays with the same label " +
                                      std::to_string(sorted[i]) + "; witness ray " +
                                      vec_to_string(out.s[static_cast<std::size_t>(sorted[i])].rep.point));
    out.labels_per_cone[static_cast<std::size_t>(id)] = sorted;
  }
  return out;
}

const std::vector<ConeComplex::ClosureArrow>& ConeComplex::closure() const {
  if (closure_) return *closure_;
  std::set<std::pair<std::pair<int, int>, std::vector<Vec>>> seen;
  std::vector<ClosureArrow> result;
  auto key_of = [&](int src, const Mat& m) {
    std::vector<Vec> images;
    for (const Vec& r : cone(src).rays()) images.push_back(m.apply(r));
    return images;
  };
  std::vector<ClosureArrow> queue;
  for (const ArrowData& a : arrows_) {
    if (seen.insert({{a.src, a.dst}, key_of(a.src, a.map)}).second) {
      result.push_back({a.src, a.dst, a.map});
      queue.push_back({a.src, a.dst, a.map});
    }
  }
  while (!queue.empty()) {
    ClosureArrow cur = queue.back();
    queue.pop_back();
    for (const ArrowData& a : arrows_) {
      if (a.src != cur.dst) continue;
      Mat comp = a.map.mul(cur.map);
      if (seen.insert({{cur.src, a.dst}, key_of(cur.src, comp)}).second) {
        if (seen.size() > groupoid_cap())
          raise(errc::groupoid_blowup, "composition closure exceeds the resource cap");
        result.push_back({cur.src, a.dst, comp});
        queue.push_back({cur.src, a.dst, comp});
      }
    }
  }
  std::sort(result.begin(), result.end(), [](const ClosureArrow& a, const ClosureArrow& b) {
    if (a.src != b.src) return a.src < b.src;
    if (a.dst != b.dst) return a.dst < b.dst;
    return a.map.a < b.map.a;
  });
  closure_ = std::move(result);
  return *closure_;
}

std::vector<Mat> ConeComplex::closure_maps(int src, int dst) const {
  std::vector<Mat> out;
  std::set<std::vector<Vec>> seen;
  for (const ClosureArrow& a : closure())
    if (a.src == src && a.dst == dst) {
      std::vector<Vec> images;
      for (const Vec& r : cone(src).rays()) images.push_back(a.map.apply(r));
      if (seen.insert(images).second) out.push_back(a.map);
    }
  return out;
}

std::vector<std::pair<int, std::vector<Vec>>> ConeComplex::full_morphisms_from(int src) const {
  using State = std::pair<int, std::vector<Vec>>;
  std::set<State> visited;
  std::vector<State> queue;
  State start{src, cone(src).rays()};
  visited.insert(start);
  queue.push_back(start);
  while (!queue.empty()) {
    State cur = queue.back();
    queue.pop_back();
    for (const ArrowData& a : arrows_) {
      if (a.src == cur.first) {
        std::vector<Vec> next;
        next.reserve(cur.second.size());
        for (const Vec& v : cur.second) next.push_back(a.map.apply(v));
        State s{a.dst, next};
        if (visited.insert(s).second) {
          if (visited.size() > groupoid_cap())
            raise(errc::groupoid_blowup, "germ groupoid search exceeds the resource cap");
          queue.push_back(s);
        }
      }
      if (a.dst == cur.first) {
        bool inside = true;
        for (const Vec& v : cur.second) inside = inside && a.image.contains(v);
        if (!inside) continue;
        std::vector<Vec> back;
        bool exact = true;
        for (const Vec& v : cur.second) {
          Vec u = a.left_inv.apply(v);
          exact = exact && a.map.apply(u) == v && cone(a.src).contains(u);
          back.push_back(u);
        }
        if (!exact) continue;
        State s{a.src, back};
        if (visited.insert(s).second) {
          if (visited.size() > groupoid_cap())
            raise(errc::groupoid_blowup, "germ groupoid search exceeds the resource cap");
          queue.push_back(s);
        }
      }
    }
  }
  return {visited.begin(), visited.end()};
}

bool ConeComplex::is_faithful() const {
  for (int id = 0; id < size(); ++id) {
    for (const auto& [dst, tuple] : full_morphisms_from(id))
      if (dst == id && tuple != cone(id).rays()) return false;
  }
  return true;
}

std::vector<std::vector<int>> ConeComplex::cone_orbits() const {
  std::vector<int> cls(static_cast<std::size_t>(size()), -1);
  int next = 0;
  for (int id = 0; id < size(); ++id) {
    if (cls[static_cast<std::size_t>(id)] >= 0) continue;
    cls[static_cast<std::size_t>(id)] = next;
    for (const auto& [dst, tuple] : full_morphisms_from(id)) {
      // iso onto a face of equal dimension = onto the whole cone
      if (cone(dst).dim() == cone(id).dim() && cls[static_cast<std::size_t>(dst)] < 0)
        cls[static_cast<std::size_t>(dst)] = next;
      (void)tuple;
    }
    ++next;
  }
  std::vector<std::vector<int>> orbits(static_cast<std::size_t>(next));
  for (int id = 0; id < size(); ++id) orbits[static_cast<std::size_t>(cls[static_cast<std::size_t>(id)])].push_back(id);
  return orbits;
}

std::vector<int> ConeComplex::maximal_cones() const {
  std::vector<bool> is_proper_face(static_cast<std::size_t>(size()), false);
  for (const ClosureArrow& a : closure())
    if (cone(a.dst).dim() > cone(a.src).dim()) is_proper_face[static_cast<std::size_t>(a.src)] = true;
  std::vector<int> out;
  for (int id = 0; id < size(); ++id)
    if (!is_proper_face[static_cast<std::size_t>(id)]) out.push_back(id);
  return out;
}

ValidationReport ConeComplex::validate() const {
  ValidationReport report;
  auto issue = [&](const std::string& code, const std::string& msg) {
    report.valid = false;
    report.issues.push_back({code, msg});
  };

  // Cones must be canonical strongly convex cones.
  for (int id = 0; id < size(); ++id) {
    try {
      Cone rebuilt = Cone::from_generators(ambient_rank_, cone(id).rays());
      if (!(rebuilt == cone(id)))
        issue("non_canonical_rays", "cone " + std::to_string(id) + " is not minimally generated");
    } catch (const error& e) {
      issue("bad_cone", "cone " + std::to_string(id) + ": " + e.what());
    }
  }

  // Arrows must be valid face maps.
  for (const ArrowData& a : arrows_) {
    try {
      build_arrow(cones_, ambient_rank_, {a.src, a.dst, a.map}, true);
    } catch (const error& e) {
      issue("bad_face_map", "face map " + std::to_string(a.src) + " -> " + std::to_string(a.dst) +
                                ": " + e.what());
    }
  }
  if (!report.valid) return report;

  // Face-completeness against the composition closure.
  try {
    for (int id = 0; id < size(); ++id) {
      for (auto& f : cone(id).faces()) {
        bool found = false;
        for (const ClosureArrow& a : closure()) {
          if (a.dst != id) continue;
          std::vector<Vec> images;
          for (const Vec& r : cone(a.src).rays()) images.push_back(a.map.apply(r));
          std::sort(images.begin(), images.end());
          if (images == f.cone.rays()) {
            found = true;
            break;
          }
        }
        if (!found)
          issue("face_incomplete", "face " + vec_to_string(f.cone.rays().empty() ? Vec(static_cast<std::size_t>(ambient_rank_), 0)
                                                                                 : f.cone.rays().front()) +
                                       "... of cone " + std::to_string(id) +
                                       " is not the image of any face map");
      }
    }
  } catch (const error& e) {
    issue("closure", e.what());
  }

  // Embedded fans: pairwise intersections must be faces.
  if (mode_ == Mode::fan) {
    for (int i = 0; i < size() && report.valid; ++i)
      for (int j = i + 1; j < size(); ++j) {
        Cone meet = intersect_cones(cone(i), cone(j));
        if (!cone(i).has_face(meet) || !cone(j).has_face(meet)) {
          issue("not_a_fan", "cones " + std::to_string(i) + " and " + std::to_string(j) +
                                 " meet in a non-face");
          break;
        }
      }
  }
  return report;
}

}  // namespace conekit
