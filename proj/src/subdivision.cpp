#include "conekit/subdivision.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace conekit {

namespace {

constexpr int kMaxPipelineSteps = 100000;

// Inverse of an injective lattice map on the span of a source cone.
Vec invert_on_span(const Cone& src, const Mat& map, const Vec& image_point) {
  Mat basis_images(src.dim(), map.rows);
  for (int i = 0; i < src.dim(); ++i) {
    Vec w = map.apply(src.span_basis().row(i));
    for (int j = 0; j < map.rows; ++j) basis_images.at(i, j) = w[j];
  }
  Mat p = left_inverse_of_saturated(basis_images);
  Vec v = src.span_basis().transpose().mul(p).apply(image_point);
  if (map.apply(v) != image_point)
    raise(errc::internal, "point does not lift through the subdivision map");
  return v;
}

// Linear functional on the span of the chart agreeing with prescribed values
// at the rays of a full-dimensional smooth piece; returned in chart span
// coordinates.
Vec solve_piece_functional(const Cone& chart, const Cone& piece, const std::vector<Int>& values) {
  int d = chart.dim();
  Mat rows(d, d);
  for (int i = 0; i < d; ++i) {
    Vec c = chart.to_span(piece.rays()[static_cast<std::size_t>(i)]);
    for (int j = 0; j < d; ++j) rows.at(i, j) = c[j];
  }
  Vec rhs(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) rhs[static_cast<std::size_t>(i)] = values[static_cast<std::size_t>(i)];
  auto sol = solve_square_rational(rows, rhs);
  if (!sol) raise(errc::internal, "piece rays do not span the chart");
  Vec ell(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    if (!(*sol)[static_cast<std::size_t>(j)].is_integer())
      raise(errc::not_smooth, "support functional is not integral on the piece");
    ell[static_cast<std::size_t>(j)] = (*sol)[static_cast<std::size_t>(j)].num;
  }
  return ell;
}

std::vector<Int> sorted_multiplicities(const ConeComplex& x) {
  std::vector<Int> mults;
  for (int id : x.maximal_cones())
    if (x.cone(id).is_simplicial()) mults.push_back(x.cone(id).multiplicity());
  std::sort(mults.rbegin(), mults.rend());
  return mults;
}

}  // namespace

ComplexPoint SubdivisionMap::image_point(const ComplexPoint& p) const {
  source.check_point(p);
  const auto& [tc, m] = assignment[static_cast<std::size_t>(p.cone)];
  return {tc, m.apply(p.point)};
}

ComplexPoint SubdivisionMap::ray_image_key(const ComplexPoint& ray_point) const {
  return target.canonical_rep(image_point(ray_point));
}

SubdivisionMap identity_subdivision(const ConeComplex& x) {
  SubdivisionMap f;
  f.source = x;
  f.target = x;
  f.assignment.reserve(static_cast<std::size_t>(x.size()));
  for (int i = 0; i < x.size(); ++i) f.assignment.push_back({i, Mat::identity(x.ambient_rank())});
  return f;
}

SubdivisionMap star_subdivide(const ConeComplex& x, const ComplexPoint& center) {
  x.check_point(center);
  if (is_zero_vec(center.point)) raise(errc::zero_vector, "star subdivision at the zero vector");

  // Stability of the center: the orbit must meet every chart at most once.
  std::vector<ComplexPoint> orb = x.orbit(center);
  std::map<int, Vec> lifts;
  for (const ComplexPoint& p : orb) {
    auto [it, fresh] = lifts.emplace(p.cone, p.point);
    if (!fresh && it->second != p.point)
      raise(errc::unstable_center,
            "center lifts to chart " + std::to_string(p.cone) + " at both " +
                vec_to_string(it->second) + " and " + vec_to_string(p.point));
  }

  StarStep step;
  step.center = orb.front();
  step.phase = "star";

  // A center on an existing ray regenerates every chart: no-op.
  const Cone& rep_cone = x.cone(step.center.cone);
  if (rep_cone.minimal_face(step.center.point).cone.dim() == 1) {
    SubdivisionMap f = identity_subdivision(x);
    f.history.push_back(step);
    f.psi.emplace_back();
    return f;
  }

  step.created_ray = true;
  step.new_ray = x.canonical_rep({step.center.cone, primitive(step.center.point)});
  for (auto& [cid, p] : lifts) step.affected_targets.push_back(cid);

  // Per-chart subdivisions, face-closed.
  std::vector<std::map<std::vector<Vec>, Cone>> sigma(static_cast<std::size_t>(x.size()));
  for (int i = 0; i < x.size(); ++i) {
    auto& bucket = sigma[static_cast<std::size_t>(i)];
    auto lift = lifts.find(i);
    if (lift == lifts.end()) {
      for (auto& f : x.cone(i).faces()) bucket.emplace(f.cone.rays(), f.cone);
      continue;
    }
    const Vec& p = lift->second;
    for (auto& f : x.cone(i).faces()) {
      if (f.cone.contains(p)) continue;
      std::vector<Vec> gens = f.cone.rays();
      gens.push_back(p);
      Cone piece = Cone::from_generators(x.ambient_rank(), gens);
      for (auto& pf : piece.faces()) bucket.emplace(pf.cone.rays(), pf.cone);
    }
  }

  SubdivisionMap f;
  f.target = x;
  f.history.push_back(step);

  if (x.mode() == ConeComplex::Mode::fan) {
    std::map<std::vector<Vec>, Cone> all;
    for (auto& bucket : sigma)
      for (auto& [rays, c] : bucket) all.emplace(rays, c);
    std::vector<Cone> cones;
    for (auto& [rays, c] : all) cones.push_back(c);
    std::sort(cones.begin(), cones.end());
    std::vector<FaceMapArrow> arrows;
    for (std::size_t i = 0; i < cones.size(); ++i)
      for (std::size_t j = 0; j < cones.size(); ++j)
        if (i != j && cones[j].has_face(cones[i]))
          arrows.push_back({static_cast<int>(i), static_cast<int>(j), Mat::identity(x.ambient_rank())});
    f.source = ConeComplex::assemble(ConeComplex::Mode::fan, x.ambient_rank(), cones, arrows);
    for (int c = 0; c < f.source.size(); ++c) {
      int tc = -1;
      for (int t = 0; t < x.size() && tc < 0; ++t) {
        bool inside = true;
        for (const Vec& r : f.source.cone(c).rays()) inside = inside && x.cone(t).contains(r);
        if (inside && f.source.cone(c).dim() <= x.cone(t).dim()) tc = t;
      }
      if (tc < 0) raise(errc::internal, "subdivision piece escapes every chart");
      f.assignment.push_back({tc, Mat::identity(x.ambient_rank())});
    }
  } else {
    // Pair construction: one source cone per (chart, piece).
    std::vector<Cone> cones;
    std::vector<std::pair<int, std::vector<Vec>>> tags;
    std::map<std::pair<int, std::vector<Vec>>, int> index;
    for (int i = 0; i < x.size(); ++i)
      for (auto& [rays, c] : sigma[static_cast<std::size_t>(i)]) {
        index[{i, rays}] = static_cast<int>(cones.size());
        cones.push_back(c);
        tags.push_back({i, rays});
      }
    std::vector<FaceMapArrow> arrows;
    for (int i = 0; i < x.size(); ++i) {
      auto& bucket = sigma[static_cast<std::size_t>(i)];
      for (auto& [rays_a, ca] : bucket)
        for (auto& [rays_b, cb] : bucket)
          if (rays_a != rays_b && cb.has_face(ca))
            arrows.push_back({index.at({i, rays_a}), index.at({i, rays_b}), Mat::identity(x.ambient_rank())});
    }
    for (const FaceMapArrow& a : x.stored_arrows()) {
      if (a.src == a.dst && a.map == Mat::identity(x.ambient_rank())) continue;
      for (auto& [rays, c] : sigma[static_cast<std::size_t>(a.src)]) {
        std::vector<Vec> image_rays;
        for (const Vec& r : c.rays()) image_rays.push_back(a.map.apply(r));
        Cone image = Cone::from_generators(x.ambient_rank(), image_rays);
        auto it = index.find({a.dst, image.rays()});
        if (it == index.end())
          raise(errc::internal, "star subdivision is incompatible with a face map");
        arrows.push_back({index.at({a.src, rays}), it->second, a.map});
      }
    }
    std::vector<int> old_to_new;
    f.source = ConeComplex::assemble(ConeComplex::Mode::diagram, x.ambient_rank(), cones, arrows,
                                     &old_to_new);
    f.assignment.assign(static_cast<std::size_t>(f.source.size()), {0, Mat::identity(x.ambient_rank())});
    for (std::size_t old = 0; old < tags.size(); ++old)
      f.assignment[static_cast<std::size_t>(old_to_new[old])] = {tags[old].first,
                                                                 Mat::identity(x.ambient_rank())};
  }

  std::map<ComplexPoint, Rat> table;
  table[step.new_ray] = Rat(1);
  f.psi.push_back(std::move(table));
  return f;
}

SubdivisionMap compose(const SubdivisionMap& later, const SubdivisionMap& earlier) {
  SubdivisionMap f;
  f.source = later.source;
  f.target = earlier.target;
  for (int c = 0; c < later.source.size(); ++c) {
    const auto& [yc, m1] = later.assignment[static_cast<std::size_t>(c)];
    const auto& [xc, m2] = earlier.assignment[static_cast<std::size_t>(yc)];
    f.assignment.push_back({xc, m2.mul(m1)});
  }

  f.history = earlier.history;
  f.psi = earlier.psi;

  // Extend the earlier tables to the rays of the new source: evaluate each
  // step's support function at the ray image, linearly over its chart in the
  // intermediate complex.
  for (const RayOrbit& ro : later.source.ray_orbits()) {
    ComplexPoint y_img = later.image_point(ro.rep);
    const Cone& ychart = later.target.cone(y_img.cone);
    Cone face = ychart.minimal_face(y_img.point).cone;
    std::vector<Rat> coeffs = face.expand_nonneg(y_img.point);
    ComplexPoint key = f.ray_image_key(ro.rep);
    for (std::size_t t = 0; t < f.psi.size(); ++t) {
      if (f.psi[t].empty()) continue;
      Rat value(0);
      for (std::size_t i = 0; i < face.rays().size(); ++i) {
        if (coeffs[i].is_zero()) continue;
        ComplexPoint rk = earlier.ray_image_key({y_img.cone, face.rays()[i]});
        auto it = f.psi[t].find(rk);
        if (it != f.psi[t].end()) value = value + coeffs[i] * it->second;
      }
      if (!value.is_zero()) f.psi[t][key] = value;
    }
  }
  // Drop stale keys: keep only entries at current source ray images.
  {
    std::set<ComplexPoint> live;
    for (const RayOrbit& ro : f.source.ray_orbits()) live.insert(f.ray_image_key(ro.rep));
    for (auto& table : f.psi) {
      for (auto it = table.begin(); it != table.end();) {
        if (!live.count(it->first))
          it = table.erase(it);
        else
          ++it;
      }
    }
  }

  for (std::size_t s = 0; s < later.history.size(); ++s) {
    StarStep step = later.history[s];
    step.center = f.target.canonical_rep(earlier.image_point(step.center));
    if (step.created_ray) step.new_ray = f.target.canonical_rep(earlier.image_point(step.new_ray));
    std::set<int> affected;
    for (int yc : step.affected_targets) affected.insert(earlier.assignment[static_cast<std::size_t>(yc)].first);
    step.affected_targets.assign(affected.begin(), affected.end());
    f.history.push_back(step);
  }
  for (std::size_t s = 0; s < later.psi.size(); ++s) {
    std::map<ComplexPoint, Rat> table;
    for (const auto& [key, value] : later.psi[s])
      table[f.target.canonical_rep(earlier.image_point(key))] = value;
    f.psi.push_back(std::move(table));
  }
  return f;
}

SubdivisionMap barycentric(const ConeComplex& x) {
  SubdivisionMap current = identity_subdivision(x);
  int maxdim = 0;
  for (int i = 0; i < x.size(); ++i) maxdim = std::max(maxdim, x.cone(i).dim());
  for (int d = maxdim; d >= 2; --d) {
    for (int i = 0; i < x.size(); ++i) {
      if (x.cone(i).dim() != d) continue;
      Vec b(static_cast<std::size_t>(x.ambient_rank()), 0);
      for (const Vec& r : x.cone(i).rays()) b = vec_add(b, r);
      ComplexPoint lift = lift_point(current, {i, b});
      const Cone& c = current.source.cone(lift.cone);
      if (c.minimal_face(lift.point).cone.dim() == 1) continue;  // orbit already subdivided
      SubdivisionMap step = star_subdivide(current.source, lift);
      step.history.back().phase = "barycentric";
      current = compose(step, current);
    }
  }
  return current;
}

SubdivisionMap resolve(const ConeComplex& x, const ResolveOptions& opts) {
  bool skip_barycentric = opts.barycentric == ResolveOptions::Barycentric::never ||
                          (opts.barycentric == ResolveOptions::Barycentric::automatic &&
                           x.all_ray_points_stable());
  SubdivisionMap current = skip_barycentric ? identity_subdivision(x) : barycentric(x);
  std::vector<std::vector<Int>> trace = {sorted_multiplicities(current.source)};

  int steps = 0;

  // Make every cone simplicial: star subdivisions at barycenters of
  // non-simplicial cones, lowest dimension first.
  while (true) {
    int bad = -1;
    for (int i = 0; i < current.source.size() && bad < 0; ++i)
      if (!current.source.cone(i).is_simplicial()) bad = i;
    if (bad < 0) break;
    if (++steps > kMaxPipelineSteps) raise(errc::internal, "resolution does not terminate");
    Vec b(static_cast<std::size_t>(current.source.ambient_rank()), 0);
    for (const Vec& r : current.source.cone(bad).rays()) b = vec_add(b, r);
    SubdivisionMap step = star_subdivide(current.source, {bad, b});
    step.history.back().phase = "simplicial";
    current = compose(step, current);
    trace.push_back(sorted_multiplicities(current.source));
  }

  // Multiplicity descent: subdivide the least chart of maximal multiplicity
  // at the Hilbert basis element minimizing the resulting local multiplicity.
  while (true) {
    std::vector<int> maximal = current.source.maximal_cones();
    Int worst = 1;
    int chart = -1;
    for (int id : maximal) {
      Int m = current.source.cone(id).multiplicity();
      if (m > worst) {
        worst = m;
        chart = id;
      }
    }
    if (chart < 0) break;
    if (++steps > kMaxPipelineSteps) raise(errc::internal, "resolution does not terminate");

    const Cone& sigma = current.source.cone(chart);
    std::vector<Vec> candidates;
    for (const Vec& h : sigma.hilbert_basis())
      if (std::find(sigma.rays().begin(), sigma.rays().end(), h) == sigma.rays().end())
        candidates.push_back(h);
    if (candidates.empty()) raise(errc::internal, "singular cone with no interior Hilbert element");

    Vec best;
    Int best_local = 0;
    for (const Vec& h : candidates) {
      Vec hs = sigma.to_span(h);
      Int local = 0;
      for (int i = 0; i < sigma.dim(); ++i) {
        std::vector<Vec> rows;
        for (int j = 0; j < sigma.dim(); ++j)
          rows.push_back(j == i ? hs : sigma.to_span(sigma.rays()[static_cast<std::size_t>(j)]));
        local = std::max(local, abs_determinant(Mat::from_rows(rows, sigma.dim())));
      }
      if (best.empty() || local < best_local || (local == best_local && h < best)) {
        best = h;
        best_local = local;
      }
    }

    SubdivisionMap step = star_subdivide(current.source, {chart, best});
    step.history.back().phase = "multiplicity";
    current = compose(step, current);

    std::vector<Int> now = sorted_multiplicities(current.source);
    if (!(now < trace.back())) raise(errc::internal, "multiplicity multiset did not decrease");
    trace.push_back(std::move(now));
  }

  for (int i = 0; i < current.source.size(); ++i)
    if (!current.source.cone(i).is_smooth()) raise(errc::internal, "resolution output is not smooth");
  if (!current.source.all_ray_points_stable())
    raise(errc::unstable_ray, "resolution output has an unstable ray");
  current.source.boundary_map();  // raises if the labeling is not strict
  current.multiplicity_trace = std::move(trace);
  return current;
}

std::vector<EmbeddedPiece> embedded_pieces(const SubdivisionMap& f, int target_cone) {
  std::vector<EmbeddedPiece> pieces;
  std::set<std::vector<Vec>> seen;
  for (int c = 0; c < f.source.size(); ++c) {
    const auto& [tc, m] = f.assignment[static_cast<std::size_t>(c)];
    for (const Mat& e : f.target.closure_maps(tc, target_cone)) {
      Mat composite = e.mul(m);
      std::vector<Vec> image_rays;
      for (const Vec& r : f.source.cone(c).rays()) image_rays.push_back(composite.apply(r));
      Cone image = Cone::from_generators(f.target.ambient_rank(), image_rays);
      if (seen.insert(image.rays()).second)
        pieces.push_back({c, composite, std::move(image)});
    }
  }
  return pieces;
}

ComplexPoint lift_point(const SubdivisionMap& f, const ComplexPoint& target_point) {
  f.target.check_point(target_point);
  for (const EmbeddedPiece& piece : embedded_pieces(f, target_point.cone)) {
    if (!piece.image.contains_in_relative_interior(target_point.point)) continue;
    Vec v = invert_on_span(f.source.cone(piece.source_cone), piece.embed, target_point.point);
    if (!f.source.cone(piece.source_cone).contains(v))
      raise(errc::internal, "lift of a target point escapes its source cone");
    return {piece.source_cone, v};
  }
  raise(errc::internal, "target point lies in the relative interior of no piece");
}

std::vector<int> exceptional_rays(const SubdivisionMap& f) {
  std::vector<int> out;
  std::vector<RayOrbit> orbits = f.source.ray_orbits();
  for (std::size_t i = 0; i < orbits.size(); ++i) {
    ComplexPoint img = f.image_point(orbits[i].rep);
    Vec dir = primitive(img.point);
    const auto& chart_rays = f.target.cone(img.cone).rays();
    if (std::find(chart_rays.begin(), chart_rays.end(), dir) == chart_rays.end())
      out.push_back(static_cast<int>(i));
  }
  return out;
}

SubdivisionCheck is_subdivision(const SubdivisionMap& f, Int point_bound) {
  auto fail = [](const std::string& reason, std::optional<ComplexPoint> witness) {
    SubdivisionCheck c;
    c.ok = false;
    c.reason = reason;
    c.witness = std::move(witness);
    return c;
  };

  for (int t = 0; t < f.target.size(); ++t) {
    const Cone& chart = f.target.cone(t);
    int d = chart.dim();
    std::vector<EmbeddedPiece> pieces = embedded_pieces(f, t);

    for (const EmbeddedPiece& p : pieces)
      for (const Vec& r : p.image.rays())
        if (!chart.contains(r))
          return fail("piece of chart " + std::to_string(t) + " is not contained in it",
                      ComplexPoint{t, r});

    if (d == 0) {
      bool has_zero = false;
      for (const EmbeddedPiece& p : pieces) has_zero = has_zero || p.image.is_zero_cone();
      if (!has_zero)
        return fail("zero chart has no piece", ComplexPoint{t, Vec(static_cast<std::size_t>(f.target.ambient_rank()), 0)});
      continue;
    }

    std::vector<const EmbeddedPiece*> full;
    for (const EmbeddedPiece& p : pieces)
      if (p.image.dim() == d) full.push_back(&p);
    if (full.empty()) {
      Vec sample(static_cast<std::size_t>(f.target.ambient_rank()), 0);
      for (const Vec& r : chart.rays()) sample = vec_add(sample, r);
      return fail("chart " + std::to_string(t) + " is not covered", ComplexPoint{t, sample});
    }

    for (std::size_t i = 0; i < pieces.size(); ++i)
      for (std::size_t j = i + 1; j < pieces.size(); ++j)
        if (relative_interiors_meet(pieces[i].image, pieces[j].image)) {
          Cone meet = intersect_cones(pieces[i].image, pieces[j].image);
          Vec sample(static_cast<std::size_t>(f.target.ambient_rank()), 0);
          for (const Vec& r : meet.rays()) sample = vec_add(sample, r);
          return fail("pieces overlap in chart " + std::to_string(t), ComplexPoint{t, sample});
        }

    // Every lower-dimensional piece is a face of some bigger piece.
    for (const EmbeddedPiece& p : pieces) {
      if (p.image.dim() == d) continue;
      bool attached = false;
      for (const EmbeddedPiece& q : pieces)
        attached = attached || (q.image.dim() > p.image.dim() && q.image.has_face(p.image));
      if (!attached)
        return fail("stray low-dimensional piece in chart " + std::to_string(t),
                    ComplexPoint{t, p.image.rays().empty()
                                        ? Vec(static_cast<std::size_t>(f.target.ambient_rank()), 0)
                                        : p.image.rays().front()});
    }

    // Wall condition: every facet of a full piece lies on the chart boundary
    // or is shared with exactly one other full piece.
    for (const EmbeddedPiece* p : full) {
      for (auto& w : p->image.facets()) {
        bool on_boundary = false;
        for (const Vec& xi : chart.facet_normals_span()) {
          bool vanishes = true;
          for (const Vec& r : w.cone.rays()) vanishes = vanishes && checked_dot(xi, chart.to_span(r)) == 0;
          on_boundary = on_boundary || vanishes;
        }
        if (on_boundary) continue;
        int shared = 0;
        for (const EmbeddedPiece* q : full)
          if (q != p && q->image.has_face(w.cone)) ++shared;
        if (shared != 1) {
          Vec sample(static_cast<std::size_t>(f.target.ambient_rank()), 0);
          for (const Vec& r : w.cone.rays()) sample = vec_add(sample, r);
          return fail("interior wall of chart " + std::to_string(t) + " is shared by " +
                          std::to_string(shared + 1) + " pieces",
                      ComplexPoint{t, sample});
        }
      }
    }

    // Lattice point census: every chart point in the box meets exactly one
    // relative interior.
    if (point_bound >= 1) {
      Int cells = 1;
      for (int j = 0; j < f.target.ambient_rank(); ++j)
        cells = checked_mul(cells, checked_add(checked_mul(2, point_bound), 1));
      if (cells <= 500'000) {
        Vec v(static_cast<std::size_t>(f.target.ambient_rank()), -point_bound);
        while (true) {
          if (chart.contains(v)) {
            int hits = 0;
            for (const EmbeddedPiece& p : pieces)
              if (p.image.contains_in_relative_interior(v)) ++hits;
            if (hits != 1)
              return fail("lattice point lies in " + std::to_string(hits) +
                              " relative interiors in chart " + std::to_string(t),
                          ComplexPoint{t, v});
          }
          int j = 0;
          while (j < f.target.ambient_rank() && v[static_cast<std::size_t>(j)] == point_bound) {
            v[static_cast<std::size_t>(j)] = -point_bound;
            ++j;
          }
          if (j == f.target.ambient_rank()) break;
          ++v[static_cast<std::size_t>(j)];
        }
      }
    }
  }
  return {};
}

PLDivisor pullback(const SubdivisionMap& f, const PLDivisor& d_on_target) {
  PLDivisor out;
  std::vector<RayOrbit> src_orbits = f.source.ray_orbits();

  for (std::size_t i = 0; i < src_orbits.size(); ++i) {
    ComplexPoint img = f.image_point(src_orbits[i].rep);
    const Cone& chart = f.target.cone(img.cone);
    Cone face = chart.minimal_face(img.point).cone;

    // Values -m at the rays of the minimal face.
    std::vector<Int> ray_values;
    for (const Vec& r : face.rays())
      ray_values.push_back(checked_neg(d_on_target.at(f.target.ray_orbit_index({img.cone, r}))));

    // The values must extend to a single linear functional on the face.
    int fd = face.dim();
    Rat value(0);
    if (fd > 0) {
      std::vector<Vec> picked;
      std::vector<int> chosen;
      for (std::size_t k = 0; k < face.rays().size() && static_cast<int>(picked.size()) < fd; ++k) {
        picked.push_back(face.to_span(face.rays()[k]));
        if (rank_of(Mat::from_rows(picked, fd)) != static_cast<int>(picked.size()))
          picked.pop_back();
        else
          chosen.push_back(static_cast<int>(k));
      }
      Vec rhs(static_cast<std::size_t>(fd));
      for (int a = 0; a < fd; ++a)
        rhs[static_cast<std::size_t>(a)] = ray_values[static_cast<std::size_t>(chosen[static_cast<std::size_t>(a)])];
      auto ell = solve_square_rational(Mat::from_rows(picked, fd), rhs);
      if (!ell) raise(errc::internal, "face rays do not span the face");
      for (std::size_t k = 0; k < face.rays().size(); ++k) {
        Vec rc = face.to_span(face.rays()[k]);
        Rat got(0);
        for (int b = 0; b < fd; ++b)
          got = got + (*ell)[static_cast<std::size_t>(b)] * Rat(rc[static_cast<std::size_t>(b)]);
        if (!(got == Rat(ray_values[k])))
          raise(errc::ill_posed, "support function is not linear on a target chart face");
      }
      Vec ic = face.to_span(img.point);
      for (int b = 0; b < fd; ++b)
        value = value + (*ell)[static_cast<std::size_t>(b)] * Rat(ic[static_cast<std::size_t>(b)]);
    }
    Rat m = -value;  // m_rho = -psi(rho)
    if (!m.is_integer())
      raise(errc::ill_posed, "pullback coefficient is not an integer; target is singular on the support");
    if (m.num != 0) out.coeff[static_cast<int>(i)] = m.num;
  }
  return out;
}

bool is_relatively_ample(const SubdivisionMap& f, const PLDivisor& d_on_source) {
  for (int t = 0; t < f.target.size(); ++t) {
    const Cone& chart = f.target.cone(t);
    int d = chart.dim();
    if (d < 2) continue;  // no interior walls
    std::vector<EmbeddedPiece> pieces = embedded_pieces(f, t);
    std::vector<const EmbeddedPiece*> full;
    for (const EmbeddedPiece& p : pieces)
      if (p.image.dim() == d) full.push_back(&p);

    // Linear functional per full piece, in chart span coordinates.
    std::vector<Vec> functionals;
    for (const EmbeddedPiece* p : full) {
      if (!p->image.is_smooth())
        raise(errc::not_smooth, "source piece is not smooth in chart " + std::to_string(t));
      const Cone& src_cone = f.source.cone(p->source_cone);
      std::vector<Int> values;
      std::vector<Vec> image_ray_order;
      for (const Vec& sr : src_cone.rays()) {
        int idx = f.source.ray_orbit_index({p->source_cone, sr});
        values.push_back(checked_neg(d_on_source.at(idx)));
        image_ray_order.push_back(primitive(p->embed.apply(sr)));
      }
      // Align values with the canonical ray order of the embedded cone.
      std::vector<Int> aligned(values.size());
      for (std::size_t k = 0; k < p->image.rays().size(); ++k) {
        auto it = std::find(image_ray_order.begin(), image_ray_order.end(), p->image.rays()[k]);
        if (it == image_ray_order.end()) raise(errc::internal, "embedded ray not found");
        aligned[k] = values[static_cast<std::size_t>(it - image_ray_order.begin())];
      }
      functionals.push_back(solve_piece_functional(chart, p->image, aligned));
    }

    for (std::size_t i = 0; i < full.size(); ++i)
      for (std::size_t j = i + 1; j < full.size(); ++j) {
        Cone wall = intersect_cones(full[i]->image, full[j]->image);
        if (wall.dim() != d - 1) continue;
        auto strictly_above = [&](const Vec& ell_other, const Vec& ell_own, const Cone& own) {
          for (const Vec& r : own.rays()) {
            if (wall.contains(r)) continue;
            Vec rc = chart.to_span(r);
            if (!(checked_dot(ell_other, rc) > checked_dot(ell_own, rc))) return false;
          }
          return true;
        };
        if (!strictly_above(functionals[i], functionals[j], full[j]->image)) return false;
        if (!strictly_above(functionals[j], functionals[i], full[i]->image)) return false;
      }
  }
  return true;
}

PLDivisor ample_coefficients(const SubdivisionMap& f) {
  if (f.stored_ample) return *f.stored_ample;
  bool any_real_step = false;
  for (const StarStep& s : f.history) any_real_step = any_real_step || s.created_ray;
  if (!any_real_step) {
    // Trivial refinements have no interior walls, so the zero divisor
    // certifies; anything else without a star history cannot be certified.
    PLDivisor zero;
    if (is_relatively_ample(f, zero)) return zero;
    raise(errc::no_certificate, "subdivision map carries no star history");
  }

  std::vector<const std::map<ComplexPoint, Rat>*> tables;
  for (std::size_t t = 0; t < f.psi.size(); ++t)
    if (!f.psi[t].empty()) tables.push_back(&f.psi[t]);
  if (tables.empty()) raise(errc::no_certificate, "subdivision map carries no star history");

  std::vector<RayOrbit> orbits = f.source.ray_orbits();
  std::vector<ComplexPoint> keys;
  for (const RayOrbit& o : orbits) keys.push_back(f.ray_image_key(o.rep));
  std::vector<int> exc = exceptional_rays(f);
  std::set<int> exceptional(exc.begin(), exc.end());

  for (Int base : {2, 4, 16, 256}) {
    std::vector<Rat> totals(orbits.size(), Rat(0));
    Int weight = 1;
    for (std::size_t rev = 0; rev < tables.size(); ++rev) {
      const auto& table = *tables[tables.size() - 1 - rev];  // later steps get smaller weights
      for (std::size_t i = 0; i < orbits.size(); ++i) {
        auto it = table.find(keys[i]);
        if (it != table.end()) totals[i] = totals[i] + Rat(weight) * it->second;
      }
      weight = checked_mul(weight, base);
    }
    Int denom = 1;
    for (const Rat& v : totals) denom = lcm_checked(denom == 0 ? 1 : denom, v.den);
    PLDivisor d;
    for (std::size_t i = 0; i < orbits.size(); ++i) {
      if (totals[i].is_zero()) continue;
      Int m = checked_neg(checked_mul(totals[i].num, denom / totals[i].den));
      if (m >= 0) raise(errc::internal, "exceptional coefficient is not negative");
      if (!exceptional.count(static_cast<int>(i)))
        raise(errc::internal, "ample certificate is supported off the exceptional rays");
      d.coeff[static_cast<int>(i)] = m;
    }
    if (is_relatively_ample(f, d)) return d;
  }
  raise(errc::no_certificate, "no power-weighted combination of exceptional divisors verified as relatively ample");
}

SubdivisionMap assemble_subdivision(ConeComplex source, ConeComplex target,
                                    std::vector<std::pair<int, Mat>> assignment) {
  if (static_cast<int>(assignment.size()) != source.size())
    raise(errc::parse_error, "assignment must name a target cone per source cone");
  SubdivisionMap f;
  f.source = std::move(source);
  f.target = std::move(target);
  f.assignment = std::move(assignment);
  for (int c = 0; c < f.source.size(); ++c) {
    const auto& [tc, m] = f.assignment[static_cast<std::size_t>(c)];
    if (tc < 0 || tc >= f.target.size()) raise(errc::parse_error, "assignment names a missing target cone");
    if (m.rows != f.target.ambient_rank() || m.cols != f.source.ambient_rank())
      raise(errc::parse_error, "assignment matrix has the wrong shape");
    for (const Vec& r : f.source.cone(c).rays())
      if (!f.target.cone(tc).contains(m.apply(r)))
        raise(errc::parse_error, "assignment does not map source cone " + std::to_string(c) +
                                     " into target cone " + std::to_string(tc));
  }

  // Normalize each assignment to the minimal chart containing the image, so
  // the per-chart piece collections are complete.
  for (int c = 0; c < f.source.size(); ++c) {
    auto& [tc, m] = f.assignment[static_cast<std::size_t>(c)];
    const Cone& chart = f.target.cone(tc);
    Vec interior(static_cast<std::size_t>(f.target.ambient_rank()), 0);
    for (const Vec& r : f.source.cone(c).rays()) interior = vec_add(interior, m.apply(r));
    Cone face = chart.minimal_face(interior).cone;
    if (face == chart) continue;
    bool rewritten = false;
    for (const auto& arrow : f.target.closure()) {
      if (arrow.dst != tc || rewritten) continue;
      std::vector<Vec> image_rays;
      for (const Vec& r : f.target.cone(arrow.src).rays()) image_rays.push_back(arrow.map.apply(r));
      std::sort(image_rays.begin(), image_rays.end());
      if (image_rays != face.rays()) continue;
      const Cone& sub = f.target.cone(arrow.src);
      Mat basis_images(sub.dim(), f.target.ambient_rank());
      for (int i = 0; i < sub.dim(); ++i) {
        Vec w = arrow.map.apply(sub.span_basis().row(i));
        for (int j = 0; j < f.target.ambient_rank(); ++j) basis_images.at(i, j) = w[j];
      }
      Mat inv = sub.span_basis().transpose().mul(left_inverse_of_saturated(basis_images));
      Mat new_map = inv.mul(m);
      bool ok = true;
      for (const Vec& r : f.source.cone(c).rays())
        ok = ok && arrow.map.apply(new_map.apply(r)) == m.apply(r) && sub.contains(new_map.apply(r));
      if (ok) {
        tc = arrow.src;
        m = new_map;
        rewritten = true;
      }
    }
    if (!rewritten)
      raise(errc::parse_error, "no chart realizes the minimal face of the image of source cone " +
                                   std::to_string(c));
  }
  // Commutation with the face maps of the source: each source arrow must be
  // covered by some target closure map.
  for (const FaceMapArrow& a : f.source.stored_arrows()) {
    const auto& [tc_src, m_src] = f.assignment[static_cast<std::size_t>(a.src)];
    const auto& [tc_dst, m_dst] = f.assignment[static_cast<std::size_t>(a.dst)];
    bool covered = false;
    for (const Mat& e : f.target.closure_maps(tc_src, tc_dst)) {
      bool agrees = true;
      for (const Vec& r : f.source.cone(a.src).rays())
        agrees = agrees && m_dst.apply(a.map.apply(r)) == e.mul(m_src).apply(r);
      covered = covered || agrees;
      if (covered) break;
    }
    if (!covered && f.source.cone(a.src).dim() > 0)
      raise(errc::parse_error, "assignment does not commute with face map " +
                                   std::to_string(a.src) + " -> " + std::to_string(a.dst));
  }
  return f;
}

}  // namespace conekit
