#include "conekit/cone.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace conekit {

namespace {

constexpr int kSpanDimCap = 6;
constexpr Int kBoxCellCap = 2'000'000;

// Iterate over all k-subsets of {0..n-1}.
template <typename F>
void for_each_subset(int n, int k, F&& fn) {
  if (k < 0 || k > n) return;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

Cone Cone::zero(int ambient_rank) { return from_generators(ambient_rank, {}); }

Cone Cone::from_generators(int ambient_rank, std::vector<Vec> gens) {
  Cone c;
  c.ambient_rank_ = ambient_rank;

  std::set<Vec> primset;
  for (const Vec& g : gens) {
    if (static_cast<int>(g.size()) != ambient_rank)
      raise(errc::rank_mismatch, "generator rank does not match ambient rank");
    if (is_zero_vec(g)) continue;
    primset.insert(primitive(g));
  }
  std::vector<Vec> prim(primset.begin(), primset.end());

  c.span_basis_ = saturation_of_rowspace(Mat::from_rows(prim, ambient_rank));
  c.dim_ = c.span_basis_.rows;
  if (c.dim_ > kSpanDimCap)
    raise(errc::dual_rank_cap, "cone span dimension exceeds the supported cap of 6");
  c.span_proj_ = left_inverse_of_saturated(c.span_basis_);

  if (c.dim_ == 0) return c;  // zero cone

  std::vector<Vec> gens_span;
  gens_span.reserve(prim.size());
  for (const Vec& g : prim) gens_span.push_back(c.span_proj_.apply(g));

  c.rays_ = prim;
  c.rays_span_ = gens_span;
  c.build_dual();

  // Keep only generators spanning extreme rays.
  std::vector<Vec> extreme, extreme_span;
  for (std::size_t i = 0; i < c.rays_.size(); ++i) {
    std::vector<Vec> vanishing;
    for (const Vec& xi : c.facet_normals_span_)
      if (checked_dot(xi, c.rays_span_[i]) == 0) vanishing.push_back(xi);
    if (rank_of(Mat::from_rows(vanishing, c.dim_)) == c.dim_ - 1) {
      extreme.push_back(c.rays_[i]);
      extreme_span.push_back(c.rays_span_[i]);
    }
  }
  c.rays_ = std::move(extreme);
  c.rays_span_ = std::move(extreme_span);
  return c;
}

void Cone::build_dual() {
  int d = dim_;
  std::set<Vec> kept;
  for_each_subset(static_cast<int>(rays_span_.size()), d - 1, [&](const std::vector<int>& idx) {
    std::vector<Vec> rows;
    rows.reserve(idx.size());
    for (int i : idx) rows.push_back(rays_span_[i]);
    Mat k = right_kernel(Mat::from_rows(rows, d));
    if (k.rows != 1) return;
    Vec xi = primitive(k.row(0));
    bool nonneg = true, nonpos = true;
    for (const Vec& g : rays_span_) {
      Int p = checked_dot(xi, g);
      nonneg = nonneg && p >= 0;
      nonpos = nonpos && p <= 0;
    }
    if (nonneg)
      kept.insert(xi);
    else if (nonpos)
      kept.insert(vec_scale(-1, xi));
  });

  facet_normals_span_.assign(kept.begin(), kept.end());
  if (rank_of(Mat::from_rows(facet_normals_span_, d)) != d)
    raise(errc::not_strongly_convex, "generators span a cone containing a line");

  facet_normals_.clear();
  for (const Vec& xi : facet_normals_span_) {
    Vec amb(ambient_rank_, 0);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < ambient_rank_; ++j)
        amb[j] = checked_add(amb[j], checked_mul(xi[i], span_proj_.at(i, j)));
    facet_normals_.push_back(amb);
  }
}

bool Cone::span_contains(const Vec& v) const {
  if (static_cast<int>(v.size()) != ambient_rank_)
    raise(errc::rank_mismatch, "point rank does not match ambient rank");
  Vec coords = span_proj_.apply(v);
  return to_ambient(coords) == v;
}

Vec Cone::to_span(const Vec& v) const {
  if (!span_contains(v)) raise(errc::not_contained, "point is not in the span lattice of the cone");
  return span_proj_.apply(v);
}

Vec Cone::to_ambient(const Vec& span_coords) const {
  if (static_cast<int>(span_coords.size()) != dim_)
    raise(errc::rank_mismatch, "span coordinate rank mismatch");
  Vec v(ambient_rank_, 0);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < ambient_rank_; ++j)
      v[j] = checked_add(v[j], checked_mul(span_coords[i], span_basis_.at(i, j)));
  return v;
}

bool Cone::contains(const Vec& v) const {
  if (!span_contains(v)) return false;
  Vec coords = span_proj_.apply(v);
  for (const Vec& xi : facet_normals_span_)
    if (checked_dot(xi, coords) < 0) return false;
  return true;
}

bool Cone::contains_in_relative_interior(const Vec& v) const {
  if (!span_contains(v)) return false;
  Vec coords = span_proj_.apply(v);
  for (const Vec& xi : facet_normals_span_)
    if (checked_dot(xi, coords) <= 0) return false;
  return true;
}

ConeFace Cone::minimal_face(const Vec& v) const {
  if (!contains(v)) raise(errc::not_contained, "point is not in the cone");
  Vec coords = span_proj_.apply(v);
  std::vector<std::size_t> selector;
  for (std::size_t i = 0; i < facet_normals_span_.size(); ++i)
    if (checked_dot(facet_normals_span_[i], coords) == 0) selector.push_back(i);
  std::vector<Vec> face_rays;
  for (std::size_t r = 0; r < rays_.size(); ++r) {
    bool in_face = true;
    for (std::size_t i : selector)
      in_face = in_face && checked_dot(facet_normals_span_[i], rays_span_[r]) == 0;
    if (in_face) face_rays.push_back(rays_[r]);
  }
  return {selector, from_generators(ambient_rank_, face_rays)};
}

std::vector<ConeFace> Cone::faces() const {
  std::map<std::vector<Vec>, ConeFace> seen;
  auto face_of_rayset = [&](const std::vector<Vec>& frays) -> ConeFace {
    std::vector<std::size_t> selector;
    for (std::size_t i = 0; i < facet_normals_span_.size(); ++i) {
      bool vanishes = true;
      for (const Vec& r : frays) {
        Vec coords = span_proj_.apply(r);
        vanishes = vanishes && checked_dot(facet_normals_span_[i], coords) == 0;
      }
      if (vanishes) selector.push_back(i);
    }
    return {selector, from_generators(ambient_rank_, frays)};
  };

  std::vector<std::vector<Vec>> queue = {rays_};
  seen.emplace(rays_, face_of_rayset(rays_));
  while (!queue.empty()) {
    std::vector<Vec> cur = queue.back();
    queue.pop_back();
    for (std::size_t i = 0; i < facet_normals_span_.size(); ++i) {
      std::vector<Vec> sub;
      for (const Vec& r : cur)
        if (checked_dot(facet_normals_span_[i], span_proj_.apply(r)) == 0) sub.push_back(r);
      if (!seen.count(sub)) {
        seen.emplace(sub, face_of_rayset(sub));
        queue.push_back(sub);
      }
    }
  }

  std::vector<ConeFace> out;
  for (auto& [rays, face] : seen) out.push_back(std::move(face));
  std::sort(out.begin(), out.end(),
            [](const ConeFace& a, const ConeFace& b) { return a.cone < b.cone; });
  return out;
}

std::vector<ConeFace> Cone::facets() const {
  std::vector<ConeFace> out;
  for (auto& f : faces())
    if (f.cone.dim() == dim_ - 1) out.push_back(f);
  return out;
}

bool Cone::has_face(const Cone& other) const {
  if (other.ambient_rank_ != ambient_rank_) raise(errc::rank_mismatch, "face test across ambient lattices");
  for (const Vec& r : other.rays_)
    if (!contains(r)) return false;
  // Cut by every normal vanishing on all of `other`.
  std::vector<std::size_t> selector;
  for (std::size_t i = 0; i < facet_normals_span_.size(); ++i) {
    bool vanishes = true;
    for (const Vec& r : other.rays_)
      vanishes = vanishes && checked_dot(facet_normals_span_[i], span_proj_.apply(r)) == 0;
    if (vanishes) selector.push_back(i);
  }
  std::vector<Vec> frays;
  for (std::size_t r = 0; r < rays_.size(); ++r) {
    bool in_face = true;
    for (std::size_t i : selector)
      in_face = in_face && checked_dot(facet_normals_span_[i], rays_span_[r]) == 0;
    if (in_face) frays.push_back(rays_[r]);
  }
  return frays == other.rays_;
}

std::vector<std::vector<Vec>> Cone::triangulate() const {
  if (dim_ == 0) return {};
  if (is_simplicial()) return {rays_};
  std::vector<std::vector<Vec>> pieces;
  const Vec& apex = rays_.front();
  for (const auto& f : facets()) {
    bool contains_apex =
        std::find(f.cone.rays().begin(), f.cone.rays().end(), apex) != f.cone.rays().end();
    if (contains_apex) continue;
    for (auto piece : f.cone.triangulate()) {
      piece.push_back(apex);
      pieces.push_back(std::move(piece));
    }
  }
  return pieces;
}

std::vector<Vec> Cone::hilbert_basis() const {
  if (dim_ == 0) return {};
  std::set<Vec> candidates(rays_.begin(), rays_.end());

  for (const auto& piece : triangulate()) {
    std::vector<Vec> rs;
    rs.reserve(piece.size());
    for (const Vec& r : piece) rs.push_back(span_proj_.apply(r));
    Mat rmat = Mat::from_rows(rs, dim_);
    if (abs_determinant(rmat) == 1) continue;  // smooth piece: no interior parallelepiped points
    Mat rmat_t = rmat.transpose();

    Vec lo(dim_, 0), hi(dim_, 0);
    for (int j = 0; j < dim_; ++j)
      for (const Vec& r : rs) {
        if (r[j] < 0) lo[j] = checked_add(lo[j], r[j]);
        if (r[j] > 0) hi[j] = checked_add(hi[j], r[j]);
      }
    Int cells = 1;
    for (int j = 0; j < dim_; ++j) cells = checked_mul(cells, checked_add(checked_sub(hi[j], lo[j]), 1));
    if (cells > kBoxCellCap) raise(errc::overflow, "parallelepiped enumeration box too large");

    Vec v = lo;
    while (true) {
      if (!is_zero_vec(v)) {
        auto t = solve_square_rational(rmat_t, v);
        if (t) {
          bool inside = true;
          for (const Rat& ti : *t) inside = inside && Rat(0) <= ti && ti < Rat(1);
          if (inside) candidates.insert(to_ambient(v));
        }
      }
      int j = 0;
      while (j < dim_ && v[j] == hi[j]) {
        v[j] = lo[j];
        ++j;
      }
      if (j == dim_) break;
      ++v[j];
    }
  }

  std::vector<Vec> result;
  for (const Vec& h : candidates) {
    bool reducible = false;
    for (const Vec& a : candidates) {
      if (a == h) continue;
      Vec diff = vec_sub(h, a);
      if (!is_zero_vec(diff) && contains(diff)) {
        reducible = true;
        break;
      }
    }
    if (!reducible) result.push_back(h);
  }
  return result;  // std::set iteration is already sorted
}

std::vector<Vec> Cone::dual_hilbert_basis() const {
  if (dim_ == 0) return {};
  Cone dual = from_generators(dim_, facet_normals_span_);
  return dual.hilbert_basis();
}

Int Cone::multiplicity() const {
  if (!is_simplicial()) raise(errc::not_simplicial, "multiplicity of a non-simplicial cone");
  if (dim_ == 0) return 1;
  return abs_determinant(Mat::from_rows(rays_span_, dim_));
}

bool Cone::is_smooth() const { return is_simplicial() && multiplicity() == 1; }

std::vector<Rat> Cone::expand_nonneg(const Vec& v) const {
  if (!contains(v)) raise(errc::not_contained, "expansion point is not in the cone");
  std::vector<Rat> coeffs(rays_.size(), Rat(0));
  if (dim_ == 0) return coeffs;
  Vec coords = span_proj_.apply(v);
  for (const auto& piece : triangulate()) {
    std::vector<Vec> rs;
    for (const Vec& r : piece) rs.push_back(span_proj_.apply(r));
    auto t = solve_square_rational(Mat::from_rows(rs, dim_).transpose(), coords);
    if (!t) continue;
    bool nonneg = true;
    for (const Rat& ti : *t) nonneg = nonneg && Rat(0) <= ti;
    if (!nonneg) continue;
    for (std::size_t i = 0; i < piece.size(); ++i) {
      auto it = std::find(rays_.begin(), rays_.end(), piece[i]);
      coeffs[static_cast<std::size_t>(it - rays_.begin())] = (*t)[i];
    }
    return coeffs;
  }
  raise(errc::internal, "no simplicial piece contains the expansion point");
}

bool Cone::operator<(const Cone& o) const {
  if (dim_ != o.dim_) return dim_ < o.dim_;
  return rays_ < o.rays_;
}

Cone intersect_cones(const Cone& a, const Cone& b) {
  if (a.ambient_rank() != b.ambient_rank()) raise(errc::rank_mismatch, "intersecting cones across lattices");
  int n = a.ambient_rank();
  Mat ka = right_kernel(Mat::from_rows(a.rays(), n));
  Mat kb = right_kernel(Mat::from_rows(b.rays(), n));
  std::vector<Vec> stacked = ka.row_vectors();
  for (const Vec& r : kb.row_vectors()) stacked.push_back(r);
  Mat s = right_kernel(Mat::from_rows(stacked, n));  // basis of span(a) ∩ span(b)
  int sd = s.rows;
  if (sd == 0) return Cone::zero(n);

  std::vector<Vec> constraints;  // normals of both cones, restricted to s-coordinates
  for (const Vec& xi : a.facet_normals()) {
    Vec c(sd);
    for (int i = 0; i < sd; ++i) c[i] = checked_dot(xi, s.row(i));
    constraints.push_back(c);
  }
  for (const Vec& xi : b.facet_normals()) {
    Vec c(sd);
    for (int i = 0; i < sd; ++i) c[i] = checked_dot(xi, s.row(i));
    constraints.push_back(c);
  }

  std::set<Vec> gens_s;
  for_each_subset(static_cast<int>(constraints.size()), sd - 1, [&](const std::vector<int>& idx) {
    std::vector<Vec> rows;
    for (int i : idx) rows.push_back(constraints[i]);
    Mat k = right_kernel(Mat::from_rows(rows, sd));
    if (k.rows != 1) return;
    Vec r = primitive(k.row(0));
    for (int sign = 0; sign < 2; ++sign) {
      Vec cand = sign == 0 ? r : vec_scale(-1, r);
      bool ok = true;
      for (const Vec& c : constraints) ok = ok && checked_dot(c, cand) >= 0;
      if (ok) gens_s.insert(cand);
    }
  });

  std::vector<Vec> gens_ambient;
  for (const Vec& g : gens_s) {
    Vec v(n, 0);
    for (int i = 0; i < sd; ++i)
      for (int j = 0; j < n; ++j) v[j] = checked_add(v[j], checked_mul(g[i], s.at(i, j)));
    gens_ambient.push_back(v);
  }
  return Cone::from_generators(n, gens_ambient);
}

bool relative_interiors_meet(const Cone& a, const Cone& b) {
  Cone i = intersect_cones(a, b);
  if (i.is_zero_cone()) return a.is_zero_cone() && b.is_zero_cone();
  Vec p(a.ambient_rank(), 0);
  for (const Vec& r : i.rays()) p = vec_add(p, r);
  return a.contains_in_relative_interior(p) && b.contains_in_relative_interior(p);
}

}  // namespace conekit
