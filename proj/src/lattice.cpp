#include "conekit/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <sstream>

namespace conekit {

const char* errc_name(errc c) {
  switch (c) {
    case errc::zero_vector: return "ZeroVector";
    case errc::overflow: return "Overflow";
    case errc::not_square: return "NotSquare";
    case errc::rank_mismatch: return "RankMismatch";
    case errc::not_simplicial: return "NotSimplicial";
    case errc::not_smooth: return "NotSmooth";
    case errc::not_strongly_convex: return "NotStronglyConvex";
    case errc::not_a_fan: return "NotAFan";
    case errc::not_contained: return "NotContained";
    case errc::unstable_center: return "UnstableCenter";
    case errc::unstable_ray: return "UnstableRay";
    case errc::groupoid_blowup: return "GroupoidBlowup";
    case errc::dual_rank_cap: return "DualRankCap";
    case errc::ill_posed: return "IllPosed";
    case errc::no_certificate: return "NoCertificate";
    case errc::unsupported_coefficient: return "UnsupportedCoefficient";
    case errc::parse_error: return "ParseError";
    case errc::invalid_complex: return "InvalidComplex";
    case errc::internal: return "InternalError";
  }
  return "UnknownError";
}

int errc_exit_class(errc c) {
  switch (c) {
    case errc::overflow:
    case errc::groupoid_blowup:
    case errc::dual_rank_cap:
      return 3;
    default:
      return 1;
  }
}

Int checked_add(Int a, Int b) {
  Int r;
  if (__builtin_add_overflow(a, b, &r)) raise(errc::overflow, "integer addition overflow");
  return r;
}

Int checked_sub(Int a, Int b) {
  Int r;
  if (__builtin_sub_overflow(a, b, &r)) raise(errc::overflow, "integer subtraction overflow");
  return r;
}

Int checked_mul(Int a, Int b) {
  Int r;
  if (__builtin_mul_overflow(a, b, &r)) raise(errc::overflow, "integer multiplication overflow");
  return r;
}

Int checked_neg(Int a) { return checked_sub(0, a); }

Int checked_dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) raise(errc::rank_mismatch, "dot product of vectors of different rank");
  Int s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s = checked_add(s, checked_mul(a[i], b[i]));
  return s;
}

Vec vec_add(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) raise(errc::rank_mismatch, "adding vectors of different rank");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = checked_add(a[i], b[i]);
  return r;
}

Vec vec_sub(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) raise(errc::rank_mismatch, "subtracting vectors of different rank");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = checked_sub(a[i], b[i]);
  return r;
}

Vec vec_scale(Int k, const Vec& v) {
  Vec r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = checked_mul(k, v[i]);
  return r;
}

bool is_zero_vec(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [](Int x) { return x == 0; });
}

std::string vec_to_string(const Vec& v) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ',';
    os << v[i];
  }
  os << ')';
  return os.str();
}

Int content(const Vec& v) {
  Int g = 0;
  for (Int x : v) {
    Int ax = x;
    if (ax == std::numeric_limits<Int>::min()) raise(errc::overflow, "content of INT64_MIN");
    if (ax < 0) ax = -ax;
    g = std::gcd(g, ax);
  }
  return g;
}

Vec primitive(const Vec& v) {
  Int g = content(v);
  if (g == 0) raise(errc::zero_vector, "primitive of the zero vector");
  Vec r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i] / g;
  return r;
}

Mat Mat::identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

Mat Mat::from_rows(const std::vector<Vec>& rows_in, int cols_hint) {
  int c = cols_hint;
  if (c < 0) c = rows_in.empty() ? 0 : static_cast<int>(rows_in.front().size());
  Mat m(static_cast<int>(rows_in.size()), c);
  for (int i = 0; i < m.rows; ++i) {
    if (static_cast<int>(rows_in[i].size()) != c) raise(errc::rank_mismatch, "ragged row list");
    for (int j = 0; j < c; ++j) m.at(i, j) = rows_in[i][j];
  }
  return m;
}

Vec Mat::row(int r) const {
  Vec v(cols);
  for (int j = 0; j < cols; ++j) v[j] = at(r, j);
  return v;
}

std::vector<Vec> Mat::row_vectors() const {
  std::vector<Vec> rs;
  rs.reserve(rows);
  for (int i = 0; i < rows; ++i) rs.push_back(row(i));
  return rs;
}

Mat Mat::transpose() const {
  Mat t(cols, rows);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) t.at(j, i) = at(i, j);
  return t;
}

Mat Mat::mul(const Mat& other) const {
  if (cols != other.rows) raise(errc::rank_mismatch, "matrix product shape mismatch");
  Mat r(rows, other.cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) {
      Int aik = at(i, k);
      if (aik == 0) continue;
      for (int j = 0; j < other.cols; ++j)
        r.at(i, j) = checked_add(r.at(i, j), checked_mul(aik, other.at(k, j)));
    }
  return r;
}

Vec Mat::apply(const Vec& v) const {
  if (static_cast<int>(v.size()) != cols) raise(errc::rank_mismatch, "matrix apply shape mismatch");
  Vec r(rows, 0);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) r[i] = checked_add(r[i], checked_mul(at(i, j), v[j]));
  return r;
}

namespace {

void swap_rows(Mat& m, int i, int j) {
  for (int c = 0; c < m.cols; ++c) std::swap(m.at(i, c), m.at(j, c));
}

void negate_row(Mat& m, int i) {
  for (int c = 0; c < m.cols; ++c) m.at(i, c) = checked_neg(m.at(i, c));
}

// row i -= q * row j
void subtract_multiple(Mat& m, int i, int j, Int q) {
  if (q == 0) return;
  for (int c = 0; c < m.cols; ++c) m.at(i, c) = checked_sub(m.at(i, c), checked_mul(q, m.at(j, c)));
}

Int floor_div(Int a, Int b) {
  Int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

HnfResult hermite_normal_form(const Mat& m) {
  Mat h = m;
  Mat u = Mat::identity(m.rows);
  int r = 0;
  for (int col = 0; col < h.cols && r < h.rows; ++col) {
    // Clear column below row r via gcd steps.
    while (true) {
      int piv = -1;
      for (int i = r; i < h.rows; ++i) {
        if (h.at(i, col) == 0) continue;
        if (piv < 0 || std::llabs(h.at(i, col)) < std::llabs(h.at(piv, col))) piv = i;
      }
      if (piv < 0) break;
      if (piv != r) {
        swap_rows(h, r, piv);
        swap_rows(u, r, piv);
      }
      bool done = true;
      for (int i = r + 1; i < h.rows; ++i) {
        if (h.at(i, col) == 0) continue;
        Int q = h.at(i, col) / h.at(r, col);
        subtract_multiple(h, i, r, q);
        subtract_multiple(u, i, r, q);
        if (h.at(i, col) != 0) done = false;
      }
      if (done) break;
    }
    if (h.at(r, col) == 0) continue;
    if (h.at(r, col) < 0) {
      negate_row(h, r);
      negate_row(u, r);
    }
    for (int i = 0; i < r; ++i) {
      Int q = floor_div(h.at(i, col), h.at(r, col));
      subtract_multiple(h, i, r, q);
      subtract_multiple(u, i, r, q);
    }
    ++r;
  }
  return {h, u};
}

int rank_of(const Mat& m) {
  Mat h = hermite_normal_form(m).h;
  int r = 0;
  for (int i = 0; i < h.rows; ++i) {
    bool nz = false;
    for (int j = 0; j < h.cols; ++j) nz = nz || h.at(i, j) != 0;
    if (nz) ++r;
  }
  return r;
}

Int signed_determinant(const Mat& m) {
  if (m.rows != m.cols) raise(errc::not_square, "determinant of a non-square matrix");
  int n = m.rows;
  if (n == 0) return 1;
  Mat w = m;
  Int sign = 1;
  Int prev = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (w.at(k, k) == 0) {
      int piv = -1;
      for (int i = k + 1; i < n; ++i)
        if (w.at(i, k) != 0) {
          piv = i;
          break;
        }
      if (piv < 0) return 0;
      swap_rows(w, k, piv);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i) {
      for (int j = k + 1; j < n; ++j) {
        Int num = checked_sub(checked_mul(w.at(i, j), w.at(k, k)), checked_mul(w.at(i, k), w.at(k, j)));
        w.at(i, j) = num / prev;  // exact by Bareiss
      }
      w.at(i, k) = 0;
    }
    prev = w.at(k, k);
  }
  return checked_mul(sign, w.at(n - 1, n - 1));
}

Int abs_determinant(const Mat& m) {
  Int d = signed_determinant(m);
  return d < 0 ? checked_neg(d) : d;
}

Mat right_kernel(const Mat& m) {
  if (m.rows == 0) return Mat::identity(m.cols);
  HnfResult t = hermite_normal_form(m.transpose());
  std::vector<Vec> basis;
  for (int i = 0; i < t.h.rows; ++i) {
    bool nz = false;
    for (int j = 0; j < t.h.cols; ++j) nz = nz || t.h.at(i, j) != 0;
    if (!nz) basis.push_back(t.u.row(i));
  }
  Mat k = Mat::from_rows(basis, m.cols);
  if (k.rows == 0) return Mat(0, m.cols);
  Mat h = hermite_normal_form(k).h;
  std::vector<Vec> rows;
  for (int i = 0; i < h.rows; ++i)
    if (!is_zero_vec(h.row(i))) rows.push_back(h.row(i));
  return Mat::from_rows(rows, m.cols);
}

Mat saturation_of_rowspace(const Mat& m) {
  Mat k = right_kernel(m);
  if (k.rows == 0) {
    // Full row span: canonical basis is the identity.
    return Mat::identity(m.cols);
  }
  return right_kernel(k);
}

Mat left_inverse_of_saturated(const Mat& b) {
  int d = b.rows;
  int n = b.cols;
  if (d == 0) return Mat(0, n);
  HnfResult t = hermite_normal_form(b.transpose());  // u * b^T = h, h top d x d upper triangular
  for (int i = 0; i < d; ++i) {
    if (t.h.at(i, i) != 1) raise(errc::internal, "left inverse of a non-saturated basis");
  }
  // x = inverse of the unit upper-triangular top block
  Mat x = Mat::identity(d);
  for (int i = d - 1; i >= 0; --i) {
    for (int j = i + 1; j < d; ++j) {
      Int f = t.h.at(i, j);
      if (f == 0) continue;
      for (int c = 0; c < d; ++c) x.at(i, c) = checked_sub(x.at(i, c), checked_mul(f, x.at(j, c)));
    }
  }
  Mat p(d, n);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < n; ++j) {
      Int s = 0;
      for (int k = 0; k < d; ++k) s = checked_add(s, checked_mul(x.at(i, k), t.u.at(k, j)));
      p.at(i, j) = s;
    }
  return p;
}

Rat::Rat(Int n, Int d) {
  if (d == 0) raise(errc::internal, "rational with zero denominator");
  if (d < 0) {
    n = checked_neg(n);
    d = checked_neg(d);
  }
  Int g = std::gcd(n < 0 ? -n : n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  num = n;
  den = d;
}

Rat Rat::operator+(const Rat& o) const {
  return Rat(checked_add(checked_mul(num, o.den), checked_mul(o.num, den)), checked_mul(den, o.den));
}

Rat Rat::operator-(const Rat& o) const { return *this + (-o); }

Rat Rat::operator*(const Rat& o) const { return Rat(checked_mul(num, o.num), checked_mul(den, o.den)); }

Rat Rat::operator-() const {
  Rat r;
  r.num = checked_neg(num);
  r.den = den;
  return r;
}

bool Rat::operator<(const Rat& o) const {
  return checked_mul(num, o.den) < checked_mul(o.num, den);
}

std::optional<std::vector<Rat>> solve_square_rational(const Mat& a, const Vec& b) {
  if (a.rows != a.cols) raise(errc::not_square, "Cramer solve needs a square matrix");
  if (static_cast<int>(b.size()) != a.rows) raise(errc::rank_mismatch, "Cramer solve shape mismatch");
  Int det = signed_determinant(a);
  if (det == 0) return std::nullopt;
  std::vector<Rat> x;
  x.reserve(a.cols);
  for (int j = 0; j < a.cols; ++j) {
    Mat aj = a;
    for (int i = 0; i < a.rows; ++i) aj.at(i, j) = b[i];
    x.emplace_back(signed_determinant(aj), det);
  }
  return x;
}

Int lcm_checked(Int a, Int b) {
  if (a == 0 || b == 0) return 0;
  Int g = std::gcd(a < 0 ? -a : a, b < 0 ? -b : b);
  return checked_mul(a < 0 ? -a : a, (b < 0 ? -b : b) / g);
}

}  // namespace conekit
