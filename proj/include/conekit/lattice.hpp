#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "conekit/errors.hpp"

namespace conekit {

// All lattice arithmetic is checked 64-bit: any wraparound raises errc::overflow.
using Int = std::int64_t;
using Vec = std::vector<Int>;

Int checked_add(Int a, Int b);
Int checked_sub(Int a, Int b);
Int checked_mul(Int a, Int b);
Int checked_neg(Int a);

Int checked_dot(const Vec& a, const Vec& b);
Vec vec_add(const Vec& a, const Vec& b);
Vec vec_sub(const Vec& a, const Vec& b);
Vec vec_scale(Int k, const Vec& v);
bool is_zero_vec(const Vec& v);
std::string vec_to_string(const Vec& v);

// gcd of |coordinates|; 0 for the zero vector.
Int content(const Vec& v);

// v / gcd(v). Raises zero_vector on v = 0.
Vec primitive(const Vec& v);

struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<Int> a;  // row-major

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0) {}

  static Mat identity(int n);
  static Mat from_rows(const std::vector<Vec>& rows_in, int cols_hint = -1);

  Int& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
  Int at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }

  Vec row(int r) const;
  std::vector<Vec> row_vectors() const;
  Mat transpose() const;
  Mat mul(const Mat& other) const;
  Vec apply(const Vec& v) const;  // matrix * column vector

  bool operator==(const Mat& other) const { return rows == other.rows && cols == other.cols && a == other.a; }
};

struct HnfResult {
  Mat h;  // row Hermite normal form
  Mat u;  // unimodular, h = u * m
};

// Row-style HNF: pivots positive, entries above each pivot reduced into [0, pivot),
// zero rows last. h = u * m with |det u| = 1.
HnfResult hermite_normal_form(const Mat& m);

int rank_of(const Mat& m);

// Exact |det| / det via fraction-free elimination. Raise not_square on non-square input.
Int abs_determinant(const Mat& m);
Int signed_determinant(const Mat& m);

// Basis (as rows) of {x : m x = 0}, a saturated sublattice.
Mat right_kernel(const Mat& m);

// Canonical (HNF) basis of the saturation of the row space of m.
Mat saturation_of_rowspace(const Mat& m);

// For b with saturated, independent rows: p with p * b^T = identity.
Mat left_inverse_of_saturated(const Mat& b);

// Exact rational scalar, normalized with positive denominator.
struct Rat {
  Int num = 0;
  Int den = 1;

  Rat() = default;
  Rat(Int n) : num(n), den(1) {}
  Rat(Int n, Int d);

  Rat operator+(const Rat& o) const;
  Rat operator-(const Rat& o) const;
  Rat operator*(const Rat& o) const;
  Rat operator-() const;
  bool operator==(const Rat& o) const { return num == o.num && den == o.den; }
  bool operator<(const Rat& o) const;
  bool operator<=(const Rat& o) const { return *this < o || *this == o; }
  bool is_integer() const { return den == 1; }
  bool is_zero() const { return num == 0; }
};

// Cramer solution of a x = b for square a; nullopt when det a = 0.
std::optional<std::vector<Rat>> solve_square_rational(const Mat& a, const Vec& b);

Int lcm_checked(Int a, Int b);

}  // namespace conekit
