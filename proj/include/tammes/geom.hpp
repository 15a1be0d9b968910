#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tammes::geom {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Raised when an argument lies outside a function's mathematical domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Polygon closure failed: the last vertex cannot be placed, or the result
/// is not a convex polygon.
class NoClosure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Degenerate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateCircle : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr bool operator==(const Vec3&) const = default;
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }
constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

/// A point of the unit sphere. Construction always normalizes.
class UnitVector {
 public:
  UnitVector() = default;
  UnitVector(double x, double y, double z);
  explicit UnitVector(const Vec3& v) : UnitVector(v.x, v.y, v.z) {}

  /// Point with polar angle `colatitude` from +z and azimuth `longitude`.
  static UnitVector from_spherical(double colatitude, double longitude);

  [[nodiscard]] double x() const { return v_.x; }
  [[nodiscard]] double y() const { return v_.y; }
  [[nodiscard]] double z() const { return v_.z; }
  [[nodiscard]] const Vec3& vec() const { return v_; }
  operator const Vec3&() const { return v_; }  // NOLINT(google-explicit-constructor)

  UnitVector operator-() const { return UnitVector(-v_); }
  bool operator==(const UnitVector&) const = default;

 private:
  Vec3 v_{0.0, 0.0, 1.0};
};

/// Equilateral spherical polygon, vertices counterclockwise seen from
/// outside the sphere (interior on the left when walking the boundary).
struct SphericalPolygon {
  std::vector<UnitVector> vertices;
  double side = 0.0;
  std::vector<double> angles;  // interior angle at each vertex

  [[nodiscard]] std::size_t size() const { return vertices.size(); }
};

// ---------------------------------------------------------------------------
// Elementary functions

/// Great-circle distance in [0, pi].
double angular_dist(const Vec3& a, const Vec3& b);

/// Unit tangent at `from` pointing along the great circle toward `to`.
Vec3 tangent_toward(const Vec3& from, const Vec3& to);

/// Rotates tangent vector `t` at `axis` counterclockwise by `angle`.
Vec3 rotate_tangent(const Vec3& axis, const Vec3& t, double angle);

struct TangentBasis {
  Vec3 e1, e2;  // e1 x e2 = point
  bool fallback = false;
};

/// Orthonormal tangent frame at x: e1 is the z-axis projected onto the
/// tangent plane (the x-axis when x is within 1e-9 of a pole), e2 = x cross e1.
TangentBasis tangent_basis(const Vec3& x);

/// Interior angle at `v` of a counterclockwise boundary prev -> v -> next,
/// in [0, 2pi).
double interior_angle(const Vec3& prev, const Vec3& v, const Vec3& next);

/// Angle of the equilateral spherical triangle with side d. Increasing in d.
double alpha(double d);

/// Opposite-pair angle of the equilateral spherical quadrilateral (rhombus)
/// with side d and angle u: 2 arccot(tan(u/2) cos d). An involution in u.
double rho(double u, double d);

/// Angle u with rho(u, d) = u (the equilateral quadrilateral is a square).
double square_angle(double d);

/// Exact range of u + rho(u, d) over the rectangle [u_lo,u_hi] x [d_lo,d_hi].
/// The sum is increasing in d and unimodal in u with its peak at
/// square_angle(d).
std::array<double, 2> rhombus_pair_sum_range(double u_lo, double u_hi, double d_lo, double d_hi);

/// Range of u + rho(u, d) over {u in [alpha(d), 2 alpha(d)], d in [d_lo, d_hi]}.
std::array<double, 2> rhombus_pair_sum_bounds(double d_lo, double d_hi);

// ---------------------------------------------------------------------------
// Polygons

/// Equilateral convex polygon with m sides of length d whose first m - 3
/// interior angles are `free_angles`; the remaining three are determined by
/// closure. For m = 3 the free angles are ignored. The polygon is placed with
/// A1 at the north pole and A2 on the zero meridian.
SphericalPolygon polygon_embed(std::span<const double> free_angles, double d, int m);

/// Places a polygon given its side and all interior angles, starting from two
/// known consecutive vertices. Does not verify closure.
std::vector<UnitVector> walk_polygon(const Vec3& first, const Vec3& second, double side,
                                     std::span<const double> angles);

/// dist(A_i, A_j) for 0-based vertex indices.
double polygon_diagonal(const SphericalPolygon& p, int i, int j);

/// True if `point` lies inside the convex polygon or on its boundary (within eps).
bool polygon_contains(const SphericalPolygon& p, const Vec3& point, double eps = 1e-12);

struct EmptyCap {
  double radius = 0.0;  // min distance from center to the polygon vertices
  UnitVector center;
};

/// Largest cap centered inside the polygon that avoids all its vertices.
EmptyCap largest_empty_cap(const SphericalPolygon& p);

/// max over points p of the polygon of min_i dist(p, A_i).
double lambda_max_min(const SphericalPolygon& p);

/// Mirror image of x across the great circle through y and z.
UnitVector reflect_over_great_circle(const Vec3& x, const Vec3& y, const Vec3& z);

/// The two points at distance r from both p and q, or none when the circles
/// do not meet. The first returned point lies to the right of p -> q.
bool circle_intersections(const Vec3& p, const Vec3& q, double r, Vec3& right, Vec3& left);

/// Fejes Toth upper bound on the optimal angular separation of n points.
double fejes_toth_bound(int n);

inline double degrees(double rad) { return rad * 180.0 / kPi; }
inline double radians(double deg) { return deg * kPi / 180.0; }

}  // namespace tammes::geom
