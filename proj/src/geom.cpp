#include "tammes/geom.hpp"

#include <algorithm>
#include <limits>

namespace tammes::geom {

UnitVector::UnitVector(double x, double y, double z) {
  const double n = std::sqrt(x * x + y * y + z * z);
  if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("UnitVector: zero or non-finite vector");
  v_ = {x / n, y / n, z / n};
}

UnitVector UnitVector::from_spherical(double colatitude, double longitude) {
  const double s = std::sin(colatitude);
  return {s * std::cos(longitude), s * std::sin(longitude), std::cos(colatitude)};
}

double angular_dist(const Vec3& a, const Vec3& b) {
  // atan2 form: same value as arccos(clamp(a.b)) but well conditioned near 0 and pi.
  return std::atan2(norm(cross(a, b)), std::clamp(dot(a, b), -1.0, 1.0));
}

Vec3 tangent_toward(const Vec3& from, const Vec3& to) {
  const Vec3 t = to - dot(from, to) * from;
  const double n = norm(t);
  if (n < 1e-15) throw Degenerate("tangent_toward: points coincide or are antipodal");
  return t * (1.0 / n);
}

Vec3 rotate_tangent(const Vec3& axis, const Vec3& t, double angle) {
  return std::cos(angle) * t + std::sin(angle) * cross(axis, t);
}

TangentBasis tangent_basis(const Vec3& x) {
  TangentBasis b;
  Vec3 e = Vec3{0, 0, 1} - x.z * x;
  double n = norm(e);
  if (n < 1e-9) {
    e = Vec3{1, 0, 0} - x.x * x;
    n = norm(e);
    b.fallback = true;
  }
  b.e1 = e * (1.0 / n);
  b.e2 = cross(x, b.e1);
  return b;
}

double interior_angle(const Vec3& prev, const Vec3& v, const Vec3& next) {
  const Vec3 tn = tangent_toward(v, next);
  const Vec3 tp = tangent_toward(v, prev);
  double a = std::atan2(dot(cross(tn, tp), v), dot(tn, tp));
  if (a < 0.0) a += kTwoPi;
  return a;
}

double alpha(double d) {
  const double c = std::cos(d);
  if (!(d > 0.0) || c <= -0.5) throw DomainError("alpha: side must satisfy 0 < d < 2pi/3");
  return std::acos(std::clamp(c / (1.0 + c), -1.0, 1.0));
}

double rho(double u, double d) {
  if (!(u > 0.0 && u < kPi)) throw DomainError("rho: angle must lie in (0, pi)");
  if (!(d > 0.0 && d < kPi / 2)) throw DomainError("rho: side must lie in (0, pi/2)");
  return 2.0 * std::atan2(1.0, std::tan(0.5 * u) * std::cos(d));
}

double square_angle(double d) {
  if (!(d > 0.0 && d < kPi / 2)) throw DomainError("square_angle: side must lie in (0, pi/2)");
  return 2.0 * std::atan2(1.0, std::sqrt(std::cos(d)));
}

std::array<double, 2> rhombus_pair_sum_range(double u_lo, double u_hi, double d_lo, double d_hi) {
  if (u_lo > u_hi || d_lo > d_hi) throw DomainError("rhombus_pair_sum_range: empty rectangle");
  auto g = [](double u, double d) { return u + rho(u, d); };
  const double lo = std::min(g(u_lo, d_lo), g(u_hi, d_lo));
  const double peak = std::clamp(square_angle(d_hi), u_lo, u_hi);
  return {lo, g(peak, d_hi)};
}

std::array<double, 2> rhombus_pair_sum_bounds(double d_lo, double d_hi) {
  if (d_lo > d_hi) throw DomainError("rhombus_pair_sum_bounds: empty interval");
  // Both endpoints u = alpha and u = 2 alpha give 3 alpha(d); the peak is the square.
  return {3.0 * alpha(d_lo), 2.0 * square_angle(d_hi)};
}

bool circle_intersections(const Vec3& p, const Vec3& q, double r, Vec3& right, Vec3& left) {
  const double pq = dot(p, q);
  const Vec3 n = cross(p, q);
  const double nn = dot(n, n);
  if (1.0 + pq < 1e-14 || nn < 1e-28) return false;
  const double c = std::cos(r) / (1.0 + pq);
  double h2 = (1.0 - 2.0 * c * c * (1.0 + pq)) / nn;
  if (h2 < 0.0) {
    if (h2 < -1e-14) return false;
    h2 = 0.0;
  }
  const double h = std::sqrt(h2);
  const Vec3 base = c * (p + q);
  right = base - h * n;
  left = base + h * n;
  const double nr = norm(right), nl = norm(left);
  right = right * (1.0 / nr);
  left = left * (1.0 / nl);
  return true;
}

namespace {

Vec3 step_along(const Vec3& prev, const Vec3& cur, double side, double angle) {
  const Vec3 t = rotate_tangent(cur, tangent_toward(cur, prev), -angle);
  return std::cos(side) * cur + std::sin(side) * t;
}

std::vector<double> all_interior_angles(const std::vector<UnitVector>& v) {
  const std::size_t m = v.size();
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    out[i] = interior_angle(v[(i + m - 1) % m], v[i], v[(i + 1) % m]);
  }
  return out;
}

}  // namespace

std::vector<UnitVector> walk_polygon(const Vec3& first, const Vec3& second, double side,
                                     std::span<const double> angles) {
  const std::size_t m = angles.size();
  std::vector<UnitVector> out;
  out.reserve(m);
  out.emplace_back(first);
  out.emplace_back(second);
  for (std::size_t i = 1; i + 1 < m; ++i) {
    out.emplace_back(step_along(out[i - 1], out[i], side, angles[i]));
  }
  return out;
}

SphericalPolygon polygon_embed(std::span<const double> free_angles, double d, int m) {
  if (m < 3) throw DomainError("polygon_embed: need at least 3 vertices");
  const auto s = static_cast<std::size_t>(m - 3);
  if (free_angles.size() != s) throw DomainError("polygon_embed: expected m - 3 free angles");
  if (!(d > 0.0 && d < kPi)) throw DomainError("polygon_embed: side must lie in (0, pi)");
  for (double a : free_angles) {
    if (!(a > 0.0 && a < kPi)) throw DomainError("polygon_embed: free angle outside (0, pi)");
  }

  std::vector<Vec3> v(static_cast<std::size_t>(m));
  v[0] = {0.0, 0.0, 1.0};
  v[1] = {std::sin(d), 0.0, std::cos(d)};
  Vec3 spare;
  if (m == 3) {
    if (!circle_intersections(v[1], v[0], d, v[2], spare)) throw NoClosure("triangle does not close");
  } else {
    for (std::size_t k = 1; k < s; ++k) v[k + 1] = step_along(v[k - 1], v[k], d, free_angles[k]);
    const Vec3 t = rotate_tangent(v[0], tangent_toward(v[0], v[1]), free_angles[0]);
    v[m - 1] = std::cos(d) * v[0] + std::sin(d) * t;
    if (!circle_intersections(v[s], v[m - 1], d, v[s + 1], spare)) {
      throw NoClosure("closing vertex cannot be placed");
    }
  }

  SphericalPolygon poly;
  poly.side = d;
  poly.vertices.reserve(v.size());
  for (const auto& p : v) poly.vertices.emplace_back(p);
  poly.angles = all_interior_angles(poly.vertices);

  double sum = 0.0;
  for (double a : poly.angles) {
    if (!(a > 1e-12 && a < kPi - 1e-12)) throw NoClosure("closed polygon is not convex");
    sum += a;
  }
  // Positive area rules out doubly wound (star) boundaries.
  if (sum - (m - 2) * kPi <= 0.0) throw NoClosure("closed polygon is not simple");
  for (std::size_t k = 0; k < s; ++k) poly.angles[k] = free_angles[k];
  return poly;
}

double polygon_diagonal(const SphericalPolygon& p, int i, int j) {
  const int m = static_cast<int>(p.size());
  if (i < 0 || j < 0 || i >= m || j >= m) throw std::out_of_range("polygon_diagonal: vertex index");
  if (i == j) throw DomainError("polygon_diagonal: indices must differ");
  return angular_dist(p.vertices[i], p.vertices[j]);
}

bool polygon_contains(const SphericalPolygon& p, const Vec3& point, double eps) {
  const std::size_t m = p.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Vec3& a = p.vertices[i];
    const Vec3& b = p.vertices[(i + 1) % m];
    if (dot(point, cross(a, b)) < -eps) return false;
  }
  return true;
}

namespace {

double min_vertex_distance(const SphericalPolygon& p, const Vec3& x) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& a : p.vertices) best = std::min(best, angular_dist(x, a));
  return best;
}

}  // namespace

EmptyCap largest_empty_cap(const SphericalPolygon& p) {
  const std::size_t m = p.size();
  if (m < 3) throw Degenerate("largest_empty_cap: fewer than 3 vertices");
  for (double a : p.angles) {
    if (!(a > 1e-12 && a < kPi - 1e-12)) throw Degenerate("largest_empty_cap: polygon not strictly convex");
  }

  EmptyCap best{-1.0, p.vertices[0]};
  auto consider = [&](Vec3 c) {
    const double n = norm(c);
    if (n < 1e-14) return;
    c = c * (1.0 / n);
    if (!polygon_contains(p, c, 1e-12)) return;
    const double r = min_vertex_distance(p, c);
    if (r > best.radius) best = {r, UnitVector(c)};
  };

  Vec3 centroid;
  for (const auto& a : p.vertices) centroid += a.vec();
  consider(centroid);

  const auto& A = p.vertices;
  // Equidistant points of vertex triples (spherical circumcenters).
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      for (std::size_t k = j + 1; k < m; ++k) {
        const Vec3 n = cross(A[j].vec() - A[i].vec(), A[k].vec() - A[i].vec());
        consider(n);
        consider(-n);
      }
  for (std::size_t e = 0; e < m; ++e) {
    const Vec3 ne = cross(A[e], A[(e + 1) % m]);
    // Bisector of a vertex pair crossing the boundary edge.
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) {
        const Vec3 x = cross(A[i].vec() - A[j].vec(), ne);
        consider(x);
        consider(-x);
      }
    // Farthest point from a single vertex along the edge's great circle.
    const Vec3 nhat = ne * (1.0 / norm(ne));
    for (std::size_t i = 0; i < m; ++i) {
      const Vec3 anti = -A[i].vec();
      consider(anti - dot(anti, nhat) * nhat);
    }
  }

  // Pattern-search polish on the tangent plane of the best candidate.
  Vec3 c = best.center;
  double step = 1e-3;
  while (step > 1e-15) {
    bool moved = false;
    const Vec3 helper = std::abs(c.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
    Vec3 e1 = cross(helper, c);
    e1 = e1 * (1.0 / norm(e1));
    const Vec3 e2 = cross(c, e1);
    for (int k = 0; k < 8; ++k) {
      const double th = k * kPi / 4;
      Vec3 trial = c + step * (std::cos(th) * e1 + std::sin(th) * e2);
      trial = trial * (1.0 / norm(trial));
      if (!polygon_contains(p, trial, 1e-12)) continue;
      const double r = min_vertex_distance(p, trial);
      if (r > best.radius) {
        best = {r, UnitVector(trial)};
        c = best.center;
        moved = true;
        break;
      }
    }
    if (!moved) step *= 0.5;
  }
  return best;
}

double lambda_max_min(const SphericalPolygon& p) { return largest_empty_cap(p).radius; }

UnitVector reflect_over_great_circle(const Vec3& x, const Vec3& y, const Vec3& z) {
  Vec3 n = cross(y, z);
  const double nn = norm(n);
  if (nn < 1e-12) throw DegenerateCircle("reflect_over_great_circle: y and z do not span a great circle");
  n = n * (1.0 / nn);
  return UnitVector(x - 2.0 * dot(x, n) * n);
}

double fejes_toth_bound(int n) {
  if (n < 4) throw DomainError("fejes_toth_bound: n must be at least 4");
  const double c = std::cos(kPi * n / (3.0 * n - 6.0));
  return std::acos(std::clamp(c / (1.0 - c), -1.0, 1.0));
}

}  // namespace tammes::geom
