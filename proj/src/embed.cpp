#include "tammes/embed.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "tammes/lp.hpp"

namespace tammes {

using geom::angular_dist;
using geom::kPi;
using geom::kTwoPi;

const char* to_string(EmbedStatus s) {
  switch (s) {
    case EmbedStatus::Embedded:
      return "embedded";
    case EmbedStatus::NoSolution:
      return "no_solution";
    case EmbedStatus::VerificationFailed:
      return "verification_failed";
  }
  return "unknown";
}

namespace {

// Reduced unknowns: x[0] = d, then one angle per rhombus and m - 3 free
// angles per larger face, in face order.
class ReducedSystem {
 public:
  ReducedSystem(const AngleSystem& sys, const Box& box) : sys_(sys) {
    const auto& faces = sys.graph.faces();
    lo_.push_back(box.lo[sys.d_var]);
    hi_.push_back(box.hi[sys.d_var]);
    first_.resize(faces.size(), -1);
    for (std::size_t f = 0; f < faces.size(); ++f) {
      const int m = static_cast<int>(faces[f].size());
      const int k = m == 3 ? 0 : (m == 4 ? 1 : m - 3);
      if (k > 0) first_[f] = static_cast<int>(lo_.size());
      for (int i = 0; i < k; ++i) {
        lo_.push_back(box.lo[sys.face_vars[f][i]]);
        hi_.push_back(std::min(box.hi[sys.face_vars[f][i]], kPi - 1e-9));
      }
    }
    if (!faces.empty()) {
      bool quads = false;
      for (const auto& f : faces) quads = quads || f.size() == 4;
      if (quads) hi_[0] = std::min(hi_[0], kPi / 2 - 1e-9);
    }
    for (int v = 0; v < sys.graph.n(); ++v)
      if (!sys.vertex_vars[v].empty()) rows_.push_back(v);
  }

  [[nodiscard]] int size() const { return static_cast<int>(lo_.size()); }
  [[nodiscard]] int rows() const { return static_cast<int>(rows_.size()); }
  [[nodiscard]] const std::vector<double>& lo() const { return lo_; }
  [[nodiscard]] const std::vector<double>& hi() const { return hi_; }

  void clamp(Eigen::VectorXd& x) const {
    for (int i = 0; i < size(); ++i) x[i] = std::clamp(x[i], lo_[i], hi_[i]);
  }

  // Interior angles per face; false if some polygon does not close.
  bool angles(const Eigen::VectorXd& x, std::vector<std::vector<double>>& out) const {
    const double d = x[0];
    const auto& faces = sys_.graph.faces();
    out.resize(faces.size());
    try {
      for (std::size_t f = 0; f < faces.size(); ++f) {
        const int m = static_cast<int>(faces[f].size());
        auto& a = out[f];
        if (m == 3) {
          a.assign(3, geom::alpha(d));
        } else if (m == 4) {
          const double u = x[first_[f]], w = geom::rho(u, d);
          a = {u, w, u, w};
        } else {
          std::vector<double> fr(x.data() + first_[f], x.data() + first_[f] + (m - 3));
          a = geom::polygon_embed(fr, d, m).angles;
        }
      }
    } catch (const geom::NoClosure&) {
      return false;
    } catch (const geom::DomainError&) {
      return false;
    }
    return true;
  }

  [[nodiscard]] bool feasible_start(const Eigen::VectorXd& x) const {
    std::vector<std::vector<double>> a;
    return angles(x, a);
  }

  // Moves the free angles of each larger face to the regular polygon angle
  // for the current d, blended toward the existing value by `keep`.
  void regularize(Eigen::VectorXd& x, double keep) const {
    const auto& faces = sys_.graph.faces();
    for (std::size_t f = 0; f < faces.size(); ++f) {
      const int m = static_cast<int>(faces[f].size());
      if (m < 5) continue;
      const double c = std::cos(kPi / m) / std::cos(x[0] / 2);
      if (c >= 1.0) continue;
      const double reg = 2.0 * std::asin(c);
      for (int i = 0; i < m - 3; ++i) {
        const int k = first_[f] + i;
        x[k] = std::clamp(keep * x[k] + (1.0 - keep) * reg, lo_[k], hi_[k]);
      }
    }
  }

  bool residual(const Eigen::VectorXd& x, Eigen::VectorXd& r) const {
    std::vector<std::vector<double>> a;
    if (!angles(x, a)) return false;
    r.resize(rows());
    const auto& g = sys_.graph;
    for (int k = 0; k < rows(); ++k) {
      const int v = rows_[k];
      double s = -kTwoPi;
      for (int c = 0; c < g.degree(v); ++c) {
        const auto [f, pos] = g.corner(v, c);
        s += a[f][pos];
      }
      r[k] = s;
    }
    return true;
  }

 private:
  const AngleSystem& sys_;
  std::vector<double> lo_, hi_;
  std::vector<int> first_;
  std::vector<int> rows_;
};

double max_abs(const Eigen::VectorXd& r) { return r.size() ? r.cwiseAbs().maxCoeff() : 0.0; }

// Box-projected Levenberg-Marquardt with a forward-difference Jacobian.
bool solve_lm(const ReducedSystem& rs, Eigen::VectorXd& x, const EmbedOptions& opt, double& res) {
  rs.clamp(x);
  Eigen::VectorXd r;
  if (!rs.residual(x, r)) return false;
  double mu = 1e-3;
  const int n = rs.size();
  for (int it = 0; it < opt.max_iterations && max_abs(r) > 1e-14; ++it) {
    Eigen::MatrixXd J(rs.rows(), n);
    for (int j = 0; j < n; ++j) {
      double h = 1e-7 * std::max(1.0, std::abs(x[j]));
      if (x[j] + h > rs.hi()[j]) h = -h;
      Eigen::VectorXd xp = x, rp;
      xp[j] += h;
      if (rs.residual(xp, rp))
        J.col(j) = (rp - r) / h;
      else
        J.col(j).setZero();
    }
    const Eigen::MatrixXd A = J.transpose() * J;
    const Eigen::VectorXd grad = J.transpose() * r;
    bool accepted = false;
    for (int trial = 0; trial < 12; ++trial) {
      Eigen::MatrixXd M = A;
      for (int j = 0; j < n; ++j) M(j, j) += mu * (A(j, j) + 1e-9);
      Eigen::VectorXd xn = x - M.ldlt().solve(grad);
      rs.clamp(xn);
      Eigen::VectorXd rn;
      if (rs.residual(xn, rn) && rn.squaredNorm() < r.squaredNorm()) {
        const double step = (xn - x).norm();
        x = std::move(xn);
        r = std::move(rn);
        mu = std::max(mu / 3.0, 1e-12);
        accepted = step > 1e-16;
        break;
      }
      mu *= 10.0;
    }
    if (!accepted) break;
  }
  res = max_abs(r);
  return res < opt.residual_tol;
}

struct Placement {
  std::vector<geom::UnitVector> pts;
  std::string error;
};

Placement place(const AngleSystem& sys, const std::vector<std::vector<double>>& angles, double d) {
  const auto& g = sys.graph;
  const auto& faces = g.faces();
  Placement out;
  out.pts.resize(g.n());
  std::vector<char> placed(g.n(), 0), done(faces.size(), 0);
  std::size_t root = 0;
  for (std::size_t f = 1; f < faces.size(); ++f)
    if (faces[f].size() > faces[root].size()) root = f;

  auto walk = [&](std::size_t f, std::size_t p, const geom::Vec3& a, const geom::Vec3& b) {
    const auto& face = faces[f];
    const std::size_t m = face.size();
    std::vector<double> rot(m);
    for (std::size_t i = 0; i < m; ++i) rot[i] = angles[f][(p + i) % m];
    const auto ring = geom::walk_polygon(a, b, d, rot);
    for (std::size_t i = 0; i < m; ++i) {
      const int v = face[(p + i) % m];
      if (!placed[v]) {
        out.pts[v] = ring[i];
        placed[v] = 1;
      } else if (angular_dist(out.pts[v], ring[i]) > 1e-7) {
        out.error = "faces disagree on a vertex position";
        return false;
      }
    }
    done[f] = 1;
    return true;
  };

  if (faces.empty()) return out;
  if (!walk(root, 0, geom::Vec3{0, 0, 1}, geom::Vec3{std::sin(d), 0, std::cos(d)})) return out;
  for (bool progress = true; progress;) {
    progress = false;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (done[f]) continue;
      const auto& face = faces[f];
      const std::size_t m = face.size();
      for (std::size_t p = 0; p < m; ++p) {
        const int a = face[p], b = face[(p + 1) % m];
        if (placed[a] && placed[b]) {
          if (!walk(f, p, out.pts[a], out.pts[b])) return out;
          progress = true;
          break;
        }
      }
    }
  }
  for (std::size_t f = 0; f < faces.size(); ++f)
    if (!done[f]) out.error = "face not reachable from the root";

  for (auto [v, f] : g.isolated()) {
    geom::SphericalPolygon poly;
    poly.side = d;
    for (std::size_t i = 0; i < faces[f].size(); ++i) poly.vertices.push_back(out.pts[faces[f][i]]);
    poly.angles = angles[f];
    const auto cap = geom::largest_empty_cap(poly);
    out.pts[v] = cap.center;
    placed[v] = 1;
  }
  return out;
}

std::string verify(const AngleSystem& sys, const std::vector<geom::UnitVector>& pts, double d,
                   const EmbedOptions& opt) {
  const auto& g = sys.graph;
  for (int i = 0; i < g.n(); ++i)
    for (int j = i + 1; j < g.n(); ++j) {
      const double dist = angular_dist(pts[i], pts[j]);
      if (g.has_edge(i, j)) {
        if (std::abs(dist - d) > opt.edge_tol) return "edge length differs from d";
      } else if (dist <= d + opt.contact_tol) {
        return "non-adjacent pair at distance <= d";
      }
    }
  return {};
}

}  // namespace

EmbedResult nonlinear_embed(const AngleSystem& sys, const Box& box, const EmbedOptions& opt) {
  EmbedResult res;
  const ReducedSystem rs(sys, box);
  for (int i = 0; i < rs.size(); ++i)
    if (rs.lo()[i] > rs.hi()[i]) {
      res.detail = "empty parameter box";
      return res;
    }
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double best_res = std::numeric_limits<double>::infinity();
  bool converged_any = false;
  for (int start = 0; start <= opt.perturbed_starts; ++start) {
    Eigen::VectorXd x(rs.size());
    for (int i = 0; i < rs.size(); ++i) {
      const double t = start == 0 ? 0.5 : unit(rng);
      x[i] = rs.lo()[i] + t * (rs.hi()[i] - rs.lo()[i]);
    }
    // Closure often fails at the box center for pentagons and hexagons; the
    // regular polygon angles are a better center for those faces.
    if (start == 0 || !rs.feasible_start(x)) rs.regularize(x, start == 0 ? 0.0 : unit(rng));
    double r = std::numeric_limits<double>::infinity();
    const bool ok = solve_lm(rs, x, opt, r);
    if (std::isfinite(r)) best_res = std::min(best_res, r);
    if (!ok) continue;
    converged_any = true;
    std::vector<std::vector<double>> angles;
    rs.angles(x, angles);
    const double d = x[0];
    auto placement = place(sys, angles, d);
    std::string err = placement.error;
    if (err.empty()) err = verify(sys, placement.pts, d, opt);
    if (err.empty()) {
      try {
        Configuration c(placement.pts);
        res.status = EmbedStatus::Embedded;
        res.config = std::move(c);
        res.d = d;
        res.residual = r;
        res.start = start;
        res.detail.clear();
        return res;
      } catch (const ConfigError& e) {
        err = e.what();
      }
    }
    if (res.detail.empty()) {
      res.detail = err;
      res.d = d;
      res.residual = r;
      res.start = start;
    }
  }
  if (converged_any) {
    res.status = EmbedStatus::VerificationFailed;
  } else {
    res.status = EmbedStatus::NoSolution;
    res.residual = best_res;
    res.detail = "no start converged";
  }
  return res;
}

PlanarGraph planar_contact_graph(const Configuration& c, double tol) {
  const auto adj = contact_graph(c, tol).adjacency();
  std::vector<std::vector<int>> rot(c.n());
  for (int i = 0; i < c.n(); ++i) {
    const auto basis = geom::tangent_basis(c[i]);
    std::vector<std::pair<double, int>> by_angle;
    for (int j : adj[i]) {
      const Vec3 e = geom::tangent_toward(c[i], c[j]);
      by_angle.emplace_back(std::atan2(dot(e, basis.e2), dot(e, basis.e1)), j);
    }
    std::sort(by_angle.begin(), by_angle.end());
    for (auto [a, j] : by_angle) rot[i].push_back(j);
  }
  // Faces of the non-isolated part, to locate isolated points.
  std::vector<int> live, index(c.n(), -1);
  for (int i = 0; i < c.n(); ++i)
    if (!rot[i].empty()) {
      index[i] = static_cast<int>(live.size());
      live.push_back(i);
    }
  std::vector<std::pair<int, int>> iso;
  if (live.size() < static_cast<std::size_t>(c.n())) {
    std::vector<std::vector<int>> packed;
    for (int i : live) {
      std::vector<int> r;
      for (int j : rot[i]) r.push_back(index[j]);
      packed.push_back(std::move(r));
    }
    const PlanarGraph part = PlanarGraph::from_rotation(packed);
    // Face indices of `part` and of the full graph agree: the full graph
    // traces the same darts in the same vertex order after relabeling back.
    for (int i = 0; i < c.n(); ++i) {
      if (!rot[i].empty()) continue;
      int host = -1;
      for (std::size_t f = 0; f < part.faces().size() && host < 0; ++f) {
        geom::SphericalPolygon poly;
        for (int v : part.faces()[f]) poly.vertices.push_back(c[live[v]]);
        if (poly.size() >= 3 && geom::polygon_contains(poly, c[i], 1e-12)) host = static_cast<int>(f);
      }
      if (host < 0) throw InvalidEmbedding("isolated point lies in no face of the contact graph");
      iso.emplace_back(i, host);
    }
  }
  if (iso.empty()) return PlanarGraph::from_rotation(std::move(rot));
  return PlanarGraph::from_rotation(std::move(rot), std::move(iso));
}

// ---------------------------------------------------------------------------
// Optimizer

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double min_dist(const std::vector<Vec3>& x) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) m = std::min(m, angular_dist(x[i], x[j]));
  return m;
}

Vec3 unit(const Vec3& v) { return v * (1.0 / norm(v)); }

void repel(std::vector<Vec3>& x) {
  const std::size_t n = x.size();
  std::vector<Vec3> f(n);
  double step = 0.1;
  for (int it = 0; it < 60; ++it, step *= 0.95) {
    double fmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Vec3 acc;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const Vec3 dv = x[i] - x[j];
        const double r2 = std::max(dot(dv, dv), 1e-12);
        acc += dv * (1.0 / (r2 * r2 * r2));
      }
      f[i] = acc - x[i] * dot(acc, x[i]);
      fmax = std::max(fmax, norm(f[i]));
    }
    if (fmax == 0.0) break;
    for (std::size_t i = 0; i < n; ++i) x[i] = unit(x[i] + f[i] * (step / fmax));
  }
}

struct RestartResult {
  std::vector<Vec3> pts;
  double psi = 0.0;
  std::vector<OptimizeStep> trace;
};

RestartResult run_restart(int n, int restart, const OptimizeOptions& opt) {
  std::mt19937_64 rng(splitmix64(opt.seed + static_cast<std::uint64_t>(restart)));
  std::normal_distribution<double> normal;
  std::vector<Vec3> x(n);
  for (auto& p : x) {
    do {
      p = {normal(rng), normal(rng), normal(rng)};
    } while (norm(p) < 1e-6);
    p = unit(p);
  }
  repel(x);

  RestartResult out;
  double psi = min_dist(x);
  if (opt.trace) out.trace.push_back({restart, 0, psi});
  double radius = 0.05, active = opt.active;
  lp::Options lpo;
  lpo.slack = 0.0;
  lpo.tolerance = 1e-12;
  std::vector<geom::TangentBasis> basis(n);
  for (int it = 1; it <= opt.max_iterations; ++it) {
    for (int i = 0; i < n; ++i) basis[i] = geom::tangent_basis(x[i]);
    lp::LinearProgram prog;
    for (int i = 0; i < n; ++i) {
      prog.add_var(-radius, radius);
      prog.add_var(-radius, radius);
    }
    const int t = prog.add_var(-1.0, 1.0);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double dij = angular_dist(x[i], x[j]);
        if (dij > psi + active) continue;
        const Vec3 eij = geom::tangent_toward(x[i], x[j]), eji = geom::tangent_toward(x[j], x[i]);
        prog.add_row({{2 * i, -dot(eij, basis[i].e1)},
                      {2 * i + 1, -dot(eij, basis[i].e2)},
                      {2 * j, -dot(eji, basis[j].e1)},
                      {2 * j + 1, -dot(eji, basis[j].e2)},
                      {t, -1.0}},
                     lp::Sense::GreaterEqual, psi - dij);
      }
    std::vector<double> c(prog.num_vars(), 0.0), sol;
    c[t] = -1.0;
    double gain = 0.0;
    try {
      lp::Solver s(prog, lpo);
      if (s.feasible()) gain = -s.minimize(c, &sol);
    } catch (const lp::NumericFailure&) {
      gain = 0.0;
    }
    bool improved = false;
    if (gain > 1e-15 && !sol.empty()) {
      std::vector<Vec3> y(n);
      for (int i = 0; i < n; ++i) y[i] = unit(x[i] + basis[i].e1 * sol[2 * i] + basis[i].e2 * sol[2 * i + 1]);
      const double py = min_dist(y);
      if (py > psi) {
        x = std::move(y);
        psi = py;
        improved = true;
        if (opt.trace) out.trace.push_back({restart, it, psi});
      }
    }
    if (improved) {
      radius = std::min(0.1, radius * 1.5);
    } else {
      radius *= 0.5;
      if (radius < 1e-13) {
        if (active < 1e-8) break;
        active *= 0.1;
        radius = 1e-4;
      }
    }
  }
  out.pts = std::move(x);
  out.psi = psi;
  return out;
}

}  // namespace

OptimizeResult tammes_optimize(int n, const OptimizeOptions& opt) {
  if (n < 2) throw ConfigError("tammes_optimize: need at least two points");
  const int restarts = std::max(1, opt.restarts);
  std::vector<RestartResult> runs(restarts);
  const int threads = std::clamp(opt.threads, 1, restarts);
  if (threads == 1) {
    for (int r = 0; r < restarts; ++r) runs[r] = run_restart(n, r, opt);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (int r = w; r < restarts; r += threads) runs[r] = run_restart(n, r, opt);
      });
    for (auto& th : pool) th.join();
  }
  OptimizeResult res;
  int best = 0;
  for (int r = 0; r < restarts; ++r) {
    res.restart_psi.push_back(runs[r].psi);
    if (runs[r].psi > runs[best].psi) best = r;
    if (opt.trace) res.trace.insert(res.trace.end(), runs[r].trace.begin(), runs[r].trace.end());
  }
  std::vector<UnitVector> pts;
  for (const auto& p : runs[best].pts) pts.emplace_back(p);
  res.best = Configuration(std::move(pts));
  res.best_restart = best;
  return res;
}

Configuration tammes_optimize(int n, int restarts, std::uint64_t seed) {
  OptimizeOptions opt;
  opt.restarts = restarts;
  opt.seed = seed;
  return tammes_optimize(n, opt).best;
}

}  // namespace tammes
