#include "tammes/prune.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace tammes {

using geom::kPi;
using geom::kTwoPi;

bool Box::contains(const std::vector<double>& x, double tol) const {
  if (x.size() != lo.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
  return true;
}

std::vector<double> Box::center() const {
  std::vector<double> c(lo.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.5 * (lo[i] + hi[i]);
  return c;
}

namespace {

constexpr double kQuadSideCap = kPi / 2 - 1e-9;

// Sampled linear enclosure of a vector-valued function over a box:
// f(x) - (c0 + coef.x) lies in [rmin - margin, rmax + margin] for each output.
struct Enclosure {
  bool ok = false;
  std::vector<std::vector<double>> coef;
  std::vector<double> c0, rmin, rmax, fmax, margin;
};

using SampleFn = std::function<bool(const std::vector<double>&, std::vector<double>&)>;

Enclosure enclose(const std::vector<double>& lo, const std::vector<double>& hi, int grid, int nout,
                  const SampleFn& f) {
  const int k = static_cast<int>(lo.size());
  std::vector<int> steps(k);
  long total = 1;
  for (int j = 0; j < k; ++j) {
    steps[j] = hi[j] > lo[j] ? grid : 1;
    total *= steps[j];
  }
  std::vector<std::vector<double>> pts(total, std::vector<double>(k));
  Eigen::MatrixXd vals(total, nout);
  Eigen::MatrixXd design(total, k + 1);
  std::vector<double> out(nout);
  for (long p = 0; p < total; ++p) {
    long rem = p;
    design(p, k) = 1.0;
    for (int j = 0; j < k; ++j) {
      const int idx = static_cast<int>(rem % steps[j]);
      rem /= steps[j];
      const double t = steps[j] == 1 ? 0.0 : static_cast<double>(idx) / (steps[j] - 1);
      pts[p][j] = lo[j] + t * (hi[j] - lo[j]);
      design(p, j) = steps[j] == 1 ? 0.0 : 2.0 * t - 1.0;
    }
    if (!f(pts[p], out)) return {};
    for (int o = 0; o < nout; ++o) {
      if (!std::isfinite(out[o])) return {};
      vals(p, o) = out[o];
    }
  }
  const Eigen::MatrixXd fit = design.completeOrthogonalDecomposition().solve(vals);
  const Eigen::MatrixXd resid = vals - design * fit;

  Enclosure e;
  e.ok = true;
  e.coef.assign(nout, std::vector<double>(k, 0.0));
  e.c0.resize(nout);
  e.rmin.resize(nout);
  e.rmax.resize(nout);
  e.fmax.resize(nout);
  e.margin.assign(nout, 0.0);
  for (int o = 0; o < nout; ++o) {
    // Undo the [-1, 1] scaling: t_j = (2 x_j - lo_j - hi_j) / w_j.
    double c0 = fit(k, o);
    for (int j = 0; j < k; ++j) {
      if (steps[j] == 1) continue;
      const double w = hi[j] - lo[j];
      e.coef[o][j] = 2.0 * fit(j, o) / w;
      c0 -= fit(j, o) * (lo[j] + hi[j]) / w;
    }
    e.c0[o] = c0;
    e.rmin[o] = resid.col(o).minCoeff();
    e.rmax[o] = resid.col(o).maxCoeff();
    e.fmax[o] = vals.col(o).maxCoeff();
  }
  // Margin: the largest residual change between grid neighbors along each
  // axis, summed over axes, bounds the excursion inside a grid cell for a
  // function whose slope does not vary much across one cell.
  long stride = 1;
  for (int j = 0; j < k; ++j) {
    if (steps[j] > 1) {
      std::vector<double> axis_max(nout, 0.0);
      for (long p = 0; p < total; ++p) {
        if ((p / stride) % steps[j] == steps[j] - 1) continue;
        for (int o = 0; o < nout; ++o)
          axis_max[o] = std::max(axis_max[o], std::abs(resid(p + stride, o) - resid(p, o)));
      }
      for (int o = 0; o < nout; ++o) e.margin[o] += axis_max[o];
    }
    stride *= steps[j];
  }
  for (int o = 0; o < nout; ++o) e.margin[o] += 1e-12 * (1.0 + std::abs(e.fmax[o]));
  return e;
}

using Terms = std::vector<std::pair<int, double>>;

// target - L(params) in [c0 + rmin - margin, c0 + rmax + margin].
void add_band(lp::LinearProgram& lp, int target, const std::vector<int>& params, const Enclosure& e, int o,
              bool lower_only = false) {
  Terms t{{target, 1.0}};
  for (std::size_t j = 0; j < params.size(); ++j)
    if (e.coef[o][j] != 0.0) t.emplace_back(params[j], -e.coef[o][j]);
  lp.add_row(t, lp::Sense::GreaterEqual, e.c0[o] + e.rmin[o] - e.margin[o]);
  if (!lower_only) lp.add_row(t, lp::Sense::LessEqual, e.c0[o] + e.rmax[o] + e.margin[o]);
}

// Upper envelope of the output must be nonnegative: L(params) >= -(c0 + rmax + margin).
void add_nonnegative(lp::LinearProgram& lp, const std::vector<int>& params, const Enclosure& e, int o) {
  Terms t;
  for (std::size_t j = 0; j < params.size(); ++j)
    if (e.coef[o][j] != 0.0) t.emplace_back(params[j], e.coef[o][j]);
  const double rhs = -(e.c0[o] + e.rmax[o] + e.margin[o]);
  if (t.empty()) return;
  lp.add_row(t, lp::Sense::GreaterEqual, rhs);
}

}  // namespace

std::pair<AngleSystem, Box> build_system(const PlanarGraph& g, double d_lo, double d_hi) {
  AngleSystem sys;
  sys.graph = g;
  int next = 0;
  for (const auto& f : g.faces()) {
    std::vector<int> vars(f.size());
    for (auto& v : vars) v = next++;
    sys.face_vars.push_back(std::move(vars));
  }
  sys.d_var = next;
  sys.vertex_vars.resize(g.n());
  for (int v = 0; v < g.n(); ++v)
    for (int k = 0; k < g.degree(v); ++k) {
      const auto [f, pos] = g.corner(v, k);
      sys.vertex_vars[v].push_back(sys.face_vars[f][pos]);
    }

  const double a_lo = geom::alpha(d_lo), a_hi = geom::alpha(d_hi);
  const double top = kPi - CutOptions{}.angle_margin;
  Box box;
  box.lo.assign(sys.num_vars(), a_lo);
  box.hi.assign(sys.num_vars(), top);
  for (std::size_t f = 0; f < g.faces().size(); ++f) {
    const auto m = g.faces()[f].size();
    for (int var : sys.face_vars[f]) {
      if (m == 3) box.hi[var] = a_hi;
      if (m == 4) box.hi[var] = std::min(top, 2.0 * a_hi);
    }
  }
  box.lo[sys.d_var] = d_lo;
  box.hi[sys.d_var] = d_hi;
  return {std::move(sys), std::move(box)};
}

Relaxation add_linear_constraints(const AngleSystem& sys, const Box& box, const CutOptions& opt) {
  Relaxation rel;
  auto& lp = rel.lp;
  lp.lo = box.lo;
  lp.hi = box.hi;
  const int dv = sys.d_var;
  const auto& g = sys.graph;
  auto fail = [&](const char* why) {
    rel.proven_empty = true;
    rel.reason = why;
    return rel;
  };

  for (const auto& f : g.faces()) {
    const int m = static_cast<int>(f.size());
    // Convex spherical polygons have perimeter below 2 pi; rhombi need cos d > 0.
    lp.hi[dv] = std::min(lp.hi[dv], kTwoPi / m);
    if (m == 4) lp.hi[dv] = std::min(lp.hi[dv], kPi / 2);
  }
  if (lp.hi[dv] < lp.lo[dv]) return fail("perimeter");
  const double d_lo = lp.lo[dv], d_hi = lp.hi[dv];

  for (int v = 0; v < g.n(); ++v) {
    if (sys.vertex_vars[v].empty()) continue;
    Terms t;
    for (int var : sys.vertex_vars[v]) t.emplace_back(var, 1.0);
    lp.add_row(t, lp::Sense::Equal, kTwoPi);
  }

  // alpha(d) band: exact for triangle corners, a lower bound for all others.
  const Enclosure ae = enclose({d_lo}, {d_hi}, 9, 1, [](const std::vector<double>& x, std::vector<double>& out) {
    out[0] = geom::alpha(x[0]);
    return true;
  });
  for (std::size_t f = 0; f < g.faces().size(); ++f) {
    const bool tri = g.faces()[f].size() == 3;
    for (int var : sys.face_vars[f]) add_band(lp, var, {dv}, ae, 0, !tri);
  }

  for (std::size_t fi = 0; fi < g.faces().size(); ++fi) {
    const auto& face = g.faces()[fi];
    const auto& fv = sys.face_vars[fi];
    const int m = static_cast<int>(face.size());
    if (m == 3) continue;

    if (m == 4) {
      if (d_lo >= kQuadSideCap) return fail("rhombus side");
      const double dq_hi = std::min(d_hi, kQuadSideCap);
      lp.add_row({{fv[2], 1.0}, {fv[0], -1.0}}, lp::Sense::Equal, 0.0);
      lp.add_row({{fv[3], 1.0}, {fv[1], -1.0}}, lp::Sense::Equal, 0.0);
      for (int s = 0; s < 2; ++s) {
        const int a = fv[s], b = fv[1 - s];
        const double u_lo = lp.lo[a], u_hi = std::min(lp.hi[a], kPi - 1e-12);
        const auto range = geom::rhombus_pair_sum_range(u_lo, u_hi, d_lo, dq_hi);
        lp.add_row({{a, 1.0}, {b, 1.0}}, lp::Sense::GreaterEqual, range[0]);
        lp.add_row({{a, 1.0}, {b, 1.0}}, lp::Sense::LessEqual, range[1]);
        const Enclosure re = enclose({u_lo, d_lo}, {u_hi, dq_hi}, 5, 1,
                                     [](const std::vector<double>& x, std::vector<double>& out) {
                                       out[0] = geom::rho(x[0], x[1]);
                                       return true;
                                     });
        if (re.ok) add_band(lp, b, {a, dv}, re, 0);
      }
      continue;
    }

    const int s = m - 3;
    std::vector<int> params(fv.begin(), fv.begin() + s);
    params.push_back(dv);
    std::vector<double> plo, phi;
    for (int var : params) {
      plo.push_back(lp.lo[var]);
      phi.push_back(lp.hi[var]);
    }
    phi.back() = d_hi;
    plo.back() = d_lo;
    std::vector<std::pair<int, int>> diagonals;
    for (int i = 0; i < m; ++i)
      for (int j = i + 2; j < m; ++j)
        if (!(i == 0 && j == m - 1)) diagonals.emplace_back(i, j);
    bool hosts = false;
    for (auto [iv, hf] : g.isolated())
      if (hf == static_cast<int>(fi)) hosts = true;
    const int nout = 3 + static_cast<int>(diagonals.size()) + (hosts ? 1 : 0);
    const Enclosure pe =
        enclose(plo, phi, opt.grid, nout, [&](const std::vector<double>& x, std::vector<double>& out) {
          try {
            const auto p = geom::polygon_embed(std::span<const double>(x.data(), s), x[s], m);
            int o = 0;
            for (int i = s; i < m; ++i) out[o++] = p.angles[i];
            for (auto [i, j] : diagonals) out[o++] = geom::polygon_diagonal(p, i, j) - x[s];
            if (hosts) out[o++] = geom::lambda_max_min(p) - x[s];
            return true;
          } catch (const geom::NoClosure&) {
            return false;
          } catch (const geom::DomainError&) {
            return false;
          }
        });
    if (!pe.ok) {
      ++rel.skipped_faces;
      continue;
    }
    int o = 0;
    for (int i = s; i < m; ++i) add_band(lp, fv[i], params, pe, o++);
    for (std::size_t q = 0; q < diagonals.size(); ++q, ++o) {
      if (pe.fmax[o] + pe.margin[o] < 0.0) return fail("diagonal");
      add_nonnegative(lp, params, pe, o);
    }
    if (hosts && pe.fmax[o] + pe.margin[o] < 0.0) return fail("isolated vertex");
  }
  return rel;
}

Feasibility lp_feasible(const Relaxation& rel, const Box& box, const lp::Options& opt) {
  Feasibility out;
  out.box = box;
  if (rel.proven_empty) {
    out.feasible = false;
    return out;
  }
  const auto r = lp::variable_ranges(rel.lp, opt);
  out.feasible = r.feasible;
  out.tightened = r.tightened;
  if (r.feasible && r.tightened) {
    for (std::size_t i = 0; i < box.size(); ++i) {
      out.box.lo[i] = std::max(box.lo[i], r.lo[i]);
      out.box.hi[i] = std::min(box.hi[i], r.hi[i]);
      if (out.box.lo[i] > out.box.hi[i]) out.box.lo[i] = out.box.hi[i] = 0.5 * (r.lo[i] + r.hi[i]);
    }
  }
  return out;
}

PruneOutcome prune_graph(const PlanarGraph& g, const PruneOptions& opt) {
  PruneOutcome res;
  auto [sys, root] = build_system(g, opt.d_lo, opt.d_hi);
  std::vector<double> w0(root.size());
  for (std::size_t i = 0; i < w0.size(); ++i) w0[i] = root.hi[i] - root.lo[i];

  struct Node {
    Box box;
    int depth;
  };
  std::vector<Node> stack{{root, 0}};
  while (!stack.empty()) {
    Node node = std::move(stack.back());
    stack.pop_back();
    if (res.nodes >= opt.max_nodes) {
      res.budget_exhausted = true;
      res.survivors.push_back(std::move(node.box));
      continue;
    }
    ++res.nodes;
    Box cur = std::move(node.box);
    bool dead = false;
    std::string why;
    for (int round = 0; round < opt.tighten_rounds; ++round) {
      const Relaxation rel = add_linear_constraints(sys, cur, opt.cuts);
      if (rel.proven_empty) {
        dead = true;
        why = rel.reason;
        break;
      }
      Feasibility f = lp_feasible(rel, cur, opt.lp);
      if (!f.feasible) {
        dead = true;
        why = "linear relaxation";
        break;
      }
      if (!f.tightened) break;
      double progress = 0.0;
      for (std::size_t i = 0; i < cur.size(); ++i)
        if (w0[i] > 0.0) progress = std::max(progress, ((cur.hi[i] - cur.lo[i]) - (f.box.hi[i] - f.box.lo[i])) / w0[i]);
      cur = std::move(f.box);
      if (progress < 1e-3) break;
    }
    if (dead) {
      if (node.depth == 0) res.reason = why;
      continue;
    }
    int best = -1;
    double best_rel = 0.0, max_abs = 0.0;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      const double w = cur.hi[i] - cur.lo[i];
      max_abs = std::max(max_abs, w);
      if (w0[i] <= 0.0) continue;
      if (w / w0[i] > best_rel) {
        best_rel = w / w0[i];
        best = static_cast<int>(i);
      }
    }
    if (node.depth >= opt.max_depth || best < 0 || best_rel < opt.min_relative_width || max_abs < opt.min_width) {
      res.survivors.push_back(std::move(cur));
      continue;
    }
    const double mid = 0.5 * (cur.lo[best] + cur.hi[best]);
    Box left = cur, right = std::move(cur);
    left.hi[best] = mid;
    right.lo[best] = mid;
    res.depth = std::max(res.depth, node.depth + 1);
    stack.push_back({std::move(right), node.depth + 1});
    stack.push_back({std::move(left), node.depth + 1});
  }
  res.eliminated = res.survivors.empty();
  if (!res.eliminated) res.reason.clear();
  else if (res.reason.empty()) res.reason = "all branches";
  return res;
}

std::vector<double> corner_values(const AngleSystem& sys, const std::vector<geom::UnitVector>& pts, double d) {
  std::vector<double> x(sys.num_vars());
  const auto& faces = sys.graph.faces();
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const auto& face = faces[f];
    const std::size_t m = face.size();
    for (std::size_t p = 0; p < m; ++p)
      x[sys.face_vars[f][p]] = geom::interior_angle(pts[face[(p + m - 1) % m]], pts[face[p]], pts[face[(p + 1) % m]]);
  }
  x[sys.d_var] = d;
  return x;
}

}  // namespace tammes
