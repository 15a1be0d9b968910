#include "tammes/maximality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tammes {

using geom::alpha;
using geom::kPi;
using geom::kTwoPi;
using geom::rho;

StressSystem tangent_frames(const Configuration& c, const std::vector<std::pair<int, int>>& edges, double pad) {
  StressSystem s;
  s.n = c.n();
  s.edges = edges;
  s.pad = pad;
  std::vector<geom::TangentBasis> basis(c.n());
  for (int i = 0; i < c.n(); ++i) {
    basis[i] = geom::tangent_basis(c[i]);
    if (std::abs(norm(basis[i].e1) - 1.0) > 1e-9) throw DegenerateTangent("tangent basis is not orthonormal");
  }
  for (auto [a, b] : edges) {
    for (auto [i, j] : {std::pair{a, b}, std::pair{b, a}}) {
      const Vec3 e = geom::tangent_toward(c[i], c[j]);
      TangentEnclosure t;
      t.i = i;
      t.j = j;
      t.c = dot(e, basis[i].e1);
      t.s = dot(e, basis[i].e2);
      t.p = t.c - pad;
      t.q = t.c + pad;
      t.u = t.s - pad;
      t.v = t.s + pad;
      s.enclosures.push_back(t);
    }
  }
  return s;
}

StressSystem tangent_frames(const Configuration& c, const ContactGraph& g, double pad) {
  return tangent_frames(c, g.edges, pad);
}

StressResult stress_lp_feasible(const StressSystem& s, const lp::Options& opt) {
  lp::LinearProgram prog;
  const int m = static_cast<int>(s.edges.size());
  for (int e = 0; e < m; ++e) prog.add_var(0.0, 1.0);
  // Per vertex, one term list for each of p, q, u, v.
  std::vector<std::array<std::vector<std::pair<int, double>>, 4>> at(s.n);
  for (int e = 0; e < m; ++e)
    for (int k = 0; k < 2; ++k) {
      const auto& t = s.enclosures[2 * e + k];
      at[t.i][0].emplace_back(e, t.p);
      at[t.i][1].emplace_back(e, t.q);
      at[t.i][2].emplace_back(e, t.u);
      at[t.i][3].emplace_back(e, t.v);
    }
  for (auto& rows : at) {
    if (rows[0].empty()) continue;
    prog.add_row(rows[0], lp::Sense::LessEqual, 0.0);
    prog.add_row(rows[1], lp::Sense::GreaterEqual, 0.0);
    prog.add_row(rows[2], lp::Sense::LessEqual, 0.0);
    prog.add_row(rows[3], lp::Sense::GreaterEqual, 0.0);
  }
  std::vector<std::pair<int, double>> sum;
  for (int e = 0; e < m; ++e) sum.emplace_back(e, 1.0);
  prog.add_row(sum, lp::Sense::Equal, 1.0);

  StressResult r;
  if (m == 0) {
    r.feasible = false;
    return r;
  }
  try {
    lp::Solver solver(prog, opt);
    r.feasible = solver.feasible();
    if (r.feasible) r.omega = solver.point();
  } catch (const lp::NumericFailure&) {
    r.feasible = true;
    r.numeric_failure = true;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Symmetry curve

double CaseCurve::max_residual() const {
  double m = 0.0;
  for (double r : residuals) m = std::max(m, std::abs(r));
  return m;
}

double gamma2_f7(double x, double d) {
  const double a = alpha(d);
  return rho(kTwoPi - 2.0 * a - rho(kPi - a - x, d), d);
}

double gamma2_f8(double x, double d) { return gamma2_f7(-x, d); }

double gamma2_theta(double x) {
  constexpr double lo = 0.95, hi = 1.00;
  constexpr int samples = 64;
  auto h = [x](double d) { return gamma2_f7(x, d) + gamma2_f8(x, d) - kPi; };
  double a = 0.0, b = 0.0, ha = 0.0;
  int changes = 0;
  try {
    double prev = h(lo);
    for (int k = 1; k <= samples; ++k) {
      const double d = lo + (hi - lo) * k / samples;
      const double cur = h(d);
      if ((prev < 0.0) != (cur < 0.0)) {
        ++changes;
        a = d - (hi - lo) / samples;
        b = d;
        ha = prev;
      }
      prev = cur;
    }
  } catch (const geom::DomainError& e) {
    throw RootNotBracketed(std::string("theta: ") + e.what());
  }
  if (changes != 1) throw RootNotBracketed("theta: expected exactly one sign change of f7 + f8 - pi on [0.95, 1.00]");
  for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
    const double mid = 0.5 * (a + b);
    const double hm = h(mid);
    if ((hm < 0.0) == (ha < 0.0)) {
      a = mid;
      ha = hm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

CaseCurve gamma2_curve(double x, double a) {
  if (std::abs(x) > a) throw geom::DomainError("gamma2_curve: |x| exceeds the admissible range");
  CaseCurve c;
  c.x = x;
  const double d = c.d = gamma2_theta(x);
  auto& u = c.u;
  u.fill(std::numeric_limits<double>::quiet_NaN());
  u[0] = alpha(d);
  u[1] = kPi - u[0] - x;
  u[2] = kPi - u[0] + x;
  u[3] = rho(u[1], d);
  u[4] = rho(u[2], d);
  u[5] = kTwoPi - 2.0 * u[0] - u[3];
  u[6] = kTwoPi - 2.0 * u[0] - u[4];
  u[7] = rho(u[5], d);
  u[8] = rho(u[6], d);
  u[10] = kTwoPi - u[0] - u[7] - u[8];
  u[13] = kTwoPi - u[1] - 2.0 * u[7];
  u[12] = kTwoPi - u[2] - 2.0 * u[8];
  u[15] = rho(u[13], d);
  u[14] = rho(u[12], d);
  u[11] = kTwoPi - u[5] - u[15];

  auto& r = c.residuals;
  r[0] = u[0] - alpha(d);
  r[1] = u[1] + u[2] + 2.0 * u[0] - kTwoPi;
  r[2] = u[3] - rho(u[1], d);
  r[3] = u[4] - rho(u[2], d);
  r[4] = u[5] + u[3] + 2.0 * u[0] - kTwoPi;
  r[5] = u[6] + u[4] + 2.0 * u[0] - kTwoPi;
  r[6] = u[7] - rho(u[5], d);
  r[7] = u[8] - rho(u[6], d);
  r[8] = u[1] + u[13] + 2.0 * u[7] - kTwoPi;
  r[9] = u[2] + u[12] + 2.0 * u[8] - kTwoPi;
  r[10] = u[15] - rho(u[13], d);
  r[11] = u[14] - rho(u[12], d);
  r[12] = u[5] + u[15] + u[11] - kTwoPi;
  r[13] = u[6] + u[14] + u[11] - kTwoPi;
  r[14] = u[0] + u[10] + u[7] + u[8] - kTwoPi;
  r[15] = u[12] + u[13] + 2.0 * u[10] - kTwoPi;
  return c;
}

double gamma2_f13(double x) {
  const double d = gamma2_theta(x);
  return kPi + x + alpha(d) - 2.0 * gamma2_f7(x, d);
}

double gamma2_f12(double x) {
  const double d = gamma2_theta(x);
  return kPi - x + alpha(d) - 2.0 * gamma2_f8(x, d);
}

F13Derivative gamma2_f13_derivative(double step) {
  F13Derivative out;
  out.f13 = (gamma2_f13(step) - gamma2_f13(-step)) / (2.0 * step);
  out.f12 = (gamma2_f12(step) - gamma2_f12(-step)) / (2.0 * step);
  const double d = gamma2_theta(0.0);
  const double u1 = kPi - alpha(d);
  const double u5 = kTwoPi - 2.0 * alpha(d) - rho(u1, d);
  auto rho_u = [d](double u) {
    constexpr double h = 1e-6;
    return (rho(u + h, d) - rho(u - h, d)) / (2.0 * h);
  };
  out.rho_product = -2.0 * rho_u(u5) * rho_u(u1);
  return out;
}

Verdict symmetry_curve_verdict() {
  Verdict v;
  v.method = "symmetry_curve";
  const auto deriv = gamma2_f13_derivative();
  double worst_margin = -std::numeric_limits<double>::infinity();
  double worst_residual = 0.0;
  bool even = true;
  for (double x : {0.005, 0.01, 0.02, 0.03}) {
    const auto pos = gamma2_curve(x), neg = gamma2_curve(-x);
    worst_residual = std::max({worst_residual, pos.max_residual(), neg.max_residual()});
    even = even && std::abs(pos.d - neg.d) < 1e-10;
    // x > 0 pushes u13 below the triangle angle, x < 0 pushes u12 below it.
    worst_margin = std::max({worst_margin, pos.u[13] - pos.u[0], neg.u[12] - neg.u[0]});
  }
  const auto zero = gamma2_curve(0.0);
  const bool rejected = worst_margin < 0.0 && worst_residual < 1e-10 && even;
  v.verdict = rejected ? "rejected" : "maximal_candidate";
  v.details = {{"theta0", zero.d},
               {"f13_prime0", deriv.f13},
               {"f12_prime0", deriv.f12},
               {"rho_product", deriv.rho_product},
               {"max_angle_margin", worst_margin},
               {"max_residual", worst_residual}};
  v.note = "only x = 0 keeps all angles at least alpha(d); there the deleted edges have contact length";
  return v;
}

// ---------------------------------------------------------------------------
// Fourteen-point graphs

PlanarGraph gamma14_graph() {
  return PlanarGraph::from_faces(
      14, {{0, 6, 11},     {0, 11, 9},     {0, 9, 10, 1},  {0, 1, 4, 6},  {1, 10, 12, 2}, {1, 2, 4},
           {2, 12, 5, 7},  {2, 7, 4},      {3, 8, 11, 6},  {3, 6, 4, 7},  {3, 7, 5},      {3, 5, 8},
           {5, 12, 13, 8}, {8, 13, 9, 11}, {9, 13, 10},    {10, 13, 12}});
}

std::map<std::string, PlanarGraph> gamma14_variants(const PlanarGraph& base) {
  struct Diagonal {
    std::pair<int, int> edge;
    int tip_a, tip_b;
  };
  std::vector<Diagonal> diag;
  auto third = [&](int f, int a, int b) {
    for (int v : base.faces()[f])
      if (v != a && v != b) return v;
    return -1;
  };
  for (auto [a, b] : base.edges()) {
    const int f1 = base.dart_face(a, b), f2 = base.dart_face(b, a);
    if (base.faces()[f1].size() == 3 && base.faces()[f2].size() == 3)
      diag.push_back({{a, b}, third(f1, a, b), third(f2, a, b)});
  }
  if (diag.size() != 4) throw InvalidEmbedding("gamma14_variants: expected four adjacent triangle pairs");
  auto share = [](const Diagonal& x, const Diagonal& y) {
    return x.tip_a == y.tip_a || x.tip_a == y.tip_b || x.tip_b == y.tip_a || x.tip_b == y.tip_b;
  };
  std::map<std::string, PlanarGraph> out;
  out["0"] = base;
  out["1"] = base.remove_edges({diag[0].edge});
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) {
      const char* key = share(diag[i], diag[j]) ? "2" : "3";
      if (!out.count(key)) out[key] = base.remove_edges({diag[i].edge, diag[j].edge});
    }
  out["3b"] = base.remove_edges({diag[0].edge, diag[1].edge, diag[2].edge});
  out["4"] = base.remove_edges({diag[0].edge, diag[1].edge, diag[2].edge, diag[3].edge});
  return out;
}

Verdict verify_maximal(const PlanarGraph& g, const Configuration& c, const VerifyOptions& opt) {
  static const auto known = [] {
    const auto v = gamma14_variants(gamma14_graph());
    return std::pair{canonical_form(v.at("1")), canonical_form(v.at("2"))};
  }();
  const std::string canon = canonical_form(g);
  if (canon == known.second) {
    Verdict v = symmetry_curve_verdict();
    v.canonical = canon;
    return v;
  }
  if (canon == known.first) {
    const Verdict parent = symmetry_curve_verdict();
    Verdict v;
    v.canonical = canon;
    v.method = "subgraph";
    v.verdict = parent.verdict;
    v.details = parent.details;
    v.note = "has the two-pair graph as a spanning subgraph; inherits its verdict";
    return v;
  }

  if (g.n() != c.n()) throw ConfigError("verify_maximal: graph and configuration sizes differ");
  const auto edges = g.edges();
  double excess = 0.0;
  for (auto [i, j] : edges) excess = std::max(excess, geom::angular_dist(c[i], c[j]) - c.psi());
  if (excess > 1e-6) throw ConfigError("verify_maximal: a graph edge is not a contact of the configuration");
  const auto sys = tangent_frames(c, edges, opt.pad);
  const auto res = stress_lp_feasible(sys, opt.lp);
  Verdict v;
  v.canonical = canon;
  v.method = "stress_lp";
  v.verdict = res.feasible ? "maximal_candidate" : "rejected";
  v.details = {{"pad", opt.pad},
               {"edges", static_cast<double>(edges.size())},
               {"psi", c.psi()},
               {"max_edge_excess", excess},
               {"numeric_failure", res.numeric_failure ? 1.0 : 0.0}};
  return v;
}

}  // namespace tammes
