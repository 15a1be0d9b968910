#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fixture_graphs.hpp"
#include "tammes/contact.hpp"
#include "tammes/embed.hpp"
#include "tammes/geom.hpp"
#include "tammes/maximality.hpp"
#include "tammes/prune.hpp"

using namespace tammes;

namespace {

int corner_sum(const PlanarGraph& g) {
  int s = 0;
  for (const auto& f : g.faces()) s += static_cast<int>(f.size());
  return s;
}

bool row_holds(const lp::Row& r, const std::vector<double>& x, double tol) {
  double s = 0.0;
  for (const auto& [v, c] : r.terms) s += c * x[static_cast<std::size_t>(v)];
  switch (r.sense) {
    case lp::Sense::LessEqual: return s <= r.rhs + tol;
    case lp::Sense::GreaterEqual: return s >= r.rhs - tol;
    case lp::Sense::Equal: return std::abs(s - r.rhs) <= tol;
  }
  return false;
}

bool some_box_contains(const PruneOutcome& out, const std::vector<double>& x, double tol) {
  return std::any_of(out.survivors.begin(), out.survivors.end(),
                     [&](const Box& b) { return b.contains(x, tol); });
}

}  // namespace

TEST_CASE("variable layout") {
  const auto ico = fixtures::icosahedron();
  const auto [sys, box] = build_system(ico, 1.10, 1.11);
  CHECK(sys.num_vars() == 61);
  CHECK(sys.d_var == 60);
  CHECK(box.size() == 61u);

  const auto [cs, cb] = build_system(fixtures::cube(), 1.2, 1.3);
  CHECK(cs.num_vars() == 25);

  const auto g14 = gamma14_graph();
  const auto [s14, b14] = build_system(g14, 0.97, 0.98);
  CHECK(s14.num_vars() == corner_sum(g14) + 1);

  for (std::size_t v = 0; v < sys.vertex_vars.size(); ++v) CHECK(sys.vertex_vars[v].size() == 5u);
}

TEST_CASE("initial bounds") {
  const double lo = 0.9716, hi = 0.9875;
  const auto [sys, box] = build_system(fixtures::cube(), lo, hi);
  for (int v = 0; v < sys.num_corners(); ++v) {
    CHECK(box.lo[v] == doctest::Approx(geom::alpha(lo)));
    CHECK(box.hi[v] == doctest::Approx(2.0 * geom::alpha(hi)));
  }
  CHECK(box.lo[sys.d_var] == lo);
  CHECK(box.hi[sys.d_var] == hi);

  const auto [ts, tb] = build_system(fixtures::tetrahedron(), lo, hi);
  for (int v = 0; v < ts.num_corners(); ++v) CHECK(tb.hi[v] == doctest::Approx(geom::alpha(hi)));
}

TEST_CASE("six triangles at a vertex are eliminated at the root") {
  PlanarGraph g;
  bool found = false;
  for (const auto& t : triangulations(8)) {
    for (int v = 0; v < t.n(); ++v) found = found || t.degree(v) == 6;
    if (found) {
      g = t;
      break;
    }
  }
  REQUIRE(found);
  PruneOptions opt;
  opt.d_lo = 0.9716;
  opt.d_hi = 0.9875;
  const auto out = prune_graph(g, opt);
  CHECK(out.eliminated);
  CHECK(out.nodes == 1);
  CHECK(!out.reason.empty());
}

TEST_CASE("icosahedron window") {
  PruneOptions opt;
  opt.d_lo = 1.10;
  opt.d_hi = 1.11;
  const auto keep = prune_graph(fixtures::icosahedron(), opt);
  REQUIRE(!keep.eliminated);
  const double d = std::atan(2.0);
  bool has_d = false;
  for (const auto& b : keep.survivors) has_d = has_d || (b.lo.back() <= d + 1e-9 && d <= b.hi.back() + 1e-9);
  CHECK(has_d);

  opt.d_lo = 1.15;
  opt.d_hi = 1.16;
  CHECK(prune_graph(fixtures::icosahedron(), opt).eliminated);
}

TEST_CASE("rhombus pair-sum rows") {
  const double lo = 0.9716, hi = 0.9875;
  const auto [sys, box] = build_system(fixtures::cube(), lo, hi);
  const auto rel = add_linear_constraints(sys, box);
  REQUIRE(!rel.proven_empty);
  const auto& f = sys.face_vars[2];
  REQUIRE(f.size() == 4u);
  double ge = -1e9, le = 1e9;
  for (const auto& r : rel.lp.rows) {
    if (r.terms.size() != 2) continue;
    std::vector<int> vs{r.terms[0].first, r.terms[1].first};
    std::sort(vs.begin(), vs.end());
    std::vector<int> want{f[0], f[1]};
    std::sort(want.begin(), want.end());
    if (vs != want || r.terms[0].second != 1.0 || r.terms[1].second != 1.0) continue;
    if (r.sense == lp::Sense::GreaterEqual) ge = std::max(ge, r.rhs);
    if (r.sense == lp::Sense::LessEqual) le = std::min(le, r.rhs);
  }
  // Valid rows may be looser than the exact pair-sum range, never tighter.
  CHECK(ge <= 3.6057 + 1e-3);
  CHECK(ge > 3.5);
  CHECK(le >= 3.7294 - 1e-3);
  CHECK(le < 3.9);
}

TEST_CASE("degree-four vertex relation is implied") {
  // At a vertex with two triangles and two rhombi the rhombus corners sum to
  // 2 pi - 2 alpha(d); two such vertices therefore agree.
  const auto g = gamma14_graph();
  const double lo = 0.97163, hi = 0.97164;
  const auto [sys, box] = build_system(g, lo, hi);
  std::vector<std::vector<int>> quad_pairs;
  for (int v = 0; v < g.n(); ++v) {
    if (g.degree(v) != 4) continue;
    std::vector<int> quads;
    int tris = 0;
    for (int k = 0; k < 4; ++k) {
      const auto [face, pos] = g.corner(v, k);
      const auto m = g.faces()[static_cast<std::size_t>(face)].size();
      if (m == 3) ++tris;
      if (m == 4) quads.push_back(sys.face_vars[static_cast<std::size_t>(face)][static_cast<std::size_t>(pos)]);
    }
    if (tris == 2 && quads.size() == 2) quad_pairs.push_back(quads);
  }
  REQUIRE(quad_pairs.size() >= 2);
  const auto rel = add_linear_constraints(sys, box);
  REQUIRE(!rel.proven_empty);
  lp::Solver s(rel.lp, {.slack = 0.0, .tolerance = 1e-10});
  REQUIRE(s.feasible());
  std::vector<double> c(static_cast<std::size_t>(sys.num_vars()), 0.0);
  const auto& a = quad_pairs[0];
  const auto& b = quad_pairs[1];
  c[static_cast<std::size_t>(a[0])] += 1;
  c[static_cast<std::size_t>(a[1])] += 1;
  c[static_cast<std::size_t>(b[0])] -= 1;
  c[static_cast<std::size_t>(b[1])] -= 1;
  const double mn = s.minimize(c);
  for (auto& x : c) x = -x;
  const double mx = -s.minimize(c);
  // The residual spread comes from the alpha band over the narrow window.
  CHECK(std::abs(mn) < 1e-4);
  CHECK(std::abs(mx) < 1e-4);
}

TEST_CASE("lp_feasible on trivial systems") {
  Relaxation rel;
  rel.lp.add_var(0, 1);
  rel.lp.add_var(0, 1);
  rel.lp.add_row({{0, 1}, {1, 1}}, lp::Sense::GreaterEqual, 1.5);
  Box box{{0, 0}, {1, 1}};
  const auto f = lp_feasible(rel, box);
  CHECK(f.feasible);
  CHECK(f.box.lo[0] == doctest::Approx(0.5).epsilon(1e-6));

  rel.lp.add_row({{0, 1}, {1, 1}}, lp::Sense::LessEqual, 0.5);
  CHECK(!lp_feasible(rel, box).feasible);

  Relaxation empty;
  empty.proven_empty = true;
  CHECK(!lp_feasible(empty, box).feasible);
}

TEST_CASE("known solutions survive") {
  struct Case {
    Configuration c;
    int depth;
    long nodes;
  };
  std::vector<Case> cases{{polyhedron("tetrahedron"), 12, 256},
                          {polyhedron("octahedron"), 12, 256},
                          {polyhedron("icosahedron"), 12, 256},
                          {polyhedron("cube"), 12, 128},
                          {Configuration::load(fixtures::path("p14.json")), 10, 64}};
  for (const auto& [c, depth, nodes] : cases) {
    const auto g = planar_contact_graph(c);
    const double psi = c.psi();
    PruneOptions opt;
    opt.d_lo = psi - 1e-4;
    opt.d_hi = psi + 1e-4;
    opt.max_depth = depth;
    opt.max_nodes = nodes;
    const auto out = prune_graph(g, opt);
    CAPTURE(c.n());
    REQUIRE(!out.eliminated);
    const auto [sys, box] = build_system(g, opt.d_lo, opt.d_hi);
    const auto x = corner_values(sys, c.points(), psi);
    CHECK(box.contains(x, 1e-9));
    CHECK(some_box_contains(out, x, 1e-7));
  }
}

TEST_CASE("pruning is deterministic") {
  PruneOptions opt;
  opt.d_lo = 1.10;
  opt.d_hi = 1.11;
  const auto a = prune_graph(fixtures::icosahedron(), opt);
  const auto b = prune_graph(fixtures::icosahedron(), opt);
  REQUIRE(a.survivors.size() == b.survivors.size());
  for (std::size_t i = 0; i < a.survivors.size(); ++i) {
    CHECK(a.survivors[i].lo == b.survivors[i].lo);
    CHECK(a.survivors[i].hi == b.survivors[i].hi);
  }
  CHECK(a.nodes == b.nodes);
}

TEST_CASE("deeper pruning refines the survivor set") {
  const auto c = polyhedron("cube");
  const auto g = planar_contact_graph(c);
  PruneOptions opt;
  opt.d_lo = c.psi() - 1e-3;
  opt.d_hi = c.psi() + 1e-3;
  opt.max_nodes = 1 << 20;
  for (int depth = 2; depth <= 4; ++depth) {
    opt.max_depth = depth;
    const auto coarse = prune_graph(g, opt);
    opt.max_depth = depth + 1;
    const auto fine = prune_graph(g, opt);
    REQUIRE(!coarse.budget_exhausted);
    REQUIRE(!fine.budget_exhausted);
    for (const auto& b : fine.survivors) {
      const bool inside = std::any_of(coarse.survivors.begin(), coarse.survivors.end(), [&](const Box& o) {
        return o.contains(b.lo, 1e-7) && o.contains(b.hi, 1e-7);
      });
      CHECK(inside);
    }
  }
}

TEST_CASE("polygon cuts hold at sampled feasible polygons") {
  // Every emitted row that only involves one polygon's corners and d must
  // hold at every feasible polygon whose parameters lie in the box.
  struct Case {
    int m;
    double d_lo, d_hi, u_lo, u_hi;
  };
  const Case cases[] = {{5, 0.95, 1.00, 2.20, 2.40}, {6, 0.99, 1.00, 2.76, 2.80}};
  std::mt19937_64 rng(17);
  for (const auto& cs : cases) {
    const auto g = fixtures::prism(cs.m);
    auto [sys, box] = build_system(g, cs.d_lo, cs.d_hi);
    std::vector<std::size_t> polys;
    for (std::size_t fi = 0; fi < sys.face_vars.size(); ++fi)
      if (static_cast<int>(sys.face_vars[fi].size()) == cs.m) polys.push_back(fi);
    REQUIRE(polys.size() == 2u);
    const auto& fv = sys.face_vars[polys[0]];
    for (std::size_t face : polys)
      for (int k = 0; k < cs.m - 3; ++k) {
        const auto v = static_cast<std::size_t>(sys.face_vars[face][static_cast<std::size_t>(k)]);
        box.lo[v] = cs.u_lo;
        box.hi[v] = cs.u_hi;
      }
    const auto rel = add_linear_constraints(sys, box);
    REQUIRE(!rel.proven_empty);
    CHECK(rel.skipped_faces == 0);

    std::vector<const lp::Row*> local;
    for (const auto& r : rel.lp.rows) {
      const bool own = std::all_of(r.terms.begin(), r.terms.end(), [&](const auto& t) {
        return t.first == sys.d_var || std::find(fv.begin(), fv.end(), t.first) != fv.end();
      });
      if (own) local.push_back(&r);
    }
    REQUIRE(local.size() > static_cast<std::size_t>(cs.m));

    std::uniform_real_distribution<double> ud(cs.d_lo, cs.d_hi), uu(cs.u_lo, cs.u_hi);
    int tested = 0;
    for (int trial = 0; trial < 10000; ++trial) {
      const double d = ud(rng);
      std::vector<double> free(static_cast<std::size_t>(cs.m - 3));
      for (auto& u : free) u = uu(rng);
      geom::SphericalPolygon p;
      try {
        p = geom::polygon_embed(free, d, cs.m);
      } catch (const std::exception&) {
        continue;
      }
      bool feasible = true;
      for (double a : p.angles) feasible = feasible && a >= geom::alpha(d) && a < geom::kPi;
      for (int i = 0; i < cs.m; ++i)
        for (int j = i + 2; j < cs.m; ++j)
          if (!(i == 0 && j == cs.m - 1)) feasible = feasible && geom::polygon_diagonal(p, i, j) >= d;
      if (!feasible) continue;
      std::vector<double> x = box.center();
      x[static_cast<std::size_t>(sys.d_var)] = d;
      for (int k = 0; k < cs.m; ++k) x[static_cast<std::size_t>(fv[static_cast<std::size_t>(k)])] = p.angles[static_cast<std::size_t>(k)];
      ++tested;
      for (const auto* r : local) {
        const bool ok = row_holds(*r, x, 1e-9);
        if (!ok) {
          CAPTURE(cs.m);
          CAPTURE(d);
          CHECK(ok);
        }
      }
    }
    CAPTURE(cs.m);
    CHECK(tested > 1000);
  }
}
