// Acceptance gate: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tammes/contact.hpp"
#include "tammes/embed.hpp"
#include "tammes/geom.hpp"
#include "tammes/lp.hpp"
#include "tammes/maximality.hpp"
#include "tammes/pipeline.hpp"
#include "tammes/planar.hpp"
#include "tammes/prune.hpp"

using namespace tammes;

namespace {

std::string fixture(const std::string& name) { return std::string(TAMMES_FIXTURE_DIR) + "/" + name; }

PlanarGraph read_one(const std::string& name) {
  const auto gs = read_planar_code_file(fixture(name));
  if (gs.size() != 1) throw std::runtime_error(name + ": expected one graph");
  return gs[0];
}

struct Check {
  bool ok = true;
  std::ostringstream msg;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      msg << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<void(Check&)>& body) {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.msg << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > budget_s) {
    c.ok = false;
    c.msg << " [over time budget " << budget_s << " s]";
  }
  if (!c.ok) ++failures;
  std::printf("%s %d %s:%s (%.2f s)\n", c.ok ? "PASS" : "FAIL", id, title, c.msg.str().c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(double v, int prec = 10) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

}  // namespace

int main() {
  const Configuration p14 = Configuration::load(fixture("p14.json"));

  criterion(1, "alpha anchor", 1.0, [](Check& c) {
    const double a = geom::alpha(0.9716), b = geom::alpha(0.9875);
    c.msg << " alpha(0.9716)=" << fmt(a, 8) << " alpha(0.9875)=" << fmt(b, 8);
    c.require(a >= 1.2018 && a <= 1.2020, "alpha(0.9716) in [1.2018, 1.2020]");
    c.require(b >= 1.2076 && b <= 1.2078, "alpha(0.9875) in [1.2076, 1.2078]");
  });

  criterion(2, "rhombus pair-sum anchor", 1.0, [](Check& c) {
    const auto r = geom::rhombus_pair_sum_bounds(0.9716, 0.9875);
    // Grid oracle over u in [alpha(d), 2 alpha(d)], d in the window.
    double lo = 1e9, hi = -1e9;
    for (int i = 0; i <= 400; ++i) {
      const double d = 0.9716 + (0.9875 - 0.9716) * i / 400;
      for (int j = 0; j <= 400; ++j) {
        const double u = geom::alpha(d) * (1.0 + j / 400.0);
        const double s = u + geom::rho(std::min(u, geom::kPi - 1e-12), d);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
    }
    c.msg << " range=[" << fmt(r[0], 6) << ", " << fmt(r[1], 6) << "] grid=[" << fmt(lo, 6) << ", " << fmt(hi, 6)
          << "] target=[3.6057, 3.7294]";
    c.require(std::abs(r[0] - 3.6057) <= 2e-3, "min within 2e-3");
    c.require(std::abs(r[1] - 3.7294) <= 2e-3, "max within 2e-3");
    c.require(std::abs(r[0] - lo) <= 1e-4 && std::abs(r[1] - hi) <= 1e-4, "agrees with grid oracle");
  });

  criterion(3, "Fejes Toth anchor", 1.0, [](Check& c) {
    const double ft14 = geom::degrees(geom::fejes_toth_bound(14));
    const double e4 = std::abs(geom::fejes_toth_bound(4) - std::acos(-1.0 / 3.0));
    const double e6 = std::abs(geom::fejes_toth_bound(6) - geom::kPi / 2);
    const double e12 = std::abs(geom::fejes_toth_bound(12) - std::acos(1.0 / std::sqrt(5.0)));
    c.msg << " FT(14)=" << fmt(ft14, 9) << " deg; tight errors n=4: " << fmt(e4, 3) << " n=6: " << fmt(e6, 3)
          << " n=12: " << fmt(e12, 3);
    c.require(std::abs(ft14 - 58.6809) <= 1e-3, "FT(14) within 1e-3 deg of 58.6809");
    c.require(e4 <= 1e-9 && e6 <= 1e-9 && e12 <= 1e-9, "tight for n = 4, 6, 12");
  });

  criterion(4, "fourteen-point optimum", 300.0, [](Check& c) {
    const auto best = tammes_optimize(14, 200, 1);
    const auto g = planar_contact_graph(best);
    const bool iso = canonical_form(g) == canonical_form(read_one("gamma14_0.pc"));
    c.msg << " psi=" << fmt(best.psi(), 13) << " rad (" << fmt(geom::degrees(best.psi()), 9)
          << " deg) target 0.971597; contact graph " << (iso ? "matches" : "differs from") << " the fixture";
    c.require(std::abs(best.psi() - 0.971597) <= 1e-4, "psi within 1e-4 rad");
    c.require(iso, "contact graph isomorphic to the fixture");
  });

  criterion(5, "symmetry curve anchors", 10.0, [&](Check& c) {
    const double t0 = gamma2_theta(0.0);
    double even = 0.0, resid = 0.0;
    for (double x : {0.01, 0.02, 0.03}) {
      even = std::max(even, std::abs(gamma2_theta(x) - gamma2_theta(-x)));
      resid = std::max({resid, gamma2_curve(x).max_residual(), gamma2_curve(-x).max_residual()});
    }
    resid = std::max(resid, gamma2_curve(0.0).max_residual());
    const auto d = gamma2_f13_derivative();
    c.msg << " theta(0)=" << fmt(t0, 13) << " psi(P14)=" << fmt(p14.psi(), 13) << "; evenness " << fmt(even, 3)
          << "; residual " << fmt(resid, 3) << "; f13'(0)=" << fmt(d.f13, 10) << " (target -2.4587), "
          << "-2 rho'(u5) rho'(u1)=" << fmt(d.rho_product, 10);
    c.require(std::abs(t0 - p14.psi()) <= 1e-6, "theta(0) within 1e-6");
    c.require(even <= 1e-10, "theta even within 1e-10");
    c.require(std::abs(d.f13 - (-2.4587)) <= 5e-3, "f13'(0) within 5e-3 of -2.4587");
    c.require(resid < 1e-10, "residuals below 1e-10");
  });

  criterion(6, "stress LP verdicts", 30.0, [&](Check& c) {
    const bool f3 = stress_lp_feasible(tangent_frames(p14, read_one("gamma14_3.pc").edges(), 1e-4)).feasible;
    const bool f4 = stress_lp_feasible(tangent_frames(p14, read_one("gamma14_4.pc").edges(), 1e-4)).feasible;
    const bool f0 = stress_lp_feasible(tangent_frames(p14, read_one("gamma14_0.pc").edges(), 1e-4)).feasible;
    c.msg << " G3 " << (f3 ? "feasible" : "infeasible") << ", G4 " << (f4 ? "feasible" : "infeasible") << ", G0 "
          << (f0 ? "feasible" : "infeasible");
    c.require(!f3, "G3 infeasible");
    c.require(!f4, "G4 infeasible");
    c.require(f0, "G0 feasible");
    for (const char* name : {"tetrahedron", "octahedron"}) {
      const auto x = polyhedron(name);
      const auto s = tangent_frames(x, contact_graph(x), 1e-4);
      const bool lp_ok = stress_lp_feasible(s).feasible;
      // Uniform weights must satisfy every row of the system directly.
      const double w = 1.0 / static_cast<double>(s.edges.size());
      std::vector<std::array<double, 4>> sums(static_cast<std::size_t>(x.n()), {0, 0, 0, 0});
      for (const auto& t : s.enclosures) {
        auto& a = sums[static_cast<std::size_t>(t.i)];
        a[0] += w * t.p;
        a[1] += w * t.q;
        a[2] += w * t.u;
        a[3] += w * t.v;
      }
      bool uniform = true;
      for (const auto& a : sums) uniform = uniform && a[0] <= 1e-12 && a[1] >= -1e-12 && a[2] <= 1e-12 && a[3] >= -1e-12;
      c.msg << ", " << name << " " << (lp_ok ? "feasible" : "infeasible") << (uniform ? " (uniform ok)" : " (uniform fails)");
      c.require(lp_ok && uniform, std::string(name) + " feasible with uniform weights");
    }
  });

  criterion(7, "desk-scale pipeline", 1800.0, [](Check& c) {
    for (int n : {6, 7, 8}) {
      const auto best = tammes_optimize(n, 20, 1);
      const auto w = pipeline::auto_window(best);
      std::ostringstream e;
      const auto es = pipeline::enumerate_generate(n, e);
      PruneOptions po;
      po.d_lo = w.d_lo;
      po.d_hi = w.d_hi;
      std::istringstream i1(e.str());
      std::ostringstream o1;
      pipeline::prune_stage(i1, o1, po);
      std::istringstream i2(o1.str());
      std::ostringstream o2;
      pipeline::embed_stage(i2, o2, EmbedOptions{});
      std::istringstream i3(o2.str());
      std::ostringstream o3;
      pipeline::verify_stage(i3, o3, VerifyOptions{});
      std::istringstream i4(o3.str());
      const auto r = pipeline::report(i4);
      c.msg << " n=" << n << ": " << es.accepted << " graphs, " << r.candidates.size() << " candidate(s)";
      c.require(r.total == es.accepted, "every graph reported once (n=" + std::to_string(n) + ")");
      c.require(r.candidates.size() == 1, "exactly one candidate (n=" + std::to_string(n) + ")");
      if (r.candidates.size() == 1) {
        const double err = std::abs(r.candidates[0].psi - best.psi());
        c.msg << " psi err " << fmt(err, 3) << ";";
        c.require(err <= 1e-6, "candidate psi within 1e-6 (n=" + std::to_string(n) + ")");
      }
    }
  });

  criterion(8, "property suites", 600.0, [&](Check& c) {
    using namespace tammes::geom;
    std::mt19937_64 rng(8);

    double inv = 0.0;
    std::uniform_real_distribution<double> ud(0.01, kPi / 2 - 0.01), uu(0.05, kPi - 0.05);
    for (int k = 0; k < 10000; ++k) {
      const double d = ud(rng), u = uu(rng);
      inv = std::max(inv, std::abs(rho(rho(u, d), d) - u));
    }
    c.msg << " rho involution " << fmt(inv, 3) << ";";
    c.require(inv <= 1e-10, "rho involution");

    double self = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const int m = 5 + k % 2;
      const auto p = oracles::random_polygon(rng, m, 0.4, 0.99, 0.2);
      for (int i = 0; i < m; ++i) {
        const auto& a = p.vertices[static_cast<std::size_t>((i + m - 1) % m)];
        const auto& b = p.vertices[static_cast<std::size_t>(i)];
        const auto& n = p.vertices[static_cast<std::size_t>((i + 1) % m)];
        self = std::max({self, std::abs(angular_dist(b, n) - p.side), std::abs(interior_angle(a, b, n) - p.angles[static_cast<std::size_t>(i)])});
      }
    }
    c.msg << " polygon self-consistency " << fmt(self, 3) << ";";
    c.require(self <= 1e-9, "polygon_embed self-consistency");

    double lam = 0.0;
    for (int k = 0; k < 20; ++k) {
      const auto h = oracles::random_polygon(rng, 6, 0.6, 0.99, 0.25);
      lam = std::max(lam, std::abs(lambda_max_min(h) - oracles::grid_lambda(h)));
    }
    c.msg << " lambda vs grid " << fmt(lam, 3) << ";";
    c.require(lam <= 1e-4, "lambda grid oracle");

    double lpe = 0.0;
    bool lp_agree = true;
    for (int k = 0; k < 50; ++k) {
      const int n = 3 + k % 3;
      const auto prog = oracles::random_lp(rng, n, k % 2, 3 + k % 4);
      const auto o = oracles::enumerate_vertices(prog);
      const auto r = lp::variable_ranges(prog, {.slack = 0.0});
      lp_agree = lp_agree && r.feasible == o.feasible;
      if (!o.feasible || !r.feasible) continue;
      for (int j = 0; j < n; ++j)
        lpe = std::max({lpe, std::abs(r.lo[static_cast<std::size_t>(j)] - o.lo[static_cast<std::size_t>(j)]),
                        std::abs(r.hi[static_cast<std::size_t>(j)] - o.hi[static_cast<std::size_t>(j)])});
    }
    c.msg << " LP vs vertex enumeration " << fmt(lpe, 3) << ";";
    c.require(lp_agree && lpe <= 1e-7, "LP ranges");

    int sound = 0;
    const std::pair<Configuration, long> known[] = {{polyhedron("tetrahedron"), 256}, {polyhedron("octahedron"), 256},
                                                    {polyhedron("icosahedron"), 256}, {polyhedron("cube"), 128},
                                                    {p14, 64}};
    for (const auto& [x, nodes] : known) {
      const auto g = planar_contact_graph(x);
      PruneOptions po;
      po.d_lo = x.psi() - 1e-4;
      po.d_hi = x.psi() + 1e-4;
      po.max_depth = 12;
      po.max_nodes = nodes;
      const auto out = prune_graph(g, po);
      const auto [sys, box] = build_system(g, po.d_lo, po.d_hi);
      const auto v = corner_values(sys, x.points(), x.psi());
      const bool inside = std::any_of(out.survivors.begin(), out.survivors.end(),
                                      [&](const Box& b) { return b.contains(v, 1e-7); });
      if (!out.eliminated && inside) ++sound;
    }
    c.msg << " prune soundness " << sound << "/5;";
    c.require(sound == 5, "prune soundness");

    // plantri output is isomorph-free: canonical forms must all differ.
    // Relabelings and mirror images must keep their form.
    std::size_t graphs = 0, distinct = 0;
    bool invariant = true;
    for (const char* f : {"plantri_n6_f4.pc", "plantri_n7_f6.pc", "plantri_n8_f6.pc", "plantri_tri_n8.pc"}) {
      const auto gs = read_planar_code_file(fixture(f));
      std::set<std::string> forms;
      for (const auto& g : gs) {
        const auto cf = canonical_form(g);
        forms.insert(cf);
        std::vector<int> perm(static_cast<std::size_t>(g.n()));
        for (int i = 0; i < g.n(); ++i) perm[static_cast<std::size_t>(i)] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        invariant = invariant && canonical_form(g.relabeled(perm)) == cf && canonical_form(g.mirrored()) == cf;
      }
      graphs += gs.size();
      distinct += forms.size();
    }
    c.msg << " canonical forms " << distinct << "/" << graphs << " distinct" << (invariant ? "" : ", not invariant");
    c.require(distinct == graphs && invariant, "canonical_form collision-free and invariant");
  });

  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
