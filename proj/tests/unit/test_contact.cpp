#include <random>
#include <set>

#include "doctest.h"
#include "tammes/contact.hpp"

using namespace tammes;
using geom::kPi;

namespace {

std::vector<int> degrees(const ContactGraph& g) {
  std::vector<int> deg(static_cast<std::size_t>(g.n), 0);
  for (auto [i, j] : g.edges) ++deg[i], ++deg[j];
  return deg;
}

Configuration rotated(const Configuration& c, double a, double b) {
  std::vector<UnitVector> pts;
  for (const auto& p : c.points()) {
    const double x1 = std::cos(a) * p.x() - std::sin(a) * p.y();
    const double y1 = std::sin(a) * p.x() + std::cos(a) * p.y();
    const double y2 = std::cos(b) * y1 - std::sin(b) * p.z();
    const double z2 = std::sin(b) * y1 + std::cos(b) * p.z();
    pts.emplace_back(x1, y2, z2);
  }
  return Configuration(pts);
}

}  // namespace

TEST_CASE("configuration invariants and JSON round trip") {
  const auto c = polyhedron("octahedron");
  CHECK(c.n() == 6);
  CHECK(c.psi() == doctest::Approx(kPi / 2).epsilon(1e-15));
  const auto back = Configuration::from_json(c.to_json());
  REQUIRE(back.n() == 6);
  for (int i = 0; i < 6; ++i) CHECK(back[i] == c[i]);
  CHECK(back.psi() == c.psi());
  CHECK_THROWS_AS(Configuration({UnitVector(0, 0, 1)}), ConfigError);
  CHECK_THROWS_AS(Configuration({UnitVector(0, 0, 1), UnitVector(0, 0, 1)}), ConfigError);
  CHECK_THROWS_AS(Configuration::from_json(R"({"n": 3, "points": [[0,0,1],[1,0,0]]})"), ConfigError);
  CHECK_THROWS_AS(Configuration::from_json(R"({"n": 2, "points": [[0,0,1],[1,0,0]], "psi_rad": 1.0})"),
                  ConfigError);
  CHECK_THROWS_AS(Configuration::from_json("{"), ConfigError);
}

TEST_CASE("contact graphs of regular polyhedra") {
  const auto t = contact_graph(polyhedron("tetrahedron"));
  CHECK(t.edges.size() == 6);
  const auto o = contact_graph(polyhedron("octahedron"));
  CHECK(o.edges.size() == 12);
  for (int d : degrees(o)) CHECK(d == 4);
  const auto oc = polyhedron("octahedron");
  for (auto [i, j] : o.edges) CHECK(geom::dot(oc[i], oc[j]) > -0.5);
  const auto ico = contact_graph(polyhedron("icosahedron"));
  CHECK(ico.edges.size() == 30);
  for (int d : degrees(ico)) CHECK(d == 5);
  CHECK(polyhedron("icosahedron").psi() == doctest::Approx(std::atan(2.0)).epsilon(1e-14));
  const auto cube = contact_graph(polyhedron("cube"));
  CHECK(cube.edges.size() == 12);
  CHECK_THROWS(polyhedron("dodecahedron"));
}

TEST_CASE("contact graph is rotation invariant") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 2 * kPi);
  for (const char* name : {"tetrahedron", "octahedron", "cube", "icosahedron"}) {
    const auto c = polyhedron(name);
    const auto g = contact_graph(c);
    for (int k = 0; k < 5; ++k) {
      const auto r = rotated(c, u(rng), u(rng));
      CHECK(contact_graph(r).edges == g.edges);
      for (int i = 0; i < c.n(); ++i) CHECK(can_shift(r, i) == can_shift(c, i));
    }
  }
}

TEST_CASE("shift test") {
  const auto ico = polyhedron("icosahedron");
  for (int i = 0; i < 12; ++i) {
    const auto t = shift_test(ico, i);
    CHECK_FALSE(t.shiftable);
    CHECK(t.near.size() == 5);
    CHECK(t.max_gap == doctest::Approx(2 * kPi / 5).epsilon(1e-12));
  }
  // One contact neighbor: move directly away.
  const Configuration pair({UnitVector(0, 0, 1), UnitVector::from_spherical(1.0, 0.0),
                            UnitVector::from_spherical(2.8, 2.0)});
  CHECK(can_shift(pair, 0));
  // Two opposite contacts: gap of exactly pi is not shiftable.
  const Configuration line({UnitVector(0, 0, 1), UnitVector::from_spherical(1.0, 0.0),
                            UnitVector::from_spherical(1.0, kPi), UnitVector(0, 0, -1)});
  const auto t = shift_test(line, 0);
  CHECK(t.near.size() == 2);
  CHECK(t.marginal);
  CHECK_FALSE(t.shiftable);
  // Two contacts at 90 degrees leave a 270 degree gap.
  const Configuration corner({UnitVector(0, 0, 1), UnitVector::from_spherical(1.0, 0.0),
                              UnitVector::from_spherical(1.0, kPi / 2), UnitVector(0, 0, -1)});
  CHECK(can_shift(corner, 0));
}

TEST_CASE("larger tolerance never frees a pinned vertex") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  for (int k = 0; k < 30; ++k) {
    std::vector<UnitVector> pts;
    for (int i = 0; i < 9; ++i) pts.emplace_back(nd(rng), nd(rng), nd(rng));
    const Configuration c(pts);
    for (int i = 0; i < c.n(); ++i) {
      if (!can_shift(c, i, 1e-7)) CHECK_FALSE(can_shift(c, i, 1e-2));
    }
  }
}

TEST_CASE("Danzer flips") {
  CHECK(danzer_flips(polyhedron("icosahedron")).empty());
  CHECK(danzer_flips(polyhedron("octahedron")).empty());
  CHECK(is_irreducible(polyhedron("icosahedron")));
  CHECK(is_irreducible(polyhedron("octahedron")));
  CHECK(is_irreducible(polyhedron("tetrahedron")));

  // x touches y and z; the mirror image of x over yz lands in open space.
  const Configuration c({UnitVector(0, 0, 1), UnitVector::from_spherical(1.0, 0.7),
                         UnitVector::from_spherical(1.0, -0.7), UnitVector::from_spherical(1.05, kPi),
                         UnitVector::from_spherical(2.6, kPi)});
  REQUIRE(c.psi() == doctest::Approx(1.0).epsilon(1e-12));
  const auto flips = danzer_flips(c);
  REQUIRE_FALSE(flips.empty());
  bool found = false;
  for (const auto& f : flips) {
    if (f.vertex == 0 && std::set<int>{f.y, f.z} == std::set<int>{1, 2}) found = true;
    auto pts = c.points();
    pts[f.vertex] = f.image;
    const Configuration after(pts);
    CHECK(after.psi() >= c.psi() - 1e-12);
    CHECK(std::abs(geom::angular_dist(f.image, c[f.y]) - geom::angular_dist(c[f.vertex], c[f.y])) < 1e-12);
  }
  CHECK(found);
  CHECK_FALSE(is_irreducible(c));
}

TEST_CASE("isolated vertex is pinned only at a local maximum of its nearest distance") {
  // Four points around the south pole; the north pole has no contacts but
  // sits at a local maximum of its distance to them.
  std::vector<UnitVector> pts;
  for (int k = 0; k < 4; ++k) pts.push_back(UnitVector::from_spherical(2.0, k * kPi / 2));
  pts.push_back(UnitVector(0, 0, 1));
  const Configuration c(pts);
  const auto t = shift_test(c, 4);
  CHECK(t.near.size() == 4);
  CHECK_FALSE(t.shiftable);
  auto moved = pts;
  moved[4] = UnitVector::from_spherical(0.1, 0.3);
  CHECK(can_shift(Configuration(moved), 4));
}
