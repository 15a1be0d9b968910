#include "tammes/contact.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include "json.hpp"
#include <sstream>

namespace tammes {

using geom::angular_dist;
using geom::kPi;
using geom::kTwoPi;

Configuration::Configuration(std::vector<UnitVector> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw ConfigError("configuration needs at least two points");
  psi_ = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points_.size(); ++i)
    for (std::size_t j = i + 1; j < points_.size(); ++j) psi_ = std::min(psi_, angular_dist(points_[i], points_[j]));
  if (psi_ <= 1e-9) throw ConfigError("configuration has coincident points");
}

std::string Configuration::to_json() const {
  nlohmann::json j;
  j["n"] = n();
  auto& pts = j["points"] = nlohmann::json::array();
  for (const auto& p : points_) pts.push_back({p.x(), p.y(), p.z()});
  j["psi_rad"] = psi_;
  return j.dump(2);
}

Configuration Configuration::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("configuration JSON: ") + e.what());
  }
  if (!j.contains("points") || !j["points"].is_array()) throw ConfigError("configuration JSON: missing points");
  std::vector<UnitVector> pts;
  for (const auto& p : j["points"]) {
    if (!p.is_array() || p.size() != 3) throw ConfigError("configuration JSON: each point needs 3 coordinates");
    pts.emplace_back(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
  }
  if (j.contains("n") && j["n"].get<int>() != static_cast<int>(pts.size())) {
    throw ConfigError("configuration JSON: n does not match the point count");
  }
  Configuration c(std::move(pts));
  if (j.contains("psi_rad") && std::abs(j["psi_rad"].get<double>() - c.psi()) > 1e-9) {
    throw ConfigError("configuration JSON: psi_rad disagrees with the points");
  }
  return c;
}

void Configuration::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << to_json() << '\n';
}

Configuration Configuration::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::vector<std::vector<int>> ContactGraph::adjacency() const {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (auto [i, j] : edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());
  return adj;
}

ContactGraph contact_graph(const Configuration& c, double tol) {
  ContactGraph g;
  g.n = c.n();
  g.tolerance = tol;
  for (int i = 0; i < c.n(); ++i)
    for (int j = i + 1; j < c.n(); ++j)
      if (angular_dist(c[i], c[j]) <= c.psi() + tol) g.edges.emplace_back(i, j);
  return g;
}

ShiftTest shift_test(const Configuration& c, int i, double tol) {
  ShiftTest t;
  double nearest = std::numeric_limits<double>::infinity();
  for (int j = 0; j < c.n(); ++j)
    if (j != i) nearest = std::min(nearest, angular_dist(c[i], c[j]));
  for (int j = 0; j < c.n(); ++j)
    if (j != i && angular_dist(c[i], c[j]) <= nearest + tol) t.near.push_back(j);

  if (t.near.size() <= 1) {
    t.max_gap = kTwoPi;
    t.shiftable = true;
    return t;
  }
  const auto basis = geom::tangent_basis(c[i]);
  std::vector<double> ang;
  ang.reserve(t.near.size());
  for (int j : t.near) {
    const Vec3 e = geom::tangent_toward(c[i], c[j]);
    ang.push_back(std::atan2(dot(e, basis.e2), dot(e, basis.e1)));
  }
  std::sort(ang.begin(), ang.end());
  double gap = ang.front() + kTwoPi - ang.back();
  for (std::size_t k = 1; k < ang.size(); ++k) gap = std::max(gap, ang[k] - ang[k - 1]);
  t.max_gap = gap;
  // A gap of exactly pi (two opposite directions) does not allow a strict increase.
  t.shiftable = gap > kPi + 1e-9;
  t.marginal = std::abs(gap - kPi) < 1e-6;
  return t;
}

bool can_shift(const Configuration& c, int i, double tol) { return shift_test(c, i, tol).shiftable; }

std::vector<DanzerFlip> danzer_flips(const Configuration& c, double tol) {
  const auto adj = contact_graph(c, tol).adjacency();
  std::vector<DanzerFlip> out;
  for (int x = 0; x < c.n(); ++x) {
    const auto& nb = adj[x];
    for (std::size_t a = 0; a < nb.size(); ++a)
      for (std::size_t b = a + 1; b < nb.size(); ++b) {
        const int y = nb[a], z = nb[b];
        UnitVector img;
        try {
          img = geom::reflect_over_great_circle(c[x], c[y], c[z]);
        } catch (const geom::DegenerateCircle&) {
          continue;
        }
        bool clear = true;
        for (int w = 0; w < c.n() && clear; ++w) {
          if (w == x || w == y || w == z) continue;
          clear = angular_dist(img, c[w]) > c.psi() + tol;
        }
        if (clear) out.push_back({x, y, z, img});
      }
  }
  return out;
}

bool is_irreducible(const Configuration& c, double tol) {
  for (int i = 0; i < c.n(); ++i)
    if (can_shift(c, i, tol)) return false;
  return danzer_flips(c, tol).empty();
}

Configuration polyhedron(std::string_view name) {
  std::vector<UnitVector> p;
  if (name == "tetrahedron") {
    p = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
  } else if (name == "octahedron") {
    p = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  } else if (name == "cube") {
    for (int s = 0; s < 8; ++s) p.emplace_back(s & 1 ? 1 : -1, s & 2 ? 1 : -1, s & 4 ? 1 : -1);
  } else if (name == "icosahedron") {
    const double g = (1.0 + std::sqrt(5.0)) / 2.0;
    for (double a : {-1.0, 1.0})
      for (double b : {-g, g}) {
        p.emplace_back(0, a, b);
        p.emplace_back(a, b, 0);
        p.emplace_back(b, 0, a);
      }
  } else {
    throw std::invalid_argument("unknown polyhedron: " + std::string(name));
  }
  return Configuration(std::move(p));
}

}  // namespace tammes
