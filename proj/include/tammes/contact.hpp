#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tammes/geom.hpp"

namespace tammes {

using geom::UnitVector;
using geom::Vec3;

inline constexpr double kContactTol = 1e-7;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// N >= 2 distinct points on the unit sphere with cached minimal separation.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::vector<UnitVector> points);

  [[nodiscard]] int n() const { return static_cast<int>(points_.size()); }
  [[nodiscard]] double psi() const { return psi_; }
  [[nodiscard]] const std::vector<UnitVector>& points() const { return points_; }
  [[nodiscard]] const UnitVector& operator[](int i) const { return points_[static_cast<std::size_t>(i)]; }

  /// {"n": int, "points": [[x,y,z],...], "psi_rad": float}
  [[nodiscard]] std::string to_json() const;
  static Configuration from_json(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static Configuration load(const std::filesystem::path& path);

 private:
  std::vector<UnitVector> points_;
  double psi_ = 0.0;
};

struct ContactGraph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // i < j, lexicographically sorted
  double tolerance = kContactTol;

  [[nodiscard]] std::vector<std::vector<int>> adjacency() const;
};

ContactGraph contact_graph(const Configuration& c, double tol = kContactTol);

struct ShiftTest {
  bool shiftable = false;
  double max_gap = 0.0;   // largest angular gap between tangent directions to the near set
  bool marginal = false;  // max_gap within 1e-6 of pi
  std::vector<int> near;  // points at distance <= dist(x_i, X \ {x_i}) + tol
};

/// First-order cone test on the nearest points of x_i. For a vertex with
/// contacts the near set is its contact neighborhood; for an isolated vertex
/// it is the set of its own nearest points.
ShiftTest shift_test(const Configuration& c, int i, double tol = kContactTol);
bool can_shift(const Configuration& c, int i, double tol = kContactTol);

struct DanzerFlip {
  int vertex = 0;
  int y = 0, z = 0;
  UnitVector image;
};

std::vector<DanzerFlip> danzer_flips(const Configuration& c, double tol = kContactTol);

bool is_irreducible(const Configuration& c, double tol = kContactTol);

/// Closed-form vertex sets: "tetrahedron", "octahedron", "cube", "icosahedron".
Configuration polyhedron(std::string_view name);

}  // namespace tammes
