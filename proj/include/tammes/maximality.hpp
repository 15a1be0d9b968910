#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tammes/contact.hpp"
#include "tammes/lp.hpp"
#include "tammes/planar.hpp"

namespace tammes {

class DegenerateTangent : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RootNotBracketed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Interval box [p, q] x [u, v] around the tangent direction e_ij = (c, s)
/// expressed in the tangent basis at x_i.
struct TangentEnclosure {
  int i = 0, j = 0;
  double c = 0.0, s = 0.0;
  double p = 0.0, q = 0.0, u = 0.0, v = 0.0;
};

struct StressSystem {
  int n = 0;
  std::vector<std::pair<int, int>> edges;    // one weight per undirected edge
  std::vector<TangentEnclosure> enclosures;  // 2 per edge: (i,j) then (j,i)
  double pad = 0.0;
};

/// Tangent basis from geom::tangent_basis (z-axis Gram-Schmidt, x-axis
/// fallback near the poles).
StressSystem tangent_frames(const Configuration& c, const std::vector<std::pair<int, int>>& edges, double pad);
StressSystem tangent_frames(const Configuration& c, const ContactGraph& g, double pad);

struct StressResult {
  bool feasible = true;
  bool numeric_failure = false;
  std::vector<double> omega;  // a feasible weight vector, when found
};

/// Weights omega_e in [0, 1] with sum 1 such that at every vertex the
/// enclosure bounds admit a vanishing weighted sum of tangent directions.
/// Infeasible means the graph cannot be a maximal contact graph.
StressResult stress_lp_feasible(const StressSystem& s, const lp::Options& opt = {});

/// One point of the one-parameter family of the two-diagonals-removed
/// graph: x = (u2 - u1)/2, d = theta(x), angles u0..u15 from the sixteen
/// vertex and face relations (u9 does not occur and is NaN).
struct CaseCurve {
  double x = 0.0;
  double d = 0.0;
  std::array<double, 16> u{};
  std::array<double, 16> residuals{};  // equations (i)..(xvi) in order
  [[nodiscard]] double max_residual() const;
};

double gamma2_f7(double x, double d);
double gamma2_f8(double x, double d);

/// Solves f7 + f8 = pi for d in [0.95, 1.00]: requires exactly one sign
/// change on a sampling grid, then bisects.
double gamma2_theta(double x);

CaseCurve gamma2_curve(double x, double a = 0.05);

double gamma2_f13(double x);
double gamma2_f12(double x);

struct F13Derivative {
  double f13 = 0.0;         // f13'(0)
  double f12 = 0.0;         // f12'(0)
  double rho_product = 0.0;  // -2 rho_u(u5) rho_u(u1) at x = 0
};

F13Derivative gamma2_f13_derivative(double step = 1e-5);

// ---------------------------------------------------------------------------
// The fourteen-point graph family

/// Contact graph of the best known 14-point arrangement: 8 triangles
/// forming 4 adjacent pairs, 8 rhombi.
PlanarGraph gamma14_graph();

/// Variants obtained by deleting the shared edges of adjacent triangle
/// pairs: "0" (none), "1" (one), "2" (two pairs with a common opposite
/// vertex), "3" (two pairs without), "3b" (three), "4" (all four).
/// Vertex labels are those of `base`.
std::map<std::string, PlanarGraph> gamma14_variants(const PlanarGraph& base);

struct Verdict {
  std::string canonical;
  std::string method;   // "stress_lp", "symmetry_curve" or "subgraph"
  std::string verdict;  // "rejected" or "maximal_candidate"
  std::vector<std::pair<std::string, double>> details;
  std::string note;
};

struct VerifyOptions {
  double pad = 1e-4;
  lp::Options lp;
};

/// Maximality test for a graph realized by configuration c (graph edges are
/// a subset of the near-contacts of c). The two diagonal-removed fourteen
/// point graphs use the symmetry analysis and the subgraph argument; every
/// other graph uses the stress LP.
Verdict verify_maximal(const PlanarGraph& g, const Configuration& c, const VerifyOptions& opt = {});

/// Symmetry-curve verdict alone: rejected when every sampled x != 0 forces
/// an angle of the family below the triangle angle.
Verdict symmetry_curve_verdict();

}  // namespace tammes
