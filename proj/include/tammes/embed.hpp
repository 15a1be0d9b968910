#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tammes/contact.hpp"
#include "tammes/planar.hpp"
#include "tammes/prune.hpp"

namespace tammes {

enum class EmbedStatus { Embedded, NoSolution, VerificationFailed };

const char* to_string(EmbedStatus s);

struct EmbedOptions {
  int perturbed_starts = 8;
  int max_iterations = 200;
  double residual_tol = 1e-10;  // max |vertex angle sum - 2 pi|
  double edge_tol = 1e-8;
  double contact_tol = kContactTol;  // non-edges must exceed d by more than this
  std::uint64_t seed = 0x7a11e5;
};

struct EmbedResult {
  EmbedStatus status = EmbedStatus::NoSolution;
  std::optional<Configuration> config;
  double d = 0.0;
  double residual = 0.0;
  int start = -1;      // 0 is the box center
  std::string detail;  // reason for a verification failure
};

/// Solves the vertex angle-sum system of the graph for the reduced unknowns
/// (d, one angle per rhombus, m - 3 free angles per larger polygon) by
/// box-projected Levenberg-Marquardt from the box center and perturbed
/// starts, then places the points face by face and checks the geometry.
EmbedResult nonlinear_embed(const AngleSystem& sys, const Box& box, const EmbedOptions& opt = {});

/// Contact graph of a configuration as a plane graph: neighbors sorted by
/// tangent direction, isolated points assigned to the face containing them.
PlanarGraph planar_contact_graph(const Configuration& c, double tol = kContactTol);

struct OptimizeOptions {
  int restarts = 10;
  std::uint64_t seed = 1;
  double active = 1e-3;  // pairs within psi + active enter the step LP
  int max_iterations = 4000;
  int threads = 1;
  bool trace = false;
};

struct OptimizeStep {
  int restart = 0;
  int iteration = 0;
  double psi = 0.0;
};

struct OptimizeResult {
  Configuration best;
  int best_restart = 0;
  std::vector<double> restart_psi;
  std::vector<OptimizeStep> trace;  // accepted steps, when requested
};

/// Multi-start max-min ascent: spread random points by repulsion, then take
/// trust-region LP steps on the near-active pairs. Restart r uses a seed
/// derived from (seed, r); the best restart wins, earliest on ties.
OptimizeResult tammes_optimize(int n, const OptimizeOptions& opt);
Configuration tammes_optimize(int n, int restarts, std::uint64_t seed);

}  // namespace tammes
