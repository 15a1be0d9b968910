#pragma once

#include <string>
#include <vector>

#include "tammes/geom.hpp"
#include "tammes/lp.hpp"
#include "tammes/planar.hpp"

namespace tammes {

/// One variable per face corner plus the edge length d (the last variable).
struct AngleSystem {
  PlanarGraph graph;
  std::vector<std::vector<int>> face_vars;    // face -> corner variable per position
  std::vector<std::vector<int>> vertex_vars;  // vertex -> corner variables at it
  int d_var = 0;

  [[nodiscard]] int num_vars() const { return d_var + 1; }
  [[nodiscard]] int num_corners() const { return d_var; }
};

struct Box {
  std::vector<double> lo, hi;

  [[nodiscard]] std::size_t size() const { return lo.size(); }
  [[nodiscard]] bool contains(const std::vector<double>& x, double tol = 0.0) const;
  [[nodiscard]] std::vector<double> center() const;
};

/// Corner lower bounds use alpha(d_lo), the smallest triangle angle in the
/// window. Triangle corners lie in [alpha(d_lo), alpha(d_hi)], rhombus
/// corners in [alpha(d_lo), 2 alpha(d_hi)], all others below pi.
std::pair<AngleSystem, Box> build_system(const PlanarGraph& g, double d_lo, double d_hi);

struct CutOptions {
  int grid = 3;             // samples per box dimension for polygon enclosures
  double angle_margin = 1e-6;  // corners are kept below pi - margin
};

struct Relaxation {
  lp::LinearProgram lp;  // variable bounds are the box
  bool proven_empty = false;
  std::string reason;
  int skipped_faces = 0;  // polygon faces whose enclosure could not be sampled
};

/// Linear rows valid for every embedding whose parameters lie in the box:
/// vertex angle sums, alpha bands, rhombus relations, polygon closure bands,
/// diagonal and isolated-vertex conditions, perimeter bounds on d.
Relaxation add_linear_constraints(const AngleSystem& sys, const Box& box, const CutOptions& opt = {});

struct Feasibility {
  bool feasible = true;
  bool tightened = false;
  Box box;
};

Feasibility lp_feasible(const Relaxation& rel, const Box& box, const lp::Options& opt = {});

struct PruneOptions {
  double d_lo = 0.0, d_hi = 0.0;
  int max_depth = 40;
  long max_nodes = 4096;
  int tighten_rounds = 8;
  double min_relative_width = 1e-6;
  double min_width = 1e-5;  // boxes narrower than this in every variable are leaves
  CutOptions cuts;
  lp::Options lp;
};

struct PruneOutcome {
  bool eliminated = false;
  std::vector<Box> survivors;
  int depth = 0;  // deepest split level visited
  long nodes = 0;
  bool budget_exhausted = false;
  std::string reason;  // why the root box was emptied, when eliminated at level 1
};

PruneOutcome prune_graph(const PlanarGraph& g, const PruneOptions& opt);

/// Corner angles of an embedded configuration in the system's variable order
/// (d last), for checking that a box contains a known solution.
std::vector<double> corner_values(const AngleSystem& sys, const std::vector<geom::UnitVector>& pts, double d);

}  // namespace tammes
