#pragma once

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace tammes::lp {

enum class Sense { LessEqual, GreaterEqual, Equal };

struct Row {
  std::vector<std::pair<int, double>> terms;  // (variable, coefficient)
  Sense sense = Sense::Equal;
  double rhs = 0.0;
};

/// Linear constraints over finitely bounded variables lo <= x <= hi.
struct LinearProgram {
  std::vector<double> lo, hi;
  std::vector<Row> rows;

  [[nodiscard]] int num_vars() const { return static_cast<int>(lo.size()); }
  int add_var(double l, double h) {
    lo.push_back(l);
    hi.push_back(h);
    return num_vars() - 1;
  }
  void add_row(std::vector<std::pair<int, double>> terms, Sense sense, double rhs) {
    rows.push_back({std::move(terms), sense, rhs});
  }
};

struct Options {
  double slack = 1e-7;      // every row is relaxed by this much before solving
  double tolerance = 1e-9;  // feasibility / optimality tolerance
  int max_iterations = 0;   // 0 selects a size-dependent default
};

/// The simplex cycled, hit its iteration limit, or lost feasibility.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bounded-variable primal simplex on a dense tableau. The basis is kept
/// between calls so successive objectives over the same polytope warm start.
class Solver {
 public:
  explicit Solver(const LinearProgram& lp, Options opt = {});
  ~Solver();
  Solver(const Solver&) = delete;
  Solver& operator=(const Solver&) = delete;

  /// Runs phase 1 (once). False if the relaxed polytope is empty.
  bool feasible();

  /// Minimizes c.x over the polytope; c has one entry per variable.
  /// Requires feasible() to be true. Writes the optimal point if x != nullptr.
  double minimize(std::span<const double> c, std::vector<double>* x = nullptr);

  /// Current primal point (structural variables).
  [[nodiscard]] std::vector<double> point() const;

  [[nodiscard]] long pivots() const;

 private:
  struct Impl;
  Impl* impl_;
};

struct Ranges {
  bool feasible = true;
  bool tightened = false;  // false when a numeric failure forced a fallback
  std::vector<double> lo, hi;
};

/// Per-variable min/max over {rows, bounds}. Results are widened by the slack
/// and clipped to the input bounds. A NumericFailure is reported as feasible
/// with the input bounds unchanged.
Ranges variable_ranges(const LinearProgram& lp, const Options& opt = {});

/// Phase 1 only; NumericFailure counts as feasible.
bool is_feasible(const LinearProgram& lp, const Options& opt = {});

}  // namespace tammes::lp
