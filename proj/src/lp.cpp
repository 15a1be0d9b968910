#include "tammes/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tammes::lp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-9;
constexpr double kCheckTol = 1e-6;
}  // namespace

// Column layout: [0, n) structural, [n, n+m) row activities s_i = a_i.x,
// [n+m, n+2m) phase-1 artificials. Row i reads a_i.x - s_i + sigma_i art_i = 0.
struct Solver::Impl {
  int n = 0, m = 0, cols = 0;
  Options opt;
  std::vector<double> a;      // m x n structural coefficients
  std::vector<double> t;      // m x cols tableau B^-1 A
  std::vector<double> lo, hi, x;
  std::vector<double> sigma;  // artificial signs
  std::vector<int> basic;     // basic variable of each row
  std::vector<char> is_basic, at_upper;
  bool phase1_done = false, phase1_ok = false;
  long pivots = 0;

  double& T(int i, int j) { return t[static_cast<std::size_t>(i) * cols + j]; }

  Impl(const LinearProgram& lp, Options o) : opt(o) {
    n = lp.num_vars();
    m = static_cast<int>(lp.rows.size());
    cols = n + 2 * m;
    a.assign(static_cast<std::size_t>(m) * n, 0.0);
    t.assign(static_cast<std::size_t>(m) * cols, 0.0);
    lo.assign(cols, 0.0);
    hi.assign(cols, 0.0);
    x.assign(cols, 0.0);
    sigma.assign(m, 1.0);
    basic.assign(m, -1);
    is_basic.assign(cols, 0);
    at_upper.assign(cols, 0);
    for (int j = 0; j < n; ++j) {
      lo[j] = lp.lo[j];
      hi[j] = lp.hi[j];
      if (!std::isfinite(lo[j]) || !std::isfinite(hi[j]) || lo[j] > hi[j]) {
        throw NumericFailure("variable bounds must be finite and ordered");
      }
      x[j] = lo[j];
    }
    for (int i = 0; i < m; ++i) {
      double act_lo = 0.0, act_hi = 0.0, act = 0.0;
      for (auto [j, c] : lp.rows[i].terms) {
        a[static_cast<std::size_t>(i) * n + j] += c;
      }
      for (int j = 0; j < n; ++j) {
        const double c = a[static_cast<std::size_t>(i) * n + j];
        act_lo += c > 0 ? c * lo[j] : c * hi[j];
        act_hi += c > 0 ? c * hi[j] : c * lo[j];
        act += c * x[j];
      }
      const Row& r = lp.rows[i];
      double slo = act_lo, shi = act_hi;
      if (r.sense != Sense::GreaterEqual) shi = r.rhs;
      if (r.sense != Sense::LessEqual) slo = r.rhs;
      slo -= opt.slack;
      shi += opt.slack;
      const int s = n + i, art = n + m + i;
      lo[s] = slo;
      hi[s] = shi;
      if (act >= slo && act <= shi) {
        // Row activity is basic; the artificial is never needed.
        basic[i] = s;
        is_basic[s] = 1;
        x[s] = act;
        lo[art] = hi[art] = 0.0;
        sigma[i] = 1.0;
        for (int j = 0; j < n; ++j) T(i, j) = -a[static_cast<std::size_t>(i) * n + j];
        T(i, s) = 1.0;
        T(i, art) = -1.0;
      } else {
        const bool upper = act > shi;
        x[s] = upper ? shi : slo;
        at_upper[s] = upper;
        sigma[i] = x[s] - act > 0 ? 1.0 : -1.0;
        basic[i] = art;
        is_basic[art] = 1;
        lo[art] = 0.0;
        hi[art] = kInf;
        x[art] = std::abs(x[s] - act);
        for (int j = 0; j < n; ++j) T(i, j) = sigma[i] * a[static_cast<std::size_t>(i) * n + j];
        T(i, s) = -sigma[i];
        T(i, art) = 1.0;
      }
    }
  }

  void pivot(int r, int q) {
    ++pivots;
    const double p = T(r, q);
    double* row_r = &t[static_cast<std::size_t>(r) * cols];
    for (int j = 0; j < cols; ++j) row_r[j] /= p;
    row_r[q] = 1.0;
    for (int i = 0; i < m; ++i) {
      if (i == r) continue;
      double* row_i = &t[static_cast<std::size_t>(i) * cols];
      const double f = row_i[q];
      if (f == 0.0) continue;
      for (int j = 0; j < cols; ++j) row_i[j] -= f * row_r[j];
      row_i[q] = 0.0;
    }
  }

  // Recomputes basic values from the nonbasic ones: x_B = -B^-1 sum_N A_j x_j.
  void refresh() {
    std::vector<double> q(m, 0.0);
    for (int i = 0; i < m; ++i) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) {
        if (!is_basic[j]) acc += a[static_cast<std::size_t>(i) * n + j] * x[j];
      }
      if (!is_basic[n + i]) acc -= x[n + i];
      if (!is_basic[n + m + i]) acc += sigma[i] * x[n + m + i];
      q[i] = -acc;
    }
    for (int r = 0; r < m; ++r) {
      double v = 0.0;
      for (int i = 0; i < m; ++i) v += T(r, n + m + i) * sigma[i] * q[i];
      x[basic[r]] = v;
    }
  }

  double run(const std::vector<double>& c) {
    const int limit = opt.max_iterations > 0 ? opt.max_iterations : 50 * (m + cols) + 1000;
    const double tol = opt.tolerance;
    int degenerate = 0;
    std::vector<double> cb(m), dj(cols);
    for (int iter = 0; iter < limit; ++iter) {
      if (iter % 64 == 63) refresh();
      for (int i = 0; i < m; ++i) cb[i] = c[basic[i]];
      const bool bland = degenerate > 50;
      int q = -1;
      double best = 0.0;
      for (int j = 0; j < cols; ++j) {
        if (is_basic[j] || hi[j] <= lo[j]) continue;
        double d = c[j];
        for (int i = 0; i < m; ++i) {
          if (cb[i] != 0.0) d -= cb[i] * T(i, j);
        }
        dj[j] = d;
        const bool improves = at_upper[j] ? d > tol : d < -tol;
        if (!improves) continue;
        if (bland) {
          q = j;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          q = j;
        }
      }
      if (q < 0) {
        refresh();
        double obj = 0.0;
        for (int j = 0; j < cols; ++j) obj += c[j] * x[j];
        return obj;
      }
      const double dir = at_upper[q] ? -1.0 : 1.0;
      double step = hi[q] - lo[q];
      int leave = -1;
      for (int i = 0; i < m; ++i) {
        const double e = T(i, q);
        if (std::abs(e) < kPivotTol) continue;
        const double delta = -dir * e;
        const int b = basic[i];
        double lim = delta < 0 ? (x[b] - lo[b]) / -delta : (hi[b] - x[b]) / delta;
        if (!(lim > 0.0)) lim = 0.0;
        bool take = false;
        if (lim < step - 1e-12) {
          take = true;
        } else if (lim <= step + 1e-12 && leave >= 0) {
          take = bland ? b < basic[leave] : std::abs(e) > std::abs(T(leave, q));
        }
        if (take) {
          step = lim;
          leave = i;
        }
      }
      if (!std::isfinite(step)) throw NumericFailure("unbounded direction in a bounded problem");
      degenerate = step < 1e-12 ? degenerate + 1 : 0;
      x[q] += dir * step;
      for (int i = 0; i < m; ++i) {
        const double e = T(i, q);
        if (e != 0.0) x[basic[i]] -= dir * e * step;
      }
      if (leave < 0) {
        at_upper[q] = !at_upper[q];
        x[q] = at_upper[q] ? hi[q] : lo[q];
        continue;
      }
      const int b = basic[leave];
      const bool went_down = -dir * T(leave, q) < 0;
      is_basic[b] = 0;
      at_upper[b] = !went_down;
      x[b] = went_down ? lo[b] : hi[b];
      is_basic[q] = 1;
      at_upper[q] = 0;
      basic[leave] = q;
      pivot(leave, q);
    }
    throw NumericFailure("simplex iteration limit reached");
  }

  void check_point() const {
    for (int j = 0; j < n; ++j) {
      if (x[j] < lo[j] - kCheckTol || x[j] > hi[j] + kCheckTol) throw NumericFailure("bound drift");
    }
    for (int i = 0; i < m; ++i) {
      double act = 0.0;
      for (int j = 0; j < n; ++j) act += a[static_cast<std::size_t>(i) * n + j] * x[j];
      if (act < lo[n + i] - kCheckTol || act > hi[n + i] + kCheckTol) throw NumericFailure("row drift");
    }
  }
};

Solver::Solver(const LinearProgram& lp, Options opt) : impl_(new Impl(lp, opt)) {}
Solver::~Solver() { delete impl_; }

bool Solver::feasible() {
  Impl& s = *impl_;
  if (s.phase1_done) return s.phase1_ok;
  s.phase1_done = true;
  std::vector<double> c(s.cols, 0.0);
  bool any = false;
  for (int i = 0; i < s.m; ++i) {
    if (s.hi[s.n + s.m + i] > 0.0) {
      c[s.n + s.m + i] = 1.0;
      any = true;
    }
  }
  const double infeas = any ? s.run(c) : 0.0;
  s.phase1_ok = infeas <= s.opt.tolerance;
  if (s.phase1_ok) {
    for (int i = 0; i < s.m; ++i) {
      const int art = s.n + s.m + i;
      s.hi[art] = 0.0;
      if (!s.is_basic[art]) {
        s.x[art] = 0.0;
        s.at_upper[art] = 0;
      }
    }
    s.refresh();
    s.check_point();
  }
  return s.phase1_ok;
}

double Solver::minimize(std::span<const double> c, std::vector<double>* x) {
  Impl& s = *impl_;
  if (!feasible()) throw NumericFailure("minimize called on an infeasible problem");
  std::vector<double> full(s.cols, 0.0);
  for (int j = 0; j < s.n; ++j) full[j] = c[j];
  s.run(full);
  s.check_point();
  double obj = 0.0;
  for (int j = 0; j < s.n; ++j) obj += c[j] * s.x[j];
  if (x != nullptr) *x = point();
  return obj;
}

std::vector<double> Solver::point() const { return {impl_->x.begin(), impl_->x.begin() + impl_->n}; }

long Solver::pivots() const { return impl_->pivots; }

Ranges variable_ranges(const LinearProgram& lp, const Options& opt) {
  Ranges out;
  out.lo = lp.lo;
  out.hi = lp.hi;
  try {
    Solver solver(lp, opt);
    if (!solver.feasible()) {
      out.feasible = false;
      return out;
    }
    const int n = lp.num_vars();
    std::vector<double> c(n, 0.0);
    for (int k = 0; k < n; ++k) {
      if (lp.hi[k] <= lp.lo[k]) continue;
      c[k] = 1.0;
      const double mn = solver.minimize(c);
      c[k] = -1.0;
      const double mx = -solver.minimize(c);
      c[k] = 0.0;
      out.lo[k] = std::max(lp.lo[k], mn - opt.slack);
      out.hi[k] = std::min(lp.hi[k], mx + opt.slack);
      if (out.lo[k] > out.hi[k]) std::swap(out.lo[k], out.hi[k]);
    }
    out.tightened = true;
  } catch (const NumericFailure&) {
    out.feasible = true;
    out.tightened = false;
    out.lo = lp.lo;
    out.hi = lp.hi;
  }
  return out;
}

bool is_feasible(const LinearProgram& lp, const Options& opt) {
  try {
    Solver solver(lp, opt);
    return solver.feasible();
  } catch (const NumericFailure&) {
    return true;
  }
}

}  // namespace tammes::lp
