#pragma once

#include <optional>

#include "bregfix/core.hpp"
#include "bregfix/mappings.hpp"

namespace bregfix {

// Step-size rules n -> value, n >= 1; every value must lie in [0,1)
// (checked lazily at use).
struct Schedule {
  std::function<double(long)> alpha;
  std::function<double(long)> beta;
  std::function<double(long)> gamma;

  static Schedule constant(double a, double b, double g);
  // c/n decay per sequence.
  static Schedule harmonic(double ca, double cb, double cg);
  // alpha = (n+1)/(4n), beta = (n+1)/(5n), gamma = 1/(500n).
  static Schedule section6();
};

enum class SchemeKind { ishikawa, noor, bregman_noor, bregman_halpern };

const char* scheme_name(SchemeKind k);
std::optional<SchemeKind> scheme_from_name(const std::string& name);

struct IterationConfig {
  SchemeKind scheme = SchemeKind::ishikawa;
  std::optional<BregmanFunction> bf;  // required for the Bregman schemes
  Mapping t;
  Box c;
  Point x1;
  std::optional<Point> anchor_u;  // required for bregman_halpern
  Schedule schedule;
  long max_iter = 100;
  double stop_tol = 0.0;  // 0 disables the step-size stop
};

struct TraceRow {
  long n = 0;
  Point x;                    // x_n
  std::optional<Point> z;     // z_n when the scheme produces one
  std::optional<Point> y;     // y_n
  Point x_next;               // x_{n+1}
  double step_norm = 0.0;     // |x_{n+1} - x_n|
  double residual = 0.0;      // |x_n - T x_n|
};

enum class StopReason { max_iter, step_tol };

struct IterationTrace {
  std::vector<TraceRow> rows;
  StopReason terminated_reason = StopReason::max_iter;

  Point final_iterate() const;
};

// y_n = b_n T x_n + (1-b_n) x_n;  x_{n+1} = g_n T y_n + (1-g_n) x_n.
IterationTrace run_ishikawa(const IterationConfig& cfg);

// z_n = a_n T x_n + (1-a_n) x_n;  y_n = b_n T z_n + (1-b_n) x_n;
// x_{n+1} = g_n T y_n + (1-g_n) x_n.
IterationTrace run_noor(const IterationConfig& cfg);

// Dual-space variant: each stage combines gradients and maps back through
// grad_conj; the final stage projects onto the box c.
//   z_n = grad_conj[a_n grad f(T x_n) + (1-a_n) grad f(x_n)]
//   y_n = grad_conj[b_n grad f(T z_n) + (1-b_n) grad f(x_n)]
//   x_{n+1} = proj_c(grad_conj[g_n grad f(T y_n) + (1-g_n) grad f(x_n)])
IterationTrace run_bregman_noor(const IterationConfig& cfg);

// Anchored dual-space scheme. The first stage records the raw gradient
// combination as z_n and reuses it as a point in the second stage:
//   z_n = a_n grad f(x_n) + (1-a_n) grad f(T x_n)
//   y_n = grad_conj[b_n grad f(x_n) + (1-b_n) grad f(z_n)]
//   x_{n+1} = proj_c(grad_conj[g_n grad f(u) + (1-g_n) grad f(y_n)])
// This mixed use of z_n is what the reference trace of the demo instance
// follows; see section6_closed_form_step.
IterationTrace run_bregman_halpern(const IterationConfig& cfg);

IterationTrace run_iteration(const IterationConfig& cfg);

// Scalar closed form of one bregman_halpern step for the demo instance
// (f = 0.8 x^2, T = x/5, section6 schedule):
//   z = (16n+8)/(25n) x,  y = (n+1)/(5n) x + (4n-1)/(5n) z,
//   x' = u/(500n) + (500n-1)/(500n) y.
struct ScalarStep {
  double z, y, x_next;
};
ScalarStep section6_closed_form_step(long n, double x, double u);

// ---- diagnostics ----------------------------------------------------------

struct ControlConditionReport {
  long horizon = 0;
  double weighted_sum = 0.0;     // sum g*b*a*(1-a) up to the horizon
  double gamma_sum = 0.0;        // sum g
  double gamma_at_horizon = 0.0;
  double beta_min_tail = 0.0;    // liminf estimate over the last horizon/2
  double beta_max_tail = 0.0;    // limsup estimate
  bool gamma_vanishes = false;
  bool gamma_sum_diverges = false;
  bool beta_bounded_away = false;
};

// Heuristic pass/fail flags for the step-size conditions: gamma -> 0,
// sum gamma divergent, beta bounded in (0,1). Divergence is judged by the
// ratio of successive half-horizon partial-sum increments.
ControlConditionReport check_control_conditions(const Schedule& schedule,
                                                long horizon);

enum class RefOrientation { ref_first, ref_second };

struct MonotonicityReport {
  std::size_t steps = 0;
  std::size_t violations = 0;   // steps where the max-inequality fails
  std::size_t decreases = 0;    // steps where D to ref strictly decreases
  double max_violation = 0.0;   // largest positive excess over D(x_n)
};

// Per-step check that the Bregman distance to a fixed point dominates the
// distances of the new iterates. ref_second checks D(., ref) over
// {x_{n+1}, y_n}; ref_first checks D(ref, .) over {x_{n+1}, y_n, z_n}.
MonotonicityReport check_fejer_monotonicity(const IterationTrace& trace,
                                            const BregmanFunction& bf,
                                            const Mapping& t, const Point& ref,
                                            RefOrientation orientation,
                                            double tol = kAbsTol,
                                            double fixed_tol = 1e-8);

// Max of D(x_k, x) over the supplied tail; finite-horizon stand-in for the
// limsup-based radius.
double asymptotic_radius_estimate(const BregmanFunction& bf,
                                  const std::vector<Point>& tail,
                                  const Point& x);

// ---- trace serialization --------------------------------------------------

// CSV with header n,z,y,x,step_diff: row n holds z_n, y_n and x_{n+1}, all
// at 7 decimal places.
void write_trace_csv(const IterationTrace& trace, const std::string& path);
// Same layout at 17 significant digits.
void write_trace_csv_full(const IterationTrace& trace,
                          const std::string& path);

}  // namespace bregfix
