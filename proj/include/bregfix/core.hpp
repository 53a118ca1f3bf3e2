#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bregfix {

// Primal points and dual (gradient-space) points share the same storage;
// the aliases mark which space a value lives in.
using Point = std::vector<double>;
using DualPoint = std::vector<double>;

// Default tolerances: absolute for identity checks, relative for
// numeric-oracle comparisons.
inline constexpr double kAbsTol = 1e-10;
inline constexpr double kRelTol = 1e-6;

// Thrown when an input leaves the declared validity region (point outside a
// domain box, schedule value outside [0,1), ...).
struct domain_violation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when an evaluation produces a non-finite or otherwise unusable
// numeric result.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown on malformed configuration input.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- small vector helpers -------------------------------------------------

double dot(const Point& a, const Point& b);
Point sub(const Point& a, const Point& b);
Point add(const Point& a, const Point& b);
Point scaled(const Point& a, double c);
// c*a + (1-c)*b
Point blend(double c, const Point& a, const Point& b);
double norm2(const Point& a);
double inf_norm(const Point& a);
double inf_dist(const Point& a, const Point& b);
bool all_finite(const Point& a);
void require_same_dim(const Point& a, const Point& b, const char* where);

// ---- domain boxes ---------------------------------------------------------

struct Box {
  Point lo;
  Point hi;

  std::size_t dim() const { return lo.size(); }
  bool contains(const Point& x, double tol = 0.0) const;
  Point clamp(const Point& x) const;
  std::vector<Point> vertices() const;

  static Box interval(double lo, double hi, std::size_t dim = 1);
};

// ---- Bregman function bundle ----------------------------------------------

struct BregmanAttrs {
  bool strictly_convex = true;
  bool strongly_coercive = true;
  bool legendre = true;
};

// Bundle of f, grad f, and (optionally) the conjugate pair. The callables
// are defined on all of R^d for every built-in; `domain` is the box used for
// sampling and for the domain checks in the geometry operations.
struct BregmanFunction {
  std::string name;
  std::function<double(const Point&)> f;
  std::function<DualPoint(const Point&)> grad;
  std::function<double(const DualPoint&)> conj;      // may be empty
  std::function<Point(const DualPoint&)> grad_conj;  // may be empty
  Box domain;
  BregmanAttrs attrs;
  bool separable = false;  // f(x) = sum_i f1(x_i), f1(0) = 0

  bool has_conj() const { return static_cast<bool>(conj); }
  bool has_grad_conj() const { return static_cast<bool>(grad_conj); }
};

// Built-in instances. Each is smooth on all of R^d; `domain` only scopes
// sampling-based checks.
BregmanFunction squared_norm(std::size_t dim = 1);
// f(x) = c*|x|^2 with c > 0; conj(z) = |z|^2/(4c).
BregmanFunction scaled_quadratic(double c, std::size_t dim = 1);
// f(x) = sum_i x_i^4; conj(z) = sum_i 3*(|z_i|/4)^(4/3) (even extension).
BregmanFunction quartic(std::size_t dim = 1);
// f(x) = <a, x>. Not strictly convex; no conjugate pair. Test instance only.
BregmanFunction linear(const Point& a);
// Separable polynomial f(x) = sum_i p(x_i), p given by ascending
// coefficients. No closed-form conjugate; grad_conj absent.
BregmanFunction separable_polynomial(const std::vector<double>& coeffs,
                                     const Box& domain);
// c*f for c > 0, with conjugate pair rescaled accordingly.
BregmanFunction scale_function(const BregmanFunction& bf, double c);

// ---- geometry operations --------------------------------------------------

// f(x) - f(y) - <x - y, grad f(y)>.
double bregman_distance(const BregmanFunction& bf, const Point& x,
                        const Point& y);

// D(x,z) - [D(x,y) + D(y,z) + <x - y, grad f(y) - grad f(z)>]; identically 0.
double three_point_residual(const BregmanFunction& bf, const Point& x,
                            const Point& y, const Point& z);

// D(x,y) - [-D(y,x) + <y - x, grad f(y) - grad f(x)>]; identically 0.
double two_point_residual(const BregmanFunction& bf, const Point& x,
                          const Point& y);

// sup over the search box of <x, xstar> - f(x), by coordinate grid plus
// golden-section refinement. Requires a separable f (or dim 1).
double conjugate_numeric(const BregmanFunction& bf, const DualPoint& xstar,
                         const Box& search);

// V(x, xstar) = f(x) - <x, xstar> + conj(xstar). Falls back to
// conjugate_numeric over bf.domain when no closed-form conjugate is present
// and the fallback is allowed.
double v_function(const BregmanFunction& bf, const Point& x,
                  const DualPoint& xstar, bool numeric_fallback = true);

// V(x, xstar + ystar) - V(x, xstar) - <grad_conj(xstar) - x, ystar>; >= 0
// up to rounding.
double v_shift_slack(const BregmanFunction& bf, const Point& x,
                     const DualPoint& xstar, const DualPoint& ystar);

// Minimizer of D(y, x) over the box c. Coordinatewise clamp; valid for
// separable strictly convex f.
Point bregman_project(const BregmanFunction& bf, const Box& c,
                      const Point& x);

// <y - p, grad f(x) - grad f(p)> with p = proj(x); <= 0 for y in c.
double projection_characterization_slack(const BregmanFunction& bf,
                                         const Box& c, const Point& x,
                                         const Point& y);
// Max of the characterization slack over the vertices of c.
double projection_characterization_slack_vertices(const BregmanFunction& bf,
                                                  const Box& c,
                                                  const Point& x);

// D(y,x) - D(y,p) - D(p,x) with p = proj(x); >= 0 for y in c.
double projection_pythagoras_slack(const BregmanFunction& bf, const Box& c,
                                   const Point& x, const Point& y);

// Max over coordinates of |central difference - grad| / (1 + |grad|).
double grad_finite_diff_check(const BregmanFunction& bf, const Point& x,
                              double h);

}  // namespace bregfix
