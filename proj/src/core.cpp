#include "bregfix/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bregfix {

// ---- vector helpers -------------------------------------------------------

double dot(const Point& a, const Point& b) {
  require_same_dim(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Point sub(const Point& a, const Point& b) {
  require_same_dim(a, b, "sub");
  Point r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Point add(const Point& a, const Point& b) {
  require_same_dim(a, b, "add");
  Point r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Point scaled(const Point& a, double c) {
  Point r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
  return r;
}

Point blend(double c, const Point& a, const Point& b) {
  require_same_dim(a, b, "blend");
  Point r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i] + (1.0 - c) * b[i];
  return r;
}

double norm2(const Point& a) { return std::sqrt(dot(a, a)); }

double inf_norm(const Point& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

double inf_dist(const Point& a, const Point& b) { return inf_norm(sub(a, b)); }

bool all_finite(const Point& a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

void require_same_dim(const Point& a, const Point& b, const char* where) {
  if (a.size() != b.size())
    throw std::invalid_argument(std::string(where) + ": dimension mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
}

// ---- Box ------------------------------------------------------------------

bool Box::contains(const Point& x, double tol) const {
  if (x.size() != dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i)
    if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
  return true;
}

Point Box::clamp(const Point& x) const {
  Point r(x);
  for (std::size_t i = 0; i < dim(); ++i)
    r[i] = std::min(std::max(r[i], lo[i]), hi[i]);
  return r;
}

std::vector<Point> Box::vertices() const {
  std::vector<Point> out;
  const std::size_t d = dim();
  out.reserve(std::size_t{1} << d);
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    Point v(d);
    for (std::size_t i = 0; i < d; ++i)
      v[i] = (mask >> i & 1u) ? hi[i] : lo[i];
    out.push_back(std::move(v));
  }
  return out;
}

Box Box::interval(double lo, double hi, std::size_t dim) {
  if (hi < lo) throw std::invalid_argument("Box::interval: hi < lo");
  return Box{Point(dim, lo), Point(dim, hi)};
}

// ---- built-in Bregman functions -------------------------------------------

BregmanFunction squared_norm(std::size_t dim) {
  return scaled_quadratic(1.0, dim);
}

BregmanFunction scaled_quadratic(double c, std::size_t dim) {
  if (c <= 0.0) throw std::invalid_argument("scaled_quadratic: need c > 0");
  BregmanFunction bf;
  std::ostringstream name;
  name << "quadratic(" << c << ")";
  bf.name = c == 1.0 ? "squared_norm" : name.str();
  bf.f = [c](const Point& x) { return c * dot(x, x); };
  bf.grad = [c](const Point& x) { return scaled(x, 2.0 * c); };
  bf.conj = [c](const DualPoint& z) { return dot(z, z) / (4.0 * c); };
  bf.grad_conj = [c](const DualPoint& z) { return scaled(z, 1.0 / (2.0 * c)); };
  bf.domain = Box::interval(-2.0, 2.0, dim);
  bf.separable = true;
  return bf;
}

BregmanFunction quartic(std::size_t dim) {
  BregmanFunction bf;
  bf.name = "quartic";
  bf.f = [](const Point& x) {
    double s = 0.0;
    for (double v : x) s += v * v * v * v;
    return s;
  };
  bf.grad = [](const Point& x) {
    DualPoint g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = 4.0 * x[i] * x[i] * x[i];
    return g;
  };
  // Per coordinate: conj(z) = 3*(|z|/4)^(4/3), even in z.
  bf.conj = [](const DualPoint& z) {
    double s = 0.0;
    for (double v : z) s += 3.0 * std::pow(std::abs(v) / 4.0, 4.0 / 3.0);
    return s;
  };
  bf.grad_conj = [](const DualPoint& z) {
    Point x(z.size());
    for (std::size_t i = 0; i < z.size(); ++i)
      x[i] = std::copysign(std::cbrt(std::abs(z[i]) / 4.0), z[i]);
    return x;
  };
  bf.domain = Box::interval(-2.0, 2.0, dim);
  bf.separable = true;
  return bf;
}

BregmanFunction linear(const Point& a) {
  BregmanFunction bf;
  bf.name = "linear";
  Point coeffs = a;
  bf.f = [coeffs](const Point& x) { return dot(coeffs, x); };
  bf.grad = [coeffs](const Point&) { return coeffs; };
  bf.domain = Box::interval(-2.0, 2.0, a.size());
  bf.attrs.strictly_convex = false;
  bf.attrs.strongly_coercive = false;
  bf.attrs.legendre = false;
  bf.separable = true;
  return bf;
}

BregmanFunction separable_polynomial(const std::vector<double>& coeffs,
                                     const Box& domain) {
  if (coeffs.empty())
    throw std::invalid_argument("separable_polynomial: empty coefficients");
  BregmanFunction bf;
  bf.name = "poly";
  auto eval1 = [coeffs](double t) {
    double s = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;) s = s * t + coeffs[k];
    return s;
  };
  auto deriv1 = [coeffs](double t) {
    double s = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 1;)
      s = s * t + coeffs[k] * static_cast<double>(k);
    return s;
  };
  bf.f = [eval1](const Point& x) {
    double s = 0.0;
    for (double v : x) s += eval1(v);
    return s;
  };
  bf.grad = [deriv1](const Point& x) {
    DualPoint g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = deriv1(x[i]);
    return g;
  };
  bf.domain = domain;
  bf.separable = (coeffs[0] == 0.0);
  bf.attrs.legendre = false;
  return bf;
}

BregmanFunction scale_function(const BregmanFunction& bf, double c) {
  if (c <= 0.0) throw std::invalid_argument("scale_function: need c > 0");
  BregmanFunction out = bf;
  out.name = bf.name + "*" + std::to_string(c);
  auto f = bf.f;
  auto grad = bf.grad;
  out.f = [f, c](const Point& x) { return c * f(x); };
  out.grad = [grad, c](const Point& x) { return scaled(grad(x), c); };
  if (bf.has_conj()) {
    auto conj = bf.conj;
    out.conj = [conj, c](const DualPoint& z) {
      return c * conj(scaled(z, 1.0 / c));
    };
  }
  if (bf.has_grad_conj()) {
    auto gc = bf.grad_conj;
    out.grad_conj = [gc, c](const DualPoint& z) {
      return gc(scaled(z, 1.0 / c));
    };
  }
  return out;
}

// ---- geometry operations --------------------------------------------------

namespace {

void require_in_domain(const BregmanFunction& bf, const Point& x,
                       const char* where) {
  if (!all_finite(x))
    throw std::invalid_argument(std::string(where) + ": non-finite point");
  if (!bf.domain.contains(x, 1e-12))
    throw domain_violation(std::string(where) + ": point outside domain of " +
                           bf.name);
}

}  // namespace

double bregman_distance(const BregmanFunction& bf, const Point& x,
                        const Point& y) {
  require_same_dim(x, y, "bregman_distance");
  require_in_domain(bf, x, "bregman_distance");
  require_in_domain(bf, y, "bregman_distance");
  const double d = bf.f(x) - bf.f(y) - dot(sub(x, y), bf.grad(y));
  if (!std::isfinite(d))
    throw numeric_error("bregman_distance: non-finite result for " + bf.name);
  return d;
}

double three_point_residual(const BregmanFunction& bf, const Point& x,
                            const Point& y, const Point& z) {
  const double lhs = bregman_distance(bf, x, z);
  const double rhs = bregman_distance(bf, x, y) + bregman_distance(bf, y, z) +
                     dot(sub(x, y), sub(bf.grad(y), bf.grad(z)));
  return lhs - rhs;
}

double two_point_residual(const BregmanFunction& bf, const Point& x,
                          const Point& y) {
  const double lhs = bregman_distance(bf, x, y);
  const double rhs = -bregman_distance(bf, y, x) +
                     dot(sub(y, x), sub(bf.grad(y), bf.grad(x)));
  return lhs - rhs;
}

namespace {

// Maximize a concave 1-D function on [lo, hi]: dense grid pass, then
// golden-section refinement of the bracketing interval.
double maximize_1d(const std::function<double(double)>& g, double lo,
                   double hi) {
  constexpr int kGridPoints = 10000;
  constexpr double kWidthTol = 1e-12;
  const double step = (hi - lo) / kGridPoints;
  double best_t = lo, best_v = g(lo);
  for (int i = 1; i <= kGridPoints; ++i) {
    const double t = (i == kGridPoints) ? hi : lo + i * step;
    const double v = g(t);
    if (v > best_v) {
      best_v = v;
      best_t = t;
    }
  }
  double a = std::max(lo, best_t - step);
  double b = std::min(hi, best_t + step);
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = g(x1), f2 = g(x2);
  while (b - a > kWidthTol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = g(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = g(x1);
    }
  }
  const double mid = 0.5 * (a + b);
  return std::max(best_v, g(mid));
}

}  // namespace

double conjugate_numeric(const BregmanFunction& bf, const DualPoint& xstar,
                         const Box& search) {
  if (search.dim() != xstar.size())
    throw std::invalid_argument("conjugate_numeric: dimension mismatch");
  for (std::size_t i = 0; i < search.dim(); ++i)
    if (!(search.hi[i] > search.lo[i]))
      throw std::invalid_argument("conjugate_numeric: degenerate search box");
  if (xstar.size() > 1 && !bf.separable)
    throw std::invalid_argument(
        "conjugate_numeric: non-separable function with dim > 1");

  // Separable with f(0) = 0: the supremum decomposes per coordinate, with
  // the other coordinates held at 0.
  double total = 0.0;
  Point probe(xstar.size(), 0.0);
  for (std::size_t i = 0; i < xstar.size(); ++i) {
    const double zi = xstar[i];
    auto g = [&](double t) {
      probe[i] = t;
      const double v = t * zi - bf.f(probe);
      probe[i] = 0.0;
      return v;
    };
    total += maximize_1d(g, search.lo[i], search.hi[i]);
  }
  if (!std::isfinite(total))
    throw numeric_error("conjugate_numeric: non-finite supremum");
  return total;
}

double v_function(const BregmanFunction& bf, const Point& x,
                  const DualPoint& xstar, bool numeric_fallback) {
  require_same_dim(x, xstar, "v_function");
  double conj_val;
  if (bf.has_conj()) {
    conj_val = bf.conj(xstar);
  } else if (numeric_fallback) {
    conj_val = conjugate_numeric(bf, xstar, bf.domain);
  } else {
    throw std::invalid_argument("v_function: conjugate unavailable for " +
                                bf.name);
  }
  return bf.f(x) - dot(x, xstar) + conj_val;
}

double v_shift_slack(const BregmanFunction& bf, const Point& x,
                     const DualPoint& xstar, const DualPoint& ystar) {
  if (!bf.has_grad_conj())
    throw std::invalid_argument("v_shift_slack: grad_conj absent for " +
                                bf.name);
  const double lhs =
      v_function(bf, x, xstar) + dot(sub(bf.grad_conj(xstar), x), ystar);
  const double rhs = v_function(bf, x, add(xstar, ystar));
  return rhs - lhs;
}

Point bregman_project(const BregmanFunction& bf, const Box& c,
                      const Point& x) {
  if (!bf.separable || !bf.attrs.strictly_convex)
    throw std::invalid_argument(
        "bregman_project: requires a separable strictly convex function, got " +
        bf.name);
  if (c.dim() != x.size())
    throw std::invalid_argument("bregman_project: dimension mismatch");
  require_in_domain(bf, x, "bregman_project");
  // D(y, x) is separable and strictly convex in y with unconstrained
  // minimizer x, so the box-constrained minimizer clamps per coordinate.
  return c.clamp(x);
}

double projection_characterization_slack(const BregmanFunction& bf,
                                         const Box& c, const Point& x,
                                         const Point& y) {
  const Point p = bregman_project(bf, c, x);
  return dot(sub(y, p), sub(bf.grad(x), bf.grad(p)));
}

double projection_characterization_slack_vertices(const BregmanFunction& bf,
                                                  const Box& c,
                                                  const Point& x) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const Point& v : c.vertices())
    worst = std::max(worst, projection_characterization_slack(bf, c, x, v));
  return worst;
}

double projection_pythagoras_slack(const BregmanFunction& bf, const Box& c,
                                   const Point& x, const Point& y) {
  const Point p = bregman_project(bf, c, x);
  return bregman_distance(bf, y, x) - bregman_distance(bf, y, p) -
         bregman_distance(bf, p, x);
}

double grad_finite_diff_check(const BregmanFunction& bf, const Point& x,
                              double h) {
  if (h <= 0.0) throw std::invalid_argument("grad_finite_diff_check: h <= 0");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] - h < bf.domain.lo[i] || x[i] + h > bf.domain.hi[i])
      throw domain_violation(
          "grad_finite_diff_check: point too close to domain boundary");
  const DualPoint g = bf.grad(x);
  double worst = 0.0;
  Point xp = x, xm = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    const double fd = (bf.f(xp) - bf.f(xm)) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - g[i]) / (1.0 + std::abs(g[i])));
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return worst;
}

}  // namespace bregfix
