#pragma once

#include <optional>
#include <utility>

#include "bregfix/core.hpp"

namespace bregfix {

// A self-map of a box domain, with an optional known fixed-point set.
struct Mapping {
  std::string name;
  std::function<Point(const Point&)> apply;
  Box domain;
  std::vector<Point> known_fixed_points;
};

// x -> a*x
Mapping scale_map(double a, const Box& domain);
// x -> x + b coordinatewise affine: x -> a*x + b
Mapping affine_map(double a, double b, const Box& domain);
// x -> x_i^p coordinatewise (intended for nonnegative domains)
Mapping power_map(double p, const Box& domain);
Mapping identity_map(const Box& domain);
Mapping constant_map(const Point& value, const Box& domain);

// Uniform sampling grid over a box: points_per_dim values per coordinate,
// endpoints included.
struct GridSpec {
  std::size_t points_per_dim = 101;
};

std::vector<Point> sample_grid(const Box& box, const GridSpec& grid);

enum class Verdict { holds_on_grid, violated };

struct PropertyReport {
  std::string class_name;
  std::optional<double> alpha;
  Verdict verdict = Verdict::holds_on_grid;
  double worst_margin = 0.0;
  std::optional<std::pair<Point, Point>> witness;
  std::size_t samples_checked = 0;
  std::size_t qualifying_pairs = 0;
  bool vacuous = false;  // premise-filtered check with zero qualifying pairs

  // Line-oriented text record: class, alpha, verdict, worst margin at 12
  // significant digits, witness coordinates.
  std::string to_line() const;
};

// Sweep tolerance: a class holds on the grid when worst_margin >= -tol.
inline constexpr double kVerifierTol = 1e-9;

// All verifiers sweep every ordered pair of grid samples; `jobs` > 1 splits
// the sweep with a deterministic min-reduction (ties resolved to the
// lexicographically first witness).

// margin = |x - y| - |Tx - Ty|
PropertyReport check_nonexpansive(const Mapping& t, const GridSpec& grid,
                                  double tol = kVerifierTol, int jobs = 1);

// Premise 0.5|x - Tx| <= |x - y|; margin as check_nonexpansive.
PropertyReport check_condition_C(const Mapping& t, const GridSpec& grid,
                                 double tol = kVerifierTol, int jobs = 1);

// margin = a|Tx-y|^2 + a|x-Ty|^2 + (1-2a)|x-y|^2 - |Tx-Ty|^2
PropertyReport check_alpha_nonexpansive(const Mapping& t, double alpha,
                                        const GridSpec& grid,
                                        double tol = kVerifierTol,
                                        int jobs = 1);

// Premise as condition (C); margin = a|Tx-y| + a|x-Ty| + (1-2a)|x-y| - |Tx-Ty|
PropertyReport check_generalized_alpha(const Mapping& t, double alpha,
                                       const GridSpec& grid,
                                       double tol = kVerifierTol,
                                       int jobs = 1);

// margin = a D(Tx,y) + a D(x,Ty) + (1-2a) D(x,y) - D(Tx,Ty)
PropertyReport check_bregman_generalized_alpha(const BregmanFunction& bf,
                                               const Mapping& t, double alpha,
                                               const GridSpec& grid,
                                               double tol = kVerifierTol,
                                               int jobs = 1);

// margin = D(p,x) - D(p,Tx) over sampled x and known fixed points p
PropertyReport check_bregman_quasi(const BregmanFunction& bf, const Mapping& t,
                                   const GridSpec& grid,
                                   double tol = kVerifierTol, int jobs = 1);

// margin = D(x,p) - D(Tx,p)
PropertyReport check_bregman_skew_quasi(const BregmanFunction& bf,
                                        const Mapping& t, const GridSpec& grid,
                                        double tol = kVerifierTol,
                                        int jobs = 1);

// margin = D(Tx,y) + D(Ty,x) - D(Tx,Ty) - D(Ty,Tx)
PropertyReport check_bregman_nonspreading(const BregmanFunction& bf,
                                          const Mapping& t,
                                          const GridSpec& grid,
                                          double tol = kVerifierTol,
                                          int jobs = 1);

// Slack of the cross-distance upper bound on D(x, Ty) implied by the
// Bregman generalized-alpha inequality:
//   D(x,Tx) + (1-a)D(x,y) + a*D(Tx,Ty) + a<x-Tx, grad f(y) - grad f(Ty)>
//     + <x-Tx, grad f(Tx) - grad f(Ty)>  -  D(x,Ty).
// Nonnegative wherever the class inequality holds at (x, y).
double cross_distance_bound_slack(const BregmanFunction& bf, const Mapping& t,
                                  double alpha, const Point& x,
                                  const Point& y);

struct FixedPointResult {
  std::vector<Point> points;
  bool whole_domain = false;  // every grid point is fixed at this resolution
};

// Grid scan for local minima of |Tx - x|, refined by bisection (1-D sign
// change) or damped fixed-point iteration, deduplicated at 10*refine_tol.
FixedPointResult find_fixed_points(const Mapping& t, const GridSpec& grid,
                                   double refine_tol);

struct DemiclosednessReport {
  std::size_t tail_len = 0;
  double tail_residual_max = 0.0;   // max |Tx_k - x_k| over the tail
  double limit_residual = 0.0;      // |T(limit) - limit|
  double tail_dist_to_Tlimit = 0.0; // max D(x_k, T(limit)) over the tail
  double tail_dist_to_limit = 0.0;  // max D(x_k, limit) over the tail
};

// Finite-tail diagnostics for the demiclosedness statement; reports only.
DemiclosednessReport demiclosedness_probe(const BregmanFunction& bf,
                                          const Mapping& t,
                                          const std::vector<Point>& sequence,
                                          const Point& limit,
                                          std::size_t tail = 10);

}  // namespace bregfix
