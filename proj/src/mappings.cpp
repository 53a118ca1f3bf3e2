#include "bregfix/mappings.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

namespace bregfix {

// ---- built-in mappings ----------------------------------------------------

Mapping scale_map(double a, const Box& domain) {
  Mapping m;
  std::ostringstream name;
  name << "scale(" << a << ")";
  m.name = name.str();
  m.apply = [a](const Point& x) { return scaled(x, a); };
  m.domain = domain;
  if (std::abs(a) < 1.0 && domain.contains(Point(domain.dim(), 0.0)))
    m.known_fixed_points = {Point(domain.dim(), 0.0)};
  return m;
}

Mapping affine_map(double a, double b, const Box& domain) {
  Mapping m;
  std::ostringstream name;
  name << "affine(" << a << "," << b << ")";
  m.name = name.str();
  m.apply = [a, b](const Point& x) {
    Point r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = a * x[i] + b;
    return r;
  };
  m.domain = domain;
  if (a != 1.0) {
    const double fp = b / (1.0 - a);
    Point p(domain.dim(), fp);
    if (domain.contains(p)) m.known_fixed_points = {p};
  }
  return m;
}

Mapping power_map(double p, const Box& domain) {
  Mapping m;
  std::ostringstream name;
  name << "power(" << p << ")";
  m.name = name.str();
  m.apply = [p](const Point& x) {
    Point r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = std::pow(x[i], p);
    return r;
  };
  m.domain = domain;
  if (p > 1.0 && domain.contains(Point(domain.dim(), 0.0)))
    m.known_fixed_points = {Point(domain.dim(), 0.0)};
  return m;
}

Mapping identity_map(const Box& domain) {
  Mapping m;
  m.name = "identity";
  m.apply = [](const Point& x) { return x; };
  m.domain = domain;
  return m;
}

Mapping constant_map(const Point& value, const Box& domain) {
  Mapping m;
  m.name = "constant";
  Point v = value;
  m.apply = [v](const Point&) { return v; };
  m.domain = domain;
  m.known_fixed_points = {v};
  return m;
}

// ---- sampling -------------------------------------------------------------

std::vector<Point> sample_grid(const Box& box, const GridSpec& grid) {
  const std::size_t n = grid.points_per_dim;
  if (n == 0) throw std::invalid_argument("sample_grid: zero samples");
  const std::size_t d = box.dim();
  std::vector<double> axis_step(d);
  for (std::size_t i = 0; i < d; ++i)
    axis_step[i] = (n > 1) ? (box.hi[i] - box.lo[i]) / double(n - 1) : 0.0;
  std::vector<Point> out;
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) total *= n;
  out.reserve(total);
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t k = 0; k < total; ++k) {
    Point p(d);
    for (std::size_t i = 0; i < d; ++i)
      p[i] = (idx[i] + 1 == n) ? box.hi[i] : box.lo[i] + idx[i] * axis_step[i];
    out.push_back(std::move(p));
    for (std::size_t i = d; i-- > 0;) {
      if (++idx[i] < n) break;
      idx[i] = 0;
    }
  }
  return out;
}

// ---- report ---------------------------------------------------------------

std::string PropertyReport::to_line() const {
  std::ostringstream os;
  os << "class=" << class_name;
  if (alpha) os << " alpha=" << *alpha;
  os << " verdict="
     << (verdict == Verdict::holds_on_grid ? "holds_on_grid" : "violated");
  os << " worst_margin=" << std::setprecision(12) << worst_margin;
  if (witness) {
    auto put = [&os](const Point& p) {
      os << "(";
      for (std::size_t i = 0; i < p.size(); ++i)
        os << (i ? "," : "") << std::setprecision(12) << p[i];
      os << ")";
    };
    os << " witness=";
    put(witness->first);
    put(witness->second);
  }
  os << " samples=" << samples_checked << " qualifying=" << qualifying_pairs;
  if (vacuous) os << " vacuous=1";
  return os.str();
}

namespace {

struct SweepBest {
  double margin = std::numeric_limits<double>::infinity();
  std::size_t pair_index = std::numeric_limits<std::size_t>::max();
  std::size_t qualifying = 0;
};

// Sweep all ordered pairs (i, j) of samples. Pairs are indexed i*N + j so a
// min-reduction with smallest-index tie-break is identical for any chunking.
template <typename Premise, typename Margin>
PropertyReport sweep_pairs(std::string class_name, std::optional<double> alpha,
                           const std::vector<Point>& samples, Premise premise,
                           Margin margin, double tol, int jobs,
                           bool premise_filtered) {
  if (samples.empty())
    throw std::invalid_argument("verifier: grid produced zero samples");
  const std::size_t n = samples.size();
  const std::size_t total = n * n;

  auto scan = [&](std::size_t begin, std::size_t end) {
    SweepBest best;
    for (std::size_t k = begin; k < end; ++k) {
      const Point& x = samples[k / n];
      const Point& y = samples[k % n];
      if (!premise(x, y)) continue;
      ++best.qualifying;
      const double m = margin(x, y);
      if (m < best.margin ||
          (m == best.margin && k < best.pair_index)) {
        best.margin = m;
        best.pair_index = k;
      }
    }
    return best;
  };

  SweepBest best;
  if (jobs <= 1) {
    best = scan(0, total);
  } else {
    const std::size_t nthreads = std::min<std::size_t>(jobs, 64);
    std::vector<SweepBest> partial(nthreads);
    std::vector<std::thread> threads;
    const std::size_t chunk = (total + nthreads - 1) / nthreads;
    for (std::size_t t = 0; t < nthreads; ++t) {
      const std::size_t b = t * chunk;
      const std::size_t e = std::min(total, b + chunk);
      threads.emplace_back([&, t, b, e] { partial[t] = scan(b, e); });
    }
    for (auto& th : threads) th.join();
    for (const SweepBest& p : partial) {
      best.qualifying += p.qualifying;
      if (p.margin < best.margin ||
          (p.margin == best.margin && p.pair_index < best.pair_index))
        best = SweepBest{p.margin, p.pair_index, best.qualifying};
    }
  }

  PropertyReport rep;
  rep.class_name = std::move(class_name);
  rep.alpha = alpha;
  rep.samples_checked = total;
  rep.qualifying_pairs = best.qualifying;
  if (best.qualifying == 0) {
    rep.verdict = Verdict::holds_on_grid;
    rep.vacuous = premise_filtered;
    rep.worst_margin = 0.0;
    return rep;
  }
  rep.worst_margin = best.margin;
  if (best.margin < -tol) {
    rep.verdict = Verdict::violated;
    rep.witness = {samples[best.pair_index / n], samples[best.pair_index % n]};
  }
  return rep;
}

bool always(const Point&, const Point&) { return true; }

}  // namespace

// ---- verifiers ------------------------------------------------------------

PropertyReport check_nonexpansive(const Mapping& t, const GridSpec& grid,
                                  double tol, int jobs) {
  auto samples = sample_grid(t.domain, grid);
  auto margin = [&t](const Point& x, const Point& y) {
    return norm2(sub(x, y)) - norm2(sub(t.apply(x), t.apply(y)));
  };
  return sweep_pairs("nonexpansive", std::nullopt, samples, always, margin,
                     tol, jobs, false);
}

PropertyReport check_condition_C(const Mapping& t, const GridSpec& grid,
                                 double tol, int jobs) {
  auto samples = sample_grid(t.domain, grid);
  auto premise = [&t](const Point& x, const Point& y) {
    return 0.5 * norm2(sub(x, t.apply(x))) <= norm2(sub(x, y));
  };
  auto margin = [&t](const Point& x, const Point& y) {
    return norm2(sub(x, y)) - norm2(sub(t.apply(x), t.apply(y)));
  };
  return sweep_pairs("condition_C", std::nullopt, samples, premise, margin,
                     tol, jobs, true);
}

PropertyReport check_alpha_nonexpansive(const Mapping& t, double alpha,
                                        const GridSpec& grid, double tol,
                                        int jobs) {
  if (alpha >= 1.0)
    throw std::invalid_argument("check_alpha_nonexpansive: alpha >= 1");
  auto samples = sample_grid(t.domain, grid);
  auto sq = [](double v) { return v * v; };
  auto margin = [&t, alpha, sq](const Point& x, const Point& y) {
    const Point tx = t.apply(x), ty = t.apply(y);
    return alpha * sq(norm2(sub(tx, y))) + alpha * sq(norm2(sub(x, ty))) +
           (1.0 - 2.0 * alpha) * sq(norm2(sub(x, y))) -
           sq(norm2(sub(tx, ty)));
  };
  return sweep_pairs("alpha_nonexpansive", alpha, samples, always, margin, tol,
                     jobs, false);
}

PropertyReport check_generalized_alpha(const Mapping& t, double alpha,
                                       const GridSpec& grid, double tol,
                                       int jobs) {
  if (alpha < 0.0 || alpha >= 1.0)
    throw std::invalid_argument("check_generalized_alpha: alpha outside [0,1)");
  auto samples = sample_grid(t.domain, grid);
  auto premise = [&t](const Point& x, const Point& y) {
    return 0.5 * norm2(sub(x, t.apply(x))) <= norm2(sub(x, y));
  };
  auto margin = [&t, alpha](const Point& x, const Point& y) {
    const Point tx = t.apply(x), ty = t.apply(y);
    return alpha * norm2(sub(tx, y)) + alpha * norm2(sub(x, ty)) +
           (1.0 - 2.0 * alpha) * norm2(sub(x, y)) - norm2(sub(tx, ty));
  };
  return sweep_pairs("generalized_alpha", alpha, samples, premise, margin, tol,
                     jobs, true);
}

PropertyReport check_bregman_generalized_alpha(const BregmanFunction& bf,
                                               const Mapping& t, double alpha,
                                               const GridSpec& grid,
                                               double tol, int jobs) {
  if (alpha < 0.0 || alpha >= 1.0)
    throw std::invalid_argument(
        "check_bregman_generalized_alpha: alpha outside [0,1)");
  auto samples = sample_grid(t.domain, grid);
  auto margin = [&bf, &t, alpha](const Point& x, const Point& y) {
    const Point tx = t.apply(x), ty = t.apply(y);
    return alpha * bregman_distance(bf, tx, y) +
           alpha * bregman_distance(bf, x, ty) +
           (1.0 - 2.0 * alpha) * bregman_distance(bf, x, y) -
           bregman_distance(bf, tx, ty);
  };
  return sweep_pairs("bregman_generalized_alpha", alpha, samples, always,
                     margin, tol, jobs, false);
}

namespace {

// Quasi-style checks range over sampled x and known fixed points p; reuse
// the pair sweep with p drawn from the second slot.
PropertyReport sweep_fixed_point_pairs(
    const std::string& class_name, const BregmanFunction& bf, const Mapping& t,
    const GridSpec& grid, double tol, int jobs,
    const std::function<double(const Point& p, const Point& x)>& margin) {
  if (t.known_fixed_points.empty())
    throw std::invalid_argument(class_name +
                                ": empty fixed-point set for " + t.name);
  auto samples = sample_grid(t.domain, grid);
  PropertyReport rep;
  rep.class_name = class_name;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (const Point& p : t.known_fixed_points) {
    for (const Point& x : samples) {
      ++rep.samples_checked;
      const double m = margin(p, x);
      if (m < rep.worst_margin) {
        rep.worst_margin = m;
        if (m < -tol) rep.witness = {p, x};
      }
    }
  }
  rep.qualifying_pairs = rep.samples_checked;
  rep.verdict =
      rep.worst_margin < -tol ? Verdict::violated : Verdict::holds_on_grid;
  (void)bf;
  (void)jobs;
  return rep;
}

}  // namespace

PropertyReport check_bregman_quasi(const BregmanFunction& bf, const Mapping& t,
                                   const GridSpec& grid, double tol,
                                   int jobs) {
  return sweep_fixed_point_pairs(
      "bregman_quasi", bf, t, grid, tol, jobs,
      [&](const Point& p, const Point& x) {
        return bregman_distance(bf, p, x) -
               bregman_distance(bf, p, t.apply(x));
      });
}

PropertyReport check_bregman_skew_quasi(const BregmanFunction& bf,
                                        const Mapping& t, const GridSpec& grid,
                                        double tol, int jobs) {
  return sweep_fixed_point_pairs(
      "bregman_skew_quasi", bf, t, grid, tol, jobs,
      [&](const Point& p, const Point& x) {
        return bregman_distance(bf, x, p) -
               bregman_distance(bf, t.apply(x), p);
      });
}

PropertyReport check_bregman_nonspreading(const BregmanFunction& bf,
                                          const Mapping& t,
                                          const GridSpec& grid, double tol,
                                          int jobs) {
  auto samples = sample_grid(t.domain, grid);
  auto margin = [&bf, &t](const Point& x, const Point& y) {
    const Point tx = t.apply(x), ty = t.apply(y);
    return bregman_distance(bf, tx, y) + bregman_distance(bf, ty, x) -
           bregman_distance(bf, tx, ty) - bregman_distance(bf, ty, tx);
  };
  return sweep_pairs("bregman_nonspreading", std::nullopt, samples, always,
                     margin, tol, jobs, false);
}

double cross_distance_bound_slack(const BregmanFunction& bf, const Mapping& t,
                                  double alpha, const Point& x,
                                  const Point& y) {
  const Point tx = t.apply(x), ty = t.apply(y);
  const Point xmtx = sub(x, tx);
  const double rhs =
      bregman_distance(bf, x, tx) + (1.0 - alpha) * bregman_distance(bf, x, y) +
      alpha * bregman_distance(bf, tx, ty) +
      alpha * dot(xmtx, sub(bf.grad(y), bf.grad(ty))) +
      dot(xmtx, sub(bf.grad(tx), bf.grad(ty)));
  return rhs - bregman_distance(bf, x, ty);
}

// ---- fixed points ---------------------------------------------------------

namespace {

double residual(const Mapping& t, const Point& x) {
  return inf_dist(t.apply(x), x);
}

// Damped iteration x <- x + 0.5*(Tx - x), clamped to the domain.
std::optional<Point> refine_damped(const Mapping& t, Point x,
                                   double refine_tol) {
  for (int k = 0; k < 10000; ++k) {
    const Point tx = t.apply(x);
    if (inf_dist(tx, x) <= refine_tol) return x;
    x = t.domain.clamp(blend(0.5, tx, x));
  }
  return residual(t, x) <= refine_tol ? std::optional<Point>(x) : std::nullopt;
}

// 1-D bisection on g(x) = T(x) - x over a sign-changing bracket.
std::optional<Point> refine_bisect_1d(const Mapping& t, double a, double b,
                                      double refine_tol) {
  auto g = [&t](double v) { return t.apply({v})[0] - v; };
  double ga = g(a), gb = g(b);
  if (ga == 0.0) return Point{a};
  if (gb == 0.0) return Point{b};
  if ((ga > 0) == (gb > 0)) return std::nullopt;
  while (b - a > refine_tol) {
    const double m = 0.5 * (a + b);
    const double gm = g(m);
    if (gm == 0.0) return Point{m};
    if ((gm > 0) == (ga > 0)) {
      a = m;
      ga = gm;
    } else {
      b = m;
    }
  }
  return Point{0.5 * (a + b)};
}

}  // namespace

FixedPointResult find_fixed_points(const Mapping& t, const GridSpec& grid,
                                   double refine_tol) {
  auto samples = sample_grid(t.domain, grid);
  std::vector<double> res(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    res[i] = residual(t, samples[i]);

  FixedPointResult out;
  if (std::all_of(res.begin(), res.end(),
                  [refine_tol](double r) { return r <= refine_tol; })) {
    out.whole_domain = true;
    return out;
  }

  const bool one_d = t.domain.dim() == 1;
  const std::size_t n = grid.points_per_dim;
  auto is_local_min = [&](std::size_t i) {
    if (!one_d) return true;  // d > 1: refine from every candidate below
    const double r = res[i];
    if (i > 0 && res[i - 1] < r) return false;
    if (i + 1 < n && res[i + 1] < r) return false;
    return true;
  };

  // Candidate threshold: within refine-distance of a sign change or already
  // small. For d > 1 every sufficiently small residual is a candidate.
  double min_res = *std::min_element(res.begin(), res.end());
  const double candidate_cut =
      std::max(refine_tol, min_res * 10.0 + 10.0 * refine_tol);

  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!is_local_min(i)) continue;
    std::optional<Point> fixed;
    if (one_d) {
      const double x = samples[i][0];
      const double a = (i > 0) ? samples[i - 1][0] : x;
      const double b = (i + 1 < n) ? samples[i + 1][0] : x;
      fixed = refine_bisect_1d(t, a, b, refine_tol);
      if (!fixed && res[i] <= candidate_cut)
        fixed = refine_damped(t, samples[i], refine_tol);
    } else if (res[i] <= candidate_cut) {
      fixed = refine_damped(t, samples[i], refine_tol);
    }
    if (!fixed) continue;
    const bool dup = std::any_of(
        out.points.begin(), out.points.end(), [&](const Point& p) {
          return inf_dist(p, *fixed) <= 10.0 * refine_tol;
        });
    if (!dup) out.points.push_back(*fixed);
  }
  return out;
}

// ---- demiclosedness diagnostics -------------------------------------------

DemiclosednessReport demiclosedness_probe(const BregmanFunction& bf,
                                          const Mapping& t,
                                          const std::vector<Point>& sequence,
                                          const Point& limit,
                                          std::size_t tail) {
  if (sequence.size() < tail || tail == 0)
    throw std::invalid_argument("demiclosedness_probe: sequence shorter than tail");
  DemiclosednessReport rep;
  rep.tail_len = tail;
  const Point tlimit = t.apply(limit);
  rep.limit_residual = norm2(sub(tlimit, limit));
  for (std::size_t k = sequence.size() - tail; k < sequence.size(); ++k) {
    const Point& x = sequence[k];
    rep.tail_residual_max =
        std::max(rep.tail_residual_max, norm2(sub(t.apply(x), x)));
    rep.tail_dist_to_Tlimit =
        std::max(rep.tail_dist_to_Tlimit, bregman_distance(bf, x, tlimit));
    rep.tail_dist_to_limit =
        std::max(rep.tail_dist_to_limit, bregman_distance(bf, x, limit));
  }
  return rep;
}

}  // namespace bregfix
