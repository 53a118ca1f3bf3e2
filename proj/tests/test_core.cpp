#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bregfix/core.hpp"

using namespace bregfix;

namespace {

std::vector<Point> random_points(const Box& box, std::size_t count,
                                 unsigned seed) {
  std::mt19937 rng(seed);
  std::vector<Point> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Point p(box.dim());
    for (std::size_t d = 0; d < box.dim(); ++d) {
      std::uniform_real_distribution<double> unif(box.lo[d], box.hi[d]);
      p[d] = unif(rng);
    }
    out.push_back(p);
  }
  return out;
}

std::vector<BregmanFunction> strictly_convex_suite() {
  return {squared_norm(1), squared_norm(2), scaled_quadratic(0.8, 1),
          scaled_quadratic(0.8, 3), quartic(1), quartic(2)};
}

}  // namespace

TEST_CASE("vector helpers") {
  CHECK(dot({1.0, 2.0}, {3.0, 4.0}) == doctest::Approx(11.0));
  CHECK(inf_norm({-3.0, 2.0}) == doctest::Approx(3.0));
  CHECK(norm2({3.0, 4.0}) == doctest::Approx(5.0));
  CHECK(inf_dist({1.0, 2.0}, {0.5, 4.0}) == doctest::Approx(2.0));
}

TEST_CASE("blend convention is c*a + (1-c)*b") {
  const Point b = blend(0.25, {1.0}, {5.0});
  CHECK(b[0] == doctest::Approx(0.25 * 1.0 + 0.75 * 5.0));
  CHECK(blend(0.0, {1.0}, {5.0})[0] == doctest::Approx(5.0));
  CHECK(blend(1.0, {1.0}, {5.0})[0] == doctest::Approx(1.0));
}

TEST_CASE("box basics") {
  const Box b = Box::interval(-1.0, 1.0, 2);
  CHECK(b.dim() == 2);
  CHECK(b.contains({0.5, -0.5}));
  CHECK(!b.contains({1.5, 0.0}));
  const Point c = b.clamp({1.5, -2.0});
  CHECK(c[0] == doctest::Approx(1.0));
  CHECK(c[1] == doctest::Approx(-1.0));
  CHECK(b.vertices().size() == 4);
}

TEST_CASE("bregman distance closed-form values") {
  // quartic: D(1, 0.5) = 1 - 0.0625 - (0.5)*4*0.125 = 0.6875
  CHECK(bregman_distance(quartic(1), {1.0}, {0.5}) ==
        doctest::Approx(0.6875).epsilon(1e-12));
  // 0.8 x^2: D(1, 0) = 0.8
  CHECK(bregman_distance(scaled_quadratic(0.8, 1), {1.0}, {0.0}) ==
        doctest::Approx(0.8).epsilon(1e-12));
  // squared norm: D(x, y) = |x - y|^2
  CHECK(bregman_distance(squared_norm(2), {1.0, 2.0}, {0.0, 0.5}) ==
        doctest::Approx(1.0 + 2.25).epsilon(1e-12));
}

TEST_CASE("distance nonnegativity and identity of indiscernibles") {
  for (const auto& bf : strictly_convex_suite()) {
    const auto pts = random_points(bf.domain, 50, 7);
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
      CHECK(bregman_distance(bf, pts[i], pts[i + 1]) >= -kAbsTol);
      CHECK(bregman_distance(bf, pts[i], pts[i]) ==
            doctest::Approx(0.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("three-point and two-point identities vanish") {
  for (const auto& bf : strictly_convex_suite()) {
    const auto pts = random_points(bf.domain, 300, 11);
    for (std::size_t i = 0; i + 2 < pts.size(); i += 3) {
      CHECK(std::abs(three_point_residual(bf, pts[i], pts[i + 1],
                                          pts[i + 2])) <= 1e-10);
      CHECK(std::abs(two_point_residual(bf, pts[i], pts[i + 1])) <= 1e-10);
    }
  }
}

TEST_CASE("conjugate closed forms") {
  // 0.8 x^2: conj(z) = z^2 / 3.2
  const auto q = scaled_quadratic(0.8, 1);
  CHECK(q.conj({1.0}) == doctest::Approx(0.3125).epsilon(1e-12));
  CHECK(q.grad_conj({1.0})[0] == doctest::Approx(0.625).epsilon(1e-12));
  // x^4: conj(z) = 3 (|z|/4)^{4/3}; conj(4) = 3
  const auto f4 = quartic(1);
  CHECK(f4.conj({4.0}) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f4.grad_conj({4.0})[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f4.grad_conj({-4.0})[0] == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("numeric conjugate agrees with closed forms") {
  const Box search = Box::interval(-2.0, 2.0);
  const auto q = scaled_quadratic(0.8, 1);
  CHECK(std::abs(conjugate_numeric(q, {1.0}, search) - q.conj({1.0})) <=
        1e-9);
  const auto f4 = quartic(1);
  for (double z : {-3.0, -0.5, 0.0, 0.7, 2.5}) {
    CHECK(std::abs(conjugate_numeric(f4, {z}, search) - f4.conj({z})) <=
          1e-9);
  }
  // separable 2-D
  const auto q2 = scaled_quadratic(0.8, 2);
  CHECK(std::abs(conjugate_numeric(q2, {1.0, -0.5}, Box::interval(-2, 2, 2)) -
                 q2.conj({1.0, -0.5})) <= 1e-9);
}

TEST_CASE("numeric conjugate input validation") {
  const auto q = scaled_quadratic(0.8, 1);
  CHECK_THROWS_AS(conjugate_numeric(q, {1.0, 2.0}, Box::interval(-2, 2)),
                  std::invalid_argument);
  Box degenerate = Box::interval(-2.0, 2.0);
  degenerate.hi[0] = degenerate.lo[0];
  CHECK_THROWS_AS(conjugate_numeric(q, {1.0}, degenerate),
                  std::invalid_argument);
}

TEST_CASE("grad_conj inverts grad and Fenchel-Young holds with equality") {
  for (const auto& bf : strictly_convex_suite()) {
    if (!bf.has_grad_conj()) continue;
    const auto pts = random_points(bf.domain, 100, 13);
    for (const auto& x : pts) {
      const DualPoint g = bf.grad(x);
      CHECK(inf_dist(bf.grad_conj(g), x) <= 1e-10);
      CHECK(std::abs(bf.f(x) + bf.conj(g) - dot(x, g)) <= 1e-10);
    }
  }
}

TEST_CASE("V function equals Bregman distance to grad_conj point") {
  const auto q = scaled_quadratic(0.8, 1);
  // V(0.5, 1) = f(0.5) - 0.5 + conj(1) = 0.2 - 0.5 + 0.3125 = 0.0125
  CHECK(v_function(q, {0.5}, {1.0}) == doctest::Approx(0.0125).epsilon(1e-12));
  CHECK(bregman_distance(q, {0.5}, q.grad_conj({1.0})) ==
        doctest::Approx(0.0125).epsilon(1e-12));
  for (const auto& bf : strictly_convex_suite()) {
    if (!bf.has_grad_conj()) continue;
    const auto pts = random_points(bf.domain, 60, 17);
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
      const DualPoint xstar = bf.grad(pts[i + 1]);
      CHECK(std::abs(v_function(bf, pts[i], xstar) -
                     bregman_distance(bf, pts[i], bf.grad_conj(xstar))) <=
            1e-10);
    }
  }
}

TEST_CASE("V function numeric fallback") {
  // Same polynomial as 0.8 x^2 but without closed-form conjugate.
  const auto p = separable_polynomial({0.0, 0.0, 0.8}, Box::interval(-2, 2));
  CHECK(!p.has_conj());
  CHECK(std::abs(v_function(p, {0.5}, {1.0}) - 0.0125) <= 1e-8);
  CHECK_THROWS_AS(v_function(p, {0.5}, {1.0}, false), std::invalid_argument);
}

TEST_CASE("V shift slack is nonnegative") {
  for (const auto& bf : strictly_convex_suite()) {
    if (!bf.has_grad_conj()) continue;
    const auto pts = random_points(bf.domain, 90, 19);
    for (std::size_t i = 0; i + 2 < pts.size(); i += 3) {
      const DualPoint xstar = bf.grad(pts[i + 1]);
      const DualPoint ystar = sub(bf.grad(pts[i + 2]), xstar);
      CHECK(v_shift_slack(bf, pts[i], xstar, ystar) >= -1e-10);
    }
  }
}

TEST_CASE("bregman projection clamps and satisfies its characterization") {
  const Box c = Box::interval(-1.0, 1.0);
  const auto q = scaled_quadratic(0.8, 1);
  CHECK(bregman_project(q, c, {1.7})[0] == doctest::Approx(1.0));
  CHECK(bregman_project(q, c, {0.3})[0] == doctest::Approx(0.3));
  const auto f4 = quartic(2);
  const Box c2 = Box::interval(-1.0, 1.0, 2);
  const Point p = bregman_project(f4, c2, {1.7, -0.4});
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(p[1] == doctest::Approx(-0.4));
  // Variational characterization and Pythagoras inequality.
  for (const auto& bf : strictly_convex_suite()) {
    const Box box = Box::interval(-1.0, 1.0, bf.domain.dim());
    const auto xs = random_points(bf.domain, 40, 23);
    const auto ys = random_points(box, 40, 29);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      CHECK(projection_characterization_slack(bf, box, xs[i], ys[i]) <=
            1e-10);
      CHECK(projection_characterization_slack_vertices(bf, box, xs[i]) <=
            1e-10);
      CHECK(projection_pythagoras_slack(bf, box, xs[i], ys[i]) >= -1e-10);
    }
  }
}

TEST_CASE("projection rejects unsupported inputs") {
  const auto lin = linear({1.0});
  CHECK(!lin.attrs.strictly_convex);
  CHECK_THROWS_AS(bregman_project(lin, Box::interval(-1, 1), {0.5}),
                  std::invalid_argument);
  const auto q = scaled_quadratic(0.8, 1);
  CHECK_THROWS_AS(bregman_project(q, Box::interval(-1, 1), {5.0}),
                  domain_violation);
}

TEST_CASE("gradients agree with finite differences") {
  for (const auto& bf : strictly_convex_suite()) {
    const auto pts = random_points(bf.domain, 20, 31);
    for (const auto& x : pts) {
      CHECK(grad_finite_diff_check(bf, x, 1e-5) <= 1e-7);
    }
  }
}

TEST_CASE("positive scaling scales the distance") {
  const auto f4 = quartic(1);
  const auto scaled_f = scale_function(f4, 2.5);
  const auto pts = random_points(f4.domain, 40, 37);
  for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
    CHECK(std::abs(bregman_distance(scaled_f, pts[i], pts[i + 1]) -
                   2.5 * bregman_distance(f4, pts[i], pts[i + 1])) <= 1e-12);
  }
  CHECK(std::abs(scaled_f.conj(scaled_f.grad({0.5})) -
                 (dot({0.5}, scaled_f.grad({0.5})) - scaled_f.f({0.5}))) <=
        1e-12);
}

TEST_CASE("separable polynomial matches its monomials") {
  const auto p = separable_polynomial({0.0, 0.0, 0.0, 0.0, 1.0},
                                      Box::interval(-2, 2));
  CHECK(p.f({0.5}) == doctest::Approx(0.0625).epsilon(1e-12));
  CHECK(p.grad({0.5})[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(bregman_distance(p, {1.0}, {0.5}) - 0.6875) <= 1e-12);
}
