#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bregfix/iterations.hpp"

using namespace bregfix;

namespace {

IterationConfig base_config(SchemeKind scheme) {
  IterationConfig cfg;
  cfg.scheme = scheme;
  cfg.bf = scaled_quadratic(0.8, 1);
  cfg.t = scale_map(0.2, Box::interval(-1.0, 1.0));
  cfg.c = cfg.t.domain;
  cfg.x1 = {1.0};
  cfg.anchor_u = Point{0.1};
  cfg.schedule = Schedule::constant(0.5, 0.5, 0.5);
  cfg.max_iter = 10;
  return cfg;
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("scheme names round-trip") {
  for (auto k : {SchemeKind::ishikawa, SchemeKind::noor,
                 SchemeKind::bregman_noor, SchemeKind::bregman_halpern}) {
    CHECK(scheme_from_name(scheme_name(k)) == k);
  }
  CHECK(!scheme_from_name("mann").has_value());
}

TEST_CASE("Ishikawa first step by hand") {
  // x1=1, T=x/5, beta=gamma=1/2: y1 = 0.5*0.2 + 0.5*1 = 0.6,
  // x2 = 0.5*T(0.6) + 0.5*1 = 0.5*0.12 + 0.5 = 0.56.
  auto cfg = base_config(SchemeKind::ishikawa);
  const auto trace = run_ishikawa(cfg);
  REQUIRE(trace.rows.size() == 10);
  CHECK(trace.rows[0].y->at(0) == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(trace.rows[0].x_next[0] == doctest::Approx(0.56).epsilon(1e-14));
  CHECK(!trace.rows[0].z.has_value());
  CHECK(trace.rows[0].step_norm == doctest::Approx(0.44).epsilon(1e-12));
  CHECK(trace.rows[0].residual == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("Noor first step by hand") {
  // z1 = 0.5*0.2 + 0.5*1 = 0.6; y1 = 0.5*T(0.6) + 0.5*1 = 0.56;
  // x2 = 0.5*T(0.56) + 0.5*1 = 0.556.
  auto cfg = base_config(SchemeKind::noor);
  const auto trace = run_noor(cfg);
  CHECK(trace.rows[0].z->at(0) == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(trace.rows[0].y->at(0) == doctest::Approx(0.56).epsilon(1e-14));
  CHECK(trace.rows[0].x_next[0] == doctest::Approx(0.556).epsilon(1e-14));
}

TEST_CASE("Bregman Noor first step by hand with quartic f") {
  auto cfg = base_config(SchemeKind::bregman_noor);
  cfg.bf = quartic(1);
  cfg.x1 = {0.5};
  const auto trace = run_bregman_noor(cfg);
  // grad f = 4x^3, grad_conj(z) = cbrt(z/4).
  const double z1 = std::cbrt((0.5 * 4 * 0.001 + 0.5 * 4 * 0.125) / 4.0);
  CHECK(trace.rows[0].z->at(0) == doctest::Approx(z1).epsilon(1e-14));
  const double tz = z1 / 5.0;
  const double y1 =
      std::cbrt((0.5 * 4 * tz * tz * tz + 0.5 * 4 * 0.125) / 4.0);
  CHECK(trace.rows[0].y->at(0) == doctest::Approx(y1).epsilon(1e-14));
}

TEST_CASE("Bregman Halpern first step matches the closed form") {
  IterationConfig cfg = base_config(SchemeKind::bregman_halpern);
  cfg.x1 = {-0.8};
  cfg.schedule = Schedule::section6();
  cfg.max_iter = 42;
  const auto trace = run_bregman_halpern(cfg);
  double x = -0.8;
  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    const auto s = section6_closed_form_step(static_cast<long>(i) + 1, x, 0.1);
    CHECK(std::abs(trace.rows[i].z->at(0) - s.z) <= 1e-12);
    CHECK(std::abs(trace.rows[i].y->at(0) - s.y) <= 1e-12);
    CHECK(std::abs(trace.rows[i].x_next[0] - s.x_next) <= 1e-12);
    x = s.x_next;
  }
}

TEST_CASE("missing requirements raise domain violations") {
  auto cfg = base_config(SchemeKind::bregman_halpern);
  cfg.anchor_u.reset();
  CHECK_THROWS_AS(run_bregman_halpern(cfg), domain_violation);
  auto cfg2 = base_config(SchemeKind::bregman_noor);
  cfg2.bf.reset();
  CHECK_THROWS_AS(run_bregman_noor(cfg2), domain_violation);
  auto cfg3 = base_config(SchemeKind::ishikawa);
  cfg3.x1 = {2.0};
  CHECK_THROWS_AS(run_ishikawa(cfg3), domain_violation);
  auto cfg4 = base_config(SchemeKind::ishikawa);
  cfg4.schedule = Schedule::constant(0.5, 0.5, 0.5);
  cfg4.schedule.gamma = [](long) { return 1.0; };
  CHECK_THROWS_AS(run_ishikawa(cfg4), domain_violation);
}

TEST_CASE("alpha=0 Noor collapses to Ishikawa") {
  auto noor_cfg = base_config(SchemeKind::noor);
  noor_cfg.schedule = Schedule::constant(0.0, 0.5, 0.5);
  noor_cfg.max_iter = 50;
  auto ish_cfg = noor_cfg;
  ish_cfg.scheme = SchemeKind::ishikawa;
  const auto tn = run_noor(noor_cfg);
  const auto ti = run_ishikawa(ish_cfg);
  REQUIRE(tn.rows.size() == ti.rows.size());
  for (std::size_t i = 0; i < tn.rows.size(); ++i) {
    CHECK(tn.rows[i].x_next[0] == ti.rows[i].x_next[0]);
    CHECK(tn.rows[i].y->at(0) == ti.rows[i].y->at(0));
  }
}

TEST_CASE("all-zero schedules freeze every scheme") {
  for (auto kind : {SchemeKind::ishikawa, SchemeKind::noor,
                    SchemeKind::bregman_noor}) {
    auto cfg = base_config(kind);
    cfg.schedule = Schedule::constant(0.0, 0.0, 0.0);
    cfg.max_iter = 20;
    const auto trace = run_iteration(cfg);
    for (const auto& row : trace.rows) {
      CHECK(std::abs(row.x_next[0] - cfg.x1[0]) <= 1e-12);
    }
  }
  // The anchored scheme contracts toward T even with zero weights, so the
  // frozen case needs x1 = u = fixed point.
  auto cfg = base_config(SchemeKind::bregman_halpern);
  cfg.schedule = Schedule::constant(0.0, 0.0, 0.0);
  cfg.x1 = {0.0};
  cfg.anchor_u = Point{0.0};
  cfg.max_iter = 20;
  const auto trace = run_bregman_halpern(cfg);
  for (const auto& row : trace.rows) {
    CHECK(std::abs(row.x_next[0]) <= 1e-12);
  }
}

TEST_CASE("quadratic f collapses Bregman Noor to primal Noor") {
  auto cfg = base_config(SchemeKind::bregman_noor);
  cfg.max_iter = 60;
  const auto tb = run_bregman_noor(cfg);
  auto cfg2 = cfg;
  cfg2.scheme = SchemeKind::noor;
  const auto tp = run_noor(cfg2);
  for (std::size_t i = 0; i < tb.rows.size(); ++i) {
    CHECK(std::abs(tb.rows[i].x_next[0] - tp.rows[i].x_next[0]) <= 1e-12);
    CHECK(std::abs(tb.rows[i].z->at(0) - tp.rows[i].z->at(0)) <= 1e-12);
    CHECK(std::abs(tb.rows[i].y->at(0) - tp.rows[i].y->at(0)) <= 1e-12);
  }
}

TEST_CASE("fixed-point absorption") {
  for (auto kind : {SchemeKind::ishikawa, SchemeKind::noor,
                    SchemeKind::bregman_noor, SchemeKind::bregman_halpern}) {
    auto cfg = base_config(kind);
    cfg.x1 = {0.0};
    cfg.anchor_u = Point{0.0};
    cfg.max_iter = 25;
    const auto trace = run_iteration(cfg);
    for (const auto& row : trace.rows) {
      CHECK(std::abs(row.x_next[0]) <= 1e-12);
    }
  }
}

TEST_CASE("iterates stay in the box") {
  auto cfg = base_config(SchemeKind::bregman_halpern);
  cfg.x1 = {-0.8};
  cfg.schedule = Schedule::section6();
  cfg.max_iter = 42;
  const auto trace = run_bregman_halpern(cfg);
  for (const auto& row : trace.rows) {
    CHECK(cfg.c.contains(row.x_next, 1e-12));
  }
}

TEST_CASE("stop_tol terminates early") {
  auto cfg = base_config(SchemeKind::ishikawa);
  cfg.stop_tol = 1e-6;
  cfg.max_iter = 1000;
  const auto trace = run_ishikawa(cfg);
  CHECK(trace.terminated_reason == StopReason::step_tol);
  CHECK(trace.rows.size() < 1000);
  CHECK(trace.rows.back().step_norm <= 1e-6);
}

TEST_CASE("trace replay determinism") {
  auto cfg = base_config(SchemeKind::bregman_halpern);
  cfg.schedule = Schedule::section6();
  cfg.x1 = {-0.8};
  cfg.max_iter = 42;
  const auto a = run_bregman_halpern(cfg);
  const auto b = run_bregman_halpern(cfg);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].x_next[0] == b.rows[i].x_next[0]);
    CHECK(a.rows[i].step_norm == b.rows[i].step_norm);
  }
}

TEST_CASE("control conditions for the demo schedules") {
  const auto rep = check_control_conditions(Schedule::section6(), 100000);
  CHECK(rep.gamma_vanishes);
  CHECK(rep.gamma_sum_diverges);
  CHECK(rep.beta_bounded_away);
  CHECK(rep.beta_min_tail > 0.2 - 1e-9);
  CHECK(rep.beta_max_tail <= 0.4 + 1e-9);
  CHECK(rep.weighted_sum > 0.0);
  CHECK_THROWS_AS(check_control_conditions(Schedule::section6(), 50),
                  domain_violation);
}

TEST_CASE("control conditions flag a summable gamma") {
  Schedule s = Schedule::section6();
  s.gamma = [](long n) { return 1.0 / (static_cast<double>(n) * n); };
  const auto rep = check_control_conditions(s, 100000);
  CHECK(rep.gamma_vanishes);
  CHECK(!rep.gamma_sum_diverges);
}

TEST_CASE("control conditions flag a non-vanishing gamma") {
  const auto rep =
      check_control_conditions(Schedule::constant(0.5, 0.5, 0.5), 100000);
  CHECK(!rep.gamma_vanishes);
  CHECK(rep.gamma_sum_diverges);
  CHECK(rep.beta_bounded_away);
}

TEST_CASE("Fejer monotonicity holds for Ishikawa and Noor contractions") {
  for (auto kind : {SchemeKind::ishikawa, SchemeKind::noor}) {
    auto cfg = base_config(kind);
    cfg.x1 = {0.9};
    cfg.max_iter = 100;
    const auto trace = run_iteration(cfg);
    const auto rep = check_fejer_monotonicity(
        trace, *cfg.bf, cfg.t, {0.0}, RefOrientation::ref_second, 1e-10);
    CHECK(rep.steps == 100);
    CHECK(rep.violations == 0);
    CHECK(rep.decreases == 100);
  }
}

TEST_CASE("Fejer check rejects a non-fixed reference") {
  auto cfg = base_config(SchemeKind::ishikawa);
  const auto trace = run_ishikawa(cfg);
  CHECK_THROWS_AS(
      check_fejer_monotonicity(trace, *cfg.bf, cfg.t, {0.5},
                               RefOrientation::ref_second),
      domain_violation);
}

TEST_CASE("Halpern anchor perturbs monotonicity only slightly") {
  auto cfg = base_config(SchemeKind::bregman_halpern);
  cfg.x1 = {-0.8};
  cfg.schedule = Schedule::section6();
  cfg.max_iter = 42;
  const auto trace = run_bregman_halpern(cfg);
  const auto rep = check_fejer_monotonicity(
      trace, *cfg.bf, cfg.t, {0.0}, RefOrientation::ref_first, 1e-10);
  // The anchor term breaks exact monotonicity near convergence, but any
  // excess stays tiny (the iterates live within ~2e-5 of the fixed point).
  CHECK(rep.max_violation <= 1e-8);
  CHECK(rep.decreases >= 30);
}

TEST_CASE("asymptotic radius estimate") {
  const auto bf = scaled_quadratic(0.8, 1);
  CHECK(asymptotic_radius_estimate(bf, {{0.5}, {0.5}}, {0.5}) ==
        doctest::Approx(0.0));
  auto cfg = base_config(SchemeKind::bregman_halpern);
  cfg.x1 = {-0.8};
  cfg.schedule = Schedule::section6();
  cfg.max_iter = 42;
  const auto trace = run_bregman_halpern(cfg);
  std::vector<Point> tail;
  for (std::size_t i = trace.rows.size() - 10; i < trace.rows.size(); ++i) {
    tail.push_back(trace.rows[i].x_next);
  }
  // Largest tail magnitude is ~3.1e-5, so 0.8 x^2 stays below 1e-9.
  const double at_zero = asymptotic_radius_estimate(bf, tail, {0.0});
  CHECK(at_zero <= 1e-9);
  CHECK(at_zero < asymptotic_radius_estimate(bf, tail, {0.5}));
  CHECK_THROWS_AS(asymptotic_radius_estimate(bf, {}, {0.0}),
                  domain_violation);
}

TEST_CASE("CSV serialization layout") {
  auto cfg = base_config(SchemeKind::bregman_halpern);
  cfg.x1 = {-0.8};
  cfg.schedule = Schedule::section6();
  cfg.max_iter = 3;
  const auto trace = run_bregman_halpern(cfg);
  const std::string p7 = temp_path("bregfix_trace_test.csv");
  const std::string pf = temp_path("bregfix_trace_test_full.csv");
  write_trace_csv(trace, p7);
  write_trace_csv_full(trace, pf);
  std::ifstream in(p7);
  std::string header, row1;
  std::getline(in, header);
  std::getline(in, row1);
  CHECK(header == "n,z,y,x,step_diff");
  CHECK(row1 == "1,-0.7680000,-0.7808000,-0.7790384,0.0209616");
  std::ifstream inf(pf);
  std::getline(inf, header);
  std::getline(inf, row1);
  CHECK(header == "n,z,y,x,step_diff");
  // Full precision keeps far more digits than the 7-decimal file.
  CHECK(row1.size() > 40);
  std::remove(p7.c_str());
  std::remove(pf.c_str());
}
