#include "bregfix/experiments.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

namespace bregfix {

const std::vector<GoldenRow>& golden_table1() {
  static const std::vector<GoldenRow> table = {
      {1, -0.7680000, -0.7808000, -0.7790384, 0.0209616},
      {2, -0.6232307, -0.6699730, -0.6692031, 0.1098353},
      {3, -0.4996716, -0.5448800, -0.5444501, 0.1247530},
      {4, -0.3920041, -0.4301156, -0.4298505, 0.1145996},
      {5, -0.3026148, -0.3331513, -0.3329781, 0.0968724},
      {6, -0.2308648, -0.2546912, -0.2545730, 0.0784051},
      {7, -0.1745643, -0.1928520, -0.1927684, 0.0618046},
      {8, -0.1310825, -0.1449618, -0.1449006, 0.0478678},
      {9, -0.0978884, -0.1083355, -0.1082892, 0.0366113},
      {10, -0.0727704, -0.0805845, -0.0805484, 0.0277408},
      {11, -0.0538942, -0.0597097, -0.0596806, 0.0208678},
      {12, -0.0397871, -0.0440974, -0.0440733, 0.0156073},
      {13, -0.0292918, -0.0324755, -0.0324551, 0.0116182},
      {14, -0.0215131, -0.0238578, -0.0238402, 0.0086150},
      {15, -0.0157663, -0.0174887, -0.0174730, 0.0063671},
      {16, -0.0115322, -0.0127946, -0.0127805, 0.0046925},
      {17, -0.0084201, -0.0093435, -0.0093306, 0.0034499},
      {18, -0.0061375, -0.0068116, -0.0067997, 0.0025309},
      {19, -0.0044663, -0.0049576, -0.0049465, 0.0018532},
      {20, -0.0032449, -0.0036023, -0.0035919, 0.0013546},
      {21, -0.0023536, -0.0026130, -0.0026032, 0.0009887},
      {22, -0.0017039, -0.0018920, -0.0018827, 0.0007205},
      {23, -0.0012311, -0.0013671, -0.0013583, 0.0005244},
      {24, -0.0008874, -0.0009855, -0.0009771, 0.0003812},
      {25, -0.0006379, -0.0007084, -0.0007004, 0.0002767},
      {26, -0.0004569, -0.0005074, -0.0004997, 0.0002007},
      {27, -0.0003257, -0.0003618, -0.0003544, 0.0001453},
      {28, -0.0002309, -0.0002564, -0.0002493, 0.0001051},
      {29, -0.0001623, -0.0001803, -0.0001734, 0.0000759},
      {30, -0.0001128, -0.0001253, -0.0001187, 0.0000547},
      {31, -0.0000772, -0.0000857, -0.0000793, 0.0000394},
      {32, -0.0000515, -0.0000572, -0.0000510, 0.0000283},
      {33, -0.0000331, -0.0000368, -0.0000307, 0.0000202},
      {34, -0.0000200, -0.0000222, -0.0000163, 0.0000144},
      {35, -0.0000106, -0.0000118, -0.0000060, 0.0000103},
      {36, -0.0000039, -0.0000044, 0.0000012, 0.0000072},
      {37, 0.0000008, 0.0000009, 0.0000063, 0.0000051},
      {38, 0.0000041, 0.0000045, 0.0000098, 0.0000035},
      {39, 0.0000063, 0.0000070, 0.0000122, 0.0000024},
      {40, 0.0000079, 0.0000088, 0.0000138, 0.0000016},
      {41, 0.0000089, 0.0000099, 0.0000148, 0.0000010},
      {42, 0.0000096, 0.0000106, 0.0000154, 0.0000006},
  };
  return table;
}

BregmanFunction section6_function() { return scaled_quadratic(0.8, 1); }

Mapping section6_mapping() {
  return scale_map(0.2, Box::interval(-1.0, 1.0));
}

IterationConfig section6_config(long max_iter) {
  IterationConfig cfg;
  cfg.scheme = SchemeKind::bregman_halpern;
  cfg.bf = section6_function();
  cfg.t = section6_mapping();
  cfg.c = cfg.t.domain;
  cfg.x1 = {-0.8};
  cfg.anchor_u = Point{0.1};
  cfg.schedule = Schedule::section6();
  cfg.max_iter = max_iter;
  cfg.stop_tol = 0.0;
  return cfg;
}

double Table1Report::max_dev() const {
  return std::max(std::max(max_dev_z, max_dev_y),
                  std::max(max_dev_x, max_dev_step));
}

std::string Table1Report::to_text() const {
  std::ostringstream os;
  os << std::setprecision(3);
  os << "experiment: table1\n"
     << "rows: " << trace.rows.size() << "\n"
     << "max deviation z: " << max_dev_z << "\n"
     << "max deviation y: " << max_dev_y << "\n"
     << "max deviation x: " << max_dev_x << "\n"
     << "max deviation step_diff: " << max_dev_step << "\n"
     << "closed-form oracle deviation: " << oracle_dev << "\n"
     << "runtime_seconds: " << runtime_seconds << "\n"
     << "verdict: " << (pass ? "pass" : "fail")
     << " (tolerance 1e-06 per entry)\n";
  return os.str();
}

Table1Report reproduce_table1() {
  Table1Report rep;
  const auto t0 = std::chrono::steady_clock::now();
  rep.trace = run_bregman_halpern(section6_config(42));
  rep.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  const auto& golden = golden_table1();
  double x = -0.8;
  for (std::size_t i = 0; i < golden.size(); ++i) {
    const GoldenRow& g = golden[i];
    const TraceRow& r = rep.trace.rows.at(i);
    rep.max_dev_z = std::max(rep.max_dev_z, std::abs(r.z->at(0) - g.z));
    rep.max_dev_y = std::max(rep.max_dev_y, std::abs(r.y->at(0) - g.y));
    rep.max_dev_x = std::max(rep.max_dev_x, std::abs(r.x_next[0] - g.x));
    rep.max_dev_step = std::max(rep.max_dev_step,
                                std::abs(r.step_norm - g.step));
    const ScalarStep s = section6_closed_form_step(g.n, x, 0.1);
    rep.oracle_dev = std::max(
        rep.oracle_dev,
        std::max(std::abs(r.z->at(0) - s.z),
                 std::max(std::abs(r.y->at(0) - s.y),
                          std::abs(r.x_next[0] - s.x_next))));
    x = s.x_next;
  }
  rep.pass = rep.max_dev() <= 1e-6;
  return rep;
}

namespace {

void append_report(std::ostringstream& os, const PropertyReport& r) {
  os << "  " << r.to_line() << "\n";
}

}  // namespace

std::string Example1Report::to_text() const {
  std::ostringstream os;
  os << "experiment: example1 (T(x)=x^2 on [0,0.9], quartic f)\n";
  os << "bregman generalized-alpha sweep:\n";
  for (const auto& r : bga_sweep) append_report(os, r);
  os << "norm-class checks:\n";
  append_report(os, nonexpansive);
  append_report(os, condition_C);
  os << "alpha-nonexpansive sweep:\n";
  for (const auto& r : alpha_sweep) append_report(os, r);
  os << "generalized-alpha sweep:\n";
  for (const auto& r : gen_alpha_sweep) append_report(os, r);
  os << "fixed points:";
  for (const auto& p : fixed_points.points) os << " " << p.at(0);
  os << (fixed_points.whole_domain ? " (whole domain)" : "") << "\n";
  os << std::setprecision(3)
     << "closed-form distance max deviation: " << closed_form_max_dev
     << " over " << closed_form_pairs << " pairs\n";
  os << "claim bregman-generalized-alpha holds (alpha 0.5..0.9): "
     << (claim_bga_holds ? "pass" : "fail") << "\n";
  os << "claim counterexample witnesses found: "
     << (claim_witnesses_found ? "pass" : "fail") << "\n";
  os << "claim closed-form distance match (1e-12): "
     << (claim_closed_form ? "pass" : "fail") << "\n";
  os << "claim fixed-point set is {0}: "
     << (claim_fixed_points ? "pass" : "fail") << "\n";
  os << "verdict: " << (pass ? "pass" : "fail") << "\n";
  return os.str();
}

Example1Report run_example1_suite(int jobs) {
  Example1Report rep;
  const BregmanFunction bf = quartic(1);
  const Box box = Box::interval(0.0, 0.9);
  const Mapping t = power_map(2.0, box);
  const GridSpec grid{91};  // 0.01 step over [0, 0.9]

  for (double a : {0.5, 0.6, 0.7, 0.8, 0.9}) {
    rep.bga_sweep.push_back(
        check_bregman_generalized_alpha(bf, t, a, grid, kVerifierTol, jobs));
  }
  rep.nonexpansive = check_nonexpansive(t, grid, kVerifierTol, jobs);
  rep.condition_C = check_condition_C(t, grid, kVerifierTol, jobs);
  for (int k = 0; k <= 9; ++k) {
    const double a = k / 10.0;
    rep.alpha_sweep.push_back(
        check_alpha_nonexpansive(t, a, grid, kVerifierTol, jobs));
    rep.gen_alpha_sweep.push_back(
        check_generalized_alpha(t, a, grid, kVerifierTol, jobs));
  }
  rep.fixed_points = find_fixed_points(t, grid, 1e-10);

  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> unif(0.0, 0.9);
  rep.closed_form_pairs = 10000;
  for (std::size_t i = 0; i < rep.closed_form_pairs; ++i) {
    const double x = unif(rng);
    const double y = unif(rng);
    const double closed = x * x * x * x + 3.0 * y * y * y * y -
                          4.0 * x * y * y * y;
    const double generic = bregman_distance(bf, {x}, {y});
    rep.closed_form_max_dev =
        std::max(rep.closed_form_max_dev, std::abs(generic - closed));
  }

  rep.claim_bga_holds = true;
  for (const auto& r : rep.bga_sweep) {
    if (r.verdict != Verdict::holds_on_grid) rep.claim_bga_holds = false;
  }
  rep.claim_witnesses_found =
      rep.nonexpansive.verdict == Verdict::violated &&
      rep.nonexpansive.witness.has_value() &&
      rep.condition_C.verdict == Verdict::violated &&
      rep.alpha_sweep.at(5).verdict == Verdict::violated &&
      rep.gen_alpha_sweep.at(5).verdict == Verdict::violated;
  rep.claim_closed_form = rep.closed_form_max_dev <= 1e-12;
  rep.claim_fixed_points = !rep.fixed_points.whole_domain &&
                           rep.fixed_points.points.size() == 1 &&
                           std::abs(rep.fixed_points.points[0].at(0)) <= 1e-9;
  rep.pass = rep.claim_bga_holds && rep.claim_witnesses_found &&
             rep.claim_closed_form && rep.claim_fixed_points;
  return rep;
}

namespace {

struct Series {
  std::string label;
  std::string color;
  std::vector<double> values;  // indexed by row
};

void write_svg(const std::vector<Series>& series, std::size_t rows,
               const std::string& path) {
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (const auto& s : series) {
    for (double v : s.values) {
      if (first) { lo = hi = v; first = false; }
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (hi - lo < 1e-12) { hi += 1.0; lo -= 1.0; }
  const double w = 640.0, h = 400.0, ml = 60.0, mr = 20.0, mt = 20.0,
               mb = 40.0;
  auto sx = [&](std::size_t i) {
    return ml + (w - ml - mr) *
                    (rows > 1 ? static_cast<double>(i) / (rows - 1) : 0.5);
  };
  auto sy = [&](double v) {
    return mt + (h - mt - mb) * (1.0 - (v - lo) / (hi - lo));
  };
  std::ofstream out(path);
  if (!out) throw numeric_error("cannot open '" + path + "' for writing");
  out << std::setprecision(6);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << " " << h
      << "\">\n";
  out << "<rect width=\"" << w << "\" height=\"" << h
      << "\" fill=\"white\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << (h - mb) << "\" x2=\""
      << (w - mr) << "\" y2=\"" << (h - mb)
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << (h - mb) << "\" stroke=\"black\"/>\n";
  if (lo < 0.0 && hi > 0.0) {
    out << "<line x1=\"" << ml << "\" y1=\"" << sy(0.0) << "\" x2=\""
        << (w - mr) << "\" y2=\"" << sy(0.0)
        << "\" stroke=\"#cccccc\" stroke-dasharray=\"4 3\"/>\n";
  }
  std::size_t li = 0;
  for (const auto& s : series) {
    if (s.values.empty()) continue;
    out << "<polyline fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      if (i) out << ' ';
      out << sx(i) << ',' << sy(s.values[i]);
    }
    out << "\"/>\n";
    out << "<text x=\"" << (ml + 10 + 60.0 * li) << "\" y=\"" << (mt + 14)
        << "\" fill=\"" << s.color << "\" font-size=\"13\">" << s.label
        << "</text>\n";
    ++li;
  }
  out << "<text x=\"" << (w / 2) << "\" y=\"" << (h - 8)
      << "\" font-size=\"13\" text-anchor=\"middle\">n</text>\n";
  out << "</svg>\n";
  if (!out) throw numeric_error("write to '" + path + "' failed");
}

}  // namespace

void emit_plot_data(const IterationTrace& trace, const std::string& data_path,
                    const std::string& svg_path) {
  if (trace.rows.empty()) {
    throw domain_violation("cannot emit plot data for an empty trace");
  }
  std::ofstream out(data_path);
  if (!out) {
    throw numeric_error("cannot open '" + data_path + "' for writing");
  }
  out << "n,x,y,z\n" << std::setprecision(17);
  auto put = [&](const std::optional<Point>& p) {
    out << ',';
    if (p) {
      for (std::size_t i = 0; i < p->size(); ++i) {
        if (i) out << ';';
        out << (*p)[i];
      }
    }
  };
  for (const TraceRow& row : trace.rows) {
    out << row.n;
    put(std::optional<Point>(row.x_next));
    put(row.y);
    put(row.z);
    out << '\n';
  }
  if (!out) throw numeric_error("write to '" + data_path + "' failed");

  if (svg_path.empty()) return;
  // 1-D traces get a three-series chart; higher dimensions chart the first
  // coordinate of x only.
  Series xs{"x", "#1f77b4", {}}, ys{"y", "#d62728", {}},
      zs{"z", "#2ca02c", {}};
  for (const TraceRow& row : trace.rows) {
    xs.values.push_back(row.x_next.at(0));
    if (row.y) ys.values.push_back(row.y->at(0));
    if (row.z) zs.values.push_back(row.z->at(0));
  }
  std::vector<Series> series{xs};
  if (ys.values.size() == trace.rows.size()) series.push_back(ys);
  if (zs.values.size() == trace.rows.size()) series.push_back(zs);
  write_svg(series, trace.rows.size(), svg_path);
}

ExperimentOutcome write_experiment_outputs(const std::string& id,
                                           const std::string& out_dir,
                                           int jobs) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::path(out_dir) / id;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw numeric_error("cannot create output directory '" + dir.string() +
                        "': " + ec.message());
  }
  auto write_text = [&](const std::string& name, const std::string& text) {
    std::ofstream out(dir / name);
    if (!out) {
      throw numeric_error("cannot open '" + (dir / name).string() +
                          "' for writing");
    }
    out << text;
  };

  ExperimentOutcome outcome;
  outcome.id = id;
  if (id == "table1") {
    Table1Report rep = reproduce_table1();
    write_trace_csv(rep.trace, (dir / "trace.csv").string());
    write_trace_csv_full(rep.trace, (dir / "trace_full.csv").string());
    write_text("report.txt", rep.to_text());
    emit_plot_data(rep.trace, (dir / "plot_data.csv").string(),
                   (dir / "plot.svg").string());
    outcome.pass = rep.pass;
    std::ostringstream os;
    os << std::setprecision(3) << "table1 max deviation " << rep.max_dev()
       << " (tol 1e-06): " << (rep.pass ? "pass" : "fail");
    outcome.summary = os.str();
  } else if (id == "example1") {
    Example1Report rep = run_example1_suite(jobs);
    write_text("report.txt", rep.to_text());
    outcome.pass = rep.pass;
    outcome.summary = std::string("example1 claims: ") +
                      (rep.claim_bga_holds ? "bga=pass" : "bga=fail") +
                      (rep.claim_witnesses_found ? " witnesses=pass"
                                                 : " witnesses=fail") +
                      (rep.claim_closed_form ? " closed-form=pass"
                                             : " closed-form=fail") +
                      (rep.claim_fixed_points ? " fixed-points=pass"
                                              : " fixed-points=fail");
  } else if (id == "figure1") {
    IterationTrace trace = run_bregman_halpern(section6_config(42));
    write_trace_csv(trace, (dir / "trace.csv").string());
    write_trace_csv_full(trace, (dir / "trace_full.csv").string());
    emit_plot_data(trace, (dir / "plot_data.csv").string(),
                   (dir / "plot.svg").string());
    const TraceRow& last = trace.rows.back();
    const double worst =
        std::max(std::abs(last.x_next.at(0)),
                 std::max(std::abs(last.y->at(0)), std::abs(last.z->at(0))));
    outcome.pass = worst <= 2e-5;
    std::ostringstream os;
    os << std::setprecision(3)
       << "figure1 final series magnitude " << worst
       << " (tol 2e-05): " << (outcome.pass ? "pass" : "fail");
    outcome.summary = os.str();
    write_text("report.txt", outcome.summary + "\n");
  } else {
    throw config_error("unknown experiment id '" + id + "'");
  }
  return outcome;
}

}  // namespace bregfix
