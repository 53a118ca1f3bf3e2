#pragma once

#include "bregfix/iterations.hpp"

namespace bregfix {

// One row of the embedded reference table for the demo instance: z_n, y_n,
// x_{n+1} and |x_{n+1} - x_n| at 7 decimals.
struct GoldenRow {
  long n;
  double z, y, x, step;
};

// The 42-row reference table.
const std::vector<GoldenRow>& golden_table1();

// Demo instance: f(x) = 0.8 x^2, T(x) = x/5 on [-1,1], schedule
// alpha=(n+1)/(4n), beta=(n+1)/(5n), gamma=1/(500n), x1=-0.8, u=0.1.
BregmanFunction section6_function();
Mapping section6_mapping();
IterationConfig section6_config(long max_iter = 42);

struct Table1Report {
  IterationTrace trace;
  double max_dev_z = 0.0;
  double max_dev_y = 0.0;
  double max_dev_x = 0.0;
  double max_dev_step = 0.0;
  double oracle_dev = 0.0;  // vs the closed-form per-step recursion
  double runtime_seconds = 0.0;
  bool pass = false;  // all column deviations <= 1e-6

  double max_dev() const;
  std::string to_text() const;
};

// Runs the demo instance for 42 steps and diffs against golden_table1().
Table1Report reproduce_table1();

struct Example1Report {
  // T(x) = x^2 on [0, 0.9] with the quartic function.
  std::vector<PropertyReport> bga_sweep;        // alpha in {0.5,...,0.9}
  PropertyReport nonexpansive;
  PropertyReport condition_C;
  std::vector<PropertyReport> alpha_sweep;      // alpha in {0,0.1,...,0.9}
  std::vector<PropertyReport> gen_alpha_sweep;  // same grid
  FixedPointResult fixed_points;
  double closed_form_max_dev = 0.0;  // x^4 + 3y^4 - 4xy^3 vs generic D
  std::size_t closed_form_pairs = 0;

  bool claim_bga_holds = false;        // all bga_sweep verdicts hold_on_grid
  bool claim_witnesses_found = false;  // nonexpansive/C/alpha/gen-alpha at 0.5
  bool claim_closed_form = false;      // max dev <= 1e-12
  bool claim_fixed_points = false;     // exactly {0}
  bool pass = false;                   // all four claims

  std::string to_text() const;
};

Example1Report run_example1_suite(int jobs = 1);

// Columnar plot data (n, x, y, z) for external tooling; optional
// self-contained SVG line chart of the three series.
void emit_plot_data(const IterationTrace& trace, const std::string& data_path,
                    const std::string& svg_path = "");

struct ExperimentOutcome {
  std::string id;
  bool pass = false;
  std::string summary;  // one line
};

// Runs one of the registered experiments (table1, example1, figure1) and
// writes <out>/<id>/{trace.csv,trace_full.csv,report.txt,plot.svg} as
// applicable. Unknown ids raise config_error.
ExperimentOutcome write_experiment_outputs(const std::string& id,
                                           const std::string& out_dir,
                                           int jobs = 1);

}  // namespace bregfix
