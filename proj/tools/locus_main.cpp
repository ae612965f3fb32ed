#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "locus/locus.h"

namespace {

// Thrown when a C API call fails; main turns it into a message and exit code.
struct ApiFailure {
  locus_status status;
  std::string message;
};

void check(locus_status s) {
  if (s != LOCUS_OK) throw ApiFailure{s, locus_last_error()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ApiFailure{LOCUS_ERR_IO, "cannot open " + path};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void print_progress(const char* line, void*) { std::fprintf(stderr, "%s\n", line); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SDP-based localization from noisy pairwise distances"};
  app.set_version_flag("--version", std::string(locus_version()));
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "Sample points in the unit hypercube and build G(n, r)");
  int gen_n = 0, gen_d = 2;
  double gen_r = 0.0, gen_alpha = 3.0;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--n", gen_n, "Number of points")->required();
  gen->add_option("--d", gen_d, "Dimension")->capture_default_str();
  gen->add_option("--r", gen_r, "Radius (default: alpha (log n / n)^(1/d))");
  gen->add_option("--alpha", gen_alpha, "Radius scale when --r is not given")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Random seed")->capture_default_str();
  gen->add_option("--out", gen_out, "Output instance JSON")->required();

  auto* noise = app.add_subcommand("noise", "Generate measurements for an instance");
  std::string noise_in, noise_model, noise_out;
  double noise_delta = 0.0, noise_eps = 0.1;
  std::uint64_t noise_seed = 0;
  noise->add_option("--in", noise_in, "Instance JSON from `generate`")->required();
  noise->add_option("--model", noise_model, "Noise model")
      ->required()
      ->check(CLI::IsMember({"exact", "uniform", "rssi", "tdoa", "bending", "mixture"}));
  noise->add_option("--delta", noise_delta, "Error budget (uniform, bending, mixture)")->capture_default_str();
  noise->add_option("--eps", noise_eps, "Relative error (rssi, tdoa) or Gaussian fraction (mixture)")
      ->capture_default_str();
  noise->add_option("--seed", noise_seed, "Random seed")->capture_default_str();
  noise->add_option("--out", noise_out, "Output measurement JSON")->required();

  auto* solve = app.add_subcommand("solve", "Solve the trace-minimization SDP and round to rank d");
  std::string solve_in, solve_out, solve_truth;
  int solve_d = 2;
  bool solve_gram = false;
  locus_solver_options opts;
  locus_solver_options_default(&opts);
  solve->add_option("--in", solve_in, "Measurement JSON")->required();
  solve->add_option("--d", solve_d, "Target dimension")->capture_default_str();
  solve->add_option("--feas-tol", opts.feas_tol, "Feasibility tolerance")->capture_default_str();
  solve->add_option("--obj-tol", opts.obj_tol, "Relative objective-change tolerance")->capture_default_str();
  solve->add_option("--gap-tol", opts.gap_tol, "Relative duality-gap tolerance")->capture_default_str();
  solve->add_option("--max-iters", opts.max_iters, "Iteration limit")->capture_default_str();
  solve->add_option("--time-limit", opts.time_limit_seconds, "Wall-clock limit in seconds (0 = none)");
  solve->add_option("--truth", solve_truth, "Instance JSON with the true points; adds the error metric");
  solve->add_flag("--gram", solve_gram, "Include the Gram matrix in the output");
  solve->add_option("--out", solve_out, "Output solution JSON")->required();

  auto* rig = app.add_subcommand("rigidity", "Rigidity and stress-matrix report for an instance");
  std::string rig_in, rig_mode = "reduced";
  rig->add_option("--in", rig_in, "Instance JSON")->required();
  rig->add_option("--mode", rig_mode, "Clique set for the stress matrix")
      ->check(CLI::IsMember({"full", "reduced"}))
      ->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "Run a scaling experiment and write CSV, JSON and SVG");
  std::string sweep_config, sweep_dir;
  int sweep_threads = 0, sweep_seeds = 0;
  bool sweep_quiet = false;
  sweep->add_option("--config", sweep_config, "Experiment config JSON")->required();
  sweep->add_option("--out-dir", sweep_dir, "Output directory")->required();
  sweep->add_option("--threads", sweep_threads, "Worker threads (overrides the config)");
  sweep->add_option("--seeds", sweep_seeds, "Use seeds 0..N-1 (overrides the config)");
  sweep->add_flag("--quiet", sweep_quiet, "No per-cell progress on stderr");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      locus_instance* inst = nullptr;
      check(locus_instance_generate(gen_n, gen_d, gen_r, gen_alpha, gen_seed, &inst));
      int n = 0, d = 0, connected = 0;
      double r = 0.0;
      size_t m = 0;
      locus_instance_info(inst, &n, &d, &r, &m, &connected);
      const locus_status s = locus_instance_save(inst, gen_out.c_str());
      locus_instance_free(inst);
      check(s);
      std::printf("n=%d d=%d r=%.6g edges=%zu connected=%s -> %s\n", n, d, r, m, connected ? "yes" : "no",
                  gen_out.c_str());
    } else if (*noise) {
      locus_instance* inst = nullptr;
      check(locus_instance_load(noise_in.c_str(), &inst));
      locus_measurements* meas = nullptr;
      locus_status s = locus_noise(inst, noise_model.c_str(), noise_delta, noise_eps, noise_seed, &meas);
      double lo = 0.0, hi = 0.0, delta = 0.0;
      size_t m = 0;
      if (s == LOCUS_OK) s = locus_measurements_error_range(meas, inst, &lo, &hi);
      if (s == LOCUS_OK) s = locus_measurements_save(meas, noise_out.c_str());
      if (s == LOCUS_OK) locus_measurements_info(meas, nullptr, &m, &delta);
      locus_measurements_free(meas);
      locus_instance_free(inst);
      check(s);
      std::printf("model=%s edges=%zu delta=%.6g error range [%.6g, %.6g] -> %s\n", noise_model.c_str(), m, delta, lo,
                  hi, noise_out.c_str());
    } else if (*solve) {
      locus_measurements* meas = nullptr;
      check(locus_measurements_load(solve_in.c_str(), &meas));
      locus_instance* truth = nullptr;
      locus_status s = LOCUS_OK;
      if (!solve_truth.empty()) s = locus_instance_load(solve_truth.c_str(), &truth);
      locus_solution* sol = nullptr;
      if (s == LOCUS_OK) s = locus_solve(meas, solve_d, &opts, &sol);
      locus_solution_summary sum{};
      double metric = -1.0;
      if (s == LOCUS_OK) s = locus_solution_summary_get(sol, &sum);
      if (s == LOCUS_OK && truth) s = locus_solution_error_metric(sol, truth, &metric);
      if (s == LOCUS_OK) s = locus_solution_save(sol, solve_out.c_str(), truth, solve_gram ? 1 : 0);
      locus_solution_free(sol);
      locus_instance_free(truth);
      locus_measurements_free(meas);
      check(s);
      std::printf("converged=%s iterations=%d trace=%.10g lower_bound=%.10g max_violation=%.3g time=%.2fs",
                  sum.converged ? "yes" : "no", sum.iterations, sum.objective, sum.dual_bound, sum.max_violation,
                  sum.runtime_seconds);
      if (!solve_truth.empty()) std::printf(" metric=%.6g", metric);
      std::printf(" -> %s\n", solve_out.c_str());
    } else if (*rig) {
      locus_instance* inst = nullptr;
      check(locus_instance_load(rig_in.c_str(), &inst));
      char* report = nullptr;
      const locus_status s = locus_rigidity_report(inst, rig_mode.c_str(), &report);
      locus_instance_free(inst);
      check(s);
      std::printf("%s\n", report);
      locus_string_free(report);
    } else if (*sweep) {
      const std::string text = slurp(sweep_config);
      char* summary = nullptr;
      check(locus_sweep_run(text.c_str(), sweep_dir.c_str(), sweep_threads, sweep_seeds,
                            sweep_quiet ? nullptr : print_progress, nullptr, &summary));
      std::printf("%s\n", summary);
      locus_string_free(summary);
    }
  } catch (const ApiFailure& f) {
    std::fprintf(stderr, "locus: %s: %s\n", locus_status_string(f.status), f.message.c_str());
    return 1;
  }
  return 0;
}
