#include "locus/locus.h"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <memory>
#include <optional>
#include <string>

#include "locus/error.hpp"
#include "locus/harness.hpp"
#include "locus/io.hpp"
#include "locus/metrics.hpp"

struct locus_instance {
  locus::Instance inst;
};

struct locus_measurements {
  locus::MeasurementSet m;
};

struct locus_solution {
  locus::Localization loc;
};

namespace {

thread_local std::string g_last_error;

locus_status fail(locus_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

locus_status status_of(locus::ErrorCode code) {
  switch (code) {
    case locus::ErrorCode::kInvalidArgument: return LOCUS_ERR_INVALID_ARGUMENT;
    case locus::ErrorCode::kDimensionMismatch: return LOCUS_ERR_DIMENSION_MISMATCH;
    case locus::ErrorCode::kNonFinite: return LOCUS_ERR_NON_FINITE;
    case locus::ErrorCode::kIo: return LOCUS_ERR_IO;
    case locus::ErrorCode::kParse: return LOCUS_ERR_PARSE;
    case locus::ErrorCode::kInternal: return LOCUS_ERR_INTERNAL;
  }
  return LOCUS_ERR_INTERNAL;
}

template <typename F>
locus_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return LOCUS_OK;
  } catch (const locus::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(LOCUS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(LOCUS_ERR_INTERNAL, e.what());
  }
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void copy_rowmajor(const locus::Matrix& m, double* out) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) out[i * m.cols() + k] = m(i, k);
}

locus::SolverParams to_params(const locus_solver_options* opts) {
  locus::SolverParams p;
  if (!opts) return p;
  p.feas_tol = opts->feas_tol;
  p.obj_tol = opts->obj_tol;
  p.gap_tol = opts->gap_tol;
  p.max_iters = opts->max_iters;
  p.penalty = opts->penalty;
  p.adaptive_penalty = opts->adaptive_penalty != 0;
  p.time_limit_seconds = opts->time_limit_seconds;
  return p;
}

}  // namespace

#define LOCUS_REQUIRE(ptr) \
  if (!(ptr)) return fail(LOCUS_ERR_NULL_POINTER, #ptr " is NULL")

extern "C" {

const char* locus_last_error(void) { return g_last_error.c_str(); }

const char* locus_status_string(locus_status status) {
  switch (status) {
    case LOCUS_OK: return "ok";
    case LOCUS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case LOCUS_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case LOCUS_ERR_NON_FINITE: return "non-finite input";
    case LOCUS_ERR_IO: return "I/O error";
    case LOCUS_ERR_PARSE: return "parse error";
    case LOCUS_ERR_NULL_POINTER: return "null pointer";
    case LOCUS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* locus_version(void) { return "0.1.0"; }

void locus_string_free(char* s) { delete[] s; }

locus_status locus_instance_generate(int n, int d, double r, double alpha, uint64_t seed, locus_instance** out) {
  LOCUS_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    auto h = std::make_unique<locus_instance>();
    h->inst.configuration = locus::sample_points(n, d, seed);
    const double radius = r > 0.0 ? r : locus::connectivity_radius(n, d, alpha);
    h->inst.graph = locus::build_graph(h->inst.configuration, radius, locus::NeighborSearch::kGrid);
    *out = h.release();
  });
}

locus_status locus_instance_from_points(const double* points, int n, int d, double r, const int* edges, size_t m,
                                        locus_instance** out) {
  LOCUS_REQUIRE(out);
  *out = nullptr;
  LOCUS_REQUIRE(points);
  if (m > 0 && !edges) return fail(LOCUS_ERR_NULL_POINTER, "edges is NULL but m > 0");
  return guarded([&] {
    if (n < 1 || d < 1) throw locus::InvalidArgument("need n >= 1 and d >= 1");
    locus::Matrix pts(n, d);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < d; ++k) pts(i, k) = points[static_cast<std::size_t>(i) * d + k];
    auto h = std::make_unique<locus_instance>();
    h->inst.configuration = locus::make_configuration(std::move(pts));
    if (m == 0 && !edges) {
      h->inst.graph = locus::build_graph(h->inst.configuration, r);
    } else {
      std::vector<locus::Edge> list(m);
      for (size_t e = 0; e < m; ++e) list[e] = {edges[2 * e], edges[2 * e + 1]};
      h->inst.graph = locus::graph_from_edges(h->inst.configuration, std::move(list), r > 0.0 ? r : 0.0);
    }
    *out = h.release();
  });
}

locus_status locus_instance_load(const char* path, locus_instance** out) {
  LOCUS_REQUIRE(out);
  *out = nullptr;
  LOCUS_REQUIRE(path);
  return guarded([&] {
    auto h = std::make_unique<locus_instance>();
    h->inst = locus::instance_from_json(locus::read_text_file(path));
    *out = h.release();
  });
}

locus_status locus_instance_save(const locus_instance* inst, const char* path) {
  LOCUS_REQUIRE(inst);
  LOCUS_REQUIRE(path);
  return guarded([&] { locus::write_text_file(path, locus::instance_to_json(inst->inst) + "\n"); });
}

locus_status locus_instance_info(const locus_instance* inst, int* n, int* d, double* r, size_t* edges, int* connected) {
  LOCUS_REQUIRE(inst);
  return guarded([&] {
    if (n) *n = inst->inst.graph.n;
    if (d) *d = inst->inst.configuration.dim;
    if (r) *r = inst->inst.graph.radius;
    if (edges) *edges = inst->inst.graph.edge_count();
    if (connected) *connected = locus::is_connected(inst->inst.graph) ? 1 : 0;
  });
}

locus_status locus_instance_points(const locus_instance* inst, double* out) {
  LOCUS_REQUIRE(inst);
  LOCUS_REQUIRE(out);
  return guarded([&] { copy_rowmajor(inst->inst.configuration.points, out); });
}

void locus_instance_free(locus_instance* inst) { delete inst; }

locus_status locus_noise(const locus_instance* inst, const char* model, double delta, double eps, uint64_t seed,
                         locus_measurements** out) {
  LOCUS_REQUIRE(out);
  *out = nullptr;
  LOCUS_REQUIRE(inst);
  LOCUS_REQUIRE(model);
  return guarded([&] {
    const auto parsed = locus::parse_noise_model(model);
    if (!parsed) throw locus::InvalidArgument(std::string("unknown noise model \"") + model + "\"");
    const auto& g = inst->inst.graph;
    const auto& cfg = inst->inst.configuration;
    auto h = std::make_unique<locus_measurements>();
    switch (*parsed) {
      case locus::NoiseModel::kExact: h->m = locus::exact_measurements(g); break;
      case locus::NoiseModel::kUniformBounded: h->m = locus::uniform_bounded(g, delta, seed); break;
      case locus::NoiseModel::kRssi: h->m = locus::rssi_noise(g, eps, seed); break;
      case locus::NoiseModel::kTdoa: h->m = locus::tdoa_noise(g, eps, seed); break;
      case locus::NoiseModel::kBending: h->m = locus::bending_adversary(g, cfg, delta); break;
      case locus::NoiseModel::kMixture: h->m = locus::mixture_noise(g, cfg, delta, eps, seed); break;
    }
    *out = h.release();
  });
}

locus_status locus_measurements_load(const char* path, locus_measurements** out) {
  LOCUS_REQUIRE(out);
  *out = nullptr;
  LOCUS_REQUIRE(path);
  return guarded([&] {
    auto h = std::make_unique<locus_measurements>();
    h->m = locus::measurements_from_json(locus::read_text_file(path));
    *out = h.release();
  });
}

locus_status locus_measurements_save(const locus_measurements* m, const char* path) {
  LOCUS_REQUIRE(m);
  LOCUS_REQUIRE(path);
  return guarded([&] { locus::write_text_file(path, locus::measurements_to_json(m->m) + "\n"); });
}

locus_status locus_measurements_info(const locus_measurements* m, int* n, size_t* edges, double* delta) {
  LOCUS_REQUIRE(m);
  if (n) *n = m->m.n;
  if (edges) *edges = m->m.size();
  if (delta) *delta = m->m.delta;
  g_last_error.clear();
  return LOCUS_OK;
}

locus_status locus_measurements_error_range(const locus_measurements* m, const locus_instance* truth,
                                            double* min_error, double* max_error) {
  LOCUS_REQUIRE(m);
  LOCUS_REQUIRE(truth);
  return guarded([&] {
    if (m->m.edges != truth->inst.graph.edges) throw locus::DimensionMismatch("measurements and graph differ in edges");
    const auto errs = locus::measurement_errors(m->m, truth->inst.graph);
    double lo = 0.0, hi = 0.0;
    if (!errs.empty()) {
      lo = *std::min_element(errs.begin(), errs.end());
      hi = *std::max_element(errs.begin(), errs.end());
    }
    if (min_error) *min_error = lo;
    if (max_error) *max_error = hi;
  });
}

void locus_measurements_free(locus_measurements* m) { delete m; }

void locus_solver_options_default(locus_solver_options* opts) {
  if (!opts) return;
  const locus::SolverParams p;
  opts->feas_tol = p.feas_tol;
  opts->obj_tol = p.obj_tol;
  opts->gap_tol = p.gap_tol;
  opts->max_iters = p.max_iters;
  opts->penalty = p.penalty;
  opts->adaptive_penalty = p.adaptive_penalty ? 1 : 0;
  opts->time_limit_seconds = p.time_limit_seconds;
}

locus_status locus_solve(const locus_measurements* m, int d, const locus_solver_options* opts, locus_solution** out) {
  LOCUS_REQUIRE(out);
  *out = nullptr;
  LOCUS_REQUIRE(m);
  return guarded([&] {
    auto h = std::make_unique<locus_solution>();
    h->loc = locus::localize(m->m, m->m.n, d, to_params(opts));
    *out = h.release();
  });
}

locus_status locus_solution_summary_get(const locus_solution* sol, locus_solution_summary* out) {
  LOCUS_REQUIRE(sol);
  LOCUS_REQUIRE(out);
  const auto& g = sol->loc.gram;
  out->n = static_cast<int>(g.q.rows());
  out->dim = static_cast<int>(sol->loc.estimate.points.cols());
  out->objective = g.objective;
  out->dual_bound = g.dual_bound;
  out->max_violation = g.max_violation;
  out->min_eigenvalue = g.min_eigenvalue;
  out->iterations = g.iterations;
  out->converged = g.converged ? 1 : 0;
  out->runtime_seconds = g.runtime_seconds;
  g_last_error.clear();
  return LOCUS_OK;
}

locus_status locus_solution_points(const locus_solution* sol, double* out) {
  LOCUS_REQUIRE(sol);
  LOCUS_REQUIRE(out);
  return guarded([&] { copy_rowmajor(sol->loc.estimate.points, out); });
}

locus_status locus_solution_gram(const locus_solution* sol, double* out) {
  LOCUS_REQUIRE(sol);
  LOCUS_REQUIRE(out);
  return guarded([&] { copy_rowmajor(sol->loc.gram.q, out); });
}

locus_status locus_solution_error_metric(const locus_solution* sol, const locus_instance* truth, double* out) {
  LOCUS_REQUIRE(sol);
  LOCUS_REQUIRE(truth);
  LOCUS_REQUIRE(out);
  return guarded([&] { *out = locus::error_metric(truth->inst.configuration.points, sol->loc.estimate.points); });
}

locus_status locus_solution_save(const locus_solution* sol, const char* path, const locus_instance* truth,
                                 int include_gram) {
  LOCUS_REQUIRE(sol);
  LOCUS_REQUIRE(path);
  return guarded([&] {
    std::optional<double> metric;
    if (truth) metric = locus::error_metric(truth->inst.configuration.points, sol->loc.estimate.points);
    locus::write_text_file(path, locus::localization_to_json(sol->loc, include_gram != 0, metric) + "\n");
  });
}

void locus_solution_free(locus_solution* sol) { delete sol; }

locus_status locus_rigidity_report(const locus_instance* inst, const char* mode, char** json_out) {
  LOCUS_REQUIRE(json_out);
  *json_out = nullptr;
  LOCUS_REQUIRE(inst);
  LOCUS_REQUIRE(mode);
  return guarded([&] {
    const auto parsed = locus::parse_stress_mode(mode);
    if (!parsed) throw locus::InvalidArgument(std::string("unknown stress mode \"") + mode + "\"");
    *json_out = copy_string(locus::rigidity_report_json(inst->inst, *parsed));
  });
}

locus_status locus_sweep_run(const char* config_json, const char* out_dir, int threads, int seeds,
                             locus_progress_fn progress, void* user, char** summary_out) {
  if (summary_out) *summary_out = nullptr;
  LOCUS_REQUIRE(config_json);
  LOCUS_REQUIRE(out_dir);
  return guarded([&] {
    locus::ExperimentConfig cfg = locus::experiment_config_from_json(config_json);
    if (threads > 0) cfg.threads = threads;
    if (seeds > 0) {
      cfg.seeds.clear();
      for (int s = 0; s < seeds; ++s) cfg.seeds.push_back(static_cast<std::uint64_t>(s));
    }
    locus::ProgressFn report;
    if (progress) {
      report = [&](const locus::CellRecord& r, std::size_t done, std::size_t total) {
        char line[256];
        std::snprintf(line, sizeof line, "[%zu/%zu] value=%g seed=%llu status=%s metric=%.6g iters=%d converged=%d",
                      done, total, r.sweep_value, static_cast<unsigned long long>(r.seed),
                      std::string(locus::to_string(r.status)).c_str(), r.metric, r.iterations, r.converged ? 1 : 0);
        progress(line, user);
      };
    }
    const locus::SweepResult res = locus::run_sweep(cfg, report);
    locus::emit_report(res, out_dir);
    if (summary_out) *summary_out = copy_string(locus::summary_json(res));
  });
}

}  // extern "C"
