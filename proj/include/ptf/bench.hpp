#pragma once

// Random instance generator, batched runs per (m, n) cell, statistics and
// CSV / JSON table output.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ptf/errors.hpp"
#include "ptf/lp_core.hpp"
#include "ptf/path_methods.hpp"
#include "ptf/random.hpp"
#include "ptf/report.hpp"

namespace ptf {

struct GenConfig {
  int m = 32;
  int n = 64;
  std::uint64_t seed = 1;
  int count = 100;

  void validate() const {
    if (m < 1 || n < 2 || 2 * m > n)
      throw StructuralError("GenConfig: need 1 <= m <= n/2 (got m=" + std::to_string(m) +
                            ", n=" + std::to_string(n) + ")");
    if (count < 1) throw StructuralError("GenConfig: count must be >= 1");
  }
};

struct GeneratedProblem {
  LpInstance instance;
  PrimalDualPoint start;
};

/// x^, s^ ~ U(0,1)^n, A ~ U(-1,1)^{m x n} (row-major draw order), b = A x^,
/// c = s^, u0 = (x^, s^, 0).
inline GeneratedProblem generate(int m, int n, std::uint64_t seed, std::uint64_t k) {
  if (m < 1 || n <= m) throw StructuralError("generate: need 1 <= m < n");
  const CounterStream sx(seed, k, static_cast<std::uint64_t>(GenStream::x_hat));
  const CounterStream ss(seed, k, static_cast<std::uint64_t>(GenStream::s_hat));
  const CounterStream sa(seed, k, static_cast<std::uint64_t>(GenStream::matrix));
  Vector x(n), s(n);
  for (int i = 0; i < n; ++i) {
    x[i] = sx.u01(i);
    s[i] = ss.u01(i);
  }
  Matrix a(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      a(i, j) = sa.um11(static_cast<std::uint64_t>(i) * n + j);
  Vector b = a * x;
  return {LpInstance(std::move(a), std::move(b), s), PrimalDualPoint{x, s, Vector::Zero(m)}};
}

inline GeneratedProblem generate(const GenConfig& cfg, std::uint64_t k) {
  cfg.validate();
  return generate(cfg.m, cfg.n, cfg.seed, k);
}

/// (25 + log2(m) log2(n/16)) / 4.
inline double forecast(int m, int n) {
  if (m < 2 || n < 2) throw DomainError("forecast: m and n must be >= 2");
  return (25.0 + std::log2(m) * std::log2(n / 16.0)) / 4.0;
}

/// Pairwise (cascade) summation; result does not depend on thread scheduling.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

struct RunOutcome {
  std::uint64_t k = 0;
  bool ok = false;
  int predictors = 0;
  int correctors = 0;
  bool finite_terminated = false;
  double final_gap = 0.0;
  double wall_time_s = 0.0;
  std::string error;
  SolveReport report;
};

struct CellStats {
  int m = 0;
  int n = 0;
  Method method = Method::ptfm2;
  int count = 0;
  int failures = 0;
  double mean_predictors = 0.0;
  double rel_std = 0.0;  // percent, sample standard deviation over the mean
  double mean_correctors = 0.0;
  /// Total correctors over total predictors.
  double correctors_per_predictor = 0.0;
  int ft_success_count = 0;
  double mean_gap = 0.0;
  double mean_wall_time_s = 0.0;
  double max_wall_time_s = 0.0;
  std::vector<RunOutcome> runs;

  /// A cell fails when more than 5% of its solves fail.
  bool cell_failed() const { return failures * 20 > count; }
  double forecast_value() const { return forecast(m, n); }
};

inline RunOutcome run_one(const GenConfig& gen, std::uint64_t k, const MethodConfig& mc) {
  RunOutcome out;
  out.k = k;
  try {
    auto prob = generate(gen, k);
    out.report = run(prob.instance, prob.start, mc);
    out.ok = out.report.success();
    out.predictors = out.report.predictor_count;
    out.correctors = out.report.corrector_count;
    out.finite_terminated = out.report.termination == Termination::finite_term_success;
    out.final_gap = out.report.final_gap;
    out.wall_time_s = out.report.wall_time_s;
    if (!out.ok)
      out.error = std::string(to_string(out.report.termination)) +
                  (out.report.failure_reason.empty() ? "" : ": " + out.report.failure_reason);
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

/// Aggregates over successful runs; failed runs only count toward `failures`.
inline CellStats summarize(const GenConfig& gen, Method method, std::vector<RunOutcome> runs) {
  CellStats st;
  st.m = gen.m;
  st.n = gen.n;
  st.method = method;
  st.count = static_cast<int>(runs.size());
  std::vector<double> pred, corr, gap, wall;
  for (const auto& r : runs) {
    wall.push_back(r.wall_time_s);
    st.max_wall_time_s = std::max(st.max_wall_time_s, r.wall_time_s);
    if (!r.ok) {
      ++st.failures;
      continue;
    }
    pred.push_back(r.predictors);
    corr.push_back(r.correctors);
    gap.push_back(r.finite_terminated ? 0.0 : r.final_gap);
    if (r.finite_terminated) ++st.ft_success_count;
  }
  if (!wall.empty()) st.mean_wall_time_s = pairwise_sum(wall) / wall.size();
  if (!pred.empty()) {
    const double np = static_cast<double>(pred.size());
    const double sum_pred = pairwise_sum(pred);
    const double sum_corr = pairwise_sum(corr);
    st.mean_predictors = sum_pred / np;
    st.mean_correctors = sum_corr / np;
    st.correctors_per_predictor = sum_pred > 0.0 ? sum_corr / sum_pred : 0.0;
    st.mean_gap = pairwise_sum(gap) / np;
    if (pred.size() > 1 && st.mean_predictors > 0.0) {
      std::vector<double> sq;
      sq.reserve(pred.size());
      for (double p : pred) sq.push_back((p - st.mean_predictors) * (p - st.mean_predictors));
      st.rel_std = 100.0 * std::sqrt(pairwise_sum(sq) / (np - 1.0)) / st.mean_predictors;
    }
  }
  st.runs = std::move(runs);
  return st;
}

/// Runs instances k = 0 .. count-1 on `jobs` worker threads.
inline CellStats run_cell(const GenConfig& gen, const MethodConfig& mc, int jobs = 1,
                          const std::function<void(const RunOutcome&)>& on_done = {}) {
  gen.validate();
  mc.validate();
  std::vector<RunOutcome> runs(gen.count);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k; (k = next.fetch_add(1)) < gen.count;) runs[k] = run_one(gen, k, mc);
  };
  jobs = std::clamp(jobs, 1, gen.count);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }
  if (on_done)
    for (const auto& r : runs) on_done(r);
  return summarize(gen, mc.method, std::move(runs));
}

struct GridCell {
  int m;
  int n;
};

/// All cells with 32 <= m <= n/2 and n <= 256.
inline std::vector<GridCell> default_grid() {
  return {{32, 64}, {32, 128}, {32, 256}, {64, 128}, {64, 256}, {128, 256}};
}

/// All cells with 32 <= m <= n/2 and n <= 1024.
inline std::vector<GridCell> full_grid() {
  std::vector<GridCell> cells;
  for (int n = 64; n <= 1024; n *= 2)
    for (int m = 32; 2 * m <= n; m *= 2) cells.push_back({m, n});
  return cells;
}

inline const char* kCsvHeader =
    "m,n,method,count,mean_pred,rel_std_pct,mean_corr,ft_count,forecast,abs_dev";

inline void write_csv(std::ostream& os, std::span<const CellStats> cells) {
  os << kCsvHeader << '\n';
  char buf[256];
  for (const auto& c : cells) {
    const double f = c.forecast_value();
    std::snprintf(buf, sizeof buf, "%d,%d,%s,%d,%.4f,%.2f,%.4f,%d,%.4f,%.4f", c.m, c.n,
                  std::string(to_string(c.method)).c_str(), c.count, c.mean_predictors,
                  c.rel_std, c.mean_correctors, c.ft_success_count, f,
                  std::abs(c.mean_predictors - f));
    os << buf << '\n';
  }
}

inline nlohmann::json to_json(const CellStats& c, bool with_timing = true) {
  auto runs = nlohmann::json::array();
  for (const auto& r : c.runs) {
    nlohmann::json jr = {{"k", r.k},
                         {"ok", r.ok},
                         {"predictors", r.predictors},
                         {"correctors", r.correctors},
                         {"finite_terminated", r.finite_terminated},
                         {"final_gap", detail::json_real(r.final_gap)},
                         {"report", to_json(r.report, with_timing)}};
    if (!r.error.empty()) jr["error"] = r.error;
    runs.push_back(std::move(jr));
  }
  nlohmann::json j = {{"m", c.m},
                      {"n", c.n},
                      {"method", std::string(to_string(c.method))},
                      {"count", c.count},
                      {"failures", c.failures},
                      {"cell_failed", c.cell_failed()},
                      {"mean_pred", c.mean_predictors},
                      {"rel_std_pct", c.rel_std},
                      {"mean_corr", c.mean_correctors},
                      {"corr_per_pred", c.correctors_per_predictor},
                      {"ft_count", c.ft_success_count},
                      {"mean_gap", c.mean_gap},
                      {"forecast", c.forecast_value()},
                      {"abs_dev", std::abs(c.mean_predictors - c.forecast_value())},
                      {"runs", runs}};
  if (with_timing) {
    j["mean_wall_time_s"] = c.mean_wall_time_s;
    j["max_wall_time_s"] = c.max_wall_time_s;
  }
  return j;
}

/// Writes DIR/cells.csv and DIR/bench.json. Throws IoError when either
/// file cannot be written.
inline void emit_report(const std::filesystem::path& dir, std::span<const CellStats> cells,
                        const nlohmann::json& meta = nlohmann::json::object(),
                        bool with_timing = true) {
  if (cells.empty()) throw StructuralError("emit_report: no cells");
  auto open = [](const std::filesystem::path& p) {
    std::ofstream f(p);
    if (!f) throw IoError("cannot write " + p.string());
    return f;
  };
  {
    auto f = open(dir / "cells.csv");
    write_csv(f, cells);
    if (!f) throw IoError("write failed: " + (dir / "cells.csv").string());
  }
  nlohmann::json bundle = {{"meta", meta}, {"cells", nlohmann::json::array()}};
  for (const auto& c : cells) bundle["cells"].push_back(to_json(c, with_timing));
  auto f = open(dir / "bench.json");
  f << bundle.dump(1) << '\n';
  if (!f) throw IoError("write failed: " + (dir / "bench.json").string());
}

}  // namespace ptf
