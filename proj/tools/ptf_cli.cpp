// ptf: solve, generate and benchmark with the parabolic target-following methods.
//
//   ptf solve --input FILE [--method ptfm2] [--eps 1e-8] [--r 0.857142857]
//             [--finite-termination] [--beta-policy constant|proportional]
//             [--trace FILE] [--report FILE]
//   ptf gen   --m M --n N --seed S [--k K] --out FILE
//   ptf bench [--grid default|full] [--method ptfm2] [--count 100] [--seed S]
//             --out DIR [--finite-termination] [--jobs J]
//
// Exit codes: 0 ok, 2 solver did not converge, 64 usage, 65 bad input data,
// 66 unreadable input, 73 cannot create output.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ptf/ptf.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoConvergence = 2;
constexpr int kExitUsage = 64;
constexpr int kExitDataErr = 65;
constexpr int kExitNoInput = 66;
constexpr int kExitCantCreate = 73;

struct SolveArgs {
  std::string input;
  std::string method = "ptfm2";
  double eps = 1e-8;
  double r = 6.0 / 7.0;
  bool finite_termination = false;
  std::string activation = "awake_tests";
  std::string beta_policy = "constant";
  double beta_scale = 1.0;
  int max_outer = 500;
  std::string trace;
  std::string report;
};

struct GenArgs {
  int m = 0;
  int n = 0;
  std::uint64_t seed = 1;
  std::uint64_t k = 0;
  std::string out;
};

struct BenchArgs {
  std::string grid = "default";
  std::string method = "ptfm2";
  int count = 100;
  std::uint64_t seed = 1;
  std::string out;
  bool finite_termination = false;
  int jobs = 1;
  double eps = 1e-8;
};

const std::map<std::string, ptf::Method> kMethods = {
    {"tptfm", ptf::Method::tptfm}, {"acptfm", ptf::Method::acptfm}, {"ptfm2", ptf::Method::ptfm2}};

void write_trace(std::ostream& os, const ptf::SolveReport& rep) {
  os << "k,kind,alpha,v0,gap,delta,psi\n";
  char buf[256];
  for (const auto& r : rep.records) {
    std::snprintf(buf, sizeof buf, "%d,%s,%.17g,%.17g,%.17g,%.17g,%.17g", r.k,
                  std::string(ptf::to_string(r.kind)).c_str(), r.alpha, r.v0_after, r.gap_after,
                  r.delta_after, r.psi_after);
    os << buf << '\n';
  }
}

int cmd_solve(const SolveArgs& a) {
  ptf::MethodConfig cfg;
  cfg.method = kMethods.at(a.method);
  cfg.eps = a.eps;
  cfg.r = a.r;
  cfg.max_outer = a.max_outer;
  cfg.finite_termination = a.finite_termination;
  cfg.activation_policy =
      a.activation == "always" ? ptf::ActivationPolicy::always : ptf::ActivationPolicy::awake_tests;
  cfg.beta_policy =
      a.beta_policy == "proportional" ? ptf::BetaPolicy::proportional : ptf::BetaPolicy::constant;
  cfg.beta_scale = a.beta_scale;
  try {
    cfg.validate();
  } catch (const ptf::Error& e) {
    std::cerr << "ptf solve: " << e.what() << '\n';
    return kExitUsage;
  }

  std::ifstream in(a.input);
  if (!in) {
    std::cerr << "ptf solve: cannot read " << a.input << '\n';
    return kExitNoInput;
  }
  std::optional<ptf::LoadedProblem> prob;
  try {
    prob.emplace(ptf::load_instance(in));
  } catch (const ptf::Error& e) {
    std::cerr << "ptf solve: " << a.input << ": " << e.what() << '\n';
    return kExitDataErr;
  }
  if (!prob->start) {
    std::cerr << "ptf solve: " << a.input << ": no starting point (x0, s0, y0) in problem file\n";
    return kExitDataErr;
  }

  ptf::SolveReport rep;
  try {
    rep = ptf::run(prob->instance, *prob->start, cfg);
  } catch (const ptf::Error& e) {
    std::cerr << "ptf solve: " << e.what() << '\n';
    return kExitDataErr;
  }

  const std::string json = ptf::to_json(rep).dump(1) + "\n";
  if (a.report.empty()) {
    std::cout << json;
  } else {
    std::ofstream f(a.report);
    if (!(f << json)) {
      std::cerr << "ptf solve: cannot write " << a.report << '\n';
      return kExitCantCreate;
    }
  }
  if (!a.trace.empty()) {
    std::ofstream f(a.trace);
    if (!f) {
      std::cerr << "ptf solve: cannot write " << a.trace << '\n';
      return kExitCantCreate;
    }
    write_trace(f, rep);
  }
  std::cerr << "ptf solve: " << ptf::to_string(rep.termination) << " after "
            << rep.predictor_count << " predictor / " << rep.corrector_count
            << " corrector steps, gap " << rep.final_gap << '\n';
  return rep.success() ? kExitOk : kExitNoConvergence;
}

int cmd_gen(const GenArgs& a) {
  if (a.m < 1 || a.n <= a.m) {
    std::cerr << "ptf gen: need 1 <= m < n (got m=" << a.m << ", n=" << a.n << ")\n";
    return kExitUsage;
  }
  const auto prob = ptf::generate(a.m, a.n, a.seed, a.k);
  std::ofstream f(a.out);
  if (!f) {
    std::cerr << "ptf gen: cannot write " << a.out << '\n';
    return kExitCantCreate;
  }
  ptf::save_instance(f, prob.instance, &prob.start);
  if (!f) {
    std::cerr << "ptf gen: write failed for " << a.out << '\n';
    return kExitCantCreate;
  }
  return kExitOk;
}

int cmd_bench(const BenchArgs& a) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(a.out, ec);
  if (ec || !fs::is_directory(a.out)) {
    std::cerr << "ptf bench: cannot create output directory " << a.out << '\n';
    return kExitCantCreate;
  }
  {
    // Probe writability before spending time on the runs.
    const fs::path probe = fs::path(a.out) / ".ptf_write_probe";
    std::ofstream f(probe);
    if (!f) {
      std::cerr << "ptf bench: output directory " << a.out << " is not writable\n";
      return kExitCantCreate;
    }
    f.close();
    fs::remove(probe, ec);
  }

  ptf::MethodConfig mc;
  mc.method = kMethods.at(a.method);
  mc.eps = a.eps;
  mc.finite_termination = a.finite_termination;
  mc.ft_indicators = {ptf::Indicator::ratio_xs};

  const auto cells = a.grid == "full" ? ptf::full_grid() : ptf::default_grid();
  std::vector<ptf::CellStats> stats;
  for (const auto& cell : cells) {
    const ptf::GenConfig gen{cell.m, cell.n, a.seed, a.count};
    stats.push_back(ptf::run_cell(gen, mc, a.jobs));
    const auto& s = stats.back();
    std::fprintf(stderr, "m=%4d n=%5d  mean %.2f +- %.1f%%  corr %.2f  ft %d  failures %d\n",
                 s.m, s.n, s.mean_predictors, s.rel_std, s.mean_correctors, s.ft_success_count,
                 s.failures);
  }
  const nlohmann::json meta = {{"method", a.method},     {"grid", a.grid},
                               {"count", a.count},       {"seed", a.seed},
                               {"eps", a.eps},           {"finite_termination", a.finite_termination}};
  try {
    ptf::emit_report(a.out, stats, meta);
  } catch (const ptf::IoError& e) {
    std::cerr << "ptf bench: " << e.what() << '\n';
    return kExitCantCreate;
  }
  for (const auto& s : stats)
    if (s.cell_failed()) return kExitNoConvergence;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parabolic target-following LP solver"};
  app.require_subcommand(1);

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Solve a JSON problem file");
  solve->add_option("--input", sa.input, "Problem file")->required();
  solve->add_option("--method", sa.method)->check(CLI::IsMember({"tptfm", "acptfm", "ptfm2"}));
  solve->add_option("--eps", sa.eps, "Stop once v0 <= eps")->check(CLI::PositiveNumber);
  solve->add_option("--r", sa.r, "Neighbourhood radius in (0, 1)")->check(CLI::Range(0.0, 1.0));
  solve->add_flag("--finite-termination", sa.finite_termination);
  solve->add_option("--activation", sa.activation)
      ->check(CLI::IsMember({"always", "awake_tests"}));
  solve->add_option("--beta-policy", sa.beta_policy)
      ->check(CLI::IsMember({"constant", "proportional"}));
  solve->add_option("--beta-scale", sa.beta_scale)->check(CLI::PositiveNumber);
  solve->add_option("--max-outer", sa.max_outer)->check(CLI::PositiveNumber);
  solve->add_option("--trace", sa.trace, "Per-iteration CSV");
  solve->add_option("--report", sa.report, "Report JSON (default: stdout)");

  GenArgs ga;
  auto* gen = app.add_subcommand("gen", "Generate a random instance with a feasible start");
  gen->add_option("--m", ga.m)->required();
  gen->add_option("--n", ga.n)->required();
  gen->add_option("--seed", ga.seed)->required();
  gen->add_option("--k", ga.k, "Instance index within the seed");
  gen->add_option("--out", ga.out)->required();

  BenchArgs ba;
  ba.jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  auto* bench = app.add_subcommand("bench", "Run benchmark cells");
  bench->add_option("--grid", ba.grid)->check(CLI::IsMember({"default", "full"}));
  bench->add_option("--method", ba.method)->check(CLI::IsMember({"tptfm", "acptfm", "ptfm2"}));
  bench->add_option("--count", ba.count)->check(CLI::PositiveNumber);
  bench->add_option("--seed", ba.seed);
  bench->add_option("--out", ba.out)->required();
  bench->add_flag("--finite-termination", ba.finite_termination);
  bench->add_option("--jobs", ba.jobs)->check(CLI::PositiveNumber);
  bench->add_option("--eps", ba.eps)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (solve->parsed()) return cmd_solve(sa);
  if (gen->parsed()) return cmd_gen(ga);
  return cmd_bench(ba);
}
