// actembed: numerical evaluation of rate-distortion-cost and capacity-cost
// trade-offs for action-dependent coding with an action-observing decoder.
//
// Subcommands:
//   solve     evaluate one operating point of a problem file
//   curve     emit a trade-off sweep as CSV (named figures or custom sweeps)
//   selftest  run the built-in verification suite

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "actembed/figures.hpp"
#include "actembed/problem_io.hpp"
#include "actembed/regions.hpp"
#include "actembed/selftest.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitSelftestFailed = 3;

int default_threads() {
  if (const char* env = std::getenv("ACTEMBED_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

struct SolverFlags {
  int grid = 0;
  int restarts = -1;
  int refine = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
  std::uint64_t budget = 0;
  std::vector<std::string> cards;

  void attach(CLI::App* cmd) {
    cmd->add_option("--grid", grid, "Simplex grid resolution");
    cmd->add_option("--restarts", restarts, "Randomized refinement starts");
    cmd->add_option("--refine", refine, "Refinement iterations per start");
    cmd->add_option("--seed", seed, "Solver seed")->each([this](const std::string&) {
      seed_set = true;
    });
    cmd->add_option("--threads", threads, "Worker threads (default: 1, or ACTEMBED_THREADS)");
    cmd->add_option("--budget", budget, "Grid-stage evaluation budget");
    cmd->add_option("--card", cards,
                    "Auxiliary cardinality cap, e.g. --card U=2 (repeatable)");
  }

  actembed::SolverConfig to_config() const {
    actembed::SolverConfig config;
    if (grid > 0) config.grid_resolution = grid;
    if (restarts >= 0) config.restarts = restarts;
    if (refine >= 0) config.refine_iters = refine;
    if (seed_set) config.seed = seed;
    config.threads = threads > 0 ? threads : default_threads();
    if (budget > 0) config.max_grid_evals = budget;
    for (const auto& entry : cards) {
      const auto eq = entry.find('=');
      if (eq == std::string::npos) {
        throw CLI::ValidationError("--card expects NAME=INT, got '" + entry + "'");
      }
      config.aux_cardinalities[entry.substr(0, eq)] =
          std::stoi(entry.substr(eq + 1));
    }
    return config;
  }
};

int run_solve(const std::string& path, std::optional<double> d1,
              std::optional<double> d2, std::optional<double> gamma,
              std::optional<double> r1, std::optional<double> gamma_x,
              std::optional<double> gamma_a, const SolverFlags& flags) {
  actembed::io::ParsedProblem parsed = actembed::io::load_problem(path);
  const actembed::SolverConfig config = flags.to_config();

  actembed::RegionPoint point;
  if (auto* src = std::get_if<actembed::SourceActionProblem>(&parsed)) {
    if (!d1 || !d2 || !gamma) {
      throw actembed::io::ParseError(
          "source problems need --d1, --d2 and --gamma");
    }
    point = actembed::solve_source(*src, *d1, *d2, *gamma, config);
  } else if (auto* ch = std::get_if<actembed::ChannelActionProblem>(&parsed)) {
    if (!r1 || !gamma) {
      throw actembed::io::ParseError("channel problems need --r1 and --gamma");
    }
    point = actembed::channel_max_sum_rate(*ch, *r1, *gamma, config);
  } else {
    auto prob = std::get<actembed::ProbingProblem>(parsed);
    if (!r1) throw actembed::io::ParseError("probing problems need --r1");
    if (gamma_x) prob.gamma_x_budget = *gamma_x;
    if (gamma_a) prob.gamma_a_budget = *gamma_a;
    point = actembed::probing_sum_rate(prob, *r1, config);
  }
  std::cout << actembed::io::region_point_json(point);
  return point.feasible ? kExitOk : kExitInfeasible;
}

int write_table(const actembed::CurveTable& table, const std::string& out_path) {
  for (const auto& w : table.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  if (out_path.empty()) {
    actembed::io::write_csv(std::cout, table);
    return kExitOk;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write '" << out_path << "'\n";
    return kExitInputError;
  }
  actembed::io::write_csv(out, table);
  return kExitOk;
}

actembed::CurveTable custom_curve(const std::string& path,
                                  const std::string& sweep, double from,
                                  double to, int steps,
                                  std::optional<double> d1,
                                  std::optional<double> d2,
                                  std::optional<double> gamma,
                                  std::optional<double> r1,
                                  const actembed::SolverConfig& config) {
  actembed::io::ParsedProblem parsed = actembed::io::load_problem(path);
  std::vector<double> grid;
  for (int i = 0; i <= steps; ++i) {
    grid.push_back(from + (to - from) * static_cast<double>(i) / steps);
  }

  actembed::CurveTable table;
  if (auto* src = std::get_if<actembed::SourceActionProblem>(&parsed)) {
    const double d1v = d1.value_or(0.0);
    const double d2v = d2.value_or(0.5);
    const double gv = gamma.value_or(1.0);
    auto solve_at = [&](double v, std::span<const actembed::WarmStart> warm) {
      if (sweep == "d1") return actembed::solve_source(*src, v, d2v, gv, config, warm);
      if (sweep == "d2") return actembed::solve_source(*src, d1v, v, gv, config, warm);
      if (sweep == "gamma") return actembed::solve_source(*src, d1v, d2v, v, config, warm);
      throw actembed::io::ParseError("source sweeps: d1, d2 or gamma");
    };
    actembed::TradeoffCurve curve = actembed::trace_curve(
        solve_at, sweep, grid, config.value_tol, /*expect_nonincreasing=*/true);
    table.header = {sweep, "rate"};
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
      table.rows.push_back({curve.grid[i], curve.points[i].rate});
    }
    table.warnings = curve.warnings;
  } else if (auto* ch = std::get_if<actembed::ChannelActionProblem>(&parsed)) {
    const double r1v = r1.value_or(0.0);
    const double gv = gamma.value_or(1.0);
    auto solve_at = [&](double v, std::span<const actembed::WarmStart> warm) {
      if (sweep == "gamma") return actembed::channel_max_sum_rate(*ch, r1v, v, config, warm);
      if (sweep == "r1") return actembed::channel_max_sum_rate(*ch, v, gv, config, warm);
      throw actembed::io::ParseError("channel sweeps: gamma or r1");
    };
    actembed::TradeoffCurve curve = actembed::trace_curve(
        solve_at, sweep, grid, config.value_tol, /*expect_nonincreasing=*/false);
    table.header = {sweep, "r1", "sum_rate"};
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
      const auto& pt = curve.points[i];
      table.rows.push_back({curve.grid[i], pt.r1.value_or(0.0), pt.rate});
    }
    table.warnings = curve.warnings;
  } else {
    auto prob = std::get<actembed::ProbingProblem>(parsed);
    const double r1v = r1.value_or(0.0);
    auto solve_at = [&](double v, std::span<const actembed::WarmStart> warm) {
      actembed::ProbingProblem local = prob;
      if (sweep == "gamma_x") {
        local.gamma_x_budget = v;
        return actembed::probing_sum_rate(local, r1v, config, warm);
      }
      if (sweep == "r1") return actembed::probing_sum_rate(local, v, config, warm);
      throw actembed::io::ParseError("probing sweeps: gamma_x or r1");
    };
    actembed::TradeoffCurve curve = actembed::trace_curve(
        solve_at, sweep, grid, config.value_tol, /*expect_nonincreasing=*/false);
    table.header = {sweep, "r1", "sum_rate"};
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
      const auto& pt = curve.points[i];
      table.rows.push_back({curve.grid[i], pt.r1.value_or(r1v), pt.rate});
    }
    table.warnings = curve.warnings;
  }
  return table;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Action-dependent source/channel coding trade-off evaluator"};
  app.require_subcommand(1);

  // --- solve ---
  auto* solve = app.add_subcommand("solve", "Evaluate one operating point");
  std::string solve_path;
  solve->add_option("problem", solve_path, "Problem file (JSON)")->required();
  std::optional<double> d1, d2, gamma, r1, gamma_x, gamma_a;
  solve->add_option("--d1", d1, "Decoder 1 distortion budget");
  solve->add_option("--d2", d2, "Decoder 2 distortion budget");
  solve->add_option("--gamma", gamma, "Action/input cost budget");
  solve->add_option("--r1", r1, "Embedded message rate R1");
  solve->add_option("--gamma-x", gamma_x, "Probing input cost budget override");
  solve->add_option("--gamma-a", gamma_a, "Probing action cost budget override");
  SolverFlags solve_flags;
  solve_flags.attach(solve);

  // --- curve ---
  auto* curve = app.add_subcommand("curve", "Emit a trade-off sweep as CSV");
  std::string fig;
  curve->add_option("--fig", fig, "Named figure: fig7, fig8 or fig11");
  std::string curve_path;
  curve->add_option("--problem", curve_path, "Problem file for custom sweeps");
  std::string sweep_var;
  curve->add_option("--sweep", sweep_var, "Swept variable for custom sweeps");
  double from = 0.0, to = 1.0;
  int steps = 10;
  curve->add_option("--from", from, "Sweep start");
  curve->add_option("--to", to, "Sweep end");
  curve->add_option("--steps", steps, "Number of steps (points = steps + 1)");
  std::optional<double> c_d1, c_d2, c_gamma, c_r1;
  curve->add_option("--d1", c_d1, "Fixed Decoder 1 distortion budget");
  curve->add_option("--d2", c_d2, "Fixed Decoder 2 distortion budget");
  curve->add_option("--gamma", c_gamma, "Fixed cost budget");
  curve->add_option("--r1", c_r1, "Fixed embedded rate");
  std::string out_path;
  curve->add_option("--out", out_path, "Output path (default: stdout)");
  SolverFlags curve_flags;
  curve_flags.attach(curve);

  // --- selftest ---
  auto* selftest = app.add_subcommand("selftest", "Run the verification suite");
  bool quick = false, full = false;
  selftest->add_flag("--quick", quick, "Capped grids, < 1 minute");
  selftest->add_flag("--full", full, "Full grids and sample counts");
  bool inject_fault = false;
  selftest->add_flag("--inject-fault", inject_fault)->group("");  // test fixture
  SolverFlags selftest_flags;
  selftest_flags.attach(selftest);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      return run_solve(solve_path, d1, d2, gamma, r1, gamma_x, gamma_a,
                       solve_flags);
    }
    if (curve->parsed()) {
      const actembed::SolverConfig config = curve_flags.to_config();
      actembed::CurveTable table;
      if (fig == "fig7") {
        table = actembed::fig7_table(config);
      } else if (fig == "fig8") {
        table = actembed::fig8_table(config);
      } else if (fig == "fig11") {
        table = actembed::fig11_table(config);
      } else if (!fig.empty()) {
        std::cerr << "error: unknown figure '" << fig << "'\n";
        return kExitInputError;
      } else {
        if (curve_path.empty() || sweep_var.empty()) {
          std::cerr << "error: custom sweeps need --problem and --sweep\n";
          return kExitInputError;
        }
        table = custom_curve(curve_path, sweep_var, from, to, steps, c_d1,
                             c_d2, c_gamma, c_r1, config);
      }
      return write_table(table, out_path);
    }
    if (selftest->parsed()) {
      actembed::SelftestOptions options;
      options.full = full && !quick;
      options.inject_fault = inject_fault;
      const actembed::SolverConfig config = selftest_flags.to_config();
      options.threads = config.threads;
      options.seed = config.seed;
      const auto results = actembed::run_selftest(options);
      for (const auto& r : results) {
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name;
        if (!r.detail.empty()) std::cout << ": " << r.detail;
        std::cout << "\n";
      }
      return actembed::all_passed(results) ? kExitOk : kExitSelftestFailed;
    }
  } catch (const actembed::io::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
