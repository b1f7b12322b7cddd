// Acceptance gate: every criterion below runs at its stated tolerance and
// prints one pass/fail line. The process exits non-zero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "actembed/figures.hpp"
#include "actembed/oracle.hpp"
#include "actembed/problem_io.hpp"
#include "actembed/regions.hpp"

#ifndef ACTEMBED_CLI_PATH
#define ACTEMBED_CLI_PATH ""
#endif

using namespace actembed;

namespace {

int g_failures = 0;

void criterion(int number, const std::string& name, double time_limit_s,
               const std::function<bool(std::string&)>& body) {
  std::string detail;
  bool pass = false;
  const auto start = std::chrono::steady_clock::now();
  try {
    pass = body(detail);
  } catch (const std::exception& e) {
    pass = false;
    detail = std::string("exception: ") + e.what();
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  if (elapsed > time_limit_s) {
    pass = false;
    detail += (detail.empty() ? "" : "; ") + std::string("runtime ") +
              std::to_string(elapsed) + " s exceeds the " +
              std::to_string(time_limit_s) + " s limit";
  }
  std::printf("[%s] criterion %d: %s (%.1f s)%s%s\n", pass ? "PASS" : "FAIL",
              number, name.c_str(), elapsed, detail.empty() ? "" : " -- ",
              detail.c_str());
  std::fflush(stdout);
  if (!pass) g_failures++;
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<double> dirichlet(std::mt19937_64& rng, std::size_t n) {
  std::vector<double> p(n);
  double total = 0.0;
  for (auto& x : p) {
    x = -std::log(std::max(uniform01(rng), 1e-300));
    total += x;
  }
  for (auto& x : p) x /= total;
  return p;
}

JointDistribution random_joint(std::mt19937_64& rng, int n_axes, int size) {
  std::vector<Alphabet> axes;
  std::size_t total = 1;
  for (int i = 0; i < n_axes; ++i) {
    axes.push_back(Alphabet::indexed("V" + std::to_string(i),
                                     static_cast<std::size_t>(size)));
    total *= static_cast<std::size_t>(size);
  }
  return JointDistribution(std::move(axes), dirichlet(rng, total));
}

int worker_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::min(4u, hw ? hw : 1u));
}

// --- criterion bodies -------------------------------------------------------

bool kernel_identities(std::string& detail) {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    JointDistribution j = random_joint(rng, 3, 3);
    const AxisMask x = 1, y = 2, z = 4;

    // chain rule
    const double gap = std::abs(
        mutual_information(j, x, y | z) -
        (mutual_information(j, x, z) + mutual_information(j, x, y, z)));
    worst = std::max(worst, gap);
    if (gap > 1e-9) {
      detail = "chain rule gap " + std::to_string(gap);
      return false;
    }
    // non-negativity and entropy bounds
    if (mutual_information(j, x, y, z) < -1e-9) {
      detail = "negative conditional mutual information";
      return false;
    }
    for (std::size_t ax = 0; ax < j.axis_count(); ++ax) {
      const double h = entropy(j, AxisMask{1} << ax);
      if (h < 0.0 || h > std::log2(double(j.axes()[ax].size())) + 1e-12) {
        detail = "entropy out of bounds";
        return false;
      }
    }
    // data processing through a pushforward of the last axis
    const std::size_t last = j.axis_count() - 1;
    std::vector<std::size_t> table(j.axes()[last].size());
    for (auto& e : table) e = rng() % 2;
    JointDistribution pushed = pushforward(
        j, DeterministicMap({j.axes()[last]}, Alphabet("F", {"0", "1"}), table),
        "Fa");
    const AxisMask fa = AxisMask{1} << pushed.axis_index("Fa");
    if (mutual_information(pushed, x, fa) >
        mutual_information(pushed, x, AxisMask{1} << last) + 1e-9) {
      detail = "data-processing violation";
      return false;
    }

    // factorization round trip: p(x) p(y|x) recomposed and conditioned
    Alphabet ax0 = Alphabet::indexed("X", 2);
    Alphabet ax1 = Alphabet::indexed("Y", 3);
    FinitePmf px(ax0, dirichlet(rng, 2));
    std::vector<double> cond;
    for (int r = 0; r < 2; ++r) {
      auto row = dirichlet(rng, 3);
      cond.insert(cond.end(), row.begin(), row.end());
    }
    JointDistribution composed = chain_compose(
        {Factor(px), Factor(ConditionalPmf(ax1, {ax0}, cond))});
    for (int xv = 0; xv < 2; ++xv) {
      if (px[static_cast<std::size_t>(xv)] <= 0.0) continue;
      for (int yv = 0; yv < 3; ++yv) {
        const double back =
            composed.mass()[static_cast<std::size_t>(xv * 3 + yv)] /
            px[static_cast<std::size_t>(xv)];
        if (std::abs(back - cond[static_cast<std::size_t>(xv * 3 + yv)]) >
            1e-12) {
          detail = "factorization round trip broke";
          return false;
        }
      }
    }
  }
  detail = "1000 joints, worst chain-rule gap " + std::to_string(worst);
  return true;
}

bool binary_rd_agreement(std::string& detail) {
  // solve_nc on the noiseless instance must reproduce 1 - H2(D2)
  const double targets[4][2] = {{0.05, 0.7136030428840439},
                                {0.11, 0.500084041835472},
                                {0.20, 0.27807190511263765},
                                {0.30, 0.11870910076930738}};
  SolverConfig config;
  config.grid_resolution = 100;
  config.restarts = 30;
  config.refine_iters = 600;
  config.threads = worker_threads();
  config.aux_cardinalities = {{"U", 2}};
  const SourceActionProblem p = zs_example(0.0);
  std::ostringstream ss;
  for (const auto& [d2, target] : targets) {
    RegionPoint pt = solve_non_causal(p, 0.0, d2, 1.0, config);
    if (!pt.feasible) {
      detail = "infeasible at D2 = " + std::to_string(d2);
      return false;
    }
    const double err = std::abs(pt.rate - target);
    ss << "D2=" << d2 << " err=" << err << " ";
    if (err > 2e-3) {
      detail = "error " + std::to_string(err) + " at D2 = " +
               std::to_string(d2) + " exceeds 2e-3";
      return false;
    }
  }
  detail = ss.str();
  return true;
}

SolverConfig figure_config() {
  SolverConfig config;
  config.grid_resolution = 80;
  config.restarts = 12;
  config.refine_iters = 250;
  config.seed = 7;
  config.threads = worker_threads();
  return config;
}

bool fig7_reproduction(std::string& detail) {
  CurveTable t = fig7_table(figure_config());
  if (!t.warnings.empty()) {
    detail = "monotonicity warning: " + t.warnings.front();
    return false;
  }
  // pull the delta = 0.5 column
  std::vector<std::pair<double, double>> curve;
  for (const auto& row : t.rows) {
    if (row[0] == 0.5) curve.emplace_back(row[1], row[2]);
  }
  double plateau = 0.0;
  for (const auto& [d2, rate] : curve) {
    if (d2 == 0.5) plateau = rate;
  }
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (curve[i].second > curve[i - 1].second + 1e-9) {
      detail = "rate increased along the D2 sweep";
      return false;
    }
  }
  double threshold = 0.5;
  for (const auto& [d2, rate] : curve) {
    if (rate <= plateau + 1e-3) {
      threshold = d2;
      break;
    }
  }
  for (const auto& [d2, rate] : curve) {
    if (d2 >= 0.4 - 1e-12 && std::abs(rate - plateau) > 1e-3) {
      detail = "curve not constant above D2 = 0.4";
      return false;
    }
  }
  detail = "plateau threshold located at D2 = " + std::to_string(threshold);
  return std::abs(threshold - 0.4) <= 0.05;
}

bool fig8_reproduction(std::string& detail) {
  CurveTable t = fig8_table(figure_config());
  double diff_05[3] = {0, 0, 0};  // D2 = 0.1, 0.2, 0.3 at delta = 0.5
  for (const auto& row : t.rows) {
    const double delta = row[0], d2 = row[1], diff = row[4];
    if (diff < -1e-6) {
      detail = "negative NC-SC difference at delta " + std::to_string(delta);
      return false;
    }
    if ((delta == 0.0 || delta == 1.0) && std::abs(diff) > 1e-6) {
      detail = "difference " + std::to_string(diff) + " at the delta " +
               std::to_string(delta) + " endpoint";
      return false;
    }
    if (delta == 0.5) {
      if (d2 == 0.1) diff_05[0] = diff;
      if (d2 == 0.2) diff_05[1] = diff;
      if (d2 == 0.3) diff_05[2] = diff;
    }
  }
  if (!(diff_05[0] >= diff_05[1] - 1e-6 && diff_05[1] >= diff_05[2] - 1e-6)) {
    detail = "difference at delta 0.5 is not non-increasing in D2";
    return false;
  }
  std::ostringstream ss;
  ss << "diff(0.5; D2=0.1,0.2,0.3) = " << diff_05[0] << ", " << diff_05[1]
     << ", " << diff_05[2];
  detail = ss.str();
  return true;
}

bool fig11_reproduction(std::string& detail) {
  SolverConfig config;
  config.grid_resolution = 100;
  config.restarts = 10;
  config.refine_iters = 200;
  config.seed = 7;
  config.threads = worker_threads();
  CurveTable t = fig11_table(config);

  // index rows by (gamma_x, r1)
  auto value_at = [&](double gx, double r1) -> double {
    for (const auto& row : t.rows) {
      if (std::abs(row[0] - gx) < 1e-12 && std::abs(row[1] - r1) < 1e-12) {
        return row[2];
      }
    }
    throw std::runtime_error("missing fig11 row");
  };

  for (double gx : {0.0, 0.05, 0.1, 0.15, 0.2}) {
    const double v0 = value_at(gx, 0.0);
    const double v5 = value_at(gx, 0.5);
    const double v9 = value_at(gx, 0.9);
    if (!(v0 >= v5 - 1e-6 && v5 >= v9 - 1e-6)) {
      detail = "R1 ordering violated at gamma_x = " + std::to_string(gx);
      return false;
    }
  }
  for (double gx : {0.35, 0.4, 0.45, 0.5, 0.55, 0.6}) {
    for (double r1 : {0.0, 0.5, 0.9}) {
      if (std::abs(value_at(gx, r1) - 0.5) > 1e-6) {
        detail = "saturation missed at gamma_x = " + std::to_string(gx) +
                 ", r1 = " + std::to_string(r1);
        return false;
      }
    }
  }
  const double quarter = value_at(0.25, 0.0);
  if (std::abs(quarter - 0.5) > 1e-4) {
    detail = "sum rate " + std::to_string(quarter) +
             " at gamma_x = 0.25, R1 = 0 misses 0.5 by more than 1e-4";
    return false;
  }
  detail = "saturation and ordering hold; value(0.25, 0) = " +
           std::to_string(quarter);
  return true;
}

bool ordering_property(std::string& detail) {
  SolverConfig config;
  config.grid_resolution = 4;
  config.restarts = 4;
  config.refine_iters = 100;
  config.seed = 31;
  config.threads = worker_threads();
  config.aux_cardinalities = {{"U", 2}, {"V", 2}};

  std::mt19937_64 rng(314159);
  for (int trial = 0; trial < 20; ++trial) {
    // random binary instance: random side channel, Hamming distortions
    Alphabet x = Alphabet::indexed("X", 2);
    Alphabet y = Alphabet::indexed("Y", 2);
    Alphabet a = Alphabet::indexed("A", 2);
    std::vector<double> side;
    for (int r = 0; r < 4; ++r) {
      auto row = dirichlet(rng, 2);
      side.insert(side.end(), row.begin(), row.end());
    }
    SourceActionProblem p{FinitePmf(x, {0.5, 0.5}),
                          ConditionalPmf(y, {x, a}, side),
                          DeterministicMap::identity(a, "B"),
                          Alphabet::indexed("Xhat1", 2),
                          Alphabet::indexed("Xhat2", 2),
                          Matrix::hamming(2),
                          Matrix::hamming(2),
                          {0.0, 1.0},
                          ObservationMode::NonCausal,
                          std::nullopt};
    const double d2 = 0.3 + 0.2 * uniform01(rng);

    RegionPoint sc = solve_strictly_causal(p, 0.0, d2, 1.0, config);
    if (!sc.feasible) {
      detail = "strictly causal infeasible at trial " + std::to_string(trial);
      return false;
    }
    std::vector<WarmStart> causal_warm = {
        WarmStart{embed_sc_witness_in_causal(p, sc.witness_params, 2, 2), {}}};
    RegionPoint ca = solve_causal(p, 0.0, d2, 1.0, config, causal_warm);
    if (!ca.feasible) {
      detail = "causal infeasible at trial " + std::to_string(trial);
      return false;
    }
    SolverConfig nc_config = config;
    nc_config.aux_cardinalities = {{"U", 4}};
    std::vector<WarmStart> nc_warm = {WarmStart{
        embed_causal_witness_in_non_causal(p, ca.witness_params, 2, 2, 4),
        {}}};
    RegionPoint nc = solve_non_causal(p, 0.0, d2, 1.0, nc_config, nc_warm);
    if (!nc.feasible) {
      detail = "non-causal infeasible at trial " + std::to_string(trial);
      return false;
    }
    if (!(nc.rate <= ca.rate + 1e-6 && ca.rate <= sc.rate + 1e-6)) {
      std::ostringstream ss;
      ss << "trial " << trial << ": nc " << nc.rate << " causal " << ca.rate
         << " sc " << sc.rate;
      detail = ss.str();
      return false;
    }
  }
  detail = "20 randomized instances ordered";
  return true;
}

bool transfer_closure_equivalence(std::string& detail) {
  // 100 instances of the region shape parameters (h, c, d) with
  // 0 <= d <= c <= h + d, drawn on a dyadic grid so every corner
  // coordinate is exactly representable and the comparison is exact.
  std::mt19937_64 rng(77);
  for (int i = 0; i < 100; ++i) {
    const double scale = 1024.0;
    const double h = std::floor(uniform01(rng) * scale) / scale * 2.0;
    const double d = std::floor(uniform01(rng) * scale) / scale;
    const double extra = std::floor(uniform01(rng) * scale) / scale;
    const double c = d + std::min(extra, h);
    const double rmax = std::min(h, c);

    const std::vector<RatePair> corners45 = {{c - d, d}, {rmax, c - rmax}};
    std::vector<RatePair> corners35;
    if (rmax > 0.0) {
      corners35 = {{0.0, c}, {rmax, c - rmax}};
    } else {
      corners35 = {{0.0, c}};
    }
    const auto closure = region_transfer_closure(corners45);
    if (closure.size() != corners35.size()) {
      detail = "corner count mismatch at instance " + std::to_string(i);
      return false;
    }
    for (std::size_t k = 0; k < closure.size(); ++k) {
      if (closure[k].r1 != corners35[k].r1 ||
          closure[k].r2 != corners35[k].r2) {
        detail = "corner mismatch at instance " + std::to_string(i);
        return false;
      }
    }
  }
  detail = "100 sampled instances equal corner-for-corner";
  return true;
}

bool oracle_cross_checks(std::string& detail) {
  const int threads = worker_threads();
  std::ostringstream ss;

  // the binary source instance, both embedding constraints, three deltas
  for (double delta : {0.0, 0.5, 1.0}) {
    for (auto mode :
         {ObservationMode::NonCausal, ObservationMode::StrictlyCausal}) {
      SolverConfig config;
      config.grid_resolution = 50;
      config.restarts = 10;
      config.refine_iters = 200;
      config.threads = threads;
      SearchProblem sp = binary_example_search_problem(delta, 0.2, mode);
      RegionPoint pt = binary_example_point(delta, 0.2, mode, config);
      OracleReport oracle = exhaustive_optimum(sp, 50, Sense::Minimize, 1e-9,
                                               100'000'000, threads);
      SearchOutcome outcome;
      outcome.feasible = pt.feasible;
      outcome.value = pt.rate;
      auto verdict = cross_check(outcome, oracle, Sense::Minimize, 1e-9,
                                 quantization_bound(50, 4));
      if (!verdict.pass) {
        detail = "binary " + to_string(mode) + " delta " +
                 std::to_string(delta) + ": " + verdict.message;
        return false;
      }
    }
  }

  // the full non-causal witness space at a matched coarse grid
  {
    SolverConfig config;
    config.grid_resolution = 3;
    config.restarts = 6;
    config.refine_iters = 150;
    config.threads = threads;
    config.aux_cardinalities = {{"U", 2}};
    const SourceActionProblem p = zs_example(0.5);
    SearchProblem sp = source_search_problem(p, 0.0, 0.3, 1.0, config);
    RegionPoint pt = solve_non_causal(p, 0.0, 0.3, 1.0, config);
    OracleReport oracle =
        exhaustive_optimum(sp, 3, Sense::Minimize, 1e-9, 100'000'000, threads);
    SearchOutcome outcome;
    outcome.feasible = pt.feasible;
    outcome.value = pt.rate;
    auto verdict = cross_check(outcome, oracle, Sense::Minimize, 1e-9,
                               quantization_bound(3, 16));
    if (!verdict.pass) {
      detail = "full non-causal space: " + verdict.message;
      return false;
    }
    ss << "full-space solver " << pt.rate << " vs oracle " << oracle.value
       << "; ";
  }

  // both probing figure instances
  for (const auto& [gx, r1] : {std::pair{0.25, 0.0}, std::pair{0.15, 0.9}}) {
    SolverConfig config;
    config.grid_resolution = 100;
    config.restarts = 8;
    config.refine_iters = 150;
    config.threads = threads;
    ProbingProblem prob = probing_example(0.5, 1.0, gx);
    SearchProblem sp = probing_search_problem(prob, r1);
    RegionPoint pt = probing_sum_rate(prob, r1, config);
    OracleReport oracle = exhaustive_optimum(sp, 100, Sense::Maximize, 1e-9,
                                             100'000'000, threads);
    SearchOutcome outcome;
    outcome.feasible = pt.feasible;
    outcome.value = pt.rate;
    auto verdict = cross_check(outcome, oracle, Sense::Maximize, 1e-9,
                               quantization_bound(100, 6));
    if (!verdict.pass) {
      detail = "probing gamma_x " + std::to_string(gx) + ": " +
               verdict.message;
      return false;
    }
  }

  // the channel instance with its enumerated input maps
  {
    Alphabet a = Alphabet::indexed("A", 2);
    Alphabet s = Alphabet::indexed("S", 2);
    Alphabet x = Alphabet::indexed("X", 2);
    Alphabet y = Alphabet::indexed("Y", 2);
    std::vector<double> trans = {0.95, 0.05, 0.95, 0.05, 0.6, 0.4,  0.6, 0.4,
                                 0.4,  0.6,  0.4,  0.6,  0.05, 0.95, 0.05, 0.95};
    ChannelActionProblem p{ConditionalPmf(s, {a}, {0.9, 0.1, 0.2, 0.8}),
                           ConditionalPmf(y, {x, s, a}, trans),
                           DeterministicMap::identity(a, "B"),
                           Matrix(2, 2, {0.0, 1.0, 0.5, 1.5})};
    SolverConfig config;
    config.grid_resolution = 8;
    config.restarts = 8;
    config.refine_iters = 120;
    config.threads = threads;
    config.aux_cardinalities = {{"U", 2}};
    SearchProblem sp = channel_search_problem(p, 0.25, 1.0, config);
    RegionPoint pt = channel_max_sum_rate(p, 0.25, 1.0, config);
    OracleReport oracle =
        exhaustive_optimum(sp, 8, Sense::Maximize, 1e-9, 100'000'000, threads);
    SearchOutcome outcome;
    outcome.feasible = pt.feasible;
    outcome.value = pt.rate;
    auto verdict = cross_check(outcome, oracle, Sense::Maximize, 1e-9,
                               quantization_bound(8, 10));
    if (!verdict.pass) {
      detail = "channel instance: " + verdict.message;
      return false;
    }
    ss << "channel solver " << pt.rate << " vs oracle " << oracle.value;
  }

  detail = ss.str();
  return true;
}

bool determinism(std::string& detail) {
  const std::string cli = ACTEMBED_CLI_PATH;
  if (cli.empty()) {
    detail = "CLI binary path not configured";
    return false;
  }
  auto run_curve = [&](const std::string& fig, int threads,
                       const std::string& out) {
    const std::string cmd = cli + " curve --fig " + fig +
                            " --seed 7 --grid 60 --restarts 6 --refine 100 "
                            "--threads " +
                            std::to_string(threads) + " --out " + out +
                            " 2>/dev/null";
    return std::system(cmd.c_str()) == 0;
  };
  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  for (const std::string fig : {"fig7", "fig11"}) {
    const std::string a = "/tmp/actembed_det_a.csv";
    const std::string b = "/tmp/actembed_det_b.csv";
    const std::string c = "/tmp/actembed_det_c.csv";
    if (!run_curve(fig, 1, a) || !run_curve(fig, 1, b) ||
        !run_curve(fig, 3, c)) {
      detail = fig + " run failed";
      return false;
    }
    const std::string sa = slurp(a);
    if (sa.empty() || sa != slurp(b) || sa != slurp(c)) {
      detail = fig + " output differs across runs or thread counts";
      return false;
    }
  }
  detail = "fig7 and fig11 byte-identical across repeats and threads 1 vs 3";
  return true;
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");

  criterion(1, "kernel identities on 1000 randomized joints", 10.0,
            kernel_identities);
  criterion(2, "binary rate-distortion oracle agreement", 120.0,
            binary_rd_agreement);
  criterion(3, "rate-vs-D2 curve reproduction (threshold at 0.4)", 900.0,
            fig7_reproduction);
  criterion(4, "non-causal vs strictly causal difference curves", 1800.0,
            fig8_reproduction);
  criterion(5, "probing sum-rate curves (ordering and saturation)", 300.0,
            fig11_reproduction);
  criterion(6, "solver ordering across observation modes", 1800.0,
            ordering_property);
  criterion(7, "rate-transfer closure equivalence", 1.0,
            transfer_closure_equivalence);
  criterion(8, "oracle cross-checks on the catalog", 600.0,
            oracle_cross_checks);
  criterion(9, "byte-identical curves across seeds and thread counts", 300.0,
            determinism);

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
