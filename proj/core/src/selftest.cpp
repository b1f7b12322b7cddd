#include "actembed/selftest.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "actembed/oracle.hpp"
#include "actembed/regions.hpp"

namespace actembed {

namespace {

struct Rng {
  std::mt19937_64 g;
  explicit Rng(std::uint64_t seed) : g(seed) {}
  double uniform() { return static_cast<double>(g() >> 11) * 0x1.0p-53; }
  int uniform_int(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(g() % static_cast<std::uint64_t>(hi - lo + 1));
  }
};

std::vector<double> random_pmf(Rng& rng, std::size_t n) {
  std::vector<double> p(n);
  double total = 0.0;
  for (auto& x : p) {
    x = -std::log(std::max(rng.uniform(), 1e-300));
    total += x;
  }
  for (auto& x : p) x /= total;
  return p;
}

JointDistribution random_joint(Rng& rng, int max_axes = 4, int max_size = 4,
                               int min_axes = 2) {
  const int n_axes = rng.uniform_int(min_axes, max_axes);
  std::vector<Alphabet> axes;
  std::size_t total = 1;
  for (int i = 0; i < n_axes; ++i) {
    const std::size_t size = static_cast<std::size_t>(rng.uniform_int(2, max_size));
    axes.push_back(Alphabet::indexed("V" + std::to_string(i), size));
    total *= size;
  }
  return JointDistribution(std::move(axes), random_pmf(rng, total));
}

double h2(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

class Suite {
 public:
  explicit Suite(const SelftestOptions& options) : opt_(options) {}

  std::vector<CheckResult> results;

  void report(const std::string& name, bool pass, const std::string& detail) {
    results.push_back({name, pass, detail});
  }

  void kernel_identities() {
    Rng rng(opt_.seed);
    const int n = opt_.full ? 1000 : 200;
    int chain_fail = 0, bound_fail = 0, dpi_fail = 0;
    double worst_chain = 0.0;
    for (int i = 0; i < n; ++i) {
      JointDistribution j = random_joint(rng, 4, 4, /*min_axes=*/3);
      const AxisMask x = 1, y = 2, z = j.all_axes_mask() & ~AxisMask{3};
      const double lhs = mutual_information(j, x, y | z);
      double cross = mutual_information(j, x, y, z);
      if (opt_.inject_fault) cross = -cross;  // planted sign error
      const double rhs = mutual_information(j, x, z) + cross;
      worst_chain = std::max(worst_chain, std::abs(lhs - rhs));
      if (std::abs(lhs - rhs) > 1e-9) chain_fail++;

      for (std::size_t ax = 0; ax < j.axis_count(); ++ax) {
        const double h = entropy(j, AxisMask{1} << ax);
        const double cap = std::log2(static_cast<double>(j.axes()[ax].size()));
        if (h < 0.0 || h > cap + 1e-12) bound_fail++;
      }
      if (mutual_information(j, x, y) < -1e-9) bound_fail++;

      // data processing through a random pushforward of the last axis
      const std::size_t last = j.axis_count() - 1;
      const Alphabet& a_alpha = j.axes()[last];
      Alphabet codomain("F", {"0", "1"});
      std::vector<std::size_t> table(a_alpha.size());
      for (auto& e : table) e = static_cast<std::size_t>(rng.uniform_int(0, 1));
      JointDistribution pushed = pushforward(
          j, DeterministicMap({a_alpha}, codomain, table), "Fa");
      const AxisMask fa = AxisMask{1} << pushed.axis_index("Fa");
      const double i_direct =
          mutual_information(pushed, x, AxisMask{1} << last);
      const double i_mapped = mutual_information(pushed, x, fa);
      if (i_mapped > i_direct + 1e-9) dpi_fail++;
    }
    std::ostringstream ss;
    ss << n << " joints, worst chain-rule gap " << worst_chain;
    report("kernel.chain_rule", chain_fail == 0, ss.str());
    report("kernel.bounds", bound_fail == 0,
           bound_fail ? std::to_string(bound_fail) + " violations" : "ok");
    report("kernel.data_processing", dpi_fail == 0,
           dpi_fail ? std::to_string(dpi_fail) + " violations" : "ok");
  }

  void composition_roundtrip() {
    Rng rng(opt_.seed + 1);
    const int n = opt_.full ? 200 : 50;
    int fail = 0;
    for (int i = 0; i < n; ++i) {
      Alphabet x = Alphabet::indexed("X", 2);
      Alphabet y = Alphabet::indexed("Y", 3);
      FinitePmf px(x, random_pmf(rng, 2));
      std::vector<double> table;
      for (int r = 0; r < 2; ++r) {
        auto row = random_pmf(rng, 3);
        table.insert(table.end(), row.begin(), row.end());
      }
      ConditionalPmf pyx(y, {x}, table);
      JointDistribution j = chain_compose({Factor(px), Factor(pyx)});
      // conditioning the composed joint must recover the factor
      for (int xv = 0; xv < 2; ++xv) {
        const double mx = px[static_cast<std::size_t>(xv)];
        if (mx <= 0.0) continue;
        for (int yv = 0; yv < 3; ++yv) {
          const double joint = j.mass()[static_cast<std::size_t>(xv * 3 + yv)];
          if (std::abs(joint / mx - table[static_cast<std::size_t>(xv * 3 + yv)]) >
              1e-12) {
            fail++;
          }
        }
      }
    }
    report("kernel.compose_roundtrip", fail == 0,
           fail ? std::to_string(fail) + " mismatches" : "ok");
  }

  void binary_example_endpoints() {
    SolverConfig config;
    config.grid_resolution = opt_.full ? 80 : 40;
    config.restarts = opt_.full ? 12 : 6;
    config.refine_iters = opt_.full ? 200 : 120;
    config.seed = opt_.seed;
    config.threads = opt_.threads;

    const double nc0 =
        binary_example_rate(0.0, 0.2, ObservationMode::NonCausal, config);
    const double sc0 =
        binary_example_rate(0.0, 0.2, ObservationMode::StrictlyCausal, config);
    report("binary.delta0_nc_equals_sc", std::abs(nc0 - sc0) <= 1e-4,
           "nc " + std::to_string(nc0) + " sc " + std::to_string(sc0));

    const double nc1 =
        binary_example_rate(1.0, 0.2, ObservationMode::NonCausal, config);
    const double sc1 =
        binary_example_rate(1.0, 0.2, ObservationMode::StrictlyCausal, config);
    report("binary.delta1_rate_is_hx",
           std::abs(nc1 - 1.0) <= 1e-9 && std::abs(sc1 - 1.0) <= 1e-9,
           "nc " + std::to_string(nc1) + " sc " + std::to_string(sc1));
  }

  void probing_endpoints() {
    SolverConfig config;
    config.grid_resolution = 100;
    config.restarts = 8;
    config.refine_iters = 150;
    config.seed = opt_.seed;
    config.threads = opt_.threads;

    // feas_tol admits O(eps log eps) objective mass at the zero-budget
    // boundary, so the check tolerance sits above that scale
    const double zero =
        probing_sum_rate(probing_example(0.5, 1.0, 0.0), 0.0, config).rate;
    report("probing.zero_budget", std::abs(zero) <= 1e-6,
           std::to_string(zero));
    const double quarter =
        probing_sum_rate(probing_example(0.5, 1.0, 0.25), 0.0, config).rate;
    report("probing.quarter_budget", std::abs(quarter - 0.5) <= 1e-4,
           std::to_string(quarter));
    const double saturated =
        probing_sum_rate(probing_example(0.5, 1.0, 0.5), 0.9, config).rate;
    report("probing.saturation", std::abs(saturated - 0.5) <= 1e-6,
           std::to_string(saturated));
  }

  void oracle_cross_checks() {
    SolverConfig config;
    config.grid_resolution = opt_.full ? 50 : 24;
    config.restarts = 6;
    config.refine_iters = 120;
    config.seed = opt_.seed;
    config.threads = opt_.threads;

    // binary example at matched resolution
    {
      const double delta = 0.5, d2 = 0.2;
      SearchProblem sp =
          binary_example_search_problem(delta, d2, ObservationMode::NonCausal);
      RegionPoint pt =
          binary_example_point(delta, d2, ObservationMode::NonCausal, config);
      OracleReport oracle =
          exhaustive_optimum(sp, config.grid_resolution, Sense::Minimize,
                             config.feas_tol, 100'000'000, opt_.threads);
      SearchOutcome as_outcome;
      as_outcome.feasible = pt.feasible;
      as_outcome.value = pt.rate;
      const auto verdict =
          cross_check(as_outcome, oracle, Sense::Minimize, 1e-6,
                      quantization_bound(config.grid_resolution, 4));
      report("oracle.binary_nc", verdict.pass, verdict.message);
    }

    // probing at matched resolution, plus the analytic saturation bound
    {
      ProbingProblem prob = probing_example(0.5, 1.0, 0.25);
      SearchProblem sp = probing_search_problem(prob, 0.0);
      RegionPoint pt = probing_sum_rate(prob, 0.0, config);
      OracleReport oracle =
          exhaustive_optimum(sp, config.grid_resolution, Sense::Maximize,
                             config.feas_tol, 100'000'000, opt_.threads);
      SearchOutcome as_outcome;
      as_outcome.feasible = pt.feasible;
      as_outcome.value = pt.rate;
      const auto verdict =
          cross_check(as_outcome, oracle, Sense::Maximize, 1e-6,
                      quantization_bound(config.grid_resolution, 6));
      report("oracle.probing", verdict.pass, verdict.message);

      RegionPoint sat =
          probing_sum_rate(probing_example(0.5, 1.0, 0.6), 0.5, config);
      report("oracle.probing_saturation_bound", sat.rate <= 0.5 + 1e-9,
             std::to_string(sat.rate));
    }
  }

  void ordering_property() {
    SolverConfig config;
    config.grid_resolution = 4;
    config.restarts = opt_.full ? 6 : 3;
    config.refine_iters = opt_.full ? 120 : 60;
    config.seed = opt_.seed;
    config.threads = opt_.threads;
    config.aux_cardinalities = {{"U", 2}, {"V", 2}};

    Rng rng(opt_.seed + 7);
    const int n = opt_.full ? 4 : 2;
    bool ok = true;
    std::string detail;
    for (int i = 0; i < n && ok; ++i) {
      SourceActionProblem p = zs_example(0.2 + 0.6 * rng.uniform());
      const double d2 = 0.3 + 0.2 * rng.uniform();

      RegionPoint sc = solve_strictly_causal(p, 0.0, d2, 1.0, config);
      std::vector<WarmStart> causal_warm;
      if (sc.feasible) {
        causal_warm.push_back(WarmStart{
            embed_sc_witness_in_causal(p, sc.witness_params, 2, 2), {}});
      }
      SolverConfig causal_cfg = config;
      RegionPoint ca = solve_causal(p, 0.0, d2, 1.0, causal_cfg, causal_warm);

      std::vector<WarmStart> nc_warm;
      if (ca.feasible) {
        nc_warm.push_back(WarmStart{
            embed_causal_witness_in_non_causal(p, ca.witness_params, 2, 2, 4),
            {}});
      }
      SolverConfig nc_cfg = config;
      nc_cfg.aux_cardinalities = {{"U", 4}};
      RegionPoint nc = solve_non_causal(p, 0.0, d2, 1.0, nc_cfg, nc_warm);

      if (!(nc.feasible && ca.feasible && sc.feasible)) {
        ok = false;
        detail = "infeasible point in the ordering chain";
      } else if (!(nc.rate <= ca.rate + 1e-6 && ca.rate <= sc.rate + 1e-6)) {
        ok = false;
        detail = "nc " + std::to_string(nc.rate) + " causal " +
                 std::to_string(ca.rate) + " sc " + std::to_string(sc.rate);
      }
    }
    report("ordering.nc_causal_sc", ok, ok ? "ok" : detail);
  }

  void transfer_closure_property() {
    Rng rng(opt_.seed + 11);
    const int n = opt_.full ? 200 : 50;
    int fail = 0;
    for (int i = 0; i < n; ++i) {
      // representable (h, c, d) triples with 0 <= d <= c <= h + d
      const double scale = 1024.0;
      const double h = std::floor(rng.uniform() * scale) / scale * 2.0;
      const double d = std::floor(rng.uniform() * scale) / scale;
      const double extra = std::floor(rng.uniform() * scale) / scale;
      const double c = d + std::min(extra, h);
      const double rmax = std::min(h, c);

      std::vector<RatePair> corners45 = {{c - d, d}, {rmax, c - rmax}};
      std::vector<RatePair> corners35;
      if (rmax > 0.0) {
        corners35 = {{0.0, c}, {rmax, c - rmax}};
      } else {
        corners35 = {{0.0, c}};
      }
      auto closure = region_transfer_closure(corners45);
      if (closure.size() != corners35.size()) {
        fail++;
        continue;
      }
      for (std::size_t k = 0; k < closure.size(); ++k) {
        if (closure[k].r1 != corners35[k].r1 ||
            closure[k].r2 != corners35[k].r2) {
          fail++;
          break;
        }
      }
    }
    report("regions.transfer_closure", fail == 0,
           fail ? std::to_string(fail) + " mismatches" : "ok");
  }

 private:
  SelftestOptions opt_;
};

}  // namespace

std::vector<CheckResult> run_selftest(const SelftestOptions& options) {
  Suite suite(options);
  suite.kernel_identities();
  suite.composition_roundtrip();
  suite.transfer_closure_property();
  suite.binary_example_endpoints();
  suite.probing_endpoints();
  suite.oracle_cross_checks();
  suite.ordering_property();
  return std::move(suite.results);
}

bool all_passed(const std::vector<CheckResult>& results) {
  for (const auto& r : results) {
    if (!r.pass) return false;
  }
  return true;
}

}  // namespace actembed
