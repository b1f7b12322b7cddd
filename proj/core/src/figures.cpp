#include "actembed/figures.hpp"

#include <algorithm>
#include <cmath>

namespace actembed {

namespace {

std::vector<double> linspace(double from, double to, int steps) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) {
    out.push_back(from + (to - from) * static_cast<double>(i) / steps);
  }
  return out;
}

}  // namespace

BinaryRatePair binary_example_pair(double delta, double d2_budget,
                                   const SolverConfig& config,
                                   std::span<const WarmStart> warm_nc,
                                   std::span<const WarmStart> warm_sc) {
  BinaryRatePair out;
  out.nc = binary_example_point(delta, d2_budget, ObservationMode::NonCausal,
                                config, warm_nc);

  // The strictly causal solve also gets the non-causal witness: whenever
  // that witness satisfies the tighter constraint the produced SC value
  // cannot exceed the NC one needlessly.
  std::vector<WarmStart> sc_starts(warm_sc.begin(), warm_sc.end());
  if (out.nc.feasible) {
    sc_starts.push_back(WarmStart{out.nc.witness_params, {}});
  }
  out.sc = binary_example_point(delta, d2_budget,
                                ObservationMode::StrictlyCausal, config,
                                sc_starts);

  // Every strictly causal witness is non-causal feasible, so the NC value
  // can always be driven down to the SC one; this keeps diff >= 0.
  if (out.nc.feasible && out.sc.feasible && out.sc.rate < out.nc.rate) {
    std::vector<WarmStart> nc_starts;
    nc_starts.push_back(WarmStart{out.sc.witness_params, {}});
    RegionPoint redo = binary_example_point(
        delta, d2_budget, ObservationMode::NonCausal, config, nc_starts);
    if (redo.feasible && redo.rate < out.nc.rate) out.nc = std::move(redo);
  }
  return out;
}

CurveTable fig7_table(const SolverConfig& config) {
  CurveTable t;
  t.header = {"delta", "d2", "rate_nc"};
  const std::vector<double> deltas = {0.2, 0.5, 0.8};
  const std::vector<double> d2_grid = linspace(0.05, 0.5, 18);

  for (double delta : deltas) {
    TradeoffCurve curve = trace_curve(
        [&](double d2, std::span<const WarmStart> warm) {
          return binary_example_point(delta, d2, ObservationMode::NonCausal,
                                      config, warm);
        },
        "d2", d2_grid, config.value_tol, /*expect_nonincreasing=*/true);
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
      t.rows.push_back({delta, curve.grid[i], curve.points[i].rate});
    }
    for (auto& w : curve.warnings) {
      t.warnings.push_back("delta=" + std::to_string(delta) + " " + w);
    }
  }
  return t;
}

CurveTable fig8_table(const SolverConfig& config) {
  CurveTable t;
  t.header = {"delta", "d2", "rate_nc", "rate_sc", "diff"};
  const std::vector<double> deltas = linspace(0.0, 1.0, 10);
  const std::vector<double> d2_values = {0.1, 0.2, 0.3};

  for (double d2 : d2_values) {
    std::vector<WarmStart> warm_nc, warm_sc;
    for (double delta : deltas) {
      BinaryRatePair pair =
          binary_example_pair(delta, d2, config, warm_nc, warm_sc);
      t.rows.push_back({delta, d2, pair.nc.rate, pair.sc.rate,
                        pair.sc.rate - pair.nc.rate});
      if (pair.nc.feasible) {
        warm_nc.assign(1, WarmStart{pair.nc.witness_params, {}});
      }
      if (pair.sc.feasible) {
        warm_sc.assign(1, WarmStart{pair.sc.witness_params, {}});
      }
    }
  }
  std::sort(t.rows.begin(), t.rows.end(),
            [](const std::vector<double>& a, const std::vector<double>& b) {
              if (a[0] != b[0]) return a[0] < b[0];
              return a[1] < b[1];
            });
  return t;
}

CurveTable fig11_table(const SolverConfig& config) {
  CurveTable t;
  t.header = {"gamma_x", "r1", "sum_rate"};
  const std::vector<double> gx_grid = linspace(0.0, 0.6, 12);
  const std::vector<double> r1_values = {0.9, 0.5, 0.0};  // tightest first

  // Warm starts flow two ways: along the Gamma_X sweep (previous budget's
  // witness stays feasible under a larger budget) and down the R1 ladder
  // (a witness for a larger R1 is feasible for any smaller R1, keeping the
  // produced values ordered).
  std::vector<std::vector<WarmStart>> warm_by_r1(r1_values.size());
  std::vector<std::vector<double>> rows;
  for (double gx : gx_grid) {
    std::vector<WarmStart> ladder;
    for (std::size_t k = 0; k < r1_values.size(); ++k) {
      ProbingProblem prob = probing_example(0.5, 1.0, gx);
      std::vector<WarmStart> starts = warm_by_r1[k];
      starts.insert(starts.end(), ladder.begin(), ladder.end());
      RegionPoint pt = probing_sum_rate(prob, r1_values[k], config, starts);
      rows.push_back({gx, r1_values[k], pt.rate});
      if (pt.feasible) {
        warm_by_r1[k].assign(1, WarmStart{pt.witness_params, {}});
        ladder.push_back(WarmStart{pt.witness_params, {}});
      }
    }
  }
  std::sort(rows.begin(), rows.end(),
            [](const std::vector<double>& a, const std::vector<double>& b) {
              if (a[0] != b[0]) return a[0] < b[0];
              return a[1] < b[1];
            });
  t.rows = std::move(rows);
  return t;
}

}  // namespace actembed
