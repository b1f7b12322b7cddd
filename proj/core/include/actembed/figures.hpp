#pragma once

#include <string>
#include <vector>

#include "actembed/regions.hpp"

namespace actembed {

/// Rows of one trade-off figure, ready for CSV emission.
struct CurveTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> warnings;
};

/// Rate versus D2 for the binary Z/S instance at delta in {0.2, 0.5, 0.8},
/// non-causal observation. Columns: delta, d2, rate_nc.
CurveTable fig7_table(const SolverConfig& config);

/// Non-causal versus strictly causal rate over delta in {0, 0.1, ..., 1}
/// and D2 in {0.1, 0.2, 0.3}. Columns: delta, d2, rate_nc, rate_sc, diff
/// (diff = rate_sc - rate_nc >= 0).
CurveTable fig8_table(const SolverConfig& config);

/// Probing sum rate versus the input cost budget for epsilon = 0.5,
/// Gamma_A = 1 and R1 in {0, 0.5, 0.9}. Columns: gamma_x, r1, sum_rate.
CurveTable fig11_table(const SolverConfig& config);

/// One point of the fig8 pipeline: the non-causal and strictly causal rates
/// at (delta, d2) with the cross-feeding warm starts that keep
/// rate_nc <= rate_sc. Warm starts carry the previous sweep point.
struct BinaryRatePair {
  RegionPoint nc;
  RegionPoint sc;
};
BinaryRatePair binary_example_pair(double delta, double d2_budget,
                                   const SolverConfig& config,
                                   std::span<const WarmStart> warm_nc,
                                   std::span<const WarmStart> warm_sc);

}  // namespace actembed
