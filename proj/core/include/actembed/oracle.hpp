#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "actembed/solver.hpp"

namespace actembed {

struct OracleReport {
  double value = 0.0;
  std::vector<double> witness;
  std::vector<int> witness_maps;
  int resolution = 0;
  std::uint64_t points_evaluated = 0;
};

struct OracleGridTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct OracleInfeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Evaluates every grid point of every block at exactly the given
/// resolution, crossed with every enumerated map, once. No randomness, no
/// refinement: the result is the exact optimum over the quantized feasible
/// set. Throws OracleGridTooLarge past `max_evaluations` and
/// OracleInfeasible when no grid point satisfies the constraints.
OracleReport exhaustive_optimum(const SearchProblem& problem, int resolution,
                                Sense sense, double feas_tol = 1e-9,
                                std::uint64_t max_evaluations = 100'000'000,
                                int threads = 1);

/// Heuristic bound on how far the quantized optimum can sit above the true
/// one: lipschitz * total_dim / resolution, with the default surrogate
/// lipschitz log2(2 resolution) + 1.5 reflecting that entropy gradients grow
/// like |log p| near the simplex boundary. Documented as a heuristic; use
/// generous tolerances near vertices.
double quantization_bound(int resolution, int total_dim,
                          double lipschitz = -1.0);

struct CrossCheckVerdict {
  bool pass = false;
  std::string message;
};

/// For Sense::Minimize the solver value must not exceed the oracle's (plus
/// tol) and must not undercut it by more than the quantization bound (a
/// feasible-point method that does signals a constraint-handling bug).
/// Mirrored for Sense::Maximize.
CrossCheckVerdict cross_check(const SearchOutcome& solver,
                              const OracleReport& oracle, Sense sense,
                              double tol, double quant_bound);

}  // namespace actembed
