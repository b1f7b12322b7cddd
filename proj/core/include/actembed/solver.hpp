#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "actembed/joint.hpp"

namespace actembed {

/// Tuning knobs shared by every region solver.
struct SolverConfig {
  int grid_resolution = 8;      ///< simplex quantization steps per block
  int restarts = 16;            ///< randomized refinement starts
  int refine_iters = 200;       ///< projected-gradient iterations per start
  double step_shrink = 0.5;     ///< step multiplier on non-improvement
  double feas_tol = 1e-9;       ///< constraint slack tolerance
  double value_tol = 1e-7;      ///< value comparison tolerance
  std::uint64_t seed = 0x5eed;  ///< restart RNG seed
  /// Caps for auxiliary alphabets (e.g. {"U", 2}). Missing entries default
  /// to the largest cardinality each region statement allows; requesting
  /// more than that is an error.
  std::map<std::string, int> aux_cardinalities;

  /// Budget for the exhaustive grid stage. When the Cartesian product of
  /// block grids at grid_resolution exceeds this, the grid stage runs at the
  /// largest resolution that fits (coverage stays exhaustive, just coarser);
  /// refinement is unaffected.
  std::uint64_t max_grid_evals = 2'000'000;
  int threads = 1;         ///< worker count for grid evaluation
  double fd_step = 1e-6;   ///< finite-difference step on raw parameters

  int cardinality(const std::string& name, int bound) const;
};

enum class Sense { Minimize, Maximize };

/// One candidate: concatenated simplex blocks plus any enumerated map tables.
struct Candidate {
  std::span<const double> params;
  std::span<const int> map_tables;
};

/// Objective plus constraint values at a candidate. Constraints are
/// satisfied when <= feas_tol.
struct EvalResult {
  double objective = 0.0;
  std::vector<double> constraints;
};

struct SimplexBlockSpec {
  std::string name;
  int dim = 0;
};

/// A space of total functions [0, domain_size) -> [0, codomain_size) that
/// the search enumerates exhaustively.
struct MapSpaceSpec {
  std::string name;
  int domain_size = 0;
  int codomain_size = 0;
};

struct SearchProblem {
  std::vector<SimplexBlockSpec> blocks;
  std::vector<MapSpaceSpec> map_spaces;
  /// Evaluates objective and all constraints in one pass (they usually
  /// share one joint-distribution build).
  std::function<EvalResult(const Candidate&)> evaluate;
};

struct SearchOutcome {
  double value = 0.0;
  std::vector<double> witness;      ///< concatenated simplex blocks
  std::vector<int> witness_maps;    ///< concatenated map tables
  bool feasible = false;
  std::uint64_t evaluations = 0;
  int effective_resolution = 0;     ///< grid resolution actually used
};

/// A known-good starting point, e.g. the previous sweep point's witness.
struct WarmStart {
  std::vector<double> params;
  std::vector<int> map_tables;
};

/// Enumeration of the quantized probability simplex: all compositions of
/// `resolution` into `dim` parts, divided by `resolution`, in lexicographic
/// order of the count vectors. Supports random access for deterministic
/// parallel chunking.
class SimplexGrid {
 public:
  SimplexGrid(int dim, int resolution);

  std::uint64_t size() const { return size_; }
  int dim() const { return dim_; }
  /// Writes point number `index` into `out` (length dim).
  void point(std::uint64_t index, std::span<double> out) const;

  /// C(resolution + dim - 1, dim - 1), saturating at uint64 max.
  static std::uint64_t count(int dim, int resolution);

 private:
  int dim_;
  int resolution_;
  std::uint64_t size_;
  // binom_[n][k] for unranking, saturating
  std::vector<std::vector<std::uint64_t>> binom_;
};

/// Euclidean projection onto the probability simplex.
std::vector<double> project_to_simplex(std::span<const double> v);
void project_to_simplex_inplace(std::span<double> v);

/// For each combination of the observed variables, the estimate minimizing
/// expected distortion against the source axis: argmin over targets of
/// sum_x p(x | obs) d(x, target). Zero-mass observations and ties resolve to
/// the lowest target index.
DeterministicMap bayes_estimator(const JointDistribution& j,
                                 const std::string& source_var,
                                 std::span<const std::string> observed,
                                 const Alphabet& target,
                                 std::span<const double> distortion);

/// The expected distortion achieved by the bayes_estimator, computed
/// without materializing the map: sum over obs of min_t sum_x p(x, obs)
/// d(x, t). `xo_marginal` must be the (source, observed...) marginal laid
/// out with the source axis slowest.
double bayes_expected_distortion(std::span<const double> xo_marginal,
                                 std::size_t source_size,
                                 std::span<const double> distortion,
                                 std::size_t target_size);

/// Grid-then-polish search over a product of simplices and enumerated maps.
///
/// Stage 1 evaluates the full Cartesian product of per-block grids (at the
/// largest resolution fitting max_grid_evals) for every map table, keeping
/// the best feasible candidate. Stage 2 runs projected-gradient refinement
/// (finite differences, step shrinking, rejection of infeasible moves) from
/// the per-map grid bests, the supplied warm starts, and `restarts` seeded
/// random starts. For Sense::Minimize the result is an upper bound on the
/// true optimum, for Sense::Maximize a lower bound; the objectives here are
/// non-convex and no global certificate is claimed.
///
/// Deterministic for a fixed config regardless of `threads`: ties are
/// resolved toward the lexicographically smallest parameter vector.
SearchOutcome minimize_constrained(const SearchProblem& problem,
                                   const SolverConfig& config, Sense sense,
                                   std::span<const WarmStart> warm_starts = {});

}  // namespace actembed
