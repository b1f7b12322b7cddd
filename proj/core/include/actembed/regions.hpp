#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "actembed/oracle.hpp"
#include "actembed/problems.hpp"
#include "actembed/solver.hpp"

namespace actembed {

/// One evaluation of a region expression at a fixed witness distribution.
/// For the encoder-side modes `rate` is the unclamped objective; the
/// nonnegative clamp is applied when a RegionPoint is formed.
struct ObjectiveEval {
  double rate = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double cost = 0.0;
  /// Right side minus left side of the embedding constraint; >= 0 feasible.
  double embed_slack = 0.0;
  /// Mode-specific additional slacks (the encoder-side modes have two
  /// information constraints).
  std::vector<std::pair<std::string, double>> extra_slacks;
};

// --- witness layouts -------------------------------------------------------
//
// Decoder-side modes optimize q(o, a, u | x) where o is Xhat2 (non-causal /
// strictly causal) or the auxiliary V (causal). The parameter vector is one
// simplex block per source symbol x, each block laid out row-major over
// (o, a, u) with u fastest.
//
// Encoder-side: blocks p(u|x=0..), then p(xhat1|u,x) row-major over (u, x),
// then p(xhat2|u,x) likewise, then the single block p(a).
// Encoder-side dual: per-x blocks over (xhat1, xhat2), then p(a).
// Channel: the block p(a), then p(u|s,a) row-major over (s, a); the input
// map g: U x S -> X is an enumerated table indexed u * |S| + s.

ObjectiveEval eval_non_causal(const SourceActionProblem& p,
                              const ConditionalPmf& q);
ObjectiveEval eval_strictly_causal(const SourceActionProblem& p,
                                   const ConditionalPmf& q);
/// q is p(v, a, u | x); the estimate maps g1(U, Y) and g2(V, f(A)) are
/// resolved per observation by expected-distortion minimization.
ObjectiveEval eval_causal(const SourceActionProblem& p,
                          const ConditionalPmf& q);
ObjectiveEval eval_encoder_side(const SourceActionProblem& p,
                                const ConditionalPmf& q_u,
                                const ConditionalPmf& q_xhat1,
                                const ConditionalPmf& q_xhat2,
                                const FinitePmf& p_a);
ObjectiveEval eval_encoder_side_dual(const SourceActionProblem& p,
                                     const ConditionalPmf& q_xhat12,
                                     const FinitePmf& p_a);
ObjectiveEval eval_channel(const ChannelActionProblem& p, const FinitePmf& p_a,
                           const ConditionalPmf& q_u,
                           const DeterministicMap& g);

// --- region solvers --------------------------------------------------------

RegionPoint solve_non_causal(const SourceActionProblem& p, double d1_budget,
                             double d2_budget, double cost_budget,
                             const SolverConfig& config,
                             std::span<const WarmStart> warm = {});
RegionPoint solve_strictly_causal(const SourceActionProblem& p,
                                  double d1_budget, double d2_budget,
                                  double cost_budget, const SolverConfig& config,
                                  std::span<const WarmStart> warm = {});
RegionPoint solve_causal(const SourceActionProblem& p, double d1_budget,
                         double d2_budget, double cost_budget,
                         const SolverConfig& config,
                         std::span<const WarmStart> warm = {});
RegionPoint solve_encoder_side(const SourceActionProblem& p, double d1_budget,
                               double d2_budget, double cost_budget,
                               const SolverConfig& config,
                               std::span<const WarmStart> warm = {});
RegionPoint solve_encoder_side_dual(const SourceActionProblem& p,
                                    double d1_budget, double d2_budget,
                                    double cost_budget,
                                    const SolverConfig& config,
                                    std::span<const WarmStart> warm = {});

/// Dispatch on p.mode.
RegionPoint solve_source(const SourceActionProblem& p, double d1_budget,
                         double d2_budget, double cost_budget,
                         const SolverConfig& config,
                         std::span<const WarmStart> warm = {});

/// Fixes R1 and maximizes the sum bound I(A,U;Y) - I(U;S|A) over p(a),
/// p(u|s,a) and the enumerated input maps g, subject to H(f(A)) >= R1 and
/// the cost budget. The returned rate is the best sum rate found (a lower
/// bound on the boundary).
RegionPoint channel_max_sum_rate(const ChannelActionProblem& p, double r1,
                                 double cost_budget, const SolverConfig& config,
                                 std::span<const WarmStart> warm = {});

/// The probing instance: maximizes
///   gamma (1-eps) H(p1) + (1-gamma) (1-eps) H(p2)
/// over (p1, p2, gamma) in [0,1]^3 subject to
///   E[X] = p1 gamma (1-eps) + p2 (1-gamma) <= Gamma_X,
///   E[A] = gamma <= Gamma_A, and H(gamma) >= R1.
RegionPoint probing_sum_rate(const ProbingProblem& p, double r1,
                             const SolverConfig& config,
                             std::span<const WarmStart> warm = {});

/// Comparison value allowing a binary time-sharing variable between two
/// (p1, p2, gamma) tuples; the plain probing_sum_rate (degenerate time
/// sharing) is the normative value.
RegionPoint probing_sum_rate_convexified(const ProbingProblem& p, double r1,
                                         const SolverConfig& config);

// --- the binary worked example ---------------------------------------------

/// Rate of the binary Z/S instance at D1 = 0 under the symmetric
/// three-parameter reduction: q(a=1, xhat2=0 | x=0) = alpha1,
/// q(a=1, xhat2=1 | x=0) = alpha2, q(a=0, xhat2=1 | x=0) = alpha3, with the
/// mirrored completion for x = 1 and U = Xhat1 = X. The embedding
/// constraint is I(X; Xhat2, A) <= H(A) for non-causal observation and
/// <= H(A | Xhat2) for strictly causal. `mode` must be one of those two.
RegionPoint binary_example_point(double delta, double d2_budget,
                                 ObservationMode mode,
                                 const SolverConfig& config,
                                 std::span<const WarmStart> warm = {});
double binary_example_rate(double delta, double d2_budget,
                           ObservationMode mode, const SolverConfig& config);

/// Smallest Decoder-2 distortion that leaves the rate unaffected: among the
/// optimizers of the unconstrained (d2 = 1/2) non-causal problem, the
/// minimum of alpha2 + alpha3, located by a secondary minimization at the
/// optimal rate (within value_tol).
double decoder2_threshold(double delta, const SolverConfig& config);

// --- rate-pair geometry ------------------------------------------------------

struct RatePair {
  double r1 = 0.0;
  double r2 = 0.0;
};

/// Closure of the union of the regions {(r1 - t, r2 + t) : 0 <= t <= r1}
/// (plus coordinate-wise down-sets) generated by the given achievable
/// points, returned as the dominating corner points sorted by r1.
std::vector<RatePair> region_transfer_closure(std::span<const RatePair> points);

// --- sweep driver ------------------------------------------------------------

struct TradeoffCurve {
  std::string sweep_var;
  std::vector<double> grid;
  std::vector<RegionPoint> points;
  /// Monotonicity violations are solver misses; they are reported here
  /// rather than silently accepted.
  std::vector<std::string> warnings;
};

using PointSolver =
    std::function<RegionPoint(double, std::span<const WarmStart>)>;

/// Evaluates `solve_at` on each grid value in order, warm-starting every
/// solve from the previous point's witness. `expect_nonincreasing` turns on
/// the monotonicity check (for budget sweeps of minimization problems).
TradeoffCurve trace_curve(const PointSolver& solve_at, std::string sweep_var,
                          std::span<const double> grid, double value_tol,
                          bool expect_nonincreasing);

// --- search-problem builders ---------------------------------------------
//
// The solvers above and the exhaustive oracle share these: running
// minimize_constrained and exhaustive_optimum on the same SearchProblem is
// what "cross-check at matched resolution" means.

SearchProblem source_search_problem(const SourceActionProblem& p,
                                    double d1_budget, double d2_budget,
                                    double cost_budget,
                                    const SolverConfig& config);
SearchProblem channel_search_problem(const ChannelActionProblem& p, double r1,
                                     double cost_budget,
                                     const SolverConfig& config);
SearchProblem probing_search_problem(const ProbingProblem& p, double r1);
SearchProblem binary_example_search_problem(double delta, double d2_budget,
                                            ObservationMode mode);

// --- witness utilities -------------------------------------------------------

/// The decoder-side witness as a conditional pmf p(o, a, u | x), with the
/// auxiliary cardinalities taken from `config` exactly as the solvers do.
ConditionalPmf source_witness_pmf(const SourceActionProblem& p,
                                  const SolverConfig& config,
                                  std::span<const double> params);

/// Re-evaluates a stored decoder-side witness; used to verify that region
/// points reproduce their recorded rate.
ObjectiveEval reevaluate_source_witness(const SourceActionProblem& p,
                                        const SolverConfig& config,
                                        std::span<const double> params);

/// Auxiliary-cardinality bounds from the region statements.
int u_cardinality_bound(const SourceActionProblem& p);
int v_cardinality_bound(const SourceActionProblem& p);
int u_cardinality_bound(const ChannelActionProblem& p);

/// Lift a strictly-causal witness q(xhat2, a, u | x) into the causal
/// parameter space with V identified with Xhat2 (padded with zero-mass V
/// symbols when v_card exceeds |Xhat2|). The lifted point evaluates to the
/// same rate and is feasible whenever the original is.
std::vector<double> embed_sc_witness_in_causal(const SourceActionProblem& p,
                                               std::span<const double> params,
                                               int u_card, int v_card);

/// Lift a causal witness q(v, a, u | x) into the non-causal space using
/// Xhat2 = g2(V, f(A)) (g2 resolved by expected distortion) and the paired
/// auxiliary U' = (U, V). Requires target_u_card >= u_card * v_card.
std::vector<double> embed_causal_witness_in_non_causal(
    const SourceActionProblem& p, std::span<const double> params, int u_card,
    int v_card, int target_u_card);

}  // namespace actembed
