#include <cmath>

#include <stdexcept>

#include <doctest.h>

#include "actembed/oracle.hpp"
#include "actembed/regions.hpp"

using namespace actembed;

namespace {

constexpr double kOneMinusH2Point11 = 0.500084041835472;

double h2(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

SearchProblem binary_rd_problem(double d) {
  SearchProblem sp;
  sp.blocks = {{"xhat|x=0", 2}, {"xhat|x=1", 2}};
  sp.evaluate = [d](const Candidate& c) {
    const double q0 = c.params[1];
    const double q1 = c.params[2];
    const double p1 = 0.5 * q0 + 0.5 * (1.0 - q1);
    EvalResult r;
    r.objective = h2(p1) - 0.5 * h2(q0) - 0.5 * h2(q1);
    r.constraints = {0.5 * q0 + 0.5 * q1 - d};
    return r;
  };
  return sp;
}

}  // namespace

TEST_CASE("oracle agrees with the binary rate-distortion closed form") {
  auto report = exhaustive_optimum(binary_rd_problem(0.11), 200,
                                   Sense::Minimize);
  CHECK(std::abs(report.value - kOneMinusH2Point11) <= 2e-3);
  // the quantized optimum can never undercut the true one
  CHECK(report.value >= kOneMinusH2Point11 - 1e-12);
  CHECK(report.points_evaluated == 201u * 201u);
}

TEST_CASE("the objective is constant for the delta=1 instance") {
  SearchProblem sp =
      binary_example_search_problem(1.0, 0.3, ObservationMode::NonCausal);
  auto report = exhaustive_optimum(sp, 4, Sense::Minimize);
  CHECK(report.value == doctest::Approx(1.0).epsilon(1e-12));
  auto finer = exhaustive_optimum(sp, 12, Sense::Minimize);
  CHECK(finer.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("infeasible constraint sets raise") {
  SearchProblem sp =
      binary_example_search_problem(0.5, -0.1, ObservationMode::NonCausal);
  CHECK_THROWS_AS(exhaustive_optimum(sp, 10, Sense::Minimize),
                  OracleInfeasible);
}

TEST_CASE("the evaluation cap raises before enumerating") {
  SearchProblem sp = binary_rd_problem(0.2);
  CHECK_THROWS_AS(
      exhaustive_optimum(sp, 2000, Sense::Minimize, 1e-9, /*cap=*/1000),
      OracleGridTooLarge);
}

TEST_CASE("nested resolutions only improve") {
  SearchProblem sp = binary_rd_problem(0.17);
  auto coarse = exhaustive_optimum(sp, 10, Sense::Minimize);
  auto fine = exhaustive_optimum(sp, 20, Sense::Minimize);
  CHECK(fine.value <= coarse.value + 1e-12);
}

TEST_CASE("oracle is parallelism-invariant") {
  SearchProblem sp = binary_rd_problem(0.23);
  auto a = exhaustive_optimum(sp, 60, Sense::Minimize, 1e-9, 100'000'000, 1);
  auto b = exhaustive_optimum(sp, 60, Sense::Minimize, 1e-9, 100'000'000, 4);
  CHECK(a.value == b.value);
  CHECK(a.witness == b.witness);
}

TEST_CASE("cross_check verdicts") {
  OracleReport oracle;
  oracle.value = 0.5010;
  oracle.resolution = 200;
  const double qb = quantization_bound(200, 4);

  SearchOutcome solver;
  solver.feasible = true;

  SUBCASE("refinement beating the grid passes") {
    solver.value = 0.50008;
    CHECK(cross_check(solver, oracle, Sense::Minimize, 1e-3, qb).pass);
  }
  SUBCASE("identical values pass") {
    solver.value = oracle.value;
    CHECK(cross_check(solver, oracle, Sense::Minimize, 1e-3, qb).pass);
  }
  SUBCASE("undercutting the quantization bound fails") {
    solver.value = oracle.value - qb - 1e-3;
    auto verdict = cross_check(solver, oracle, Sense::Minimize, 1e-4, qb);
    CHECK(!verdict.pass);
    CHECK(verdict.message.find("quantization") != std::string::npos);
  }
  SUBCASE("a worse-than-oracle minimum fails") {
    solver.value = oracle.value + 0.1;
    CHECK(!cross_check(solver, oracle, Sense::Minimize, 1e-3, qb).pass);
  }
}
