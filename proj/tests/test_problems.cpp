#include <stdexcept>

#include <doctest.h>

#include "actembed/joint.hpp"
#include "actembed/problems.hpp"

using namespace actembed;

namespace {

// I(X; Y | A = a) for a source-action problem, built from the public
// probability operations
double side_info_rate(const SourceActionProblem& p, std::size_t a) {
  const auto& x = p.x_alphabet();
  const auto& y = p.y_alphabet();
  std::vector<double> table(x.size() * y.size());
  for (std::size_t xv = 0; xv < x.size(); ++xv) {
    const auto row = p.side_channel.row(xv * p.a_alphabet().size() + a);
    for (std::size_t yv = 0; yv < y.size(); ++yv) {
      table[xv * y.size() + yv] = row[yv];
    }
  }
  JointDistribution j =
      chain_compose({Factor(p.source), Factor(ConditionalPmf(y, {x}, table))});
  return mutual_information(j, std::vector<std::string>{"X"},
                            std::vector<std::string>{"Y"});
}

}  // namespace

TEST_CASE("validate accepts the catalog instance") {
  CHECK(validate(zs_example(0.5)).empty());
  CHECK(validate(zs_example(0.0)).empty());
  CHECK(validate(zs_example(1.0)).empty());
}

TEST_CASE("validate names the offending field") {
  SourceActionProblem p = zs_example(0.5);
  p.d2.v[1] = -0.25;
  auto violations = validate(p);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].field == "d2");
}

TEST_CASE("encoder-side factoring requirement") {
  SourceActionProblem p = zs_example(0.5);
  p.mode = ObservationMode::EncoderSide;
  SUBCASE("missing f_Y is a violation") {
    auto v = validate(p);
    REQUIRE(!v.empty());
    CHECK(v[0].field == "observation_map");
  }
  SUBCASE("f_Y that does not factor through f is rejected") {
    // f constant, f_Y identity: knowing f(A) says nothing about f_Y(A)
    const Alphabet& a = p.a_alphabet();
    p.action_map = DeterministicMap::constant({a}, Alphabet("B", {"b"}), 0);
    p.observation_map = DeterministicMap::identity(a, "Yobs");
    auto v = validate(p);
    REQUIRE(!v.empty());
    CHECK(v[0].field == "observation_map");
    CHECK(v[0].message.find("H(f_Y(A)|f(A))") != std::string::npos);
  }
  SUBCASE("f_Y factoring through f is accepted") {
    const Alphabet& a = p.a_alphabet();
    p.action_map = DeterministicMap::identity(a, "B");
    p.observation_map = DeterministicMap::identity(a, "Yobs");
    CHECK(validate(p).empty());
  }
}

TEST_CASE("validate is pure") {
  SourceActionProblem p = zs_example(0.25);
  auto first = validate(p);
  auto second = validate(p);
  CHECK(first.empty());
  CHECK(second.empty());
}

TEST_CASE("zs_example side channel") {
  SUBCASE("delta 0 is the identity under both actions") {
    SourceActionProblem p = zs_example(0.0);
    for (std::size_t a = 0; a < 2; ++a) {
      CHECK(side_info_rate(p, a) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("delta 1 makes Y constant given A") {
    SourceActionProblem p = zs_example(1.0);
    for (std::size_t a = 0; a < 2; ++a) {
      CHECK(side_info_rate(p, a) == doctest::Approx(0.0).epsilon(1e-12));
    }
    // Y = 0 under A = 0, Y = 1 under A = 1, for either source symbol
    CHECK(p.side_channel.row(0)[0] == 1.0);
    CHECK(p.side_channel.row(2)[0] == 1.0);
    CHECK(p.side_channel.row(1)[1] == 1.0);
    CHECK(p.side_channel.row(3)[1] == 1.0);
  }
  SUBCASE("delta 0.5 at (x=1, a=0) flips half the time") {
    SourceActionProblem p = zs_example(0.5);
    CHECK(p.side_channel.row(2)[1] == doctest::Approx(0.5));
  }
  SUBCASE("delta out of range is rejected") {
    CHECK_THROWS_AS(zs_example(1.5), std::invalid_argument);
    CHECK_THROWS_AS(zs_example(-0.1), std::invalid_argument);
  }
}

TEST_CASE("probing_example") {
  SUBCASE("the fig-11 instance is valid") {
    ProbingProblem p = probing_example(0.5, 1.0, 0.25);
    CHECK(p.epsilon == 0.5);
    CHECK(p.gamma_a_budget == 1.0);
    CHECK(validate(p).empty());
  }
  SUBCASE("the all-good-state boundary is valid") {
    CHECK(validate(probing_example(0.0, 1.0, 1.0)).empty());
  }
  SUBCASE("epsilon out of range is rejected") {
    CHECK_THROWS_AS(probing_example(1.5, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(probing_example(0.5, -1.0, 1.0), std::invalid_argument);
  }
}
