#include <cmath>
#include <random>
#include <stdexcept>

#include <doctest.h>

#include "actembed/joint.hpp"

using namespace actembed;

namespace {

// independently evaluated to full precision
constexpr double kH2Quarter = 0.8112781244591329;
constexpr double kOneMinusH2Point11 = 0.500084041835472;

std::vector<double> dirichlet(std::mt19937_64& rng, std::size_t n) {
  std::vector<double> p(n);
  double total = 0.0;
  for (auto& x : p) {
    x = -std::log(std::max(
        static_cast<double>(rng() >> 11) * 0x1.0p-53, 1e-300));
    total += x;
  }
  for (auto& x : p) x /= total;
  return p;
}

JointDistribution random_joint(std::mt19937_64& rng, int n_axes,
                               std::size_t size) {
  std::vector<Alphabet> axes;
  std::size_t total = 1;
  for (int i = 0; i < n_axes; ++i) {
    axes.push_back(Alphabet::indexed("V" + std::to_string(i), size));
    total *= size;
  }
  return JointDistribution(std::move(axes), dirichlet(rng, total));
}

}  // namespace

TEST_CASE("entropy basics") {
  Alphabet a4 = Alphabet::indexed("A", 4);
  CHECK(entropy(FinitePmf(a4, {0.25, 0.25, 0.25, 0.25})) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(entropy(FinitePmf(a4, {0.0, 1.0, 0.0, 0.0})) ==
        doctest::Approx(0.0).epsilon(1e-12));
  Alphabet a2 = Alphabet::indexed("B", 2);
  CHECK(entropy(FinitePmf(a2, {0.25, 0.75})) ==
        doctest::Approx(kH2Quarter).epsilon(1e-13));
}

TEST_CASE("pmf invariants rejected at construction") {
  Alphabet a2 = Alphabet::indexed("X", 2);
  CHECK_THROWS_AS(FinitePmf(a2, {0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(FinitePmf(a2, {-0.1, 1.1}), std::invalid_argument);
  CHECK_THROWS_AS(Alphabet("X", {"0", "0"}), std::invalid_argument);
  CHECK_THROWS_AS(Alphabet("X", {}), std::invalid_argument);
}

TEST_CASE("marginalize") {
  Alphabet x("X", {"0", "1"});
  Alphabet y("Y", {"0", "1"});
  SUBCASE("product factorization recovers the factor") {
    JointDistribution j({x, y}, {0.3 * 0.6, 0.3 * 0.4, 0.7 * 0.6, 0.7 * 0.4});
    JointDistribution mx = marginalize(j, std::vector<std::string>{"X"});
    CHECK(mx.mass()[0] == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(mx.mass()[1] == doctest::Approx(0.7).epsilon(1e-14));
  }
  SUBCASE("keeping every axis is the identity") {
    JointDistribution j({x, y}, {0.1, 0.2, 0.3, 0.4});
    JointDistribution all = marginalize(j, std::vector<std::string>{"X", "Y"});
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(all.mass()[i] == doctest::Approx(j.mass()[i]).epsilon(1e-15));
    }
  }
  SUBCASE("uniform 2x2 marginal is uniform") {
    JointDistribution j({x, y}, {0.25, 0.25, 0.25, 0.25});
    JointDistribution my = marginalize(j, std::vector<std::string>{"Y"});
    CHECK(my.mass()[0] == doctest::Approx(0.5));
  }
  SUBCASE("unknown variable is an error") {
    JointDistribution j({x, y}, {0.25, 0.25, 0.25, 0.25});
    CHECK_THROWS_AS(marginalize(j, std::vector<std::string>{"Z"}),
                    std::invalid_argument);
  }
}

TEST_CASE("mutual information") {
  Alphabet x("X", {"0", "1"});
  Alphabet y("Y", {"0", "1"});
  SUBCASE("independence gives zero") {
    JointDistribution j({x, y}, {0.15, 0.35, 0.15, 0.35});
    CHECK(mutual_information(j, std::vector<std::string>{"X"},
                             std::vector<std::string>{"Y"}) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("identity channel carries one bit") {
    JointDistribution j({x, y}, {0.5, 0.0, 0.0, 0.5});
    CHECK(mutual_information(j, std::vector<std::string>{"X"},
                             std::vector<std::string>{"Y"}) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("binary symmetric channel at crossover 0.11") {
    const double c = 0.11;
    JointDistribution j({x, y}, {0.5 * (1 - c), 0.5 * c, 0.5 * c, 0.5 * (1 - c)});
    CHECK(mutual_information(j, std::vector<std::string>{"X"},
                             std::vector<std::string>{"Y"}) ==
          doctest::Approx(kOneMinusH2Point11).epsilon(1e-12));
  }
  SUBCASE("overlapping sets are rejected") {
    JointDistribution j({x, y}, {0.25, 0.25, 0.25, 0.25});
    CHECK_THROWS_AS(mutual_information(j, std::vector<std::string>{"X"},
                                       std::vector<std::string>{"X"}),
                    std::invalid_argument);
  }
}

TEST_CASE("pushforward") {
  Alphabet a("A", {"0", "1", "2"});
  JointDistribution j({a}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  SUBCASE("constant map gives a point mass") {
    auto m = DeterministicMap::constant({a}, Alphabet("C", {"c"}), 0);
    JointDistribution pushed = pushforward(j, m, "B");
    CHECK(entropy(pushed, std::vector<std::string>{"B"}) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("identity map is perfectly correlated") {
    auto m = DeterministicMap::identity(a, "Acopy");
    JointDistribution pushed = pushforward(j, m, "B");
    CHECK(mutual_information(pushed, std::vector<std::string>{"A"},
                             std::vector<std::string>{"B"}) ==
          doctest::Approx(entropy(pushed, std::vector<std::string>{"A"}))
              .epsilon(1e-12));
  }
  SUBCASE("mod-2 map counts preimages") {
    DeterministicMap m({a}, Alphabet("P", {"0", "1"}), {0, 1, 0});
    JointDistribution pushed = pushforward(j, m, "B");
    JointDistribution mb = marginalize(pushed, std::vector<std::string>{"B"});
    CHECK(mb.mass()[0] == doctest::Approx(2.0 / 3).epsilon(1e-12));
  }
  SUBCASE("name collision is an error") {
    auto m = DeterministicMap::identity(a, "Acopy");
    CHECK_THROWS_AS(pushforward(j, m, "A"), std::invalid_argument);
  }
}

TEST_CASE("chain_compose") {
  Alphabet x("X", {"0", "1"});
  Alphabet y("Y", {"0", "1"});
  SUBCASE("identity channel on a uniform source is diagonal") {
    FinitePmf px(x, {0.5, 0.5});
    ConditionalPmf pyx(y, {x}, {1.0, 0.0, 0.0, 1.0});
    JointDistribution j = chain_compose({Factor(px), Factor(pyx)});
    CHECK(j.mass()[0] == doctest::Approx(0.5));
    CHECK(j.mass()[1] == doctest::Approx(0.0));
    CHECK(j.mass()[2] == doctest::Approx(0.0));
    CHECK(j.mass()[3] == doctest::Approx(0.5));
  }
  SUBCASE("a single pmf composes to itself") {
    FinitePmf px(x, {0.3, 0.7});
    JointDistribution j = chain_compose({Factor(px)});
    CHECK(j.axis_count() == 1);
    CHECK(j.mass()[0] == doctest::Approx(0.3));
  }
  SUBCASE("five-axis joint reproduces its factors") {
    std::mt19937_64 rng(7);
    Alphabet xh2("Xhat2", {"0", "1"});
    Alphabet a("A", {"0", "1"});
    Alphabet u("U", {"0", "1"});
    FinitePmf px(x, {0.4, 0.6});
    std::vector<double> qtab;
    for (int i = 0; i < 2; ++i) {
      auto row = dirichlet(rng, 8);
      qtab.insert(qtab.end(), row.begin(), row.end());
    }
    ConditionalPmf q({xh2, a, u}, {x}, qtab);
    std::vector<double> side;
    for (int i = 0; i < 4; ++i) {
      auto row = dirichlet(rng, 2);
      side.insert(side.end(), row.begin(), row.end());
    }
    ConditionalPmf pyxa(y, {x, a}, side);
    JointDistribution j = chain_compose({Factor(px), Factor(q), Factor(pyxa)});
    REQUIRE(j.axis_count() == 5);

    // conditioning on x recovers the supplied q
    JointDistribution m =
        marginalize(j, std::vector<std::string>{"X", "Xhat2", "A", "U"});
    for (int xv = 0; xv < 2; ++xv) {
      for (int o = 0; o < 8; ++o) {
        const double cond =
            m.mass()[static_cast<std::size_t>(xv * 8 + o)] / px[xv];
        CHECK(cond == doctest::Approx(qtab[static_cast<std::size_t>(xv * 8 + o)])
                          .epsilon(1e-12));
      }
    }
  }
  SUBCASE("dangling conditioning variable is an error") {
    ConditionalPmf pyx(y, {x}, {1.0, 0.0, 0.0, 1.0});
    const std::vector<Factor> factors = {Factor(pyx)};
    CHECK_THROWS_AS(chain_compose(factors), std::invalid_argument);
  }
  SUBCASE("duplicate introduction is an error") {
    FinitePmf px(x, {0.5, 0.5});
    const std::vector<Factor> factors = {Factor(px), Factor(px)};
    CHECK_THROWS_AS(chain_compose(factors), std::invalid_argument);
  }
}

TEST_CASE("kernel properties on random joints") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 200; ++i) {
    JointDistribution j = random_joint(rng, 3, 3);
    const AxisMask x = 1, y = 2, z = 4;
    const double lhs = mutual_information(j, x, y | z);
    const double rhs =
        mutual_information(j, x, z) + mutual_information(j, x, y, z);
    CHECK(std::abs(lhs - rhs) <= 1e-9);
    CHECK(mutual_information(j, x, y, z) >= -1e-9);
    for (std::size_t ax = 0; ax < j.axis_count(); ++ax) {
      const double h = entropy(j, AxisMask{1} << ax);
      CHECK(h >= 0.0);
      CHECK(h <= std::log2(double(j.axes()[ax].size())) + 1e-12);
    }
  }
}
