#include <sstream>

#include <stdexcept>

#include <doctest.h>

#include "actembed/problem_io.hpp"

using namespace actembed;

TEST_CASE("source problem round trip") {
  SourceActionProblem p = zs_example(0.35);
  const std::string once = io::serialize_problem(p);
  io::ParsedProblem parsed = io::parse_problem(once);
  REQUIRE(std::holds_alternative<SourceActionProblem>(parsed));
  const std::string twice = io::serialize_problem(parsed);
  CHECK(once == twice);

  const auto& q = std::get<SourceActionProblem>(parsed);
  CHECK(q.source.probs()[0] == p.source.probs()[0]);
  CHECK(q.side_channel.table()[3] == p.side_channel.table()[3]);
  CHECK(q.mode == p.mode);
}

TEST_CASE("channel problem round trip") {
  const Alphabet a = Alphabet::indexed("A", 2);
  const Alphabet s = Alphabet::indexed("S", 2);
  const Alphabet x = Alphabet::indexed("X", 2);
  const Alphabet y = Alphabet::indexed("Y", 2);
  std::vector<double> trans;
  for (int i = 0; i < 8; ++i) {
    trans.push_back(0.25 + 0.05 * i);
    trans.push_back(0.75 - 0.05 * i);
  }
  ChannelActionProblem p{ConditionalPmf(s, {a}, {0.9, 0.1, 0.2, 0.8}),
                         ConditionalPmf(y, {x, s, a}, trans),
                         DeterministicMap::identity(a, "B"),
                         Matrix(2, 2, {0.0, 1.0, 0.5, 1.5})};
  const std::string once = io::serialize_problem(p);
  io::ParsedProblem parsed = io::parse_problem(once);
  REQUIRE(std::holds_alternative<ChannelActionProblem>(parsed));
  CHECK(io::serialize_problem(parsed) == once);
}

TEST_CASE("probing problem round trip") {
  ProbingProblem p{0.5, 1.0, 0.25};
  const std::string once = io::serialize_problem(p);
  io::ParsedProblem parsed = io::parse_problem(once);
  REQUIRE(std::holds_alternative<ProbingProblem>(parsed));
  CHECK(io::serialize_problem(parsed) == once);
}

TEST_CASE("parse errors name the first violation") {
  SUBCASE("not JSON") {
    CHECK_THROWS_AS(io::parse_problem("not json"), io::ParseError);
  }
  SUBCASE("unknown kind") {
    CHECK_THROWS_AS(io::parse_problem(R"({"kind": "mystery"})"),
                    io::ParseError);
  }
  SUBCASE("missing alphabet") {
    std::string doc = io::serialize_problem(zs_example(0.5));
    // strip the X alphabet
    const auto pos = doc.find("\"X\"");
    doc.erase(pos, doc.find(']', pos) - pos + 2);
    try {
      io::parse_problem(doc);
      FAIL("expected a parse error");
    } catch (const io::ParseError& e) {
      CHECK(std::string(e.what()).find("alphabet") != std::string::npos);
    }
  }
  SUBCASE("malformed channel table") {
    std::string doc = io::serialize_problem(zs_example(0.5));
    const auto pos = doc.find("[0.5, 0.5]");  // the x=0,a=1 row at delta 0.5
    REQUIRE(pos != std::string::npos);
    doc.replace(pos, 10, "[0.5]");
    CHECK_THROWS_AS(io::parse_problem(doc), io::ParseError);
  }
}

TEST_CASE("csv formatting uses nine significant digits") {
  CHECK(io::format_csv_value(0.5000840418354720) == "0.500084042");
  CHECK(io::format_csv_value(1.0) == "1");
  CHECK(io::format_csv_value(0.1) == "0.1");

  CurveTable t;
  t.header = {"a", "b"};
  t.rows = {{0.123456789123, 1.0}, {2.0, 3.5}};
  std::ostringstream out;
  io::write_csv(out, t);
  CHECK(out.str() == "a,b\n0.123456789,1\n2,3.5\n");
}

TEST_CASE("region point json carries the witness and slacks") {
  RegionPoint pt;
  pt.feasible = true;
  pt.rate = 0.75;
  pt.d1 = 0.0;
  pt.slack = {{"d2", 0.125}};
  pt.witness_params = {0.5, 0.5};
  pt.evaluations = 42;
  const std::string text = io::region_point_json(pt);
  CHECK(text.find("\"rate\": 0.75") != std::string::npos);
  CHECK(text.find("\"d2\": 0.125") != std::string::npos);
  CHECK(text.find("\"evaluations\": 42") != std::string::npos);
}
