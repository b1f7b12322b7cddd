#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>

#include "actembed/figures.hpp"
#include "actembed/problems.hpp"

namespace actembed::io {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using ParsedProblem =
    std::variant<SourceActionProblem, ChannelActionProblem, ProbingProblem>;

/// Parses the JSON problem document. Throws ParseError naming the first
/// violation (unknown kind, missing alphabet, malformed table, ...).
ParsedProblem parse_problem(const std::string& json_text);
ParsedProblem load_problem(const std::string& path);

/// Serializes back to the document form; parse followed by serialize is
/// value-identical (serialize(parse(serialize(p))) == serialize(p)).
std::string serialize_problem(const SourceActionProblem& p);
std::string serialize_problem(const ChannelActionProblem& p);
std::string serialize_problem(const ProbingProblem& p);
std::string serialize_problem(const ParsedProblem& p);

/// Structured-text rendering of a solved operating point.
std::string region_point_json(const RegionPoint& point);

/// Fixed-column CSV with floats at 9 significant digits.
void write_csv(std::ostream& out, const CurveTable& table);
std::string format_csv_value(double v);

}  // namespace actembed::io
