#include "actembed/problem_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace actembed::io {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& what) { throw ParseError(what); }

const json& require(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(std::string("missing key '") + key + "'");
  return *it;
}

Alphabet parse_alphabet(const json& alphabets, const std::string& name) {
  auto it = alphabets.find(name);
  if (it == alphabets.end()) fail("alphabet '" + name + "' is not defined");
  if (!it->is_array() || it->empty()) {
    fail("alphabet '" + name + "' must be a non-empty symbol array");
  }
  std::vector<std::string> symbols;
  for (const auto& s : *it) {
    if (!s.is_string()) fail("alphabet '" + name + "' has a non-string symbol");
    symbols.push_back(s.get<std::string>());
  }
  return Alphabet(name, std::move(symbols));
}

void flatten(const json& node, std::span<const std::size_t> dims,
             std::size_t depth, std::vector<double>& out,
             const std::string& what) {
  if (depth == dims.size()) {
    if (!node.is_number()) fail(what + ": expected a number");
    out.push_back(node.get<double>());
    return;
  }
  if (!node.is_array() || node.size() != dims[depth]) {
    fail(what + ": expected an array of length " +
         std::to_string(dims[depth]) + " at depth " + std::to_string(depth));
  }
  for (const auto& child : node) flatten(child, dims, depth + 1, out, what);
}

json nest(std::span<const double> flat, std::span<const std::size_t> dims,
          std::size_t depth, std::size_t& cursor) {
  if (depth == dims.size()) return flat[cursor++];
  json arr = json::array();
  for (std::size_t i = 0; i < dims[depth]; ++i) {
    arr.push_back(nest(flat, dims, depth + 1, cursor));
  }
  return arr;
}

json nested_table(std::span<const double> flat,
                  std::span<const std::size_t> dims) {
  std::size_t cursor = 0;
  return nest(flat, dims, 0, cursor);
}

ConditionalPmf parse_channel(const json& channels, const json& alphabets,
                             const std::string& output,
                             const std::vector<std::string>& expected_inputs) {
  auto it = channels.find(output);
  if (it == channels.end()) fail("channel '" + output + "' is not defined");
  const json& ch = *it;
  const json& inputs_j = require(ch, "inputs");
  std::vector<std::string> inputs = inputs_j.get<std::vector<std::string>>();
  if (inputs != expected_inputs) {
    std::string want;
    for (const auto& s : expected_inputs) want += s + " ";
    fail("channel '" + output + "' must have inputs (" + want + ")");
  }
  std::vector<Alphabet> input_alphas;
  std::vector<std::size_t> dims;
  for (const auto& in : inputs) {
    input_alphas.push_back(parse_alphabet(alphabets, in));
    dims.push_back(input_alphas.back().size());
  }
  Alphabet out_alpha = parse_alphabet(alphabets, output);
  dims.push_back(out_alpha.size());
  std::vector<double> table;
  flatten(require(ch, "table"), dims, 0, table, "channel '" + output + "'");
  try {
    return ConditionalPmf(out_alpha, std::move(input_alphas), std::move(table));
  } catch (const std::exception& e) {
    fail("channel '" + output + "': " + std::string(e.what()));
  }
}

DeterministicMap parse_map(const json& maps, const json& alphabets,
                           const std::string& name) {
  auto it = maps.find(name);
  if (it == maps.end()) fail("map '" + name + "' is not defined");
  const json& m = *it;
  std::vector<Alphabet> domain;
  for (const auto& d : require(m, "domain")) {
    domain.push_back(parse_alphabet(alphabets, d.get<std::string>()));
  }
  Alphabet codomain =
      parse_alphabet(alphabets, require(m, "codomain").get<std::string>());
  const json& table = require(m, "table");
  std::vector<std::string> images;
  for (const auto& e : table) {
    if (!e.is_string()) fail("map '" + name + "' table must hold symbols");
    images.push_back(e.get<std::string>());
  }
  try {
    return DeterministicMap::from_symbols(std::move(domain),
                                          std::move(codomain), images);
  } catch (const std::exception& e) {
    fail("map '" + name + "': " + std::string(e.what()));
  }
}

Matrix parse_matrix(const json& j, std::size_t rows, std::size_t cols,
                    const std::string& what) {
  std::vector<double> flat;
  const std::size_t dims[2] = {rows, cols};
  flatten(j, dims, 0, flat, what);
  return Matrix(rows, cols, std::move(flat));
}

SourceActionProblem parse_source(const json& j) {
  const json& alphabets = require(j, "alphabets");
  Alphabet x = parse_alphabet(alphabets, "X");
  Alphabet a = parse_alphabet(alphabets, "A");
  Alphabet xhat1 = parse_alphabet(alphabets, "Xhat1");
  Alphabet xhat2 = parse_alphabet(alphabets, "Xhat2");

  const json& pmfs = require(j, "pmfs");
  auto px_it = pmfs.find("X");
  if (px_it == pmfs.end()) fail("pmfs must define the source pmf 'X'");
  std::vector<double> px = px_it->get<std::vector<double>>();
  if (px.size() != x.size()) fail("pmf 'X' has wrong length");

  ConditionalPmf side =
      parse_channel(require(j, "channels"), alphabets, "Y", {"X", "A"});
  DeterministicMap f = parse_map(require(j, "maps"), alphabets, "f");

  const json& distortions = require(j, "distortions");
  Matrix d1 =
      parse_matrix(require(distortions, "d1"), x.size(), xhat1.size(), "d1");
  Matrix d2 =
      parse_matrix(require(distortions, "d2"), x.size(), xhat2.size(), "d2");

  const json& costs = require(j, "costs");
  std::vector<double> action_cost =
      require(costs, "action").get<std::vector<double>>();
  if (action_cost.size() != a.size()) fail("costs.action has wrong length");

  ObservationMode mode =
      observation_mode_from_string(require(j, "mode").get<std::string>());

  std::optional<DeterministicMap> fy;
  const json& maps = require(j, "maps");
  if (maps.contains("fY")) {
    fy = parse_map(maps, alphabets, "fY");
  }

  SourceActionProblem p{FinitePmf(x, std::move(px)),
                        std::move(side),
                        std::move(f),
                        std::move(xhat1),
                        std::move(xhat2),
                        std::move(d1),
                        std::move(d2),
                        std::move(action_cost),
                        mode,
                        std::move(fy)};
  auto violations = validate(p);
  if (!violations.empty()) {
    fail(violations.front().field + ": " + violations.front().message);
  }
  return p;
}

ChannelActionProblem parse_channel_problem(const json& j) {
  const json& alphabets = require(j, "alphabets");
  Alphabet a = parse_alphabet(alphabets, "A");
  Alphabet x = parse_alphabet(alphabets, "X");

  const json& channels = require(j, "channels");
  ConditionalPmf state = parse_channel(channels, alphabets, "S", {"A"});
  ConditionalPmf trans =
      parse_channel(channels, alphabets, "Y", {"X", "S", "A"});
  DeterministicMap f = parse_map(require(j, "maps"), alphabets, "f");

  const json& costs = require(j, "costs");
  Matrix cost =
      parse_matrix(require(costs, "joint"), a.size(), x.size(), "costs.joint");

  ChannelActionProblem p{std::move(state), std::move(trans), std::move(f),
                         std::move(cost)};
  auto violations = validate(p);
  if (!violations.empty()) {
    fail(violations.front().field + ": " + violations.front().message);
  }
  return p;
}

ProbingProblem parse_probing(const json& j) {
  ProbingProblem p;
  p.epsilon = require(j, "epsilon").get<double>();
  p.gamma_a_budget = require(j, "gamma_a").get<double>();
  p.gamma_x_budget = require(j, "gamma_x").get<double>();
  auto violations = validate(p);
  if (!violations.empty()) {
    fail(violations.front().field + ": " + violations.front().message);
  }
  return p;
}

json alphabet_json(const Alphabet& a) {
  json arr = json::array();
  for (const auto& s : a.symbols()) arr.push_back(s);
  return arr;
}

json channel_json(const ConditionalPmf& c) {
  json out;
  json inputs = json::array();
  std::vector<std::size_t> dims;
  for (const auto& in : c.inputs()) {
    inputs.push_back(in.name());
    dims.push_back(in.size());
  }
  for (const auto& o : c.outputs()) dims.push_back(o.size());
  out["inputs"] = inputs;
  out["table"] = nested_table(c.table(), dims);
  return out;
}

json map_json(const DeterministicMap& m) {
  json out;
  json domain = json::array();
  for (const auto& d : m.domain()) domain.push_back(d.name());
  out["domain"] = domain;
  out["codomain"] = m.codomain().name();
  json table = json::array();
  for (std::size_t img : m.table()) table.push_back(m.codomain().symbol(img));
  out["table"] = table;
  return out;
}

json matrix_json(const Matrix& m) {
  const std::size_t dims[2] = {m.rows, m.cols};
  return nested_table(m.v, dims);
}

}  // namespace

ParsedProblem parse_problem(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const std::exception& e) {
    fail(std::string("not valid JSON: ") + e.what());
  }
  const std::string kind = require(j, "kind").get<std::string>();
  if (kind == "source") return parse_source(j);
  if (kind == "channel") return parse_channel_problem(j);
  if (kind == "probing") return parse_probing(j);
  fail("unknown kind '" + kind + "'");
}

ParsedProblem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str());
}

std::string serialize_problem(const SourceActionProblem& p) {
  json j;
  j["kind"] = "source";
  j["mode"] = to_string(p.mode);
  json alphabets;
  alphabets["X"] = alphabet_json(p.x_alphabet());
  alphabets["Y"] = alphabet_json(p.y_alphabet());
  alphabets["A"] = alphabet_json(p.a_alphabet());
  alphabets["B"] = alphabet_json(p.b_alphabet());
  alphabets["Xhat1"] = alphabet_json(p.xhat1);
  alphabets["Xhat2"] = alphabet_json(p.xhat2);
  j["alphabets"] = alphabets;
  json pmfs;
  pmfs["X"] = json(std::vector<double>(p.source.probs().begin(),
                                       p.source.probs().end()));
  j["pmfs"] = pmfs;
  json channels;
  channels["Y"] = channel_json(p.side_channel);
  j["channels"] = channels;
  json maps;
  maps["f"] = map_json(p.action_map);
  if (p.observation_map) maps["fY"] = map_json(*p.observation_map);
  j["maps"] = maps;
  json distortions;
  distortions["d1"] = matrix_json(p.d1);
  distortions["d2"] = matrix_json(p.d2);
  j["distortions"] = distortions;
  json costs;
  costs["action"] = json(p.action_cost);
  j["costs"] = costs;
  return j.dump(2) + "\n";
}

std::string serialize_problem(const ChannelActionProblem& p) {
  json j;
  j["kind"] = "channel";
  json alphabets;
  alphabets["A"] = alphabet_json(p.a_alphabet());
  alphabets["S"] = alphabet_json(p.s_alphabet());
  alphabets["X"] = alphabet_json(p.x_alphabet());
  alphabets["Y"] = alphabet_json(p.y_alphabet());
  alphabets["B"] = alphabet_json(p.b_alphabet());
  j["alphabets"] = alphabets;
  json channels;
  channels["S"] = channel_json(p.state_channel);
  channels["Y"] = channel_json(p.transmission_channel);
  j["channels"] = channels;
  json maps;
  maps["f"] = map_json(p.action_map);
  j["maps"] = maps;
  json costs;
  costs["joint"] = matrix_json(p.cost);
  j["costs"] = costs;
  return j.dump(2) + "\n";
}

std::string serialize_problem(const ProbingProblem& p) {
  json j;
  j["kind"] = "probing";
  j["epsilon"] = p.epsilon;
  j["gamma_a"] = p.gamma_a_budget;
  j["gamma_x"] = p.gamma_x_budget;
  return j.dump(2) + "\n";
}

std::string serialize_problem(const ParsedProblem& p) {
  return std::visit([](const auto& v) { return serialize_problem(v); }, p);
}

std::string region_point_json(const RegionPoint& point) {
  json j;
  j["feasible"] = point.feasible;
  if (point.feasible) {
    j["rate"] = point.rate;
  } else {
    j["rate"] = nullptr;
  }
  if (point.r1) j["r1"] = *point.r1;
  if (point.d1) j["d1"] = *point.d1;
  if (point.d2) j["d2"] = *point.d2;
  if (point.cost) j["cost"] = *point.cost;
  json slack;
  for (const auto& [name, value] : point.slack) slack[name] = value;
  j["slack"] = slack;
  json witness;
  witness["params"] = json(point.witness_params);
  witness["maps"] = json(point.witness_maps);
  j["witness"] = witness;
  j["evaluations"] = point.evaluations;
  return j.dump(2) + "\n";
}

std::string format_csv_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void write_csv(std::ostream& out, const CurveTable& table) {
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out << ',';
    out << table.header[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_csv_value(row[i]);
    }
    out << '\n';
  }
}

}  // namespace actembed::io
