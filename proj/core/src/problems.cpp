#include "actembed/problems.hpp"

#include <cmath>
#include <stdexcept>

namespace actembed {

std::string to_string(ObservationMode mode) {
  switch (mode) {
    case ObservationMode::NonCausal: return "non_causal";
    case ObservationMode::StrictlyCausal: return "strictly_causal";
    case ObservationMode::Causal: return "causal";
    case ObservationMode::EncoderSide: return "encoder_side";
    case ObservationMode::EncoderSideDual: return "encoder_side_dual";
  }
  throw std::logic_error("unknown observation mode");
}

ObservationMode observation_mode_from_string(const std::string& s) {
  if (s == "non_causal") return ObservationMode::NonCausal;
  if (s == "strictly_causal") return ObservationMode::StrictlyCausal;
  if (s == "causal") return ObservationMode::Causal;
  if (s == "encoder_side") return ObservationMode::EncoderSide;
  if (s == "encoder_side_dual") return ObservationMode::EncoderSideDual;
  throw std::invalid_argument("unknown observation mode '" + s + "'");
}

Matrix::Matrix(std::size_t r, std::size_t c, std::vector<double> data)
    : rows(r), cols(c), v(std::move(data)) {
  if (v.size() != rows * cols) {
    throw std::invalid_argument("matrix data has wrong size");
  }
}

Matrix Matrix::hamming(std::size_t n) {
  std::vector<double> d(n * n, 1.0);
  for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 0.0;
  return Matrix(n, n, std::move(d));
}

namespace {

void check_matrix(std::vector<Violation>& out, const Matrix& m,
                  std::size_t rows, std::size_t cols, const std::string& field) {
  if (m.rows != rows || m.cols != cols) {
    out.push_back({field, "expected shape " + std::to_string(rows) + "x" +
                              std::to_string(cols)});
    return;
  }
  for (double e : m.v) {
    if (!std::isfinite(e) || e < 0.0) {
      out.push_back({field, "entries must be finite and non-negative"});
      return;
    }
  }
}

}  // namespace

std::vector<Violation> validate(const SourceActionProblem& p) {
  std::vector<Violation> out;
  if (p.side_channel.inputs().size() != 2 ||
      p.side_channel.inputs()[0].name() != p.x_alphabet().name() ||
      p.side_channel.inputs()[0].size() != p.x_alphabet().size()) {
    out.push_back({"side_channel", "inputs must be exactly (X, A)"});
  }
  if (p.action_map.domain().size() != 1 ||
      p.action_map.domain()[0] != p.a_alphabet()) {
    out.push_back({"action_map", "domain must be the action alphabet A"});
  }
  check_matrix(out, p.d1, p.x_alphabet().size(), p.xhat1.size(), "d1");
  check_matrix(out, p.d2, p.x_alphabet().size(), p.xhat2.size(), "d2");
  if (p.action_cost.size() != p.a_alphabet().size()) {
    out.push_back({"action_cost", "needs one entry per action symbol"});
  } else {
    for (double c : p.action_cost) {
      if (!std::isfinite(c) || c < 0.0) {
        out.push_back({"action_cost", "entries must be finite and non-negative"});
        break;
      }
    }
  }
  const bool encoder_mode = p.mode == ObservationMode::EncoderSide ||
                            p.mode == ObservationMode::EncoderSideDual;
  if (encoder_mode) {
    if (!p.observation_map.has_value()) {
      out.push_back({"observation_map",
                     "encoder-side modes require the map f_Y: A -> Y"});
    } else if (p.observation_map->domain() != p.action_map.domain()) {
      out.push_back({"observation_map", "f_Y and f must share the domain A"});
    } else if (p.mode == ObservationMode::EncoderSide) {
      if (!factors_through(*p.observation_map, p.action_map)) {
        out.push_back({"observation_map",
                       "mode encoder_side requires H(f_Y(A)|f(A)) = 0: "
                       "f_Y must factor through f"});
      }
    } else {
      if (!factors_through(p.action_map, *p.observation_map)) {
        out.push_back({"action_map",
                       "mode encoder_side_dual requires H(f(A)|f_Y(A)) = 0: "
                       "f must factor through f_Y"});
      }
    }
  }
  return out;
}

std::vector<Violation> validate(const ChannelActionProblem& p) {
  std::vector<Violation> out;
  if (p.state_channel.inputs().size() != 1) {
    out.push_back({"state_channel", "input must be exactly (A)"});
  }
  const auto& tin = p.transmission_channel.inputs();
  if (tin.size() != 3 || tin[1].name() != p.s_alphabet().name() ||
      tin[1].size() != p.s_alphabet().size() ||
      tin[2].name() != p.a_alphabet().name() ||
      tin[2].size() != p.a_alphabet().size()) {
    out.push_back({"transmission_channel", "inputs must be exactly (X, S, A)"});
  }
  if (p.action_map.domain().size() != 1 ||
      p.action_map.domain()[0] != p.a_alphabet()) {
    out.push_back({"action_map", "domain must be the action alphabet A"});
  }
  check_matrix(out, p.cost, p.a_alphabet().size(), p.x_alphabet().size(),
               "cost");
  return out;
}

std::vector<Violation> validate(const ProbingProblem& p) {
  std::vector<Violation> out;
  if (!(p.epsilon >= 0.0 && p.epsilon <= 1.0)) {
    out.push_back({"epsilon", "must lie in [0, 1]"});
  }
  if (!(p.gamma_a_budget >= 0.0)) {
    out.push_back({"gamma_a_budget", "must be non-negative"});
  }
  if (!(p.gamma_x_budget >= 0.0)) {
    out.push_back({"gamma_x_budget", "must be non-negative"});
  }
  return out;
}

SourceActionProblem zs_example(double delta, ObservationMode mode) {
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw std::invalid_argument("zs_example: delta must lie in [0, 1]");
  }
  Alphabet x = Alphabet::indexed("X", 2);
  Alphabet y = Alphabet::indexed("Y", 2);
  Alphabet a = Alphabet::indexed("A", 2);

  // Row-major over (x, a), output y.
  // A = 0: Z-channel (0 -> 0 surely, 1 flips to 0 with probability delta).
  // A = 1: S-channel (1 -> 1 surely, 0 flips to 1 with probability delta).
  std::vector<double> table = {
      // x = 0, a = 0: p(y=0)=1
      1.0, 0.0,
      // x = 0, a = 1: flips to 1 with delta
      1.0 - delta, delta,
      // x = 1, a = 0: flips to 0 with delta
      delta, 1.0 - delta,
      // x = 1, a = 1: p(y=1)=1
      0.0, 1.0,
  };
  ConditionalPmf side(y, {x, a}, std::move(table));
  DeterministicMap f = DeterministicMap::identity(a, "B");

  SourceActionProblem p{
      FinitePmf(x, {0.5, 0.5}),
      std::move(side),
      std::move(f),
      Alphabet::indexed("Xhat1", 2),
      Alphabet::indexed("Xhat2", 2),
      Matrix::hamming(2),
      Matrix::hamming(2),
      {0.0, 1.0},
      mode,
      std::nullopt,
  };
  return p;
}

ProbingProblem probing_example(double epsilon, double gamma_a, double gamma_x) {
  ProbingProblem p{epsilon, gamma_a, gamma_x};
  auto violations = validate(p);
  if (!violations.empty()) {
    throw std::invalid_argument("probing_example: " + violations.front().field +
                                ": " + violations.front().message);
  }
  return p;
}

}  // namespace actembed
