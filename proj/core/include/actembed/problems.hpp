#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "actembed/distribution.hpp"

namespace actembed {

/// How the action-observing decoder sees f(A): the whole sequence up front,
/// only past symbols, past and present, or the encoder-side variants where
/// actions are taken at the encoder.
enum class ObservationMode {
  NonCausal,
  StrictlyCausal,
  Causal,
  EncoderSide,
  EncoderSideDual,
};

std::string to_string(ObservationMode mode);
ObservationMode observation_mode_from_string(const std::string& s);

/// Dense rows x cols matrix of distortions or costs.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> v;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, std::vector<double> data);
  static Matrix hamming(std::size_t n);

  double operator()(std::size_t r, std::size_t c) const {
    return v[r * cols + c];
  }
};

struct Violation {
  std::string field;
  std::string message;
};

/// A lossy source coding instance where actions purchase side information
/// through p(y|x,a) and a second decoder reconstructs from f(A) alone.
struct SourceActionProblem {
  FinitePmf source;             ///< p(x)
  ConditionalPmf side_channel;  ///< p(y|x,a), inputs exactly (X, A)
  DeterministicMap action_map;  ///< f: A -> B
  Alphabet xhat1;
  Alphabet xhat2;
  Matrix d1;  ///< |X| x |Xhat1|
  Matrix d2;  ///< |X| x |Xhat2|
  std::vector<double> action_cost;  ///< Lambda(a), one entry per a
  ObservationMode mode = ObservationMode::NonCausal;
  /// f_Y: A -> Y; required by the encoder-side modes, where the side
  /// information is the deterministic observation Y = f_Y(A).
  std::optional<DeterministicMap> observation_map;

  const Alphabet& x_alphabet() const { return source.alphabet(); }
  const Alphabet& y_alphabet() const { return side_channel.outputs().front(); }
  const Alphabet& a_alphabet() const { return side_channel.inputs().back(); }
  const Alphabet& b_alphabet() const { return action_map.codomain(); }
};

/// A channel coding instance with action-dependent state p(s|a), channel
/// p(y|x,s,a), and a decoder recovering part of the message from f(A).
struct ChannelActionProblem {
  ConditionalPmf state_channel;         ///< p(s|a)
  ConditionalPmf transmission_channel;  ///< p(y|x,s,a), inputs exactly (X,S,A)
  DeterministicMap action_map;          ///< f: A -> B
  Matrix cost;                          ///< gamma(a, x), |A| x |X|

  const Alphabet& a_alphabet() const { return state_channel.inputs().front(); }
  const Alphabet& s_alphabet() const { return state_channel.outputs().front(); }
  const Alphabet& x_alphabet() const {
    return transmission_channel.inputs().front();
  }
  const Alphabet& y_alphabet() const {
    return transmission_channel.outputs().front();
  }
  const Alphabet& b_alphabet() const { return action_map.codomain(); }
};

/// The probing-encoder instance: state S ~ Bern(1 - epsilon), channel
/// noiseless when S = 1 and useless (BSC 1/2) when S = 0; action A = 1
/// reveals S to the encoder at cost, A = 0 leaves it hidden.
struct ProbingProblem {
  double epsilon = 0.0;
  double gamma_a_budget = 1.0;
  double gamma_x_budget = 1.0;
};

/// An evaluated operating point of one of the regions: achieved rate(s),
/// distortions/costs, per-constraint slacks and the optimizing witness.
struct RegionPoint {
  bool feasible = false;
  double rate = 0.0;                ///< R, or the sum rate R1+R2
  std::optional<double> r1;         ///< fixed R1 for the channel regions
  std::optional<double> d1;
  std::optional<double> d2;
  std::optional<double> cost;
  /// Constraint slacks (>= -feas_tol certifies feasibility of the witness).
  std::vector<std::pair<std::string, double>> slack;
  std::vector<double> witness_params;
  std::vector<int> witness_maps;
  std::uint64_t evaluations = 0;
};

std::vector<Violation> validate(const SourceActionProblem& p);
std::vector<Violation> validate(const ChannelActionProblem& p);
std::vector<Violation> validate(const ProbingProblem& p);

/// The binary catalog instance: X ~ Bern(1/2), Hamming distortions,
/// Lambda(a) = a, f(A) = A, and side information observed through a
/// Z-channel under A = 0 and an S-channel under A = 1. delta = 0 makes the
/// side channel noiseless under both actions; delta = 1 makes Y a constant
/// given A (Y = 0 under A = 0, Y = 1 under A = 1), independent of X.
SourceActionProblem zs_example(double delta,
                               ObservationMode mode = ObservationMode::NonCausal);

/// The probing catalog instance packaged for the regions module.
ProbingProblem probing_example(double epsilon, double gamma_a, double gamma_x);

}  // namespace actembed
