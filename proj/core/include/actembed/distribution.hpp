#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "actembed/alphabet.hpp"

namespace actembed {

/// Tolerance used when validating that probability masses sum to one.
inline constexpr double kNormalizationTol = 1e-9;

/// Number of joint symbol combinations of a list of alphabets.
std::size_t combination_count(std::span<const Alphabet> alphabets);

/// A probability mass function over a single finite alphabet.
class FinitePmf {
 public:
  FinitePmf(Alphabet alphabet, std::vector<double> probs);

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }

 private:
  Alphabet alphabet_;
  std::vector<double> probs_;
};

/// A conditional distribution p(outputs | inputs) over finite alphabets.
///
/// The table is row-major: input combinations are the slow axes (in the
/// order given by `inputs`), output combinations the fast axes. Each row
/// (one input combination) must be a valid pmf over the output combinations.
class ConditionalPmf {
 public:
  ConditionalPmf(std::vector<Alphabet> outputs, std::vector<Alphabet> inputs,
                 std::vector<double> table);
  /// Single-output convenience.
  ConditionalPmf(Alphabet output, std::vector<Alphabet> inputs,
                 std::vector<double> table);

  const std::vector<Alphabet>& outputs() const { return outputs_; }
  const std::vector<Alphabet>& inputs() const { return inputs_; }
  std::size_t row_count() const { return rows_; }
  std::size_t row_size() const { return row_size_; }
  std::span<const double> row(std::size_t flat_input) const;
  std::span<const double> table() const { return table_; }

 private:
  std::vector<Alphabet> outputs_;
  std::vector<Alphabet> inputs_;
  std::vector<double> table_;
  std::size_t rows_ = 0;
  std::size_t row_size_ = 0;
};

/// A total function from a product of finite alphabets to a finite alphabet,
/// stored as one codomain index per flat domain combination.
class DeterministicMap {
 public:
  DeterministicMap(std::vector<Alphabet> domain, Alphabet codomain,
                   std::vector<std::size_t> table);

  /// Build from symbol labels instead of indices.
  static DeterministicMap from_symbols(std::vector<Alphabet> domain,
                                       Alphabet codomain,
                                       const std::vector<std::string>& images);

  static DeterministicMap identity(const Alphabet& a, std::string codomain_name);
  static DeterministicMap constant(std::vector<Alphabet> domain,
                                   Alphabet codomain, std::size_t image);

  const std::vector<Alphabet>& domain() const { return domain_; }
  const Alphabet& codomain() const { return codomain_; }
  std::size_t apply(std::size_t flat_domain) const { return table_[flat_domain]; }
  std::span<const std::size_t> table() const { return table_; }

 private:
  std::vector<Alphabet> domain_;
  Alphabet codomain_;
  std::vector<std::size_t> table_;
};

/// True iff g factors through f on a common domain alphabet: whenever
/// f(a) = f(a'), also g(a) = g(a'). Both maps must share the same domain.
bool factors_through(const DeterministicMap& g, const DeterministicMap& f);

}  // namespace actembed
