#include "actembed/distribution.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace actembed {

namespace {

void check_pmf(std::span<const double> probs, const std::string& what) {
  double total = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) {
      throw std::invalid_argument(what + ": negative or non-finite entry");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kNormalizationTol) {
    throw std::invalid_argument(what + ": mass " + std::to_string(total) +
                                " is not 1 within tolerance");
  }
}

}  // namespace

std::size_t combination_count(std::span<const Alphabet> alphabets) {
  std::size_t n = 1;
  for (const auto& a : alphabets) n *= a.size();
  return n;
}

FinitePmf::FinitePmf(Alphabet alphabet, std::vector<double> probs)
    : alphabet_(std::move(alphabet)), probs_(std::move(probs)) {
  if (probs_.size() != alphabet_.size()) {
    throw std::invalid_argument("pmf over '" + alphabet_.name() +
                                "' has wrong length");
  }
  check_pmf(probs_, "pmf over '" + alphabet_.name() + "'");
}

ConditionalPmf::ConditionalPmf(std::vector<Alphabet> outputs,
                               std::vector<Alphabet> inputs,
                               std::vector<double> table)
    : outputs_(std::move(outputs)),
      inputs_(std::move(inputs)),
      table_(std::move(table)) {
  if (outputs_.empty()) {
    throw std::invalid_argument("conditional pmf needs at least one output");
  }
  rows_ = combination_count(inputs_);
  row_size_ = combination_count(outputs_);
  if (table_.size() != rows_ * row_size_) {
    throw std::invalid_argument("conditional pmf table has wrong size");
  }
  for (std::size_t r = 0; r < rows_; ++r) {
    check_pmf(row(r), "conditional pmf row " + std::to_string(r));
  }
}

ConditionalPmf::ConditionalPmf(Alphabet output, std::vector<Alphabet> inputs,
                               std::vector<double> table)
    : ConditionalPmf(std::vector<Alphabet>{std::move(output)},
                     std::move(inputs), std::move(table)) {}

std::span<const double> ConditionalPmf::row(std::size_t flat_input) const {
  return std::span<const double>(table_).subspan(flat_input * row_size_,
                                                 row_size_);
}

DeterministicMap::DeterministicMap(std::vector<Alphabet> domain,
                                   Alphabet codomain,
                                   std::vector<std::size_t> table)
    : domain_(std::move(domain)),
      codomain_(std::move(codomain)),
      table_(std::move(table)) {
  if (table_.size() != combination_count(domain_)) {
    throw std::invalid_argument("map into '" + codomain_.name() +
                                "' is not total: wrong table size");
  }
  for (std::size_t img : table_) {
    if (img >= codomain_.size()) {
      throw std::invalid_argument("map into '" + codomain_.name() +
                                  "' has out-of-range image");
    }
  }
}

DeterministicMap DeterministicMap::from_symbols(
    std::vector<Alphabet> domain, Alphabet codomain,
    const std::vector<std::string>& images) {
  std::vector<std::size_t> table;
  table.reserve(images.size());
  for (const auto& s : images) table.push_back(codomain.index_of(s));
  return DeterministicMap(std::move(domain), std::move(codomain),
                          std::move(table));
}

DeterministicMap DeterministicMap::identity(const Alphabet& a,
                                            std::string codomain_name) {
  Alphabet codomain(std::move(codomain_name), a.symbols());
  std::vector<std::size_t> table(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) table[i] = i;
  return DeterministicMap({a}, std::move(codomain), std::move(table));
}

DeterministicMap DeterministicMap::constant(std::vector<Alphabet> domain,
                                            Alphabet codomain,
                                            std::size_t image) {
  std::vector<std::size_t> table(combination_count(domain), image);
  return DeterministicMap(std::move(domain), std::move(codomain),
                          std::move(table));
}

bool factors_through(const DeterministicMap& g, const DeterministicMap& f) {
  if (g.domain() != f.domain()) {
    throw std::invalid_argument("factors_through: maps have different domains");
  }
  const std::size_t n = g.table().size();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (f.apply(a) == f.apply(b) && g.apply(a) != g.apply(b)) return false;
    }
  }
  return true;
}

}  // namespace actembed
