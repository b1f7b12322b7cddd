#include "actembed/alphabet.hpp"

#include <stdexcept>
#include <unordered_set>

namespace actembed {

Alphabet::Alphabet(std::string name, std::vector<std::string> symbols)
    : name_(std::move(name)), symbols_(std::move(symbols)) {
  if (symbols_.empty()) {
    throw std::invalid_argument("alphabet '" + name_ + "' has no symbols");
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& s : symbols_) {
    if (!seen.insert(s).second) {
      throw std::invalid_argument("alphabet '" + name_ +
                                  "' has duplicate symbol '" + s + "'");
    }
  }
}

Alphabet Alphabet::indexed(std::string name, std::size_t n) {
  std::vector<std::string> symbols;
  symbols.reserve(n);
  for (std::size_t i = 0; i < n; ++i) symbols.push_back(std::to_string(i));
  return Alphabet(std::move(name), std::move(symbols));
}

std::size_t Alphabet::index_of(std::string_view symbol) const {
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i] == symbol) return i;
  }
  throw std::invalid_argument("alphabet '" + name_ + "' has no symbol '" +
                              std::string(symbol) + "'");
}

}  // namespace actembed
