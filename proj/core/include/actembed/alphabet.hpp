#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace actembed {

/// A named finite alphabet with a fixed symbol ordering.
///
/// Indexing is positional and observable: tensors, pmf rows and map tables
/// all refer to symbols by their position in this ordering.
class Alphabet {
 public:
  Alphabet(std::string name, std::vector<std::string> symbols);

  /// Convenience: symbols "0", "1", ..., "n-1".
  static Alphabet indexed(std::string name, std::size_t n);

  const std::string& name() const { return name_; }
  std::size_t size() const { return symbols_.size(); }
  const std::string& symbol(std::size_t i) const { return symbols_.at(i); }
  const std::vector<std::string>& symbols() const { return symbols_; }

  /// Position of `symbol`; throws std::invalid_argument if unknown.
  std::size_t index_of(std::string_view symbol) const;

  bool operator==(const Alphabet& other) const = default;

 private:
  std::string name_;
  std::vector<std::string> symbols_;
};

}  // namespace actembed
