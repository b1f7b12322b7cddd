#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "actembed/distribution.hpp"

namespace actembed {

/// Set of axes of a JointDistribution, one bit per axis position.
using AxisMask = std::uint32_t;

/// A dense probability tensor over an ordered list of named axes.
///
/// Axis 0 is the slowest index. Alphabets in scope are tiny, so everything
/// is stored dense and operations are plain passes over the tensor.
class JointDistribution {
 public:
  JointDistribution(std::vector<Alphabet> axes, std::vector<double> mass);

  struct Unchecked {};
  /// Fast path for internally constructed tensors that are valid by
  /// construction; skips the non-negativity / total-mass validation.
  JointDistribution(Unchecked, std::vector<Alphabet> axes,
                    std::vector<double> mass);

  const std::vector<Alphabet>& axes() const { return axes_; }
  std::size_t axis_count() const { return axes_.size(); }
  std::span<const double> mass() const { return mass_; }
  std::size_t size() const { return mass_.size(); }

  /// Position of the axis named `var`; throws if unknown.
  std::size_t axis_index(std::string_view var) const;
  bool has_axis(std::string_view var) const;

  AxisMask mask_of(std::span<const std::string> vars) const;
  AxisMask mask_of(std::initializer_list<std::string_view> vars) const;
  AxisMask all_axes_mask() const;

  double total_mass() const;
  /// Rescaled to total mass exactly 1.
  JointDistribution normalized() const;

 private:
  std::vector<Alphabet> axes_;
  std::vector<double> mass_;
};

/// Shannon entropy of a pmf, in bits, with the 0 log 0 = 0 convention.
double entropy(const FinitePmf& p);
double entropy(std::span<const double> probs);

/// Entropy of the marginal of `j` on the axes selected by `keep`, in bits.
double entropy(const JointDistribution& j, AxisMask keep);
double entropy(const JointDistribution& j, std::span<const std::string> keep);

/// Sum out all axes not in `keep`. Axis order of the result follows the
/// original order. Mass is preserved exactly up to rounding.
JointDistribution marginalize(const JointDistribution& j, AxisMask keep);
JointDistribution marginalize(const JointDistribution& j,
                              std::span<const std::string> keep);

/// I(left; right | given) in bits, computed from entropies. The three sets
/// must be pairwise disjoint. `given` may be empty.
double mutual_information(const JointDistribution& j, AxisMask left,
                          AxisMask right, AxisMask given = 0);
double mutual_information(const JointDistribution& j,
                          std::span<const std::string> left,
                          std::span<const std::string> right,
                          std::span<const std::string> given = {});

/// H(left | given) = H(left, given) - H(given), in bits.
double conditional_entropy(const JointDistribution& j, AxisMask left,
                           AxisMask given);
double conditional_entropy(const JointDistribution& j,
                           std::span<const std::string> left,
                           std::span<const std::string> given);

/// Adjoin a new axis `new_var` carrying map(domain axes), i.e. multiply the
/// tensor by the indicator 1{b = f(a)}. Marginals of existing axes are
/// unchanged.
JointDistribution pushforward(const JointDistribution& j,
                              const DeterministicMap& map,
                              std::string new_var);

using Factor = std::variant<FinitePmf, ConditionalPmf, DeterministicMap>;

/// Multiply an ordered list of factors into the joint distribution over all
/// introduced variables. Each factor must condition only on variables
/// introduced by earlier factors, and must introduce at least one new
/// variable (a DeterministicMap introduces its codomain name).
JointDistribution chain_compose(std::span<const Factor> factors);
JointDistribution chain_compose(std::initializer_list<Factor> factors);

/// Precomputed scatter table: marginalizing `j` onto `keep` amounts to
/// dest[table[i]] += mass[i]. Built once per (tensor shape, mask) and reused
/// across many evaluations of tensors with the same shape.
struct MarginalPlan {
  AxisMask mask = 0;
  std::size_t dest_size = 0;
  std::vector<std::uint32_t> dest_index;

  MarginalPlan() = default;
  MarginalPlan(std::span<const Alphabet> axes, AxisMask keep);

  void accumulate(std::span<const double> mass, std::span<double> dest) const;
  double entropy_of(std::span<const double> mass,
                    std::vector<double>& scratch) const;
};

}  // namespace actembed
