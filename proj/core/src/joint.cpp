#include "actembed/joint.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace actembed {

namespace {

std::vector<std::size_t> axis_strides(std::span<const Alphabet> axes) {
  std::vector<std::size_t> strides(axes.size(), 1);
  for (std::size_t i = axes.size(); i-- > 1;) {
    strides[i - 1] = strides[i] * axes[i].size();
  }
  return strides;
}

void check_disjoint(AxisMask a, AxisMask b, const char* what) {
  if ((a & b) != 0) {
    throw std::invalid_argument(std::string("overlapping variable sets in ") +
                                what);
  }
}

}  // namespace

JointDistribution::JointDistribution(std::vector<Alphabet> axes,
                                     std::vector<double> mass)
    : axes_(std::move(axes)), mass_(std::move(mass)) {
  if (axes_.size() > 31) {
    throw std::invalid_argument("too many axes for a joint distribution");
  }
  std::unordered_set<std::string_view> names;
  for (const auto& a : axes_) {
    if (!names.insert(a.name()).second) {
      throw std::invalid_argument("duplicate axis name '" + a.name() + "'");
    }
  }
  if (mass_.size() != combination_count(axes_)) {
    throw std::invalid_argument("joint tensor has wrong size");
  }
  double total = 0.0;
  for (double p : mass_) {
    if (!std::isfinite(p) || p < 0.0) {
      throw std::invalid_argument("joint tensor has negative or non-finite entry");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kNormalizationTol) {
    throw std::invalid_argument("joint tensor mass " + std::to_string(total) +
                                " is not 1 within tolerance");
  }
}

JointDistribution::JointDistribution(Unchecked, std::vector<Alphabet> axes,
                                     std::vector<double> mass)
    : axes_(std::move(axes)), mass_(std::move(mass)) {}

std::size_t JointDistribution::axis_index(std::string_view var) const {
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (axes_[i].name() == var) return i;
  }
  throw std::invalid_argument("joint distribution has no axis '" +
                              std::string(var) + "'");
}

bool JointDistribution::has_axis(std::string_view var) const {
  for (const auto& a : axes_) {
    if (a.name() == var) return true;
  }
  return false;
}

AxisMask JointDistribution::mask_of(std::span<const std::string> vars) const {
  AxisMask m = 0;
  for (const auto& v : vars) m |= AxisMask{1} << axis_index(v);
  return m;
}

AxisMask JointDistribution::mask_of(
    std::initializer_list<std::string_view> vars) const {
  AxisMask m = 0;
  for (auto v : vars) m |= AxisMask{1} << axis_index(v);
  return m;
}

AxisMask JointDistribution::all_axes_mask() const {
  return (AxisMask{1} << axes_.size()) - 1;
}

double JointDistribution::total_mass() const {
  double total = 0.0;
  for (double p : mass_) total += p;
  return total;
}

JointDistribution JointDistribution::normalized() const {
  const double total = total_mass();
  if (total <= 0.0) {
    throw std::runtime_error("cannot normalize a zero-mass tensor");
  }
  std::vector<double> scaled(mass_.size());
  for (std::size_t i = 0; i < mass_.size(); ++i) scaled[i] = mass_[i] / total;
  return JointDistribution(Unchecked{}, axes_, std::move(scaled));
}

double entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

double entropy(const FinitePmf& p) { return entropy(p.probs()); }

MarginalPlan::MarginalPlan(std::span<const Alphabet> axes, AxisMask keep)
    : mask(keep) {
  const std::size_t n_axes = axes.size();
  const auto strides = axis_strides(axes);

  dest_size = 1;
  std::vector<std::size_t> dest_strides(n_axes, 0);
  for (std::size_t i = n_axes; i-- > 0;) {
    if (keep & (AxisMask{1} << i)) {
      dest_strides[i] = dest_size;
      dest_size *= axes[i].size();
    }
  }

  std::size_t total = 1;
  for (const auto& a : axes) total *= a.size();
  dest_index.resize(total);

  std::vector<std::size_t> digits(n_axes, 0);
  std::size_t dest = 0;
  for (std::size_t flat = 0; flat < total; ++flat) {
    dest_index[flat] = static_cast<std::uint32_t>(dest);
    // odometer increment, updating the destination index incrementally
    for (std::size_t i = n_axes; i-- > 0;) {
      digits[i]++;
      dest += dest_strides[i];
      if (digits[i] < axes[i].size()) break;
      dest -= dest_strides[i] * axes[i].size();
      digits[i] = 0;
    }
  }
  (void)strides;
}

void MarginalPlan::accumulate(std::span<const double> mass,
                              std::span<double> dest) const {
  std::fill(dest.begin(), dest.end(), 0.0);
  for (std::size_t i = 0; i < mass.size(); ++i) {
    dest[dest_index[i]] += mass[i];
  }
}

double MarginalPlan::entropy_of(std::span<const double> mass,
                                std::vector<double>& scratch) const {
  scratch.assign(dest_size, 0.0);
  for (std::size_t i = 0; i < mass.size(); ++i) {
    scratch[dest_index[i]] += mass[i];
  }
  return entropy(std::span<const double>(scratch));
}

JointDistribution marginalize(const JointDistribution& j, AxisMask keep) {
  if (keep == 0) {
    throw std::invalid_argument("marginalize: empty variable set");
  }
  if ((keep & ~j.all_axes_mask()) != 0) {
    throw std::invalid_argument("marginalize: mask names unknown axes");
  }
  MarginalPlan plan(j.axes(), keep);
  std::vector<double> dest(plan.dest_size, 0.0);
  plan.accumulate(j.mass(), dest);
  std::vector<Alphabet> kept;
  for (std::size_t i = 0; i < j.axis_count(); ++i) {
    if (keep & (AxisMask{1} << i)) kept.push_back(j.axes()[i]);
  }
  return JointDistribution(JointDistribution::Unchecked{}, std::move(kept),
                           std::move(dest));
}

JointDistribution marginalize(const JointDistribution& j,
                              std::span<const std::string> keep) {
  return marginalize(j, j.mask_of(keep));
}

double entropy(const JointDistribution& j, AxisMask keep) {
  if (keep == j.all_axes_mask()) return entropy(j.mass());
  MarginalPlan plan(j.axes(), keep);
  std::vector<double> scratch;
  return plan.entropy_of(j.mass(), scratch);
}

double entropy(const JointDistribution& j, std::span<const std::string> keep) {
  return entropy(j, j.mask_of(keep));
}

double mutual_information(const JointDistribution& j, AxisMask left,
                          AxisMask right, AxisMask given) {
  check_disjoint(left, right, "mutual_information");
  check_disjoint(left, given, "mutual_information");
  check_disjoint(right, given, "mutual_information");
  if (left == 0 || right == 0) {
    throw std::invalid_argument("mutual_information: empty variable set");
  }
  // I(L;R|G) = H(L,G) + H(R,G) - H(L,R,G) - H(G)
  const double h_lg = entropy(j, left | given);
  const double h_rg = entropy(j, right | given);
  const double h_lrg = entropy(j, left | right | given);
  const double h_g = given ? entropy(j, given) : 0.0;
  return h_lg + h_rg - h_lrg - h_g;
}

double mutual_information(const JointDistribution& j,
                          std::span<const std::string> left,
                          std::span<const std::string> right,
                          std::span<const std::string> given) {
  return mutual_information(j, j.mask_of(left), j.mask_of(right),
                            j.mask_of(given));
}

double conditional_entropy(const JointDistribution& j, AxisMask left,
                           AxisMask given) {
  check_disjoint(left, given, "conditional_entropy");
  if (left == 0) {
    throw std::invalid_argument("conditional_entropy: empty variable set");
  }
  const double h_lg = entropy(j, left | given);
  const double h_g = given ? entropy(j, given) : 0.0;
  return h_lg - h_g;
}

double conditional_entropy(const JointDistribution& j,
                           std::span<const std::string> left,
                           std::span<const std::string> given) {
  return conditional_entropy(j, j.mask_of(left), j.mask_of(given));
}

JointDistribution pushforward(const JointDistribution& j,
                              const DeterministicMap& map,
                              std::string new_var) {
  if (j.has_axis(new_var)) {
    throw std::invalid_argument("pushforward: axis '" + new_var +
                                "' already present");
  }
  const auto& axes = j.axes();
  // locate the map's domain axes in the joint
  std::vector<std::size_t> dom_axes;
  dom_axes.reserve(map.domain().size());
  for (const auto& d : map.domain()) dom_axes.push_back(j.axis_index(d.name()));

  const std::size_t b_size = map.codomain().size();
  std::vector<Alphabet> new_axes = axes;
  Alphabet b_alpha(std::move(new_var), map.codomain().symbols());
  new_axes.push_back(std::move(b_alpha));

  std::vector<double> out(j.size() * b_size, 0.0);
  std::vector<std::size_t> digits(axes.size(), 0);
  for (std::size_t flat = 0; flat < j.size(); ++flat) {
    std::size_t dom_flat = 0;
    for (std::size_t k = 0; k < dom_axes.size(); ++k) {
      dom_flat = dom_flat * map.domain()[k].size() + digits[dom_axes[k]];
    }
    out[flat * b_size + map.apply(dom_flat)] = j.mass()[flat];
    for (std::size_t i = axes.size(); i-- > 0;) {
      if (++digits[i] < axes[i].size()) break;
      digits[i] = 0;
    }
  }
  return JointDistribution(JointDistribution::Unchecked{}, std::move(new_axes),
                           std::move(out));
}

JointDistribution chain_compose(std::span<const Factor> factors) {
  if (factors.empty()) {
    throw std::invalid_argument("chain_compose: no factors");
  }
  std::vector<Alphabet> axes;
  std::vector<double> mass{1.0};

  auto find_axis = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < axes.size(); ++i) {
      if (axes[i].name() == name) return i;
    }
    throw std::invalid_argument("chain_compose: factor conditions on '" + name +
                                "' before it is introduced");
  };
  auto check_new = [&](const std::string& name) {
    for (const auto& a : axes) {
      if (a.name() == name) {
        throw std::invalid_argument("chain_compose: variable '" + name +
                                    "' introduced twice");
      }
    }
  };

  // Extends the tensor by the given factor. `cond_axes` indexes existing
  // axes, `new_alphas` are appended in order; `value(cond_flat, out_flat)`
  // returns the factor entry.
  auto extend = [&](std::span<const std::size_t> cond_axes,
                    std::span<const Alphabet> cond_alphas,
                    std::vector<Alphabet> new_alphas, auto&& value) {
    std::size_t out_size = 1;
    for (const auto& a : new_alphas) out_size *= a.size();
    std::vector<double> next(mass.size() * out_size);
    std::vector<std::size_t> digits(axes.size(), 0);
    for (std::size_t flat = 0; flat < mass.size(); ++flat) {
      std::size_t cond_flat = 0;
      for (std::size_t k = 0; k < cond_axes.size(); ++k) {
        cond_flat = cond_flat * cond_alphas[k].size() + digits[cond_axes[k]];
      }
      const double base = mass[flat];
      for (std::size_t o = 0; o < out_size; ++o) {
        next[flat * out_size + o] = base * value(cond_flat, o);
      }
      for (std::size_t i = axes.size(); i-- > 0;) {
        if (++digits[i] < axes[i].size()) break;
        digits[i] = 0;
      }
    }
    for (auto& a : new_alphas) axes.push_back(std::move(a));
    mass = std::move(next);
  };

  for (const auto& factor : factors) {
    if (const auto* pmf = std::get_if<FinitePmf>(&factor)) {
      check_new(pmf->alphabet().name());
      extend({}, {}, {pmf->alphabet()},
             [&](std::size_t, std::size_t o) { return (*pmf)[o]; });
    } else if (const auto* cond = std::get_if<ConditionalPmf>(&factor)) {
      std::vector<std::size_t> cond_axes;
      for (const auto& in : cond->inputs()) {
        cond_axes.push_back(find_axis(in.name()));
      }
      for (const auto& out : cond->outputs()) check_new(out.name());
      extend(cond_axes, cond->inputs(), cond->outputs(),
             [&](std::size_t c, std::size_t o) { return cond->row(c)[o]; });
    } else {
      const auto& map = std::get<DeterministicMap>(factor);
      std::vector<std::size_t> cond_axes;
      for (const auto& in : map.domain()) {
        cond_axes.push_back(find_axis(in.name()));
      }
      check_new(map.codomain().name());
      extend(cond_axes, map.domain(), {map.codomain()},
             [&](std::size_t c, std::size_t o) {
               return map.apply(c) == o ? 1.0 : 0.0;
             });
    }
  }
  return JointDistribution(JointDistribution::Unchecked{}, std::move(axes),
                           std::move(mass));
}

JointDistribution chain_compose(std::initializer_list<Factor> factors) {
  return chain_compose(std::span<const Factor>(factors.begin(), factors.size()));
}

}  // namespace actembed
