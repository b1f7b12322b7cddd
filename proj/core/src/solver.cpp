#include "actembed/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

namespace actembed {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxRefinedCombos = 64;

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > std::numeric_limits<std::uint64_t>::max() / b) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return a * b;
}

std::uint64_t saturating_pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) r = saturating_mul(r, base);
  return r;
}

bool lex_less(std::span<const double> a, std::span<const double> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

bool lex_less_int(std::span<const int> a, std::span<const int> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

/// Best-so-far holder with a total order: smaller value wins, ties resolve
/// toward the lexicographically smaller parameter vector, then map tables.
/// This makes the reduction order-independent and hence thread-count
/// independent.
struct Best {
  bool has = false;
  double value = kInf;
  std::vector<double> params;
  std::vector<int> maps;

  void consider(double v, std::span<const double> p, std::span<const int> m) {
    if (has) {
      if (v > value) return;
      if (v == value) {
        const bool p_less = lex_less(p, params);
        if (!p_less) {
          if (lex_less(std::span<const double>(params), p)) return;
          if (!lex_less_int(m, maps)) return;
        }
      }
    }
    has = true;
    value = v;
    params.assign(p.begin(), p.end());
    maps.assign(m.begin(), m.end());
  }

  void merge(const Best& other) {
    if (other.has) consider(other.value, other.params, other.maps);
  }
};

double max_violation(const std::vector<double>& constraints) {
  double v = 0.0;
  for (double c : constraints) v = std::max(v, c);
  return v;
}

double uniform01(std::mt19937_64& rng) {
  // 53-bit mantissa draw; avoids implementation-defined distributions
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

template <class Fn>
void parallel_chunks(std::uint64_t n, int threads, Fn&& fn) {
  const int workers =
      static_cast<int>(std::min<std::uint64_t>(std::max(threads, 1), n));
  if (workers <= 1) {
    if (n > 0) fn(0, std::uint64_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  const std::uint64_t chunk = (n + workers - 1) / workers;
  for (int t = 0; t < workers; ++t) {
    const std::uint64_t begin = chunk * t;
    const std::uint64_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, t, begin, end] {
      try {
        fn(t, begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

int SolverConfig::cardinality(const std::string& name, int bound) const {
  auto it = aux_cardinalities.find(name);
  if (it == aux_cardinalities.end()) return bound;
  if (it->second < 1) {
    throw std::invalid_argument("cardinality for '" + name +
                                "' must be at least 1");
  }
  if (it->second > bound) {
    throw std::invalid_argument("cardinality " + std::to_string(it->second) +
                                " for '" + name + "' exceeds the bound " +
                                std::to_string(bound));
  }
  return it->second;
}

SimplexGrid::SimplexGrid(int dim, int resolution)
    : dim_(dim), resolution_(resolution) {
  if (dim < 1 || resolution < 1) {
    throw std::invalid_argument("simplex grid needs dim >= 1, resolution >= 1");
  }
  const int n = resolution + dim;
  binom_.assign(n + 1, std::vector<std::uint64_t>(n + 1, 0));
  for (int i = 0; i <= n; ++i) {
    binom_[i][0] = 1;
    for (int k = 1; k <= i; ++k) {
      std::uint64_t a = binom_[i - 1][k - 1];
      std::uint64_t b = (k <= i - 1) ? binom_[i - 1][k] : 0;
      std::uint64_t s = a + b;
      if (s < a) s = std::numeric_limits<std::uint64_t>::max();
      binom_[i][k] = s;
    }
  }
  size_ = binom_[resolution + dim - 1][dim - 1];
}

std::uint64_t SimplexGrid::count(int dim, int resolution) {
  // C(resolution + dim - 1, dim - 1), saturating
  std::uint64_t r = 1;
  const int k = dim - 1;
  for (int i = 1; i <= k; ++i) {
    r = saturating_mul(r, static_cast<std::uint64_t>(resolution + i));
    r /= static_cast<std::uint64_t>(i);
  }
  return r;
}

void SimplexGrid::point(std::uint64_t index, std::span<double> out) const {
  int remaining = resolution_;
  for (int i = 0; i < dim_ - 1; ++i) {
    const int parts_left = dim_ - 1 - i;
    int c = 0;
    for (;; ++c) {
      // completions with first count c: compositions of remaining - c into
      // parts_left parts
      const std::uint64_t completions =
          binom_[(remaining - c) + parts_left - 1][parts_left - 1];
      if (index < completions) break;
      index -= completions;
    }
    out[i] = static_cast<double>(c) / resolution_;
    remaining -= c;
  }
  out[dim_ - 1] = static_cast<double>(remaining) / resolution_;
}

std::vector<double> project_to_simplex(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  project_to_simplex_inplace(out);
  return out;
}

void project_to_simplex_inplace(std::span<double> v) {
  const std::size_t n = v.size();
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  // theta of the largest valid pivot k: u_k > (sum_{i<=k} u_i - 1) / k
  double cumsum = 0.0;
  double theta = sorted[0] - 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    cumsum += sorted[k];
    const double t = (cumsum - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - t > 0.0) theta = t;
  }
  double total = 0.0;
  for (auto& x : v) {
    x = std::max(0.0, x - theta);
    total += x;
  }
  if (total <= 0.0) {
    std::fill(v.begin(), v.end(), 1.0 / static_cast<double>(n));
  } else if (std::abs(total - 1.0) > 1e-13) {
    for (auto& x : v) x /= total;
  }
}

DeterministicMap bayes_estimator(const JointDistribution& j,
                                 const std::string& source_var,
                                 std::span<const std::string> observed,
                                 const Alphabet& target,
                                 std::span<const double> distortion) {
  const AxisMask src_mask = j.mask_of({{source_var}});
  AxisMask obs_mask = j.mask_of(observed);
  if (src_mask & obs_mask) {
    throw std::invalid_argument("bayes_estimator: source among observations");
  }
  JointDistribution m = marginalize(j, src_mask | obs_mask);

  const std::size_t src_axis = m.axis_index(source_var);
  const std::size_t x_size = m.axes()[src_axis].size();
  if (distortion.size() != x_size * target.size()) {
    throw std::invalid_argument("bayes_estimator: distortion matrix shape");
  }

  // Reorder into p[x][obs_flat] with observed axes in their original order.
  std::size_t obs_size = 1;
  std::vector<Alphabet> obs_alphas;
  for (std::size_t i = 0; i < m.axis_count(); ++i) {
    if (i != src_axis) {
      obs_size *= m.axes()[i].size();
      obs_alphas.push_back(m.axes()[i]);
    }
  }
  std::vector<double> p(x_size * obs_size, 0.0);
  std::vector<std::size_t> digits(m.axis_count(), 0);
  for (std::size_t flat = 0; flat < m.size(); ++flat) {
    std::size_t x = digits[src_axis];
    std::size_t obs = 0;
    for (std::size_t i = 0; i < m.axis_count(); ++i) {
      if (i != src_axis) obs = obs * m.axes()[i].size() + digits[i];
    }
    p[x * obs_size + obs] = m.mass()[flat];
    for (std::size_t i = m.axis_count(); i-- > 0;) {
      if (++digits[i] < m.axes()[i].size()) break;
      digits[i] = 0;
    }
  }

  std::vector<std::size_t> table(obs_size, 0);
  for (std::size_t obs = 0; obs < obs_size; ++obs) {
    double best_cost = kInf;
    std::size_t best_t = 0;
    bool any_mass = false;
    for (std::size_t x = 0; x < x_size; ++x) {
      if (p[x * obs_size + obs] > 0.0) any_mass = true;
    }
    if (!any_mass) {
      table[obs] = 0;
      continue;
    }
    for (std::size_t t = 0; t < target.size(); ++t) {
      double cost = 0.0;
      for (std::size_t x = 0; x < x_size; ++x) {
        cost += p[x * obs_size + obs] * distortion[x * target.size() + t];
      }
      if (cost < best_cost) {
        best_cost = cost;
        best_t = t;
      }
    }
    table[obs] = best_t;
  }
  return DeterministicMap(std::move(obs_alphas), target, std::move(table));
}

double bayes_expected_distortion(std::span<const double> xo_marginal,
                                 std::size_t source_size,
                                 std::span<const double> distortion,
                                 std::size_t target_size) {
  const std::size_t obs_size = xo_marginal.size() / source_size;
  double total = 0.0;
  for (std::size_t obs = 0; obs < obs_size; ++obs) {
    double best = kInf;
    for (std::size_t t = 0; t < target_size; ++t) {
      double cost = 0.0;
      for (std::size_t x = 0; x < source_size; ++x) {
        cost += xo_marginal[x * obs_size + obs] * distortion[x * target_size + t];
      }
      best = std::min(best, cost);
    }
    total += best;
  }
  return total;
}

namespace {

struct MapLayout {
  std::vector<std::size_t> offsets;  // into the flat map-table vector
  std::size_t total_entries = 0;
  std::uint64_t combos = 1;
};

MapLayout layout_maps(const std::vector<MapSpaceSpec>& spaces) {
  MapLayout l;
  for (const auto& s : spaces) {
    if (s.domain_size < 1 || s.codomain_size < 1) {
      throw std::invalid_argument("map space '" + s.name + "' is empty");
    }
    l.offsets.push_back(l.total_entries);
    l.total_entries += static_cast<std::size_t>(s.domain_size);
    l.combos = saturating_mul(
        l.combos, saturating_pow(static_cast<std::uint64_t>(s.codomain_size),
                                 static_cast<std::uint64_t>(s.domain_size)));
  }
  if (l.combos > 1'000'000) {
    throw std::invalid_argument("enumerated map space is too large");
  }
  return l;
}

void unrank_maps(const std::vector<MapSpaceSpec>& spaces, const MapLayout& l,
                 std::uint64_t combo, std::span<int> tables) {
  for (std::size_t s = 0; s < spaces.size(); ++s) {
    const auto& spec = spaces[s];
    for (int e = spec.domain_size - 1; e >= 0; --e) {
      tables[l.offsets[s] + e] =
          static_cast<int>(combo % static_cast<std::uint64_t>(spec.codomain_size));
      combo /= static_cast<std::uint64_t>(spec.codomain_size);
    }
  }
}

struct BlockLayout {
  std::vector<std::size_t> offsets;
  std::size_t total_dim = 0;
};

BlockLayout layout_blocks(const std::vector<SimplexBlockSpec>& blocks) {
  BlockLayout l;
  for (const auto& b : blocks) {
    if (b.dim < 1) {
      throw std::invalid_argument("simplex block '" + b.name + "' is empty");
    }
    l.offsets.push_back(l.total_dim);
    l.total_dim += static_cast<std::size_t>(b.dim);
  }
  return l;
}

void project_blocks(const std::vector<SimplexBlockSpec>& blocks,
                    const BlockLayout& layout, std::span<double> params) {
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    project_to_simplex_inplace(
        params.subspan(layout.offsets[b], static_cast<std::size_t>(blocks[b].dim)));
  }
}

}  // namespace

SearchOutcome minimize_constrained(const SearchProblem& problem,
                                   const SolverConfig& config, Sense sense,
                                   std::span<const WarmStart> warm_starts) {
  if (!problem.evaluate) {
    throw std::invalid_argument("search problem has no evaluator");
  }
  const BlockLayout blocks = layout_blocks(problem.blocks);
  const MapLayout maps = layout_maps(problem.map_spaces);
  const double sign = (sense == Sense::Minimize) ? 1.0 : -1.0;

  // --- grid stage resolution: largest r that fits the evaluation budget ---
  int eff_res = 1;
  for (int r = config.grid_resolution; r >= 1; --r) {
    std::uint64_t total = maps.combos;
    for (const auto& b : problem.blocks) {
      total = saturating_mul(total, SimplexGrid::count(b.dim, r));
    }
    if (total <= config.max_grid_evals || r == 1) {
      eff_res = r;
      break;
    }
  }

  std::vector<SimplexGrid> grids;
  grids.reserve(problem.blocks.size());
  std::uint64_t grid_total = 1;
  for (const auto& b : problem.blocks) {
    grids.emplace_back(b.dim, eff_res);
    grid_total = saturating_mul(grid_total, grids.back().size());
  }
  const std::uint64_t n_grid_evals = saturating_mul(grid_total, maps.combos);

  const std::size_t n_refine_combos =
      static_cast<std::size_t>(std::min<std::uint64_t>(maps.combos, kMaxRefinedCombos));

  struct ComboSeed {
    Best feasible;
    // least-infeasible fallback for feasibility recovery
    bool has_fallback = false;
    double violation = kInf;
    double fallback_obj = kInf;
    std::vector<double> fallback_params;
    std::vector<int> fallback_maps;

    void consider_fallback(double viol, double obj, std::span<const double> p,
                           std::span<const int> m) {
      if (has_fallback) {
        if (viol > violation) return;
        if (viol == violation) {
          if (obj > fallback_obj) return;
          if (obj == fallback_obj &&
              !lex_less(p, fallback_params)) {
            return;
          }
        }
      }
      has_fallback = true;
      violation = viol;
      fallback_obj = obj;
      fallback_params.assign(p.begin(), p.end());
      fallback_maps.assign(m.begin(), m.end());
    }

    void merge(const ComboSeed& o) {
      feasible.merge(o.feasible);
      if (o.has_fallback) {
        consider_fallback(o.violation, o.fallback_obj, o.fallback_params,
                          o.fallback_maps);
      }
    }
  };

  const int workers = std::max(config.threads, 1);
  std::vector<Best> thread_best(workers);
  std::vector<std::vector<ComboSeed>> thread_seeds(
      workers, std::vector<ComboSeed>(n_refine_combos));
  std::vector<std::uint64_t> thread_evals(workers, 0);

  parallel_chunks(n_grid_evals, workers, [&](int t, std::uint64_t begin,
                                             std::uint64_t end) {
    std::vector<double> params(blocks.total_dim);
    std::vector<int> tables(maps.total_entries);
    for (std::uint64_t idx = begin; idx < end; ++idx) {
      const std::uint64_t combo = idx / grid_total;
      std::uint64_t rest = idx % grid_total;
      unrank_maps(problem.map_spaces, maps, combo, tables);
      for (std::size_t b = problem.blocks.size(); b-- > 0;) {
        const std::uint64_t block_idx = rest % grids[b].size();
        rest /= grids[b].size();
        grids[b].point(block_idx,
                       std::span<double>(params).subspan(
                           blocks.offsets[b],
                           static_cast<std::size_t>(problem.blocks[b].dim)));
      }
      EvalResult ev = problem.evaluate(Candidate{params, tables});
      thread_evals[t]++;
      const double v = sign * ev.objective;
      const double viol = max_violation(ev.constraints);
      const std::size_t seed_slot =
          (n_refine_combos > 1) ? static_cast<std::size_t>(combo) : 0;
      if (viol <= config.feas_tol) {
        thread_best[t].consider(v, params, tables);
        if (seed_slot < n_refine_combos) {
          thread_seeds[t][seed_slot].feasible.consider(v, params, tables);
        }
      } else if (seed_slot < n_refine_combos) {
        thread_seeds[t][seed_slot].consider_fallback(viol, v, params, tables);
      }
    }
  });

  Best best;
  std::vector<ComboSeed> seeds(n_refine_combos);
  std::uint64_t evaluations = 0;
  for (int t = 0; t < workers; ++t) {
    best.merge(thread_best[t]);
    for (std::size_t c = 0; c < n_refine_combos; ++c) {
      seeds[c].merge(thread_seeds[t][c]);
    }
    evaluations += thread_evals[t];
  }

  // --- refinement starts ---
  struct Start {
    std::vector<double> params;
    std::vector<int> tables;
  };
  std::vector<Start> starts;
  for (const auto& w : warm_starts) {
    if (w.params.size() != blocks.total_dim ||
        w.map_tables.size() != maps.total_entries) {
      throw std::invalid_argument("warm start has wrong shape");
    }
    Start s{w.params, w.map_tables};
    project_blocks(problem.blocks, blocks, s.params);
    starts.push_back(std::move(s));
  }
  for (std::size_t c = 0; c < n_refine_combos; ++c) {
    const auto& seed = seeds[c];
    if (seed.feasible.has) {
      starts.push_back(Start{seed.feasible.params, seed.feasible.maps});
    } else if (seed.has_fallback) {
      starts.push_back(Start{seed.fallback_params, seed.fallback_maps});
    }
  }
  std::vector<int> combo_tables(maps.total_entries);
  for (int r = 0; r < config.restarts; ++r) {
    std::mt19937_64 rng(mix_seed(config.seed, static_cast<std::uint64_t>(r)));
    Start s;
    s.params.resize(blocks.total_dim);
    for (std::size_t b = 0; b < problem.blocks.size(); ++b) {
      double total = 0.0;
      for (int i = 0; i < problem.blocks[b].dim; ++i) {
        const double e = -std::log(std::max(uniform01(rng), 1e-300));
        s.params[blocks.offsets[b] + static_cast<std::size_t>(i)] = e;
        total += e;
      }
      for (int i = 0; i < problem.blocks[b].dim; ++i) {
        s.params[blocks.offsets[b] + static_cast<std::size_t>(i)] /= total;
      }
    }
    if (maps.combos > 1) {
      const std::uint64_t combo =
          static_cast<std::uint64_t>(r) % maps.combos;
      unrank_maps(problem.map_spaces, maps, combo, combo_tables);
      s.tables = combo_tables;
    } else {
      s.tables.assign(maps.total_entries, 0);
      if (maps.total_entries > 0) {
        unrank_maps(problem.map_spaces, maps, 0, s.tables);
      }
    }
    starts.push_back(std::move(s));
  }

  // --- projected-gradient refinement, parallel over independent starts ---
  std::vector<Best> refine_best(workers);
  std::vector<std::uint64_t> refine_evals(workers, 0);

  parallel_chunks(starts.size(), workers, [&](int t, std::uint64_t begin,
                                              std::uint64_t end) {
    std::vector<double> grad(blocks.total_dim);
    std::vector<double> probe(blocks.total_dim);
    std::vector<double> cand(blocks.total_dim);
    for (std::uint64_t si = begin; si < end; ++si) {
      auto& start = starts[si];
      std::vector<double> x = start.params;
      const std::span<const int> tables(start.tables);

      auto eval_at = [&](std::span<const double> p) {
        refine_evals[t]++;
        return problem.evaluate(Candidate{p, tables});
      };

      EvalResult cur = eval_at(x);
      double cur_viol = max_violation(cur.constraints);
      if (cur_viol <= config.feas_tol) {
        refine_best[t].consider(sign * cur.objective, x, tables);
      }

      int iters_left = config.refine_iters;

      // Phase A: drive the worst constraint violation down to feasibility.
      if (cur_viol > config.feas_tol) {
        double step = 0.25;
        int budget = iters_left / 2;
        while (budget-- > 0 && cur_viol > config.feas_tol && step > 1e-12) {
          iters_left--;
          for (std::size_t i = 0; i < blocks.total_dim; ++i) {
            std::copy(x.begin(), x.end(), probe.begin());
            probe[i] += config.fd_step;
            project_blocks(problem.blocks, blocks, probe);
            EvalResult pe = eval_at(probe);
            const double pv = max_violation(pe.constraints);
            if (pv <= config.feas_tol) {
              refine_best[t].consider(sign * pe.objective, probe, tables);
            }
            grad[i] = (pv - cur_viol) / config.fd_step;
          }
          bool improved = false;
          double trial = step;
          for (int k = 0; k < 4; ++k) {
            for (std::size_t i = 0; i < blocks.total_dim; ++i) {
              cand[i] = x[i] - trial * grad[i];
            }
            project_blocks(problem.blocks, blocks, cand);
            EvalResult ce = eval_at(cand);
            const double cv = max_violation(ce.constraints);
            if (cv <= config.feas_tol) {
              refine_best[t].consider(sign * ce.objective, cand, tables);
            }
            if (cv < cur_viol) {
              x.assign(cand.begin(), cand.end());
              cur = std::move(ce);
              cur_viol = cv;
              step = trial;
              improved = true;
              break;
            }
            trial *= config.step_shrink;
          }
          if (!improved) step = trial * config.step_shrink;
        }
        if (cur_viol > config.feas_tol) continue;  // start unusable
        refine_best[t].consider(sign * cur.objective, x, tables);
      }

      // Phase B: polish the objective, rejecting infeasible moves. The step
      // shrinks on non-improvement and regrows on clean successes. Near an
      // active constraint the raw descent direction mostly points out of the
      // feasible set, so it is deflected along the active-constraint tangent
      // (the probe evaluations carry the constraint gradients for free).
      const std::size_t n_cons = cur.constraints.size();
      std::vector<std::vector<double>> cgrad(
          n_cons, std::vector<double>(blocks.total_dim));
      constexpr double kActivityMargin = 1e-3;
      double f = sign * cur.objective;
      double step = 0.25;
      while (iters_left-- > 0 && step > 1e-12) {
        for (std::size_t i = 0; i < blocks.total_dim; ++i) {
          std::copy(x.begin(), x.end(), probe.begin());
          probe[i] += config.fd_step;
          project_blocks(problem.blocks, blocks, probe);
          EvalResult pe = eval_at(probe);
          const double pf = sign * pe.objective;
          if (max_violation(pe.constraints) <= config.feas_tol) {
            refine_best[t].consider(pf, probe, tables);
          }
          grad[i] = (pf - f) / config.fd_step;
          for (std::size_t j = 0; j < n_cons; ++j) {
            cgrad[j][i] =
                (pe.constraints[j] - cur.constraints[j]) / config.fd_step;
          }
        }
        std::vector<double> dir(blocks.total_dim);
        for (std::size_t i = 0; i < blocks.total_dim; ++i) dir[i] = -grad[i];
        for (int pass = 0; pass < 2; ++pass) {
          for (std::size_t j = 0; j < n_cons; ++j) {
            if (cur.constraints[j] <= -kActivityMargin) continue;
            double dot = 0.0, norm2 = 0.0;
            for (std::size_t i = 0; i < blocks.total_dim; ++i) {
              dot += dir[i] * cgrad[j][i];
              norm2 += cgrad[j][i] * cgrad[j][i];
            }
            if (dot > 0.0 && norm2 > 1e-18) {
              const double scale = dot / norm2;
              for (std::size_t i = 0; i < blocks.total_dim; ++i) {
                dir[i] -= scale * cgrad[j][i];
              }
            }
          }
        }
        bool improved = false;
        double trial = step;
        for (int k = 0; k < 4; ++k) {
          for (std::size_t i = 0; i < blocks.total_dim; ++i) {
            cand[i] = x[i] + trial * dir[i];
          }
          project_blocks(problem.blocks, blocks, cand);
          EvalResult ce = eval_at(cand);
          const double cf = sign * ce.objective;
          const bool feasible = max_violation(ce.constraints) <= config.feas_tol;
          if (feasible) refine_best[t].consider(cf, cand, tables);
          if (feasible && cf < f) {
            x.assign(cand.begin(), cand.end());
            cur = std::move(ce);
            f = cf;
            step = (k == 0) ? std::min(0.25, trial * 2.0) : trial;
            improved = true;
            break;
          }
          trial *= config.step_shrink;
        }
        if (!improved) step = trial * config.step_shrink;
      }
    }
  });

  for (int t = 0; t < workers; ++t) {
    best.merge(refine_best[t]);
    evaluations += refine_evals[t];
  }

  SearchOutcome outcome;
  outcome.evaluations = evaluations;
  outcome.effective_resolution = eff_res;
  if (best.has) {
    outcome.feasible = true;
    outcome.value = sign * best.value;  // undo internal negation for max
    outcome.witness = std::move(best.params);
    outcome.witness_maps = std::move(best.maps);
  } else {
    outcome.feasible = false;
    outcome.value = std::numeric_limits<double>::quiet_NaN();
  }
  return outcome;
}

}  // namespace actembed
