#include "actembed/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

namespace actembed {

namespace {

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > std::numeric_limits<std::uint64_t>::max() / b) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return a * b;
}

bool lex_less(std::span<const double> a, std::span<const double> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

struct Best {
  bool has = false;
  double value = std::numeric_limits<double>::infinity();
  std::vector<double> params;
  std::vector<int> maps;

  void consider(double v, std::span<const double> p, std::span<const int> m) {
    if (has) {
      if (v > value) return;
      if (v == value && !lex_less(p, params)) return;
    }
    has = true;
    value = v;
    params.assign(p.begin(), p.end());
    maps.assign(m.begin(), m.end());
  }
  void merge(const Best& o) {
    if (o.has) consider(o.value, o.params, o.maps);
  }
};

}  // namespace

OracleReport exhaustive_optimum(const SearchProblem& problem, int resolution,
                                Sense sense, double feas_tol,
                                std::uint64_t max_evaluations, int threads) {
  if (resolution < 1) {
    throw std::invalid_argument("oracle resolution must be >= 1");
  }
  std::vector<SimplexGrid> grids;
  std::vector<std::size_t> offsets;
  std::size_t total_dim = 0;
  std::uint64_t grid_total = 1;
  for (const auto& b : problem.blocks) {
    grids.emplace_back(b.dim, resolution);
    offsets.push_back(total_dim);
    total_dim += static_cast<std::size_t>(b.dim);
    grid_total = saturating_mul(grid_total, grids.back().size());
  }

  std::uint64_t map_combos = 1;
  std::vector<std::size_t> map_offsets;
  std::size_t map_entries = 0;
  for (const auto& s : problem.map_spaces) {
    map_offsets.push_back(map_entries);
    map_entries += static_cast<std::size_t>(s.domain_size);
    for (int e = 0; e < s.domain_size; ++e) {
      map_combos = saturating_mul(map_combos,
                                  static_cast<std::uint64_t>(s.codomain_size));
    }
  }

  const std::uint64_t total = saturating_mul(grid_total, map_combos);
  if (total > max_evaluations) {
    throw OracleGridTooLarge("oracle grid has " + std::to_string(total) +
                             " points, cap is " +
                             std::to_string(max_evaluations));
  }

  const double sign = (sense == Sense::Minimize) ? 1.0 : -1.0;
  const int workers =
      static_cast<int>(std::min<std::uint64_t>(std::max(threads, 1), total));
  std::vector<Best> best(std::max(workers, 1));

  auto run_range = [&](int t, std::uint64_t begin, std::uint64_t end) {
    std::vector<double> params(total_dim);
    std::vector<int> tables(map_entries);
    for (std::uint64_t idx = begin; idx < end; ++idx) {
      std::uint64_t combo = idx / grid_total;
      std::uint64_t rest = idx % grid_total;
      for (std::size_t s = problem.map_spaces.size(); s-- > 0;) {
        const auto& spec = problem.map_spaces[s];
        for (int e = spec.domain_size - 1; e >= 0; --e) {
          tables[map_offsets[s] + static_cast<std::size_t>(e)] =
              static_cast<int>(combo %
                               static_cast<std::uint64_t>(spec.codomain_size));
          combo /= static_cast<std::uint64_t>(spec.codomain_size);
        }
      }
      for (std::size_t b = problem.blocks.size(); b-- > 0;) {
        const std::uint64_t block_idx = rest % grids[b].size();
        rest /= grids[b].size();
        grids[b].point(block_idx, std::span<double>(params).subspan(
                                      offsets[b],
                                      static_cast<std::size_t>(
                                          problem.blocks[b].dim)));
      }
      EvalResult ev = problem.evaluate(Candidate{params, tables});
      double viol = 0.0;
      for (double c : ev.constraints) viol = std::max(viol, c);
      if (viol <= feas_tol) {
        best[t].consider(sign * ev.objective, params, tables);
      }
    }
  };

  if (workers <= 1) {
    run_range(0, 0, total);
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    const std::uint64_t chunk = (total + workers - 1) / workers;
    for (int t = 0; t < workers; ++t) {
      const std::uint64_t begin = chunk * t;
      const std::uint64_t end = std::min(total, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back([&, t, begin, end] {
        try {
          run_range(t, begin, end);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }

  Best overall;
  for (const auto& b : best) overall.merge(b);
  if (!overall.has) {
    throw OracleInfeasible("no feasible point on the oracle grid");
  }
  OracleReport report;
  report.value = sign * overall.value;
  report.witness = std::move(overall.params);
  report.witness_maps = std::move(overall.maps);
  report.resolution = resolution;
  report.points_evaluated = total;
  return report;
}

double quantization_bound(int resolution, int total_dim, double lipschitz) {
  if (lipschitz <= 0.0) {
    lipschitz = std::log2(2.0 * static_cast<double>(resolution)) + 1.5;
  }
  return lipschitz * static_cast<double>(total_dim) /
         static_cast<double>(resolution);
}

CrossCheckVerdict cross_check(const SearchOutcome& solver,
                              const OracleReport& oracle, Sense sense,
                              double tol, double quant_bound) {
  CrossCheckVerdict v;
  if (!solver.feasible) {
    v.pass = false;
    v.message = "solver reported infeasible but the oracle found a point";
    return v;
  }
  const double s = solver.value;
  const double o = oracle.value;
  bool upper_ok, lower_ok;
  if (sense == Sense::Minimize) {
    upper_ok = s <= o + tol;
    lower_ok = s >= o - quant_bound - tol;
  } else {
    upper_ok = s >= o - tol;
    lower_ok = s <= o + quant_bound + tol;
  }
  v.pass = upper_ok && lower_ok;
  if (!upper_ok) {
    v.message = "solver value " + std::to_string(s) +
                " is worse than the oracle grid optimum " + std::to_string(o);
  } else if (!lower_ok) {
    v.message = "solver value " + std::to_string(s) +
                " beats the oracle by more than the quantization bound " +
                std::to_string(quant_bound) + " (constraint-handling bug?)";
  } else {
    v.message = "ok";
  }
  return v;
}

}  // namespace actembed
