#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "concord/detail/cone_lp.hpp"
#include "concord/errors.hpp"
#include "concord/measures.hpp"
#include "concord/types.hpp"

namespace concord {

/// Adjustment cost of moving the opinions o to x under normalized costs c.
inline double cost(const OpinionVector& o, const WeightVector& c, const OpinionVector& x) {
  detail::check_same_size(o.size(), c.size(), "cost");
  detail::check_same_size(o.size(), x.size(), "cost");
  double acc = 0.0;
  for (std::size_t k = 0; k < o.size(); ++k) acc += c[k] * std::abs(x[k] - o[k]);
  return acc;
}

struct McmcResult {
  OpinionVector x;
  double cost = 0.0;
  double interval_lo = 0.0;         // clamp interval [a, b], b - a <= delta
  double interval_hi = 0.0;
  long breakpoints_examined = 0;    // 0 for the LP route
};

/// Minimum-cost adjustment subject to the mutual-consensus radius delta,
/// optionally restricted to a window [lo, hi]^n. The optimum clamps each
/// opinion into an interval of width at most delta; the cost is a convex
/// piecewise-linear function of the interval's left end a, with breakpoints
/// at the opinions and at opinions shifted down by delta. The sweep
/// evaluates every candidate and keeps the smallest optimal a so that
/// identical inputs always return the same vector.
inline McmcResult solve_mcmc(const OpinionVector& o, const WeightVector& c, double delta,
                             std::optional<std::pair<double, double>> window = std::nullopt) {
  detail::check_same_size(o.size(), c.size(), "solve_mcmc");
  detail::check_unit_range(delta, "delta");
  double wlo = 0.0, whi = 1.0;
  if (window) {
    wlo = window->first;
    whi = window->second;
    detail::check_unit_range(wlo, "window.lo");
    detail::check_unit_range(whi, "window.hi");
    if (wlo > whi) throw InfeasibleError("solve_mcmc: empty window (lo > hi)");
  }

  const auto& ov = o.values();
  const auto& cv = c.values();
  const std::size_t n = ov.size();

  double a_best = wlo;
  double b_best = whi;
  long examined = 1;

  if (delta < whi - wlo) {
    const double amax = whi - delta;
    std::vector<double> cand;
    cand.reserve(2 * n + 2);
    cand.push_back(wlo);
    cand.push_back(amax);
    for (double v : ov) {
      if (v >= wlo && v <= amax) cand.push_back(v);
      const double shifted = v - delta;
      if (shifted >= wlo && shifted <= amax) cand.push_back(shifted);
    }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

    auto sweep_cost = [&](double a) {
      const double b = a + delta;
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        if (ov[k] < a) {
          acc += cv[k] * (a - ov[k]);
        } else if (ov[k] > b) {
          acc += cv[k] * (ov[k] - b);
        }
      }
      return acc;
    };

    double best_cost = std::numeric_limits<double>::infinity();
    for (double a : cand) best_cost = std::min(best_cost, sweep_cost(a));
    const double tie_tol = 1e-12 * (1.0 + std::abs(best_cost));
    for (double a : cand) {
      if (sweep_cost(a) <= best_cost + tie_tol) {
        a_best = a;  // candidates are ascending: first hit is the smallest a
        break;
      }
    }
    b_best = a_best + delta;
    examined = static_cast<long>(cand.size());
  }

  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = std::clamp(ov[k], a_best, b_best);
  OpinionVector xv(std::move(x));
  const double total = cost(o, c, xv);
  return McmcResult{std::move(xv), total, a_best, b_best, examined};
}

namespace detail {

/// Indices of o sorted by decreasing value; ties keep the original order.
inline std::vector<std::size_t> descending_order(const std::vector<double>& o) {
  std::vector<std::size_t> perm(o.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::size_t a, std::size_t b) { return o[a] > o[b]; });
  return perm;
}

}  // namespace detail

/// LP cross-check for solve_mcmc: sort the opinions decreasingly, impose
/// the ordering chain plus the radius row, solve one LP, and un-permute.
inline McmcResult solve_mcmc_lp(const OpinionVector& o, const WeightVector& c, double delta) {
  detail::check_same_size(o.size(), c.size(), "solve_mcmc_lp");
  detail::check_unit_range(delta, "delta");
  const auto& ov = o.values();
  const auto& cv = c.values();
  const std::size_t n = ov.size();

  const std::vector<std::size_t> perm = detail::descending_order(ov);
  std::vector<double> os(n), cs(n);
  for (std::size_t k = 0; k < n; ++k) {
    os[k] = ov[perm[k]];
    cs[k] = cv[perm[k]];
  }

  detail::ConeThresholds th;
  th.delta = delta;
  const detail::ConeLpOutcome sol = detail::solve_cone_lp(os, cs, nullptr, nullptr, th);
  if (sol.status == LpStatus::Infeasible) {
    throw SolverError("solve_mcmc_lp: unexpected infeasibility");
  }
  if (sol.status != LpStatus::Optimal) {
    throw SolverError("solve_mcmc_lp: abnormal LP status");
  }

  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) x[perm[k]] = sol.x[k];
  OpinionVector xv(std::move(x));
  const double total = cost(o, c, xv);
  const auto [lo, hi] = std::minmax_element(xv.begin(), xv.end());
  const double ilo = *lo, ihi = *hi;
  return McmcResult{std::move(xv), total, ilo, ihi, 0};
}

}  // namespace concord
