#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "concord/errors.hpp"
#include "concord/lp.hpp"
#include "concord/types.hpp"

namespace concord::detail {

/// Thresholds to impose on the ordered cone x_1 >= x_2 >= ... >= x_n.
/// Within the cone every absolute value in the consensus constraints has a
/// fixed or splittable sign, so each present threshold becomes linear rows.
struct ConeThresholds {
  std::optional<double> delta;    // x_1 - x_n <= delta
  std::optional<double> epsilon;  // extreme deviations from the linear OWA form
  std::optional<double> gamma1;   // weighted mean deviation (split variables)
  std::optional<double> gamma2;   // weighted pairwise disparities
};

struct ConeLpOutcome {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;  // in cone coordinates, clamped to [0,1]
  double cost = 0.0;      // sum c_k |x_k - o_k|
  long iterations = 0;
  bool used_bland = false;
};

/// Minimizes sum_k c_k |x_k - o_k| over the ordered cone intersected with
/// the requested consensus regions. Works in split variables p, q >= 0
/// with x = o + p - q; the bounds p_k <= 1-o_k and q_k <= o_k keep x inside
/// the unit cube without extra rows. `omega` is required by the epsilon and
/// gamma1 rows, `w` by the gamma1 and gamma2 rows.
inline ConeLpOutcome solve_cone_lp(const std::vector<double>& o,
                                   const std::vector<double>& c,
                                   const std::vector<double>* omega,
                                   const std::vector<double>* w,
                                   const ConeThresholds& th) {
  const std::size_t n = o.size();
  if (c.size() != n) throw DimensionError("cone lp: cost length mismatch");
  if ((th.epsilon || th.gamma1) && (!omega || omega->size() != n)) {
    throw DimensionError("cone lp: OWA weights required for epsilon/gamma1 rows");
  }
  if ((th.gamma1 || th.gamma2) && (!w || w->size() != n)) {
    throw DimensionError("cone lp: importance weights required for gamma rows");
  }
  if (th.gamma2 && n < 2) {
    throw ValidationError("cone lp: pairwise threshold is undefined for n == 1");
  }

  const bool with_split = th.gamma1.has_value();
  const std::size_t nvars = with_split ? 4 * n : 2 * n;  // p, q, then r, s
  LpProblem lp;
  lp.objective.assign(nvars, 0.0);
  lp.lower.assign(nvars, 0.0);
  lp.upper.assign(nvars, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    lp.objective[k] = c[k];
    lp.objective[n + k] = c[k];
    lp.upper[k] = 1.0 - o[k];
    lp.upper[n + k] = o[k];
  }
  if (with_split) {
    for (std::size_t k = 2 * n; k < 4 * n; ++k) lp.upper[k] = 1.0;
  }

  auto add_row = [&](std::vector<double> row, Relation rel, double rhs) {
    lp.rows.push_back(std::move(row));
    lp.relations.push_back(rel);
    lp.rhs.push_back(rhs);
  };

  // ordering chain: x_k - x_{k+1} >= 0
  for (std::size_t k = 0; k + 1 < n; ++k) {
    std::vector<double> row(nvars, 0.0);
    row[k] = 1.0;
    row[n + k] = -1.0;
    row[k + 1] = -1.0;
    row[n + k + 1] = 1.0;
    add_row(std::move(row), Relation::GreaterEq, o[k + 1] - o[k]);
  }

  if (th.delta && n >= 2) {
    std::vector<double> row(nvars, 0.0);
    row[0] = 1.0;
    row[n] = -1.0;
    row[n - 1] -= 1.0;
    row[2 * n - 1] += 1.0;
    add_row(std::move(row), Relation::LessEq, *th.delta - (o[0] - o[n - 1]));
  }

  double psi_o = 0.0;
  if (omega) {
    for (std::size_t k = 0; k < n; ++k) psi_o += (*omega)[k] * o[k];
  }

  if (th.epsilon && n >= 2) {
    // Under the ordering the linear OWA form lies between x_n and x_1, so
    // bounding the two extreme deviations bounds them all.
    std::vector<double> top(nvars, 0.0);
    std::vector<double> bot(nvars, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const double wk = (*omega)[k];
      top[k] -= wk;
      top[n + k] += wk;
      bot[k] += wk;
      bot[n + k] -= wk;
    }
    top[0] += 1.0;
    top[n] -= 1.0;
    bot[n - 1] -= 1.0;
    bot[2 * n - 1] += 1.0;
    add_row(std::move(top), Relation::LessEq, *th.epsilon - (o[0] - psi_o));
    add_row(std::move(bot), Relation::LessEq, *th.epsilon - (psi_o - o[n - 1]));
  }

  if (th.gamma1) {
    // r_k - s_k = x_k - psi(x); the budget row bounds sum w_k (r_k + s_k),
    // whose feasible minimum over r, s is the weighted mean deviation.
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<double> row(nvars, 0.0);
      row[2 * n + k] = 1.0;
      row[3 * n + k] = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double wi = (*omega)[i];
        row[i] += wi;
        row[n + i] -= wi;
      }
      row[k] -= 1.0;
      row[n + k] += 1.0;
      add_row(std::move(row), Relation::Equal, o[k] - psi_o);
    }
    std::vector<double> budget(nvars, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      budget[2 * n + k] = (*w)[k];
      budget[3 * n + k] = (*w)[k];
    }
    add_row(std::move(budget), Relation::LessEq, *th.gamma1);
  }

  if (th.gamma2) {
    // sum_{k<l} (w_k + w_l)/(n-1) (x_k - x_l) with all signs fixed by the
    // ordering; collect the per-variable coefficient.
    std::vector<double> suffix(n + 1, 0.0);
    for (std::size_t k = n; k-- > 0;) suffix[k] = suffix[k + 1] + (*w)[k];
    double prefix = 0.0;
    std::vector<double> row(nvars, 0.0);
    double rhs = *th.gamma2;
    for (std::size_t k = 0; k < n; ++k) {
      const double nk = static_cast<double>(n) - 2.0 * static_cast<double>(k + 1) + 1.0;
      const double coef = (nk * (*w)[k] + suffix[k + 1] - prefix) /
                          static_cast<double>(n - 1);
      row[k] = coef;
      row[n + k] = -coef;
      rhs -= coef * o[k];
      prefix += (*w)[k];
    }
    add_row(std::move(row), Relation::LessEq, rhs);
  }

  const LpSolution sol = solve_lp(lp);
  ConeLpOutcome out;
  out.status = sol.status;
  out.iterations = sol.iterations;
  out.used_bland = sol.used_bland;
  if (sol.status == LpStatus::Optimal) {
    out.x.resize(n);
    double cost = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double xk = std::clamp(o[k] + sol.x[k] - sol.x[n + k], 0.0, 1.0);
      out.x[k] = xk;
      cost += c[k] * std::abs(xk - o[k]);
    }
    out.cost = cost;
  }
  return out;
}

}  // namespace concord::detail
