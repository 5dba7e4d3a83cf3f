#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "concord/detail/cone_lp.hpp"
#include "concord/errors.hpp"
#include "concord/mcmc.hpp"
#include "concord/measures.hpp"
#include "concord/types.hpp"

namespace concord {

/// Mutual-consensus radii bracketing the OWA consensus region: every point
/// with disparity at most delta_minus satisfies the OWA constraint, and
/// every point satisfying it has disparity at most delta_plus.
struct DeltaBounds {
  double delta_minus = 0.0;
  double delta_plus = 0.0;
};

/// delta_minus = min{eps / (1 - min{omega_1, omega_n}), 1},
/// delta_plus = min{2 eps, 1}. omega_1 and omega_n are the first and last
/// OWA weights (applied to the largest and smallest entry after sorting).
inline DeltaBounds delta_bounds(double epsilon, const WeightVector& omega) {
  detail::check_unit_range(epsilon, "epsilon");
  if (omega.size() < 2) {
    throw ValidationError("delta_bounds: degenerate for a single opinion");
  }
  const double wmin = std::min(omega.front(), omega.back());
  // weights sum to 1 and n >= 2, so wmin <= 1/2
  return DeltaBounds{std::min(epsilon / (1.0 - wmin), 1.0), std::min(2.0 * epsilon, 1.0)};
}

/// Cost bracket for the OWA consensus problem: the radius-delta_plus
/// optimum bounds the cost from below, the radius-delta_minus optimum from
/// above. Returns [0, 0] when the opinions already satisfy the constraint.
inline std::pair<double, double> cost_bounds(const Instance& inst) {
  const AggregatorSpec phi = AggregatorSpec::owa(inst.owa_weights);
  if (kappa_max_dev(inst.opinions, phi) <= inst.epsilon + kMembershipTol) {
    return {0.0, 0.0};
  }
  const DeltaBounds db = delta_bounds(inst.epsilon, inst.owa_weights);
  const double lower = solve_mcmc(inst.opinions, inst.costs, db.delta_plus).cost;
  const double upper = solve_mcmc(inst.opinions, inst.costs, db.delta_minus).cost;
  return {lower, upper};
}

struct ApproxResult {
  OpinionVector x;
  double cost = 0.0;
  double delta_star = 0.0;  // radius whose solution is returned
  double kappa_owa = 0.0;   // OWA max deviation of x, always <= epsilon + 1e-12
  long iterations = 0;      // interpolation solves performed
  double cost_lower = 0.0;
  double cost_upper = 0.0;
  bool converged = false;
};

/// Approximates the OWA consensus optimum by interpolating the
/// mutual-consensus radius between delta_minus and delta_plus.
///
/// Each step solves the radius problem at an interpolated delta and moves
/// whichever bracket end matches the feasibility of the solution. The
/// interpolation carries the Illinois regula-falsi safeguard: after two
/// consecutive updates of the same bracket end, the stale end's deviation
/// is halved for interpolation purposes. Without it, a concave deviation
/// profile parks every proposal a hair inside the infeasible side and the
/// loop exhausts its budget still holding the worst-case delta_minus
/// solution. Iterations remaining after the tolerance is first met keep
/// tightening the radius toward the feasibility boundary, since every
/// accepted point is feasible and strictly cheaper. By default the inner
/// solves are windowed to the current delta_plus clamp interval, which
/// keeps the iterates nested and the OWA deviation monotone in delta;
/// passing nested_window = false disables the windowing. The returned
/// point is always feasible.
///
/// epsilon is meant to lie in (0, 1/2): at 0 the radius degenerates to the
/// weighted median, and at 1/2 or above delta_plus saturates at 1. Both
/// extremes run through the same path rather than erroring.
inline ApproxResult ap_owamcc(const Instance& inst, long max_iters = 10, double tau = 0.01,
                              bool nested_window = true) {
  if (max_iters < 1) throw ValidationError("ap_owamcc: max_iters must be at least 1");
  if (!(tau > 0.0)) throw ValidationError("ap_owamcc: tau must be positive");

  const OpinionVector& o = inst.opinions;
  const WeightVector& c = inst.costs;
  const AggregatorSpec phi = AggregatorSpec::owa(inst.owa_weights);
  const double eps = inst.epsilon;

  const double kappa_o = kappa_max_dev(o, phi);
  if (kappa_o <= eps + kMembershipTol) {
    // already inside the OWA region; the bracket collapses to zero cost
    return ApproxResult{o, 0.0, kappa_mutual(o), kappa_o, 0, 0.0, 0.0, true};
  }

  const DeltaBounds db = delta_bounds(eps, inst.owa_weights);
  double dminus = db.delta_minus;
  double dplus = db.delta_plus;

  McmcResult x_plus = solve_mcmc(o, c, dplus);
  auto window = [&]() -> std::optional<std::pair<double, double>> {
    if (!nested_window) return std::nullopt;
    return std::make_pair(x_plus.interval_lo, x_plus.interval_hi);
  };
  McmcResult x_minus = solve_mcmc(o, c, dminus, window());

  const double cost_lower = x_plus.cost;
  const double cost_upper = x_minus.cost;

  double kp = kappa_max_dev(x_plus.x, phi);
  double km = kappa_max_dev(x_minus.x, phi);

  // interpolation-only copies of the deviations, adjusted by the safeguard
  double km_eff = km;
  double kp_eff = kp;
  int last_side = 0;

  long iters = 0;
  bool converged = false;
  for (long it = 0; it < max_iters; ++it) {
    converged = converged || std::abs(km - eps) <= tau;
    if (kp - km < 1e-12) {
      // equal deviations: the radius-delta_plus optimum is itself optimal
      // for the OWA problem, adopt it when it is feasible within slack
      if (kp <= eps + kMembershipTol) {
        x_minus = x_plus;
        dminus = dplus;
        km = kp;
      }
      converged = true;
      break;
    }
    // iterations left after the tolerance is met keep tightening the
    // radius; accepted points stay feasible and their cost is nonincreasing
    if (std::abs(km - eps) <= kMembershipTol) break;
    if (converged && dplus - dminus <= 1e-12) break;
    double dstar = dminus + (eps - km_eff) / (kp_eff - km_eff) * (dplus - dminus);
    const double margin = std::min(1e-9, 0.25 * (dplus - dminus));
    dstar = std::clamp(dstar, dminus + margin, dplus - margin);

    McmcResult xs = solve_mcmc(o, c, dstar, window());
    ++iters;
    const double ks = kappa_max_dev(xs.x, phi);
    if (ks <= eps + kMembershipTol) {
      dminus = dstar;
      x_minus = std::move(xs);
      km = ks;
      km_eff = ks;
      if (last_side == 1) kp_eff = eps + 0.5 * (kp_eff - eps);
      last_side = 1;
    } else {
      dplus = dstar;
      x_plus = std::move(xs);
      kp = ks;
      kp_eff = ks;
      if (last_side == -1) km_eff = eps - 0.5 * (eps - km_eff);
      last_side = -1;
    }
  }
  converged = converged || std::abs(km - eps) <= tau;

  return ApproxResult{std::move(x_minus.x), x_minus.cost, dminus, km,
                      iters,  cost_lower,   cost_upper,   converged};
}

/// Consensus measures of a returned vector, for reporting.
struct ConsensusDiagnostics {
  double kappa = 0.0;
  double kappa_owa = 0.0;
  std::optional<double> kappa_weighted;
  std::optional<double> kappa_pairwise;
};

struct Solution {
  OpinionVector x;
  double cost = 0.0;
  ConsensusDiagnostics diagnostics;
  std::string method;
  long lp_iterations = 0;
};

namespace detail {

inline ConsensusDiagnostics diagnose(const OpinionVector& x, const Instance& inst) {
  ConsensusDiagnostics d;
  const AggregatorSpec phi = AggregatorSpec::owa(inst.owa_weights);
  d.kappa = kappa_mutual(x);
  d.kappa_owa = kappa_max_dev(x, phi);
  const WeightVector w = inst.importance_or_uniform();
  d.kappa_weighted = kappa_weighted_dev(x, w, phi);
  if (x.size() >= 2) d.kappa_pairwise = kappa_pairwise(x, w);
  return d;
}

}  // namespace detail

/// Exact solver for the symmetric case: uniform costs and uniform
/// importance weights. Sorting the opinions decreasingly and fixing the
/// ordering turns the OWA operator into a fixed linear form, so one LP over
/// the ordered cone solves the model with whichever thresholds the instance
/// carries (epsilon always, delta/gamma1/gamma2 when present).
inline Solution solve_symmetric_linear(const Instance& inst) {
  const std::size_t n = inst.size();
  const double uniform = 1.0 / static_cast<double>(n);
  for (double ck : inst.costs) {
    if (std::abs(ck - uniform) > kWeightSumTol) {
      throw ValidationError("solve_symmetric_linear: costs must be uniform (1/n)");
    }
  }
  if (inst.importance_weights && !inst.importance_weights->is_uniform()) {
    throw ValidationError("solve_symmetric_linear: importance weights must be uniform");
  }
  if (inst.gamma2 && n < 2) {
    throw ValidationError("solve_symmetric_linear: pairwise threshold undefined for n == 1");
  }

  const auto& ov = inst.opinions.values();
  const std::vector<std::size_t> perm = detail::descending_order(ov);
  std::vector<double> os(n), cs(n);
  for (std::size_t k = 0; k < n; ++k) {
    os[k] = ov[perm[k]];
    cs[k] = inst.costs[perm[k]];
  }
  const std::vector<double> wuni(n, uniform);

  detail::ConeThresholds th;
  th.epsilon = inst.epsilon;
  th.delta = inst.delta;
  th.gamma1 = inst.gamma1;
  th.gamma2 = inst.gamma2;

  const detail::ConeLpOutcome sol =
      detail::solve_cone_lp(os, cs, &inst.owa_weights.values(), &wuni, th);
  if (sol.status == LpStatus::Infeasible) {
    throw InfeasibleError("solve_symmetric_linear: thresholds define an empty region");
  }
  if (sol.status != LpStatus::Optimal) {
    throw SolverError("solve_symmetric_linear: abnormal LP status");
  }

  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) x[perm[k]] = sol.x[k];
  OpinionVector xv(std::move(x));
  const double total = cost(inst.opinions, inst.costs, xv);
  ConsensusDiagnostics diag = detail::diagnose(xv, inst);
  return Solution{std::move(xv), total, std::move(diag), "symmetric-linear", sol.iterations};
}

struct ExactResult {
  OpinionVector x;
  double cost = 0.0;
  std::vector<std::size_t> ordering;  // positions of x sorted decreasingly
  long lps_solved = 0;
};

namespace detail {

struct EnumCandidate {
  double cost = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> perm;
  std::vector<double> x;
  long lps_solved = 0;

  bool better_than(const EnumCandidate& other) const {
    if (cost != other.cost) return cost < other.cost;
    return perm < other.perm;
  }
};

// Skip permutations that only reorder identical (opinion, cost) pairs:
// canonical representatives keep equal items in increasing index order.
inline bool canonical_under_ties(const std::vector<std::size_t>& perm,
                                 const std::vector<std::pair<double, double>>& items,
                                 std::vector<std::size_t>& pos_scratch) {
  const std::size_t n = perm.size();
  for (std::size_t p = 0; p < n; ++p) pos_scratch[perm[p]] = p;
  for (std::size_t a = 0; a + 1 < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (items[a] == items[b] && pos_scratch[a] > pos_scratch[b]) return false;
    }
  }
  return true;
}

inline void enum_orderings_chunk(const std::vector<double>& o, const std::vector<double>& c,
                                 const std::vector<double>& omega, double epsilon,
                                 bool prune_ties, std::size_t first_mod, std::size_t stride,
                                 EnumCandidate& best) {
  const std::size_t n = o.size();
  std::vector<std::pair<double, double>> items(n);
  for (std::size_t k = 0; k < n; ++k) items[k] = {o[k], c[k]};
  std::vector<std::size_t> pos(n);
  std::vector<double> op(n), cp(n);

  ConeThresholds th;
  th.epsilon = epsilon;

  for (std::size_t first = first_mod; first < n; first += stride) {
    std::vector<std::size_t> perm;
    perm.reserve(n);
    perm.push_back(first);
    for (std::size_t k = 0; k < n; ++k) {
      if (k != first) perm.push_back(k);
    }
    // lexicographic enumeration over the tail
    do {
      if (prune_ties && !canonical_under_ties(perm, items, pos)) continue;
      for (std::size_t k = 0; k < n; ++k) {
        op[k] = o[perm[k]];
        cp[k] = c[perm[k]];
      }
      const ConeLpOutcome sol = solve_cone_lp(op, cp, &omega, nullptr, th);
      ++best.lps_solved;
      if (sol.status != LpStatus::Optimal) continue;
      EnumCandidate cand;
      cand.cost = sol.cost;
      cand.perm = perm;
      cand.x = sol.x;
      if (cand.better_than(best)) {
        best.cost = cand.cost;
        best.perm = std::move(cand.perm);
        best.x = std::move(cand.x);
      }
    } while (std::next_permutation(perm.begin() + 1, perm.end()));
  }
}

}  // namespace detail

/// Exact OWA consensus optimum by enumerating the n! orderings of the
/// adjusted vector. Each ordering fixes the OWA permutation, turning the
/// constraint into two linear rows over the ordered cone; the union of the
/// cones covers the cube, so the minimum over orderings is global. Guarded
/// to n <= 9. Tie between orderings goes to the lexicographically smallest.
inline ExactResult solve_exact_enum(const Instance& inst, int threads = 1,
                                    std::size_t max_n = 9) {
  const std::size_t n = inst.size();
  if (n > max_n) {
    throw ValidationError("solve_exact_enum: n = " + std::to_string(n) +
                          " exceeds the factorial guard (" + std::to_string(max_n) + ")");
  }
  const auto& o = inst.opinions.values();
  const auto& c = inst.costs.values();
  const auto& omega = inst.owa_weights.values();

  const std::size_t nthreads =
      std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n));
  std::vector<detail::EnumCandidate> results(nthreads);
  if (nthreads == 1) {
    detail::enum_orderings_chunk(o, c, omega, inst.epsilon, true, 0, 1, results[0]);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(nthreads);
    pool.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) {
      pool.emplace_back([&, t]() {
        try {
          detail::enum_orderings_chunk(o, c, omega, inst.epsilon, true, t, nthreads, results[t]);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  detail::EnumCandidate best;
  long solved = 0;
  for (auto& r : results) {
    solved += r.lps_solved;
    if (!r.perm.empty() && r.better_than(best)) {
      best.cost = r.cost;
      best.perm = std::move(r.perm);
      best.x = std::move(r.x);
    }
  }
  if (best.perm.empty()) {
    // constant vectors satisfy every ordering, so this cannot happen
    throw SolverError("solve_exact_enum: every ordering reported infeasible");
  }

  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) x[best.perm[k]] = best.x[k];
  OpinionVector xv(std::move(x));
  const double total = cost(inst.opinions, inst.costs, xv);
  return ExactResult{std::move(xv), total, std::move(best.perm), solved};
}

}  // namespace concord
