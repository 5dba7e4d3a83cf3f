#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <vector>

#include "concord/errors.hpp"
#include "concord/types.hpp"

namespace concord {

/// OWA aggregation: the weighted sum of the entries of x sorted in
/// decreasing order. Ties are kept in stable order; since tied entries hold
/// equal values, tie placement never changes the result.
inline double owa(const WeightVector& omega, const OpinionVector& x) {
  detail::check_same_size(omega.size(), x.size(), "owa");
  std::vector<double> sorted(x.begin(), x.end());
  std::stable_sort(sorted.begin(), sorted.end(), std::greater<>());
  double acc = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) acc += omega[k] * sorted[k];
  return acc;
}

/// Evaluates an averaging aggregation operator on x.
inline double aggregate(const AggregatorSpec& phi, const OpinionVector& x) {
  switch (phi.kind()) {
    case AggregatorSpec::Kind::ArithmeticMean: {
      const double sum = std::accumulate(x.begin(), x.end(), 0.0);
      return sum / static_cast<double>(x.size());
    }
    case AggregatorSpec::Kind::WeightedMean: {
      const WeightVector& w = phi.weights();
      detail::check_same_size(w.size(), x.size(), "weighted mean");
      double acc = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) acc += w[k] * x[k];
      return acc;
    }
    case AggregatorSpec::Kind::Owa:
      return owa(phi.weights(), x);
  }
  throw ValidationError("unknown aggregator kind");
}

/// Mutual consensus: the largest pairwise disparity, max(x) - min(x).
/// Zero for a single opinion.
inline double kappa_mutual(const OpinionVector& x) {
  auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return *hi - *lo;
}

/// Largest absolute deviation of any opinion from the aggregate.
inline double kappa_max_dev(const OpinionVector& x, const AggregatorSpec& phi) {
  const double g = aggregate(phi, x);
  double worst = 0.0;
  for (double v : x) worst = std::max(worst, std::abs(v - g));
  return worst;
}

/// Importance-weighted mean absolute deviation from the aggregate.
inline double kappa_weighted_dev(const OpinionVector& x, const WeightVector& w,
                                 const AggregatorSpec& phi) {
  detail::check_same_size(w.size(), x.size(), "kappa_weighted_dev");
  const double g = aggregate(phi, x);
  double acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) acc += w[k] * std::abs(x[k] - g);
  return acc;
}

/// Importance-weighted mean of pairwise disparities:
///   sum_{k<l} (w_k + w_l)/(n-1) |x_k - x_l|.
/// Undefined for a single opinion (the formula averages over pairs).
inline double kappa_pairwise(const OpinionVector& x, const WeightVector& w) {
  detail::check_same_size(w.size(), x.size(), "kappa_pairwise");
  const std::size_t n = x.size();
  if (n < 2) {
    throw ValidationError("kappa_pairwise is undefined for a single opinion");
  }
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    for (std::size_t l = k + 1; l < n; ++l) {
      acc += (w[k] + w[l]) * std::abs(x[k] - x[l]);
    }
  }
  return acc / static_cast<double>(n - 1);
}

/// Membership report for the regions named by an instance's thresholds.
/// A field is set iff the matching threshold is present; comparisons carry
/// a 1e-12 slack. Gamma regions fall back to uniform importance weights
/// when the instance has none.
struct RegionMembership {
  std::optional<bool> mutual;        // kappa(x) <= delta
  bool owa = false;                  // kappa^{OWA}(x) <= epsilon
  std::optional<bool> weighted_dev;  // kappa^{w,OWA}(x) <= gamma1
  std::optional<bool> pairwise;      // kappa^{w}(x) <= gamma2
};

inline RegionMembership membership(const OpinionVector& x, const Instance& inst) {
  detail::check_same_size(x.size(), inst.size(), "membership");
  RegionMembership r;
  const AggregatorSpec phi = AggregatorSpec::owa(inst.owa_weights);
  if (inst.delta) r.mutual = kappa_mutual(x) <= *inst.delta + kMembershipTol;
  r.owa = kappa_max_dev(x, phi) <= inst.epsilon + kMembershipTol;
  if (inst.gamma1 || inst.gamma2) {
    const WeightVector w = inst.importance_or_uniform();
    if (inst.gamma1) {
      r.weighted_dev = kappa_weighted_dev(x, w, phi) <= *inst.gamma1 + kMembershipTol;
    }
    if (inst.gamma2) {
      r.pairwise = kappa_pairwise(x, w) <= *inst.gamma2 + kMembershipTol;
    }
  }
  return r;
}

}  // namespace concord
