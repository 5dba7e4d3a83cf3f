#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "concord/errors.hpp"

namespace concord {

/// Absolute tolerance for the sum-to-one check on weight vectors.
inline constexpr double kWeightSumTol = 1e-9;

/// Slack applied to threshold comparisons (region membership, feasibility
/// branches). Inputs are human-scale decimals, so 1e-12 absorbs double
/// rounding without admitting genuinely infeasible points.
inline constexpr double kMembershipTol = 1e-12;

namespace detail {

inline void check_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" +
                         std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

inline void check_unit_range(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ValidationError(std::string(what) + " must lie in [0,1], got " +
                          std::to_string(v));
  }
}

}  // namespace detail

/// Nonnegative weights that sum to one. Used for OWA weights, importance
/// weights, and normalized cost vectors.
class WeightVector {
 public:
  explicit WeightVector(std::vector<double> weights) : w_(std::move(weights)) {
    if (w_.empty()) throw ValidationError("weight vector must not be empty");
    double sum = 0.0;
    for (double v : w_) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ValidationError("weight entries must lie in [0,1], got " +
                              std::to_string(v));
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kWeightSumTol) {
      throw ValidationError("weights must sum to 1 (within 1e-9), got " +
                            std::to_string(sum));
    }
  }

  /// Builds a weight vector by dividing the raw entries by their sum.
  /// Rejects negative entries and nonpositive sums instead of guessing.
  static WeightVector normalized_from(const std::vector<double>& raw) {
    if (raw.empty()) throw ValidationError("weight vector must not be empty");
    double sum = 0.0;
    for (double v : raw) {
      if (!(v >= 0.0)) {
        throw ValidationError("raw weights must be nonnegative, got " +
                              std::to_string(v));
      }
      sum += v;
    }
    if (!(sum > 0.0)) throw ValidationError("raw weights sum to zero");
    std::vector<double> w(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) w[i] = raw[i] / sum;
    return WeightVector(std::move(w));
  }

  static WeightVector uniform(std::size_t n) {
    if (n == 0) throw ValidationError("weight vector must not be empty");
    return WeightVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  const std::vector<double>& values() const { return w_; }
  double front() const { return w_.front(); }
  double back() const { return w_.back(); }
  auto begin() const { return w_.begin(); }
  auto end() const { return w_.end(); }

  bool is_uniform(double tol = kWeightSumTol) const {
    const double u = 1.0 / static_cast<double>(w_.size());
    for (double v : w_) {
      if (std::abs(v - u) > tol) return false;
    }
    return true;
  }

  friend bool operator==(const WeightVector& a, const WeightVector& b) {
    return a.w_ == b.w_;
  }

 private:
  std::vector<double> w_;
};

/// A tuple of opinions on the normalized [0,1] scale. Also used for
/// candidate and adjusted opinion vectors.
class OpinionVector {
 public:
  explicit OpinionVector(std::vector<double> values) : v_(std::move(values)) {
    if (v_.empty()) throw ValidationError("opinion vector must not be empty");
    for (double v : v_) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ValidationError("opinions must lie in [0,1], got " +
                              std::to_string(v));
      }
    }
  }

  std::size_t size() const { return v_.size(); }
  double operator[](std::size_t i) const { return v_[i]; }
  const std::vector<double>& values() const { return v_; }
  auto begin() const { return v_.begin(); }
  auto end() const { return v_.end(); }

  friend bool operator==(const OpinionVector& a, const OpinionVector& b) {
    return a.v_ == b.v_;
  }

 private:
  std::vector<double> v_;
};

/// Describes an averaging aggregation operator: the arithmetic mean, a
/// weighted mean, or an OWA operator. Every kind maps [0,1]^n into
/// [min(x), max(x)].
class AggregatorSpec {
 public:
  enum class Kind { ArithmeticMean, WeightedMean, Owa };

  static AggregatorSpec arithmetic_mean() { return AggregatorSpec(Kind::ArithmeticMean, {}); }
  static AggregatorSpec weighted_mean(WeightVector w) {
    return AggregatorSpec(Kind::WeightedMean, std::move(w));
  }
  static AggregatorSpec owa(WeightVector omega) {
    return AggregatorSpec(Kind::Owa, std::move(omega));
  }

  Kind kind() const { return kind_; }

  /// Weights backing a weighted-mean or OWA spec; throws for the mean.
  const WeightVector& weights() const {
    if (!weights_) throw ValidationError("aggregator kind carries no weights");
    return *weights_;
  }

 private:
  AggregatorSpec(Kind kind, std::optional<WeightVector> w)
      : kind_(kind), weights_(std::move(w)) {}

  Kind kind_;
  std::optional<WeightVector> weights_;
};

/// A full problem statement: opinions, normalized costs, OWA weights,
/// optional importance weights, and the consensus thresholds.
struct Instance {
  OpinionVector opinions;
  WeightVector costs;
  WeightVector owa_weights;
  std::optional<WeightVector> importance_weights;
  double epsilon;
  std::optional<double> delta;
  std::optional<double> gamma1;
  std::optional<double> gamma2;

  Instance(OpinionVector opinions_, WeightVector costs_, WeightVector owa_weights_,
           std::optional<WeightVector> importance_weights_, double epsilon_,
           std::optional<double> delta_ = std::nullopt,
           std::optional<double> gamma1_ = std::nullopt,
           std::optional<double> gamma2_ = std::nullopt)
      : opinions(std::move(opinions_)),
        costs(std::move(costs_)),
        owa_weights(std::move(owa_weights_)),
        importance_weights(std::move(importance_weights_)),
        epsilon(epsilon_),
        delta(delta_),
        gamma1(gamma1_),
        gamma2(gamma2_) {
    const std::size_t n = opinions.size();
    detail::check_same_size(costs.size(), n, "costs");
    detail::check_same_size(owa_weights.size(), n, "owa_weights");
    if (importance_weights) {
      detail::check_same_size(importance_weights->size(), n, "importance_weights");
    }
    detail::check_unit_range(epsilon, "epsilon");
    if (delta) detail::check_unit_range(*delta, "delta");
    if (gamma1) detail::check_unit_range(*gamma1, "gamma1");
    if (gamma2) detail::check_unit_range(*gamma2, "gamma2");
  }

  std::size_t size() const { return opinions.size(); }

  /// Importance weights, defaulting to the uniform vector when absent.
  WeightVector importance_or_uniform() const {
    return importance_weights ? *importance_weights : WeightVector::uniform(size());
  }
};

}  // namespace concord
