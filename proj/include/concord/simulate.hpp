#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "concord/errors.hpp"
#include "concord/io.hpp"
#include "concord/mcmc.hpp"
#include "concord/owamcc.hpp"
#include "concord/rng.hpp"
#include "concord/types.hpp"

namespace concord {

enum class SimMode { SymmetricLinear, ExactEnum };
enum class CostMode { Uniform, Random };

struct ApParams {
  long max_iters = 10;
  double tau = 0.01;
};

struct SimulationConfig {
  std::size_t n = 4;
  long trials = 100;
  double epsilon = 0.15;
  std::uint64_t seed = 0;
  SimMode mode = SimMode::SymmetricLinear;
  CostMode cost_mode = CostMode::Uniform;
  ApParams ap;
  int threads = 1;
};

struct TrialRecord {
  long trial = 0;
  double cost_gap = 0.0;
  double ap_time_ms = 0.0;
  double reference_time_ms = 0.0;
  bool converged = false;
  bool feasible = false;
};

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for a single trial
};

struct SimulationReport {
  SimulationConfig config;
  std::vector<TrialRecord> trials;
  Aggregate cost_gap;
  Aggregate ap_time_ms;
  Aggregate reference_time_ms;
};

namespace detail {

inline Aggregate aggregate_of(const std::vector<TrialRecord>& rows,
                              double TrialRecord::* field) {
  Aggregate a;
  const std::size_t n = rows.size();
  if (n == 0) return a;
  double sum = 0.0;
  for (const auto& r : rows) sum += r.*field;
  a.mean = sum / static_cast<double>(n);
  if (n >= 2) {
    double ss = 0.0;
    for (const auto& r : rows) {
      const double d = r.*field - a.mean;
      ss += d * d;
    }
    a.stddev = std::sqrt(ss / static_cast<double>(n - 1));
  }
  return a;
}

inline std::vector<double> random_unit_vector(Xoshiro256PlusPlus& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& e : v) e = rng.uniform01();
  return v;
}

inline WeightVector random_normalized_weights(Xoshiro256PlusPlus& rng, std::size_t n) {
  // rejection on an (improbable) all-zero draw keeps the stream deterministic
  for (;;) {
    std::vector<double> v = random_unit_vector(rng, n);
    double sum = 0.0;
    for (double e : v) sum += e;
    if (sum > 1e-12) return WeightVector::normalized_from(v);
  }
}

}  // namespace detail

/// Runs seeded randomized trials comparing the interpolating approximation
/// against a reference solver. Per trial: draw opinions and OWA weights
/// uniformly (weights normalized by their sum), draw costs per cost_mode,
/// run both solvers, record the cost gap and wall times. Trial t draws from
/// stream (seed, t), so reports are reproducible for a given seed and
/// identical whether trials run on one thread or many.
inline SimulationReport run_simulation(const SimulationConfig& config) {
  if (config.trials < 1) throw ValidationError("simulate: trials must be at least 1");
  if (config.n < 1) throw ValidationError("simulate: n must be at least 1");
  if (config.mode == SimMode::ExactEnum && config.n > 9) {
    throw ValidationError("simulate: exact-enum reference requires n <= 9");
  }
  if (config.mode == SimMode::SymmetricLinear && config.cost_mode != CostMode::Uniform) {
    throw ValidationError("simulate: the symmetric-linear reference requires uniform costs");
  }

  SimulationReport report;
  report.config = config;
  report.trials.resize(static_cast<std::size_t>(config.trials));

  auto run_trial = [&](long t) {
    Xoshiro256PlusPlus rng =
        Xoshiro256PlusPlus::for_stream(config.seed, static_cast<std::uint64_t>(t));
    OpinionVector o(detail::random_unit_vector(rng, config.n));
    WeightVector omega = detail::random_normalized_weights(rng, config.n);
    WeightVector c = (config.cost_mode == CostMode::Uniform)
                         ? WeightVector::uniform(config.n)
                         : detail::random_normalized_weights(rng, config.n);
    Instance inst(std::move(o), std::move(c), std::move(omega), std::nullopt, config.epsilon);

    using Clock = std::chrono::steady_clock;
    const auto t0 = Clock::now();
    const ApproxResult ap = ap_owamcc(inst, config.ap.max_iters, config.ap.tau);
    const auto t1 = Clock::now();
    double ref_cost = 0.0;
    const auto t2 = Clock::now();
    if (config.mode == SimMode::SymmetricLinear) {
      ref_cost = solve_symmetric_linear(inst).cost;
    } else {
      ref_cost = solve_exact_enum(inst).cost;
    }
    const auto t3 = Clock::now();

    TrialRecord& rec = report.trials[static_cast<std::size_t>(t)];
    rec.trial = t;
    rec.cost_gap = ap.cost - ref_cost;
    rec.ap_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    rec.reference_time_ms = std::chrono::duration<double, std::milli>(t3 - t2).count();
    rec.converged = ap.converged;
    rec.feasible = ap.kappa_owa <= config.epsilon + kMembershipTol;
  };

  const int nthreads = std::max(1, config.threads);
  if (nthreads == 1 || config.trials == 1) {
    for (long t = 0; t < config.trials; ++t) run_trial(t);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(nthreads));
    for (int w = 0; w < nthreads; ++w) {
      pool.emplace_back([&, w]() {
        try {
          for (long t = w; t < config.trials; t += nthreads) run_trial(t);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  report.cost_gap = detail::aggregate_of(report.trials, &TrialRecord::cost_gap);
  report.ap_time_ms = detail::aggregate_of(report.trials, &TrialRecord::ap_time_ms);
  report.reference_time_ms = detail::aggregate_of(report.trials, &TrialRecord::reference_time_ms);
  return report;
}

inline const char* to_string(SimMode m) {
  return m == SimMode::SymmetricLinear ? "symmetric-linear" : "exact-enum";
}
inline const char* to_string(CostMode m) {
  return m == CostMode::Uniform ? "uniform" : "random";
}

inline nlohmann::json to_json(const SimulationReport& r) {
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& t : r.trials) {
    trials.push_back({{"trial", t.trial},
                      {"cost_gap", t.cost_gap},
                      {"ap_time_ms", t.ap_time_ms},
                      {"reference_time_ms", t.reference_time_ms},
                      {"converged", t.converged},
                      {"feasible", t.feasible}});
  }
  auto agg = [](const Aggregate& a) {
    return nlohmann::json{{"mean", a.mean}, {"std", a.stddev}};
  };
  return nlohmann::json{
      {"config",
       {{"n", r.config.n},
        {"trials", r.config.trials},
        {"epsilon", r.config.epsilon},
        {"seed", r.config.seed},
        {"mode", to_string(r.config.mode)},
        {"cost_mode", to_string(r.config.cost_mode)},
        {"max_iters", r.config.ap.max_iters},
        {"tau", r.config.ap.tau},
        {"threads", r.config.threads}}},
      {"aggregates",
       {{"cost_gap", agg(r.cost_gap)},
        {"ap_time_ms", agg(r.ap_time_ms)},
        {"reference_time_ms", agg(r.reference_time_ms)}}},
      {"trials", trials}};
}

inline void write_report_csv(const SimulationReport& r, std::ostream& out) {
  out << "trial,cost_gap,ap_time_ms,reference_time_ms,converged,feasible\n";
  for (const auto& t : r.trials) {
    out << t.trial << ',' << detail::format_double(t.cost_gap) << ','
        << detail::format_double(t.ap_time_ms) << ','
        << detail::format_double(t.reference_time_ms) << ',' << (t.converged ? 1 : 0)
        << ',' << (t.feasible ? 1 : 0) << '\n';
  }
}

/// Regions named by the measure that defines them.
enum class RegionKind { Mutual, Owa, WeightedDev, Pairwise };

inline RegionKind region_from_name(const std::string& name) {
  if (name == "mutual") return RegionKind::Mutual;
  if (name == "owa") return RegionKind::Owa;
  if (name == "weighted-dev") return RegionKind::WeightedDev;
  if (name == "pairwise") return RegionKind::Pairwise;
  throw ValidationError("unknown region name: '" + name +
                        "' (expected mutual, owa, weighted-dev or pairwise)");
}

struct PointCloud {
  std::size_t dim = 0;
  std::vector<double> coords;  // count x dim, row-major
  std::vector<bool> inside;
};

/// Uniform samples from the cube labeled by membership in the requested
/// region, using the instance's threshold for that region.
inline PointCloud sample_region(const Instance& inst, RegionKind region, long count,
                                std::uint64_t seed) {
  if (count < 1) throw ValidationError("sample_region: count must be at least 1");
  const std::size_t n = inst.size();
  double threshold = 0.0;
  switch (region) {
    case RegionKind::Mutual:
      if (!inst.delta) throw ValidationError("sample_region: instance has no delta threshold");
      threshold = *inst.delta;
      break;
    case RegionKind::Owa:
      threshold = inst.epsilon;
      break;
    case RegionKind::WeightedDev:
      if (!inst.gamma1) throw ValidationError("sample_region: instance has no gamma1 threshold");
      threshold = *inst.gamma1;
      break;
    case RegionKind::Pairwise:
      if (!inst.gamma2) throw ValidationError("sample_region: instance has no gamma2 threshold");
      if (n < 2) throw ValidationError("sample_region: pairwise region undefined for n == 1");
      threshold = *inst.gamma2;
      break;
  }

  const AggregatorSpec phi = AggregatorSpec::owa(inst.owa_weights);
  const WeightVector w = inst.importance_or_uniform();
  Xoshiro256PlusPlus rng = Xoshiro256PlusPlus::for_stream(seed, 0);

  PointCloud cloud;
  cloud.dim = n;
  cloud.coords.reserve(static_cast<std::size_t>(count) * n);
  cloud.inside.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    OpinionVector x(detail::random_unit_vector(rng, n));
    double value = 0.0;
    switch (region) {
      case RegionKind::Mutual:
        value = kappa_mutual(x);
        break;
      case RegionKind::Owa:
        value = kappa_max_dev(x, phi);
        break;
      case RegionKind::WeightedDev:
        value = kappa_weighted_dev(x, w, phi);
        break;
      case RegionKind::Pairwise:
        value = kappa_pairwise(x, w);
        break;
    }
    cloud.coords.insert(cloud.coords.end(), x.begin(), x.end());
    cloud.inside.push_back(value <= threshold + kMembershipTol);
  }
  return cloud;
}

inline void write_point_cloud_csv(const PointCloud& cloud, std::ostream& out) {
  for (std::size_t d = 0; d < cloud.dim; ++d) out << 'x' << (d + 1) << ',';
  out << "inside\n";
  const std::size_t count = cloud.inside.size();
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t d = 0; d < cloud.dim; ++d) {
      out << detail::format_double(cloud.coords[i * cloud.dim + d]) << ',';
    }
    out << (cloud.inside[i] ? 1 : 0) << '\n';
  }
}

}  // namespace concord
