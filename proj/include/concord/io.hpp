#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "concord/errors.hpp"
#include "concord/mcmc.hpp"
#include "concord/owamcc.hpp"
#include "concord/types.hpp"

namespace concord {

namespace detail {

inline std::vector<double> json_number_array(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key)) throw ValidationError("instance: missing field '" + key + "'");
  const auto& v = j.at(key);
  if (!v.is_array()) throw ValidationError("instance: field '" + key + "' must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number()) {
      throw ValidationError("instance: field '" + key + "' must contain only numbers");
    }
    out.push_back(e.get<double>());
  }
  return out;
}

inline double json_number(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key)) throw ValidationError("instance: missing field '" + key + "'");
  const auto& v = j.at(key);
  if (!v.is_number()) throw ValidationError("instance: field '" + key + "' must be a number");
  return v.get<double>();
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

/// Parses an instance from its JSON object form. Keys: opinions, costs,
/// owa_weights, optional importance_weights, epsilon, optional delta,
/// gamma1, gamma2, optional normalize_costs (divide costs by their sum).
inline Instance instance_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("instance: top level must be a JSON object");

  auto wrap = [](const char* field, auto&& fn) {
    try {
      return fn();
    } catch (const ValidationError& e) {
      throw ValidationError("instance: field '" + std::string(field) + "': " + e.what());
    }
  };

  std::vector<double> opinions_raw = detail::json_number_array(j, "opinions");
  std::vector<double> costs_raw = detail::json_number_array(j, "costs");
  std::vector<double> owa_raw = detail::json_number_array(j, "owa_weights");

  OpinionVector opinions =
      wrap("opinions", [&] { return OpinionVector(std::move(opinions_raw)); });
  const bool normalize = j.value("normalize_costs", false);
  WeightVector costs = wrap("costs", [&] {
    return normalize ? WeightVector::normalized_from(costs_raw)
                     : WeightVector(std::move(costs_raw));
  });
  WeightVector owa_weights =
      wrap("owa_weights", [&] { return WeightVector(std::move(owa_raw)); });

  std::optional<WeightVector> importance;
  if (j.contains("importance_weights")) {
    std::vector<double> w_raw = detail::json_number_array(j, "importance_weights");
    importance = wrap("importance_weights", [&] { return WeightVector(std::move(w_raw)); });
  }

  const double epsilon = detail::json_number(j, "epsilon");
  std::optional<double> delta, gamma1, gamma2;
  if (j.contains("delta")) delta = detail::json_number(j, "delta");
  if (j.contains("gamma1")) gamma1 = detail::json_number(j, "gamma1");
  if (j.contains("gamma2")) gamma2 = detail::json_number(j, "gamma2");

  return Instance(std::move(opinions), std::move(costs), std::move(owa_weights),
                  std::move(importance), epsilon, delta, gamma1, gamma2);
}

inline nlohmann::json instance_to_json(const Instance& inst) {
  nlohmann::json j;
  j["opinions"] = inst.opinions.values();
  j["costs"] = inst.costs.values();
  j["owa_weights"] = inst.owa_weights.values();
  if (inst.importance_weights) j["importance_weights"] = inst.importance_weights->values();
  j["epsilon"] = inst.epsilon;
  if (inst.delta) j["delta"] = *inst.delta;
  if (inst.gamma1) j["gamma1"] = *inst.gamma1;
  if (inst.gamma2) j["gamma2"] = *inst.gamma2;
  return j;
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open instance file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("instance '" + path + "': " + e.what());
  }
  try {
    return instance_from_json(j);
  } catch (const ValidationError& e) {
    throw ValidationError("instance '" + path + "': " + e.what());
  }
}

inline void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open file for writing: " + path);
  out << instance_to_json(inst).dump(2) << '\n';
}

inline nlohmann::json to_json(const McmcResult& r) {
  return nlohmann::json{{"x", r.x.values()},
                        {"cost", r.cost},
                        {"interval", {r.interval_lo, r.interval_hi}},
                        {"breakpoints_examined", r.breakpoints_examined}};
}

inline nlohmann::json to_json(const DeltaBounds& b) {
  return nlohmann::json{{"delta_minus", b.delta_minus}, {"delta_plus", b.delta_plus}};
}

inline nlohmann::json to_json(const ApproxResult& r) {
  return nlohmann::json{{"x", r.x.values()},
                        {"cost", r.cost},
                        {"delta_star", r.delta_star},
                        {"kappa_owa", r.kappa_owa},
                        {"iterations", r.iterations},
                        {"cost_lower", r.cost_lower},
                        {"cost_upper", r.cost_upper},
                        {"converged", r.converged}};
}

inline nlohmann::json to_json(const ExactResult& r) {
  return nlohmann::json{{"x", r.x.values()},
                        {"cost", r.cost},
                        {"ordering", r.ordering},
                        {"lps_solved", r.lps_solved}};
}

inline nlohmann::json to_json(const Solution& s) {
  nlohmann::json diag{{"kappa", s.diagnostics.kappa}, {"kappa_owa", s.diagnostics.kappa_owa}};
  if (s.diagnostics.kappa_weighted) diag["kappa_weighted"] = *s.diagnostics.kappa_weighted;
  if (s.diagnostics.kappa_pairwise) diag["kappa_pairwise"] = *s.diagnostics.kappa_pairwise;
  return nlohmann::json{{"x", s.x.values()},
                        {"cost", s.cost},
                        {"diagnostics", diag},
                        {"method", s.method},
                        {"lp_iterations", s.lp_iterations}};
}

}  // namespace concord
