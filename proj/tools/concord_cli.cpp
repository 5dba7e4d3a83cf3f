#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "concord/concord.hpp"

namespace {

void emit_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw concord::ValidationError("cannot open output file: " + out_path);
  out << text;
}

void emit_json(const nlohmann::json& j, const std::string& out_path) {
  emit_text(j.dump(2) + "\n", out_path);
}

int run(int argc, char** argv) {
  CLI::App app{"minimum-cost consensus toolkit"};
  app.require_subcommand(1);

  std::string instance_path, out_path, format = "json", region_name, mode = "symmetric-linear",
              cost_mode = "uniform";
  double delta = 0.0, tau = 0.01, epsilon = 0.15, window_lo = 0.0, window_hi = 1.0;
  long max_iters = 10, trials = 100, count = 1000;
  std::size_t group_size = 4;
  std::uint64_t seed = 0;
  int threads = 1;
  bool no_nested_window = false;

  auto* measures = app.add_subcommand("measures", "evaluate the consensus measures of an instance");
  measures->add_option("--instance", instance_path, "instance JSON file")->required();
  measures->add_option("--out", out_path, "write the report to a file");

  auto* mcmc = app.add_subcommand("solve-mcmc", "minimum cost under a mutual-consensus radius");
  mcmc->add_option("--instance", instance_path)->required();
  auto* mcmc_delta = mcmc->add_option("--delta", delta, "radius (falls back to the instance)");
  auto* mcmc_wlo = mcmc->add_option("--window-lo", window_lo, "restrict opinions to [lo, hi]");
  auto* mcmc_whi = mcmc->add_option("--window-hi", window_hi);
  mcmc->add_option("--out", out_path);

  auto* bounds = app.add_subcommand("bounds", "radius and cost brackets for the OWA model");
  bounds->add_option("--instance", instance_path)->required();
  bounds->add_option("--out", out_path);

  auto* approx = app.add_subcommand("approx", "interpolating approximation of the OWA model");
  approx->add_option("--instance", instance_path)->required();
  approx->add_option("--max-iters", max_iters, "interpolation budget");
  approx->add_option("--tau", tau, "convergence tolerance");
  approx->add_flag("--no-nested-window", no_nested_window,
                   "disable windowing the inner radius solves");
  approx->add_option("--out", out_path);

  auto* exact = app.add_subcommand("exact", "exact OWA optimum by ordering enumeration");
  exact->add_option("--instance", instance_path)->required();
  exact->add_option("--threads", threads, "solve orderings concurrently");
  exact->add_option("--out", out_path);

  auto* symmetric = app.add_subcommand("symmetric", "exact linearized solver (uniform weights)");
  symmetric->add_option("--instance", instance_path)->required();
  symmetric->add_option("--out", out_path);

  auto* simulate = app.add_subcommand("simulate", "randomized comparison trials");
  simulate->add_option("--n", group_size, "group size")->required();
  simulate->add_option("--trials", trials);
  simulate->add_option("--epsilon", epsilon);
  simulate->add_option("--seed", seed);
  simulate->add_option("--mode", mode)
      ->check(CLI::IsMember({"symmetric-linear", "exact-enum"}));
  simulate->add_option("--cost-mode", cost_mode)->check(CLI::IsMember({"uniform", "random"}));
  simulate->add_option("--max-iters", max_iters);
  simulate->add_option("--tau", tau);
  simulate->add_option("--threads", threads);
  simulate->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
  simulate->add_option("--out", out_path);

  auto* sample = app.add_subcommand("sample-region", "label uniform samples by region membership");
  sample->add_option("--instance", instance_path)->required();
  sample->add_option("--region", region_name, "mutual, owa, weighted-dev or pairwise")
      ->required();
  sample->add_option("--count", count);
  sample->add_option("--seed", seed);
  sample->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (measures->parsed()) {
    const concord::Instance inst = concord::load_instance(instance_path);
    const concord::AggregatorSpec phi = concord::AggregatorSpec::owa(inst.owa_weights);
    const concord::WeightVector w = inst.importance_or_uniform();
    const concord::RegionMembership mem = concord::membership(inst.opinions, inst);
    nlohmann::json j{{"n", inst.size()},
                     {"kappa", concord::kappa_mutual(inst.opinions)},
                     {"owa_value", concord::aggregate(phi, inst.opinions)},
                     {"kappa_owa", concord::kappa_max_dev(inst.opinions, phi)},
                     {"kappa_weighted", concord::kappa_weighted_dev(inst.opinions, w, phi)}};
    if (inst.size() >= 2) j["kappa_pairwise"] = concord::kappa_pairwise(inst.opinions, w);
    nlohmann::json membership{{"epsilon", mem.owa}};
    if (mem.mutual) membership["delta"] = *mem.mutual;
    if (mem.weighted_dev) membership["gamma1"] = *mem.weighted_dev;
    if (mem.pairwise) membership["gamma2"] = *mem.pairwise;
    j["membership"] = membership;
    emit_json(j, out_path);
  } else if (mcmc->parsed()) {
    const concord::Instance inst = concord::load_instance(instance_path);
    double d;
    if (mcmc_delta->count() > 0) {
      d = delta;
    } else if (inst.delta) {
      d = *inst.delta;
    } else {
      throw concord::ValidationError("solve-mcmc needs --delta or a delta in the instance");
    }
    std::optional<std::pair<double, double>> window;
    if (mcmc_wlo->count() > 0 || mcmc_whi->count() > 0) window = {window_lo, window_hi};
    const concord::McmcResult r = concord::solve_mcmc(inst.opinions, inst.costs, d, window);
    emit_json(concord::to_json(r), out_path);
  } else if (bounds->parsed()) {
    const concord::Instance inst = concord::load_instance(instance_path);
    const concord::DeltaBounds db = concord::delta_bounds(inst.epsilon, inst.owa_weights);
    const auto [lo, hi] = concord::cost_bounds(inst);
    nlohmann::json j = concord::to_json(db);
    j["cost_lower"] = lo;
    j["cost_upper"] = hi;
    emit_json(j, out_path);
  } else if (approx->parsed()) {
    const concord::Instance inst = concord::load_instance(instance_path);
    if (!(inst.epsilon > 0.0 && inst.epsilon < 0.5)) {
      std::cerr << "warning: epsilon outside (0, 0.5); the radius bracket degenerates\n";
    }
    const concord::ApproxResult r =
        concord::ap_owamcc(inst, max_iters, tau, !no_nested_window);
    emit_json(concord::to_json(r), out_path);
  } else if (exact->parsed()) {
    const concord::Instance inst = concord::load_instance(instance_path);
    emit_json(concord::to_json(concord::solve_exact_enum(inst, threads)), out_path);
  } else if (symmetric->parsed()) {
    const concord::Instance inst = concord::load_instance(instance_path);
    emit_json(concord::to_json(concord::solve_symmetric_linear(inst)), out_path);
  } else if (simulate->parsed()) {
    concord::SimulationConfig cfg;
    cfg.n = group_size;
    cfg.trials = trials;
    cfg.epsilon = epsilon;
    cfg.seed = seed;
    cfg.mode = (mode == "exact-enum") ? concord::SimMode::ExactEnum
                                      : concord::SimMode::SymmetricLinear;
    cfg.cost_mode =
        (cost_mode == "random") ? concord::CostMode::Random : concord::CostMode::Uniform;
    cfg.ap.max_iters = max_iters;
    cfg.ap.tau = tau;
    cfg.threads = threads;
    const concord::SimulationReport report = concord::run_simulation(cfg);
    if (format == "csv") {
      std::ostringstream csv;
      concord::write_report_csv(report, csv);
      emit_text(csv.str(), out_path);
    } else {
      emit_json(concord::to_json(report), out_path);
    }
  } else if (sample->parsed()) {
    const concord::Instance inst = concord::load_instance(instance_path);
    const concord::RegionKind region = concord::region_from_name(region_name);
    const concord::PointCloud cloud = concord::sample_region(inst, region, count, seed);
    std::ostringstream csv;
    concord::write_point_cloud_csv(cloud, csv);
    emit_text(csv.str(), out_path);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const concord::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return 3;
  } catch (const concord::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return 4;
  } catch (const concord::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
