#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "osgm/acceptance.hpp"
#include "osgm/dynamics.hpp"
#include "osgm/harness.hpp"

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos <= s.size()) {
    const size_t c = s.find(',', pos);
    const std::string tok =
        s.substr(pos, c == std::string::npos ? std::string::npos : c - pos);
    if (!tok.empty()) out.push_back(tok);
    if (c == std::string::npos) break;
    pos = c + 1;
  }
  return out;
}

int cmd_run(const std::string& config_path, long budget, bool budget_set,
            double tol, bool tol_set, unsigned long long seed, bool seed_set,
            const std::string& out_dir, bool out_set,
            const std::string& algorithms, const std::string& grid) {
  osgm::ExperimentConfig cfg =
      config_path.empty()
          ? osgm::default_suite()
          : osgm::experiment_config_from_json(osgm::load_text_file(config_path));
  if (budget_set) cfg.budget = budget;
  if (tol_set) cfg.tol = tol;
  if (seed_set) cfg.seed = seed;
  if (out_set) cfg.out_dir = out_dir;
  if (!algorithms.empty()) {
    cfg.algorithms.clear();
    for (const std::string& name : split_list(algorithms)) {
      osgm::AlgorithmSpec a;
      a.name = name;
      a.grid = grid.empty() ? osgm::default_grid(name) : split_list(grid);
      cfg.algorithms.push_back(std::move(a));
    }
  } else if (!grid.empty()) {
    for (osgm::AlgorithmSpec& a : cfg.algorithms) a.grid = split_list(grid);
  }
  const osgm::StatsTable table = osgm::run_experiment(cfg);
  if (cfg.out_dir.empty()) {
    std::cout << table.to_csv();
    std::cerr << table.summary_csv();
  } else {
    std::filesystem::create_directories(cfg.out_dir);
    const auto dir = std::filesystem::path(cfg.out_dir);
    osgm::save_text_file((dir / "stats.csv").string(), table.to_csv());
    osgm::save_text_file((dir / "summary.csv").string(),
                         table.summary_csv());
    osgm::save_text_file((dir / "config.json").string(),
                         osgm::experiment_config_to_json(cfg) + "\n");
    std::cout << table.summary_csv();
  }
  return 0;
}

int cmd_gen(const std::string& kind, int n, int m, double kappa,
            unsigned long long seed, const std::string& out) {
  const osgm::SparseDataset ds =
      osgm::generate_synthetic(kind, n, m, kappa, seed);
  const std::string text = osgm::serialize_libsvm(ds);
  if (out.empty())
    std::cout << text;
  else
    osgm::save_text_file(out, text);
  return 0;
}

int cmd_dynamics(const std::string& kappas, int n, const std::string& out) {
  std::vector<double> ks;
  for (const std::string& tok : split_list(kappas))
    ks.push_back(std::stod(tok));
  const std::string csv = osgm::sweep_csv(osgm::radius_sweep(ks, n));
  if (out.empty())
    std::cout << csv;
  else
    osgm::save_text_file(out, csv);
  return 0;
}

int cmd_spike(double kappa, double eta, long target,
              const std::string& out) {
  const osgm::SpikeResult res = osgm::spike_scenario(kappa, eta, target);
  std::string json = "{\"found\":";
  json += res.found ? "true" : "false";
  json += ",\"delta\":" + osgm::g17(res.delta);
  json += ",\"spike_iter\":" + std::to_string(res.spike_iter);
  json += ",\"max_ratio\":" + osgm::g17(res.max_ratio);
  json += "}\n";
  if (!out.empty()) {
    std::filesystem::create_directories(out);
    const auto dir = std::filesystem::path(out);
    osgm::save_text_file((dir / "spike_trace.csv").string(),
                         res.trace.to_csv());
    osgm::save_text_file((dir / "spike.json").string(), json);
  }
  std::cout << json;
  return 0;
}

int cmd_check() {
  const std::vector<osgm::CriterionResult> results = osgm::run_acceptance();
  std::cout << osgm::acceptance_report(results);
  int failed = 0;
  for (const auto& r : results)
    if (!r.pass) ++failed;
  return failed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"online scaled gradient methods: solvers, dynamics, harness"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run an experiment suite");
  std::string config_path, run_out, algorithms, grid;
  long budget = 1000;
  double tol = 1e-3;
  unsigned long long seed = 1;
  run->add_option("--config", config_path,
                  "experiment config JSON (omit for the built-in suite)");
  auto* obudget =
      run->add_option("--budget", budget, "gradient oracle budget per run");
  auto* otol = run->add_option("--tol", tol, "stop when ||grad||_inf <= tol");
  auto* oseed = run->add_option("--seed", seed, "seed for shared starts");
  auto* oout = run->add_option(
      "--out", run_out, "output directory for stats.csv, summary.csv, traces");
  run->add_option("--algorithms", algorithms,
                  "comma list replacing the configured algorithms");
  run->add_option("--grid", grid,
                  "comma list of grid tokens (number, 1/L, default)");

  auto* gen = app.add_subcommand("gen", "emit a synthetic dataset");
  std::string kind = "quadratic", gen_out;
  int gn = 20, gm = 200;
  double gkappa = 100.0;
  unsigned long long gseed = 1;
  gen->add_option("--kind", kind, "quadratic | logistic | svm | lasso");
  gen->add_option("--n", gn, "feature count");
  gen->add_option("--m", gm, "sample count");
  gen->add_option("--kappa", gkappa, "target condition number (quadratic)");
  gen->add_option("--seed", gseed, "generator seed");
  gen->add_option("--out", gen_out, "output file (stdout when omitted)");

  auto* dyn = app.add_subcommand("dynamics", "orbit spectral-radius sweep");
  std::string kappas = "2,4,10,100", dyn_out;
  int dn = 2;
  dyn->add_option("--kappas", kappas, "comma list of condition numbers");
  dyn->add_option("--n", dn, "spectrum size");
  dyn->add_option("--out", dyn_out, "output CSV file (stdout when omitted)");

  auto* spike = app.add_subcommand("spike", "search a divergence scenario");
  double skappa = 1e4, seta = 1e-4;
  long starget = 200;
  std::string spike_out;
  spike->add_option("--kappa", skappa, "condition number");
  spike->add_option("--eta", seta, "learning rate");
  spike->add_option("--target", starget, "target spike iteration");
  spike->add_option("--out", spike_out,
                    "output directory for spike_trace.csv and spike.json");

  auto* check = app.add_subcommand("check", "run the acceptance battery");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(config_path, budget, obudget->count() > 0, tol,
                     otol->count() > 0, seed, oseed->count() > 0, run_out,
                     oout->count() > 0, algorithms, grid);
    if (gen->parsed()) return cmd_gen(kind, gn, gm, gkappa, gseed, gen_out);
    if (dyn->parsed()) return cmd_dynamics(kappas, dn, dyn_out);
    if (spike->parsed()) return cmd_spike(skappa, seta, starget, spike_out);
    if (check->parsed()) return cmd_check();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
