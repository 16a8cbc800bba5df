// Command-line front end for the case-control etiology sampler.
//
// Subcommands:
//   simulate         draw a synthetic dataset from configured truth
//   fit              run the Gibbs sampler on a dataset and write outputs
//   predict          score bronze-standard patterns against saved draws
//   check            recompute posterior predictive checks from saved draws
//   identifiability  audit the measurement-map Jacobian at interior points
//   study            run a replicated simulation study across design arms
//
// Errors are reported on stderr as a single-line JSON record and a nonzero
// exit status, so callers can parse failures mechanically.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "plcm/io.hpp"

namespace {

struct CliOverrides {
  std::uint64_t seed = 0;
  std::size_t chains = 0;
  std::size_t burnin = 0;
  bool burnin_set = false;
  std::size_t keep = 0;
  std::string out_dir;
};

plcm::RunConfig load_with_overrides(const std::string& config_path,
                                    const CliOverrides& ov) {
  plcm::RunConfig cfg = plcm::load_config(config_path);
  if (ov.seed != 0) cfg.mcmc.seed = ov.seed;
  if (ov.chains != 0) cfg.mcmc.n_chains = ov.chains;
  if (ov.burnin_set) cfg.mcmc.n_burnin = ov.burnin;
  if (ov.keep != 0) cfg.mcmc.n_keep = ov.keep;
  if (!ov.out_dir.empty()) cfg.out_dir = ov.out_dir;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian cause assignment for case-control etiology studies"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand

  std::string config_path;
  CliOverrides ov;
  app.add_option("--config", config_path, "JSON run configuration")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--seed", ov.seed, "override mcmc.seed (nonzero)");
  app.add_option("--chains", ov.chains, "override mcmc.chains (nonzero)");
  app.add_option("--burnin", ov.burnin, "override mcmc.burnin")
      ->each([&](const std::string&) { ov.burnin_set = true; });
  app.add_option("--keep", ov.keep, "override mcmc.keep (nonzero)");
  app.add_option("--out", ov.out_dir, "override output directory");

  CLI::App* c_sim = app.add_subcommand("simulate", "draw a synthetic dataset");
  CLI::App* c_fit = app.add_subcommand("fit", "run the Gibbs sampler");
  CLI::App* c_pred =
      app.add_subcommand("predict", "score bronze patterns from saved draws");
  std::string patterns_path;
  c_pred->add_option("--patterns", patterns_path, "CSV of brs_ patterns")
      ->required()
      ->check(CLI::ExistingFile);
  CLI::App* c_check =
      app.add_subcommand("check", "posterior predictive checks from draws");
  std::string draws_path;
  c_check->add_option("--draws", draws_path, "draws CSV (default: config)");
  CLI::App* c_ident =
      app.add_subcommand("identifiability", "Jacobian spectrum audit");
  CLI::App* c_study =
      app.add_subcommand("study", "replicated simulation study");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    nlohmann::json err;
    err["error"] = e.what();
    std::cerr << err.dump() << "\n";
    return app.exit(e, std::cerr, std::cerr);
  }

  try {
    const plcm::RunConfig cfg = load_with_overrides(config_path, ov);
    if (c_sim->parsed()) {
      plcm::cmd_simulate(cfg);
    } else if (c_fit->parsed()) {
      plcm::cmd_fit(cfg);
    } else if (c_pred->parsed()) {
      plcm::cmd_predict(cfg, patterns_path);
    } else if (c_check->parsed()) {
      plcm::cmd_check(cfg,
                      draws_path.empty() ? cfg.draws_path : draws_path);
    } else if (c_ident->parsed()) {
      plcm::cmd_identifiability(cfg);
    } else if (c_study->parsed()) {
      plcm::cmd_study(cfg);
    }
  } catch (const plcm::IoError& e) {
    nlohmann::json err;
    err["error"] = e.what();
    if (!e.file().empty()) err["file"] = e.file();
    if (e.line() > 0) err["line"] = e.line();
    if (!e.field().empty()) err["field"] = e.field();
    std::cerr << err.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["error"] = e.what();
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 0;
}
