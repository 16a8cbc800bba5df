// io.hpp -- configuration, file formats, and command entry points.
//
// Formats (all plain text, documented in README.md):
//   dataset CSV   id,case,gs_available,ss_available,brs_<name>...,
//                 ss_<name>...,gs_<name>...; binary cells 0/1, NA only where
//                 the availability flags permit; no comment lines, so a
//                 read/write cycle is byte-identical.
//   draws CSV     chain,iter,pi_<name>...,theta_brs_<name>...,
//                 psi_brs_<name>...,theta_ss_<name>...; "# " comment lines
//                 carry the resolved run configuration.
//   others        summary, pattern PPC, predictions, study reports as CSV;
//                 SLOR and identifiability reports as labeled text; region
//                 contours as CSV with bandwidth metadata.
// Floating-point values are written with shortest-round-trip formatting, so
// files reproduce the in-memory doubles exactly.
//
// All writers are atomic (temp file + rename). Failures throw IoError with
// file/line/field context; the CLI turns those into machine-readable error
// records on stderr.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "plcm/diagnostics.hpp"
#include "plcm/identifiability.hpp"
#include "plcm/model.hpp"
#include "plcm/prediction.hpp"
#include "plcm/priors.hpp"
#include "plcm/sampler.hpp"
#include "plcm/simplex_region.hpp"
#include "plcm/simulate.hpp"

namespace plcm {

class IoError : public std::runtime_error {
public:
  IoError(const std::string& message, std::string file = "",
          std::size_t line = 0, std::string field = "");
  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

private:
  std::string file_;
  std::size_t line_ = 0;
  std::string field_;
};

struct RunConfig {
  PathogenPanel panel;
  HyperPriors priors;
  McmcOptions mcmc;
  std::string out_dir = ".";
  std::string dataset_path;            // fit / check input
  std::string draws_path;              // predict input
  std::optional<SimTruth> sim;         // simulate / study block
  std::size_t study_replicates = 1;
  std::size_t ppc_top_k = 10;
  std::uint64_t ppc_seed = 0;          // 0: derived from mcmc.seed
  std::size_t ident_points = 10;
  double ident_fd_step = 1e-5;
  std::uint64_t ident_seed = 0;        // 0: derived from mcmc.seed
  std::optional<ModelParams> ident_point;  // fixed evaluation point
};

/// Parses and validates the JSON run configuration; unknown pathogen panels,
/// malformed prior specifications, and out-of-range values raise IoError
/// with the offending field named. Priors may be explicit Beta pairs or
/// (lo, hi) ranges resolved through quantile-matching elicitation.
RunConfig load_config(const std::string& path);

/// The fully-resolved configuration as a single-line JSON string; embedded
/// as provenance in every output that allows comments.
std::string provenance_json(const RunConfig& cfg);

// --- dataset files ---
void write_dataset_csv(const std::string& path, const Dataset& ds);
Dataset read_dataset_csv(const std::string& path);

// --- draws files ---
void write_draws_csv(const std::string& path, const ChainSet& chains,
                     const std::string& provenance);
/// Rebuilds panel and chains from a draws file. Assignment frequencies are
/// not stored in the file, so within-sample classification is unavailable on
/// a reloaded ChainSet.
ChainSet read_draws_csv(const std::string& path);

// --- analysis outputs ---
void write_summary_csv(const std::string& path, const PosteriorSummary& s,
                       const std::string& provenance);
void write_pattern_ppc_csv(const std::string& path, const PatternPpc& ppc,
                           const PathogenPanel& panel,
                           const std::string& provenance);
void write_slor_txt(const std::string& path, const SlorTable& table,
                    const PathogenPanel& panel, const std::string& provenance);
void write_region_csv(const std::string& path, const SimplexRegion& region,
                      const PathogenPanel& panel,
                      const std::string& provenance);
void write_case_probabilities_csv(const std::string& path, const Dataset& ds,
                                  const ChainSet& chains,
                                  const std::string& provenance);
void write_identifiability_txt(const std::string& path,
                               const std::vector<IdentifiabilityReport>& reports,
                               const std::string& provenance);
void write_study_csv(const std::string& replicates_path,
                     const std::string& summary_path, const StudyReport& report,
                     const PathogenPanel& panel, const std::string& provenance);
void write_truth_json(const std::string& path, const SimTruth& truth,
                      const PathogenPanel& panel);

// --- prediction inputs/outputs ---
/// Patterns file: header brs_<name> per panel pathogen, rows of 0/1 cells.
std::vector<std::vector<std::uint8_t>> read_patterns_csv(
    const std::string& path, const PathogenPanel& panel);
void write_predictions_csv(const std::string& path,
                           const std::vector<std::vector<std::uint8_t>>& patterns,
                           const std::vector<EtiologyPrediction>& predictions,
                           const PathogenPanel& panel,
                           const std::string& provenance);

// --- commands (shared by the CLI and end-to-end tests) ---
void cmd_simulate(const RunConfig& cfg);
void cmd_fit(const RunConfig& cfg);
void cmd_predict(const RunConfig& cfg, const std::string& patterns_path);
void cmd_check(const RunConfig& cfg, const std::string& draws_path);
void cmd_identifiability(const RunConfig& cfg);
void cmd_study(const RunConfig& cfg);

}  // namespace plcm
