// model.hpp -- domain types for the partially-latent class model.
//
// A panel of J candidate pathogens is measured on cases and controls with up
// to three assay tiers: bronze (imperfect sensitivity and specificity, all
// subjects), silver (perfect specificity, cases only, first n_ss pathogens),
// and gold (perfect sensitivity and specificity, a subset of cases). Controls
// are known to have no infection, so their latent cause is 0 and never stored.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace plcm {

enum class PathogenClass { bacterium, virus, other };

struct PathogenPanel {
  std::vector<std::string> names;        // size J; pathogens with SS assays first
  std::size_t n_ss = 0;                  // J' <= J, prefix of `names`
  std::vector<PathogenClass> classes;    // optional metadata; empty or size J

  PathogenPanel() = default;
  PathogenPanel(std::vector<std::string> names_, std::size_t n_ss_,
                std::vector<PathogenClass> classes_ = {});

  std::size_t n_pathogens() const { return names.size(); }
  bool has_ss(std::size_t j) const { return j < n_ss; }

  /// The 11-pathogen panel (4 bacteria with SS assays, 7 viruses) used for
  /// realistic smoke tests.
  static PathogenPanel perch11();
};

struct SubjectRecord {
  std::string id;
  bool is_case = false;   // y
  bool has_gs = false;    // delta: GS measurements available (cases only)
  bool has_ss = false;    // SS measurements available (cases only)
  std::vector<std::uint8_t> brs;                // length J
  std::optional<std::vector<std::uint8_t>> ss;  // length J' when present
  std::optional<std::vector<std::uint8_t>> gs;  // length J when present

  /// Index of the single positive GS entry; requires a one-hot gs vector.
  std::size_t gs_cause() const;
};

struct Dataset {
  PathogenPanel panel;
  std::vector<SubjectRecord> subjects;

  Dataset() = default;
  Dataset(PathogenPanel panel_, std::vector<SubjectRecord> subjects_);

  std::size_t n_cases() const { return case_rows_.size(); }
  std::size_t n_controls() const { return subjects.size() - case_rows_.size(); }

  /// Row indices of cases in `subjects` order; latent assignments align to
  /// this ordering.
  const std::vector<std::size_t>& case_rows() const { return case_rows_; }

private:
  std::vector<std::size_t> case_rows_;
};

// gamma = (theta_brs, psi_brs, theta_ss, pi). GS rates are model constants
// (TPR 1, FPR 0) and SS FPRs are identically 0, so none of those are fields.
struct ModelParams {
  std::vector<double> pi;         // etiology simplex, length J
  std::vector<double> theta_brs;  // bronze TPR, length J
  std::vector<double> psi_brs;    // bronze FPR, length J
  std::vector<double> theta_ss;   // silver TPR, length J'
};

// One latent cause per case, 0-based pathogen index, aligned to
// Dataset::case_rows().
struct LatentAssignment {
  std::vector<std::size_t> causes;
};

struct Violation {
  std::string subject_id;  // empty for dataset-level rules
  std::string rule;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool pass() const { return violations.empty(); }
};

/// Checks every structural invariant of the dataset: measurement lengths,
/// controls carrying only bronze data, one-hot GS vectors, and SS vectors
/// with at most one positive (two positives are impossible under perfect
/// specificity with a single cause). Violations are data, not exceptions.
ValidationReport validate_dataset(const Dataset& ds);

}  // namespace plcm
