#include "plcm/model.hpp"

#include <stdexcept>
#include <unordered_set>

namespace plcm {

PathogenPanel::PathogenPanel(std::vector<std::string> names_, std::size_t n_ss_,
                             std::vector<PathogenClass> classes_)
    : names(std::move(names_)), n_ss(n_ss_), classes(std::move(classes_)) {
  if (names.empty()) throw std::invalid_argument("panel: need at least one pathogen");
  if (n_ss > names.size())
    throw std::invalid_argument("panel: SS panel larger than pathogen list");
  std::unordered_set<std::string> seen;
  for (const auto& n : names) {
    if (n.empty()) throw std::invalid_argument("panel: empty pathogen name");
    if (!seen.insert(n).second)
      throw std::invalid_argument("panel: duplicate pathogen name '" + n + "'");
  }
  if (!classes.empty() && classes.size() != names.size())
    throw std::invalid_argument("panel: class tags must match pathogen count");
}

PathogenPanel PathogenPanel::perch11() {
  using PC = PathogenClass;
  return PathogenPanel(
      {"HINF", "PNEU", "SASP", "SAUR", "ADENO", "COR_43", "FLU_C", "HMPV_A_B",
       "PARA1", "RHINO", "RSV_A_B"},
      4,
      {PC::bacterium, PC::bacterium, PC::bacterium, PC::bacterium, PC::virus,
       PC::virus, PC::virus, PC::virus, PC::virus, PC::virus, PC::virus});
}

std::size_t SubjectRecord::gs_cause() const {
  if (!gs) throw std::logic_error("gs_cause: no GS measurements");
  std::size_t idx = gs->size();
  std::size_t positives = 0;
  for (std::size_t j = 0; j < gs->size(); ++j) {
    if ((*gs)[j]) {
      idx = j;
      ++positives;
    }
  }
  if (positives != 1) throw std::logic_error("gs_cause: GS vector is not one-hot");
  return idx;
}

Dataset::Dataset(PathogenPanel panel_, std::vector<SubjectRecord> subjects_)
    : panel(std::move(panel_)), subjects(std::move(subjects_)) {
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    if (subjects[i].is_case) case_rows_.push_back(i);
  }
}

ValidationReport validate_dataset(const Dataset& ds) {
  ValidationReport report;
  const std::size_t n_path = ds.panel.n_pathogens();
  const std::size_t n_ss = ds.panel.n_ss;
  auto flag = [&](const SubjectRecord& s, std::string rule) {
    report.violations.push_back({s.id, std::move(rule)});
  };

  for (const auto& s : ds.subjects) {
    if (s.brs.size() != n_path) flag(s, "bronze vector length does not match panel");
    for (auto v : s.brs)
      if (v > 1) flag(s, "bronze entries must be 0/1");

    if (!s.is_case) {
      if (s.has_gs || s.gs) flag(s, "controls carry no GS data");
      if (s.has_ss || s.ss) flag(s, "controls carry no SS data");
      continue;
    }

    if (s.has_gs != s.gs.has_value())
      flag(s, "gs_available flag inconsistent with GS measurements");
    if (s.gs) {
      if (s.gs->size() != n_path) {
        flag(s, "GS vector length does not match panel");
      } else {
        std::size_t positives = 0;
        for (auto v : *s.gs) {
          if (v > 1) flag(s, "GS entries must be 0/1");
          positives += (v == 1);
        }
        if (positives != 1) flag(s, "GS vector must be one-hot");
      }
    }

    if (s.has_ss != s.ss.has_value())
      flag(s, "ss_available flag inconsistent with SS measurements");
    if (s.ss) {
      if (s.ss->size() != n_ss) {
        flag(s, "SS vector length does not match SS panel");
      } else {
        std::size_t positives = 0;
        for (auto v : *s.ss) {
          if (v > 1) flag(s, "SS entries must be 0/1");
          positives += (v == 1);
        }
        if (positives >= 2)
          flag(s, "SS has >=2 positives (zero-likelihood record)");
      }
    }
  }
  return report;
}

}  // namespace plcm
