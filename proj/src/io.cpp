#include "plcm/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "json.hpp"

namespace plcm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string compose_error(const std::string& message, const std::string& file,
                          std::size_t line, const std::string& field) {
  std::ostringstream os;
  if (!file.empty()) {
    os << file;
    if (line > 0) os << ":" << line;
    os << ": ";
  }
  os << message;
  if (!field.empty()) os << " [field: " << field << "]";
  return os.str();
}

std::string fmt_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& cell, const std::string& file,
                    std::size_t line, const std::string& field) {
  double v = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw IoError("cannot parse number '" + cell + "'", file, line, field);
  }
  return v;
}

std::uint64_t parse_u64(const std::string& cell, const std::string& file,
                        std::size_t line, const std::string& field) {
  std::uint64_t v = 0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw IoError("cannot parse integer '" + cell + "'", file, line, field);
  }
  return v;
}

std::uint8_t parse_bit(const std::string& cell, const std::string& file,
                       std::size_t line, const std::string& field) {
  if (cell == "0") return 0;
  if (cell == "1") return 1;
  throw IoError("expected 0 or 1, got '" + cell + "'", file, line, field);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

void check_token_safe(const std::string& token, const std::string& what) {
  if (token.empty()) {
    throw IoError(what + " must not be empty");
  }
  if (token.find_first_of(",#\"\n\r") != std::string::npos) {
    throw IoError(what + " '" + token + "' contains characters unsafe for CSV");
  }
}

void atomic_stream(const std::string& path,
                   const std::function<void(std::ostream&)>& writer) {
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing", tmp);
    writer(out);
    out.flush();
    if (!out) throw IoError("write failed", tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("rename failed: " + ec.message(), path);
}

// Reads all lines, tracking 1-based numbers; returns (line, number) pairs
// with blank lines dropped. Comment lines ('#') are returned too so callers
// can harvest provenance, flagged by the bool.
struct FileLine {
  std::string text;
  std::size_t number;
  bool comment;
};

std::vector<FileLine> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading", path);
  std::vector<FileLine> lines;
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty()) continue;
    lines.push_back({raw, number, raw.front() == '#'});
  }
  return lines;
}

std::string pattern_bits(const std::vector<std::uint8_t>& pattern) {
  std::string s(pattern.size(), '0');
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i]) s[i] = '1';
  }
  return s;
}

}  // namespace

IoError::IoError(const std::string& message, std::string file,
                 std::size_t line, std::string field)
    : std::runtime_error(compose_error(message, file, line, field)),
      file_(std::move(file)),
      line_(line),
      field_(std::move(field)) {}

// ---------------------------------------------------------------- dataset

void write_dataset_csv(const std::string& path, const Dataset& ds) {
  const PathogenPanel& panel = ds.panel;
  const std::size_t n_path = panel.n_pathogens();
  const std::size_t n_ss = panel.n_ss;
  for (const auto& n : panel.names) check_token_safe(n, "pathogen name");

  atomic_stream(path, [&](std::ostream& os) {
    os << "id,case,gs_available,ss_available";
    for (const auto& n : panel.names) os << ",brs_" << n;
    for (std::size_t j = 0; j < n_ss; ++j) os << ",ss_" << panel.names[j];
    for (const auto& n : panel.names) os << ",gs_" << n;
    os << "\n";
    for (const SubjectRecord& s : ds.subjects) {
      check_token_safe(s.id, "subject id");
      os << s.id << ',' << (s.is_case ? 1 : 0) << ',' << (s.has_gs ? 1 : 0)
         << ',' << (s.has_ss ? 1 : 0);
      for (std::size_t j = 0; j < n_path; ++j) {
        os << ',' << (s.brs[j] ? 1 : 0);
      }
      for (std::size_t j = 0; j < n_ss; ++j) {
        if (s.has_ss && s.ss) {
          os << ',' << ((*s.ss)[j] ? 1 : 0);
        } else {
          os << ",NA";
        }
      }
      for (std::size_t j = 0; j < n_path; ++j) {
        if (s.has_gs && s.gs) {
          os << ',' << ((*s.gs)[j] ? 1 : 0);
        } else {
          os << ",NA";
        }
      }
      os << "\n";
    }
  });
}

Dataset read_dataset_csv(const std::string& path) {
  const std::vector<FileLine> lines = read_lines(path);
  std::size_t i = 0;
  while (i < lines.size() && lines[i].comment) ++i;
  if (i >= lines.size()) throw IoError("no header row found", path);

  const FileLine& header = lines[i];
  const std::vector<std::string> cols = split_csv(header.text);
  const std::vector<std::string> fixed = {"id", "case", "gs_available",
                                          "ss_available"};
  if (cols.size() < 5) {
    throw IoError("header has too few columns", path, header.number);
  }
  for (std::size_t c = 0; c < fixed.size(); ++c) {
    if (cols[c] != fixed[c]) {
      throw IoError("expected header column '" + fixed[c] + "', got '" +
                        cols[c] + "'",
                    path, header.number, fixed[c]);
    }
  }
  std::size_t c = fixed.size();
  std::vector<std::string> names;
  while (c < cols.size() && cols[c].rfind("brs_", 0) == 0) {
    names.push_back(cols[c].substr(4));
    ++c;
  }
  if (names.empty()) {
    throw IoError("no brs_ columns found", path, header.number);
  }
  std::size_t n_ss = 0;
  while (c < cols.size() && cols[c].rfind("ss_", 0) == 0) {
    if (n_ss >= names.size() || cols[c].substr(3) != names[n_ss]) {
      throw IoError("ss_ columns must mirror the leading brs_ names", path,
                    header.number, cols[c]);
    }
    ++n_ss;
    ++c;
  }
  for (std::size_t j = 0; j < names.size(); ++j, ++c) {
    if (c >= cols.size() || cols[c] != "gs_" + names[j]) {
      throw IoError("gs_ columns must mirror all brs_ names", path,
                    header.number, "gs_" + names[j]);
    }
  }
  if (c != cols.size()) {
    throw IoError("unexpected trailing column '" + cols[c] + "'", path,
                  header.number, cols[c]);
  }

  PathogenPanel panel;
  try {
    panel = PathogenPanel(names, n_ss);
  } catch (const std::invalid_argument& e) {
    throw IoError(std::string("invalid panel in header: ") + e.what(), path,
                  header.number);
  }

  const std::size_t n_path = names.size();
  std::vector<SubjectRecord> subjects;
  for (++i; i < lines.size(); ++i) {
    if (lines[i].comment) continue;
    const std::vector<std::string> cells = split_csv(lines[i].text);
    const std::size_t ln = lines[i].number;
    if (cells.size() != cols.size()) {
      throw IoError("row has " + std::to_string(cells.size()) +
                        " cells, header has " + std::to_string(cols.size()),
                    path, ln);
    }
    SubjectRecord s;
    s.id = cells[0];
    s.is_case = parse_bit(cells[1], path, ln, "case") != 0;
    s.has_gs = parse_bit(cells[2], path, ln, "gs_available") != 0;
    s.has_ss = parse_bit(cells[3], path, ln, "ss_available") != 0;
    std::size_t idx = 4;
    s.brs.resize(n_path);
    for (std::size_t j = 0; j < n_path; ++j, ++idx) {
      s.brs[j] = parse_bit(cells[idx], path, ln, "brs_" + names[j]);
    }
    if (s.has_ss) {
      std::vector<std::uint8_t> ss(n_ss);
      for (std::size_t j = 0; j < n_ss; ++j, ++idx) {
        ss[j] = parse_bit(cells[idx], path, ln, "ss_" + names[j]);
      }
      s.ss = std::move(ss);
    } else {
      for (std::size_t j = 0; j < n_ss; ++j, ++idx) {
        if (cells[idx] != "NA") {
          throw IoError("ss cell must be NA when ss_available=0", path, ln,
                        "ss_" + names[j]);
        }
      }
    }
    if (s.has_gs) {
      std::vector<std::uint8_t> gs(n_path);
      for (std::size_t j = 0; j < n_path; ++j, ++idx) {
        gs[j] = parse_bit(cells[idx], path, ln, "gs_" + names[j]);
      }
      s.gs = std::move(gs);
    } else {
      for (std::size_t j = 0; j < n_path; ++j, ++idx) {
        if (cells[idx] != "NA") {
          throw IoError("gs cell must be NA when gs_available=0", path, ln,
                        "gs_" + names[j]);
        }
      }
    }
    subjects.push_back(std::move(s));
  }
  return Dataset(std::move(panel), std::move(subjects));
}

// ------------------------------------------------------------------ draws

void write_draws_csv(const std::string& path, const ChainSet& chains,
                     const std::string& provenance) {
  const std::vector<std::string> labels = parameter_labels(chains.panel);
  atomic_stream(path, [&](std::ostream& os) {
    if (!provenance.empty()) os << "# " << provenance << "\n";
    os << "chain,iter";
    for (const auto& l : labels) os << ',' << l;
    os << "\n";
    for (std::size_t ci = 0; ci < chains.chains.size(); ++ci) {
      const ChainDraws& chain = chains.chains[ci];
      for (std::size_t t = 0; t < chain.draws.size(); ++t) {
        os << ci << ',' << chains.iteration_of(t);
        const std::vector<double> flat = flatten_params(chain.draws[t]);
        for (double v : flat) os << ',' << fmt_double(v);
        os << "\n";
      }
    }
  });
}

ChainSet read_draws_csv(const std::string& path) {
  const std::vector<FileLine> lines = read_lines(path);
  std::string provenance;
  std::size_t i = 0;
  for (; i < lines.size() && lines[i].comment; ++i) {
    const std::string& t = lines[i].text;
    const std::size_t brace = t.find('{');
    if (provenance.empty() && brace != std::string::npos) {
      provenance = t.substr(brace);
    }
  }
  if (i >= lines.size()) throw IoError("no header row found", path);
  const FileLine& header = lines[i];
  const std::vector<std::string> cols = split_csv(header.text);
  if (cols.size() < 3 || cols[0] != "chain" || cols[1] != "iter") {
    throw IoError("draws header must start with chain,iter", path,
                  header.number);
  }

  std::vector<std::string> names;
  std::size_t c = 2;
  while (c < cols.size() && cols[c].rfind("pi_", 0) == 0) {
    names.push_back(cols[c].substr(3));
    ++c;
  }
  const std::size_t n_path = names.size();
  if (n_path == 0) throw IoError("no pi_ columns found", path, header.number);
  for (std::size_t j = 0; j < n_path; ++j, ++c) {
    if (c >= cols.size() || cols[c] != "theta_brs_" + names[j]) {
      throw IoError("expected column theta_brs_" + names[j], path,
                    header.number);
    }
  }
  for (std::size_t j = 0; j < n_path; ++j, ++c) {
    if (c >= cols.size() || cols[c] != "psi_brs_" + names[j]) {
      throw IoError("expected column psi_brs_" + names[j], path,
                    header.number);
    }
  }
  std::size_t n_ss = 0;
  while (c < cols.size() && cols[c].rfind("theta_ss_", 0) == 0) {
    if (n_ss >= n_path || cols[c].substr(9) != names[n_ss]) {
      throw IoError("theta_ss_ columns must mirror the leading pi_ names",
                    path, header.number, cols[c]);
    }
    ++n_ss;
    ++c;
  }
  if (c != cols.size()) {
    throw IoError("unexpected trailing column '" + cols[c] + "'", path,
                  header.number, cols[c]);
  }

  ChainSet cs;
  try {
    cs.panel = PathogenPanel(names, n_ss);
  } catch (const std::invalid_argument& e) {
    throw IoError(std::string("invalid panel in header: ") + e.what(), path,
                  header.number);
  }

  std::map<std::uint64_t, std::size_t> chain_slot;
  std::vector<std::uint64_t> first_iters, second_iters;
  for (++i; i < lines.size(); ++i) {
    if (lines[i].comment) continue;
    const std::vector<std::string> cells = split_csv(lines[i].text);
    const std::size_t ln = lines[i].number;
    if (cells.size() != cols.size()) {
      throw IoError("row has " + std::to_string(cells.size()) +
                        " cells, header has " + std::to_string(cols.size()),
                    path, ln);
    }
    const std::uint64_t chain_id = parse_u64(cells[0], path, ln, "chain");
    const std::uint64_t iter = parse_u64(cells[1], path, ln, "iter");
    auto it = chain_slot.find(chain_id);
    if (it == chain_slot.end()) {
      it = chain_slot.insert({chain_id, cs.chains.size()}).first;
      cs.chains.emplace_back();
      first_iters.push_back(iter);
      second_iters.push_back(0);
    } else if (cs.chains[it->second].draws.size() == 1) {
      second_iters[it->second] = iter;
    }
    ModelParams p;
    p.pi.resize(n_path);
    p.theta_brs.resize(n_path);
    p.psi_brs.resize(n_path);
    p.theta_ss.resize(n_ss);
    std::size_t idx = 2;
    for (std::size_t j = 0; j < n_path; ++j, ++idx) {
      p.pi[j] = parse_double(cells[idx], path, ln, cols[idx]);
    }
    for (std::size_t j = 0; j < n_path; ++j, ++idx) {
      p.theta_brs[j] = parse_double(cells[idx], path, ln, cols[idx]);
    }
    for (std::size_t j = 0; j < n_path; ++j, ++idx) {
      p.psi_brs[j] = parse_double(cells[idx], path, ln, cols[idx]);
    }
    for (std::size_t j = 0; j < n_ss; ++j, ++idx) {
      p.theta_ss[j] = parse_double(cells[idx], path, ln, cols[idx]);
    }
    cs.chains[it->second].draws.push_back(std::move(p));
  }
  if (cs.chains.empty()) throw IoError("draws file holds no draws", path);

  // Reconstruct iteration metadata; the seed comes from provenance when
  // present (it cannot be inferred from the draws themselves).
  cs.options.n_chains = cs.chains.size();
  cs.options.thin =
      cs.chains.front().draws.size() > 1 && second_iters.front() > first_iters.front()
          ? second_iters.front() - first_iters.front()
          : 1;
  cs.options.n_burnin = first_iters.front() >= cs.options.thin
                            ? first_iters.front() - cs.options.thin
                            : 0;
  cs.options.n_keep = cs.chains.front().draws.size() * cs.options.thin;
  if (!provenance.empty()) {
    try {
      const json j = json::parse(provenance);
      if (j.contains("mcmc")) {
        const json& m = j["mcmc"];
        if (m.contains("seed")) cs.options.seed = m["seed"].get<std::uint64_t>();
        if (m.contains("ss_mode")) {
          cs.options.ss_mode = m["ss_mode"].get<std::string>() == "appendix"
                                   ? SsSemantics::appendix
                                   : SsSemantics::strict;
        }
      }
    } catch (const json::exception&) {
      // provenance is best-effort; unreadable comments are ignored
    }
  }
  for (std::size_t k = 0; k < cs.chains.size(); ++k) {
    cs.chains[k].seed = cs.options.seed + k;
  }
  return cs;
}

// -------------------------------------------------------------- summaries

void write_summary_csv(const std::string& path, const PosteriorSummary& s,
                       const std::string& provenance) {
  atomic_stream(path, [&](std::ostream& os) {
    if (!provenance.empty()) os << "# " << provenance << "\n";
    os << "parameter,mean,sd,q2.5,q25,q50,q75,q97.5,bgr,ess\n";
    for (const ParamSummary& row : s.rows) {
      os << row.name << ',' << fmt_double(row.mean) << ',' << fmt_double(row.sd)
         << ',' << fmt_double(row.q025) << ',' << fmt_double(row.q25) << ','
         << fmt_double(row.q50) << ',' << fmt_double(row.q75) << ','
         << fmt_double(row.q975) << ',' << fmt_double(row.bgr) << ','
         << fmt_double(row.ess) << "\n";
    }
  });
}

void write_pattern_ppc_csv(const std::string& path, const PatternPpc& ppc,
                           const PathogenPanel& panel,
                           const std::string& provenance) {
  atomic_stream(path, [&](std::ostream& os) {
    if (!provenance.empty()) os << "# " << provenance << "\n";
    os << "# pattern bit order: ";
    for (std::size_t j = 0; j < panel.names.size(); ++j) {
      if (j) os << ',';
      os << panel.names[j];
    }
    os << "\n";
    os << "# predictive replicates: " << ppc.n_replicates_used << "\n";
    os << "group,pattern,observed,pred_q2.5,pred_q50,pred_q97.5\n";
    const auto emit = [&](const char* group,
                          const std::vector<PatternRow>& rows) {
      for (const PatternRow& r : rows) {
        os << group << ',' << pattern_bits(r.pattern) << ',' << r.observed
           << ',' << fmt_double(r.pred_lo) << ',' << fmt_double(r.pred_med)
           << ',' << fmt_double(r.pred_hi) << "\n";
      }
    };
    emit("case", ppc.case_rows);
    emit("control", ppc.control_rows);
  });
}

void write_slor_txt(const std::string& path, const SlorTable& table,
                    const PathogenPanel& panel, const std::string& provenance) {
  atomic_stream(path, [&](std::ostream& os) {
    if (!provenance.empty()) os << "# " << provenance << "\n";
    os << "# case pairs in the lower triangle, control pairs in the upper;\n"
       << "# NA marks the diagonal and pairs without observed variation\n"
       << "# predictive replicates: " << table.n_replicates_used << "\n";
    const auto emit = [&](const char* title, const std::vector<double>& m) {
      os << "matrix " << title << "\n";
      os << "name";
      for (const auto& n : panel.names) os << '\t' << n;
      os << "\n";
      for (std::size_t r = 0; r < table.n_path; ++r) {
        os << panel.names[r];
        for (std::size_t c2 = 0; c2 < table.n_path; ++c2) {
          const std::size_t cell = table.at(r, c2);
          if (!table.defined[cell] && std::isnan(m[cell])) {
            os << "\tNA";
          } else {
            os << '\t' << fmt_double(m[cell]);
          }
        }
        os << "\n";
      }
    };
    emit("slor", table.slor);
    emit("pred_mean", table.pred_mean);
    emit("pred_sd", table.pred_sd);
  });
}

void write_region_csv(const std::string& path, const SimplexRegion& region,
                      const PathogenPanel& panel,
                      const std::string& provenance) {
  if (panel.n_pathogens() != 3) {
    throw IoError("region output requires a 3-pathogen panel");
  }
  atomic_stream(path, [&](std::ostream& os) {
    if (!provenance.empty()) os << "# " << provenance << "\n";
    os << "# level: " << fmt_double(region.level) << "\n";
    os << "# draws_used: " << region.n_draws_used << "\n";
    os << "# alr_reference_component: " << panel.names[region.ref_component]
       << "\n";
    os << "# kde_bandwidth_rowmajor: " << fmt_double(region.bandwidth[0])
       << ',' << fmt_double(region.bandwidth[1]) << ','
       << fmt_double(region.bandwidth[2]) << ','
       << fmt_double(region.bandwidth[3]) << "\n";
    os << "# kde_bandwidth_rule: n^(-1/3) * covariance of log-ratio draws\n";
    os << "# density_threshold: " << fmt_double(region.threshold) << "\n";
    os << "# grid: " << region.grid_n << "x" << region.grid_n << "\n";
    os << "contour,vertex";
    for (const auto& n : panel.names) os << ",p_" << n;
    os << ",x,y\n";
    for (std::size_t ci = 0; ci < region.contours.size(); ++ci) {
      const auto& loop = region.contours[ci];
      for (std::size_t vi = 0; vi < loop.size(); ++vi) {
        const auto xy = ternary_xy(loop[vi]);
        os << ci << ',' << vi;
        for (double p : loop[vi]) os << ',' << fmt_double(p);
        os << ',' << fmt_double(xy[0]) << ',' << fmt_double(xy[1]) << "\n";
      }
    }
  });
}

void write_case_probabilities_csv(const std::string& path, const Dataset& ds,
                                  const ChainSet& chains,
                                  const std::string& provenance) {
  atomic_stream(path, [&](std::ostream& os) {
    if (!provenance.empty()) os << "# " << provenance << "\n";
    os << "case_id";
    for (const auto& n : chains.panel.names) os << ",p_" << n;
    os << ",argmax\n";
    const auto& rows = ds.case_rows();
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const std::vector<double> p = case_posterior_from_counts(chains, k);
      os << ds.subjects[rows[k]].id;
      for (double v : p) os << ',' << fmt_double(v);
      const std::size_t best = static_cast<std::size_t>(
          std::max_element(p.begin(), p.end()) - p.begin());
      os << ',' << chains.panel.names[best] << "\n";
    }
  });
}

void write_identifiability_txt(
    const std::string& path, const std::vector<IdentifiabilityReport>& reports,
    const std::string& provenance) {
  atomic_stream(path, [&](std::ostream& os) {
    if (!provenance.empty()) os << "# " << provenance << "\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const IdentifiabilityReport& r = reports[i];
      os << "point " << i + 1 << (r.include_gs ? " with_gs" : " bronze_only")
         << "\n";
      os << "  param_dim " << r.param_dim << "\n";
      os << "  image_dim " << r.image_dim << "\n";
      os << "  fd_step " << fmt_double(r.fd_step) << "\n";
      os << "  relative_zero_threshold " << fmt_double(r.threshold) << "\n";
      os << "  quality_warning " << (r.quality_warning ? 1 : 0) << "\n";
      os << "  n_effective_zeros " << r.n_effective_zeros << "\n";
      os << "  singular_values";
      for (double s : r.singular_values) os << ' ' << fmt_double(s);
      os << "\n";
    }
  });
}

void write_study_csv(const std::string& replicates_path,
                     const std::string& summary_path, const StudyReport& report,
                     const PathogenPanel& panel,
                     const std::string& provenance) {
  atomic_stream(replicates_path, [&](std::ostream& os) {
    if (!provenance.empty()) os << "# " << provenance << "\n";
    os << "arm,replicate";
    for (const auto& n : panel.names) os << ",mean_" << n;
    for (const auto& n : panel.names) os << ",ci_cover_" << n;
    for (const auto& n : panel.names) os << ",bgr_" << n;
    os << ",region_area,region_cover\n";
    for (const ArmReport& arm : report.arms) {
      for (std::size_t r = 0; r < arm.post_mean.size(); ++r) {
        os << arm.arm << ',' << r;
        for (double v : arm.post_mean[r]) os << ',' << fmt_double(v);
        for (std::uint8_t v : arm.ci_cover[r]) os << ',' << int(v);
        if (r < arm.pi_bgr.size()) {
          for (double v : arm.pi_bgr[r]) {
            if (std::isnan(v)) {
              os << ",NA";
            } else {
              os << ',' << fmt_double(v);
            }
          }
        } else {
          for (std::size_t j = 0; j < panel.n_pathogens(); ++j) os << ",NA";
        }
        if (r < arm.region_area.size()) {
          os << ',' << fmt_double(arm.region_area[r]) << ','
             << int(arm.region_cover[r]);
        } else {
          os << ",NA,NA";
        }
        os << "\n";
      }
    }
  });
  atomic_stream(summary_path, [&](std::ostream& os) {
    if (!provenance.empty()) os << "# " << provenance << "\n";
    os << "arm";
    for (const auto& n : panel.names) os << ",bias_" << n;
    for (const auto& n : panel.names) os << ",ci_coverage_" << n;
    os << ",mean_region_area,region_coverage\n";
    for (const ArmReport& arm : report.arms) {
      os << arm.arm;
      for (double v : arm.mean_bias) os << ',' << fmt_double(v);
      for (double v : arm.coverage) os << ',' << fmt_double(v);
      if (std::isnan(arm.mean_region_area)) {
        os << ",NA,NA";
      } else {
        os << ',' << fmt_double(arm.mean_region_area) << ','
           << fmt_double(arm.region_coverage);
      }
      os << "\n";
    }
  });
}

void write_truth_json(const std::string& path, const SimTruth& truth,
                      const PathogenPanel& panel) {
  json j;
  j["panel"]["names"] = panel.names;
  j["panel"]["n_ss"] = panel.n_ss;
  j["pi"] = truth.params.pi;
  j["theta_brs"] = truth.params.theta_brs;
  j["psi_brs"] = truth.params.psi_brs;
  j["theta_ss"] = truth.params.theta_ss;
  j["n_cases"] = truth.n1;
  j["n_controls"] = truth.n0;
  j["delta_frac"] = truth.delta_frac;
  j["ss_frac"] = truth.ss_frac;
  j["seed"] = truth.seed;
  const std::string text = j.dump(2) + "\n";
  atomic_stream(path, [&](std::ostream& os) { os << text; });
}

// ------------------------------------------------------------ predictions

std::vector<std::vector<std::uint8_t>> read_patterns_csv(
    const std::string& path, const PathogenPanel& panel) {
  const std::vector<FileLine> lines = read_lines(path);
  std::size_t i = 0;
  while (i < lines.size() && lines[i].comment) ++i;
  if (i >= lines.size()) throw IoError("no header row found", path);
  const FileLine& header = lines[i];
  const std::vector<std::string> cols = split_csv(header.text);
  if (cols.size() != panel.n_pathogens()) {
    throw IoError("patterns header must have one brs_ column per pathogen (" +
                      std::to_string(panel.n_pathogens()) + " expected)",
                  path, header.number);
  }
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const std::string expect = "brs_" + panel.names[j];
    if (cols[j] != expect) {
      throw IoError("unknown or misplaced pattern column '" + cols[j] +
                        "' (expected '" + expect + "')",
                    path, header.number, cols[j]);
    }
  }
  std::vector<std::vector<std::uint8_t>> patterns;
  for (++i; i < lines.size(); ++i) {
    if (lines[i].comment) continue;
    const std::vector<std::string> cells = split_csv(lines[i].text);
    if (cells.size() != cols.size()) {
      throw IoError("row has " + std::to_string(cells.size()) +
                        " cells, header has " + std::to_string(cols.size()),
                    path, lines[i].number);
    }
    std::vector<std::uint8_t> pat(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      pat[j] = parse_bit(cells[j], path, lines[i].number, cols[j]);
    }
    patterns.push_back(std::move(pat));
  }
  return patterns;
}

void write_predictions_csv(
    const std::string& path,
    const std::vector<std::vector<std::uint8_t>>& patterns,
    const std::vector<EtiologyPrediction>& predictions,
    const PathogenPanel& panel, const std::string& provenance) {
  if (patterns.size() != predictions.size()) {
    throw IoError("patterns and predictions differ in length");
  }
  atomic_stream(path, [&](std::ostream& os) {
    if (!provenance.empty()) os << "# " << provenance << "\n";
    for (const auto& n : panel.names) os << "brs_" << n << ',';
    for (const auto& n : panel.names) os << "p_" << n << ',';
    os << "argmax,n_draws\n";
    for (std::size_t i = 0; i < patterns.size(); ++i) {
      for (std::uint8_t b : patterns[i]) os << int(b) << ',';
      const auto& p = predictions[i].p_hat;
      for (double v : p) os << fmt_double(v) << ',';
      const std::size_t best = static_cast<std::size_t>(
          std::max_element(p.begin(), p.end()) - p.begin());
      os << panel.names[best] << ',' << predictions[i].n_draws_used << "\n";
    }
  });
}

// ----------------------------------------------------------------- config

namespace {

BetaShape parse_prior_spec(const json& spec, const std::string& path,
                           const std::string& field) {
  if (!spec.is_object()) {
    throw IoError("prior spec must be an object with 'beta' or 'range'", path,
                  0, field);
  }
  const bool has_beta = spec.contains("beta");
  const bool has_range = spec.contains("range");
  if (has_beta == has_range) {
    throw IoError("prior spec needs exactly one of 'beta' or 'range'", path, 0,
                  field);
  }
  try {
    if (has_beta) {
      const auto v = spec["beta"].get<std::vector<double>>();
      if (v.size() != 2 || !(v[0] > 0.0) || !(v[1] > 0.0)) {
        throw IoError("'beta' must be two positive numbers", path, 0, field);
      }
      return {v[0], v[1]};
    }
    const auto v = spec["range"].get<std::vector<double>>();
    if (v.size() != 2) {
      throw IoError("'range' must be [lo, hi]", path, 0, field);
    }
    return elicit_beta_from_quantiles(v[0], v[1]);
  } catch (const json::exception& e) {
    throw IoError(std::string("bad prior spec: ") + e.what(), path, 0, field);
  } catch (const ElicitationError& e) {
    throw IoError(e.what(), path, 0, field);
  }
}

void parse_beta_list(const json& priors, const char* key,
                     std::vector<BetaShape>& target, const std::string& path) {
  if (!priors.contains(key)) return;
  const json& spec = priors[key];
  if (spec.is_array()) {
    if (spec.size() != target.size()) {
      throw IoError(std::string("'") + key + "' must list one prior per " +
                        "pathogen (" + std::to_string(target.size()) +
                        " expected)",
                    path, 0, std::string("priors.") + key);
    }
    for (std::size_t j = 0; j < target.size(); ++j) {
      target[j] = parse_prior_spec(spec[j], path,
                                   std::string("priors.") + key + "[" +
                                       std::to_string(j) + "]");
    }
  } else {
    const BetaShape one =
        parse_prior_spec(spec, path, std::string("priors.") + key);
    std::fill(target.begin(), target.end(), one);
  }
}

std::vector<double> parse_rate_vector(const json& block, const char* key,
                                      std::size_t expected,
                                      const std::string& path,
                                      const std::string& field) {
  try {
    const auto v = block.at(key).get<std::vector<double>>();
    if (v.size() != expected) {
      throw IoError(std::string("'") + key + "' must have " +
                        std::to_string(expected) + " entries",
                    path, 0, field);
    }
    for (double x : v) {
      if (!(x >= 0.0) || !(x <= 1.0)) {
        throw IoError(std::string("'") + key + "' entries must lie in [0, 1]",
                      path, 0, field);
      }
    }
    return v;
  } catch (const json::exception& e) {
    throw IoError(std::string("bad '") + key + "': " + e.what(), path, 0,
                  field);
  }
}

ModelParams parse_point(const json& block, const PathogenPanel& panel,
                        const std::string& path, const std::string& field,
                        bool require_ss) {
  ModelParams p;
  const std::size_t n_path = panel.n_pathogens();
  p.pi = parse_rate_vector(block, "pi", n_path, path, field + ".pi");
  double total = 0.0;
  for (double x : p.pi) total += x;
  if (std::fabs(total - 1.0) > 1e-8) {
    throw IoError("'pi' must sum to 1", path, 0, field + ".pi");
  }
  p.theta_brs =
      parse_rate_vector(block, "theta_brs", n_path, path, field + ".theta_brs");
  p.psi_brs =
      parse_rate_vector(block, "psi_brs", n_path, path, field + ".psi_brs");
  if (require_ss || block.contains("theta_ss")) {
    p.theta_ss = block.contains("theta_ss")
                     ? parse_rate_vector(block, "theta_ss", panel.n_ss, path,
                                         field + ".theta_ss")
                     : std::vector<double>(panel.n_ss, 0.5);
  }
  return p;
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config", path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError(std::string("config is not valid JSON: ") + e.what(), path);
  }

  RunConfig cfg;
  if (!j.contains("panel")) {
    throw IoError("config must define 'panel'", path, 0, "panel");
  }
  const json& pj = j["panel"];
  try {
    if (pj.contains("preset")) {
      const std::string preset = pj["preset"].get<std::string>();
      if (preset == "perch11") {
        cfg.panel = PathogenPanel::perch11();
      } else {
        throw IoError("unknown panel preset '" + preset + "'", path, 0,
                      "panel.preset");
      }
    } else {
      const auto names = pj.at("names").get<std::vector<std::string>>();
      const std::size_t n_ss = pj.value("n_ss", std::size_t{0});
      std::vector<PathogenClass> classes;
      if (pj.contains("classes")) {
        for (const auto& c : pj["classes"]) {
          const std::string s = c.get<std::string>();
          if (s == "bacterium") {
            classes.push_back(PathogenClass::bacterium);
          } else if (s == "virus") {
            classes.push_back(PathogenClass::virus);
          } else if (s == "other") {
            classes.push_back(PathogenClass::other);
          } else {
            throw IoError("unknown pathogen class '" + s + "'", path, 0,
                          "panel.classes");
          }
        }
      }
      cfg.panel = PathogenPanel(names, n_ss, std::move(classes));
      for (const auto& n : cfg.panel.names) check_token_safe(n, "pathogen name");
    }
  } catch (const json::exception& e) {
    throw IoError(std::string("bad panel: ") + e.what(), path, 0, "panel");
  } catch (const std::invalid_argument& e) {
    throw IoError(std::string("bad panel: ") + e.what(), path, 0, "panel");
  }

  cfg.priors = default_hyperpriors(cfg.panel);
  if (j.contains("priors")) {
    const json& pr = j["priors"];
    if (pr.contains("etiology")) {
      try {
        if (pr["etiology"].is_number()) {
          const double a = pr["etiology"].get<double>();
          if (!(a > 0.0)) {
            throw IoError("'etiology' weight must be positive", path, 0,
                          "priors.etiology");
          }
          std::fill(cfg.priors.a.begin(), cfg.priors.a.end(), a);
        } else {
          const auto v = pr["etiology"].get<std::vector<double>>();
          if (v.size() != cfg.priors.a.size()) {
            throw IoError("'etiology' must have one weight per pathogen", path,
                          0, "priors.etiology");
          }
          for (double x : v) {
            if (!(x > 0.0)) {
              throw IoError("'etiology' weights must be positive", path, 0,
                            "priors.etiology");
            }
          }
          cfg.priors.a = v;
        }
      } catch (const json::exception& e) {
        throw IoError(std::string("bad 'etiology': ") + e.what(), path, 0,
                      "priors.etiology");
      }
    }
    parse_beta_list(pr, "fpr", cfg.priors.b, path);
    parse_beta_list(pr, "tpr_brs", cfg.priors.c, path);
    parse_beta_list(pr, "tpr_ss", cfg.priors.d, path);
  }

  if (j.contains("mcmc")) {
    const json& m = j["mcmc"];
    try {
      cfg.mcmc.n_burnin = m.value("burnin", cfg.mcmc.n_burnin);
      cfg.mcmc.n_keep = m.value("keep", cfg.mcmc.n_keep);
      cfg.mcmc.n_chains = m.value("chains", cfg.mcmc.n_chains);
      cfg.mcmc.thin = m.value("thin", cfg.mcmc.thin);
      cfg.mcmc.seed = m.value("seed", cfg.mcmc.seed);
      if (m.contains("ss_mode")) {
        const std::string mode = m["ss_mode"].get<std::string>();
        if (mode == "strict") {
          cfg.mcmc.ss_mode = SsSemantics::strict;
        } else if (mode == "appendix") {
          cfg.mcmc.ss_mode = SsSemantics::appendix;
        } else {
          throw IoError("ss_mode must be 'strict' or 'appendix'", path, 0,
                        "mcmc.ss_mode");
        }
      }
    } catch (const json::exception& e) {
      throw IoError(std::string("bad mcmc block: ") + e.what(), path, 0,
                    "mcmc");
    }
    if (cfg.mcmc.n_keep == 0 || cfg.mcmc.n_chains == 0 || cfg.mcmc.thin == 0) {
      throw IoError("mcmc counts must be positive", path, 0, "mcmc");
    }
  }

  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  cfg.dataset_path = j.value("dataset", cfg.dataset_path);
  cfg.draws_path = j.value("draws", cfg.draws_path);

  if (j.contains("simulate")) {
    const json& s = j["simulate"];
    SimTruth truth;
    truth.params = parse_point(s, cfg.panel, path, "simulate", true);
    try {
      truth.n1 = s.value("n_cases", truth.n1);
      truth.n0 = s.value("n_controls", truth.n0);
      truth.delta_frac = s.value("delta_frac", truth.delta_frac);
      truth.ss_frac = s.value("ss_frac", truth.ss_frac);
      truth.seed = s.value("seed", truth.seed);
    } catch (const json::exception& e) {
      throw IoError(std::string("bad simulate block: ") + e.what(), path, 0,
                    "simulate");
    }
    if (!(truth.delta_frac >= 0.0) || !(truth.delta_frac <= 1.0) ||
        !(truth.ss_frac >= 0.0) || !(truth.ss_frac <= 1.0)) {
      throw IoError("availability fractions must lie in [0, 1]", path, 0,
                    "simulate");
    }
    cfg.sim = std::move(truth);
  }

  if (j.contains("study")) {
    try {
      cfg.study_replicates =
          j["study"].value("n_replicates", cfg.study_replicates);
    } catch (const json::exception& e) {
      throw IoError(std::string("bad study block: ") + e.what(), path, 0,
                    "study");
    }
  }

  if (j.contains("check")) {
    const json& c = j["check"];
    try {
      cfg.ppc_top_k = c.value("top_k", cfg.ppc_top_k);
      cfg.ppc_seed = c.value("seed", cfg.ppc_seed);
    } catch (const json::exception& e) {
      throw IoError(std::string("bad check block: ") + e.what(), path, 0,
                    "check");
    }
  }

  if (j.contains("identifiability")) {
    const json& id = j["identifiability"];
    try {
      cfg.ident_points = id.value("n_points", cfg.ident_points);
      cfg.ident_fd_step = id.value("fd_step", cfg.ident_fd_step);
      cfg.ident_seed = id.value("seed", cfg.ident_seed);
      if (id.contains("point")) {
        cfg.ident_point =
            parse_point(id["point"], cfg.panel, path, "identifiability.point",
                        false);
      }
    } catch (const json::exception& e) {
      throw IoError(std::string("bad identifiability block: ") + e.what(),
                    path, 0, "identifiability");
    }
  }
  return cfg;
}

std::string provenance_json(const RunConfig& cfg) {
  json j;
  j["panel"]["names"] = cfg.panel.names;
  j["panel"]["n_ss"] = cfg.panel.n_ss;
  json pa = json::array(), pb = json::array(), pc = json::array(),
       pd = json::array();
  for (double a : cfg.priors.a) pa.push_back(a);
  for (const BetaShape& s : cfg.priors.b) pb.push_back({s.alpha, s.beta});
  for (const BetaShape& s : cfg.priors.c) pc.push_back({s.alpha, s.beta});
  for (const BetaShape& s : cfg.priors.d) pd.push_back({s.alpha, s.beta});
  j["priors"]["etiology"] = pa;
  j["priors"]["fpr_beta"] = pb;
  j["priors"]["tpr_brs_beta"] = pc;
  j["priors"]["tpr_ss_beta"] = pd;
  j["mcmc"]["burnin"] = cfg.mcmc.n_burnin;
  j["mcmc"]["keep"] = cfg.mcmc.n_keep;
  j["mcmc"]["chains"] = cfg.mcmc.n_chains;
  j["mcmc"]["thin"] = cfg.mcmc.thin;
  j["mcmc"]["seed"] = cfg.mcmc.seed;
  j["mcmc"]["ss_mode"] =
      cfg.mcmc.ss_mode == SsSemantics::strict ? "strict" : "appendix";
  if (!cfg.dataset_path.empty()) j["dataset"] = cfg.dataset_path;
  if (!cfg.draws_path.empty()) j["draws"] = cfg.draws_path;
  j["out_dir"] = cfg.out_dir;
  if (cfg.sim) {
    j["simulate"]["pi"] = cfg.sim->params.pi;
    j["simulate"]["theta_brs"] = cfg.sim->params.theta_brs;
    j["simulate"]["psi_brs"] = cfg.sim->params.psi_brs;
    j["simulate"]["theta_ss"] = cfg.sim->params.theta_ss;
    j["simulate"]["n_cases"] = cfg.sim->n1;
    j["simulate"]["n_controls"] = cfg.sim->n0;
    j["simulate"]["delta_frac"] = cfg.sim->delta_frac;
    j["simulate"]["ss_frac"] = cfg.sim->ss_frac;
    j["simulate"]["seed"] = cfg.sim->seed;
  }
  j["study"]["n_replicates"] = cfg.study_replicates;
  j["check"]["top_k"] = cfg.ppc_top_k;
  j["check"]["seed"] = cfg.ppc_seed;
  j["identifiability"]["n_points"] = cfg.ident_points;
  j["identifiability"]["fd_step"] = cfg.ident_fd_step;
  j["identifiability"]["seed"] = cfg.ident_seed;
  return j.dump();
}

// --------------------------------------------------------------- commands

namespace {

std::string out_path(const RunConfig& cfg, const char* name) {
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  return (fs::path(cfg.out_dir) / name).string();
}

Dataset load_validated_dataset(const std::string& path) {
  const Dataset ds = read_dataset_csv(path);
  const ValidationReport report = validate_dataset(ds);
  if (!report.pass()) {
    const Violation& v = report.violations.front();
    std::string msg = "dataset failed validation: " + v.rule;
    if (!v.subject_id.empty()) msg += " (subject '" + v.subject_id + "')";
    msg += "; " + std::to_string(report.violations.size()) +
           " violation(s) total";
    throw IoError(msg, path);
  }
  return ds;
}

void check_panels_match(const PathogenPanel& a, const PathogenPanel& b,
                        const std::string& what) {
  if (a.names != b.names || a.n_ss != b.n_ss) {
    throw IoError("panel mismatch between " + what);
  }
}

std::vector<std::vector<double>> pooled_pi_subsample(const ChainSet& cs,
                                                     std::size_t cap) {
  const std::size_t total = cs.n_total_draws();
  const std::size_t stride = std::max<std::size_t>(1, total / cap);
  std::vector<std::vector<double>> sub;
  std::size_t flat = 0;
  for (const ChainDraws& c : cs.chains) {
    for (const ModelParams& d : c.draws) {
      if (flat % stride == 0) sub.push_back(d.pi);
      ++flat;
    }
  }
  return sub;
}

}  // namespace

void cmd_simulate(const RunConfig& cfg) {
  if (!cfg.sim) {
    throw IoError("the simulate command needs a 'simulate' config block", "",
                  0, "simulate");
  }
  const Dataset ds = simulate_dataset(*cfg.sim, cfg.panel);
  write_dataset_csv(out_path(cfg, "dataset.csv"), ds);
  write_truth_json(out_path(cfg, "truth.json"), *cfg.sim, cfg.panel);
}

void cmd_fit(const RunConfig& cfg) {
  if (cfg.dataset_path.empty()) {
    throw IoError("the fit command needs a 'dataset' path in the config", "",
                  0, "dataset");
  }
  const Dataset ds = load_validated_dataset(cfg.dataset_path);
  check_panels_match(ds.panel, cfg.panel, "config and dataset file");
  const ChainSet cs = run_chains(ds, cfg.priors, cfg.mcmc);
  const std::string prov = provenance_json(cfg);
  write_draws_csv(out_path(cfg, "draws.csv"), cs, prov);
  write_summary_csv(out_path(cfg, "summary.csv"), posterior_summary(cs), prov);
  const std::uint64_t ppc_seed =
      cfg.ppc_seed != 0 ? cfg.ppc_seed : cfg.mcmc.seed + 777777;
  write_pattern_ppc_csv(
      out_path(cfg, "pattern_ppc.csv"),
      ppc_pattern_frequencies(ds, cs, cfg.ppc_top_k, ppc_seed), cfg.panel,
      prov);
  write_slor_txt(out_path(cfg, "slor.txt"), ppc_slor(ds, cs, ppc_seed + 1),
                 cfg.panel, prov);
  write_case_probabilities_csv(out_path(cfg, "case_probabilities.csv"), ds, cs,
                               prov);
  if (cfg.panel.n_pathogens() == 3) {
    const SimplexRegion region =
        credible_region_simplex(pooled_pi_subsample(cs, 2000), 0.95);
    write_region_csv(out_path(cfg, "region.csv"), region, cfg.panel, prov);
  }
}

void cmd_predict(const RunConfig& cfg, const std::string& patterns_path) {
  if (cfg.draws_path.empty()) {
    throw IoError("the predict command needs a 'draws' path in the config", "",
                  0, "draws");
  }
  const ChainSet cs = read_draws_csv(cfg.draws_path);
  check_panels_match(cs.panel, cfg.panel, "config and draws file");
  const std::vector<std::vector<std::uint8_t>> patterns =
      read_patterns_csv(patterns_path, cs.panel);
  std::vector<EtiologyPrediction> preds;
  preds.reserve(patterns.size());
  for (const auto& pat : patterns) {
    preds.push_back(predict_individual(pat, cs));
  }
  write_predictions_csv(out_path(cfg, "predictions.csv"), patterns, preds,
                        cs.panel, provenance_json(cfg));
}

void cmd_check(const RunConfig& cfg, const std::string& draws_path) {
  if (cfg.dataset_path.empty()) {
    throw IoError("the check command needs a 'dataset' path in the config", "",
                  0, "dataset");
  }
  const Dataset ds = load_validated_dataset(cfg.dataset_path);
  const ChainSet cs = read_draws_csv(draws_path);
  check_panels_match(ds.panel, cs.panel, "dataset and draws file");
  const std::string prov = provenance_json(cfg);
  const std::uint64_t ppc_seed =
      cfg.ppc_seed != 0 ? cfg.ppc_seed : cfg.mcmc.seed + 777777;
  write_pattern_ppc_csv(
      out_path(cfg, "pattern_ppc.csv"),
      ppc_pattern_frequencies(ds, cs, cfg.ppc_top_k, ppc_seed), ds.panel,
      prov);
  write_slor_txt(out_path(cfg, "slor.txt"), ppc_slor(ds, cs, ppc_seed + 1),
                 ds.panel, prov);
}

void cmd_identifiability(const RunConfig& cfg) {
  std::vector<IdentifiabilityReport> reports;
  const auto audit = [&](const ModelParams& p) {
    reports.push_back(jacobian_spectrum(p, cfg.ident_fd_step, false));
    reports.push_back(jacobian_spectrum(p, cfg.ident_fd_step, true));
  };
  if (cfg.ident_point) {
    audit(*cfg.ident_point);
  } else {
    const std::uint64_t seed =
        cfg.ident_seed != 0 ? cfg.ident_seed : cfg.mcmc.seed + 424242;
    Rng rng(seed);
    const std::size_t n_path = cfg.panel.n_pathogens();
    for (std::size_t p = 0; p < cfg.ident_points; ++p) {
      ModelParams mp;
      mp.pi.resize(n_path);
      mp.theta_brs.resize(n_path);
      mp.psi_brs.resize(n_path);
      double total = 0.0;
      for (std::size_t jx = 0; jx < n_path; ++jx) {
        mp.pi[jx] = 0.05 + 0.9 * rng.uniform();
        total += mp.pi[jx];
      }
      for (auto& v : mp.pi) v /= total;
      for (std::size_t jx = 0; jx < n_path; ++jx) {
        mp.theta_brs[jx] = 0.05 + 0.9 * rng.uniform();
        mp.psi_brs[jx] = 0.05 + 0.9 * rng.uniform();
      }
      audit(mp);
    }
  }
  write_identifiability_txt(out_path(cfg, "identifiability.txt"), reports,
                            provenance_json(cfg));
}

void cmd_study(const RunConfig& cfg) {
  if (!cfg.sim) {
    throw IoError("the study command needs a 'simulate' config block", "", 0,
                  "simulate");
  }
  const StudyReport report =
      replicate_study(*cfg.sim, cfg.panel, cfg.study_replicates, cfg.mcmc);
  write_study_csv(out_path(cfg, "study_replicates.csv"),
                  out_path(cfg, "study_summary.csv"), report, cfg.panel,
                  provenance_json(cfg));
}

}  // namespace plcm
