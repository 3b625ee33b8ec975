#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "emdm/categorize.hpp"
#include "emdm/errors.hpp"
#include "emdm/metrics.hpp"
#include "emdm/weights.hpp"

namespace emdm {

namespace detail {

inline std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string fmt_signed_pct(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%+.2f%%", v);
  return buf;
}

// Weights print with trailing zeros trimmed but at least one decimal:
// 0.1, 1.0, 2.0, 0.0857.
inline std::string fmt_weight(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  std::string s = buf;
  while (s.size() > 1 && s.back() == '0' && s[s.size() - 2] != '.') s.pop_back();
  return s;
}

}  // namespace detail

// ====================== transition count tables ======================

// FULL16 renders as a 4x4 grid with marginals; the 4-cell schemes render as
// a flat category list.
inline std::string render_matrix_table(const TransitionMatrix& m) {
  std::string out;
  if (m.scheme == CategoryScheme::FULL16) {
    Marginals mg = marginals(m);
    out += "| Unguided \\ Guided | CC | CI | IC | II | Total |\n";
    out += "| --- | ---: | ---: | ---: | ---: | ---: |\n";
    for (int r = 0; r < 4; ++r) {
      out += std::string("| ") + kQuadrantNames[r];
      for (int c = 0; c < 4; ++c)
        out += " | " + std::to_string(m.count(std::string(kQuadrantNames[r]) + "->" +
                                               kQuadrantNames[c]));
      out += " | " + std::to_string(mg.rows[static_cast<size_t>(r)]) + " |\n";
    }
    out += "| Total";
    for (int c = 0; c < 4; ++c) out += " | " + std::to_string(mg.cols[static_cast<size_t>(c)]);
    out += " | " + std::to_string(m.total) + " |\n";
    return out;
  }
  out += "| Category | Count |\n| --- | ---: |\n";
  for (const auto& key : scheme_keys(m.scheme))
    out += "| " + key + " | " + std::to_string(m.count(key)) + " |\n";
  out += "| Total | " + std::to_string(m.total) + " |\n";
  return out;
}

// Same layouts with "count (weight)" cells. Pinned weights get a star,
// empty categories a dash.
inline std::string render_weight_table(const TransitionMatrix& m, const WeightVector& w) {
  if (m.scheme != w.scheme)
    fail(ErrorCode::SCHEME_MISMATCH, "weight table needs matching matrix and weights");
  auto cell = [&](const std::string& key) -> std::string {
    size_t n = m.count(key);
    if (n == 0) return "0 (-)";
    const WeightEntry* e = w.find(key);
    if (!e) fail(ErrorCode::SCHEME_MISMATCH, "no weight for populated category '" + key + "'");
    return std::to_string(n) + " (" + detail::fmt_weight(e->weight) + (e->pinned ? "*)" : ")");
  };
  std::string out;
  if (m.scheme == CategoryScheme::FULL16) {
    out += "| Unguided \\ Guided | CC | CI | IC | II |\n";
    out += "| --- | ---: | ---: | ---: | ---: |\n";
    for (int r = 0; r < 4; ++r) {
      out += std::string("| ") + kQuadrantNames[r];
      for (int c = 0; c < 4; ++c)
        out += " | " + cell(std::string(kQuadrantNames[r]) + "->" + kQuadrantNames[c]);
      out += " |\n";
    }
    return out;
  }
  out += "| Category | Count (Weight) |\n| --- | ---: |\n";
  for (const auto& key : scheme_keys(m.scheme)) out += "| " + key + " | " + cell(key) + " |\n";
  return out;
}

// ====================== score report ======================

struct ScoreRow {
  std::string model_id;
  double em = 0.0;
  double emdm = 0.0;
  double answer_only = 0.0;
  double unguided_only = 0.0;
  // percent gains over the baseline; all zero on the baseline row
  double em_rel = 0.0;
  double emdm_rel = 0.0;
  double answer_rel = 0.0;
  double unguided_rel = 0.0;
};

struct ScoreReport {
  std::string baseline_id;
  std::vector<ScoreRow> rows;  // baseline first, then candidates in run order
};

struct ColumnFooter {
  double inter_model_difference = 0.0;
  double range = 0.0;
};

// Footers summarize the spread of the percent-gain column (baseline included
// at zero): mean adjacent gap after sorting, and max minus min.
inline ColumnFooter column_footer(const std::vector<double>& rel_column) {
  return {inter_model_difference(rel_column), score_range(rel_column)};
}

struct ReportFooters {
  ColumnFooter em, emdm, answer_only, unguided_only;
};

inline ReportFooters compute_footers(const ScoreReport& r) {
  std::vector<double> em, dm, ans, ung;
  for (const auto& row : r.rows) {
    em.push_back(row.em_rel);
    dm.push_back(row.emdm_rel);
    ans.push_back(row.answer_rel);
    ung.push_back(row.unguided_rel);
  }
  return {column_footer(em), column_footer(dm), column_footer(ans), column_footer(ung)};
}

// Byte-stable markdown: fixed column set, fixed precision, no timestamps.
inline std::string render_score_report(const ScoreReport& r) {
  using detail::fmt2;
  using detail::fmt_signed_pct;
  std::string out;
  out += "| Model | EM | Rel | EMDM | Rel | Answer-only | Rel | Unguided-only | Rel |\n";
  out += "| --- | ---: | ---: | ---: | ---: | ---: | ---: | ---: | ---: |\n";
  for (const auto& row : r.rows) {
    bool base = row.model_id == r.baseline_id;
    auto rel = [&](double v) { return base ? std::string("-") : fmt_signed_pct(v); };
    out += "| " + row.model_id + (base ? " (baseline)" : "") + " | " + fmt2(row.em) + " | " +
           rel(row.em_rel) + " | " + fmt2(row.emdm) + " | " + rel(row.emdm_rel) + " | " +
           fmt2(row.answer_only) + " | " + rel(row.answer_rel) + " | " +
           fmt2(row.unguided_only) + " | " + rel(row.unguided_rel) + " |\n";
  }
  ReportFooters f = compute_footers(r);
  auto footer_row = [&](const char* label, double em, double dm, double ans, double ung) {
    return std::string("| ") + label + " | | " + fmt_signed_pct(em) + " | | " +
           fmt_signed_pct(dm) + " | | " + fmt_signed_pct(ans) + " | | " + fmt_signed_pct(ung) +
           " |\n";
  };
  out += footer_row("Inter-Model Difference", f.em.inter_model_difference,
                    f.emdm.inter_model_difference, f.answer_only.inter_model_difference,
                    f.unguided_only.inter_model_difference);
  out += footer_row("Score Range", f.em.range, f.emdm.range, f.answer_only.range,
                    f.unguided_only.range);
  return out;
}

}  // namespace emdm
