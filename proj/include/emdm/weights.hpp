#pragma once

#include <cmath>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "emdm/categorize.hpp"
#include "emdm/errors.hpp"

namespace emdm {

// sample id -> score (EM bit, or any per-sample scalar)
using SampleScores = std::unordered_map<std::string, double>;
// model id -> per-sample scores
using ModelSampleScores = std::map<std::string, SampleScores>;

struct CellSeparation {
  size_t n = 0;
  double d = 0.0;  // mean pairwise |score gap| per sample, normalized by pair count
};

struct SeparationStats {
  CategoryScheme scheme = CategoryScheme::FULL16;
  std::vector<std::string> model_ids;  // sorted, baseline excluded
  std::string baseline_id;
  size_t pair_count = 0;
  std::map<std::string, CellSeparation> cells;  // nonzero categories only
};

// D for each category: sum over unordered model pairs and cell members of
// absolute score gaps, divided by n_gk * C(m, 2). The baseline never enters
// the pair set; it is the reference the weights get applied against later.
inline SeparationStats compute_separation(const TransitionMatrix& matrix,
                                          const ModelSampleScores& scores,
                                          const std::string& baseline_id) {
  SeparationStats out;
  out.scheme = matrix.scheme;
  out.baseline_id = baseline_id;
  for (const auto& [model, _] : scores)
    if (model != baseline_id) out.model_ids.push_back(model);
  if (out.model_ids.size() < 2)
    fail(ErrorCode::TOO_FEW_MODELS, "separation needs at least two non-baseline models, got " +
                                        std::to_string(out.model_ids.size()));
  size_t m = out.model_ids.size();
  out.pair_count = m * (m - 1) / 2;
  auto score_of = [&](const std::string& model, const std::string& id) {
    const auto& per_sample = scores.at(model);
    auto it = per_sample.find(id);
    if (it == per_sample.end())
      fail(ErrorCode::MISSING_SCORES, "model '" + model + "' has no score for sample '" + id + "'");
    return it->second;
  };
  for (const auto& [key, ids] : matrix.members) {
    double s = 0.0;
    for (size_t a = 0; a + 1 < m; ++a)
      for (size_t b = a + 1; b < m; ++b)
        for (const auto& id : ids)
          s += std::abs(score_of(out.model_ids[a], id) - score_of(out.model_ids[b], id));
    CellSeparation cell;
    cell.n = ids.size();
    cell.d = s / (static_cast<double>(cell.n) * static_cast<double>(out.pair_count));
    out.cells[key] = cell;
  }
  return out;
}

enum class WeightMethod { OPTIMIZED, INTUITIVE, INTUITIVE_COUNT_NORMALIZED, UNIFORM };

inline const char* to_string(WeightMethod m) {
  switch (m) {
    case WeightMethod::OPTIMIZED: return "optimized";
    case WeightMethod::INTUITIVE: return "intuitive";
    case WeightMethod::INTUITIVE_COUNT_NORMALIZED: return "intuitive_count_normalized";
    case WeightMethod::UNIFORM: return "uniform";
  }
  return "?";
}

inline WeightMethod weight_method_from_string(const std::string& s) {
  if (s == "optimized") return WeightMethod::OPTIMIZED;
  if (s == "intuitive") return WeightMethod::INTUITIVE;
  if (s == "intuitive_count_normalized") return WeightMethod::INTUITIVE_COUNT_NORMALIZED;
  if (s == "uniform") return WeightMethod::UNIFORM;
  fail(ErrorCode::MALFORMED_RECORD, "unknown weight method '" + s + "'");
}

struct WeightEntry {
  std::string key;
  size_t n = 0;
  double d = 0.0;
  double weight = 1.0;
  bool pinned = false;  // small cell held at neutral weight
};

struct WeightVector {
  CategoryScheme scheme = CategoryScheme::FULL16;
  WeightMethod method = WeightMethod::OPTIMIZED;
  double lower = 0.1;
  double upper = 2.0;
  size_t min_cell_count = 10;
  std::vector<WeightEntry> entries;  // nonzero categories, key-sorted

  const WeightEntry* find(const std::string& key) const {
    for (const auto& e : entries)
      if (e.key == key) return &e;
    return nullptr;
  }
};

inline constexpr size_t kDefaultMinCellCount = 10;

// Maximizing sum w_gk * (D_gk - 1) over the box [L, U] decouples per cell:
// the optimum sits at U where D > 1, at L where D < 1, and any value ties
// at D == 1, where the neutral 1.0 is kept. Cells with fewer than
// min_cell_count members carry too little signal and stay pinned at 1.0.
inline WeightVector optimize_weights(const SeparationStats& stats, double lower, double upper,
                                     size_t min_cell_count = kDefaultMinCellCount) {
  if (!(lower > 0.0) || !(lower <= upper))
    fail(ErrorCode::INVALID_BOUNDS,
         "weight bounds need 0 < lower <= upper, got [" + std::to_string(lower) + ", " +
             std::to_string(upper) + "]");
  WeightVector out;
  out.scheme = stats.scheme;
  out.method = WeightMethod::OPTIMIZED;
  out.lower = lower;
  out.upper = upper;
  out.min_cell_count = min_cell_count;
  for (const auto& [key, cell] : stats.cells) {
    WeightEntry e;
    e.key = key;
    e.n = cell.n;
    e.d = cell.d;
    if (cell.n < min_cell_count) {
      e.weight = 1.0;
      e.pinned = true;
    } else if (cell.d > 1.0) {
      e.weight = upper;
    } else if (cell.d < 1.0) {
      e.weight = lower;
    } else {
      e.weight = 1.0;
    }
    out.entries.push_back(std::move(e));
  }
  return out;
}

namespace detail {

// Hand-set weights: transitions where guidance rescues a wrong start (or the
// model stays wrong throughout) count extra, stable high performance counts
// little, everything else stays neutral.
inline double intuitive_table(CategoryScheme scheme, const std::string& key) {
  static const std::map<std::string, double> full16{
      {"CC->CC", 0.1}, {"CC->CI", 0.1}, {"CC->IC", 0.1}, {"CC->II", 2.0},
      {"CI->CC", 0.1}, {"CI->CI", 1.0}, {"CI->IC", 1.0}, {"CI->II", 2.0},
      {"IC->CC", 0.1}, {"IC->CI", 1.0}, {"IC->IC", 1.0}, {"IC->II", 2.0},
      {"II->CC", 2.0}, {"II->CI", 2.0}, {"II->IC", 2.0}, {"II->II", 2.0},
  };
  static const std::map<std::string, double> answer4{
      {"C->C", 0.1}, {"C->I", 1.0}, {"I->C", 1.0}, {"I->I", 2.0}};
  static const std::map<std::string, double> unguided4{
      {"CC", 0.1}, {"CI", 1.0}, {"IC", 1.0}, {"II", 2.0}};
  const std::map<std::string, double>* table = nullptr;
  switch (scheme) {
    case CategoryScheme::FULL16: table = &full16; break;
    case CategoryScheme::ANSWER_ONLY4: table = &answer4; break;
    case CategoryScheme::UNGUIDED_ONLY4: table = &unguided4; break;
  }
  auto it = table->find(key);
  if (it == table->end()) fail(ErrorCode::SCHEME_MISMATCH, "no preset weight for '" + key + "'");
  return it->second;
}

}  // namespace detail

// Preset weights need no model scores, only cell counts. The count-normalized
// variant scales the neutral middle weights by each cell's share of the run,
// so mid-band categories contribute in proportion to how often they occur.
inline WeightVector heuristic_weights(const TransitionMatrix& matrix, WeightMethod method) {
  WeightVector out;
  out.scheme = matrix.scheme;
  out.method = method;
  double total = static_cast<double>(matrix.total);
  for (const auto& [key, n] : matrix.counts) {
    WeightEntry e;
    e.key = key;
    e.n = n;
    switch (method) {
      case WeightMethod::UNIFORM:
        e.weight = 1.0;
        break;
      case WeightMethod::INTUITIVE:
        e.weight = detail::intuitive_table(matrix.scheme, key);
        break;
      case WeightMethod::INTUITIVE_COUNT_NORMALIZED: {
        double w = detail::intuitive_table(matrix.scheme, key);
        e.weight = (w == 1.0) ? w * static_cast<double>(n) / total : w;
        break;
      }
      case WeightMethod::OPTIMIZED:
        fail(ErrorCode::USAGE, "optimized weights need separation stats, not a preset");
    }
    out.entries.push_back(std::move(e));
  }
  return out;
}

inline nlohmann::json weight_vector_to_json(const WeightVector& w) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : w.entries)
    entries.push_back({{"key", e.key}, {"n", e.n}, {"d", e.d}, {"weight", e.weight},
                       {"pinned", e.pinned}});
  return {{"scheme", to_string(w.scheme)},       {"method", to_string(w.method)},
          {"lower", w.lower},                    {"upper", w.upper},
          {"min_cell_count", w.min_cell_count},  {"entries", entries}};
}

inline WeightVector weight_vector_from_json(const nlohmann::json& j) {
  WeightVector w;
  try {
    w.scheme = category_scheme_from_string(j.at("scheme").get<std::string>());
    w.method = weight_method_from_string(j.at("method").get<std::string>());
    w.lower = j.at("lower").get<double>();
    w.upper = j.at("upper").get<double>();
    w.min_cell_count = j.at("min_cell_count").get<size_t>();
    for (const auto& je : j.at("entries")) {
      WeightEntry e;
      e.key = je.at("key").get<std::string>();
      e.n = je.at("n").get<size_t>();
      e.d = je.at("d").get<double>();
      e.weight = je.at("weight").get<double>();
      e.pinned = je.at("pinned").get<bool>();
      w.entries.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::MALFORMED_RECORD, std::string("weights artifact: ") + e.what());
  }
  return w;
}

}  // namespace emdm
