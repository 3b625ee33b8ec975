#pragma once

#include <array>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "emdm/errors.hpp"
#include "emdm/grading.hpp"

namespace emdm {

// First letter: answer correctness. Second: CoT correctness. The order
// CC < CI < IC < II is load-bearing for rendering and marginals.
enum class Quadrant { CC = 0, CI = 1, IC = 2, II = 3 };

inline constexpr std::array<const char*, 4> kQuadrantNames{"CC", "CI", "IC", "II"};

inline Quadrant quadrant_of(bool answer_correct, bool cot_correct) {
  int idx = (answer_correct ? 0 : 2) + (cot_correct ? 0 : 1);
  return static_cast<Quadrant>(idx);
}

inline Quadrant quadrant_of(const Verdict& v) {
  return quadrant_of(v.answer_correct, v.cot_correct);
}

enum class CategoryScheme { FULL16, ANSWER_ONLY4, UNGUIDED_ONLY4 };

inline const char* to_string(CategoryScheme s) {
  switch (s) {
    case CategoryScheme::FULL16: return "FULL16";
    case CategoryScheme::ANSWER_ONLY4: return "ANSWER_ONLY4";
    case CategoryScheme::UNGUIDED_ONLY4: return "UNGUIDED_ONLY4";
  }
  return "?";
}

inline CategoryScheme category_scheme_from_string(const std::string& s) {
  if (s == "FULL16") return CategoryScheme::FULL16;
  if (s == "ANSWER_ONLY4") return CategoryScheme::ANSWER_ONLY4;
  if (s == "UNGUIDED_ONLY4") return CategoryScheme::UNGUIDED_ONLY4;
  fail(ErrorCode::MALFORMED_RECORD, "unknown category scheme '" + s + "'");
}

// Category key of one sample under a scheme. FULL16 keys read
// "<unguided>-><guided>" over quadrants, ANSWER_ONLY4 "<C|I>-><C|I>" over
// answer bits, UNGUIDED_ONLY4 is the unguided quadrant alone.
inline std::string category_key(CategoryScheme scheme, const Verdict& unguided,
                                const Verdict& guided) {
  switch (scheme) {
    case CategoryScheme::FULL16:
      return std::string(kQuadrantNames[static_cast<int>(quadrant_of(unguided))]) + "->" +
             kQuadrantNames[static_cast<int>(quadrant_of(guided))];
    case CategoryScheme::ANSWER_ONLY4:
      return std::string(unguided.answer_correct ? "C" : "I") + "->" +
             (guided.answer_correct ? "C" : "I");
    case CategoryScheme::UNGUIDED_ONLY4:
      return kQuadrantNames[static_cast<int>(quadrant_of(unguided))];
  }
  fail(ErrorCode::SCHEME_MISMATCH, "unhandled scheme");
}

// All keys a scheme can produce, in canonical (row-major) order. Rendering
// and artifact output both follow this order.
inline std::vector<std::string> scheme_keys(CategoryScheme scheme) {
  std::vector<std::string> keys;
  switch (scheme) {
    case CategoryScheme::FULL16:
      for (const char* r : kQuadrantNames)
        for (const char* c : kQuadrantNames) keys.push_back(std::string(r) + "->" + c);
      break;
    case CategoryScheme::ANSWER_ONLY4:
      for (const char* r : {"C", "I"})
        for (const char* c : {"C", "I"}) keys.push_back(std::string(r) + "->" + c);
      break;
    case CategoryScheme::UNGUIDED_ONLY4:
      for (const char* r : kQuadrantNames) keys.emplace_back(r);
      break;
  }
  return keys;
}

struct TransitionMatrix {
  CategoryScheme scheme = CategoryScheme::FULL16;
  std::map<std::string, size_t> counts;                     // only nonzero keys
  std::map<std::string, std::vector<std::string>> members;  // key -> sample ids
  size_t total = 0;

  size_t count(const std::string& key) const {
    auto it = counts.find(key);
    return it == counts.end() ? 0 : it->second;
  }
};

// Pairs up the two verdict logs by sample id and buckets every sample once.
// Both logs must cover exactly the same ids, once each.
inline TransitionMatrix build_matrix(const std::vector<Verdict>& unguided,
                                     const std::vector<Verdict>& guided,
                                     CategoryScheme scheme) {
  std::unordered_map<std::string, const Verdict*> by_id;
  for (const auto& v : guided) {
    if (!by_id.emplace(v.sample_id, &v).second)
      fail(ErrorCode::COVERAGE_MISMATCH, "duplicate guided verdict for '" + v.sample_id + "'");
  }
  if (unguided.size() != guided.size())
    fail(ErrorCode::COVERAGE_MISMATCH,
         std::to_string(unguided.size()) + " unguided vs " + std::to_string(guided.size()) +
             " guided verdicts");
  TransitionMatrix m;
  m.scheme = scheme;
  std::unordered_map<std::string, int> seen;
  for (const auto& u : unguided) {
    if (++seen[u.sample_id] > 1)
      fail(ErrorCode::COVERAGE_MISMATCH, "duplicate unguided verdict for '" + u.sample_id + "'");
    auto it = by_id.find(u.sample_id);
    if (it == by_id.end())
      fail(ErrorCode::COVERAGE_MISMATCH, "no guided verdict for '" + u.sample_id + "'");
    std::string key = category_key(scheme, u, *it->second);
    ++m.counts[key];
    m.members[key].push_back(u.sample_id);
    ++m.total;
  }
  return m;
}

struct Marginals {
  std::array<size_t, 4> rows{};  // unguided quadrant totals, CC..II
  std::array<size_t, 4> cols{};  // guided quadrant totals, CC..II
};

inline Marginals marginals(const TransitionMatrix& m) {
  if (m.scheme != CategoryScheme::FULL16)
    fail(ErrorCode::SCHEME_MISMATCH, "marginals need a FULL16 matrix");
  Marginals out;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      size_t n = m.count(std::string(kQuadrantNames[r]) + "->" + kQuadrantNames[c]);
      out.rows[static_cast<size_t>(r)] += n;
      out.cols[static_cast<size_t>(c)] += n;
    }
  return out;
}

inline nlohmann::json matrix_to_json(const TransitionMatrix& m) {
  nlohmann::json counts = nlohmann::json::object();
  nlohmann::json members = nlohmann::json::object();
  for (const auto& [k, n] : m.counts) counts[k] = n;
  for (const auto& [k, ids] : m.members) members[k] = ids;
  return {{"scheme", to_string(m.scheme)}, {"counts", counts}, {"members", members},
          {"total", m.total}};
}

inline TransitionMatrix matrix_from_json(const nlohmann::json& j) {
  TransitionMatrix m;
  try {
    m.scheme = category_scheme_from_string(j.at("scheme").get<std::string>());
    for (const auto& [k, v] : j.at("counts").items()) m.counts[k] = v.get<size_t>();
    for (const auto& [k, v] : j.at("members").items())
      m.members[k] = v.get<std::vector<std::string>>();
    m.total = j.at("total").get<size_t>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::MALFORMED_RECORD, std::string("matrix artifact: ") + e.what());
  }
  return m;
}

}  // namespace emdm
