#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "emdm/errors.hpp"
#include "emdm/textutil.hpp"

namespace emdm {

enum class TaskKind { MCQA, FREEFORM };
enum class Split { EVAL, SHOT_POOL };

inline const char* to_string(TaskKind k) { return k == TaskKind::MCQA ? "MCQA" : "FREEFORM"; }

inline TaskKind task_kind_from_string(const std::string& s) {
  if (s == "MCQA") return TaskKind::MCQA;
  if (s == "FREEFORM") return TaskKind::FREEFORM;
  fail(ErrorCode::MALFORMED_RECORD, "unknown task_kind '" + s + "'");
}

struct Option {
  std::string label;
  std::string text;

  bool operator==(const Option&) const = default;
};

struct Sample {
  std::string id;
  std::string question;
  TaskKind task_kind = TaskKind::MCQA;
  std::vector<Option> options;     // empty for FREEFORM
  std::string gold_answer;         // option label, or normalized numeral/text
  std::string reference_cot;       // optional; required to judge FREEFORM CoTs
  std::string subject;             // optional category tag

  bool operator==(const Sample&) const = default;
};

struct Dataset {
  Split split = Split::EVAL;
  TaskKind task_kind = TaskKind::MCQA;
  std::vector<Sample> samples;
};

// One exemplar pool entry per sample; exemplars render answer-only.
struct ShotPool {
  std::vector<Sample> exemplars;
};

namespace detail {

inline Sample sample_from_json(const nlohmann::json& j, size_t line_no) {
  auto need = [&](const char* key) -> const nlohmann::json& {
    auto it = j.find(key);
    if (it == j.end())
      fail(ErrorCode::MALFORMED_RECORD,
           "line " + std::to_string(line_no) + ": missing key '" + key + "'");
    return *it;
  };
  Sample s;
  try {
    s.id = need("id").get<std::string>();
    s.question = need("question").get<std::string>();
    s.task_kind = task_kind_from_string(need("task_kind").get<std::string>());
    for (const auto& opt : need("options")) {
      s.options.push_back({opt.at("label").get<std::string>(), opt.at("text").get<std::string>()});
    }
    s.gold_answer = need("gold_answer").get<std::string>();
    if (j.contains("reference_cot")) s.reference_cot = j.at("reference_cot").get<std::string>();
    if (j.contains("subject")) s.subject = j.at("subject").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::MALFORMED_RECORD, "line " + std::to_string(line_no) + ": " + e.what());
  }
  if (s.id.empty())
    fail(ErrorCode::MALFORMED_RECORD, "line " + std::to_string(line_no) + ": empty id");
  if (s.task_kind == TaskKind::MCQA && s.options.empty())
    fail(ErrorCode::MALFORMED_RECORD,
         "line " + std::to_string(line_no) + ": MCQA record without options");
  if (s.task_kind == TaskKind::MCQA)
    s.gold_answer = to_upper(trim(s.gold_answer));
  else
    s.gold_answer = normalize_freeform_gold(s.gold_answer);
  return s;
}

inline nlohmann::json sample_to_json(const Sample& s) {
  nlohmann::json opts = nlohmann::json::array();
  for (const auto& o : s.options) opts.push_back({{"label", o.label}, {"text", o.text}});
  nlohmann::json j{{"id", s.id},
                   {"question", s.question},
                   {"task_kind", to_string(s.task_kind)},
                   {"options", opts},
                   {"gold_answer", s.gold_answer}};
  if (!s.reference_cot.empty()) j["reference_cot"] = s.reference_cot;
  if (!s.subject.empty()) j["subject"] = s.subject;
  return j;
}

}  // namespace detail

// Loads a JSONL benchmark file. Every record must carry the expected
// task_kind; MCQA golds are uppercased labels, FREEFORM golds are normalized
// at load so all downstream equality is canonical.
inline Dataset load_dataset(const std::filesystem::path& path, TaskKind expected_kind,
                            Split split = Split::EVAL) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::FILE_NOT_FOUND, path.string());
  Dataset ds;
  ds.split = split;
  ds.task_kind = expected_kind;
  std::unordered_set<std::string> seen;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      fail(ErrorCode::MALFORMED_RECORD, "line " + std::to_string(line_no) + ": not a JSON object");
    Sample s = detail::sample_from_json(j, line_no);
    if (s.task_kind != expected_kind)
      fail(ErrorCode::MALFORMED_RECORD,
           "line " + std::to_string(line_no) + ": task_kind mismatch for '" + s.id + "'");
    if (!seen.insert(s.id).second) fail(ErrorCode::DUPLICATE_ID, s.id);
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

inline void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::FILE_NOT_FOUND, "cannot open for write: " + path.string());
  for (const auto& s : ds.samples) out << detail::sample_to_json(s).dump() << '\n';
}

// Seeded selection of k exemplars: Fisher-Yates over indices with explicit
// rejection sampling, so the result is identical across platforms (std::shuffle
// leaves the visitation order unspecified).
inline ShotPool build_shot_pool(const Dataset& pool, size_t k, std::uint64_t seed) {
  if (pool.samples.size() < k)
    fail(ErrorCode::INSUFFICIENT_POOL,
         "need " + std::to_string(k) + " exemplars, pool has " + std::to_string(pool.samples.size()));
  std::vector<size_t> idx(pool.samples.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::mt19937_64 rng(seed);
  auto uniform_below = [&rng](std::uint64_t n) {
    // Rejection keeps the draw unbiased without std::uniform_int_distribution,
    // whose output is implementation-defined.
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                          std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do {
      v = rng();
    } while (v >= limit);
    return v % n;
  };
  for (size_t i = idx.size() - 1; i > 0; --i) {
    size_t j = static_cast<size_t>(uniform_below(i + 1));
    std::swap(idx[i], idx[j]);
  }
  ShotPool shots;
  shots.exemplars.reserve(k);
  for (size_t i = 0; i < k; ++i) shots.exemplars.push_back(pool.samples[idx[i]]);
  return shots;
}

// EVAL and SHOT_POOL must not share ids; violation is a hard error at
// pipeline assembly.
inline void check_disjoint(const Dataset& eval, const ShotPool& shots) {
  std::unordered_set<std::string> ids;
  for (const auto& s : eval.samples) ids.insert(s.id);
  for (const auto& e : shots.exemplars)
    if (ids.count(e.id)) fail(ErrorCode::SAMPLE_IN_SHOTS, "exemplar '" + e.id + "' is in the eval split");
}

}  // namespace emdm
