#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "emdm/dataset.hpp"
#include "emdm/errors.hpp"
#include "emdm/gateway.hpp"
#include "emdm/prompts.hpp"
#include "emdm/textutil.hpp"

namespace emdm {

struct ExtractedAnswer {
  std::string value;   // normalized label or numeral; empty iff !extraction_ok
  std::string cot;     // response text minus the final answer line
  bool extraction_ok = false;
};

enum class Judgment { CORRECT, INCORRECT, UNPARSEABLE };

struct JudgeVerdict {
  Judgment judgment = Judgment::UNPARSEABLE;
  std::string reasoning;
};

// Flag vocabulary is closed; reports reconcile against it.
inline constexpr const char* kFlagExtractionFailed = "EXTRACTION_FAILED";
inline constexpr const char* kFlagJudgeUnparseable = "JUDGE_UNPARSEABLE";

struct Verdict {
  std::string sample_id;
  std::string model_id;
  PromptMode mode = PromptMode::UNGUIDED;
  bool answer_correct = false;
  bool cot_correct = false;
  std::vector<std::string> flags;
  std::string judge_reasoning;
};

// ====================== answer extraction ======================

namespace detail {

struct AnswerMatch {
  size_t pos = std::string::npos;  // start of the matched "answer" token
  std::string value;
};

// Case-insensitive "Answer:" (or "Answer -") followed by a label token,
// tolerant of wrapping punctuation like "**Answer: (B)**".
inline std::optional<AnswerMatch> last_label_match(const std::string& text) {
  std::optional<AnswerMatch> best;
  const std::string lower = to_lower(text);
  size_t from = 0;
  while (true) {
    size_t pos = lower.find("answer", from);
    if (pos == std::string::npos) break;
    from = pos + 1;
    size_t i = pos + 6;
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    if (i >= text.size() || (text[i] != ':' && text[i] != '-')) continue;
    ++i;
    while (i < text.size() && !std::isalnum(static_cast<unsigned char>(text[i])) &&
           text[i] != '\n')
      ++i;
    size_t start = i;
    while (i < text.size() && std::isalnum(static_cast<unsigned char>(text[i]))) ++i;
    if (i == start) continue;
    best = AnswerMatch{pos, to_upper(text.substr(start, i - start))};
  }
  return best;
}

struct NumberMatch {
  size_t pos = std::string::npos;
  std::string value;  // canonical form
};

// Last standalone numeral: digit run with optional thousands separators,
// decimal part, leading currency symbol or sign. Word-adjacent digits
// ("x1080") do not count.
inline std::optional<NumberMatch> last_number_match(const std::string& text) {
  std::optional<NumberMatch> best;
  size_t i = 0;
  auto isdig = [&](size_t p) {
    return p < text.size() && std::isdigit(static_cast<unsigned char>(text[p]));
  };
  while (i < text.size()) {
    if (!isdig(i)) {
      ++i;
      continue;
    }
    size_t start = i;
    bool standalone = true;
    size_t lead = start;
    if (lead > 0 && (text[lead - 1] == '$' || text[lead - 1] == '.')) --lead;
    if (lead > 0 && (text[lead - 1] == '-' || text[lead - 1] == '+')) {
      char before = lead >= 2 ? text[lead - 2] : ' ';
      if (std::isspace(static_cast<unsigned char>(before)) || before == '(' || lead == 1) --lead;
    }
    if (lead > 0 && (std::isalnum(static_cast<unsigned char>(text[lead - 1]))))
      standalone = false;
    while (i < text.size() &&
           (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == ',' ||
            (text[i] == '.' && isdig(i + 1))))
      ++i;
    if (i < text.size() && std::isalpha(static_cast<unsigned char>(text[i]))) standalone = false;
    if (standalone) {
      if (auto c = canonical_number(text.substr(lead, i - lead))) best = NumberMatch{lead, *c};
    }
  }
  return best;
}

inline std::string drop_line_at(const std::string& text, size_t pos) {
  size_t line_start = text.rfind('\n', pos);
  line_start = line_start == std::string::npos ? 0 : line_start + 1;
  size_t line_end = text.find('\n', pos);
  std::string out = text.substr(0, line_start);
  if (line_end != std::string::npos) out += text.substr(line_end + 1);
  while (!out.empty() && (out.back() == '\n' || out.back() == ' ')) out.pop_back();
  return out;
}

}  // namespace detail

inline ExtractedAnswer extract_answer(const std::string& text, TaskKind kind) {
  ExtractedAnswer out;
  if (kind == TaskKind::MCQA) {
    if (auto m = detail::last_label_match(text)) {
      out.value = m->value;
      out.cot = detail::drop_line_at(text, m->pos);
      out.extraction_ok = true;
    }
    return out;
  }
  if (auto m = detail::last_number_match(text)) {
    out.value = m->value;
    out.cot = detail::drop_line_at(text, m->pos);
    out.extraction_ok = true;
  }
  return out;
}

// Exact match bit. MCQA compares uppercased labels; FREEFORM compares
// canonical decimal forms (exact, no epsilon), falling back to trimmed text
// when either side is not a numeral.
inline int exact_match(const std::string& value, const std::string& gold, TaskKind kind) {
  if (kind == TaskKind::MCQA) return to_upper(trim(value)) == to_upper(trim(gold)) ? 1 : 0;
  auto a = canonical_number(trim(value));
  auto b = canonical_number(trim(gold));
  if (a && b) return *a == *b ? 1 : 0;
  return trim(value) == trim(gold) && !trim(value).empty() ? 1 : 0;
}

// ====================== judge response parsing ======================

namespace detail {

// Maximal depth-0 JSON objects in text order, brace-matched with string and
// escape awareness so braces inside quoted values do not split candidates.
inline std::vector<std::string> top_level_objects(const std::string& text) {
  std::vector<std::string> out;
  int depth = 0;
  bool in_string = false, escape = false;
  size_t start = 0;
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (depth > 0 && in_string) {
      if (escape)
        escape = false;
      else if (c == '\\')
        escape = true;
      else if (c == '"')
        in_string = false;
      continue;
    }
    if (c == '"' && depth > 0) {
      in_string = true;
    } else if (c == '{') {
      if (depth == 0) start = i;
      ++depth;
    } else if (c == '}') {
      if (depth > 0 && --depth == 0) out.push_back(text.substr(start, i - start + 1));
    }
  }
  return out;
}

}  // namespace detail

// The judgment derives only from the 'Judgment' key of the last well-formed
// object; 'correct'/'incorrect' are matched case-insensitively.
inline std::optional<JudgeVerdict> parse_judge_response(const std::string& text) {
  auto objects = detail::top_level_objects(text);
  for (auto it = objects.rbegin(); it != objects.rend(); ++it) {
    nlohmann::json j = nlohmann::json::parse(*it, nullptr, false);
    if (j.is_discarded() || !j.is_object()) continue;
    auto jt = j.find("Judgment");
    if (jt == j.end() || !jt->is_string()) return std::nullopt;
    std::string v = to_lower(trim(jt->get<std::string>()));
    JudgeVerdict out;
    if (v == "correct")
      out.judgment = Judgment::CORRECT;
    else if (v == "incorrect")
      out.judgment = Judgment::INCORRECT;
    else
      return std::nullopt;
    if (j.contains("Reasoning") && j["Reasoning"].is_string())
      out.reasoning = j["Reasoning"].get<std::string>();
    return out;
  }
  return std::nullopt;
}

inline constexpr const char* kJudgeRetryNudge =
    "Your previous reply was not a valid evaluation. Respond with only the JSON object, "
    "with the keys 'Reasoning' and 'Judgment'.";

// One judge round trip with a single re-ask on unparseable output. An empty
// chain of thought never reaches the judge: it grades INCORRECT immediately.
inline JudgeVerdict judge_cot(const Sample& sample, const ExtractedAnswer& extracted,
                              const std::string& judge_model_id, Gateway& gateway,
                              const DecodingParams& decoding, CachePolicy policy) {
  if (trim(extracted.cot).empty())
    return {Judgment::INCORRECT, "no chain of thought to evaluate"};
  PromptBundle bundle = render_judge(sample, extracted.cot, extracted.value);
  RawCompletion first = gateway.complete(bundle, judge_model_id, decoding, policy);
  if (auto v = parse_judge_response(first.text)) return *v;

  PromptBundle retry = bundle;
  retry.messages.push_back({"assistant", first.text});
  retry.messages.push_back({"user", kJudgeRetryNudge});
  RawCompletion second = gateway.complete(retry, judge_model_id, decoding, policy);
  if (auto v = parse_judge_response(second.text)) return *v;
  return {Judgment::UNPARSEABLE, ""};
}

// ====================== verdict assembly and log ======================

inline Verdict make_verdict(const std::string& sample_id, const std::string& model_id,
                            PromptMode mode, int em_bit, const ExtractedAnswer& extracted,
                            const JudgeVerdict& judge) {
  Verdict v;
  v.sample_id = sample_id;
  v.model_id = model_id;
  v.mode = mode;
  v.answer_correct = em_bit == 1;
  v.cot_correct = judge.judgment == Judgment::CORRECT;
  if (!extracted.extraction_ok || trim(extracted.cot).empty())
    v.flags.push_back(kFlagExtractionFailed);
  if (judge.judgment == Judgment::UNPARSEABLE) v.flags.push_back(kFlagJudgeUnparseable);
  v.judge_reasoning = judge.reasoning;
  return v;
}

inline void save_verdicts(const std::vector<Verdict>& verdicts,
                          const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::FILE_NOT_FOUND, "cannot write " + path.string());
  for (const auto& v : verdicts) {
    nlohmann::json j{{"sample_id", v.sample_id},
                     {"model_id", v.model_id},
                     {"mode", to_string(v.mode)},
                     {"answer_correct", v.answer_correct},
                     {"cot_correct", v.cot_correct},
                     {"flags", v.flags},
                     {"judge_reasoning", v.judge_reasoning}};
    out << j.dump() << '\n';
  }
}

inline std::vector<Verdict> load_verdicts(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::FILE_NOT_FOUND, path.string());
  std::vector<Verdict> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      fail(ErrorCode::MALFORMED_RECORD, path.string() + " line " + std::to_string(line_no));
    Verdict v;
    try {
      v.sample_id = j.at("sample_id").get<std::string>();
      v.model_id = j.at("model_id").get<std::string>();
      v.mode = prompt_mode_from_string(j.at("mode").get<std::string>());
      v.answer_correct = j.at("answer_correct").get<bool>();
      v.cot_correct = j.at("cot_correct").get<bool>();
      v.flags = j.at("flags").get<std::vector<std::string>>();
      v.judge_reasoning = j.value("judge_reasoning", "");
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::MALFORMED_RECORD,
           path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace emdm
