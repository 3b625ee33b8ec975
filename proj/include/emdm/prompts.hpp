#pragma once

#include <string>
#include <vector>

#include "emdm/dataset.hpp"
#include "emdm/errors.hpp"

namespace emdm {

// Bump whenever any template text below changes; the version participates in
// request fingerprints, so stale cache entries can never replay against new
// prompt text.
inline constexpr const char* kTemplateVersion = "tmpl-1";

enum class PromptMode { UNGUIDED, GUIDED, JUDGE };

inline const char* to_string(PromptMode m) {
  switch (m) {
    case PromptMode::UNGUIDED: return "UNGUIDED";
    case PromptMode::GUIDED: return "GUIDED";
    case PromptMode::JUDGE: return "JUDGE";
  }
  return "?";
}

inline PromptMode prompt_mode_from_string(const std::string& s) {
  if (s == "UNGUIDED") return PromptMode::UNGUIDED;
  if (s == "GUIDED") return PromptMode::GUIDED;
  if (s == "JUDGE") return PromptMode::JUDGE;
  fail(ErrorCode::MALFORMED_RECORD, "unknown prompt mode '" + s + "'");
}

struct Message {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;

  bool operator==(const Message&) const = default;
};

struct PromptBundle {
  std::vector<Message> messages;
  PromptMode mode = PromptMode::UNGUIDED;
  std::string sample_id;
  std::string template_version = kTemplateVersion;

  bool operator==(const PromptBundle&) const = default;
};

// ====================== template text (versioned) ======================

namespace templates {

// Option-elimination instruction for multiple choice answering.
inline constexpr const char* kMcqaSystem =
    "Answer the following multiple choice question. Review each option and why it can or "
    "cannot be the answer to the question, then choose the best option.";

inline constexpr const char* kMcqaAnswerContract =
    "Conclude your response with a final line formatted exactly as 'Answer: <option letter>'.";

inline constexpr const char* kFreeformSystem =
    "Answer the following question. Work through the problem step by step before giving "
    "your final answer.";

inline constexpr const char* kFreeformAnswerContract =
    "Conclude your response with a final line formatted exactly as 'Answer: <number>'.";

// CoT soundness evaluation. The free-form variant appends one sentence
// announcing the reference reasoning.
inline constexpr const char* kJudgeCore =
    "Evaluate the logical soundness of the reasoning provided in the 'Chain of Thought' "
    "below. Your task is to determine if the reasoning steps logically support the "
    "conclusion. Mark the 'Chain of Thought' as correct ONLY if all reasoning steps "
    "correctly lead to the conclusion. If the conclusion is unsupported by the steps or "
    "any reasoning step is flawed, mark it as incorrect. Provide a detailed justification "
    "for your judgment, specifically citing relevant parts of the reasoning. Format your "
    "evaluation in JSON, ending your response with a 'Judgment' key having the value "
    "'correct' or 'incorrect', and ensure there is no additional text following the JSON "
    "object. The JSON object should have two keys: 'Reasoning' for your detailed "
    "justification, and 'Judgment' for your final decision.";

inline constexpr const char* kJudgeReferenceNote =
    "You will be given a reference correct reasoning that must be used as an evaluation "
    "reference for the given chain of thought.";

}  // namespace templates

namespace detail {

inline std::string render_question(const Sample& s) {
  std::string out = s.question;
  for (const auto& o : s.options) out += "\n" + o.label + ". " + o.text;
  return out;
}

inline std::string exemplar_answer(const Sample& s) { return "Answer: " + s.gold_answer; }

inline std::string system_instruction(TaskKind kind) {
  if (kind == TaskKind::MCQA)
    return std::string(templates::kMcqaSystem) + "\n" + templates::kMcqaAnswerContract;
  return std::string(templates::kFreeformSystem) + "\n" + templates::kFreeformAnswerContract;
}

}  // namespace detail

// Standard k-shot bundle: system instruction, one user/assistant pair per
// exemplar, then the evaluation question. Pure function of its inputs.
inline PromptBundle render_unguided(const Sample& sample, const ShotPool& shots) {
  for (const auto& e : shots.exemplars)
    if (e.id == sample.id)
      fail(ErrorCode::SAMPLE_IN_SHOTS, "eval sample '" + sample.id + "' present in shot pool");
  PromptBundle b;
  b.mode = PromptMode::UNGUIDED;
  b.sample_id = sample.id;
  b.messages.push_back({"system", detail::system_instruction(sample.task_kind)});
  for (const auto& e : shots.exemplars) {
    b.messages.push_back({"user", detail::render_question(e)});
    b.messages.push_back({"assistant", detail::exemplar_answer(e)});
  }
  b.messages.push_back({"user", detail::render_question(sample)});
  return b;
}

// Contamination probe: identical to the unguided bundle except the evaluation
// sample itself, gold answer included, is injected as the final exemplar and
// the question is then re-asked verbatim.
inline PromptBundle render_guided(const Sample& sample, const ShotPool& shots) {
  PromptBundle b = render_unguided(sample, shots);
  b.mode = PromptMode::GUIDED;
  Message question = b.messages.back();
  b.messages.pop_back();
  b.messages.push_back({"user", detail::render_question(sample)});
  b.messages.push_back({"assistant", detail::exemplar_answer(sample)});
  b.messages.push_back(question);
  return b;
}

// Bundle asking the judge model to grade a chain of thought. The judged
// material goes in the user turn under fixed section labels.
inline PromptBundle render_judge(const Sample& sample, const std::string& candidate_cot,
                                 const std::string& candidate_answer) {
  if (trim(candidate_cot).empty())
    fail(ErrorCode::EMPTY_COT, "sample '" + sample.id + "': nothing to judge");
  std::string system = templates::kJudgeCore;
  if (sample.task_kind == TaskKind::FREEFORM) {
    if (sample.reference_cot.empty())
      fail(ErrorCode::MISSING_REFERENCE_COT, "sample '" + sample.id + "'");
    system += "\n";
    system += templates::kJudgeReferenceNote;
  }
  std::string user = "Question:\n" + detail::render_question(sample) + "\n\n";
  if (sample.task_kind == TaskKind::FREEFORM)
    user += "Reference Reasoning:\n" + sample.reference_cot + "\n\n";
  user += "Chain of Thought:\n" + candidate_cot + "\n\n";
  user += "Proposed Answer: " + candidate_answer;

  PromptBundle b;
  b.mode = PromptMode::JUDGE;
  b.sample_id = sample.id;
  b.messages.push_back({"system", system});
  b.messages.push_back({"user", user});
  return b;
}

}  // namespace emdm
