#pragma once

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "emdm/categorize.hpp"
#include "emdm/dataset.hpp"
#include "emdm/errors.hpp"
#include "emdm/gateway.hpp"
#include "emdm/grading.hpp"
#include "emdm/manifest.hpp"
#include "emdm/metrics.hpp"
#include "emdm/prompts.hpp"
#include "emdm/report.hpp"
#include "emdm/weights.hpp"

namespace emdm {

// ====================== run configuration ======================

struct RunConfig {
  std::filesystem::path benchmark_path;
  TaskKind task_kind = TaskKind::MCQA;
  std::filesystem::path shot_pool_path;
  size_t shots = 4;
  std::uint64_t seed = 0;
  std::string baseline_id;
  std::vector<std::string> candidate_ids;
  std::vector<std::string> weight_fit_ids;
  std::string judge_model_id;
  double lower_bound = 0.1;
  double upper_bound = 2.0;
  size_t min_cell_count = kDefaultMinCellCount;
  DecodingParams decoding;
  EndpointMap endpoints;
  CachePolicy policy = CachePolicy::LIVE_THEN_CACHE;
  std::filesystem::path run_dir;
  size_t max_in_flight = 4;
};

inline void validate_config(const RunConfig& c) {
  if (!(c.lower_bound > 0.0) || !(c.lower_bound <= c.upper_bound))
    fail(ErrorCode::INVALID_BOUNDS, "weight bounds need 0 < lower <= upper");
  if (c.baseline_id.empty()) fail(ErrorCode::CONFIG_MISSING, "baseline_id is empty");
  if (c.judge_model_id.empty()) fail(ErrorCode::CONFIG_MISSING, "judge_model_id is empty");
  if (c.candidate_ids.empty()) fail(ErrorCode::CONFIG_MISSING, "candidate_ids is empty");
  if (c.weight_fit_ids.empty()) fail(ErrorCode::CONFIG_MISSING, "weight_fit_ids is empty");
  for (const auto& m : c.weight_fit_ids)
    if (m == c.baseline_id)
      fail(ErrorCode::USAGE, "the baseline model cannot be in the weight-fit set");
  if (c.max_in_flight == 0) fail(ErrorCode::USAGE, "max_in_flight must be at least 1");
}

// Relative paths in the file resolve against the config file's directory, so
// a config can travel with its fixtures.
inline RunConfig load_run_config(const std::filesystem::path& config_path) {
  std::ifstream in(config_path);
  if (!in) fail(ErrorCode::FILE_NOT_FOUND, "no config at '" + config_path.string() + "'");
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    fail(ErrorCode::MALFORMED_RECORD, "config '" + config_path.string() + "' is not a JSON object");
  auto need = [&](const char* key) -> const nlohmann::json& {
    if (!j.contains(key))
      fail(ErrorCode::CONFIG_MISSING,
           std::string("config key '") + key + "' is missing in '" + config_path.string() + "'");
    return j.at(key);
  };
  std::filesystem::path base = config_path.parent_path();
  auto resolve = [&](const std::string& p) -> std::filesystem::path {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };
  RunConfig c;
  try {
    c.benchmark_path = resolve(need("benchmark_path").get<std::string>());
    c.task_kind = task_kind_from_string(need("task_kind").get<std::string>());
    c.shot_pool_path = resolve(need("shot_pool_path").get<std::string>());
    c.shots = need("shots").get<size_t>();
    c.seed = need("seed").get<std::uint64_t>();
    c.baseline_id = need("baseline_id").get<std::string>();
    c.candidate_ids = need("candidate_ids").get<std::vector<std::string>>();
    c.weight_fit_ids = need("weight_fit_ids").get<std::vector<std::string>>();
    c.judge_model_id = need("judge_model_id").get<std::string>();
    c.run_dir = resolve(need("run_dir").get<std::string>());
    c.lower_bound = j.value("lower_bound", c.lower_bound);
    c.upper_bound = j.value("upper_bound", c.upper_bound);
    c.min_cell_count = j.value("min_cell_count", c.min_cell_count);
    if (j.contains("decoding")) {
      const auto& d = j.at("decoding");
      c.decoding.temperature = d.value("temperature", c.decoding.temperature);
      c.decoding.top_p = d.value("top_p", c.decoding.top_p);
      c.decoding.max_tokens = d.value("max_tokens", c.decoding.max_tokens);
    }
    if (j.contains("endpoints"))
      for (const auto& [model, ep] : j.at("endpoints").items())
        c.endpoints[model] = Endpoint{ep.at("base_url").get<std::string>()};
    if (j.contains("policy")) c.policy = cache_policy_from_string(j.at("policy").get<std::string>());
    c.max_in_flight = j.value("max_in_flight", c.max_in_flight);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::MALFORMED_RECORD, "config '" + config_path.string() + "': " + e.what());
  }
  validate_config(c);
  return c;
}

// ====================== run directory ======================

inline constexpr const char* kResponsesFile = "responses.jsonl";
inline constexpr const char* kVerdictsFile = "verdicts.jsonl";
inline constexpr const char* kMatrixFile = "matrix.json";
inline constexpr const char* kWeightsFile = "weights.json";
inline constexpr const char* kScoresFile = "scores.json";
inline constexpr const char* kReportFile = "report.md";
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kSweepFile = "sweep.csv";
inline constexpr const char* kLockFile = ".lock";

struct RunPaths {
  std::filesystem::path dir, responses, verdicts, matrix, weights, scores, report, manifest, sweep,
      lock;

  static RunPaths in(const std::filesystem::path& dir) {
    return {dir,
            dir / kResponsesFile,
            dir / kVerdictsFile,
            dir / kMatrixFile,
            dir / kWeightsFile,
            dir / kScoresFile,
            dir / kReportFile,
            dir / kManifestFile,
            dir / kSweepFile,
            dir / kLockFile};
  }
};

// Advisory lock on the run directory: O_EXCL creation is the atomic claim,
// removal on destruction releases it. A crash can leave the file behind;
// the error message names it so the operator can clear a stale claim.
class RunLock {
 public:
  explicit RunLock(std::filesystem::path path) : path_(std::move(path)) {
    fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd_ < 0) {
      if (errno == EEXIST)
        fail(ErrorCode::LOCK_HELD,
             "another command holds the run directory (remove '" + path_.string() +
                 "' if that run crashed)");
      fail(ErrorCode::FILE_NOT_FOUND, "cannot create lock '" + path_.string() + "'");
    }
    std::string pid = std::to_string(::getpid()) + "\n";
    if (::write(fd_, pid.data(), pid.size()) < 0) { /* lock still works without the pid note */
    }
  }
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;
  ~RunLock() {
    if (fd_ >= 0) {
      ::close(fd_);
      ::unlink(path_.c_str());
    }
  }

 private:
  std::filesystem::path path_;
  int fd_ = -1;
};

// ====================== shared steps ======================

namespace detail {

// The slice of the config that defines the experiment. Runtime knobs
// (endpoints, policy, run_dir, parallelism) stay out: changing them must not
// invalidate a run directory.
inline nlohmann::json science_snapshot(const RunConfig& c) {
  return {{"benchmark_path", c.benchmark_path.string()},
          {"task_kind", to_string(c.task_kind)},
          {"shot_pool_path", c.shot_pool_path.string()},
          {"shots", c.shots},
          {"seed", c.seed},
          {"baseline_id", c.baseline_id},
          {"candidate_ids", c.candidate_ids},
          {"weight_fit_ids", c.weight_fit_ids},
          {"judge_model_id", c.judge_model_id},
          {"lower_bound", c.lower_bound},
          {"upper_bound", c.upper_bound},
          {"min_cell_count", c.min_cell_count},
          {"decoding",
           {{"temperature", c.decoding.temperature},
            {"top_p", c.decoding.top_p},
            {"max_tokens", c.decoding.max_tokens}}},
          {"template_version", kTemplateVersion}};
}

inline Manifest load_and_check_manifest(const RunConfig& c, const RunPaths& paths) {
  if (!std::filesystem::exists(paths.manifest))
    fail(ErrorCode::MANIFEST_MISMATCH,
         "no manifest in '" + paths.dir.string() + "'; run the baseline command first");
  Manifest m = load_manifest(paths.manifest);
  if (m.config_snapshot != science_snapshot(c))
    fail(ErrorCode::MANIFEST_MISMATCH,
         "config does not match the one this run directory was created with");
  return m;
}

struct RunInputs {
  Dataset eval;
  ShotPool shots;
};

inline RunInputs load_inputs(const RunConfig& c) {
  Dataset eval = load_dataset(c.benchmark_path, c.task_kind, Split::EVAL);
  Dataset pool = load_dataset(c.shot_pool_path, c.task_kind, Split::SHOT_POOL);
  ShotPool shots = build_shot_pool(pool, c.shots, c.seed);
  check_disjoint(eval, shots);
  return {std::move(eval), std::move(shots)};
}

inline void require_live_endpoints(const RunConfig& c, Gateway& gw,
                                   const std::vector<std::string>& models) {
  if (c.policy != CachePolicy::LIVE_THEN_CACHE) return;
  for (const auto& m : models) gw.require_endpoint(m);
}

inline void rethrow_batch_failure(const BatchResult& br, const std::string& model_id) {
  if (br.failed_indices.empty()) return;
  fail(ErrorCode::ENDPOINT_ERROR,
       std::to_string(br.failed_indices.size()) + " of " + std::to_string(br.items.size()) +
           " requests for '" + model_id + "' failed; first: " +
           br.items[br.failed_indices.front()].error);
}

// Answer-correctness bit per sample, for each model, from unguided prompts.
inline ModelSampleScores unguided_em_bits(const RunConfig& c, Gateway& gw, const RunInputs& in,
                                          const std::vector<std::string>& models) {
  std::vector<PromptBundle> bundles;
  bundles.reserve(in.eval.samples.size());
  for (const auto& s : in.eval.samples) bundles.push_back(render_unguided(s, in.shots));
  ModelSampleScores out;
  for (const auto& model : models) {
    if (out.count(model)) continue;
    BatchResult br = gw.batch_complete(bundles, model, c.decoding, c.policy, c.max_in_flight);
    rethrow_batch_failure(br, model);
    SampleScores bits;
    for (size_t i = 0; i < in.eval.samples.size(); ++i) {
      const Sample& s = in.eval.samples[i];
      ExtractedAnswer ex = extract_answer(br.items[i].completion->text, c.task_kind);
      bits[s.id] = exact_match(ex.value, s.gold_answer, c.task_kind) ? 1.0 : 0.0;
    }
    out.emplace(model, std::move(bits));
  }
  return out;
}

struct Matrices {
  TransitionMatrix full16, answer4, unguided4;
};

inline Matrices load_matrices(const RunPaths& paths) {
  std::ifstream in(paths.matrix);
  if (!in) fail(ErrorCode::FILE_NOT_FOUND, "no matrix artifact at '" + paths.matrix.string() + "'");
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    fail(ErrorCode::MALFORMED_RECORD, paths.matrix.string());
  Matrices m;
  m.full16 = matrix_from_json(j.at(to_string(CategoryScheme::FULL16)));
  m.answer4 = matrix_from_json(j.at(to_string(CategoryScheme::ANSWER_ONLY4)));
  m.unguided4 = matrix_from_json(j.at(to_string(CategoryScheme::UNGUIDED_ONLY4)));
  return m;
}

inline const WeightVector& find_weights(const std::vector<WeightVector>& vectors,
                                        CategoryScheme scheme, WeightMethod method) {
  for (const auto& w : vectors)
    if (w.scheme == scheme && w.method == method) return w;
  fail(ErrorCode::SCHEME_MISMATCH, std::string("no ") + to_string(method) + " weights for " +
                                       to_string(scheme) + " in the weights artifact");
}

}  // namespace detail

// ====================== commands ======================

// Runs the baseline model over the benchmark in both prompt modes, grades
// answers exactly and reasoning via the judge model, and writes the verdict
// log the rest of the pipeline categorizes against.
inline std::vector<Verdict> cmd_baseline(const RunConfig& c, std::shared_ptr<Transport> transport,
                                         std::ostream& log) {
  detail::RunInputs in = detail::load_inputs(c);
  std::filesystem::create_directories(c.run_dir);
  RunPaths paths = RunPaths::in(c.run_dir);
  RunLock lock(paths.lock);

  Manifest manifest;
  if (std::filesystem::exists(paths.manifest)) {
    manifest = detail::load_and_check_manifest(c, paths);
  } else {
    manifest.template_version = kTemplateVersion;
    manifest.created = utc_now_iso8601();
    manifest.config_snapshot = detail::science_snapshot(c);
  }

  ResponseCache cache(paths.responses);
  Gateway gw(c.endpoints, cache, std::move(transport));
  detail::require_live_endpoints(c, gw, {c.baseline_id, c.judge_model_id});

  std::vector<PromptBundle> unguided, guided;
  unguided.reserve(in.eval.samples.size());
  guided.reserve(in.eval.samples.size());
  for (const auto& s : in.eval.samples) {
    unguided.push_back(render_unguided(s, in.shots));
    guided.push_back(render_guided(s, in.shots));
  }
  BatchResult ub = gw.batch_complete(unguided, c.baseline_id, c.decoding, c.policy, c.max_in_flight);
  detail::rethrow_batch_failure(ub, c.baseline_id);
  BatchResult gb = gw.batch_complete(guided, c.baseline_id, c.decoding, c.policy, c.max_in_flight);
  detail::rethrow_batch_failure(gb, c.baseline_id);

  // Judge calls happen sample by sample: each one may need a re-ask, and
  // only the baseline's reasoning is ever judged.
  std::vector<Verdict> verdicts;
  verdicts.reserve(2 * in.eval.samples.size());
  auto grade_mode = [&](PromptMode mode, const BatchResult& br) {
    for (size_t i = 0; i < in.eval.samples.size(); ++i) {
      const Sample& s = in.eval.samples[i];
      ExtractedAnswer ex = extract_answer(br.items[i].completion->text, c.task_kind);
      int bit = exact_match(ex.value, s.gold_answer, c.task_kind);
      JudgeVerdict jv = judge_cot(s, ex, c.judge_model_id, gw, c.decoding, c.policy);
      verdicts.push_back(make_verdict(s.id, c.baseline_id, mode, bit, ex, jv));
    }
  };
  grade_mode(PromptMode::UNGUIDED, ub);
  grade_mode(PromptMode::GUIDED, gb);
  save_verdicts(verdicts, paths.verdicts);

  manifest.record(c.run_dir, kVerdictsFile);
  save_manifest(manifest, paths.manifest);

  GatewayStats st = gw.stats();
  log << "baseline: " << in.eval.samples.size() << " samples, " << verdicts.size()
      << " verdicts -> " << paths.verdicts.string() << "\n";
  for (const auto& [model, pm] : st.by_model)
    log << "  " << model << ": live=" << pm.live << " cache=" << pm.cache
        << " replay=" << pm.replay << "\n";
  return verdicts;
}

// Buckets every benchmark sample by the baseline's unguided/guided behavior,
// under all three category schemes.
inline detail::Matrices cmd_categorize(const RunConfig& c, std::ostream& log) {
  RunPaths paths = RunPaths::in(c.run_dir);
  RunLock lock(paths.lock);
  Manifest manifest = detail::load_and_check_manifest(c, paths);
  manifest.verify(c.run_dir, kVerdictsFile);

  std::vector<Verdict> all = load_verdicts(paths.verdicts);
  std::vector<Verdict> unguided, guided;
  for (const auto& v : all) {
    if (v.model_id != c.baseline_id) continue;
    (v.mode == PromptMode::UNGUIDED ? unguided : guided).push_back(v);
  }
  detail::Matrices m;
  m.full16 = build_matrix(unguided, guided, CategoryScheme::FULL16);
  m.answer4 = build_matrix(unguided, guided, CategoryScheme::ANSWER_ONLY4);
  m.unguided4 = build_matrix(unguided, guided, CategoryScheme::UNGUIDED_ONLY4);

  nlohmann::json j{{to_string(CategoryScheme::FULL16), matrix_to_json(m.full16)},
                   {to_string(CategoryScheme::ANSWER_ONLY4), matrix_to_json(m.answer4)},
                   {to_string(CategoryScheme::UNGUIDED_ONLY4), matrix_to_json(m.unguided4)}};
  std::ofstream out(paths.matrix, std::ios::trunc);
  if (!out) fail(ErrorCode::FILE_NOT_FOUND, "cannot write '" + paths.matrix.string() + "'");
  out << j.dump(2) << "\n";
  out.close();

  manifest.record(c.run_dir, kMatrixFile);
  save_manifest(manifest, paths.manifest);

  log << "categorize: " << m.full16.total << " samples -> " << paths.matrix.string() << "\n\n";
  log << render_matrix_table(m.full16) << "\n";
  log << render_matrix_table(m.answer4) << "\n";
  log << render_matrix_table(m.unguided4);
  return m;
}

// Scores the weight-fit models, measures per-category separation, and fits
// category weights for every scheme, alongside the preset alternatives.
inline std::vector<WeightVector> cmd_optimize(const RunConfig& c,
                                              std::shared_ptr<Transport> transport,
                                              std::ostream& log) {
  detail::RunInputs in = detail::load_inputs(c);
  RunPaths paths = RunPaths::in(c.run_dir);
  RunLock lock(paths.lock);
  Manifest manifest = detail::load_and_check_manifest(c, paths);
  manifest.verify(c.run_dir, kMatrixFile);
  detail::Matrices m = detail::load_matrices(paths);

  ResponseCache cache(paths.responses);
  Gateway gw(c.endpoints, cache, std::move(transport));
  detail::require_live_endpoints(c, gw, c.weight_fit_ids);
  ModelSampleScores bits = detail::unguided_em_bits(c, gw, in, c.weight_fit_ids);

  std::vector<WeightVector> vectors;
  for (const TransitionMatrix* matrix : {&m.full16, &m.answer4, &m.unguided4}) {
    SeparationStats stats = compute_separation(*matrix, bits, c.baseline_id);
    vectors.push_back(optimize_weights(stats, c.lower_bound, c.upper_bound, c.min_cell_count));
    vectors.push_back(heuristic_weights(*matrix, WeightMethod::INTUITIVE));
    vectors.push_back(heuristic_weights(*matrix, WeightMethod::INTUITIVE_COUNT_NORMALIZED));
    vectors.push_back(heuristic_weights(*matrix, WeightMethod::UNIFORM));
  }

  nlohmann::json jv = nlohmann::json::array();
  for (const auto& w : vectors) jv.push_back(weight_vector_to_json(w));
  nlohmann::json j{{"lower", c.lower_bound},
                   {"upper", c.upper_bound},
                   {"min_cell_count", c.min_cell_count},
                   {"vectors", jv}};
  std::ofstream out(paths.weights, std::ios::trunc);
  if (!out) fail(ErrorCode::FILE_NOT_FOUND, "cannot write '" + paths.weights.string() + "'");
  out << j.dump(2) << "\n";
  out.close();

  manifest.record(c.run_dir, kWeightsFile);
  save_manifest(manifest, paths.manifest);

  log << "optimize: " << vectors.size() << " weight vectors -> " << paths.weights.string()
      << "\n\n";
  log << render_weight_table(m.full16,
                             detail::find_weights(vectors, CategoryScheme::FULL16,
                                                  WeightMethod::OPTIMIZED))
      << "\n";
  log << render_weight_table(m.answer4,
                             detail::find_weights(vectors, CategoryScheme::ANSWER_ONLY4,
                                                  WeightMethod::OPTIMIZED))
      << "\n";
  log << render_weight_table(m.unguided4,
                             detail::find_weights(vectors, CategoryScheme::UNGUIDED_ONLY4,
                                                  WeightMethod::OPTIMIZED));
  return vectors;
}

inline std::vector<WeightVector> load_weight_vectors(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::FILE_NOT_FOUND, "no weights artifact at '" + path.string() + "'");
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) fail(ErrorCode::MALFORMED_RECORD, path.string());
  std::vector<WeightVector> out;
  try {
    for (const auto& w : j.at("vectors")) out.push_back(weight_vector_from_json(w));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::MALFORMED_RECORD, path.string() + ": " + e.what());
  }
  return out;
}

// Scores the baseline and every candidate on all four aggregates and writes
// the leaderboard artifacts.
inline ScoreReport cmd_score(const RunConfig& c, std::shared_ptr<Transport> transport,
                             std::ostream& log) {
  detail::RunInputs in = detail::load_inputs(c);
  RunPaths paths = RunPaths::in(c.run_dir);
  RunLock lock(paths.lock);
  Manifest manifest = detail::load_and_check_manifest(c, paths);
  manifest.verify(c.run_dir, kMatrixFile);
  manifest.verify(c.run_dir, kWeightsFile);
  detail::Matrices m = detail::load_matrices(paths);
  std::vector<WeightVector> vectors = load_weight_vectors(paths.weights);

  std::vector<std::string> models{c.baseline_id};
  for (const auto& id : c.candidate_ids)
    if (id != c.baseline_id) models.push_back(id);

  ResponseCache cache(paths.responses);
  Gateway gw(c.endpoints, cache, std::move(transport));
  detail::require_live_endpoints(c, gw, models);
  ModelSampleScores bits = detail::unguided_em_bits(c, gw, in, models);

  const WeightVector& w16 =
      detail::find_weights(vectors, CategoryScheme::FULL16, WeightMethod::OPTIMIZED);
  const WeightVector& wa4 =
      detail::find_weights(vectors, CategoryScheme::ANSWER_ONLY4, WeightMethod::OPTIMIZED);
  const WeightVector& wu4 =
      detail::find_weights(vectors, CategoryScheme::UNGUIDED_ONLY4, WeightMethod::OPTIMIZED);

  ScoreReport report;
  report.baseline_id = c.baseline_id;
  for (const auto& model : models) {
    ScoreRow row;
    row.model_id = model;
    row.em = em_mean(bits.at(model));
    row.emdm = emdm_score(m.full16, w16, bits.at(model));
    row.answer_only = emdm_score(m.answer4, wa4, bits.at(model));
    row.unguided_only = emdm_score(m.unguided4, wu4, bits.at(model));
    report.rows.push_back(row);
  }
  const ScoreRow& base = report.rows.front();
  for (auto& row : report.rows) {
    if (row.model_id == c.baseline_id) continue;
    row.em_rel = relative_increase(row.em, base.em);
    row.emdm_rel = relative_increase(row.emdm, base.emdm);
    row.answer_rel = relative_increase(row.answer_only, base.answer_only);
    row.unguided_rel = relative_increase(row.unguided_only, base.unguided_only);
  }

  ReportFooters footers = compute_footers(report);
  auto footer_json = [](const ColumnFooter& f) {
    return nlohmann::json{{"inter_model_difference", f.inter_model_difference},
                          {"range", f.range}};
  };
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows)
    rows.push_back({{"model_id", r.model_id},
                    {"em", r.em},
                    {"emdm", r.emdm},
                    {"answer_only", r.answer_only},
                    {"unguided_only", r.unguided_only},
                    {"em_rel", r.em_rel},
                    {"emdm_rel", r.emdm_rel},
                    {"answer_rel", r.answer_rel},
                    {"unguided_rel", r.unguided_rel}});
  nlohmann::json j{{"baseline_id", report.baseline_id},
                   {"rows", rows},
                   {"footers",
                    {{"em", footer_json(footers.em)},
                     {"emdm", footer_json(footers.emdm)},
                     {"answer_only", footer_json(footers.answer_only)},
                     {"unguided_only", footer_json(footers.unguided_only)}}}};
  {
    std::ofstream out(paths.scores, std::ios::trunc);
    if (!out) fail(ErrorCode::FILE_NOT_FOUND, "cannot write '" + paths.scores.string() + "'");
    out << j.dump(2) << "\n";
  }
  {
    std::ofstream out(paths.report, std::ios::trunc);
    if (!out) fail(ErrorCode::FILE_NOT_FOUND, "cannot write '" + paths.report.string() + "'");
    out << render_score_report(report);
  }

  manifest.record(c.run_dir, kScoresFile);
  manifest.record(c.run_dir, kReportFile);
  save_manifest(manifest, paths.manifest);

  log << "score: " << report.rows.size() << " models -> " << paths.scores.string() << ", "
      << paths.report.string() << "\n\n";
  log << render_score_report(report);
  return report;
}

struct SweepRow {
  double upper = 0.0;
  CategoryScheme scheme = CategoryScheme::FULL16;
  double inter_model_difference = 0.0;
};

// Re-fits weights at each upper bound and reports how far apart the models
// land, per scheme. Reads cached responses only; writes sweep.csv.
inline std::vector<SweepRow> cmd_sweep(const RunConfig& c, std::shared_ptr<Transport> transport,
                                       const std::vector<double>& upper_bounds,
                                       std::ostream& log) {
  if (upper_bounds.empty())
    fail(ErrorCode::USAGE, "sweep needs at least one upper bound (--upper-bounds)");
  for (double u : upper_bounds)
    if (!(c.lower_bound > 0.0) || !(c.lower_bound <= u))
      fail(ErrorCode::INVALID_BOUNDS, "sweep bound " + std::to_string(u) + " is below lower " +
                                          std::to_string(c.lower_bound));
  detail::RunInputs in = detail::load_inputs(c);
  RunPaths paths = RunPaths::in(c.run_dir);
  RunLock lock(paths.lock);
  Manifest manifest = detail::load_and_check_manifest(c, paths);
  manifest.verify(c.run_dir, kMatrixFile);
  detail::Matrices m = detail::load_matrices(paths);

  std::vector<std::string> models{c.baseline_id};
  for (const auto& id : c.candidate_ids)
    if (id != c.baseline_id) models.push_back(id);
  std::vector<std::string> all = models;
  for (const auto& id : c.weight_fit_ids) all.push_back(id);

  ResponseCache cache(paths.responses);
  Gateway gw(c.endpoints, cache, std::move(transport));
  detail::require_live_endpoints(c, gw, all);
  ModelSampleScores bits = detail::unguided_em_bits(c, gw, in, all);

  ModelSampleScores fit_bits;
  for (const auto& id : c.weight_fit_ids) fit_bits.emplace(id, bits.at(id));

  std::vector<SweepRow> rows;
  const std::pair<const TransitionMatrix*, CategoryScheme> schemes[] = {
      {&m.full16, CategoryScheme::FULL16},
      {&m.answer4, CategoryScheme::ANSWER_ONLY4},
      {&m.unguided4, CategoryScheme::UNGUIDED_ONLY4}};
  for (double u : upper_bounds) {
    for (const auto& [matrix, scheme] : schemes) {
      SeparationStats stats = compute_separation(*matrix, fit_bits, c.baseline_id);
      WeightVector w = optimize_weights(stats, c.lower_bound, u, c.min_cell_count);
      double base_score = emdm_score(*matrix, w, bits.at(c.baseline_id));
      std::vector<double> rel{0.0};
      for (size_t i = 1; i < models.size(); ++i)
        rel.push_back(relative_increase(emdm_score(*matrix, w, bits.at(models[i])), base_score));
      rows.push_back({u, scheme, inter_model_difference(rel)});
    }
  }

  std::ofstream out(paths.sweep, std::ios::trunc);
  if (!out) fail(ErrorCode::FILE_NOT_FOUND, "cannot write '" + paths.sweep.string() + "'");
  out << "upper,scheme,inter_model_difference\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g\n", r.upper, to_string(r.scheme),
                  r.inter_model_difference);
    out << buf;
  }
  out.close();

  manifest.record(c.run_dir, kSweepFile);
  save_manifest(manifest, paths.manifest);

  log << "sweep: " << rows.size() << " rows -> " << paths.sweep.string() << "\n";
  for (const auto& r : rows)
    log << "  upper=" << r.upper << " " << to_string(r.scheme) << " imd="
        << r.inter_model_difference << "\n";
  return rows;
}

}  // namespace emdm
