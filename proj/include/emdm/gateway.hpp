#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "emdm/errors.hpp"
#include "emdm/hash.hpp"
#include "emdm/prompts.hpp"

namespace emdm {

struct DecodingParams {
  double temperature = 0.0;
  double top_p = 1.0;
  int max_tokens = 1024;

  bool operator==(const DecodingParams&) const = default;
};

enum class CachePolicy { LIVE_THEN_CACHE, CACHE_ONLY, REPLAY_ONLY };

inline const char* to_string(CachePolicy p) {
  switch (p) {
    case CachePolicy::LIVE_THEN_CACHE: return "live";
    case CachePolicy::CACHE_ONLY: return "cache";
    case CachePolicy::REPLAY_ONLY: return "replay";
  }
  return "?";
}

inline CachePolicy cache_policy_from_string(const std::string& s) {
  if (s == "live") return CachePolicy::LIVE_THEN_CACHE;
  if (s == "cache") return CachePolicy::CACHE_ONLY;
  if (s == "replay") return CachePolicy::REPLAY_ONLY;
  fail(ErrorCode::USAGE, "unknown policy '" + s + "' (expected live|cache|replay)");
}

enum class CompletionSource { LIVE, CACHE, REPLAY };

struct RawCompletion {
  std::string fingerprint;
  std::string model_id;
  std::string sample_id;
  PromptMode mode = PromptMode::UNGUIDED;
  std::string text;
  std::string timestamp;
  CompletionSource source = CompletionSource::LIVE;
};

// Stable across runs and platforms: any byte change in the model id, message
// stream, decoding knobs, or template version yields a new fingerprint.
inline std::string request_fingerprint(const PromptBundle& bundle, const std::string& model_id,
                                       const DecodingParams& decoding) {
  char num[96];
  std::string blob = "v=" + bundle.template_version;
  blob += '\x1f';
  blob += "m=" + model_id;
  blob += '\x1f';
  std::snprintf(num, sizeof num, "t=%.17g p=%.17g n=%d", decoding.temperature, decoding.top_p,
                decoding.max_tokens);
  blob += num;
  blob += '\x1f';
  for (const auto& m : bundle.messages) {
    blob += m.role;
    blob += '\x1e';
    blob += m.content;
    blob += '\x1d';
  }
  return fnv1a64_hex(blob);
}

inline std::string utc_now_iso8601() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ====================== response cache ======================

// Append-only JSONL keyed by fingerprint. One writer mutex guards both the
// in-memory index and the file handle, so concurrent batch workers interleave
// whole lines only.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path path) : path_(std::move(path)) { load(); }

  std::optional<RawCompletion> lookup(const std::string& fingerprint) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = entries_.find(fingerprint);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  void append(const RawCompletion& r) {
    nlohmann::json j{{"fingerprint", r.fingerprint}, {"model_id", r.model_id},
                     {"sample_id", r.sample_id},     {"mode", to_string(r.mode)},
                     {"text", r.text},               {"timestamp", r.timestamp}};
    std::lock_guard<std::mutex> lock(mu_);
    if (entries_.count(r.fingerprint)) return;  // replays of the same request are free
    std::ofstream out(path_, std::ios::app);
    if (!out) fail(ErrorCode::FILE_NOT_FOUND, "cannot append to " + path_.string());
    out << j.dump() << '\n';
    entries_.emplace(r.fingerprint, r);
  }

  size_t size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return entries_.size();
  }

  const std::filesystem::path& path() const { return path_; }

 private:
  void load() {
    std::ifstream in(path_);
    if (!in) return;  // fresh run dir
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object())
        fail(ErrorCode::MALFORMED_RECORD,
             path_.string() + " line " + std::to_string(line_no));
      RawCompletion r;
      try {
        r.fingerprint = j.at("fingerprint").get<std::string>();
        r.model_id = j.at("model_id").get<std::string>();
        r.sample_id = j.at("sample_id").get<std::string>();
        r.mode = prompt_mode_from_string(j.at("mode").get<std::string>());
        r.text = j.at("text").get<std::string>();
        r.timestamp = j.at("timestamp").get<std::string>();
      } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::MALFORMED_RECORD,
             path_.string() + " line " + std::to_string(line_no) + ": " + e.what());
      }
      entries_.emplace(r.fingerprint, std::move(r));
    }
  }

  std::filesystem::path path_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, RawCompletion> entries_;
};

// ====================== transport ======================

struct HttpResult {
  int status = -1;      // -1 means the request never completed
  std::string body;
};

struct Endpoint {
  std::string base_url;  // scheme://host[:port][/prefix], no trailing slash
};

using EndpointMap = std::map<std::string, Endpoint>;

class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResult post_chat(const Endpoint& endpoint, const std::string& body) = 0;
};

// ====================== gateway ======================

struct RetryPolicy {
  int max_attempts = 3;
  int base_delay_ms = 250;  // doubles per attempt
};

struct GatewayStats {
  struct PerModel {
    size_t live = 0, cache = 0, replay = 0;
  };
  std::map<std::string, PerModel> by_model;
  size_t transport_calls = 0;  // every attempt counts, including retries
};

struct BatchItem {
  std::optional<RawCompletion> completion;
  std::string error;  // empty on success
};

struct BatchResult {
  std::vector<BatchItem> items;        // same order as the input bundles
  std::vector<size_t> failed_indices;  // ascending
};

namespace detail {

// Bounded fan-out; worker w handles indices w, w+stride, ... so slot
// assignment never races.
inline void parallel_for(size_t n, size_t max_in_flight, const std::function<void(size_t)>& fn) {
  size_t workers = std::min(max_in_flight == 0 ? size_t{1} : max_in_flight, n);
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace detail

class Gateway {
 public:
  Gateway(EndpointMap endpoints, ResponseCache& cache, std::shared_ptr<Transport> transport,
          RetryPolicy retry = {})
      : endpoints_(std::move(endpoints)), cache_(cache), transport_(std::move(transport)),
        retry_(retry) {}

  RawCompletion complete(const PromptBundle& bundle, const std::string& model_id,
                         const DecodingParams& decoding, CachePolicy policy) {
    std::string fp = request_fingerprint(bundle, model_id, decoding);
    if (auto hit = cache_.lookup(fp)) {
      hit->source = policy == CachePolicy::REPLAY_ONLY ? CompletionSource::REPLAY
                                                       : CompletionSource::CACHE;
      note(model_id, hit->source);
      return *hit;
    }
    if (policy != CachePolicy::LIVE_THEN_CACHE)
      fail(ErrorCode::CACHE_MISS,
           "no cached response for " + model_id + " sample '" + bundle.sample_id + "' (" + fp + ")");
    RawCompletion r = live_call(bundle, model_id, decoding, fp);
    cache_.append(r);
    note(model_id, CompletionSource::LIVE);
    return r;
  }

  // Results come back in input order; per-bundle failures become error
  // entries rather than aborting the batch.
  BatchResult batch_complete(const std::vector<PromptBundle>& bundles, const std::string& model_id,
                             const DecodingParams& decoding, CachePolicy policy,
                             size_t max_in_flight) {
    BatchResult out;
    out.items.resize(bundles.size());
    detail::parallel_for(bundles.size(), max_in_flight, [&](size_t i) {
      try {
        out.items[i].completion = complete(bundles[i], model_id, decoding, policy);
      } catch (const std::exception& e) {
        out.items[i].error = e.what();
      }
    });
    for (size_t i = 0; i < out.items.size(); ++i)
      if (!out.items[i].completion) out.failed_indices.push_back(i);
    return out;
  }

  // Missing judge endpoints must surface before any network traffic.
  void require_endpoint(const std::string& model_id) const {
    if (!endpoints_.count(model_id))
      fail(ErrorCode::CONFIG_MISSING, "no endpoint configured for model '" + model_id + "'");
  }

  GatewayStats stats() const {
    std::lock_guard<std::mutex> lock(stats_mu_);
    return stats_;
  }

 private:
  void note(const std::string& model_id, CompletionSource src) {
    std::lock_guard<std::mutex> lock(stats_mu_);
    auto& pm = stats_.by_model[model_id];
    if (src == CompletionSource::LIVE) ++pm.live;
    if (src == CompletionSource::CACHE) ++pm.cache;
    if (src == CompletionSource::REPLAY) ++pm.replay;
  }

  RawCompletion live_call(const PromptBundle& bundle, const std::string& model_id,
                          const DecodingParams& decoding, const std::string& fp) {
    require_endpoint(model_id);
    if (!transport_) fail(ErrorCode::CONFIG_MISSING, "gateway has no transport (replay-only run?)");
    const Endpoint& ep = endpoints_.at(model_id);

    nlohmann::json msgs = nlohmann::json::array();
    for (const auto& m : bundle.messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
    nlohmann::json req{{"model", model_id},
                       {"messages", msgs},
                       {"temperature", decoding.temperature},
                       {"top_p", decoding.top_p},
                       {"max_tokens", decoding.max_tokens}};
    std::string body = req.dump();

    HttpResult res;
    for (int attempt = 0; attempt < retry_.max_attempts; ++attempt) {
      if (attempt > 0)
        std::this_thread::sleep_for(
            std::chrono::milliseconds(retry_.base_delay_ms * (1 << (attempt - 1))));
      {
        std::lock_guard<std::mutex> lock(stats_mu_);
        ++stats_.transport_calls;
      }
      res = transport_->post_chat(ep, body);
      bool retryable = res.status < 0 || res.status == 429 || res.status >= 500;
      if (!retryable) break;
    }
    if (res.status != 200)
      fail(ErrorCode::ENDPOINT_ERROR,
           "status " + std::to_string(res.status) + " from " + ep.base_url + ": " + res.body);

    nlohmann::json j = nlohmann::json::parse(res.body, nullptr, false);
    if (j.is_discarded() || !j.contains("choices") || j["choices"].empty())
      fail(ErrorCode::ENDPOINT_ERROR, "unparseable completion body: " + res.body);
    RawCompletion r;
    r.fingerprint = fp;
    r.model_id = model_id;
    r.sample_id = bundle.sample_id;
    r.mode = bundle.mode;
    try {
      r.text = j["choices"][0].at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::ENDPOINT_ERROR, std::string("unexpected completion shape: ") + e.what());
    }
    r.timestamp = utc_now_iso8601();
    r.source = CompletionSource::LIVE;
    return r;
  }

  EndpointMap endpoints_;
  ResponseCache& cache_;
  std::shared_ptr<Transport> transport_;
  RetryPolicy retry_;
  mutable std::mutex stats_mu_;
  GatewayStats stats_;
};

}  // namespace emdm
