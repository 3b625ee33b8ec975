#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "emdm/gateway.hpp"
#include "support/stub_transport.hpp"
#include "support/toy_fixture.hpp"

namespace fs = std::filesystem;
using Catch::Matchers::ContainsSubstring;

namespace {

fs::path temp_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("emdm_gw_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

emdm::PromptBundle tiny_bundle(const std::string& sample_id = "q1") {
  emdm::PromptBundle b;
  b.sample_id = sample_id;
  b.messages.push_back({"system", "answer briefly"});
  b.messages.push_back({"user", "what is 2+2?"});
  return b;
}

emdm::EndpointMap one_endpoint(const std::string& model) {
  return {{model, emdm::Endpoint{"http://127.0.0.1:1/v1"}}};
}

const emdm::RetryPolicy kFastRetry{3, 1};

}  // namespace

TEST_CASE("fingerprints react to every request ingredient") {
  emdm::PromptBundle b = tiny_bundle();
  emdm::DecodingParams d;
  std::string base = emdm::request_fingerprint(b, "model-x", d);
  CHECK(base == emdm::request_fingerprint(b, "model-x", d));
  CHECK(base.size() == 16);  // 64-bit hex

  CHECK(base != emdm::request_fingerprint(b, "model-y", d));

  emdm::DecodingParams warm = d;
  warm.temperature = 0.7;
  CHECK(base != emdm::request_fingerprint(b, "model-x", warm));

  emdm::PromptBundle other = b;
  other.messages.back().content += "!";
  CHECK(base != emdm::request_fingerprint(other, "model-x", d));

  emdm::PromptBundle versioned = b;
  versioned.template_version = "tmpl-2";
  CHECK(base != emdm::request_fingerprint(versioned, "model-x", d));

  // Role/content boundaries are delimited, not concatenated.
  emdm::PromptBundle shifted = b;
  shifted.messages.back().role = "userw";
  shifted.messages.back().content = "hat is 2+2?";
  CHECK(base != emdm::request_fingerprint(shifted, "model-x", d));
}

TEST_CASE("cache appends once per fingerprint and reloads from disk") {
  auto dir = temp_dir("cache");
  emdm::RawCompletion r;
  r.fingerprint = "f1";
  r.model_id = "m";
  r.sample_id = "q1";
  r.mode = emdm::PromptMode::UNGUIDED;
  r.text = "Answer: A";
  r.timestamp = toyfix::kTimestamp;
  {
    emdm::ResponseCache cache(dir / "responses.jsonl");
    cache.append(r);
    emdm::RawCompletion dup = r;
    dup.text = "different";
    cache.append(dup);  // same fingerprint: first entry wins
    CHECK(cache.size() == 1);
  }
  emdm::ResponseCache reread(dir / "responses.jsonl");
  REQUIRE(reread.size() == 1);
  auto hit = reread.lookup("f1");
  REQUIRE(hit.has_value());
  CHECK(hit->text == "Answer: A");
  CHECK_FALSE(reread.lookup("f2").has_value());
}

TEST_CASE("corrupt cache lines are reported with their line number") {
  auto dir = temp_dir("cache_bad");
  std::ofstream(dir / "responses.jsonl") << "{}\n";
  try {
    emdm::ResponseCache cache(dir / "responses.jsonl");
    FAIL("expected malformed-record error");
  } catch (const emdm::Error& e) {
    CHECK(e.code() == emdm::ErrorCode::MALFORMED_RECORD);
    CHECK_THAT(e.what(), ContainsSubstring("line 1"));
  }
}

TEST_CASE("replay policy serves hits and refuses misses") {
  auto dir = temp_dir("replay");
  emdm::PromptBundle b = tiny_bundle();
  emdm::DecodingParams d;
  emdm::RawCompletion r;
  r.fingerprint = emdm::request_fingerprint(b, "m", d);
  r.model_id = "m";
  r.sample_id = b.sample_id;
  r.text = "Answer: B";
  r.timestamp = toyfix::kTimestamp;

  emdm::ResponseCache cache(dir / "responses.jsonl");
  cache.append(r);
  emdm::Gateway gw({}, cache, nullptr, kFastRetry);

  emdm::RawCompletion hit = gw.complete(b, "m", d, emdm::CachePolicy::REPLAY_ONLY);
  CHECK(hit.text == "Answer: B");
  CHECK(hit.source == emdm::CompletionSource::REPLAY);
  CHECK(gw.stats().by_model.at("m").replay == 1);

  emdm::PromptBundle other = tiny_bundle("q2");
  other.messages.back().content = "what is 3+3?";
  try {
    gw.complete(other, "m", d, emdm::CachePolicy::REPLAY_ONLY);
    FAIL("expected cache-miss error");
  } catch (const emdm::Error& e) {
    CHECK(e.code() == emdm::ErrorCode::CACHE_MISS);
  }
  CHECK(gw.stats().transport_calls == 0);
}

TEST_CASE("live completions are served, cached, and then replayed") {
  auto dir = temp_dir("live");
  auto transport = std::make_shared<support::StubTransport>(
      [](const support::ChatRequest& req) { return "echo for " + req.model; });
  emdm::ResponseCache cache(dir / "responses.jsonl");
  emdm::Gateway gw(one_endpoint("m"), cache, transport, kFastRetry);
  emdm::PromptBundle b = tiny_bundle();
  emdm::DecodingParams d;

  emdm::RawCompletion first = gw.complete(b, "m", d, emdm::CachePolicy::LIVE_THEN_CACHE);
  CHECK(first.text == "echo for m");
  CHECK(first.source == emdm::CompletionSource::LIVE);
  CHECK(transport->calls() == 1);
  CHECK(cache.size() == 1);

  emdm::RawCompletion second = gw.complete(b, "m", d, emdm::CachePolicy::LIVE_THEN_CACHE);
  CHECK(second.source == emdm::CompletionSource::CACHE);
  CHECK(second.text == first.text);
  CHECK(transport->calls() == 1);  // no second network call

  auto st = gw.stats();
  CHECK(st.by_model.at("m").live == 1);
  CHECK(st.by_model.at("m").cache == 1);
}

TEST_CASE("missing endpoint fails before any transport call") {
  auto dir = temp_dir("noep");
  auto transport = std::make_shared<support::ForbiddenTransport>();
  emdm::ResponseCache cache(dir / "responses.jsonl");
  emdm::Gateway gw({}, cache, transport, kFastRetry);
  try {
    gw.complete(tiny_bundle(), "m", {}, emdm::CachePolicy::LIVE_THEN_CACHE);
    FAIL("expected config error");
  } catch (const emdm::Error& e) {
    CHECK(e.code() == emdm::ErrorCode::CONFIG_MISSING);
  }
  CHECK(transport->calls() == 0);
}

TEST_CASE("transient failures are retried and eventually succeed") {
  auto dir = temp_dir("retry_ok");
  auto transport = std::make_shared<support::SequenceTransport>(std::vector<emdm::HttpResult>{
      {500, "upstream hiccup"},
      {429, "slow down"},
      {200, support::make_chat_response("recovered")},
  });
  emdm::ResponseCache cache(dir / "responses.jsonl");
  emdm::Gateway gw(one_endpoint("m"), cache, transport, kFastRetry);
  emdm::RawCompletion r = gw.complete(tiny_bundle(), "m", {}, emdm::CachePolicy::LIVE_THEN_CACHE);
  CHECK(r.text == "recovered");
  CHECK(transport->calls() == 3);
  CHECK(gw.stats().transport_calls == 3);
}

TEST_CASE("retries stop at the attempt budget") {
  auto dir = temp_dir("retry_fail");
  auto transport = std::make_shared<support::SequenceTransport>(
      std::vector<emdm::HttpResult>{{-1, "connection refused"}});
  emdm::ResponseCache cache(dir / "responses.jsonl");
  emdm::Gateway gw(one_endpoint("m"), cache, transport, kFastRetry);
  try {
    gw.complete(tiny_bundle(), "m", {}, emdm::CachePolicy::LIVE_THEN_CACHE);
    FAIL("expected endpoint error");
  } catch (const emdm::Error& e) {
    CHECK(e.code() == emdm::ErrorCode::ENDPOINT_ERROR);
  }
  CHECK(transport->calls() == 3);
}

TEST_CASE("client errors other than 429 do not burn retries") {
  auto dir = temp_dir("retry_400");
  auto transport = std::make_shared<support::SequenceTransport>(
      std::vector<emdm::HttpResult>{{400, "bad request"}});
  emdm::ResponseCache cache(dir / "responses.jsonl");
  emdm::Gateway gw(one_endpoint("m"), cache, transport, kFastRetry);
  CHECK_THROWS_AS(gw.complete(tiny_bundle(), "m", {}, emdm::CachePolicy::LIVE_THEN_CACHE),
                  emdm::Error);
  CHECK(transport->calls() == 1);
}

TEST_CASE("batches preserve input order and report failures by index") {
  auto dir = temp_dir("batch");
  auto transport = std::make_shared<support::StubTransport>([](const support::ChatRequest& req) {
    return "reply to " + req.messages.back().content;
  });
  emdm::ResponseCache cache(dir / "responses.jsonl");
  emdm::Gateway gw(one_endpoint("m"), cache, transport, kFastRetry);

  std::vector<emdm::PromptBundle> bundles;
  for (int i = 0; i < 6; ++i) {
    emdm::PromptBundle b = tiny_bundle("q" + std::to_string(i));
    b.messages.back().content = "item " + std::to_string(i);
    bundles.push_back(b);
  }
  emdm::BatchResult br =
      gw.batch_complete(bundles, "m", {}, emdm::CachePolicy::LIVE_THEN_CACHE, 3);
  REQUIRE(br.items.size() == 6);
  CHECK(br.failed_indices.empty());
  for (int i = 0; i < 6; ++i)
    CHECK(br.items[static_cast<size_t>(i)].completion->text == "reply to item " + std::to_string(i));

  // Replay with a cold cache: every item fails, indices ascend.
  auto dir2 = temp_dir("batch_miss");
  emdm::ResponseCache cold(dir2 / "responses.jsonl");
  emdm::Gateway gw2({}, cold, nullptr, kFastRetry);
  emdm::BatchResult miss = gw2.batch_complete(bundles, "m", {}, emdm::CachePolicy::REPLAY_ONLY, 2);
  REQUIRE(miss.failed_indices.size() == 6);
  for (size_t i = 0; i < 6; ++i) {
    CHECK(miss.failed_indices[i] == i);
    CHECK_THAT(miss.items[i].error, ContainsSubstring("CACHE_MISS"));
  }
}

TEST_CASE("batch fan-out respects the in-flight bound") {
  auto dir = temp_dir("batch_par");
  auto transport = std::make_shared<support::StubTransport>(
      [](const support::ChatRequest&) { return "ok"; }, /*delay_ms=*/15);
  emdm::ResponseCache cache(dir / "responses.jsonl");
  emdm::Gateway gw(one_endpoint("m"), cache, transport, kFastRetry);

  std::vector<emdm::PromptBundle> bundles;
  for (int i = 0; i < 8; ++i) bundles.push_back(tiny_bundle("p" + std::to_string(i)));
  for (auto& b : bundles) b.messages.back().content += " " + b.sample_id;

  emdm::BatchResult br =
      gw.batch_complete(bundles, "m", {}, emdm::CachePolicy::LIVE_THEN_CACHE, 4);
  CHECK(br.failed_indices.empty());
  CHECK(transport->peak_in_flight() <= 4);
  CHECK(transport->peak_in_flight() >= 2);  // the delay forces real overlap
}

TEST_CASE("malformed completion payload is an endpoint error") {
  auto dir = temp_dir("badbody");
  auto transport = std::make_shared<support::SequenceTransport>(
      std::vector<emdm::HttpResult>{{200, "not json"}});
  emdm::ResponseCache cache(dir / "responses.jsonl");
  emdm::Gateway gw(one_endpoint("m"), cache, transport, kFastRetry);
  try {
    gw.complete(tiny_bundle(), "m", {}, emdm::CachePolicy::LIVE_THEN_CACHE);
    FAIL("expected endpoint error");
  } catch (const emdm::Error& e) {
    CHECK(e.code() == emdm::ErrorCode::ENDPOINT_ERROR);
  }
}

TEST_CASE("cache policy strings round trip") {
  using emdm::CachePolicy;
  CHECK(emdm::cache_policy_from_string("live") == CachePolicy::LIVE_THEN_CACHE);
  CHECK(emdm::cache_policy_from_string("cache") == CachePolicy::CACHE_ONLY);
  CHECK(emdm::cache_policy_from_string("replay") == CachePolicy::REPLAY_ONLY);
  CHECK_THROWS_AS(emdm::cache_policy_from_string("yolo"), emdm::Error);
}
