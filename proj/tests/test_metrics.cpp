#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "emdm/metrics.hpp"

using emdm::CategoryScheme;
using emdm::SampleScores;
using emdm::TransitionMatrix;
using emdm::WeightVector;

namespace {

TransitionMatrix two_cell_matrix() {
  TransitionMatrix m;
  m.scheme = CategoryScheme::FULL16;
  m.members = {{"CC->CC", {"a1", "a2", "a3"}}, {"II->II", {"b1", "b2"}}};
  for (const auto& [k, ids] : m.members) m.counts[k] = ids.size();
  m.total = 5;
  return m;
}

WeightVector weights_for(std::map<std::string, double> table) {
  WeightVector w;
  w.scheme = CategoryScheme::FULL16;
  for (auto& [key, weight] : table) {
    emdm::WeightEntry e;
    e.key = key;
    e.weight = weight;
    w.entries.push_back(e);
  }
  return w;
}

}  // namespace

TEST_CASE("plain means are plain") {
  CHECK(emdm::em_mean(std::vector<double>{1, 0, 1, 1}) == Catch::Approx(0.75));
  CHECK(emdm::em_mean(SampleScores{{"a", 1.0}, {"b", 0.0}}) == Catch::Approx(0.5));
  CHECK_THROWS_AS(emdm::em_mean(std::vector<double>{}), emdm::Error);
  CHECK_THROWS_AS(emdm::em_mean(SampleScores{}), emdm::Error);
}

TEST_CASE("the weighted score follows the category weights") {
  auto m = two_cell_matrix();
  SampleScores scores{{"a1", 1}, {"a2", 1}, {"a3", 0}, {"b1", 1}, {"b2", 0}};

  // Numerator 0.5*(1+1+0) + 2*(1+0) = 3, denominator 0.5*3 + 2*2 = 5.5.
  auto w = weights_for({{"CC->CC", 0.5}, {"II->II", 2.0}});
  CHECK(emdm::emdm_score(m, w, scores) == Catch::Approx(3.0 / 5.5));

  // All-neutral weights collapse onto the plain mean.
  auto uniform = weights_for({{"CC->CC", 1.0}, {"II->II", 1.0}});
  CHECK(emdm::emdm_score(m, uniform, scores) == Catch::Approx(emdm::em_mean(scores)));
}

TEST_CASE("uniform-weight collapse holds on random bit vectors") {
  std::mt19937 rng(42);
  std::bernoulli_distribution bit(0.5);
  for (int trial = 0; trial < 20; ++trial) {
    TransitionMatrix m;
    m.scheme = CategoryScheme::FULL16;
    WeightVector w;
    w.scheme = CategoryScheme::FULL16;
    SampleScores scores;
    int id = 0;
    std::uniform_int_distribution<int> cell_count(1, 5);
    std::uniform_int_distribution<int> cell_size(1, 8);
    int cells = cell_count(rng);
    for (int c = 0; c < cells; ++c) {
      std::string key = "CC->C" + std::string(1, c % 2 ? 'C' : 'I') + std::to_string(c);
      emdm::WeightEntry e;
      e.key = key;
      e.weight = 1.0;
      w.entries.push_back(e);
      int n = cell_size(rng);
      for (int i = 0; i < n; ++i) {
        std::string sid = "s" + std::to_string(id++);
        m.members[key].push_back(sid);
        scores[sid] = bit(rng) ? 1.0 : 0.0;
      }
      m.counts[key] = m.members[key].size();
      m.total += m.members[key].size();
    }
    CHECK(emdm::emdm_score(m, w, scores) == Catch::Approx(emdm::em_mean(scores)).epsilon(1e-12));
  }
}

TEST_CASE("raising one sample's score never lowers the weighted aggregate") {
  auto m = two_cell_matrix();
  auto w = weights_for({{"CC->CC", 0.1}, {"II->II", 2.0}});
  SampleScores scores{{"a1", 1}, {"a2", 0}, {"a3", 0}, {"b1", 0}, {"b2", 0}};
  double before = emdm::emdm_score(m, w, scores);
  for (const auto& id : {"a2", "b1"}) {
    SampleScores bumped = scores;
    bumped[id] = 1.0;
    CHECK(emdm::emdm_score(m, w, bumped) > before);
  }
}

TEST_CASE("score and weight tables must describe the same scheme") {
  auto m = two_cell_matrix();
  SampleScores scores{{"a1", 1}, {"a2", 1}, {"a3", 0}, {"b1", 1}, {"b2", 0}};

  auto wrong_scheme = weights_for({{"CC->CC", 1.0}, {"II->II", 1.0}});
  wrong_scheme.scheme = CategoryScheme::ANSWER_ONLY4;
  try {
    emdm::emdm_score(m, wrong_scheme, scores);
    FAIL("expected scheme error");
  } catch (const emdm::Error& e) {
    CHECK(e.code() == emdm::ErrorCode::SCHEME_MISMATCH);
  }

  auto missing_cell = weights_for({{"CC->CC", 1.0}});
  try {
    emdm::emdm_score(m, missing_cell, scores);
    FAIL("expected scheme error");
  } catch (const emdm::Error& e) {
    CHECK(e.code() == emdm::ErrorCode::SCHEME_MISMATCH);
  }

  auto w = weights_for({{"CC->CC", 1.0}, {"II->II", 1.0}});
  SampleScores sparse{{"a1", 1}};
  try {
    emdm::emdm_score(m, w, sparse);
    FAIL("expected missing-scores error");
  } catch (const emdm::Error& e) {
    CHECK(e.code() == emdm::ErrorCode::MISSING_SCORES);
  }
}

TEST_CASE("relative increase is the percent the baseline trails by") {
  CHECK(emdm::relative_increase(0.9, 0.45) == Catch::Approx(50.0));
  CHECK(emdm::relative_increase(0.5, 0.5) == Catch::Approx(0.0));
  CHECK(emdm::relative_increase(0.4, 0.5) == Catch::Approx(-25.0));
  try {
    emdm::relative_increase(0.0, 0.5);
    FAIL("expected nonpositive-score error");
  } catch (const emdm::Error& e) {
    CHECK(e.code() == emdm::ErrorCode::NONPOSITIVE_SCORE);
  }
}

TEST_CASE("model spread telescopes to the extremes") {
  CHECK(emdm::inter_model_difference({0.2, 0.9, 0.5}) == Catch::Approx((0.9 - 0.2) / 2.0));
  CHECK(emdm::inter_model_difference({1.0, 1.0}) == Catch::Approx(0.0));

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> val(-50.0, 50.0);
  std::uniform_int_distribution<size_t> count(2, 12);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> xs;
    size_t n = count(rng);
    for (size_t i = 0; i < n; ++i) xs.push_back(val(rng));
    double spread = emdm::inter_model_difference(xs);
    double lo = *std::min_element(xs.begin(), xs.end());
    double hi = *std::max_element(xs.begin(), xs.end());
    CHECK(spread == Catch::Approx((hi - lo) / static_cast<double>(n - 1)).margin(1e-12));
  }

  CHECK_THROWS_AS(emdm::inter_model_difference({1.0}), emdm::Error);
}

TEST_CASE("score range is the plain extreme gap") {
  CHECK(emdm::score_range({0.3, 0.8, 0.5}) == Catch::Approx(0.5));
  CHECK_THROWS_AS(emdm::score_range({0.3}), emdm::Error);
}
