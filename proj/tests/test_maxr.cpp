#include <cmath>
#include <limits>

#include "dacat/maxr.hpp"
#include "dacat/rng.hpp"
#include "doctest.h"

using namespace dacat;

namespace {

// Independent O(t^2) oracle: every clip response summed directly, argmax
// with the same smallest-index tie-breaking.
template <class S>
std::vector<S> oracle_suffix(const std::vector<S>& s) {
  std::vector<S> p(s.size());
  for (std::size_t j = 0; j < s.size(); ++j) {
    S acc = 0;
    for (std::size_t i = j; i < s.size(); ++i) acc += s[i];
    p[j] = acc;
  }
  return p;
}

template <class S>
std::size_t oracle_select(const std::vector<S>& p) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < p.size(); ++j)
    if (p[j] > p[best]) best = j;
  return best + 1;
}

FeatureCache make_cache(const std::vector<std::vector<double>>& rows) {
  FeatureCache c(rows.front().size());
  for (const auto& r : rows) c.append(r);
  return c;
}

}  // namespace

TEST_CASE("frame_response is the raw dot product") {
  auto c = make_cache({{1, 0}, {0, 1}, {2, 0}});
  auto s = maxr::frame_response<double>(std::vector<double>{1, 0}, c);
  REQUIRE(s.size() == 3);
  CHECK(s[0] == 1.0);
  CHECK(s[1] == 0.0);
  CHECK(s[2] == 2.0);

  auto z = maxr::frame_response<double>(std::vector<double>{0, 0}, c);
  CHECK(z == std::vector<double>{0, 0, 0});

  auto single = make_cache({{3, 4}});
  auto s2 = maxr::frame_response<double>(std::vector<double>{3, 4}, single);
  REQUIRE(s2.size() == 1);
  CHECK(s2[0] == 25.0);
}

TEST_CASE("frame_response rejects bad input") {
  FeatureCache empty(2);
  CHECK_THROWS_AS(maxr::frame_response<double>(std::vector<double>{1, 0}, empty),
                  std::invalid_argument);
  auto c = make_cache({{1, 0}});
  CHECK_THROWS_AS(maxr::frame_response<double>(std::vector<double>{1, 0, 0}, c),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      maxr::frame_response<double>(
          std::vector<double>{1, std::numeric_limits<double>::quiet_NaN()}, c),
      std::invalid_argument);
}

TEST_CASE("suffix_sum examples") {
  CHECK(maxr::suffix_sum<double>(std::vector<double>{1, -2, 3}) ==
        std::vector<double>{2, 1, 3});
  CHECK(maxr::suffix_sum<double>(std::vector<double>{5}) == std::vector<double>{5});
  CHECK(maxr::suffix_sum<double>(std::vector<double>{0, 0, 0}) ==
        std::vector<double>{0, 0, 0});
  CHECK_THROWS_AS(maxr::suffix_sum<double>(std::vector<double>{}),
                  std::invalid_argument);
}

TEST_CASE("select_start picks the smallest maximizer") {
  CHECK(maxr::select_start<double>(std::vector<double>{2, 1, 3}) == 3);
  CHECK(maxr::select_start<double>(std::vector<double>{7, 7, 1}) == 1);
  CHECK(maxr::select_start<double>(std::vector<double>{4, 4, 4}) == 1);
  CHECK_THROWS_AS(maxr::select_start<double>(std::vector<double>{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      maxr::select_start<double>(
          std::vector<double>{1, std::numeric_limits<double>::quiet_NaN()}),
      std::invalid_argument);
}

TEST_CASE("read_adaptive composes the pieces") {
  auto c = make_cache({{1, 0}, {0, 1}, {2, 0}});
  auto [clip, sel] = maxr::read_adaptive<double>(std::vector<double>{1, 0}, c);
  CHECK(sel.response == std::vector<double>{1, 0, 2});
  CHECK(sel.clip_response == std::vector<double>{3, 2, 2});
  CHECK(sel.start_index == 1);
  CHECK(clip.size() == 3);

  auto single = make_cache({{5, -1}});
  auto [clip1, sel1] = maxr::read_adaptive<double>(std::vector<double>{-3, 2}, single);
  CHECK(sel1.start_index == 1);
  REQUIRE(clip1.size() == 1);
  CHECK(clip1.row(0)[0] == 5.0);

  // All responses positive: the whole history wins.
  auto c2 = make_cache({{1, 1}, {1, 1}, {1, 1}, {1, 1}});
  auto [clip2, sel2] = maxr::read_adaptive<double>(std::vector<double>{1, 1}, c2);
  CHECK(sel2.start_index == 1);
  CHECK(clip2.size() == 4);
}

TEST_CASE("read_fixed clamps the window") {
  auto c = make_cache({{1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}});
  auto w = maxr::read_fixed<double>(c, 2);
  REQUIRE(w.size() == 2);
  CHECK(w.row(0)[0] == 4.0);
  CHECK(w.row(1)[0] == 5.0);

  CHECK(maxr::read_fixed<double>(c, 10).size() == 5);

  auto single = make_cache({{9, 9}});
  CHECK(maxr::read_fixed<double>(single, 1).size() == 1);

  FeatureCache empty(2);
  CHECK_THROWS_AS(maxr::read_fixed<double>(empty, 1), std::invalid_argument);
}

TEST_CASE("read_all equals read_fixed with k = t") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    FeatureCache c(3);
    const std::size_t t = 1 + rng.below(40);
    for (std::size_t i = 0; i < t; ++i) {
      std::vector<double> f(3);
      for (auto& x : f) x = rng.normal();
      c.append(f);
    }
    auto a = maxr::read_all<double>(c);
    auto b = maxr::read_fixed<double>(c, c.size());
    REQUIRE(a.size() == b.size());
    CHECK(a.data() == b.data());
  }
  FeatureCache empty(3);
  CHECK_THROWS_AS(maxr::read_all<double>(empty), std::invalid_argument);
}

TEST_CASE("suffix-sum route matches the direct-summation oracle") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t t = 1 + rng.below(512);
    std::vector<double> s(t);
    const bool integer_valued = trial % 2 == 0;
    for (auto& x : s)
      x = integer_valued ? std::floor(rng.uniform(-10.0, 10.0)) : rng.normal();

    auto p = maxr::suffix_sum<double>(s);
    auto p_oracle = oracle_suffix(s);
    REQUIRE(p.size() == p_oracle.size());
    double scale = 0;
    for (double x : s) scale += std::fabs(x);
    for (std::size_t j = 0; j < t; ++j)
      CHECK(std::fabs(p[j] - p_oracle[j]) <= 1e-9 * std::max(1.0, scale));
    CHECK(maxr::select_start<double>(p) == oracle_select(p_oracle));
  }
}

TEST_CASE("float read-out agrees with the double oracle at relaxed tolerance") {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t t = 1 + rng.below(1024);
    std::vector<float> sf(t);
    std::vector<double> sd(t);
    for (std::size_t i = 0; i < t; ++i) {
      sf[i] = static_cast<float>(rng.normal());
      sd[i] = static_cast<double>(sf[i]);
    }
    auto pf = maxr::suffix_sum<float>(sf);
    auto pd = oracle_suffix(sd);
    double scale = 0;
    for (double x : sd) scale += std::fabs(x);
    for (std::size_t j = 0; j < t; ++j)
      CHECK(std::fabs(static_cast<double>(pf[j]) - pd[j]) <=
            1e-5 * std::max(1.0, scale));
  }
}

TEST_CASE("adaptive clip always ends at the newest frame") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    FeatureCache c(4);
    const std::size_t t = 1 + rng.below(64);
    for (std::size_t i = 0; i < t; ++i) {
      std::vector<double> f(4);
      for (auto& x : f) x = rng.normal();
      c.append(f);
    }
    std::vector<double> q(4);
    for (auto& x : q) x = rng.normal();
    auto [clip, sel] = maxr::read_adaptive<double>(q, c);
    REQUIRE(clip.size() >= 1);
    CHECK(sel.start_index + clip.size() - 1 == t);
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(clip.row(clip.size() - 1)[j] == c.back()[j]);
  }
}

TEST_CASE("adversarial response forces the singleton clip") {
  // Newest frame responds positively, every earlier frame is so negative
  // that including it can never pay off.
  auto c = make_cache({{-100, 0}, {-100, 0}, {-100, 0}, {1, 0}});
  auto [clip, sel] = maxr::read_adaptive<double>(std::vector<double>{1, 0}, c);
  CHECK(sel.start_index == 4);
  CHECK(clip.size() == 1);
}

TEST_CASE("response is linear in the query; selection scale-invariant") {
  Rng rng(19);
  for (int trial = 0; trial < 30; ++trial) {
    FeatureCache c(5);
    const std::size_t t = 1 + rng.below(32);
    for (std::size_t i = 0; i < t; ++i) {
      std::vector<double> f(5);
      for (auto& x : f) x = rng.normal();
      c.append(f);
    }
    std::vector<double> q(5), q2(5);
    const double alpha = 0.25 + rng.uniform();  // positive scale
    for (std::size_t j = 0; j < 5; ++j) {
      q[j] = rng.normal();
      q2[j] = alpha * q[j];
    }
    auto s1 = maxr::frame_response<double>(q, c);
    auto s2 = maxr::frame_response<double>(q2, c);
    for (std::size_t i = 0; i < t; ++i)
      CHECK(s2[i] == doctest::Approx(alpha * s1[i]).epsilon(1e-12));
    auto p1 = maxr::suffix_sum<double>(s1);
    auto p2 = maxr::suffix_sum<double>(s2);
    CHECK(maxr::select_start<double>(p1) == maxr::select_start<double>(p2));
  }
}

TEST_CASE("appending frames never changes earlier responses or selections") {
  Rng rng(23);
  FeatureCache c(3);
  std::vector<double> q = {0.3, -1.2, 0.7};
  std::vector<double> prev_s;
  std::size_t prev_sel = 0;
  for (int i = 0; i < 30; ++i) {
    std::vector<double> f(3);
    for (auto& x : f) x = rng.normal();
    c.append(f);
    auto s = maxr::frame_response<double>(q, c);
    // Pure functions of (query, prefix): the old response is a bit-exact
    // prefix of the new one, and re-running the old selection from the
    // stored prefix reproduces it.
    for (std::size_t k = 0; k < prev_s.size(); ++k) CHECK(s[k] == prev_s[k]);
    if (!prev_s.empty()) {
      auto p_again = maxr::suffix_sum<double>(prev_s);
      CHECK(maxr::select_start<double>(p_again) == prev_sel);
    }
    prev_s = s;
    prev_sel = maxr::select_start<double>(maxr::suffix_sum<double>(s));
  }
}
