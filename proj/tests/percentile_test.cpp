#include <cstdint>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "i3/percentile.hpp"
#include "oracles.hpp"

using i3::ReferenceSet;
using i3::TieRule;

namespace {

oracle::Rule to_oracle(TieRule r) {
  switch (r) {
    case TieRule::strictly_below: return oracle::Rule::strictly_below;
    case TieRule::below_or_equal: return oracle::Rule::below_or_equal;
    case TieRule::midpoint: return oracle::Rule::midpoint;
  }
  return oracle::Rule::midpoint;
}

constexpr TieRule kRules[] = {TieRule::strictly_below, TieRule::below_or_equal, TieRule::midpoint};

std::vector<std::int64_t> random_multiset(std::mt19937_64& rng, int max_n = 200, int max_count = 50) {
  std::vector<std::int64_t> v(1 + rng() % max_n);
  for (auto& x : v) x = static_cast<std::int64_t>(rng() % (max_count + 1));
  return v;
}

}  // namespace

TEST(Percentile, StrictlyBelowHandCount) {
  ReferenceSet rs("F", {0, 1, 1, 2, 10});
  EXPECT_DOUBLE_EQ(i3::percentile_of<std::int64_t>(2, rs, TieRule::strictly_below), 60.0);
}

TEST(Percentile, AllEqualMidpointIsFifty) {
  ReferenceSet rs("F", {4, 4, 4, 4, 4, 4, 4});
  EXPECT_DOUBLE_EQ(i3::percentile_of<std::int64_t>(4, rs, TieRule::midpoint), 50.0);
}

TEST(Percentile, AboveMaximumIsHundred) {
  ReferenceSet rs("F", {0, 3, 9});
  EXPECT_DOUBLE_EQ(i3::percentile_of<std::int64_t>(10, rs, TieRule::below_or_equal), 100.0);
  EXPECT_DOUBLE_EQ(i3::percentile_of<std::int64_t>(10, rs, TieRule::strictly_below), 100.0);
}

TEST(Percentile, EmptyReferenceSetIsAnError) {
  EXPECT_THROW(ReferenceSet("F", {}), i3::DomainError);
}

TEST(Percentile, MatchesCountingOracle) {
  std::mt19937_64 rng(2011);
  for (int trial = 0; trial < 300; ++trial) {
    auto values = random_multiset(rng);
    ReferenceSet rs("F", values);
    for (std::int64_t c = -1; c <= 52; ++c) {
      for (auto rule : kRules) {
        ASSERT_EQ(i3::percentile_of(c, rs, rule), oracle::percentile(c, values, to_oracle(rule)))
            << "c=" << c << " rule=" << i3::to_string(rule);
      }
    }
  }
}

TEST(Percentile, MonotoneAndOrderedByRule) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    ReferenceSet rs("F", random_multiset(rng));
    for (auto rule : kRules) {
      double prev = -1;
      for (std::int64_t c = 0; c <= 51; ++c) {
        const double p = i3::percentile_of(c, rs, rule);
        ASSERT_GE(p, prev);
        ASSERT_GE(p, 0.0);
        ASSERT_LE(p, 100.0);
        prev = p;
      }
    }
    for (std::int64_t c = 0; c <= 51; ++c) {
      const double lo = i3::percentile_of(c, rs, TieRule::strictly_below);
      const double mid = i3::percentile_of(c, rs, TieRule::midpoint);
      const double hi = i3::percentile_of(c, rs, TieRule::below_or_equal);
      ASSERT_LE(lo, mid);
      ASSERT_LE(mid, hi);
    }
  }
}

TEST(Percentile, ScaleFree) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    auto values = random_multiset(rng);
    const std::int64_t k = 1 + static_cast<std::int64_t>(rng() % 9);
    auto scaled = values;
    for (auto& v : scaled) v *= k;
    ReferenceSet a("F", values), b("F", scaled);
    for (auto v : values) {
      for (auto rule : kRules) ASSERT_EQ(i3::percentile_of(v, a, rule), i3::percentile_of(v * k, b, rule));
    }
  }
}

TEST(Scheme, QuartileLookup) {
  const auto q = i3::schemes::quartiles();
  auto c = q.class_of(60.0);
  EXPECT_EQ(c.index, 2u);
  EXPECT_EQ(c.weight, 3);
}

TEST(Scheme, LowerInclusiveBoundary) {
  const auto q = i3::schemes::quartiles();
  EXPECT_EQ(q.class_of(50.0).index, 2u);
  EXPECT_EQ(q.class_of(49.999).index, 1u);
  EXPECT_EQ(q.class_of(0.0).index, 0u);
  EXPECT_EQ(q.class_of(100.0).index, 3u);
}

TEST(Scheme, Nsb6TopClass) {
  const auto s = i3::schemes::nsb6();
  auto c = s.class_of(99.5);
  EXPECT_EQ(c.index, 5u);
  EXPECT_EQ(c.weight, 6);
  EXPECT_EQ(s.boundaries(), (std::vector<double>{50, 75, 90, 95, 99}));
}

TEST(Scheme, OutOfRangePercentile) {
  const auto q = i3::schemes::quartiles();
  EXPECT_THROW(q.class_of(-0.1), i3::DomainError);
  EXPECT_THROW(q.class_of(100.1), i3::DomainError);
}

TEST(Scheme, EveryPercentileHasExactlyOneClass) {
  for (const auto& s : {i3::schemes::quartiles(), i3::schemes::nsb6(), i3::schemes::top10()}) {
    for (int i = 0; i <= 100000; ++i) {
      const double p = i / 1000.0;
      const auto c = s.class_of(p);
      ASSERT_LT(c.index, s.classes());
      const double lo = c.index == 0 ? 0.0 : s.boundaries()[c.index - 1];
      const double hi = c.index == s.boundaries().size() ? 100.0 : s.boundaries()[c.index];
      ASSERT_GE(p, lo);
      if (c.index + 1 < s.classes()) {
        ASSERT_LT(p, hi);
      }
    }
  }
}

TEST(Scheme, ExactRankAgreesWithRealLookup) {
  const auto s = i3::schemes::nsb6();
  for (std::int64_t n = 1; n <= 300; ++n) {
    for (std::int64_t h = 0; h <= 2 * n; ++h) {
      i3::PercentileRank r{h, n};
      ASSERT_EQ(s.class_of(r).index, s.class_of(r.value()).index) << h << "/" << n;
    }
  }
}

TEST(Scheme, Validation) {
  EXPECT_THROW(i3::PercentileScheme("x", {50, 50}, {1, 2, 3}), i3::InputError);
  EXPECT_THROW(i3::PercentileScheme("x", {50}, {2, 1}), i3::InputError);
  EXPECT_THROW(i3::PercentileScheme("x", {0}, {1, 2}), i3::InputError);
  EXPECT_THROW(i3::PercentileScheme("x", {50}, {1, 2, 3}), i3::InputError);
  EXPECT_NO_THROW(i3::PercentileScheme("x", {10, 20.5}, {1, 5, 9}));
}

TEST(Scheme, FromJson) {
  auto s = i3::scheme_from_json(nlohmann::json::parse(R"({"name":"halves","boundaries":[50],"weights":[1,3]})"));
  EXPECT_EQ(s.name(), "halves");
  EXPECT_EQ(s.class_of(75.0).weight, 3);
  EXPECT_THROW(i3::scheme_from_json(nlohmann::json::parse(R"({"name":"bad"})")), i3::InputError);
  EXPECT_EQ(i3::load_scheme("top10"), i3::schemes::top10());
}

TEST(ExpectedProportions, TieFreeHundredIsUniformOverQuartiles) {
  std::vector<std::int64_t> v(100);
  for (int i = 0; i < 100; ++i) v[i] = 3 * i + 1;
  ReferenceSet rs("F", v);
  // enumerate the members' percentiles directly
  std::vector<double> oracle_props(4, 0.0);
  for (auto c : v) {
    const double p = oracle::percentile(c, v, oracle::Rule::midpoint);
    oracle_props[p < 25 ? 0 : p < 50 ? 1 : p < 75 ? 2 : 3] += 0.01;
  }
  auto props = i3::expected_class_proportions(rs, i3::schemes::quartiles(), TieRule::midpoint);
  ASSERT_EQ(props.size(), 4u);
  for (int k = 0; k < 4; ++k) {
    EXPECT_DOUBLE_EQ(props[k], 0.25);
    EXPECT_NEAR(props[k], oracle_props[k], 1e-12);
  }
}

TEST(ExpectedProportions, AllIdenticalSitAtFifty) {
  // every member is at percentile 50, which the lower-inclusive rule puts
  // in the third quartile class [50, 75)
  ReferenceSet rs("F", std::vector<std::int64_t>(37, 6));
  auto props = i3::expected_class_proportions(rs, i3::schemes::quartiles(), TieRule::midpoint);
  EXPECT_EQ(props, (std::vector<double>{0, 0, 1, 0}));
}

TEST(ExpectedProportions, SingleMember) {
  ReferenceSet rs("F", {12});
  auto props = i3::expected_class_proportions(rs, i3::schemes::nsb6(), TieRule::midpoint);
  EXPECT_EQ(props, (std::vector<double>{0, 1, 0, 0, 0, 0}));
}

TEST(ExpectedProportions, SumToOne) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    ReferenceSet rs("F", random_multiset(rng));
    for (auto rule : kRules) {
      double total = 0;
      for (double p : i3::expected_class_proportions(rs, i3::schemes::nsb6(), rule)) total += p;
      ASSERT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(FractionalReferenceSet, RealCountsUseTheSameRules) {
  i3::FractionalReferenceSet rs("F", {0.1, 0.1, 1.0});
  EXPECT_NEAR(i3::percentile_of(1.0, rs, TieRule::strictly_below), 66.6667, 1e-4);
  EXPECT_DOUBLE_EQ(i3::percentile_of(1.0, rs, TieRule::strictly_below), 200.0 / 3.0);
  i3::FractionalReferenceSet same("F", {0.25, 0.25, 0.25});
  EXPECT_DOUBLE_EQ(i3::percentile_of(0.25, same, TieRule::midpoint), 50.0);
  i3::FractionalReferenceSet one("F", {0.7});
  EXPECT_DOUBLE_EQ(i3::percentile_of(0.7, one, TieRule::midpoint), 50.0);
}
