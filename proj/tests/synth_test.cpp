#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "i3/indicators.hpp"
#include "i3/significance.hpp"
#include "i3/synth.hpp"
#include "oracles.hpp"

using namespace i3::synth;

namespace {

std::vector<double> counts_of(const i3::Corpus& c) {
  std::vector<double> v;
  for (const auto& p : c.papers()) v.push_back(static_cast<double>(p.citations));
  return v;
}

}  // namespace

TEST(Synth, ConstantDistribution) {
  GenSpec spec;
  spec.distribution = Constant{4};
  spec.n_papers = 50;
  auto c = generate(spec);
  ASSERT_EQ(c.size(), 50u);
  for (const auto& p : c.papers()) EXPECT_EQ(p.citations, 4);
}

TEST(Synth, SameSeedSameCorpus) {
  GenSpec spec;
  spec.n_papers = 500;
  spec.seed = 99;
  spec.unit_layout = {{"A", 20}, {"B", 30}};
  EXPECT_EQ(generate(spec), generate(spec));
  auto other = spec;
  other.seed = 100;
  EXPECT_NE(counts_of(generate(spec)), counts_of(generate(other)));
}

TEST(Synth, UnitLayoutAssignsLeadingPapers) {
  GenSpec spec;
  spec.n_papers = 10;
  spec.unit_layout = {{"A", 3}, {"B", 2}};
  auto c = generate(spec);
  EXPECT_EQ(i3::subset(c, "unit", "A").papers.size(), 3u);
  EXPECT_EQ(i3::subset(c, "unit", "B").papers.size(), 2u);
  EXPECT_EQ(c.find("P000001")->unit("unit"), "A");
  EXPECT_FALSE(c.find("P000010")->unit("unit").has_value());
  spec.unit_layout = {{"A", 11}};
  EXPECT_THROW(generate(spec), i3::InputError);
}

TEST(Synth, LognormalIsRightSkewed) {
  GenSpec spec;
  spec.distribution = LogNormal{1.0, 1.2};
  spec.n_papers = 5000;
  spec.seed = 3;
  auto v = counts_of(generate(spec));
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  std::sort(v.begin(), v.end());
  const double median = v[v.size() / 2];
  double m2 = 0, m3 = 0;
  for (double x : v) {
    m2 += (x - mean) * (x - mean);
    m3 += (x - mean) * (x - mean) * (x - mean);
  }
  m2 /= static_cast<double>(v.size());
  m3 /= static_cast<double>(v.size());
  EXPECT_GT(mean, median);
  EXPECT_GT(m3 / std::pow(m2, 1.5), 2.0);
  EXPECT_GE(v.front(), 0.0);
}

TEST(Synth, PowerLawFrequenciesFollowTheLaw) {
  GenSpec spec;
  spec.distribution = DiscretePowerLaw{2.0, 200};
  spec.n_papers = 20000;
  spec.seed = 5;
  auto c = generate(spec);
  std::map<std::int64_t, int> freq;
  for (const auto& p : c.papers()) {
    ASSERT_LE(p.citations, 200);
    ++freq[p.citations];
  }
  // P(0) / P(1) = 2^alpha = 4
  EXPECT_NEAR(static_cast<double>(freq[0]) / freq[1], 4.0, 0.4);
}

TEST(Synth, RejectsBadParameters) {
  GenSpec spec;
  spec.n_papers = 0;
  EXPECT_THROW(generate(spec), i3::InputError);
  spec.n_papers = -3;
  EXPECT_THROW(generate(spec), i3::InputError);
  spec.n_papers = 10;
  spec.distribution = DiscretePowerLaw{0.0, 10};
  EXPECT_THROW(generate(spec), i3::InputError);
  spec.distribution = Constant{-1};
  EXPECT_THROW(generate(spec), i3::InputError);
}

TEST(Synth, UniformAndBelowStayInRange) {
  Xorshift64Star rng(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_LT(rng.below(7), 7u);
  }
}

TEST(ReversalFixture, MncsLeaderFallsBehindOnI3) {
  const auto corpus = reversal_fixture();
  // recompute both orderings by hand from raw counts
  std::vector<std::int64_t> all;
  for (const auto& p : corpus.papers()) all.push_back(p.citations);
  const double mean = std::accumulate(all.begin(), all.end(), 0.0) / static_cast<double>(all.size());
  std::map<std::string, double> mncs, i3q;
  std::map<std::string, int> n;
  for (const auto& p : corpus.papers()) {
    auto u = p.unit("pi");
    if (!u) continue;
    mncs[std::string(*u)] += static_cast<double>(p.citations) / mean;
    i3q[std::string(*u)] += oracle::percentile(p.citations, all, oracle::Rule::midpoint);
    ++n[std::string(*u)];
  }
  for (auto& [u, v] : mncs) v /= n[u];
  auto order = [](const std::map<std::string, double>& m) {
    std::vector<std::pair<std::string, double>> v(m.begin(), m.end());
    std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    std::map<std::string, int> pos;
    for (std::size_t i = 0; i < v.size(); ++i) pos[v[i].first] = static_cast<int>(i) + 1;
    return pos;
  };
  const auto by_mncs = order(mncs);
  const auto by_i3 = order(i3q);
  EXPECT_EQ(by_mncs.at("U1"), 1);
  EXPECT_EQ(by_i3.at("U1"), 5);
  EXPECT_EQ(by_mncs.at("U6"), 6);
  EXPECT_EQ(by_i3.at("U6"), 1);
  EXPECT_LT(oracle::spearman(by_mncs, by_i3), 0.6);

  // the library agrees
  auto a = i3::rank_units(corpus, "pi", i3::Indicator::mncs, i3::schemes::nsb6());
  auto b = i3::rank_units(corpus, "pi", i3::Indicator::i3_quantile, i3::schemes::nsb6());
  auto cmp = i3::compare_rankings(a, b);
  EXPECT_NEAR(cmp.spearman, oracle::spearman(by_mncs, by_i3), 1e-12);
  EXPECT_EQ(a.entries.front().unit, "U1");
  EXPECT_EQ(b.entries.front().unit, "U6");
}

TEST(SignificanceFixture, RandomSampleIsUnremarkable) {
  const auto corpus = significance_fixture();
  ASSERT_EQ(corpus.size(), 2000u);
  const auto sel = i3::subset(corpus, "sample", "random");
  ASSERT_EQ(sel.papers.size(), 100u);
  auto a = i3::assess_subset(sel.papers, corpus, i3::schemes::nsb6());
  ASSERT_TRUE(a.chi_square.has_value());
  EXPECT_GT(a.chi_square->p_value, 0.05);
}

TEST(SignificanceFixture, TopDecileOverfillsTopClasses) {
  const auto corpus = significance_fixture();
  const auto sel = i3::subset(corpus, "decile", "top");
  ASSERT_EQ(sel.papers.size(), 200u);
  auto a = i3::assess_subset(sel.papers, corpus, i3::schemes::nsb6());
  ASSERT_TRUE(a.z_tests[5].has_value());
  EXPECT_GT(a.z_tests[5]->statistic, 0.0);
  EXPECT_LT(a.z_tests[5]->p_value, 1e-6);
  EXPECT_LT(a.chi_square->p_value, 1e-6);
}

TEST(SignificanceFixture, SuppliedExpectationReplacesReferenceSets) {
  const auto corpus = significance_fixture();
  const auto sel = i3::subset(corpus, "sample", "random");
  const auto nominal = i3::schemes::nsb6().nominal_proportions();
  auto a = i3::assess_subset(sel.papers, corpus, i3::schemes::nsb6(), i3::TieRule::midpoint,
                             i3::CountBasis::integer, nominal);
  EXPECT_TRUE(a.expectation_supplied);
  ASSERT_EQ(a.expected.size(), 6u);
  EXPECT_NEAR(a.expected[0], 50.0, 1e-12);
  EXPECT_NEAR(a.expected[5], 1.0, 1e-12);
  ASSERT_TRUE(a.z_tests[0].has_value());
  EXPECT_NEAR(a.z_tests[0]->per_class.front().expected, 50.0, 1e-12);
  EXPECT_THROW(i3::assess_subset(sel.papers, corpus, i3::schemes::nsb6(), i3::TieRule::midpoint,
                                 i3::CountBasis::integer, std::vector<double>{0.5, 0.5}),
               i3::DomainError);
  EXPECT_THROW(i3::assess_subset(sel.papers, corpus, i3::schemes::quartiles(), i3::TieRule::midpoint,
                                 i3::CountBasis::integer, std::vector<double>{0.5, 0.5, 0.5, 0.5}),
               i3::DomainError);
}
