#pragma once

// Non-parametric tests of observed percentile-class distributions against
// the expectation given by the reference set.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "i3/error.hpp"
#include "i3/special.hpp"

namespace i3 {

struct ClassOutcome {
  std::size_t index = 0;  // 0-based class index
  double observed = 0;
  double expected = 0;
  double residual = 0;  // (O - E) / sqrt(E)
};

struct TestResult {
  std::string test_name;
  double statistic = 0;
  std::optional<int> df;
  double p_value = 1;
  std::vector<ClassOutcome> per_class;
  std::vector<std::string> warnings;

  /// {test, statistic, df, p_value, classes[]} in that key order.
  nlohmann::ordered_json to_json() const {
    using nlohmann::ordered_json;
    ordered_json j;
    j["test"] = test_name;
    j["statistic"] = statistic;
    j["df"] = df ? ordered_json(*df) : ordered_json(nullptr);
    j["p_value"] = p_value;
    j["classes"] = ordered_json::array();
    for (const auto& c : per_class) {
      ordered_json cj;
      cj["class"] = c.index + 1;
      cj["observed"] = c.observed;
      cj["expected"] = c.expected;
      cj["residual"] = c.residual;
      j["classes"].push_back(cj);
    }
    if (!warnings.empty()) j["warnings"] = warnings;
    return j;
  }
};

inline constexpr double kProportionTolerance = 1e-9;

/// n * proportion_k per class, unrounded.
inline std::vector<double> expected_counts(double n, std::span<const double> proportions) {
  if (n < 0) throw DomainError("subset size must be non-negative");
  double total = 0;
  for (double p : proportions) {
    if (!(p >= 0.0)) throw DomainError("proportions must be non-negative");
    total += p;
  }
  if (std::fabs(total - 1.0) > kProportionTolerance) {
    throw DomainError("proportions sum to " + std::to_string(total) + ", not 1");
  }
  std::vector<double> out;
  out.reserve(proportions.size());
  for (double p : proportions) out.push_back(n * p);
  return out;
}

/// Pearson chi-square goodness of fit, df = classes - 1.
inline TestResult chi_square_gof(std::span<const double> observed, std::span<const double> expected) {
  if (observed.size() != expected.size()) throw DomainError("observed and expected differ in class count");
  if (observed.size() < 2) throw DomainError("chi-square needs at least two classes");

  TestResult r;
  r.test_name = "chi_square_gof";
  double obs_total = 0, exp_total = 0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    if (!(expected[k] > 0.0)) {
      throw DomainError("expected count of class " + std::to_string(k + 1) +
                        " is zero; merge it with a neighbouring class");
    }
    if (!(observed[k] >= 0.0)) throw DomainError("observed counts must be non-negative");
    obs_total += observed[k];
    exp_total += expected[k];
  }
  if (std::fabs(obs_total - exp_total) > 1e-6 * std::max(1.0, std::fabs(exp_total))) {
    throw DomainError("observed total " + std::to_string(obs_total) + " does not match expected total " +
                      std::to_string(exp_total));
  }

  bool sparse = false;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    const double diff = observed[k] - expected[k];
    r.statistic += diff * diff / expected[k];
    r.per_class.push_back({k, observed[k], expected[k], diff / std::sqrt(expected[k])});
    sparse = sparse || expected[k] < 5.0;
  }
  if (sparse) r.warnings.emplace_back("expected count below 5 in at least one class");
  r.df = static_cast<int>(observed.size()) - 1;
  r.p_value = special::chi_square_sf(r.statistic, *r.df);
  return r;
}

inline TestResult chi_square_gof(std::span<const std::size_t> observed, std::span<const double> expected) {
  std::vector<double> obs(observed.begin(), observed.end());
  return chi_square_gof(std::span<const double>(obs), expected);
}

/// Share of a subset in one class tested against the reference-set
/// proportion `pi`; the subset stays part of the reference set of size
/// `reference_size`. Two-sided p.
inline TestResult ztest_class_proportion(std::size_t observed, std::size_t n, double pi,
                                         std::size_t reference_size) {
  if (n == 0) throw DomainError("z-test needs a non-empty subset");
  if (n > reference_size) throw DomainError("subset larger than its reference set");
  if (observed > n) throw DomainError("class count exceeds subset size");
  if (!(pi > 0.0 && pi < 1.0)) throw DomainError("degenerate class proportion " + std::to_string(pi));

  const double nn = static_cast<double>(n);
  const double share = static_cast<double>(observed) / nn;
  const double z = (share - pi) / std::sqrt(pi * (1.0 - pi) / nn);
  TestResult r;
  r.test_name = "z_class_proportion";
  r.statistic = z;
  r.p_value = std::min(1.0, special::normal_two_sided(z));
  r.per_class.push_back({0, static_cast<double>(observed), nn * pi, z});
  return r;
}

/// One z-test per class; classes with a degenerate proportion are empty.
inline std::vector<std::optional<TestResult>> ztest_by_class(std::span<const std::size_t> observed,
                                                             std::span<const double> proportions,
                                                             std::size_t reference_size) {
  if (observed.size() != proportions.size()) throw DomainError("observed and proportions differ in class count");
  const std::size_t n = std::accumulate(observed.begin(), observed.end(), std::size_t{0});
  std::vector<std::optional<TestResult>> out;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    const double pi = proportions[k];
    if (pi > 0.0 && pi < 1.0) {
      auto r = ztest_class_proportion(observed[k], n, pi, reference_size);
      r.per_class.front().index = k;
      out.emplace_back(std::move(r));
    } else {
      out.emplace_back(std::nullopt);
    }
  }
  return out;
}

enum class MannWhitneyMethod { automatic, exact, normal };

/// Above this n_A * n_B the automatic method switches to the normal
/// approximation.
inline constexpr std::size_t kMannWhitneyExactLimit = 2000;

namespace detail {

struct RankedSamples {
  std::vector<std::int64_t> doubled_ranks_a;
  std::vector<std::int64_t> doubled_ranks_b;
  std::vector<std::int64_t> all_doubled_ranks;
  double tie_term = 0;  // sum over tie groups of t^3 - t
};

inline RankedSamples midranks(std::span<const double> a, std::span<const double> b) {
  struct Item {
    double v;
    bool from_a;
  };
  std::vector<Item> items;
  items.reserve(a.size() + b.size());
  for (double v : a) items.push_back({v, true});
  for (double v : b) items.push_back({v, false});
  std::sort(items.begin(), items.end(), [](const Item& x, const Item& y) { return x.v < y.v; });

  RankedSamples out;
  for (std::size_t i = 0; i < items.size();) {
    std::size_t j = i;
    while (j < items.size() && items[j].v == items[i].v) ++j;
    // positions i+1 .. j share the midrank (i+1+j)/2
    const auto doubled = static_cast<std::int64_t>(i + 1 + j);
    const auto t = static_cast<double>(j - i);
    out.tie_term += t * t * t - t;
    for (std::size_t k = i; k < j; ++k) {
      (items[k].from_a ? out.doubled_ranks_a : out.doubled_ranks_b).push_back(doubled);
      out.all_doubled_ranks.push_back(doubled);
    }
    i = j;
  }
  return out;
}

// Null distribution of the doubled rank sum of a group of size m drawn
// from `ranks` without replacement. Returned as counts indexed from `lo`.
struct RankSumDistribution {
  std::int64_t lo = 0;
  std::vector<double> ways;
};

inline RankSumDistribution rank_sum_distribution(std::span<const std::int64_t> ranks, std::size_t m) {
  std::vector<std::int64_t> sorted(ranks.begin(), ranks.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  std::vector<std::int64_t> lo(m + 1, 0), hi(m + 1, 0);
  for (std::size_t k = 1; k <= m; ++k) {
    lo[k] = lo[k - 1] + sorted[k - 1];
    hi[k] = hi[k - 1] + sorted[n - k];
  }
  std::vector<std::vector<double>> ways(m + 1);
  for (std::size_t k = 0; k <= m; ++k) ways[k].assign(static_cast<std::size_t>(hi[k] - lo[k] + 1), 0.0);
  ways[0][0] = 1.0;

  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t r = sorted[i];
    for (std::size_t k = std::min(m, i + 1); k >= 1; --k) {
      const auto& prev = ways[k - 1];
      auto& cur = ways[k];
      for (std::size_t s = 0; s < prev.size(); ++s) {
        if (prev[s] == 0.0) continue;
        const std::int64_t target = lo[k - 1] + static_cast<std::int64_t>(s) + r - lo[k];
        if (target >= 0 && target < static_cast<std::int64_t>(cur.size())) {
          cur[static_cast<std::size_t>(target)] += prev[s];
        }
      }
    }
  }
  return {lo[m], std::move(ways[m])};
}

}  // namespace detail

/// Mann-Whitney U with midranks for ties. `statistic` is U_A, the number
/// of (a, b) pairs with a > b plus half the tied pairs. Two-sided p, exact
/// from the permutation distribution or from the tie-corrected normal
/// approximation with continuity correction.
inline TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                                 MannWhitneyMethod method = MannWhitneyMethod::automatic) {
  if (a.empty() || b.empty()) throw DomainError("Mann-Whitney U needs two non-empty samples");
  const auto ranked = detail::midranks(a, b);
  const auto na = static_cast<std::int64_t>(a.size());
  const auto nb = static_cast<std::int64_t>(b.size());
  const std::int64_t rank_sum_a = std::accumulate(ranked.doubled_ranks_a.begin(),
                                                  ranked.doubled_ranks_a.end(), std::int64_t{0});
  // 2 * U_A
  const std::int64_t doubled_u = rank_sum_a - na * (na + 1);
  const std::int64_t observed_dev = std::llabs(doubled_u - na * nb);

  if (method == MannWhitneyMethod::automatic) {
    method = static_cast<std::size_t>(na * nb) <= kMannWhitneyExactLimit ? MannWhitneyMethod::exact
                                                                        : MannWhitneyMethod::normal;
  }

  TestResult r;
  r.statistic = 0.5 * static_cast<double>(doubled_u);
  if (method == MannWhitneyMethod::exact) {
    r.test_name = "mann_whitney_u_exact";
    // distribution of the smaller group's rank sum; |2U - na*nb| is the
    // same from either side
    const bool use_a = na <= nb;
    const std::int64_t m = use_a ? na : nb;
    const auto dist = detail::rank_sum_distribution(ranked.all_doubled_ranks, static_cast<std::size_t>(m));
    double total = 0, extreme = 0;
    for (std::size_t s = 0; s < dist.ways.size(); ++s) {
      const std::int64_t sum = dist.lo + static_cast<std::int64_t>(s);
      const std::int64_t dev = std::llabs(sum - m * (m + 1) - na * nb);
      total += dist.ways[s];
      if (dev >= observed_dev) extreme += dist.ways[s];
    }
    r.p_value = std::min(1.0, extreme / total);
  } else {
    r.test_name = "mann_whitney_u_normal";
    const double n = static_cast<double>(na + nb);
    const double variance = static_cast<double>(na * nb) / 12.0 *
                            ((n + 1.0) - ranked.tie_term / (n * (n - 1.0)));
    if (!(variance > 0.0)) {
      r.p_value = 1.0;
    } else {
      const double dev = std::max(0.0, 0.5 * static_cast<double>(observed_dev) - 0.5);
      r.p_value = std::min(1.0, special::normal_two_sided(dev / std::sqrt(variance)));
    }
  }
  return r;
}

}  // namespace i3
