#pragma once

// The Integrated Impact Indicator (I3) in its classed and quantile forms,
// impact shares, the mean-based comparison indicators (MOCR, MECR, RCR,
// MNCS, energy/exergy/entropy) and unit rankings built from them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "i3/corpus.hpp"
#include "i3/error.hpp"
#include "i3/percentile.hpp"

namespace i3 {

/// Which citation value a paper is ranked by.
enum class CountBasis { integer, fractional };

struct I3Result {
  /// sum over classes of weight_k * n_k
  std::int64_t i3_classed = 0;
  /// sum over papers of their percentile
  double i3_quantile = 0;
  std::vector<std::size_t> class_counts;
  std::size_t n_papers = 0;
  PercentileScheme scheme = schemes::nsb6();
  TieRule rule = TieRule::midpoint;
};

namespace detail {

template <typename T>
PercentileRank paper_rank(const PaperRecord& p, const BasicReferenceSet<T>& refset, TieRule rule) {
  if constexpr (std::is_same_v<T, double>) {
    if (!p.fractional_citations) {
      throw InputError("paper '" + p.paper_id + "' has no fractional citations");
    }
    return rank_of(*p.fractional_citations, refset, rule);
  } else {
    return rank_of(p.citations, refset, rule);
  }
}

inline void require_refset(const PaperRecord& p, const Corpus& corpus) {
  if (!corpus.has_refset(p.refset_key)) {
    throw InputError("paper '" + p.paper_id + "' refers to unknown reference set '" + p.refset_key + "'");
  }
}

}  // namespace detail

/// I3 of a set of papers, each percentile-ranked within its own reference
/// set. Percentile sums are accumulated per reference set as exact
/// integers and divided once, so the quantile form does not depend on the
/// order of `papers`.
inline I3Result compute_i3(std::span<const PaperRecord> papers, const Corpus& corpus, const PercentileScheme& scheme,
                   TieRule rule = TieRule::midpoint, CountBasis basis = CountBasis::integer) {
  I3Result r;
  r.scheme = scheme;
  r.rule = rule;
  r.n_papers = papers.size();
  r.class_counts.assign(scheme.classes(), 0);

  std::map<std::string, std::pair<std::int64_t, std::int64_t>> half_units_by_refset;  // key -> (sum, N)
  for (const auto& p : papers) {
    detail::require_refset(p, corpus);
    const PercentileRank rank = basis == CountBasis::integer
                                    ? detail::paper_rank(p, corpus.refset(p.refset_key), rule)
                                    : detail::paper_rank(p, corpus.fractional_refset(p.refset_key), rule);
    const auto cls = scheme.class_of(rank);
    ++r.class_counts[cls.index];
    r.i3_classed += cls.weight;
    auto& acc = half_units_by_refset[p.refset_key];
    acc.first += rank.half_units;
    acc.second = rank.n;
  }
  for (const auto& [key, acc] : half_units_by_refset) {
    r.i3_quantile += 50.0 * static_cast<double>(acc.first) / static_cast<double>(acc.second);
  }
  return r;
}

enum class ShareForm { quantile, classed };

/// 100 * I3(subset) / I3(reference_papers). `subset` must be contained in
/// `reference_papers`.
inline double i3_share(std::span<const PaperRecord> subset, std::span<const PaperRecord> reference_papers,
                       const Corpus& corpus, const PercentileScheme& scheme, TieRule rule = TieRule::midpoint,
                       ShareForm form = ShareForm::quantile, CountBasis basis = CountBasis::integer) {
  std::set<std::string_view> reference_ids;
  for (const auto& p : reference_papers) reference_ids.insert(p.paper_id);
  for (const auto& p : subset) {
    if (!reference_ids.contains(p.paper_id)) {
      throw DomainError("paper '" + p.paper_id + "' is not part of the reference papers");
    }
  }
  const auto part = compute_i3(subset, corpus, scheme, rule, basis);
  const auto whole = compute_i3(reference_papers, corpus, scheme, rule, basis);
  const double num = form == ShareForm::quantile ? part.i3_quantile : static_cast<double>(part.i3_classed);
  const double den = form == ShareForm::quantile ? whole.i3_quantile : static_cast<double>(whole.i3_classed);
  if (!(den > 0.0)) throw DomainError("reference I3 is zero; share undefined");
  return 100.0 * num / den;
}

struct BaselineResult {
  std::size_t n_papers = 0;
  /// mean observed citations
  double mocr = 0;
  /// mean over papers of their reference-set mean
  double mecr = 0;
  /// mocr / mecr ("rate of averages"); empty when mecr = 0
  std::optional<double> rcr;
  /// mean over papers of c_i / refset mean ("average of rates"); empty
  /// when some paper's reference set has mean 0
  std::optional<double> mncs;
  double energy = 0;   // sum c_i^2
  double exergy = 0;   // C^2 / P
  double entropy = 0;  // energy - exergy
};

inline BaselineResult baselines(std::span<const PaperRecord> papers, const Corpus& corpus) {
  if (papers.empty()) throw DomainError("baselines need at least one paper");
  BaselineResult r;
  r.n_papers = papers.size();
  const auto p_count = static_cast<double>(papers.size());

  std::int64_t total = 0;
  std::int64_t sum_sq = 0;
  double expected_sum = 0;
  double ratio_sum = 0;
  bool ratios_defined = true;
  std::map<std::string, double> refset_means;
  for (const auto& p : papers) {
    detail::require_refset(p, corpus);
    auto [it, fresh] = refset_means.try_emplace(p.refset_key, 0.0);
    if (fresh) it->second = corpus.refset(p.refset_key).mean();
    const double expected = it->second;
    total += p.citations;
    sum_sq += p.citations * p.citations;
    expected_sum += expected;
    if (expected > 0.0) {
      ratio_sum += static_cast<double>(p.citations) / expected;
    } else {
      ratios_defined = false;
    }
  }
  r.mocr = static_cast<double>(total) / p_count;
  r.mecr = expected_sum / p_count;
  if (r.mecr > 0.0) r.rcr = r.mocr / r.mecr;
  if (ratios_defined) r.mncs = ratio_sum / p_count;

  r.energy = static_cast<double>(sum_sq);
  r.exergy = static_cast<double>(static_cast<long double>(total) * static_cast<long double>(total) /
                                 static_cast<long double>(papers.size()));
  r.entropy = r.energy - r.exergy;
  return r;
}

enum class Indicator { i3_classed, i3_quantile, rcr, mncs, exergy };

inline std::string_view to_string(Indicator ind) {
  switch (ind) {
    case Indicator::i3_classed: return "i3_classed";
    case Indicator::i3_quantile: return "i3_quantile";
    case Indicator::rcr: return "rcr";
    case Indicator::mncs: return "mncs";
    case Indicator::exergy: return "exergy";
  }
  return "i3_quantile";
}

inline Indicator parse_indicator(std::string_view name) {
  for (auto ind : {Indicator::i3_classed, Indicator::i3_quantile, Indicator::rcr, Indicator::mncs,
                   Indicator::exergy}) {
    if (to_string(ind) == name) return ind;
  }
  throw InputError("unknown indicator '" + std::string(name) + "'");
}

/// Everything computed for one unit of a dimension.
struct UnitReport {
  std::string unit;
  I3Result i3;
  /// unit's i3_quantile as a percentage of the whole corpus' i3_quantile
  std::optional<double> share_pct;
  BaselineResult baseline;

  std::optional<double> value(Indicator ind) const {
    switch (ind) {
      case Indicator::i3_classed: return static_cast<double>(i3.i3_classed);
      case Indicator::i3_quantile: return i3.i3_quantile;
      case Indicator::rcr: return baseline.rcr;
      case Indicator::mncs: return baseline.mncs;
      case Indicator::exergy: return baseline.exergy;
    }
    return std::nullopt;
  }
};

/// One report per label of `dimension`, in label order. The corpus as a
/// whole is the reference for the share column.
inline std::vector<UnitReport> unit_reports(const Corpus& corpus, std::string_view dimension,
                                            const PercentileScheme& scheme, TieRule rule = TieRule::midpoint,
                                            CountBasis basis = CountBasis::integer) {
  const auto whole = compute_i3(corpus.papers(), corpus, scheme, rule, basis);
  std::vector<UnitReport> out;
  for (const auto& label : corpus.labels(dimension)) {
    auto sel = subset(corpus, dimension, label);
    UnitReport rep;
    rep.unit = label;
    rep.i3 = compute_i3(sel.papers, corpus, scheme, rule, basis);
    if (whole.i3_quantile > 0.0) rep.share_pct = 100.0 * rep.i3.i3_quantile / whole.i3_quantile;
    rep.baseline = baselines(sel.papers, corpus);
    out.push_back(std::move(rep));
  }
  return out;
}

struct RankedUnit {
  std::string unit;
  std::optional<double> value;  // empty: indicator undefined, ranked last
  std::size_t position = 0;     // 1-based
};

struct Ranking {
  Indicator indicator = Indicator::i3_quantile;
  std::vector<RankedUnit> entries;

  std::size_t position_of(std::string_view unit) const {
    for (const auto& e : entries) {
      if (e.unit == unit) return e.position;
    }
    throw DomainError("unit '" + std::string(unit) + "' is not in the ranking");
  }
};

/// Descending by value, ties by label ascending; units with an undefined
/// value go last (by label).
inline Ranking rank_by(std::vector<std::pair<std::string, std::optional<double>>> values, Indicator indicator) {
  std::sort(values.begin(), values.end(), [](const auto& a, const auto& b) {
    if (a.second.has_value() != b.second.has_value()) return a.second.has_value();
    if (a.second && *a.second != *b.second) return *a.second > *b.second;
    return a.first < b.first;
  });
  Ranking r;
  r.indicator = indicator;
  for (std::size_t i = 0; i < values.size(); ++i) {
    r.entries.push_back({std::move(values[i].first), values[i].second, i + 1});
  }
  return r;
}

inline Ranking rank_reports(std::span<const UnitReport> reports, Indicator indicator) {
  std::vector<std::pair<std::string, std::optional<double>>> values;
  for (const auto& rep : reports) values.emplace_back(rep.unit, rep.value(indicator));
  return rank_by(std::move(values), indicator);
}

inline Ranking rank_units(const Corpus& corpus, std::string_view dimension, Indicator indicator,
                          const PercentileScheme& scheme, TieRule rule = TieRule::midpoint,
                          CountBasis basis = CountBasis::integer) {
  if (corpus.labels(dimension).size() < 2) {
    throw DomainError("dimension '" + std::string(dimension) + "' labels fewer than two units");
  }
  auto reports = unit_reports(corpus, dimension, scheme, rule, basis);
  return rank_reports(reports, indicator);
}

struct UnitDelta {
  std::string unit;
  std::size_t position_a = 0;
  std::size_t position_b = 0;
  /// position_b - position_a; negative means the unit moved up in B
  std::int64_t delta = 0;
};

struct RankingComparison {
  double spearman = 1;
  /// in the order of ranking A
  std::vector<UnitDelta> deltas;
  /// pairs (u, v) with u above v in A but below v in B
  std::vector<std::pair<std::string, std::string>> swaps;
};

inline RankingComparison compare_rankings(const Ranking& a, const Ranking& b) {
  std::map<std::string, std::size_t> pos_b;
  for (const auto& e : b.entries) pos_b.emplace(e.unit, e.position);
  if (a.entries.size() != b.entries.size() || pos_b.size() != b.entries.size()) {
    throw DomainError("rankings cover different units");
  }
  for (const auto& e : a.entries) {
    if (!pos_b.contains(e.unit)) throw DomainError("unit '" + e.unit + "' is missing from the second ranking");
  }
  const std::size_t n = a.entries.size();
  if (n < 2) throw DomainError("rank correlation needs at least two units");

  RankingComparison cmp;
  double d2 = 0;
  for (const auto& e : a.entries) {
    const std::size_t pb = pos_b.at(e.unit);
    const auto d = static_cast<std::int64_t>(pb) - static_cast<std::int64_t>(e.position);
    d2 += static_cast<double>(d * d);
    cmp.deltas.push_back({e.unit, e.position, pb, d});
  }
  const double nn = static_cast<double>(n);
  cmp.spearman = 1.0 - 6.0 * d2 / (nn * (nn * nn - 1.0));

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& u = a.entries[i];
      const auto& v = a.entries[j];
      if (u.position < v.position && pos_b.at(u.unit) > pos_b.at(v.unit)) {
        cmp.swaps.emplace_back(u.unit, v.unit);
      }
    }
  }
  return cmp;
}

}  // namespace i3
