#pragma once

// Tests a subset of papers against the expectation set by the reference
// sets it belongs to. The subset is never removed from its reference sets.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "i3/corpus.hpp"
#include "i3/error.hpp"
#include "i3/indicators.hpp"
#include "i3/percentile.hpp"
#include "i3/stats.hpp"

namespace i3 {

struct SubsetAssessment {
  std::size_t n_papers = 0;
  std::vector<std::size_t> observed;
  /// sum over subset papers of their reference set's class proportions
  std::vector<double> expected;
  /// true when `expected` came from user-supplied proportions
  bool expectation_supplied = false;
  /// classes with zero expected count are left out of the chi-square
  /// test; empty when fewer than two classes remain
  std::optional<TestResult> chi_square;
  /// one per class; empty for degenerate class proportions
  std::vector<std::optional<TestResult>> z_tests;
  /// share of the subset's I3 (quantile form) in the whole corpus' I3
  std::optional<double> share_pct;
  I3Result i3;
};

/// Observed class counts of `papers` against the expectation from their
/// reference sets, or against `proportions` (one per class) when given.
inline SubsetAssessment assess_subset(std::span<const PaperRecord> papers, const Corpus& corpus,
                                      const PercentileScheme& scheme, TieRule rule = TieRule::midpoint,
                                      CountBasis basis = CountBasis::integer,
                                      std::optional<std::vector<double>> proportions = std::nullopt) {
  if (papers.empty()) throw DomainError("subset is empty");
  if (proportions && proportions->size() != scheme.classes()) {
    throw DomainError("expected proportions give " + std::to_string(proportions->size()) + " classes, scheme '" +
                      scheme.name() + "' has " + std::to_string(scheme.classes()));
  }
  SubsetAssessment out;
  out.n_papers = papers.size();
  out.i3 = compute_i3(papers, corpus, scheme, rule, basis);
  out.observed = out.i3.class_counts;
  out.expected.assign(scheme.classes(), 0.0);

  // per reference set: (members of the subset, class counts of the set, set size)
  struct Stratum {
    std::size_t in_subset = 0;
    std::vector<std::size_t> class_counts;
    std::size_t size = 0;
  };
  std::map<std::string, Stratum> strata;
  for (const auto& p : papers) {
    auto [it, fresh] = strata.try_emplace(p.refset_key);
    if (fresh) {
      detail::require_refset(p, corpus);
      if (basis == CountBasis::integer) {
        const auto& rs = corpus.refset(p.refset_key);
        it->second.class_counts = class_counts(rs, scheme, rule);
        it->second.size = rs.size();
      } else {
        const auto& rs = corpus.fractional_refset(p.refset_key);
        it->second.class_counts = class_counts(rs, scheme, rule);
        it->second.size = rs.size();
      }
    }
    ++it->second.in_subset;
  }
  std::size_t reference_size = 0;
  for (const auto& [key, st] : strata) {
    reference_size += st.size;
    for (std::size_t k = 0; k < scheme.classes(); ++k) {
      out.expected[k] += static_cast<double>(st.in_subset * st.class_counts[k]) / static_cast<double>(st.size);
    }
  }

  // a supplied expectation replaces the empirical one
  if (proportions) {
    out.expected = expected_counts(static_cast<double>(papers.size()), *proportions);
    out.expectation_supplied = true;
  }

  std::vector<double> obs, exp;
  std::vector<std::size_t> kept;
  for (std::size_t k = 0; k < scheme.classes(); ++k) {
    if (out.expected[k] > 0.0) {
      kept.push_back(k);
      obs.push_back(static_cast<double>(out.observed[k]));
      exp.push_back(out.expected[k]);
    }
  }
  if (kept.size() >= 2) {
    auto chi = chi_square_gof(obs, exp);
    for (auto& c : chi.per_class) c.index = kept[c.index];
    out.chi_square = std::move(chi);
  }

  const double n = static_cast<double>(papers.size());
  std::vector<double> pooled(scheme.classes());
  for (std::size_t k = 0; k < scheme.classes(); ++k) pooled[k] = out.expected[k] / n;
  out.z_tests = ztest_by_class(out.observed, pooled, reference_size);

  const auto whole = compute_i3(corpus.papers(), corpus, scheme, rule, basis);
  if (whole.i3_quantile > 0.0) out.share_pct = i3_share(papers, corpus.papers(), corpus, scheme, rule,
                                                         ShareForm::quantile, basis);
  return out;
}

}  // namespace i3
