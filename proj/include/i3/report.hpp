#pragma once

// CSV and JSON serialization of unit reports, ranking comparisons and
// subset assessments. CSV numbers carry 6 significant digits; JSON keeps
// full precision. Undefined values are "NA" in CSV and null in JSON.

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "i3/csv.hpp"
#include "i3/indicators.hpp"
#include "i3/percentile.hpp"
#include "i3/significance.hpp"

namespace i3::report {

using ordered_json = nlohmann::ordered_json;

inline std::string cell(double v) { return csv::format_g6(v); }
inline std::string cell(const std::optional<double>& v) { return v ? csv::format_g6(*v) : "NA"; }
inline ordered_json value(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

inline std::vector<std::string> unit_columns(std::size_t classes) {
  std::vector<std::string> cols{"unit", "n_papers", "i3_classed", "i3_quantile", "share_pct"};
  for (std::size_t k = 1; k <= classes; ++k) cols.push_back("class_" + std::to_string(k));
  for (const char* c : {"mocr", "mecr", "rcr", "mncs", "energy", "exergy", "entropy"}) cols.emplace_back(c);
  return cols;
}

inline void write_units_csv(std::ostream& out, std::span<const UnitReport> rows, const PercentileScheme& scheme) {
  csv::write_row(out, unit_columns(scheme.classes()));
  for (const auto& r : rows) {
    std::vector<std::string> f{r.unit, std::to_string(r.i3.n_papers), std::to_string(r.i3.i3_classed),
                               cell(r.i3.i3_quantile), cell(r.share_pct)};
    for (auto n : r.i3.class_counts) f.push_back(std::to_string(n));
    const auto& b = r.baseline;
    for (const auto& v : {std::optional<double>(b.mocr), std::optional<double>(b.mecr), b.rcr, b.mncs,
                          std::optional<double>(b.energy), std::optional<double>(b.exergy),
                          std::optional<double>(b.entropy)}) {
      f.push_back(cell(v));
    }
    csv::write_row(out, f);
  }
}

inline ordered_json unit_row_json(const UnitReport& r) {
  const auto& b = r.baseline;
  ordered_json row;
  row["unit"] = r.unit;
  row["n_papers"] = r.i3.n_papers;
  row["i3_classed"] = r.i3.i3_classed;
  row["i3_quantile"] = r.i3.i3_quantile;
  row["share_pct"] = value(r.share_pct);
  row["class_counts"] = r.i3.class_counts;
  row["mocr"] = b.mocr;
  row["mecr"] = b.mecr;
  row["rcr"] = value(b.rcr);
  row["mncs"] = value(b.mncs);
  row["energy"] = b.energy;
  row["exergy"] = b.exergy;
  row["entropy"] = b.entropy;
  return row;
}

struct RunInfo {
  std::string dimension;
  PercentileScheme scheme = schemes::nsb6();
  TieRule rule = TieRule::midpoint;
  CountBasis basis = CountBasis::integer;
};

inline ordered_json run_json(const RunInfo& info) {
  ordered_json j;
  j["dimension"] = info.dimension;
  j["scheme"] = ordered_json{{"name", info.scheme.name()},
                             {"boundaries", info.scheme.boundaries()},
                             {"weights", info.scheme.weights()}};
  j["tie_rule"] = std::string(to_string(info.rule));
  j["counts"] = info.basis == CountBasis::integer ? "integer" : "fractional";
  return j;
}

inline ordered_json units_json(std::span<const UnitReport> rows, const RunInfo& info, Indicator ranked_by) {
  ordered_json j = run_json(info);
  j["ranked_by"] = std::string(to_string(ranked_by));
  j["rows"] = ordered_json::array();
  for (const auto& r : rows) j["rows"].push_back(unit_row_json(r));
  return j;
}

inline void write_comparison_csv(std::ostream& out, const Ranking& a, const Ranking& b,
                                 const RankingComparison& cmp) {
  const std::string na(to_string(a.indicator)), nb(to_string(b.indicator));
  csv::write_row(out, {"unit", "rank_" + na + "_a", "rank_" + nb + "_b", "delta", "value_" + na + "_a",
                       "value_" + nb + "_b", "spearman"});
  for (const auto& d : cmp.deltas) {
    std::optional<double> va, vb;
    for (const auto& e : a.entries) {
      if (e.unit == d.unit) va = e.value;
    }
    for (const auto& e : b.entries) {
      if (e.unit == d.unit) vb = e.value;
    }
    csv::write_row(out, {d.unit, std::to_string(d.position_a), std::to_string(d.position_b),
                         std::to_string(d.delta), cell(va), cell(vb), cell(cmp.spearman)});
  }
}

inline ordered_json comparison_json(const Ranking& a, const Ranking& b, const RankingComparison& cmp,
                                    const RunInfo& info) {
  ordered_json j = run_json(info);
  j["indicator_a"] = std::string(to_string(a.indicator));
  j["indicator_b"] = std::string(to_string(b.indicator));
  j["spearman"] = cmp.spearman;
  j["units"] = ordered_json::array();
  for (const auto& d : cmp.deltas) {
    ordered_json u;
    u["unit"] = d.unit;
    u["rank_a"] = d.position_a;
    u["rank_b"] = d.position_b;
    u["delta"] = d.delta;
    for (const auto& e : a.entries) {
      if (e.unit == d.unit) u["value_a"] = value(e.value);
    }
    for (const auto& e : b.entries) {
      if (e.unit == d.unit) u["value_b"] = value(e.value);
    }
    j["units"].push_back(u);
  }
  j["swaps"] = ordered_json::array();
  for (const auto& [u, v] : cmp.swaps) j["swaps"].push_back({u, v});
  return j;
}

inline ordered_json test_json(const TestResult& t) { return t.to_json(); }

inline ordered_json assessment_json(const SubsetAssessment& a, const RunInfo& info, const std::string& unit) {
  ordered_json j = run_json(info);
  j["unit"] = unit;
  j["n_papers"] = a.n_papers;
  j["i3_classed"] = a.i3.i3_classed;
  j["i3_quantile"] = a.i3.i3_quantile;
  j["share_pct"] = value(a.share_pct);
  j["observed"] = a.observed;
  j["expected"] = a.expected;
  j["expectation"] = a.expectation_supplied ? "supplied" : "reference_sets";
  j["chi_square"] = a.chi_square ? test_json(*a.chi_square) : ordered_json(nullptr);
  j["z_tests"] = ordered_json::array();
  for (const auto& z : a.z_tests) j["z_tests"].push_back(z ? test_json(*z) : ordered_json(nullptr));
  return j;
}

/// Long format: one row per test (and per class for the z-tests), plus an
/// i3_share row whose statistic is the share in percent.
inline void write_assessment_csv(std::ostream& out, const SubsetAssessment& a) {
  csv::write_row(out, {"test", "class", "statistic", "df", "p_value", "observed", "expected"});
  csv::write_row(out, {"i3_share", "all", cell(a.share_pct), "NA", "NA", std::to_string(a.n_papers), "NA"});
  if (a.chi_square) {
    const auto& c = *a.chi_square;
    csv::write_row(out, {c.test_name, "all", cell(c.statistic), std::to_string(*c.df), cell(c.p_value),
                         std::to_string(a.n_papers), std::to_string(a.n_papers)});
  } else {
    csv::write_row(out, {"chi_square_gof", "all", "NA", "NA", "NA", std::to_string(a.n_papers), "NA"});
  }
  for (std::size_t k = 0; k < a.z_tests.size(); ++k) {
    const std::string cls = std::to_string(k + 1);
    if (const auto& z = a.z_tests[k]) {
      csv::write_row(out, {z->test_name, cls, cell(z->statistic), "NA", cell(z->p_value),
                           std::to_string(a.observed[k]), cell(a.expected[k])});
    } else {
      csv::write_row(out, {"z_class_proportion", cls, "NA", "NA", "NA", std::to_string(a.observed[k]),
                           cell(a.expected[k])});
    }
  }
}

}  // namespace i3::report
