#pragma once

// i3tool: batch command-line front end. Exit status 0 on success, 1 on an
// internal failure, 2 on input or usage errors.

#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "i3/i3.hpp"

namespace i3::cli {

inline constexpr int kOk = 0;
inline constexpr int kInternal = 1;
inline constexpr int kUsage = 2;

/// Usage-level failure carrying its exit status.
struct Failure {
  int status;
  std::string message;
};

struct Options {
  std::string input;
  std::string events;
  std::string scheme = "nsb6";
  std::string tie_rule = "midpoint";
  std::string dimension;
  std::vector<std::string> indicators;
  std::string unit;
  std::string expected;
  bool fractional = false;
  bool in_corpus_denominator = false;
  std::string format = "csv";
  std::string out;

  // synth
  std::string fixture;
  std::string distribution = "lognormal";
  std::int64_t n_papers = 1000;
  std::uint64_t seed = 1;
  double mu = 1.0;
  double sigma = 1.2;
  double alpha = 2.0;
  std::int64_t c_max = 1000;
  std::int64_t constant = 0;
  std::string units;
  std::string refset_key = "F";
};

namespace detail {

inline void emit(const Options& opt, const std::string& text, std::ostream& out) {
  if (opt.out.empty() || opt.out == "-") {
    out << text;
    return;
  }
  std::ofstream f(opt.out, std::ios::binary);
  if (!f) throw Failure{kUsage, "cannot write '" + opt.out + "'"};
  f << text;
  if (!f) throw Failure{kUsage, "failed writing '" + opt.out + "'"};
}

inline std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

inline Corpus load_corpus(const Options& opt) {
  if (opt.input.empty()) throw Failure{kUsage, "--input is required"};
  Corpus corpus = ingest_file(opt.input);
  if (corpus.empty()) throw Failure{kUsage, opt.input + ": no papers"};
  if (!opt.events.empty()) {
    auto events = read_events_file(opt.events);
    corpus = fractional_counts(events, corpus,
                               opt.in_corpus_denominator ? FractionalDenominator::in_corpus
                                                         : FractionalDenominator::total_references);
  } else if (opt.fractional) {
    throw Failure{kUsage, "--fractional needs --events"};
  }
  return corpus;
}

inline report::RunInfo run_info(const Options& opt) {
  report::RunInfo info;
  info.dimension = opt.dimension;
  info.scheme = load_scheme(opt.scheme);
  info.rule = parse_tie_rule(opt.tie_rule);
  info.basis = opt.fractional ? CountBasis::fractional : CountBasis::integer;
  return info;
}

inline void require_format(const Options& opt) {
  if (opt.format != "csv" && opt.format != "json") {
    throw Failure{kUsage, "--format must be csv or json"};
  }
}

inline void require_dimension(const Options& opt, const Corpus& corpus) {
  if (opt.dimension.empty()) throw Failure{kUsage, "--dimension is required"};
  if (corpus.labels(opt.dimension).empty()) {
    throw Failure{kUsage, "dimension '" + opt.dimension + "' labels no papers"};
  }
}

inline std::string cmd_ingest(const Options& opt) {
  require_format(opt);
  const Corpus corpus = load_corpus(opt);
  if (opt.format == "json") {
    nlohmann::ordered_json j;
    j["papers"] = corpus.size();
    j["dimensions"] = nlohmann::ordered_json::array();
    for (const auto& d : corpus.dimensions()) j["dimensions"].push_back(d);
    j["refsets"] = nlohmann::ordered_json::array();
    for (const auto& [key, rs] : corpus.refsets()) {
      nlohmann::ordered_json r;
      r["refset_key"] = key;
      r["n_papers"] = rs.size();
      r["mean_citations"] = rs.mean();
      r["max_citations"] = rs.counts().back();
      j["refsets"].push_back(r);
    }
    return dump(j);
  }
  std::ostringstream s;
  csv::write_row(s, {"refset_key", "n_papers", "mean_citations", "max_citations"});
  for (const auto& [key, rs] : corpus.refsets()) {
    csv::write_row(s, {key, std::to_string(rs.size()), csv::format_g6(rs.mean()), std::to_string(rs.counts().back())});
  }
  return s.str();
}

inline std::string cmd_compute(const Options& opt) {
  require_format(opt);
  if (opt.indicators.size() > 1) throw Failure{kUsage, "compute takes a single --indicator"};
  const Indicator indicator = parse_indicator(opt.indicators.empty() ? "i3_quantile" : opt.indicators.front());
  const Corpus corpus = load_corpus(opt);
  const auto info = run_info(opt);
  require_dimension(opt, corpus);

  auto reports = unit_reports(corpus, opt.dimension, info.scheme, info.rule, info.basis);
  const auto ranking = rank_reports(reports, indicator);
  std::vector<UnitReport> ordered;
  for (const auto& e : ranking.entries) {
    for (auto& r : reports) {
      if (r.unit == e.unit) ordered.push_back(std::move(r));
    }
  }
  if (opt.format == "json") return dump(report::units_json(ordered, info, indicator));
  std::ostringstream s;
  report::write_units_csv(s, ordered, info.scheme);
  return s.str();
}

inline std::string cmd_test(const Options& opt) {
  require_format(opt);
  const Corpus corpus = load_corpus(opt);
  const auto info = run_info(opt);
  if (opt.dimension.empty() || opt.unit.empty()) throw Failure{kUsage, "test needs --dimension and --unit"};
  const auto sel = subset(corpus, opt.dimension, opt.unit);
  if (!sel.dimension_known) throw Failure{kUsage, "unknown dimension '" + opt.dimension + "'"};
  if (sel.papers.empty()) {
    throw Failure{kUsage, "empty subset: no paper has " + opt.dimension + " = '" + opt.unit + "'"};
  }
  std::optional<std::vector<double>> proportions;
  if (!opt.expected.empty()) {
    proportions.emplace();
    std::stringstream ss(opt.expected);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto v = csv::parse_real(item);
      if (!v) throw Failure{kUsage, "--expected expects comma-separated proportions, got '" + item + "'"};
      proportions->push_back(*v);
    }
  }
  const auto assessment = assess_subset(sel.papers, corpus, info.scheme, info.rule, info.basis, proportions);
  if (opt.format == "json") return dump(report::assessment_json(assessment, info, opt.unit));
  std::ostringstream s;
  report::write_assessment_csv(s, assessment);
  return s.str();
}

inline std::string cmd_compare(const Options& opt) {
  require_format(opt);
  if (opt.indicators.size() != 2) throw Failure{kUsage, "compare needs exactly two --indicator options"};
  const Indicator ind_a = parse_indicator(opt.indicators[0]);
  const Indicator ind_b = parse_indicator(opt.indicators[1]);
  const Corpus corpus = load_corpus(opt);
  const auto info = run_info(opt);
  require_dimension(opt, corpus);

  const auto reports = unit_reports(corpus, opt.dimension, info.scheme, info.rule, info.basis);
  if (reports.size() < 2) throw Failure{kUsage, "dimension '" + opt.dimension + "' labels fewer than two units"};
  for (const auto& r : reports) {
    for (auto ind : {ind_a, ind_b}) {
      if (!r.value(ind)) {
        throw Failure{kUsage, std::string(to_string(ind)) + " is undefined for unit '" + r.unit + "'"};
      }
    }
  }
  const auto a = rank_reports(reports, ind_a);
  const auto b = rank_reports(reports, ind_b);
  const auto cmp = compare_rankings(a, b);
  if (opt.format == "json") return dump(report::comparison_json(a, b, cmp, info));
  std::ostringstream s;
  report::write_comparison_csv(s, a, b, cmp);
  return s.str();
}

inline std::vector<std::pair<std::string, std::size_t>> parse_layout(const std::string& text) {
  std::vector<std::pair<std::string, std::size_t>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto colon = item.rfind(':');
    auto count = colon == std::string::npos ? std::nullopt : csv::parse_int(item.substr(colon + 1));
    if (!count || *count < 0 || colon == 0) {
      throw Failure{kUsage, "--units expects label:count[,label:count...], got '" + item + "'"};
    }
    out.emplace_back(item.substr(0, colon), static_cast<std::size_t>(*count));
  }
  return out;
}

inline std::string cmd_synth(const Options& opt) {
  Corpus corpus;
  if (opt.fixture == "reversal") {
    corpus = synth::reversal_fixture();
  } else if (opt.fixture == "significance") {
    corpus = synth::significance_fixture(opt.seed);
  } else if (!opt.fixture.empty()) {
    throw Failure{kUsage, "unknown fixture '" + opt.fixture + "' (reversal, significance)"};
  } else {
    synth::GenSpec spec;
    if (opt.distribution == "lognormal") {
      spec.distribution = synth::LogNormal{opt.mu, opt.sigma};
    } else if (opt.distribution == "power_law") {
      spec.distribution = synth::DiscretePowerLaw{opt.alpha, opt.c_max};
    } else if (opt.distribution == "constant") {
      spec.distribution = synth::Constant{opt.constant};
    } else {
      throw Failure{kUsage, "unknown distribution '" + opt.distribution + "' (lognormal, power_law, constant)"};
    }
    spec.n_papers = opt.n_papers;
    spec.seed = opt.seed;
    spec.unit_layout = parse_layout(opt.units);
    spec.refset_key = opt.refset_key;
    corpus = synth::generate(spec);
  }
  std::ostringstream s;
  write_corpus_csv(s, corpus);
  return s.str();
}

inline void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("--input", opt.input, "Corpus file (.csv, or .jsonl)")->required();
  cmd->add_option("--events", opt.events, "Citing events file (.csv or .jsonl) for fractional counts");
  cmd->add_flag("--fractional", opt.fractional, "Rank papers by fractional counts (needs --events)");
  cmd->add_flag("--in-corpus-denominator", opt.in_corpus_denominator,
                "Divide by in-corpus references instead of nr");
  cmd->add_option("--scheme", opt.scheme, "quartiles, nsb6, top10 or a scheme JSON file")->capture_default_str();
  cmd->add_option("--tie-rule", opt.tie_rule, "strictly_below, below_or_equal or midpoint")->capture_default_str();
  cmd->add_option("--format", opt.format, "csv or json")->capture_default_str();
  cmd->add_option("--out", opt.out, "Output file (default: standard output)");
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Percentile-based citation impact indicators (I3) and their mean-based rivals", "i3tool"};
  app.require_subcommand(1);

  auto* ingest_cmd = app.add_subcommand("ingest", "Validate a corpus and summarize its reference sets");
  detail::add_common(ingest_cmd, opt);

  auto* compute_cmd = app.add_subcommand("compute", "Indicator report, one row per unit");
  detail::add_common(compute_cmd, opt);
  compute_cmd->add_option("--dimension", opt.dimension, "Unit dimension (e.g. journal)")->required();
  compute_cmd->add_option("--indicator", opt.indicators, "Ranking indicator: i3_classed, i3_quantile, rcr, mncs, exergy");

  auto* test_cmd = app.add_subcommand("test", "Test one unit against its reference sets");
  detail::add_common(test_cmd, opt);
  test_cmd->add_option("--dimension", opt.dimension, "Unit dimension")->required();
  test_cmd->add_option("--unit", opt.unit, "Unit label selecting the subset")->required();
  test_cmd->add_option("--expected", opt.expected,
                       "Expected class proportions p1,p2,... replacing the reference-set expectation");

  auto* compare_cmd = app.add_subcommand("compare", "Compare the unit rankings of two indicators");
  detail::add_common(compare_cmd, opt);
  compare_cmd->add_option("--dimension", opt.dimension, "Unit dimension")->required();
  compare_cmd->add_option("--indicator", opt.indicators, "Two indicators, e.g. --indicator mncs --indicator i3_quantile")
      ->required();

  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic corpus in the corpus CSV schema");
  synth_cmd->add_option("--fixture", opt.fixture, "Frozen fixture: reversal or significance");
  synth_cmd->add_option("--distribution", opt.distribution, "lognormal, power_law or constant")->capture_default_str();
  synth_cmd->add_option("--n", opt.n_papers, "Number of papers")->capture_default_str();
  synth_cmd->add_option("--seed", opt.seed, "PRNG seed")->capture_default_str();
  synth_cmd->add_option("--mu", opt.mu, "lognormal mu")->capture_default_str();
  synth_cmd->add_option("--sigma", opt.sigma, "lognormal sigma")->capture_default_str();
  synth_cmd->add_option("--alpha", opt.alpha, "power-law exponent")->capture_default_str();
  synth_cmd->add_option("--c-max", opt.c_max, "power-law maximum count")->capture_default_str();
  synth_cmd->add_option("--constant", opt.constant, "constant count")->capture_default_str();
  synth_cmd->add_option("--units", opt.units, "Unit layout label:count[,label:count...]");
  synth_cmd->add_option("--refset-key", opt.refset_key, "Reference set key")->capture_default_str();
  synth_cmd->add_option("--out", opt.out, "Output file (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    std::string text;
    if (*ingest_cmd) {
      text = detail::cmd_ingest(opt);
    } else if (*compute_cmd) {
      text = detail::cmd_compute(opt);
    } else if (*test_cmd) {
      text = detail::cmd_test(opt);
    } else if (*compare_cmd) {
      text = detail::cmd_compare(opt);
    } else if (*synth_cmd) {
      text = detail::cmd_synth(opt);
    }
    detail::emit(opt, text, out);
    return kOk;
  } catch (const Failure& f) {
    err << "error: " << f.message << "\n";
    return f.status;
  } catch (const i3::Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"i3tool"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace i3::cli
