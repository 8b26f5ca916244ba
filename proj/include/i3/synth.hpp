#pragma once

// Deterministic synthetic corpora: skewed citation distributions for
// desk-scale experiments, and frozen fixtures used by the tests and the
// shipped sample data.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "i3/corpus.hpp"
#include "i3/error.hpp"

namespace i3::synth {

/// xorshift64* seeded through splitmix64. The stream is fully specified
/// here so that other implementations can reproduce it.
class Xorshift64Star {
 public:
  explicit Xorshift64Star(std::uint64_t seed) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    state_ = z != 0 ? z : 0x2545F4914F6CDD1DULL;
  }

  std::uint64_t next() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1DULL;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer on [0, bound), bound > 0.
  std::uint64_t below(std::uint64_t bound) {
    // rejection keeps the draw unbiased
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return x % bound;
  }

  /// Standard normal by Box-Muller (cosine branch only).
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
};

struct LogNormal {
  double mu = 1.0;
  double sigma = 1.0;
};

/// P(c) proportional to (c + 1)^-alpha on 0..c_max.
struct DiscretePowerLaw {
  double alpha = 2.0;
  std::int64_t c_max = 1000;
};

struct Constant {
  std::int64_t c = 0;
};

using Distribution = std::variant<LogNormal, DiscretePowerLaw, Constant>;

struct GenSpec {
  Distribution distribution = LogNormal{};
  std::int64_t n_papers = 100;
  std::uint64_t seed = 0;
  /// (label, paper count); labels are assigned to the first papers in order
  std::vector<std::pair<std::string, std::size_t>> unit_layout;
  std::string dimension = "unit";
  std::string refset_key = "F";
};

namespace detail {

inline std::string paper_id(std::int64_t i, std::int64_t n) {
  std::string digits = std::to_string(i + 1);
  const std::size_t width = std::max<std::size_t>(6, std::to_string(n).size());
  return "P" + std::string(width - digits.size(), '0') + digits;
}

class Sampler {
 public:
  explicit Sampler(const Distribution& d) : dist_(d) {
    if (const auto* pl = std::get_if<DiscretePowerLaw>(&dist_)) {
      if (!(pl->alpha > 0.0) || pl->c_max < 0) throw InputError("power law needs alpha > 0 and c_max >= 0");
      double acc = 0;
      for (std::int64_t c = 0; c <= pl->c_max; ++c) {
        acc += std::pow(static_cast<double>(c + 1), -pl->alpha);
        cdf_.push_back(acc);
      }
      for (double& v : cdf_) v /= acc;
    } else if (const auto* ln = std::get_if<LogNormal>(&dist_)) {
      if (!(ln->sigma >= 0.0)) throw InputError("lognormal needs sigma >= 0");
    } else if (std::get<Constant>(dist_).c < 0) {
      throw InputError("constant count must be non-negative");
    }
  }

  std::int64_t draw(Xorshift64Star& rng) const {
    if (const auto* ln = std::get_if<LogNormal>(&dist_)) {
      const double v = std::floor(std::exp(ln->mu + ln->sigma * rng.normal()));
      return static_cast<std::int64_t>(std::min(v, 1e12));
    }
    if (std::holds_alternative<DiscretePowerLaw>(dist_)) {
      const double u = rng.uniform();
      auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
      if (it == cdf_.end()) --it;
      return static_cast<std::int64_t>(it - cdf_.begin());
    }
    return std::get<Constant>(dist_).c;
  }

 private:
  Distribution dist_;
  std::vector<double> cdf_;
};

}  // namespace detail

/// Pure function of `spec`.
inline Corpus generate(const GenSpec& spec) {
  if (spec.n_papers <= 0) throw InputError("n_papers must be positive");
  std::size_t labelled = 0;
  for (const auto& [label, count] : spec.unit_layout) labelled += count;
  if (labelled > static_cast<std::size_t>(spec.n_papers)) {
    throw InputError("unit layout assigns more papers than n_papers");
  }
  const detail::Sampler sampler(spec.distribution);
  Xorshift64Star rng(spec.seed);

  std::vector<PaperRecord> papers;
  papers.reserve(static_cast<std::size_t>(spec.n_papers));
  auto unit = spec.unit_layout.begin();
  std::size_t used_in_unit = 0;
  for (std::int64_t i = 0; i < spec.n_papers; ++i) {
    PaperRecord p;
    p.paper_id = detail::paper_id(i, spec.n_papers);
    p.citations = sampler.draw(rng);
    p.refset_key = spec.refset_key;
    while (unit != spec.unit_layout.end() && used_in_unit == unit->second) {
      ++unit;
      used_in_unit = 0;
    }
    if (unit != spec.unit_layout.end()) {
      p.units.emplace(spec.dimension, unit->first);
      ++used_in_unit;
    }
    papers.push_back(std::move(p));
  }
  return Corpus(std::move(papers));
}

/// Seven units (dimension "pi", labels U1..U7, named by their MNCS rank)
/// plus 40 unlabelled background papers, all in reference set "F". The
/// unit ranked first by MNCS is fifth by I3 (quantile form, midpoint
/// ties); the unit ranked sixth by MNCS is first by I3. Synthetic data,
/// found by randomized search and frozen.
inline Corpus reversal_fixture() {
  static const std::vector<std::pair<std::string, std::vector<std::int64_t>>> kUnits = {
      {"U1", {28, 17, 1}},
      {"U2", {36, 7, 5, 2, 1}},
      {"U3", {22, 7, 6, 2, 1}},
      {"U4", {13, 5, 0}},
      {"U5", {11, 5, 3, 2, 1, 1}},
      {"U6", {5, 4, 4, 3, 3, 2, 1}},
      {"U7", {8, 2, 1, 1}},
  };
  static const std::vector<std::int64_t> kBackground = {
      48, 15, 12, 11, 9, 8, 7, 7, 7, 7, 6, 6, 4, 4, 4, 4, 4, 4, 4, 3,
      3,  3,  3,  3,  3, 2, 2, 2, 2, 2, 2, 2, 2, 1, 1, 1, 1, 0, 0, 0};
  std::vector<PaperRecord> papers;
  for (const auto& [label, counts] : kUnits) {
    for (std::size_t i = 0; i < counts.size(); ++i) {
      PaperRecord p;
      p.paper_id = label + "-" + std::to_string(i + 1);
      p.citations = counts[i];
      p.refset_key = "F";
      p.units.emplace("pi", label);
      papers.push_back(std::move(p));
    }
  }
  for (std::size_t i = 0; i < kBackground.size(); ++i) {
    PaperRecord p;
    std::string n = std::to_string(i + 1);
    p.paper_id = "B-" + std::string(2 - std::min<std::size_t>(2, n.size()), '0') + n;
    p.citations = kBackground[i];
    p.refset_key = "F";
    papers.push_back(std::move(p));
  }
  return Corpus(std::move(papers));
}

/// Reference set of 2000 tie-free papers (reference set "F") with two
/// selections for significance testing: dimension "sample" marks 100
/// papers drawn uniformly at random ("random"); dimension "decile" marks
/// the top 10% by citations ("top").
inline Corpus significance_fixture(std::uint64_t seed = 7) {
  constexpr std::size_t kPapers = 2000;
  constexpr std::size_t kSample = 100;
  Xorshift64Star rng(seed);
  // distinct counts in a skewed layout: rank i gets floor(i^2 / 40) + i
  std::vector<std::int64_t> counts(kPapers);
  for (std::size_t i = 0; i < kPapers; ++i) {
    counts[i] = static_cast<std::int64_t>(i * i / 40 + i);
  }
  // shuffle counts across ids (Fisher-Yates)
  for (std::size_t i = kPapers - 1; i > 0; --i) {
    std::swap(counts[i], counts[rng.below(i + 1)]);
  }
  std::vector<std::size_t> order(kPapers);
  for (std::size_t i = 0; i < kPapers; ++i) order[i] = i;
  for (std::size_t i = kPapers - 1; i > 0; --i) {
    std::swap(order[i], order[rng.below(i + 1)]);
  }
  std::vector<bool> sampled(kPapers, false);
  for (std::size_t i = 0; i < kSample; ++i) sampled[order[i]] = true;

  std::vector<std::int64_t> sorted = counts;
  std::sort(sorted.begin(), sorted.end());
  const std::int64_t top_threshold = sorted[kPapers - kPapers / 10];

  std::vector<PaperRecord> papers;
  for (std::size_t i = 0; i < kPapers; ++i) {
    PaperRecord p;
    p.paper_id = detail::paper_id(static_cast<std::int64_t>(i), kPapers);
    p.citations = counts[i];
    p.refset_key = "F";
    if (sampled[i]) p.units.emplace("sample", "random");
    if (counts[i] >= top_threshold) p.units.emplace("decile", "top");
    papers.push_back(std::move(p));
  }
  return Corpus(std::move(papers));
}

}  // namespace i3::synth
