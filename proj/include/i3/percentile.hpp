#pragma once

// Percentile ranks of citation counts within a reference set, and the
// percentile-rank class schemes (quartiles, NSB six classes, top 10%).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "i3/corpus.hpp"
#include "i3/error.hpp"

namespace i3 {

/// How papers tied with the query count are treated.
///   strictly_below:  100 * |{x < c}| / N
///   below_or_equal:  100 * |{x <= c}| / N
///   midpoint:        100 * (|{x < c}| + |{x = c}| / 2) / N
enum class TieRule { strictly_below, below_or_equal, midpoint };

inline std::string_view to_string(TieRule rule) {
  switch (rule) {
    case TieRule::strictly_below: return "strictly_below";
    case TieRule::below_or_equal: return "below_or_equal";
    case TieRule::midpoint: return "midpoint";
  }
  return "midpoint";
}

inline TieRule parse_tie_rule(std::string_view name) {
  if (name == "strictly_below") return TieRule::strictly_below;
  if (name == "below_or_equal") return TieRule::below_or_equal;
  if (name == "midpoint") return TieRule::midpoint;
  throw InputError("unknown tie rule '" + std::string(name) + "'");
}

/// A percentile held as the exact ratio 50 * half_units / n. Sums of these
/// within one reference set stay integral, which keeps I3 sums exact.
struct PercentileRank {
  std::int64_t half_units = 0;
  std::int64_t n = 1;

  double value() const { return 50.0 * static_cast<double>(half_units) / static_cast<double>(n); }

  /// value() >= threshold, decided without rounding the percentile first.
  bool at_least(double threshold) const {
    return 50.0L * static_cast<long double>(half_units) >=
           static_cast<long double>(threshold) * static_cast<long double>(n);
  }
};

template <typename T>
PercentileRank rank_of(T c, const BasicReferenceSet<T>& refset, TieRule rule) {
  const auto below = static_cast<std::int64_t>(refset.count_below(c));
  const auto n = static_cast<std::int64_t>(refset.size());
  switch (rule) {
    case TieRule::strictly_below: return {2 * below, n};
    case TieRule::below_or_equal:
      return {2 * (below + static_cast<std::int64_t>(refset.count_equal(c))), n};
    case TieRule::midpoint:
      return {2 * below + static_cast<std::int64_t>(refset.count_equal(c)), n};
  }
  return {0, n};
}

/// Percentile of `c` in [0, 100]. Not rounded.
template <typename T>
double percentile_of(T c, const BasicReferenceSet<T>& refset, TieRule rule = TieRule::midpoint) {
  return rank_of(c, refset, rule).value();
}

struct ClassAssignment {
  std::size_t index = 0;  // 0-based
  int weight = 0;
};

/// Ordered class boundaries in (0, 100) with one positive weight per class.
/// Class k covers [b_{k-1}, b_k); the top class is closed at 100.
class PercentileScheme {
 public:
  PercentileScheme(std::string name, std::vector<double> boundaries, std::vector<int> weights)
      : name_(std::move(name)), boundaries_(std::move(boundaries)), weights_(std::move(weights)) {
    if (weights_.size() != boundaries_.size() + 1) {
      throw InputError("scheme '" + name_ + "': need exactly one weight per class (" +
                       std::to_string(boundaries_.size() + 1) + ")");
    }
    for (std::size_t i = 0; i < boundaries_.size(); ++i) {
      const double b = boundaries_[i];
      if (!(b > 0.0 && b < 100.0)) {
        throw InputError("scheme '" + name_ + "': boundaries must lie in (0, 100)");
      }
      if (i > 0 && !(boundaries_[i - 1] < b)) {
        throw InputError("scheme '" + name_ + "': boundaries must be strictly increasing");
      }
    }
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      if (weights_[i] <= 0) throw InputError("scheme '" + name_ + "': weights must be positive");
      if (i > 0 && weights_[i - 1] >= weights_[i]) {
        throw InputError("scheme '" + name_ + "': weights must be strictly increasing");
      }
    }
  }

  const std::string& name() const noexcept { return name_; }
  const std::vector<double>& boundaries() const noexcept { return boundaries_; }
  const std::vector<int>& weights() const noexcept { return weights_; }
  std::size_t classes() const noexcept { return weights_.size(); }

  ClassAssignment class_of(double p) const {
    if (!(p >= 0.0 && p <= 100.0)) {
      throw DomainError("percentile " + std::to_string(p) + " outside [0, 100]");
    }
    auto idx = static_cast<std::size_t>(
        std::upper_bound(boundaries_.begin(), boundaries_.end(), p) - boundaries_.begin());
    return {idx, weights_[idx]};
  }

  ClassAssignment class_of(const PercentileRank& rank) const {
    std::size_t idx = 0;
    while (idx < boundaries_.size() && rank.at_least(boundaries_[idx])) ++idx;
    return {idx, weights_[idx]};
  }

  /// Class widths / 100: the proportions a continuous, tie-free reference
  /// distribution would put in each class.
  std::vector<double> nominal_proportions() const {
    std::vector<double> out;
    double lo = 0.0;
    for (double b : boundaries_) {
      out.push_back((b - lo) / 100.0);
      lo = b;
    }
    out.push_back((100.0 - lo) / 100.0);
    return out;
  }

  nlohmann::json to_json() const {
    return {{"name", name_}, {"boundaries", boundaries_}, {"weights", weights_}};
  }

  friend bool operator==(const PercentileScheme&, const PercentileScheme&) = default;

 private:
  std::string name_;
  std::vector<double> boundaries_;
  std::vector<int> weights_;
};

namespace schemes {

inline PercentileScheme quartiles() { return {"quartiles", {25, 50, 75}, {1, 2, 3, 4}}; }

/// Six classes of the Science & Engineering Indicators: bottom 50%,
/// 50-75, 75-90, 90-95, 95-99, top 1%.
inline PercentileScheme nsb6() { return {"nsb6", {50, 75, 90, 95, 99}, {1, 2, 3, 4, 5, 6}}; }

inline PercentileScheme top10() { return {"top10", {90}, {1, 2}}; }

inline std::vector<std::string> builtin_names() { return {"nsb6", "quartiles", "top10"}; }

}  // namespace schemes

inline PercentileScheme scheme_from_json(const nlohmann::json& doc) {
  try {
    return PercentileScheme(doc.at("name").get<std::string>(),
                            doc.at("boundaries").get<std::vector<double>>(),
                            doc.at("weights").get<std::vector<int>>());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid scheme document: ") + e.what());
  }
}

/// A built-in name ("quartiles", "nsb6", "top10") or a path to a scheme
/// JSON document.
inline PercentileScheme load_scheme(const std::string& name_or_path) {
  if (name_or_path == "quartiles") return schemes::quartiles();
  if (name_or_path == "nsb6") return schemes::nsb6();
  if (name_or_path == "top10") return schemes::top10();
  std::ifstream in(name_or_path);
  if (!in) throw InputError("unknown scheme '" + name_or_path + "' (not a built-in, not a readable file)");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(name_or_path + ": " + e.what());
  }
  return scheme_from_json(doc);
}

/// Class counts of the reference set's own members.
template <typename T>
std::vector<std::size_t> class_counts(const BasicReferenceSet<T>& refset, const PercentileScheme& scheme,
                                      TieRule rule) {
  std::vector<std::size_t> counts(scheme.classes(), 0);
  auto values = refset.counts();
  for (std::size_t i = 0; i < values.size();) {
    std::size_t j = i;
    while (j < values.size() && values[j] == values[i]) ++j;
    counts[scheme.class_of(rank_of(values[i], refset, rule)).index] += j - i;
    i = j;
  }
  return counts;
}

/// Share of reference-set members falling in each class; sums to 1.
template <typename T>
std::vector<double> expected_class_proportions(const BasicReferenceSet<T>& refset,
                                               const PercentileScheme& scheme, TieRule rule) {
  auto counts = class_counts(refset, scheme, rule);
  std::vector<double> out(counts.size());
  const auto n = static_cast<double>(refset.size());
  for (std::size_t k = 0; k < counts.size(); ++k) out[k] = static_cast<double>(counts[k]) / n;
  return out;
}

}  // namespace i3
