#pragma once

// Paper-level citation data: records, reference sets and the immutable
// corpus that ties them together, plus CSV/JSONL ingestion.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "i3/csv.hpp"
#include "i3/error.hpp"

namespace i3 {

/// One publication.
struct PaperRecord {
  std::string paper_id;
  std::int64_t citations = 0;
  std::string refset_key;
  /// dimension name ("journal", "institute", ...) -> unit label
  std::map<std::string, std::string> units;
  /// Citing-side fractional count; absent until fractional counting runs.
  std::optional<double> fractional_citations;

  friend bool operator==(const PaperRecord&, const PaperRecord&) = default;

  std::optional<std::string_view> unit(std::string_view dimension) const {
    auto it = units.find(std::string(dimension));
    if (it == units.end()) return std::nullopt;
    return std::string_view(it->second);
  }
};

/// Sorted multiset of citation values a paper is ranked against. Integer
/// counts for the ordinary pipeline, reals for fractional counting.
template <typename T>
class BasicReferenceSet {
 public:
  using value_type = T;

  BasicReferenceSet(std::string key, std::vector<T> counts)
      : key_(std::move(key)), counts_(std::move(counts)) {
    if (counts_.empty()) {
      throw DomainError("reference set '" + key_ + "' is empty");
    }
    std::sort(counts_.begin(), counts_.end());
  }

  const std::string& key() const noexcept { return key_; }
  std::span<const T> counts() const noexcept { return counts_; }
  std::size_t size() const noexcept { return counts_.size(); }

  /// |{x : x < c}|
  std::size_t count_below(T c) const {
    return static_cast<std::size_t>(std::lower_bound(counts_.begin(), counts_.end(), c) -
                                    counts_.begin());
  }

  /// |{x : x = c}|
  std::size_t count_equal(T c) const {
    auto [lo, hi] = std::equal_range(counts_.begin(), counts_.end(), c);
    return static_cast<std::size_t>(hi - lo);
  }

  double mean() const {
    double sum = 0;
    for (T c : counts_) sum += static_cast<double>(c);
    return sum / static_cast<double>(counts_.size());
  }

  friend bool operator==(const BasicReferenceSet&, const BasicReferenceSet&) = default;

 private:
  std::string key_;
  std::vector<T> counts_;
};

using ReferenceSet = BasicReferenceSet<std::int64_t>;
using FractionalReferenceSet = BasicReferenceSet<double>;

/// Immutable, validated collection of papers with their reference sets.
/// Papers are held in canonical (paper_id) order, so row order of the
/// source never reaches any downstream result.
class Corpus {
 public:
  Corpus() = default;

  explicit Corpus(std::vector<PaperRecord> papers) : papers_(std::move(papers)) {
    std::sort(papers_.begin(), papers_.end(),
              [](const PaperRecord& a, const PaperRecord& b) { return a.paper_id < b.paper_id; });

    std::map<std::string, std::vector<std::int64_t>> buckets;
    std::map<std::string, std::vector<double>> fractional;
    for (std::size_t i = 0; i < papers_.size(); ++i) {
      const auto& p = papers_[i];
      if (i > 0 && papers_[i - 1].paper_id == p.paper_id) {
        throw InputError("duplicate paper_id '" + p.paper_id + "'");
      }
      if (p.paper_id.empty()) throw InputError("empty paper_id");
      if (p.refset_key.empty()) {
        throw InputError("paper '" + p.paper_id + "' has no refset_key");
      }
      if (p.citations < 0) {
        throw InputError("paper '" + p.paper_id + "' has negative citations");
      }
      if (p.fractional_citations && !(*p.fractional_citations >= 0)) {
        throw InputError("paper '" + p.paper_id + "' has negative fractional citations");
      }
      buckets[p.refset_key].push_back(p.citations);
      if (p.fractional_citations) {
        fractional[p.refset_key].push_back(*p.fractional_citations);
      } else {
        incomplete_fractional_.insert(p.refset_key);
      }
      for (const auto& [dim, label] : p.units) dimensions_.insert(dim);
    }
    for (auto& [key, counts] : buckets) {
      refsets_.emplace(key, ReferenceSet(key, std::move(counts)));
    }
    for (auto& [key, values] : fractional) {
      if (!incomplete_fractional_.contains(key)) {
        fractional_refsets_.emplace(key, FractionalReferenceSet(key, std::move(values)));
      }
    }
  }

  std::span<const PaperRecord> papers() const noexcept { return papers_; }
  std::size_t size() const noexcept { return papers_.size(); }
  bool empty() const noexcept { return papers_.empty(); }

  const std::map<std::string, ReferenceSet>& refsets() const noexcept { return refsets_; }

  const ReferenceSet& refset(const std::string& key) const {
    auto it = refsets_.find(key);
    if (it == refsets_.end()) throw InputError("unknown reference set '" + key + "'");
    return it->second;
  }

  bool has_refset(const std::string& key) const { return refsets_.contains(key); }

  /// Reference set over fractional values; every member must carry one.
  const FractionalReferenceSet& fractional_refset(const std::string& key) const {
    if (!refsets_.contains(key)) throw InputError("unknown reference set '" + key + "'");
    auto it = fractional_refsets_.find(key);
    if (it == fractional_refsets_.end()) {
      throw InputError("reference set '" + key + "' has papers without fractional citations");
    }
    return it->second;
  }

  /// True when every paper carries a fractional count.
  bool has_fractional() const noexcept { return incomplete_fractional_.empty(); }

  const PaperRecord* find(std::string_view paper_id) const {
    auto it = std::lower_bound(
        papers_.begin(), papers_.end(), paper_id,
        [](const PaperRecord& p, std::string_view id) { return p.paper_id < id; });
    if (it == papers_.end() || it->paper_id != paper_id) return nullptr;
    return &*it;
  }

  const std::set<std::string>& dimensions() const noexcept { return dimensions_; }

  /// Distinct labels used in a dimension, sorted.
  std::vector<std::string> labels(std::string_view dimension) const {
    std::set<std::string> out;
    for (const auto& p : papers_) {
      if (auto u = p.unit(dimension)) out.emplace(*u);
    }
    return {out.begin(), out.end()};
  }

  friend bool operator==(const Corpus& a, const Corpus& b) { return a.papers_ == b.papers_; }

 private:
  std::vector<PaperRecord> papers_;
  std::map<std::string, ReferenceSet> refsets_;
  std::map<std::string, FractionalReferenceSet> fractional_refsets_;
  std::set<std::string> incomplete_fractional_;
  std::set<std::string> dimensions_;
};

/// Result of selecting a unit. `dimension_known` separates "no paper has
/// this dimension at all" from "the label matched nothing".
struct Selection {
  std::vector<PaperRecord> papers;
  bool dimension_known = true;
};

inline Selection subset(const Corpus& corpus, std::string_view dimension, std::string_view label) {
  Selection out;
  out.dimension_known = corpus.dimensions().contains(std::string(dimension));
  for (const auto& p : corpus.papers()) {
    auto u = p.unit(dimension);
    if (u && *u == label) out.papers.push_back(p);
  }
  return out;
}

enum class InputFormat { csv, jsonl };

namespace detail {

inline std::string row_ref(std::size_t line) { return "row " + std::to_string(line); }

}  // namespace detail

inline Corpus ingest_csv(std::istream& in) {
  csv::Reader reader(in);
  csv::Row header;
  if (!reader.next(header)) return Corpus{};

  std::optional<std::size_t> id_col, cit_col, key_col;
  std::vector<std::pair<std::size_t, std::string>> unit_cols;
  for (std::size_t i = 0; i < header.fields.size(); ++i) {
    const std::string& name = header.fields[i];
    if (name == "paper_id") {
      id_col = i;
    } else if (name == "citations") {
      cit_col = i;
    } else if (name == "refset_key") {
      key_col = i;
    } else if (name.rfind("unit:", 0) == 0 && name.size() > 5) {
      unit_cols.emplace_back(i, name.substr(5));
    }
  }
  if (!id_col || !cit_col || !key_col) {
    throw InputError("corpus header must contain paper_id, citations and refset_key");
  }

  std::vector<PaperRecord> papers;
  std::map<std::string, std::size_t> seen;
  csv::Row row;
  while (reader.next(row)) {
    if (row.fields.size() != header.fields.size()) {
      throw InputError(detail::row_ref(row.line) + ": expected " +
                       std::to_string(header.fields.size()) + " fields, got " +
                       std::to_string(row.fields.size()));
    }
    PaperRecord p;
    p.paper_id = row.fields[*id_col];
    if (p.paper_id.empty()) throw InputError(detail::row_ref(row.line) + ": empty paper_id");
    auto c = csv::parse_int(row.fields[*cit_col]);
    if (!c || *c < 0) {
      throw InputError(detail::row_ref(row.line) + ": citations must be a non-negative integer, got '" +
                       row.fields[*cit_col] + "'");
    }
    p.citations = *c;
    p.refset_key = row.fields[*key_col];
    if (p.refset_key.empty()) {
      throw InputError(detail::row_ref(row.line) + ": missing refset_key");
    }
    for (const auto& [col, dim] : unit_cols) {
      if (!row.fields[col].empty()) p.units.emplace(dim, row.fields[col]);
    }
    if (auto [it, fresh] = seen.emplace(p.paper_id, row.line); !fresh) {
      throw InputError(detail::row_ref(row.line) + ": duplicate paper_id '" + p.paper_id +
                       "' (first seen at " + detail::row_ref(it->second) + ")");
    }
    papers.push_back(std::move(p));
  }
  return Corpus(std::move(papers));
}

inline Corpus ingest_jsonl(std::istream& in) {
  std::vector<PaperRecord> papers;
  std::map<std::string, std::size_t> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string where = detail::row_ref(line_no);

    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError(where + ": invalid JSON: " + e.what());
    }
    if (!obj.is_object()) throw InputError(where + ": expected a JSON object");

    PaperRecord p;
    auto id = obj.find("paper_id");
    if (id == obj.end() || !id->is_string() || id->get<std::string>().empty()) {
      throw InputError(where + ": missing paper_id");
    }
    p.paper_id = id->get<std::string>();
    auto cit = obj.find("citations");
    const bool valid_count = cit != obj.end() && cit->is_number_integer() &&
                             (cit->is_number_unsigned() || cit->get<std::int64_t>() >= 0);
    if (!valid_count) {
      throw InputError(where + ": citations must be a non-negative integer");
    }
    p.citations = cit->get<std::int64_t>();
    auto key = obj.find("refset_key");
    if (key == obj.end() || !key->is_string() || key->get<std::string>().empty()) {
      throw InputError(where + ": missing refset_key");
    }
    p.refset_key = key->get<std::string>();
    if (auto units = obj.find("units"); units != obj.end() && !units->is_null()) {
      if (!units->is_object()) throw InputError(where + ": units must be an object");
      for (const auto& [dim, label] : units->items()) {
        if (!label.is_string()) throw InputError(where + ": unit label for '" + dim + "' must be a string");
        if (!label.get<std::string>().empty()) p.units.emplace(dim, label.get<std::string>());
      }
    }
    if (auto [it, fresh] = seen.emplace(p.paper_id, line_no); !fresh) {
      throw InputError(where + ": duplicate paper_id '" + p.paper_id + "' (first seen at " +
                       detail::row_ref(it->second) + ")");
    }
    papers.push_back(std::move(p));
  }
  return Corpus(std::move(papers));
}

inline Corpus ingest(std::istream& in, InputFormat format) {
  return format == InputFormat::csv ? ingest_csv(in) : ingest_jsonl(in);
}

/// Format from the file extension: .jsonl / .ndjson / .json are JSONL,
/// anything else is CSV.
inline InputFormat format_for_path(std::string_view path) {
  auto ends_with = [&](std::string_view suffix) {
    return path.size() >= suffix.size() && path.substr(path.size() - suffix.size()) == suffix;
  };
  if (ends_with(".jsonl") || ends_with(".ndjson") || ends_with(".json")) return InputFormat::jsonl;
  return InputFormat::csv;
}

inline Corpus ingest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return ingest(in, format_for_path(path));
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

/// Writes a corpus in the CSV input schema (unit columns sorted by name).
inline void write_corpus_csv(std::ostream& out, const Corpus& corpus) {
  std::vector<std::string> header{"paper_id", "citations", "refset_key"};
  for (const auto& dim : corpus.dimensions()) header.push_back("unit:" + dim);
  csv::write_row(out, header);
  for (const auto& p : corpus.papers()) {
    std::vector<std::string> row{p.paper_id, std::to_string(p.citations), p.refset_key};
    for (const auto& dim : corpus.dimensions()) {
      auto u = p.unit(dim);
      row.emplace_back(u ? std::string(*u) : std::string());
    }
    csv::write_row(out, row);
  }
}

}  // namespace i3
