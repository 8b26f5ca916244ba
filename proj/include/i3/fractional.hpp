#pragma once

// Citing-side fractional counting: each citation is worth 1/nr, where nr
// is the number of references in the citing document.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "i3/corpus.hpp"
#include "i3/csv.hpp"
#include "i3/error.hpp"

namespace i3 {

struct CitingEvent {
  std::string citing_id;
  std::string cited_id;
  std::int64_t nr = 1;  // references listed in the citing document

  friend bool operator==(const CitingEvent&, const CitingEvent&) = default;
};

enum class FractionalDenominator {
  /// nr as given: all references of the citing document
  total_references,
  /// only the citing document's references that land in the corpus
  in_corpus,
};

/// Copy of `corpus` with fractional_citations set on every paper. Integer
/// citation counts are left untouched.
inline Corpus fractional_counts(std::span<const CitingEvent> events, const Corpus& corpus,
                                FractionalDenominator denominator = FractionalDenominator::total_references) {
  std::vector<const CitingEvent*> sorted;
  sorted.reserve(events.size());
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> per_citing;  // citing -> (nr, in-corpus refs)
  for (const auto& e : events) {
    const std::string where = "event (" + e.citing_id + " -> " + e.cited_id + ")";
    if (e.nr < 1) throw InputError(where + ": nr must be at least 1");
    if (corpus.find(e.cited_id) == nullptr) throw InputError(where + ": cited paper is not in the corpus");
    sorted.push_back(&e);
  }
  std::sort(sorted.begin(), sorted.end(), [](const CitingEvent* a, const CitingEvent* b) {
    return std::tie(a->cited_id, a->citing_id) < std::tie(b->cited_id, b->citing_id);
  });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i - 1]->cited_id == sorted[i]->cited_id && sorted[i - 1]->citing_id == sorted[i]->citing_id) {
      throw InputError("duplicate event (" + sorted[i]->citing_id + " -> " + sorted[i]->cited_id + ")");
    }
  }
  for (const CitingEvent* e : sorted) {
    auto [it, fresh] = per_citing.try_emplace(e->citing_id, e->nr, 0);
    if (!fresh && it->second.first != e->nr) {
      throw InputError("inconsistent nr for citing document '" + e->citing_id + "'");
    }
    if (++it->second.second > e->nr) {
      throw InputError("citing document '" + e->citing_id + "' has more in-corpus references than nr");
    }
  }

  std::map<std::string, double> weight;
  for (const CitingEvent* e : sorted) {
    const auto& [nr, in_corpus] = per_citing.at(e->citing_id);
    const double denom =
        static_cast<double>(denominator == FractionalDenominator::total_references ? nr : in_corpus);
    weight[e->cited_id] += 1.0 / denom;
  }

  std::vector<PaperRecord> papers(corpus.papers().begin(), corpus.papers().end());
  for (auto& p : papers) {
    auto it = weight.find(p.paper_id);
    p.fractional_citations = it == weight.end() ? 0.0 : it->second;
  }
  return Corpus(std::move(papers));
}

/// Reference set over the fractional values of the papers under `key`.
inline const FractionalReferenceSet& fractional_refset(const Corpus& corpus, const std::string& key) {
  return corpus.fractional_refset(key);
}

inline std::vector<CitingEvent> read_events_csv(std::istream& in) {
  csv::Reader reader(in);
  csv::Row header;
  std::vector<CitingEvent> out;
  if (!reader.next(header)) return out;
  auto col = [&](const std::string& name) {
    auto it = std::find(header.fields.begin(), header.fields.end(), name);
    if (it == header.fields.end()) throw InputError("events header must contain citing_id, cited_id and nr");
    return static_cast<std::size_t>(it - header.fields.begin());
  };
  const std::size_t citing = col("citing_id"), cited = col("cited_id"), nr = col("nr");
  csv::Row row;
  while (reader.next(row)) {
    const std::string where = "row " + std::to_string(row.line);
    if (row.fields.size() != header.fields.size()) throw InputError(where + ": wrong number of fields");
    auto n = csv::parse_int(row.fields[nr]);
    if (!n || *n < 1) throw InputError(where + ": nr must be a positive integer");
    if (row.fields[citing].empty() || row.fields[cited].empty()) throw InputError(where + ": empty id");
    out.push_back({row.fields[citing], row.fields[cited], *n});
  }
  return out;
}

inline std::vector<CitingEvent> read_events_jsonl(std::istream& in) {
  std::vector<CitingEvent> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "row " + std::to_string(line_no);
    try {
      auto obj = nlohmann::json::parse(line);
      CitingEvent e{obj.at("citing_id").get<std::string>(), obj.at("cited_id").get<std::string>(),
                    obj.at("nr").get<std::int64_t>()};
      if (e.nr < 1) throw InputError(where + ": nr must be a positive integer");
      out.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw InputError(where + ": " + ex.what());
    }
  }
  return out;
}

inline std::vector<CitingEvent> read_events_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return format_for_path(path) == InputFormat::jsonl ? read_events_jsonl(in) : read_events_csv(in);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

}  // namespace i3
