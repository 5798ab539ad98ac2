#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gaar/dataset/record.hpp"
#include "gaar/error.hpp"
#include "json.hpp"

namespace gaar::dataset {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

struct SourceStats {
  std::size_t count = 0;
  MeanStd words;
  MeanStd premises;
  MeanStd implicit_pct;
};

enum class Deviation { kPopulation, kSample };

struct CorpusStats {
  // Only sources present in the corpus appear.
  std::map<Source, SourceStats> by_source;
  SourceStats total;
};

// Whitespace-delimited tokens.
inline std::size_t word_count(const std::string& text) {
  std::istringstream in(text);
  std::size_t n = 0;
  for (std::string w; in >> w;) ++n;
  return n;
}

inline double implicit_percentage(const Reconstruction& r) {
  if (r.premises.empty()) return 0.0;
  std::size_t implicit = 0;
  for (const auto& p : r.premises) implicit += p.implicit ? 1 : 0;
  return 100.0 * static_cast<double>(implicit) / static_cast<double>(r.premises.size());
}

namespace detail {

// Sample deviation of a single value is reported as 0.
inline MeanStd mean_std(const std::vector<double>& xs, Deviation kind) {
  MeanStd out;
  if (xs.empty()) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  double sq = 0.0;
  for (double x : xs) sq += (x - out.mean) * (x - out.mean);
  const std::size_t denom =
      kind == Deviation::kSample ? (xs.size() > 1 ? xs.size() - 1 : 0) : xs.size();
  out.std = denom == 0 ? 0.0 : std::sqrt(sq / static_cast<double>(denom));
  return out;
}

inline SourceStats summarize(const std::vector<const ArguinasRecord*>& rs, Deviation kind) {
  std::vector<double> words, premises, implicit;
  for (const auto* r : rs) {
    words.push_back(static_cast<double>(word_count(r->argument)));
    premises.push_back(static_cast<double>(r->reconstruction.premises.size()));
    implicit.push_back(implicit_percentage(r->reconstruction));
  }
  return {rs.size(), mean_std(words, kind), mean_std(premises, kind),
          mean_std(implicit, kind)};
}

}  // namespace detail

inline CorpusStats compute_stats(const std::vector<ArguinasRecord>& records,
                                 Deviation kind = Deviation::kPopulation) {
  if (records.empty()) throw EmptyCorpus("cannot compute statistics of an empty corpus");
  std::map<Source, std::vector<const ArguinasRecord*>> groups;
  std::vector<const ArguinasRecord*> all;
  for (const auto& r : records) {
    groups[r.source].push_back(&r);
    all.push_back(&r);
  }
  CorpusStats out;
  for (const auto& [source, rs] : groups) out.by_source[source] = detail::summarize(rs, kind);
  out.total = detail::summarize(all, kind);
  return out;
}

inline nlohmann::json to_json(const MeanStd& m) { return {{"mean", m.mean}, {"std", m.std}}; }

inline nlohmann::json to_json(const SourceStats& s) {
  return {{"count", s.count},
          {"words", to_json(s.words)},
          {"premises", to_json(s.premises)},
          {"implicit_pct", to_json(s.implicit_pct)}};
}

inline nlohmann::json to_json(const CorpusStats& s) {
  nlohmann::json sources = nlohmann::json::object();
  for (const auto& [source, st] : s.by_source) sources[std::string(to_string(source))] = to_json(st);
  return {{"sources", sources}, {"total", to_json(s.total)}};
}

// Tab-separated table: one row per source in tag order, then Total.
inline std::string render_stats_table(const CorpusStats& s) {
  auto cell = [](const MeanStd& m, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f±%.*f", digits, m.mean, digits, m.std);
    return std::string(buf);
  };
  auto row = [&](std::string_view name, const SourceStats& st) {
    return std::string(name) + '\t' + std::to_string(st.count) + '\t' + cell(st.words, 1) +
           '\t' + cell(st.premises, 1) + '\t' + cell(st.implicit_pct, 1) + '\n';
  };
  std::string out = "source\tcount\twords\tpremises\timplicit_pct\n";
  for (Source src : kAllSources) {
    auto it = s.by_source.find(src);
    if (it != s.by_source.end()) out += row(display_name(src), it->second);
  }
  return out + row("Total", s.total);
}

}  // namespace gaar::dataset
