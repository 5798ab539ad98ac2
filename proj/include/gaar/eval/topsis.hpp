#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "gaar/llm/sections.hpp"

#include "gaar/error.hpp"

namespace gaar::eval {

struct TopsisRow {
  std::string method;
  double cost = 0.0;     // lower is better
  double quality = 0.0;  // higher is better
};

// Min-max normalizes both columns, then scores each row by its closeness to
// the ideal (cost 0, quality 1) relative to the anti-ideal (cost 1,
// quality 0), on a 0-100 scale.
inline std::map<std::string, double> topsis(const std::vector<TopsisRow>& rows) {
  if (rows.size() < 2) throw NotEnoughData("TOPSIS needs at least two rows");
  auto bounds = [&](auto field, const char* name) {
    auto [lo, hi] = std::minmax_element(rows.begin(), rows.end(), [&](const auto& a, const auto& b) {
      return a.*field < b.*field;
    });
    if (!((*hi).*field > (*lo).*field)) {
      throw DegenerateColumn(std::string("TOPSIS column ") + name + " is constant");
    }
    return std::pair{(*lo).*field, (*hi).*field};
  };
  const auto [cmin, cmax] = bounds(&TopsisRow::cost, "cost");
  const auto [qmin, qmax] = bounds(&TopsisRow::quality, "quality");
  std::map<std::string, double> out;
  for (const auto& r : rows) {
    if (r.cost < 0) throw InvalidArgument("negative cost for " + r.method);
    const double c = (r.cost - cmin) / (cmax - cmin);
    const double q = (r.quality - qmin) / (qmax - qmin);
    const double to_ideal = std::hypot(c, q - 1.0);
    const double to_anti = std::hypot(c - 1.0, q);
    if (!out.emplace(r.method, 100.0 * to_anti / (to_ideal + to_anti)).second) {
      throw InvalidArgument("duplicate TOPSIS method " + r.method);
    }
  }
  return out;
}

// "method,cost,quality" with a header line. Method names may not contain
// commas.
inline std::vector<TopsisRow> read_topsis_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::vector<TopsisRow> rows;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    line = llm::text::trim(line);
    if (line.empty()) continue;
    if (n == 1 && llm::text::lower(line).rfind("method", 0) == 0) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) {
      throw InvalidArgument(path.string() + ":" + std::to_string(n) +
                            ": expected method,cost,quality");
    }
    try {
      std::size_t used = 0;
      const std::string cost = llm::text::trim(line.substr(c1 + 1, c2 - c1 - 1));
      const std::string quality = llm::text::trim(line.substr(c2 + 1));
      TopsisRow r{llm::text::trim(line.substr(0, c1)), std::stod(cost, &used), 0.0};
      if (used != cost.size()) throw std::invalid_argument(cost);
      r.quality = std::stod(quality, &used);
      if (used != quality.size()) throw std::invalid_argument(quality);
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw InvalidArgument(path.string() + ":" + std::to_string(n) + ": bad number in: " + line);
    }
  }
  return rows;
}

}  // namespace gaar::eval
