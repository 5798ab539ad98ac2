#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "gaar/error.hpp"
#include "gaar/eval/match.hpp"

namespace gaar::eval {

struct EloScale {
  double base = 10.0;
  double scale = 400.0;
  double initial = 1000.0;
};

struct BtOptions {
  EloScale elo;
  // Added to every ordered pair when some method is never beaten (or never
  // wins), which would otherwise push its strength to the boundary.
  double pseudo_count = 0.5;
  double tolerance = 1e-13;
  std::size_t max_iterations = 200000;
};

using RatingTable = std::map<std::string, double>;

struct BtFit {
  std::vector<std::string> methods;  // sorted
  std::vector<double> strengths;     // geometric mean 1
  RatingTable ratings;
  bool regularized = false;
  std::size_t iterations = 0;
};

// Win matrix with ties counted as half a win for each side.
struct WinMatrix {
  std::vector<std::string> methods;
  std::vector<std::vector<double>> wins;  // wins[i][j]: i over j

  static WinMatrix from(const MatchLog& records) {
    WinMatrix m;
    std::map<std::string, std::size_t> index;
    for (const auto& r : records) {
      r.validate();
      index.emplace(r.side_a, 0);
      index.emplace(r.side_b, 0);
    }
    for (auto& [name, i] : index) {
      i = m.methods.size();
      m.methods.push_back(name);
    }
    const std::size_t n = m.methods.size();
    m.wins.assign(n, std::vector<double>(n, 0.0));
    for (const auto& r : records) {
      const std::size_t a = index[r.side_a];
      const std::size_t b = index[r.side_b];
      switch (r.outcome) {
        case Outcome::kAWins: m.wins[a][b] += 1.0; break;
        case Outcome::kBWins: m.wins[b][a] += 1.0; break;
        case Outcome::kTie:
          m.wins[a][b] += 0.5;
          m.wins[b][a] += 0.5;
          break;
      }
    }
    return m;
  }

  // Log-likelihood of strengths under P(i beats j) = s_i / (s_i + s_j).
  double log_likelihood(const std::vector<double>& s) const {
    double ll = 0.0;
    for (std::size_t i = 0; i < methods.size(); ++i) {
      for (std::size_t j = 0; j < methods.size(); ++j) {
        if (wins[i][j] > 0) ll += wins[i][j] * std::log(s[i] / (s[i] + s[j]));
      }
    }
    return ll;
  }
};

namespace detail {

inline std::vector<bool> reachable(const std::vector<std::vector<double>>& w, std::size_t from,
                                   bool undirected) {
  std::vector<bool> seen(w.size(), false);
  std::vector<std::size_t> stack = {from};
  seen[from] = true;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    for (std::size_t j = 0; j < w.size(); ++j) {
      const bool edge = w[i][j] > 0 || (undirected && w[j][i] > 0);
      if (edge && !seen[j]) {
        seen[j] = true;
        stack.push_back(j);
      }
    }
  }
  return seen;
}

inline bool all_of(const std::vector<bool>& v) {
  return std::all_of(v.begin(), v.end(), [](bool b) { return b; });
}

// i beats j edges; strongly connected iff every node reaches every other.
inline bool strongly_connected(const std::vector<std::vector<double>>& w) {
  if (!all_of(reachable(w, 0, false))) return false;
  std::vector<std::vector<double>> t(w.size(), std::vector<double>(w.size()));
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t j = 0; j < w.size(); ++j) t[i][j] = w[j][i];
  }
  return all_of(reachable(t, 0, false));
}

}  // namespace detail

inline RatingTable to_ratings(const std::vector<std::string>& methods,
                              const std::vector<double>& strengths, const EloScale& elo = {}) {
  double log_geo = 0.0;
  for (double s : strengths) log_geo += std::log(s);
  log_geo /= static_cast<double>(strengths.size());
  RatingTable out;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    const double rel = std::log(strengths[i]) - log_geo;
    out[methods[i]] = elo.initial + elo.scale * rel / std::log(elo.base);
  }
  return out;
}

// Maximum-likelihood Bradley-Terry fit by minorization-maximization, with
// ratings on an Elo-like scale anchored so their mean is the initial rating.
inline BtFit fit_bradley_terry(const MatchLog& records, const BtOptions& opt = {}) {
  if (records.empty()) throw NotEnoughData("no match records to fit");
  WinMatrix m = WinMatrix::from(records);
  const std::size_t n = m.methods.size();
  if (!detail::all_of(detail::reachable(m.wins, 0, true))) {
    throw DisconnectedGraph("comparison graph over " + std::to_string(n) +
                            " methods is not connected");
  }
  BtFit fit;
  fit.methods = m.methods;
  if (!detail::strongly_connected(m.wins)) {
    fit.regularized = true;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) m.wins[i][j] += opt.pseudo_count;
      }
    }
  }
  std::vector<double> total(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) total[i] += m.wins[i][j];
  }
  std::vector<double> s(n, 1.0);
  std::vector<double> next(n);
  for (fit.iterations = 1; fit.iterations <= opt.max_iterations; ++fit.iterations) {
    for (std::size_t i = 0; i < n; ++i) {
      double denom = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double games = m.wins[i][j] + m.wins[j][i];
        if (j != i && games > 0) denom += games / (s[i] + s[j]);
      }
      next[i] = total[i] / denom;
    }
    double log_geo = 0.0;
    for (double v : next) log_geo += std::log(v);
    const double g = std::exp(log_geo / static_cast<double>(n));
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] /= g;
      change = std::max(change, std::abs(next[i] - s[i]) / s[i]);
    }
    s.swap(next);
    if (change < opt.tolerance) break;
  }
  fit.strengths = s;
  fit.ratings = to_ratings(fit.methods, s, opt.elo);
  return fit;
}

}  // namespace gaar::eval
