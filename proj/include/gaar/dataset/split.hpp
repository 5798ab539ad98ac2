#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "gaar/error.hpp"

namespace gaar::dataset {

namespace detail {

// Uniform draw in [0, bound) by rejection. std::uniform_int_distribution is
// not specified bit-for-bit, so splits would differ between standard libraries.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

}  // namespace detail

// Indices 0..n-1 shuffled by Fisher-Yates under `seed`.
inline std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(idx[i - 1], idx[detail::bounded(rng, i)]);
  }
  return idx;
}

// Train takes the first `train_n` shuffled items, test the next `test_n`.
template <typename T>
std::pair<std::vector<T>, std::vector<T>> split(const std::vector<T>& items, std::size_t train_n,
                                                std::size_t test_n, std::uint64_t seed) {
  if (train_n + test_n > items.size()) {
    throw InsufficientData("split of " + std::to_string(train_n) + " + " +
                           std::to_string(test_n) + " needs more than the " +
                           std::to_string(items.size()) + " records available");
  }
  const auto idx = shuffled_indices(items.size(), seed);
  std::pair<std::vector<T>, std::vector<T>> out;
  out.first.reserve(train_n);
  out.second.reserve(test_n);
  for (std::size_t i = 0; i < train_n; ++i) out.first.push_back(items[idx[i]]);
  for (std::size_t i = train_n; i < train_n + test_n; ++i) out.second.push_back(items[idx[i]]);
  return out;
}

}  // namespace gaar::dataset
