#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "errors.hpp"

namespace sketchlb {

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t r) {
  if (r > n) return 0;
  r = std::min(r, n - r);
  std::uint64_t out = 1;
  for (std::uint64_t i = 1; i <= r; ++i) out = out * (n - r + i) / i;
  return out;
}

/// Calls fn(subset) for every r-subset of `items` in lexicographic order of
/// positions. `subset` is reused between calls. Stops early if fn returns false
/// (when fn returns bool).
template <typename T, typename Fn>
void for_each_combination(const std::vector<T>& items, std::size_t r, Fn&& fn) {
  const std::size_t n = items.size();
  if (r > n) return;
  std::vector<std::size_t> idx(r);
  for (std::size_t i = 0; i < r; ++i) idx[i] = i;
  std::vector<T> subset(r);
  while (true) {
    for (std::size_t i = 0; i < r; ++i) subset[i] = items[idx[i]];
    if constexpr (std::is_same_v<decltype(fn(subset)), bool>) {
      if (!fn(subset)) return;
    } else {
      fn(subset);
    }
    std::size_t i = r;
    while (i > 0 && idx[i - 1] == n - r + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
}

template <typename T>
std::vector<std::vector<T>> combinations(const std::vector<T>& items, std::size_t r) {
  std::vector<std::vector<T>> out;
  for_each_combination(items, r, [&](const std::vector<T>& s) { out.push_back(s); });
  return out;
}

/// Sorted intersection size of two sorted ranges.
template <typename T>
std::size_t intersection_size(const std::vector<T>& a, const std::vector<T>& b) {
  std::size_t i = 0, j = 0, count = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

template <typename T>
std::vector<T> sorted_intersection(const std::vector<T>& a, const std::vector<T>& b) {
  std::vector<T> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

/// Uniform r-subset of `items`, returned sorted.
template <typename T, typename Rng>
std::vector<T> random_subset(const std::vector<T>& items, std::size_t r, Rng& rng) {
  if (r > items.size()) throw Error("subset larger than its ground set");
  std::vector<T> pool = items;
  for (std::size_t i = 0; i < r; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(r);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace sketchlb
