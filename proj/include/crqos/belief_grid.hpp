#pragma once

// Regular grid on the probability simplex: all vectors with entries k/M summing
// to 1, indexed in lexicographic order of (k_0, ..., k_{S-1}).

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "crqos/errors.hpp"
#include "crqos/markov_channel.hpp"

namespace crqos {

/// Number of ways to write n as an ordered sum of `parts` nonnegative integers.
inline std::uint64_t composition_count(int n, int parts) {
  if (parts == 0) return n == 0 ? 1 : 0;
  // C(n + parts - 1, parts - 1), exact with incremental products.
  const int k = parts - 1;
  std::uint64_t c = 1;
  for (int i = 1; i <= k; ++i) c = c * static_cast<std::uint64_t>(n + i) / static_cast<std::uint64_t>(i);
  return c;
}

class BeliefGrid {
 public:
  BeliefGrid(int states, int resolution) : states_(states), resolution_(resolution) {
    if (states < 1) throw ConfigError(ConfigError::Kind::Validation, "states", "grid needs at least one state");
    if (resolution < 1) throw ConfigError(ConfigError::Kind::Validation, "grid_resolution", "grid resolution must be >= 1");
    const std::uint64_t n = composition_count(resolution, states);
    counts_.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(states));
    std::vector<int> k(static_cast<std::size_t>(states), 0);
    enumerate(k, 0, resolution);
    size_ = counts_.size() / static_cast<std::size_t>(states);
  }

  int states() const { return states_; }
  int resolution() const { return resolution_; }
  std::size_t size() const { return size_; }

  /// Integer coordinates k_i of point `index`.
  const int* counts(std::size_t index) const { return counts_.data() + index * static_cast<std::size_t>(states_); }

  Vector point(std::size_t index) const {
    Vector v(states_);
    const int* k = counts(index);
    for (int i = 0; i < states_; ++i) v(i) = static_cast<double>(k[i]) / static_cast<double>(resolution_);
    return v;
  }

  /// Lexicographic rank of an integer composition of M.
  std::size_t rank(const int* k) const {
    std::uint64_t r = 0;
    int remaining = resolution_;
    for (int i = 0; i < states_ - 1; ++i) {
      const int rest_parts = states_ - i - 1;
      for (int v = 0; v < k[i]; ++v) r += composition_count(remaining - v, rest_parts);
      remaining -= k[i];
    }
    return static_cast<std::size_t>(r);
  }

  /// Grid point closest to pi in L1 distance; exact ties go to the
  /// lexicographically smallest point.
  std::size_t nearest(const Vector& pi) const {
    const int n = states_;
    int k[kMaxStack];
    double frac[kMaxStack];
    std::vector<int> k_heap;
    std::vector<double> f_heap;
    int* kk = k;
    double* ff = frac;
    if (n > kMaxStack) {
      k_heap.resize(static_cast<std::size_t>(n));
      f_heap.resize(static_cast<std::size_t>(n));
      kk = k_heap.data();
      ff = f_heap.data();
    }
    int total = 0;
    for (int i = 0; i < n; ++i) {
      const double y = std::clamp(pi(i), 0.0, 1.0) * static_cast<double>(resolution_);
      const double fl = std::floor(y);
      kk[i] = static_cast<int>(fl);
      ff[i] = y - fl;
      total += kk[i];
    }
    int r = resolution_ - total;
    // Round up the r largest remainders; equal remainders prefer the highest
    // index, which keeps earlier coordinates small.
    while (r > 0) {
      int best = -1;
      for (int i = n - 1; i >= 0; --i)
        if (ff[i] >= 0.0 && (best < 0 || ff[i] > ff[best])) best = i;
      if (best < 0) break;
      kk[best] += 1;
      ff[best] = -1.0;
      --r;
    }
    while (r < 0) {
      int best = -1;
      for (int i = 0; i < n; ++i)
        if (kk[i] > 0 && ff[i] >= 0.0 && (best < 0 || ff[i] < ff[best])) best = i;
      if (best < 0)
        for (int i = 0; i < n; ++i)
          if (kk[i] > 0) best = i;
      kk[best] -= 1;
      ff[best] = -2.0;
      ++r;
    }
    return rank(kk);
  }

 private:
  static constexpr int kMaxStack = 32;

  void enumerate(std::vector<int>& k, int pos, int remaining) {
    if (pos == states_ - 1) {
      k[static_cast<std::size_t>(pos)] = remaining;
      counts_.insert(counts_.end(), k.begin(), k.end());
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      k[static_cast<std::size_t>(pos)] = v;
      enumerate(k, pos + 1, remaining - v);
    }
  }

  int states_;
  int resolution_;
  std::size_t size_ = 0;
  std::vector<int> counts_;
};

}  // namespace crqos
