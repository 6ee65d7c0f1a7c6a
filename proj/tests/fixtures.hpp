#pragma once

// Seeded network fixtures shared by the unit and acceptance tests.

#include <algorithm>
#include <random>
#include <vector>

#include "relumax/network.hpp"

namespace fixture {

using relumax::AffineMap;
using relumax::Matrix;
using relumax::Rational;
using relumax::ReluNetwork;
using relumax::Vec;

struct Synthetic {
  ReluNetwork net;
  std::vector<std::size_t> clique;  // sorted, 0-based
};

inline Rational nonzero_grid(std::mt19937_64& rng) {
  static const long values[] = {-8, -6, -4, -3, -2, -1, 1, 2, 3, 4, 6, 8};
  return Rational(values[rng() % 12], 4);
}

inline Rational grid(std::mt19937_64& rng) { return Rational(static_cast<long>(rng() % 9) - 4, 4); }

/// d in [3,6], clique of size r in [2, d-1], depth 3 or 4, zero first-layer
/// biases, and every first-layer neuron nonzero somewhere outside the clique.
inline Synthetic dominance_net(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t d = 3 + rng() % 4;
  const std::size_t r = 2 + rng() % (d - 2);
  std::vector<std::size_t> perm(d);
  for (std::size_t i = 0; i < d; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::size_t> clique(perm.begin(), perm.begin() + static_cast<long>(r));
  std::sort(clique.begin(), clique.end());
  std::vector<bool> inside(d, false);
  for (auto i : clique) inside[i] = true;
  std::vector<std::size_t> outside;
  for (std::size_t i = 0; i < d; ++i)
    if (!inside[i]) outside.push_back(i);

  const std::size_t depth = 3 + rng() % 2;
  std::vector<AffineMap> hidden;
  const std::size_t w1 = 1 + rng() % 5;
  Matrix first(w1, Vec(d));
  for (auto& row : first) {
    for (std::size_t i = 0; i < d; ++i)
      if (rng() % 2) row[i] = nonzero_grid(rng);
    const std::size_t forced = outside[rng() % outside.size()];
    if (row[forced].is_zero()) row[forced] = nonzero_grid(rng);
  }
  hidden.emplace_back(d, first, Vec(w1));
  std::size_t in = w1;
  for (std::size_t l = 1; l + 1 < depth; ++l) {
    const std::size_t w = 1 + rng() % 4;
    Matrix m(w, Vec(in));
    Vec b(w);
    for (auto& row : m)
      for (auto& v : row) v = grid(rng);
    for (auto& v : b) v = grid(rng);
    hidden.emplace_back(in, m, b);
    in = w;
  }
  Matrix out(1, Vec(in));
  for (auto& v : out[0]) v = grid(rng);
  return {ReluNetwork(d, hidden, AffineMap(in, out, {grid(rng)})), clique};
}

}  // namespace fixture
