#pragma once

// Independent reference computations used by the tests. They share no code
// with the library beyond Rational and the network value types.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "relumax/network.hpp"

namespace oracle {

using relumax::Rational;
using relumax::Vec;

/// Plain forward pass written out independently of relumax::eval.
inline Rational forward(const relumax::ReluNetwork& net, const Vec& x) {
  Vec a = x;
  for (const auto& layer : net.hidden()) {
    Vec next(layer.out_dim());
    for (std::size_t i = 0; i < layer.out_dim(); ++i) {
      Rational s = layer.bias(i);
      for (std::size_t j = 0; j < a.size(); ++j) s += layer.weight(i, j) * a[j];
      next[i] = s.sign() > 0 ? s : Rational();
    }
    a = std::move(next);
  }
  Rational s = net.output().bias(0);
  for (std::size_t j = 0; j < a.size(); ++j) s += net.output().weight(0, j) * a[j];
  return s;
}

inline Rational max_value(const Vec& x) {
  Rational m = x.front();
  for (const auto& v : x)
    if (v > m) m = v;
  return m;
}

/// Adjacency matrix graph.
struct Graph {
  std::size_t n = 0;
  std::vector<std::vector<bool>> adj;
  explicit Graph(std::size_t d) : n(d), adj(d, std::vector<bool>(d, false)) {}
  void add(std::size_t i, std::size_t j) { adj[i][j] = adj[j][i] = true; }
  std::size_t edges() const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) c += adj[i][j];
    return c;
  }
};

/// Lexicographically least r-clique by enumerating all r-subsets in order.
inline std::optional<std::vector<std::size_t>> brute_clique(const Graph& g, std::size_t r) {
  if (r > g.n) return std::nullopt;
  std::vector<std::size_t> idx(r);
  for (std::size_t i = 0; i < r; ++i) idx[i] = i;
  for (;;) {
    bool ok = true;
    for (std::size_t a = 0; a < r && ok; ++a)
      for (std::size_t b = a + 1; b < r && ok; ++b) ok = g.adj[idx[a]][idx[b]];
    if (ok) return idx;
    std::size_t i = r;
    while (i > 0 && idx[i - 1] == g.n - r + (i - 1)) --i;
    if (i == 0) return std::nullopt;
    ++idx[i - 1];
    for (std::size_t j = i; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
}

inline std::size_t brute_clique_number(const Graph& g) {
  std::size_t best = 0;
  for (std::size_t r = 1; r <= g.n; ++r)
    if (brute_clique(g, r)) best = r;
    else break;
  return best;
}

/// Largest edge count of a K_r-free graph on d vertices, by enumerating
/// every labelled graph (d <= 6).
inline std::size_t brute_turan_number(std::size_t d, std::size_t r) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) pairs.emplace_back(i, j);
  std::size_t best = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pairs.size()); ++mask) {
    const auto e = static_cast<std::size_t>(__builtin_popcountll(mask));
    if (e <= best) continue;
    Graph g(d);
    for (std::size_t k = 0; k < pairs.size(); ++k)
      if ((mask >> k) & 1u) g.add(pairs[k].first, pairs[k].second);
    if (!brute_clique(g, r)) best = e;
  }
  return best;
}

/// Seeded random point with coordinates on the grid lo + (hi-lo) * k/den.
inline Vec random_point(std::mt19937_64& rng, std::size_t d, const Rational& lo, const Rational& hi, long den) {
  std::uniform_int_distribution<long> k(0, den);
  Vec x(d);
  for (auto& v : x) v = lo + (hi - lo) * Rational(k(rng), den);
  return x;
}

/// Mismatches between net and Max_d on the full grid with `steps` steps per
/// axis over the box.
inline std::size_t grid_mismatches(const relumax::ReluNetwork& net, const relumax::Box& box, long steps) {
  const std::size_t d = net.input_dim();
  std::vector<long> k(d, 0);
  std::size_t bad = 0;
  for (;;) {
    Vec x(d);
    for (std::size_t i = 0; i < d; ++i)
      x[i] = box.side(i).lo + (box.side(i).hi - box.side(i).lo) * Rational(k[i], steps);
    if (forward(net, x) != max_value(x)) ++bad;
    std::size_t i = 0;
    while (i < d && k[i] == steps) k[i++] = 0;
    if (i == d) break;
    ++k[i];
  }
  return bad;
}

}  // namespace oracle
