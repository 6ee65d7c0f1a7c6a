#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "relumax/network.hpp"
#include "relumax/random.hpp"

namespace relumax {

/// max(x1,x2) = relu(x1) - relu(-x1) + relu(x2 - x1): three neurons, depth 2.
inline ReluNetwork max2_gadget() {
  AffineMap hidden(2, {{1, 0}, {-1, 0}, {-1, 1}}, {0, 0, 0});
  AffineMap output(3, {{1, -1, 1}}, {0});
  return ReluNetwork(2, {std::move(hidden)}, std::move(output));
}

/// Max_d by pairwise maxima in rounds, ceil(log2 d) hidden layers. An odd
/// value left over in a round is carried through relu(v) - relu(-v), so the
/// network equals Max_d on all of R^d. All biases are zero.
inline ReluNetwork tournament_max(std::size_t d) {
  if (d == 0) throw InvalidInput("tournament_max: d must be positive");
  if (d == 1) return ReluNetwork(1, {}, AffineMap(1, {{1}}, {0}));

  // Each live value is a linear form over the previous layer's outputs.
  std::size_t prev_dim = d;
  Matrix values;
  for (std::size_t i = 0; i < d; ++i) {
    Vec e(d);
    e[i] = 1;
    values.push_back(std::move(e));
  }

  std::vector<AffineMap> hidden;
  while (values.size() > 1) {
    Matrix rows;
    Matrix next;  // over this layer's neurons, filled once the width is known
    std::vector<std::vector<std::pair<std::size_t, int>>> uses;
    for (std::size_t i = 0; i + 1 < values.size(); i += 2) {
      const Vec& a = values[i];
      const Vec& b = values[i + 1];
      Vec neg_a(prev_dim), diff(prev_dim);
      for (std::size_t k = 0; k < prev_dim; ++k) {
        neg_a[k] = -a[k];
        diff[k] = b[k] - a[k];
      }
      const std::size_t base = rows.size();
      rows.push_back(a);
      rows.push_back(neg_a);
      rows.push_back(diff);
      uses.push_back({{base, 1}, {base + 1, -1}, {base + 2, 1}});
    }
    if (values.size() % 2 == 1) {
      const Vec& c = values.back();
      Vec neg_c(prev_dim);
      for (std::size_t k = 0; k < prev_dim; ++k) neg_c[k] = -c[k];
      const std::size_t base = rows.size();
      rows.push_back(c);
      rows.push_back(neg_c);
      uses.push_back({{base, 1}, {base + 1, -1}});
    }
    const std::size_t width = rows.size();
    for (const auto& u : uses) {
      Vec form(width);
      for (const auto& [idx, coef] : u) form[idx] = coef;
      next.push_back(std::move(form));
    }
    hidden.emplace_back(prev_dim, std::move(rows), Vec(width));
    values = std::move(next);
    prev_dim = width;
  }
  AffineMap output(prev_dim, {values.front()}, {0});
  return ReluNetwork(d, std::move(hidden), std::move(output));
}

/// Entries of random fixtures are drawn uniformly from {lo/den, ..., hi/den}.
struct WeightGrid {
  long lo = -2;
  long hi = 2;
  long den = 4;
};

/// Seeded random network with the given hidden widths and a single output.
inline ReluNetwork random_network(std::size_t input_dim, const std::vector<std::size_t>& widths,
                                  WeightGrid grid, std::uint64_t seed) {
  if (widths.empty()) throw InvalidInput("random_network: width list is empty");
  if (input_dim == 0) throw InvalidInput("random_network: input_dim must be positive");
  if (grid.den <= 0 || grid.lo > grid.hi) throw InvalidInput("random_network: bad weight grid");
  Rng rng(seed);
  auto random_map = [&](std::size_t in, std::size_t out) {
    Matrix w(out, Vec(in));
    Vec b(out);
    for (std::size_t i = 0; i < out; ++i) {
      for (std::size_t j = 0; j < in; ++j) w[i][j] = rng.grid(grid.lo, grid.hi, grid.den);
      b[i] = rng.grid(grid.lo, grid.hi, grid.den);
    }
    return AffineMap(in, std::move(w), std::move(b));
  };
  std::vector<AffineMap> hidden;
  std::size_t in = input_dim;
  for (std::size_t w : widths) {
    if (w == 0) throw InvalidInput("random_network: widths must be positive");
    hidden.push_back(random_map(in, w));
    in = w;
  }
  AffineMap output = random_map(in, 1);
  return ReluNetwork(input_dim, std::move(hidden), std::move(output));
}

}  // namespace relumax
