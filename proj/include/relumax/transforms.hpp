#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "relumax/graph.hpp"
#include "relumax/lp.hpp"
#include "relumax/network.hpp"

namespace relumax::transforms {

// ---------------------------------------------------------------------------
// Shifting and homogenization

/// First-layer biases b_i += c * sum_j w_ij and output bias -= c. If the
/// network equals Max_d on [0,1]^d the result equals Max_d on [-c,1-c]^d.
inline ReluNetwork shift_to_centered(const ReluNetwork& net, const Rational& c) {
  auto shift_first = [&](const AffineMap& m) {
    Vec b = m.biases();
    for (std::size_t i = 0; i < m.out_dim(); ++i) {
      Rational row_sum;
      for (const auto& w : m.row(i)) row_sum += w;
      b[i] += c * row_sum;
    }
    return AffineMap(m.in_dim(), m.weights(), std::move(b));
  };
  std::vector<AffineMap> hidden = net.hidden();
  AffineMap output = net.output();
  if (hidden.empty())
    output = shift_first(output);
  else
    hidden.front() = shift_first(hidden.front());
  Vec ob = output.biases();
  ob[0] -= c;
  output = AffineMap(output.in_dim(), output.weights(), std::move(ob));
  return ReluNetwork(net.input_dim(), std::move(hidden), std::move(output));
}

struct LayerChanges {
  std::size_t removed_negative = 0;  // negative bias: neuron dropped
  std::size_t split_positive = 0;    // positive bias: replaced by w, -w
  std::size_t removed_dead = 0;      // first layer only: zero row and zero bias
};

struct HomogenizeDiagnostics {
  Rational shift;
  std::vector<LayerChanges> layers;
  std::vector<std::size_t> first_layer_nonzeros;  // per neuron of the result
  std::vector<std::size_t> single_support;        // first-layer neurons with < 2 nonzero weights
  Rational output_bias;

  bool first_layer_ok() const { return single_support.empty(); }
  bool output_bias_zero() const { return output_bias.is_zero(); }
};

struct HomogenizeResult {
  ReluNetwork net;
  HomogenizeDiagnostics diagnostics;
};

/// Shifts by c, then pushes every hidden bias one layer forward: a neuron
/// with negative bias is dropped (it is inactive near the origin), one with
/// bias b > 0 becomes the pair (w, -w) whose outgoing weights (v, -v) and
/// successor bias += v b reproduce v (w.x + b). The result has zero hidden
/// biases, the same depth and at most twice the width; it agrees with the
/// shifted network near the origin. Diagnostics record, never assume, that
/// every first-layer neuron keeps at least two nonzero weights.
inline HomogenizeResult homogenize(const ReluNetwork& net, const Rational& c) {
  const ReluNetwork shifted = shift_to_centered(net, c);
  std::vector<AffineMap> maps = shifted.hidden();
  maps.push_back(shifted.output());

  HomogenizeDiagnostics diag;
  diag.shift = c;
  std::size_t in_dim = net.input_dim();
  for (std::size_t l = 0; l + 1 < maps.size(); ++l) {
    const AffineMap& cur = maps[l];
    const AffineMap& nxt = maps[l + 1];
    LayerChanges changes;
    Matrix rows;
    std::vector<Vec> next_cols;  // columns of nxt, one per kept neuron
    Vec next_bias = nxt.biases();
    auto column = [&](std::size_t n, const Rational& sign) {
      Vec col(nxt.out_dim());
      for (std::size_t k = 0; k < nxt.out_dim(); ++k) col[k] = sign * nxt.weight(k, n);
      return col;
    };
    for (std::size_t n = 0; n < cur.out_dim(); ++n) {
      const Rational& b = cur.bias(n);
      if (b.sign() < 0) {
        ++changes.removed_negative;
      } else if (b.sign() > 0) {
        ++changes.split_positive;
        Vec neg(cur.row(n));
        for (auto& v : neg) v = -v;
        rows.push_back(cur.row(n));
        next_cols.push_back(column(n, Rational(1)));
        rows.push_back(std::move(neg));
        next_cols.push_back(column(n, Rational(-1)));
        for (std::size_t k = 0; k < nxt.out_dim(); ++k) next_bias[k] += nxt.weight(k, n) * b;
      } else if (l == 0 && std::all_of(cur.row(n).begin(), cur.row(n).end(),
                                       [](const Rational& v) { return v.is_zero(); })) {
        ++changes.removed_dead;
      } else {
        rows.push_back(cur.row(n));
        next_cols.push_back(column(n, Rational(1)));
      }
    }
    if (rows.empty()) {
      // keep the layer (and the depth) with one neuron that is always 0
      rows.push_back(Vec(in_dim));
      next_cols.push_back(Vec(nxt.out_dim()));
    }
    const std::size_t width = rows.size();
    Matrix next_w(nxt.out_dim(), Vec(width));
    for (std::size_t n = 0; n < width; ++n)
      for (std::size_t k = 0; k < nxt.out_dim(); ++k) next_w[k][n] = next_cols[n][k];
    maps[l] = AffineMap(in_dim, std::move(rows), Vec(width));
    maps[l + 1] = AffineMap(width, std::move(next_w), std::move(next_bias));
    diag.layers.push_back(changes);
    in_dim = width;
  }

  AffineMap output = maps.back();
  maps.pop_back();
  diag.output_bias = output.bias(0);
  if (!maps.empty()) {
    for (std::size_t n = 0; n < maps.front().out_dim(); ++n) {
      const auto nz = nonzero_indices(maps.front().row(n)).size();
      diag.first_layer_nonzeros.push_back(nz);
      if (nz < 2) diag.single_support.push_back(n);
    }
  }
  return {ReluNetwork(net.input_dim(), std::move(maps), std::move(output)), std::move(diag)};
}

// ---------------------------------------------------------------------------
// Depth-2 canonicalization and non-differentiability hyperplanes

/// {x : normal . x + offset = 0}, scaled so the first nonzero normal entry is 1.
struct Hyperplane {
  Vec normal;
  Rational offset;

  /// Canonical hyperplane of w.x + b = 0 and the factor s with w = s * normal.
  static std::pair<Hyperplane, Rational> canonical(const Vec& w, const Rational& b) {
    const auto it = std::find_if(w.begin(), w.end(), [](const Rational& v) { return !v.is_zero(); });
    if (it == w.end()) throw InvalidInput("hyperplane: zero normal");
    const Rational s = *it;
    Hyperplane h{w, b / s};
    for (auto& v : h.normal) v /= s;
    return {std::move(h), s};
  }

  std::string str() const {
    std::string out;
    for (std::size_t i = 0; i < normal.size(); ++i) {
      if (normal[i].is_zero()) continue;
      const Rational& c = normal[i];
      if (out.empty())
        out += c.sign() < 0 ? "-" : "";
      else
        out += c.sign() < 0 ? " - " : " + ";
      if (c.abs() != Rational(1)) out += c.abs().str() + "*";
      out += "x" + std::to_string(i + 1);
    }
    if (!offset.is_zero()) out += (offset.sign() < 0 ? " - " : " + ") + offset.abs().str();
    return out + " = 0";
  }

  friend bool operator==(const Hyperplane&, const Hyperplane&) = default;
  friend bool operator<(const Hyperplane& a, const Hyperplane& b) {
    if (a.normal != b.normal)
      return std::lexicographical_compare(a.normal.begin(), a.normal.end(), b.normal.begin(), b.normal.end());
    return a.offset < b.offset;
  }
};

struct Depth2Simplified {
  ReluNetwork net;
  /// Neuron pairs (indices into net's hidden layer) on one hyperplane with
  /// opposite orientation whose slopes cancel: together they are affine.
  std::vector<std::pair<std::size_t, std::size_t>> smoothed_pairs;
};

/// Function-preserving reduction of a depth-2 network: drops neurons with
/// zero output weight; folds zero-weight neurons into the output bias as
/// v relu(b); merges positively parallel neurons (w_k = a w_j, b_k = a b_j,
/// a > 0) into one with output weight v_j + a v_k; records oppositely
/// oriented pairs with v_j = a v_k as smoothed.
inline Depth2Simplified depth2_simplify(const ReluNetwork& net) {
  if (net.depth() != 2) throw InvalidInput("depth2_simplify: network depth is " + std::to_string(net.depth()));
  const AffineMap& h = net.hidden(0);
  const AffineMap& o = net.output();
  Rational b0 = o.bias(0);

  struct Unit {
    Vec w;
    Rational b;
    Rational v;
    Hyperplane plane;
    Rational scale;
  };
  std::vector<Unit> units;
  for (std::size_t j = 0; j < h.out_dim(); ++j) {
    const Rational& v = o.weight(0, j);
    if (v.is_zero()) continue;
    if (nonzero_indices(h.row(j)).empty()) {
      b0 += v * relu(h.bias(j));
      continue;
    }
    auto [plane, scale] = Hyperplane::canonical(h.row(j), h.bias(j));
    // merge into an earlier unit with the same plane and orientation
    auto same = std::find_if(units.begin(), units.end(), [&](const Unit& u) {
      return u.plane == plane && u.scale.sign() == scale.sign();
    });
    if (same != units.end()) {
      same->v += (scale / same->scale) * v;
      continue;
    }
    units.push_back({h.row(j), h.bias(j), v, std::move(plane), scale});
  }
  units.erase(std::remove_if(units.begin(), units.end(), [](const Unit& u) { return u.v.is_zero(); }),
              units.end());

  std::vector<std::pair<std::size_t, std::size_t>> smoothed;
  for (std::size_t j = 0; j < units.size(); ++j)
    for (std::size_t k = j + 1; k < units.size(); ++k) {
      if (!(units[j].plane == units[k].plane)) continue;
      const Rational a = units[k].scale / units[j].scale;  // w_k = a w_j, a < 0 here
      if (units[j].v == a * units[k].v) smoothed.emplace_back(j, k);
    }

  if (units.empty()) {
    AffineMap out(net.input_dim(), {Vec(net.input_dim())}, {b0});
    return {ReluNetwork(net.input_dim(), {}, std::move(out)), {}};
  }
  Matrix w;
  Vec b, v;
  for (auto& u : units) {
    w.push_back(u.w);
    b.push_back(u.b);
    v.push_back(u.v);
  }
  const std::size_t n = units.size();
  AffineMap hidden(net.input_dim(), std::move(w), std::move(b));
  AffineMap out(n, {std::move(v)}, {b0});
  return {ReluNetwork(net.input_dim(), {std::move(hidden)}, std::move(out)), std::move(smoothed)};
}

/// Canonical hyperplanes forming the non-differentiability set of a depth-2
/// network: those of the simplified network minus smoothed pairs. Never more
/// than the original width.
inline std::vector<Hyperplane> nondiff_hyperplanes(const ReluNetwork& net) {
  const auto simplified = depth2_simplify(net);
  std::vector<bool> smooth(simplified.net.width(), false);
  for (const auto& [j, k] : simplified.smoothed_pairs) smooth[j] = smooth[k] = true;
  std::vector<Hyperplane> out;
  if (simplified.net.hidden().empty()) return out;
  const AffineMap& h = simplified.net.hidden(0);
  for (std::size_t j = 0; j < h.out_dim(); ++j) {
    if (smooth[j]) continue;
    auto plane = Hyperplane::canonical(h.row(j), h.bias(j)).first;
    if (std::find(out.begin(), out.end(), plane) == out.end()) out.push_back(std::move(plane));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Negative assignment, sign certification, restriction and collapse

struct WeightRatio {
  Rational w_min;  // smallest nonzero |w_ij|
  Rational w_max;  // largest |w_ij|
  Rational ratio;  // w_max / w_min >= 1
};

inline WeightRatio weight_ratio(const ReluNetwork& net) {
  if (net.hidden().empty()) throw InvalidInput("weight_ratio: network has no hidden layer");
  std::optional<Rational> lo, hi;
  for (const auto& row : net.hidden(0).weights())
    for (const auto& w : row) {
      if (w.is_zero()) continue;
      const Rational a = w.abs();
      if (!lo || a < *lo) lo = a;
      if (!hi || a > *hi) hi = a;
    }
  if (!lo) throw InvalidInput("weight_ratio: first layer is all zero");
  return {*lo, *hi, *hi / *lo};
}

/// -r (2W)^(p - r) for permuted position p (1-based, p > r).
inline Rational assigned_value(std::size_t position, std::size_t r, const Rational& W) {
  return -Rational(static_cast<long>(r)) * pow(Rational(2) * W, static_cast<unsigned long>(position - r));
}

struct AssignmentPlan {
  std::size_t input_dim = 0;
  std::vector<std::size_t> clique;    // sorted, 0-based
  std::vector<std::size_t> order;     // order[p] = original coordinate at permuted position p+1
  WeightRatio weights;
  std::vector<std::optional<Rational>> values;  // per original coordinate; nullopt inside the clique

  std::size_t r() const { return clique.size(); }
  bool in_clique(std::size_t i) const { return !values[i].has_value(); }
  /// 1-based permuted position of original coordinate i.
  std::size_t position(std::size_t i) const {
    return static_cast<std::size_t>(std::find(order.begin(), order.end(), i) - order.begin()) + 1;
  }
};

/// Plan with clique coordinates first (original order), the rest after them
/// (original order) taking x = -r (2W)^(p - r). No precondition check.
inline AssignmentPlan make_assignment_plan(std::size_t input_dim, std::vector<std::size_t> clique,
                                           const WeightRatio& weights) {
  std::sort(clique.begin(), clique.end());
  if (std::adjacent_find(clique.begin(), clique.end()) != clique.end())
    throw InvalidInput("assignment: repeated clique index");
  if (!clique.empty() && clique.back() >= input_dim) throw InvalidInput("assignment: clique index out of range");
  AssignmentPlan plan;
  plan.input_dim = input_dim;
  plan.clique = clique;
  plan.weights = weights;
  plan.order = clique;
  plan.values.assign(input_dim, std::nullopt);
  std::vector<bool> inside(input_dim, false);
  for (auto i : clique) inside[i] = true;
  for (std::size_t i = 0; i < input_dim; ++i)
    if (!inside[i]) {
      plan.order.push_back(i);
      plan.values[i] = assigned_value(plan.order.size(), clique.size(), weights.ratio);
    }
  return plan;
}

/// Assignment for the coordinates outside clique `clique` (|clique| >= 2).
/// Throws PreconditionFailed naming the first neuron whose nonzero weights
/// all lie inside the clique.
inline AssignmentPlan negative_assignment(const ReluNetwork& net, const std::vector<std::size_t>& clique) {
  if (clique.size() < 2) throw InvalidInput("negative_assignment: clique must have at least 2 vertices");
  if (net.hidden().empty()) throw InvalidInput("negative_assignment: network has no hidden layer");
  AssignmentPlan plan = make_assignment_plan(net.input_dim(), clique, {1, 1, 1});
  const AffineMap& first = net.hidden(0);
  for (std::size_t n = 0; n < first.out_dim(); ++n) {
    const auto nz = nonzero_indices(first.row(n));
    if (std::none_of(nz.begin(), nz.end(), [&](std::size_t i) { return !plan.in_clique(i); }))
      throw PreconditionFailed("negative_assignment: neuron " + std::to_string(n) +
                                   " has no nonzero weight outside the clique",
                               n);
  }
  return make_assignment_plan(net.input_dim(), clique, weight_ratio(net));
}

enum class NeuronSign { kAlwaysPositive, kAlwaysNegative, kNotFixed };

inline const char* to_string(NeuronSign s) {
  switch (s) {
    case NeuronSign::kAlwaysPositive: return "always-positive";
    case NeuronSign::kAlwaysNegative: return "always-negative";
    case NeuronSign::kNotFixed: return "not-fixed";
  }
  return "?";
}

struct NeuronCertificate {
  NeuronSign sign = NeuronSign::kNotFixed;
  std::optional<Vec> positive_witness;  // pre-activation > 0 here
  std::optional<Vec> negative_witness;  // pre-activation < 0 here
  std::optional<std::size_t> dominant;  // original coordinate with the largest permuted position among assigned nonzeros
  bool matches_dominance = false;       // fixed with sign -sign(w_dominant)
};

struct SignCertificate {
  Box box;  // over the clique coordinates
  std::vector<NeuronCertificate> neurons;

  bool all_fixed() const {
    return std::all_of(neurons.begin(), neurons.end(),
                       [](const NeuronCertificate& n) { return n.sign != NeuronSign::kNotFixed; });
  }
  std::optional<std::size_t> first_not_fixed() const {
    for (std::size_t i = 0; i < neurons.size(); ++i)
      if (neurons[i].sign == NeuronSign::kNotFixed) return i;
    return std::nullopt;
  }
};

/// Pre-activation of first-layer neuron n as an affine form over the clique
/// coordinates, with the assigned coordinates substituted.
inline std::pair<Vec, Rational> restricted_preactivation(const ReluNetwork& net, const AssignmentPlan& plan,
                                                         std::size_t n) {
  const AffineMap& first = net.hidden(0);
  Vec coeffs;
  Rational constant = first.bias(n);
  for (std::size_t i : plan.clique) coeffs.push_back(first.weight(n, i));
  for (std::size_t i = 0; i < plan.input_dim; ++i)
    if (!plan.in_clique(i)) constant += first.weight(n, i) * *plan.values[i];
  return {std::move(coeffs), std::move(constant)};
}

/// Decides, per first-layer neuron, whether its pre-activation keeps one
/// sign on `box` (default [0,1]^r) by exact feasibility of {g > 0} and
/// {g < 0}. A pre-activation that is identically zero counts as
/// always-negative.
inline SignCertificate fixed_activation_analysis(const ReluNetwork& net, const AssignmentPlan& plan,
                                                 std::optional<Box> box = std::nullopt) {
  if (net.hidden().empty()) throw InvalidInput("fixed_activation_analysis: network has no hidden layer");
  if (plan.input_dim != net.input_dim()) throw InvalidInput("fixed_activation_analysis: plan does not match network");
  const std::size_t r = plan.r();
  SignCertificate cert{box ? *box : Box::unit(r), {}};
  if (cert.box.dim() != r) throw InvalidInput("fixed_activation_analysis: box dimension differs from clique size");
  const AffineMap& first = net.hidden(0);
  for (std::size_t n = 0; n < first.out_dim(); ++n) {
    auto [coeffs, constant] = restricted_preactivation(net, plan, n);
    NeuronCertificate nc;
    verify::LinearSystem pos(r), neg(r);
    pos.add(coeffs, constant, verify::Relation::kGt);
    Vec minus = coeffs;
    for (auto& v : minus) v = -v;
    neg.add(std::move(minus), -constant, verify::Relation::kGt);
    nc.positive_witness = verify::feasible(pos, cert.box);
    nc.negative_witness = verify::feasible(neg, cert.box);
    if (nc.positive_witness && nc.negative_witness)
      nc.sign = NeuronSign::kNotFixed;
    else if (nc.positive_witness)
      nc.sign = NeuronSign::kAlwaysPositive;
    else
      nc.sign = NeuronSign::kAlwaysNegative;

    std::size_t best_pos = 0;
    for (std::size_t i = 0; i < plan.input_dim; ++i) {
      if (plan.in_clique(i) || first.weight(n, i).is_zero()) continue;
      const std::size_t p = plan.position(i);
      if (p > best_pos) {
        best_pos = p;
        nc.dominant = i;
      }
    }
    if (nc.dominant) {
      const NeuronSign expected =
          first.weight(n, *nc.dominant).sign() < 0 ? NeuronSign::kAlwaysPositive : NeuronSign::kAlwaysNegative;
      nc.matches_dominance = nc.sign == expected;
    }
    cert.neurons.push_back(std::move(nc));
  }
  return cert;
}

/// Partial evaluation: assigned coordinates are folded into the first map's
/// biases; the result takes the clique coordinates in original order.
inline ReluNetwork restrict_inputs(const ReluNetwork& net, const AssignmentPlan& plan) {
  if (plan.input_dim != net.input_dim()) throw InvalidInput("restrict_inputs: plan does not match network");
  const AffineMap& first = net.first_map();
  Matrix w;
  Vec b = first.biases();
  for (std::size_t n = 0; n < first.out_dim(); ++n) {
    Vec row;
    for (std::size_t i : plan.clique) row.push_back(first.weight(n, i));
    for (std::size_t i = 0; i < plan.input_dim; ++i)
      if (!plan.in_clique(i)) b[n] += first.weight(n, i) * *plan.values[i];
    w.push_back(std::move(row));
  }
  AffineMap restricted(plan.r(), std::move(w), std::move(b));
  std::vector<AffineMap> hidden = net.hidden();
  AffineMap output = net.output();
  if (hidden.empty())
    output = std::move(restricted);
  else
    hidden.front() = std::move(restricted);
  return ReluNetwork(plan.r(), std::move(hidden), std::move(output));
}

/// Removes the first hidden layer of a network whose first-layer neurons
/// all keep a fixed sign: always-negative neurons are zeroed, the rest are
/// linear and composed into the second hidden layer. Depth drops by one.
inline ReluNetwork collapse_first_layer(const ReluNetwork& net, const SignCertificate& cert) {
  if (net.depth() < 3) throw PreconditionFailed("collapse_first_layer: depth must be at least 3");
  const AffineMap& first = net.hidden(0);
  if (cert.neurons.size() != first.out_dim())
    throw InvalidInput("collapse_first_layer: certificate does not match the first layer");
  if (auto n = cert.first_not_fixed())
    throw PreconditionFailed("collapse_first_layer: neuron " + std::to_string(*n) + " is not fixed", *n);

  Matrix w = first.weights();
  Vec b = first.biases();
  for (std::size_t n = 0; n < first.out_dim(); ++n)
    if (cert.neurons[n].sign == NeuronSign::kAlwaysNegative) {
      std::fill(w[n].begin(), w[n].end(), Rational());
      b[n] = Rational();
    }
  const AffineMap linear(first.in_dim(), std::move(w), std::move(b));
  std::vector<AffineMap> hidden(net.hidden().begin() + 1, net.hidden().end());
  hidden.front() = hidden.front().compose(linear);
  return ReluNetwork(net.input_dim(), std::move(hidden), net.output());
}

}  // namespace relumax::transforms
