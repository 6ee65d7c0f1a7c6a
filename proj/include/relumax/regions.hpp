#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "relumax/lp.hpp"
#include "relumax/network.hpp"

namespace relumax::verify {

/// coeffs . x + constant
struct AffineForm {
  Vec coeffs;
  Rational constant;

  Rational at(const Vec& x) const { return dot(coeffs, x) + constant; }
  bool is_constant() const {
    for (const auto& c : coeffs)
      if (!c.is_zero()) return false;
    return true;
  }
  AffineForm operator-(const AffineForm& o) const {
    AffineForm out{coeffs, constant - o.constant};
    for (std::size_t i = 0; i < coeffs.size(); ++i) out.coeffs[i] -= o.coeffs[i];
    return out;
  }
  AffineForm negated() const {
    AffineForm out{coeffs, -constant};
    for (auto& c : out.coeffs) c = -c;
    return out;
  }
  friend bool operator==(const AffineForm&, const AffineForm&) = default;
};

/// One activation pattern with a full-dimensional region inside a box.
struct LinearRegion {
  std::vector<std::vector<bool>> pattern;  // [layer][neuron] active?
  LinearSystem system;                     // strict rows; its solution set is the region interior
  Vec witness;                             // interior point of region and box
  AffineForm restriction;                  // the network on this region
};

struct EnumerationSummary {
  std::size_t regions = 0;
  bool budget_exceeded = false;
  bool stopped = false;  // visitor asked to stop
};

inline constexpr std::size_t kDefaultBudget = 1'000'000;

namespace detail {

inline bool strictly_positive_at(const AffineForm& g, const Vec& x) { return g.at(x).sign() > 0; }

struct RegionSearch {
  const ReluNetwork& net;
  const Box& box;
  std::size_t budget;
  const std::function<bool(const LinearRegion&)>& visit;
  EnumerationSummary summary;

  // Returns false to abort the whole search.
  bool layer(std::size_t l, const std::vector<AffineForm>& inputs, LinearSystem& sys, const Vec& witness,
             std::vector<std::vector<bool>>& pattern) {
    if (l == net.hidden().size()) return emit(inputs, sys, witness, pattern);
    const AffineMap& map = net.hidden(l);
    std::vector<AffineForm> pre(map.out_dim());
    for (std::size_t j = 0; j < map.out_dim(); ++j) {
      pre[j].coeffs.assign(net.input_dim(), Rational());
      pre[j].constant = map.bias(j);
      for (std::size_t k = 0; k < map.in_dim(); ++k) {
        const Rational& w = map.weight(j, k);
        if (w.is_zero()) continue;
        for (std::size_t i = 0; i < net.input_dim(); ++i)
          if (!inputs[k].coeffs[i].is_zero()) pre[j].coeffs[i] += w * inputs[k].coeffs[i];
        pre[j].constant += w * inputs[k].constant;
      }
    }
    pattern.emplace_back();
    std::vector<AffineForm> out;
    const bool go = neuron(l, 0, pre, out, sys, witness, pattern);
    pattern.pop_back();
    return go;
  }

  bool neuron(std::size_t l, std::size_t j, const std::vector<AffineForm>& pre, std::vector<AffineForm>& out,
              LinearSystem& sys, const Vec& witness, std::vector<std::vector<bool>>& pattern) {
    if (j == pre.size()) return layer(l + 1, out, sys, witness, pattern);
    const AffineForm& g = pre[j];
    const AffineForm zero{Vec(net.input_dim()), Rational()};

    if (g.is_constant()) {
      const bool active = g.constant.sign() > 0;
      pattern.back().push_back(active);
      out.push_back(active ? g : zero);
      const bool go = neuron(l, j + 1, pre, out, sys, witness, pattern);
      out.pop_back();
      pattern.back().pop_back();
      return go;
    }

    for (const bool active : {true, false}) {
      const AffineForm side = active ? g : g.negated();
      sys.add(side.coeffs, side.constant, Relation::kGt);
      std::optional<Vec> w;
      if (strictly_positive_at(side, witness))
        w = witness;
      else
        w = feasible(sys, box, /*open_box=*/true);
      bool go = true;
      if (w) {
        pattern.back().push_back(active);
        out.push_back(active ? g : zero);
        go = neuron(l, j + 1, pre, out, sys, *w, pattern);
        out.pop_back();
        pattern.back().pop_back();
      }
      sys.pop_back();
      if (!go) return false;
    }
    return true;
  }

  bool emit(const std::vector<AffineForm>& inputs, const LinearSystem& sys, const Vec& witness,
            const std::vector<std::vector<bool>>& pattern) {
    if (summary.regions >= budget) {
      summary.budget_exceeded = true;
      return false;
    }
    ++summary.regions;
    const AffineMap& o = net.output();
    AffineForm f{Vec(net.input_dim()), o.bias(0)};
    for (std::size_t k = 0; k < o.in_dim(); ++k) {
      const Rational& w = o.weight(0, k);
      if (w.is_zero()) continue;
      for (std::size_t i = 0; i < net.input_dim(); ++i) f.coeffs[i] += w * inputs[k].coeffs[i];
      f.constant += w * inputs[k].constant;
    }
    LinearRegion region{pattern, sys, witness, std::move(f)};
    if (!visit(region)) {
      summary.stopped = true;
      return false;
    }
    return true;
  }
};

}  // namespace detail

/// Depth-first enumeration of activation patterns whose region has
/// nonempty interior inside `box` (and inside `base`, whose rows are kept
/// as given). Neurons are branched active-before-inactive in layer order,
/// so the visiting order is canonical. A neuron whose pre-activation is
/// constant on the region is not branched (zero counts as inactive).
/// Stops with `budget_exceeded` instead of visiting more than `budget`
/// regions.
inline EnumerationSummary enumerate_regions(const ReluNetwork& net, const Box& box, std::size_t budget,
                                            const std::function<bool(const LinearRegion&)>& visit,
                                            const LinearSystem* base = nullptr) {
  if (box.dim() != net.input_dim()) throw InvalidInput("enumerate_regions: box dimension differs from network");
  LinearSystem sys = base ? *base : LinearSystem(net.input_dim());
  detail::RegionSearch search{net, box, budget, visit, {}};
  const auto start = feasible(sys, box, /*open_box=*/true);
  if (!start) return search.summary;

  std::vector<AffineForm> inputs(net.input_dim());
  for (std::size_t i = 0; i < net.input_dim(); ++i) {
    inputs[i].coeffs.assign(net.input_dim(), Rational());
    inputs[i].coeffs[i] = 1;
  }
  std::vector<std::vector<bool>> pattern;
  search.layer(0, inputs, sys, *start, pattern);
  return search.summary;
}

/// Collecting form; `exceeded` reports whether the budget stopped it.
inline std::vector<LinearRegion> collect_regions(const ReluNetwork& net, const Box& box,
                                                 std::size_t budget = kDefaultBudget,
                                                 bool* exceeded = nullptr) {
  std::vector<LinearRegion> out;
  const auto summary = enumerate_regions(net, box, budget, [&](const LinearRegion& r) {
    out.push_back(r);
    return true;
  });
  if (exceeded) *exceeded = summary.budget_exceeded;
  return out;
}

}  // namespace relumax::verify
