#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "relumax/lp.hpp"
#include "relumax/network.hpp"
#include "relumax/random.hpp"
#include "relumax/regions.hpp"

namespace relumax::verify {

struct VerificationVerdict {
  enum class Kind { kEqual, kCounterexample, kBudgetExceeded };

  Kind kind = Kind::kEqual;
  Vec point;               // counterexample only
  Rational net_value;      // counterexample only
  Rational target_value;   // counterexample only
  std::size_t regions_visited = 0;

  bool equal() const { return kind == Kind::kEqual; }
  bool counterexample() const { return kind == Kind::kCounterexample; }
  bool budget_exceeded() const { return kind == Kind::kBudgetExceeded; }
};

inline const char* to_string(VerificationVerdict::Kind k) {
  switch (k) {
    case VerificationVerdict::Kind::kEqual: return "equal";
    case VerificationVerdict::Kind::kCounterexample: return "counterexample";
    case VerificationVerdict::Kind::kBudgetExceeded: return "budget-exceeded";
  }
  return "?";
}

namespace detail {

/// Interior point of `sys` (within the open box) where `lhs` and `rhs`
/// differ. They are distinct affine forms, so their agreement set is a
/// hyperplane and one of the two open sides meets any full-dimensional set.
inline std::optional<Vec> separating_point(LinearSystem sys, const Box& box, const AffineForm& lhs,
                                           const AffineForm& rhs) {
  const AffineForm diff = lhs - rhs;
  if (diff.is_constant()) return feasible(sys, box, true);
  for (const AffineForm& side : {diff, diff.negated()}) {
    sys.add(side.coeffs, side.constant, Relation::kGt);
    if (auto p = feasible(sys, box, true)) return p;
    sys.pop_back();
  }
  return std::nullopt;
}

inline AffineForm coordinate(std::size_t dim, std::size_t i) {
  AffineForm f{Vec(dim), Rational()};
  f.coeffs[i] = 1;
  return f;
}

}  // namespace detail

/// Decides net(x) == max_i x_i on `box`. Each full-dimensional region is
/// split by which coordinate is largest; on every full-dimensional piece the
/// region's affine restriction is compared with the coordinate projection.
/// Lower-dimensional pieces are skipped: both sides are continuous.
inline VerificationVerdict equals_max_on_box(const ReluNetwork& net, const Box& box,
                                             std::size_t budget = kDefaultBudget) {
  if (box.dim() != net.input_dim()) throw InvalidInput("equals_max_on_box: box dimension differs from network");
  const std::size_t d = net.input_dim();
  VerificationVerdict verdict;
  const auto summary = enumerate_regions(net, box, budget, [&](const LinearRegion& region) {
    for (std::size_t i = 0; i < d; ++i) {
      const AffineForm target = detail::coordinate(d, i);
      LinearSystem piece = region.system;
      for (std::size_t j = 0; j < d; ++j) {
        if (j == i) continue;
        Vec c(d);
        c[i] = 1;
        c[j] = -1;
        piece.add(std::move(c), Rational(), Relation::kGt);
      }
      const bool witness_inside = piece.satisfied_by(region.witness);
      if (region.restriction == target) continue;
      if (!witness_inside && !feasible(piece, box, true)) continue;
      auto p = detail::separating_point(piece, box, region.restriction, target);
      if (!p) continue;  // unreachable for a full-dimensional piece
      verdict.kind = VerificationVerdict::Kind::kCounterexample;
      verdict.point = *p;
      verdict.net_value = eval(net, *p);
      verdict.target_value = max_of(*p);
      return false;
    }
    return true;
  });
  verdict.regions_visited = summary.regions;
  if (summary.budget_exceeded) verdict.kind = VerificationVerdict::Kind::kBudgetExceeded;
  return verdict;
}

/// Decides a(x) == b(x) on `box` by enumerating the regions of `b` inside
/// each region of `a`. In a counterexample, net_value is a(x) and
/// target_value is b(x).
inline VerificationVerdict equals_network_on_box(const ReluNetwork& a, const ReluNetwork& b, const Box& box,
                                                 std::size_t budget = kDefaultBudget) {
  if (a.input_dim() != b.input_dim() || box.dim() != a.input_dim())
    throw InvalidInput("equals_network_on_box: input dimensions differ");
  VerificationVerdict verdict;
  std::size_t joint = 0;
  bool exceeded = false;
  enumerate_regions(a, box, budget, [&](const LinearRegion& ra) {
    const auto inner = enumerate_regions(
        b, box, budget - joint,
        [&](const LinearRegion& rb) {
          if (ra.restriction == rb.restriction) return true;
          auto p = detail::separating_point(rb.system, box, ra.restriction, rb.restriction);
          if (!p) return true;
          verdict.kind = VerificationVerdict::Kind::kCounterexample;
          verdict.point = *p;
          verdict.net_value = eval(a, *p);
          verdict.target_value = eval(b, *p);
          return false;
        },
        &ra.system);
    joint += inner.regions;
    if (inner.budget_exceeded) exceeded = true;
    return !inner.stopped && !inner.budget_exceeded;
  });
  verdict.regions_visited = joint;
  if (exceeded && !verdict.counterexample()) verdict.kind = VerificationVerdict::Kind::kBudgetExceeded;
  return verdict;
}

/// Sampling check against Max_d on seeded grid points of the box (each
/// coordinate lo + (hi-lo) k/1000). Equal means no sampled mismatch.
inline VerificationVerdict sample_max_on_box(const ReluNetwork& net, const Box& box, std::size_t samples,
                                             std::uint64_t seed) {
  if (box.dim() != net.input_dim()) throw InvalidInput("sample_max_on_box: box dimension differs from network");
  Rng rng(seed);
  VerificationVerdict verdict;
  for (std::size_t s = 0; s < samples; ++s) {
    Vec x(box.dim());
    for (std::size_t i = 0; i < box.dim(); ++i) {
      const auto& side = box.side(i);
      x[i] = side.lo + (side.hi - side.lo) * Rational(rng.between(0, 1000), 1000);
    }
    const Rational got = eval(net, x);
    const Rational want = max_of(x);
    if (got != want) {
      verdict.kind = VerificationVerdict::Kind::kCounterexample;
      verdict.point = std::move(x);
      verdict.net_value = got;
      verdict.target_value = want;
      return verdict;
    }
  }
  return verdict;
}

struct HomogeneityResult {
  bool ok = true;
  std::optional<std::pair<Rational, Vec>> violation;  // (c, x)
};

/// Tests net(c x) == c net(x) on seeded pairs: c in {1..20}/{1..8},
/// x in [-10,10]^d on a grid of step 1/16.
inline HomogeneityResult homogeneity_check(const ReluNetwork& net, std::size_t samples, std::uint64_t seed) {
  Rng rng(seed);
  HomogeneityResult res;
  for (std::size_t s = 0; s < samples; ++s) {
    const Rational c(rng.between(1, 20), rng.between(1, 8));
    Vec x(net.input_dim());
    for (auto& v : x) v = rng.grid(-160, 160, 16);
    Vec cx = x;
    for (auto& v : cx) v *= c;
    if (eval(net, cx) != c * eval(net, x)) {
      res.ok = false;
      res.violation = std::make_pair(c, std::move(x));
      return res;
    }
  }
  return res;
}

/// Continuous piecewise-linear function on [lo, hi], stored as its values at
/// sorted knots (always including both endpoints).
class PiecewiseLinear1D {
 public:
  PiecewiseLinear1D(std::vector<Rational> knots, std::vector<Rational> values)
      : knots_(std::move(knots)), values_(std::move(values)) {}

  static PiecewiseLinear1D affine(const Rational& lo, const Rational& hi, const Rational& slope,
                                  const Rational& intercept) {
    return PiecewiseLinear1D({lo, hi}, {slope * lo + intercept, slope * hi + intercept});
  }

  const std::vector<Rational>& knots() const { return knots_; }
  const std::vector<Rational>& values() const { return values_; }

  Rational at(const Rational& t) const {
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    std::size_t k = static_cast<std::size_t>(it - knots_.begin());
    if (k == 0) k = 1;
    if (k == knots_.size()) k = knots_.size() - 1;
    const Rational& t0 = knots_[k - 1];
    const Rational& t1 = knots_[k];
    return values_[k - 1] + (values_[k] - values_[k - 1]) * (t - t0) / (t1 - t0);
  }

  /// sum_i w_i f_i + b over a common interval.
  static PiecewiseLinear1D combine(const std::vector<PiecewiseLinear1D>& fs, const Vec& w, const Rational& b,
                                   const Rational& lo, const Rational& hi) {
    std::vector<Rational> knots{lo, hi};
    for (std::size_t i = 0; i < fs.size(); ++i)
      if (!w[i].is_zero()) knots.insert(knots.end(), fs[i].knots_.begin(), fs[i].knots_.end());
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    std::vector<Rational> values;
    values.reserve(knots.size());
    for (const auto& t : knots) {
      Rational v = b;
      for (std::size_t i = 0; i < fs.size(); ++i)
        if (!w[i].is_zero()) v += w[i] * fs[i].at(t);
      values.push_back(std::move(v));
    }
    return PiecewiseLinear1D(std::move(knots), std::move(values));
  }

  /// max(0, f), inserting the zero crossings as knots.
  PiecewiseLinear1D relu() const {
    std::vector<Rational> knots{knots_.front()};
    std::vector<Rational> values{relumax::relu(values_.front())};
    for (std::size_t k = 1; k < knots_.size(); ++k) {
      const Rational& v0 = values_[k - 1];
      const Rational& v1 = values_[k];
      if (v0.sign() * v1.sign() < 0) {
        knots.push_back(knots_[k - 1] + (knots_[k] - knots_[k - 1]) * v0 / (v0 - v1));
        values.push_back(Rational());
      }
      knots.push_back(knots_[k]);
      values.push_back(relumax::relu(v1));
    }
    return PiecewiseLinear1D(std::move(knots), std::move(values));
  }

 private:
  std::vector<Rational> knots_;
  std::vector<Rational> values_;
};

/// t -> net(point + t direction) for t in [lo, hi], exactly. Knots are a
/// superset of the true breakpoints (every neuron's kinks are kept).
inline PiecewiseLinear1D line_restriction(const ReluNetwork& net, const Vec& point, const Vec& direction,
                                          const Rational& lo, const Rational& hi) {
  if (point.size() != net.input_dim() || direction.size() != net.input_dim())
    throw InvalidInput("line_restriction: dimension mismatch");
  std::vector<PiecewiseLinear1D> h;
  for (std::size_t i = 0; i < net.input_dim(); ++i)
    h.push_back(PiecewiseLinear1D::affine(lo, hi, direction[i], point[i]));
  for (const auto& layer : net.hidden()) {
    std::vector<PiecewiseLinear1D> next;
    for (std::size_t j = 0; j < layer.out_dim(); ++j)
      next.push_back(PiecewiseLinear1D::combine(h, layer.row(j), layer.bias(j), lo, hi).relu());
    h = std::move(next);
  }
  return PiecewiseLinear1D::combine(h, net.output().row(0), net.output().bias(0), lo, hi);
}

struct ProbeResult {
  bool nondifferentiable = false;
  Rational step;        // the t used
  Rational left_slope;  // (f(p) - f(p - t u)) / t
  Rational right_slope; // (f(p + t u) - f(p)) / t
};

/// One-sided directional derivatives of the network at `point` along
/// `direction`. t is half the distance from 0 to the nearest breakpoint of
/// the line restriction on [-1, 1], so both one-sided quotients are exact.
inline ProbeResult directional_probe(const ReluNetwork& net, const Vec& point, const Vec& direction) {
  if (std::all_of(direction.begin(), direction.end(), [](const Rational& v) { return v.is_zero(); }))
    throw InvalidInput("directional_probe: direction must be nonzero");
  const auto line = line_restriction(net, point, direction, Rational(-1), Rational(1));
  Rational nearest(1);
  for (const auto& t : line.knots())
    if (!t.is_zero() && t.abs() < nearest) nearest = t.abs();
  ProbeResult res;
  res.step = nearest / Rational(2);
  Vec fwd = point, back = point;
  for (std::size_t i = 0; i < point.size(); ++i) {
    fwd[i] += res.step * direction[i];
    back[i] -= res.step * direction[i];
  }
  const Rational here = eval(net, point);
  res.right_slope = (eval(net, fwd) - here) / res.step;
  res.left_slope = (here - eval(net, back)) / res.step;
  res.nondifferentiable = res.left_slope != res.right_slope;
  return res;
}

inline bool directional_nondiff_probe(const ReluNetwork& net, const Vec& point, const Vec& direction) {
  return directional_probe(net, point, direction).nondifferentiable;
}

}  // namespace relumax::verify
