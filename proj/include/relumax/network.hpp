#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "relumax/errors.hpp"
#include "relumax/rational.hpp"

namespace relumax {

using Vec = std::vector<Rational>;
using Matrix = std::vector<Vec>;

inline Rational dot(const Vec& a, const Vec& b) {
  Rational s;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// x -> weights * x + biases. Rows are output neurons.
class AffineMap {
 public:
  AffineMap() = default;

  AffineMap(std::size_t in_dim, Matrix weights, Vec biases)
      : in_dim_(in_dim), weights_(std::move(weights)), biases_(std::move(biases)) {
    if (weights_.size() != biases_.size())
      throw InvalidInput("affine map: " + std::to_string(weights_.size()) + " weight rows but " +
                         std::to_string(biases_.size()) + " biases");
    for (std::size_t r = 0; r < weights_.size(); ++r)
      if (weights_[r].size() != in_dim_)
        throw InvalidInput("affine map: row " + std::to_string(r) + " has length " +
                           std::to_string(weights_[r].size()) + ", expected " +
                           std::to_string(in_dim_));
  }

  /// Infers the input dimension from the first row; requires at least one row.
  AffineMap(Matrix weights, Vec biases)
      : AffineMap(weights.empty() ? 0 : weights.front().size(), std::move(weights),
                  std::move(biases)) {}

  static AffineMap zero(std::size_t in_dim, std::size_t out_dim) {
    return AffineMap(in_dim, Matrix(out_dim, Vec(in_dim)), Vec(out_dim));
  }

  std::size_t in_dim() const { return in_dim_; }
  std::size_t out_dim() const { return weights_.size(); }
  const Matrix& weights() const { return weights_; }
  const Vec& biases() const { return biases_; }
  const Vec& row(std::size_t i) const { return weights_[i]; }
  const Rational& weight(std::size_t i, std::size_t j) const { return weights_[i][j]; }
  const Rational& bias(std::size_t i) const { return biases_[i]; }

  Vec apply(const Vec& x) const {
    Vec y(out_dim());
    for (std::size_t i = 0; i < out_dim(); ++i) y[i] = dot(weights_[i], x) + biases_[i];
    return y;
  }

  /// this ∘ inner, i.e. x -> this(inner(x)).
  AffineMap compose(const AffineMap& inner) const {
    if (inner.out_dim() != in_dim_) throw InvalidInput("affine compose: dimension mismatch");
    Matrix w(out_dim(), Vec(inner.in_dim()));
    Vec b(out_dim());
    for (std::size_t i = 0; i < out_dim(); ++i) {
      b[i] = biases_[i];
      for (std::size_t k = 0; k < in_dim_; ++k) {
        const Rational& c = weights_[i][k];
        if (c.is_zero()) continue;
        for (std::size_t j = 0; j < inner.in_dim(); ++j) w[i][j] += c * inner.weight(k, j);
        b[i] += c * inner.bias(k);
      }
    }
    return AffineMap(inner.in_dim(), std::move(w), std::move(b));
  }

  friend bool operator==(const AffineMap&, const AffineMap&) = default;

 private:
  std::size_t in_dim_ = 0;
  Matrix weights_;
  Vec biases_;
};

/// Metrics and structural check of a network (or of raw layers that may not
/// yet form one).
struct ValidationReport {
  bool ok = false;
  std::size_t depth = 0;
  std::size_t width = 0;
  std::size_t size = 0;
  std::vector<std::string> problems;
};

inline ValidationReport validate_layers(std::size_t input_dim, const std::vector<AffineMap>& hidden,
                                        const AffineMap& output) {
  ValidationReport rep;
  if (input_dim == 0) rep.problems.push_back("input_dim must be positive");
  std::size_t expected = input_dim;
  for (std::size_t l = 0; l < hidden.size(); ++l) {
    if (hidden[l].in_dim() != expected)
      rep.problems.push_back("hidden layer " + std::to_string(l) + " expects input dim " +
                             std::to_string(hidden[l].in_dim()) + ", previous provides " +
                             std::to_string(expected));
    if (hidden[l].out_dim() == 0)
      rep.problems.push_back("hidden layer " + std::to_string(l) + " has no neurons");
    expected = hidden[l].out_dim();
    rep.width = std::max(rep.width, hidden[l].out_dim());
    rep.size += hidden[l].out_dim();
  }
  if (output.in_dim() != expected)
    rep.problems.push_back("output map expects input dim " + std::to_string(output.in_dim()) +
                           ", previous provides " + std::to_string(expected));
  if (output.out_dim() != 1)
    rep.problems.push_back("output map must have exactly one output, has " +
                           std::to_string(output.out_dim()));
  rep.size += output.out_dim();
  rep.depth = hidden.size() + 1;
  rep.ok = rep.problems.empty();
  return rep;
}

/// Fully connected ReLU network R^d -> R: ReLU after every hidden map,
/// affine output. Immutable once built.
class ReluNetwork {
 public:
  ReluNetwork(std::size_t input_dim, std::vector<AffineMap> hidden, AffineMap output)
      : input_dim_(input_dim), hidden_(std::move(hidden)), output_(std::move(output)) {
    const auto rep = validate_layers(input_dim_, hidden_, output_);
    if (!rep.ok) throw InvalidInput("invalid network: " + rep.problems.front());
  }

  std::size_t input_dim() const { return input_dim_; }
  const std::vector<AffineMap>& hidden() const { return hidden_; }
  const AffineMap& hidden(std::size_t l) const { return hidden_[l]; }
  const AffineMap& output() const { return output_; }

  /// Hidden layers plus one.
  std::size_t depth() const { return hidden_.size() + 1; }
  /// Neurons in the largest hidden layer (0 for depth 1).
  std::size_t width() const {
    std::size_t w = 0;
    for (const auto& h : hidden_) w = std::max(w, h.out_dim());
    return w;
  }
  /// All hidden neurons plus the output neuron.
  std::size_t size() const {
    std::size_t s = output_.out_dim();
    for (const auto& h : hidden_) s += h.out_dim();
    return s;
  }

  /// The map applied to the raw input: hidden(0), or the output map for depth 1.
  const AffineMap& first_map() const { return hidden_.empty() ? output_ : hidden_.front(); }

  friend bool operator==(const ReluNetwork&, const ReluNetwork&) = default;

 private:
  std::size_t input_dim_;
  std::vector<AffineMap> hidden_;
  AffineMap output_;
};

inline ValidationReport validate(const ReluNetwork& net) {
  return validate_layers(net.input_dim(), net.hidden(), net.output());
}

inline Rational eval(const ReluNetwork& net, const Vec& x) {
  if (x.size() != net.input_dim())
    throw InvalidInput("eval: input has " + std::to_string(x.size()) + " coordinates, network expects " +
                       std::to_string(net.input_dim()));
  Vec h = x;
  for (const auto& layer : net.hidden()) {
    h = layer.apply(h);
    for (auto& v : h) v = relu(v);
  }
  return net.output().apply(h).front();
}

inline Rational max_of(const Vec& x) { return *std::max_element(x.begin(), x.end()); }

struct Interval {
  Rational lo;
  Rational hi;
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Axis-aligned closed box with rational endpoints.
class Box {
 public:
  explicit Box(std::vector<Interval> sides) : sides_(std::move(sides)) {
    if (sides_.empty()) throw InvalidInput("box must have at least one coordinate");
    for (std::size_t i = 0; i < sides_.size(); ++i)
      if (sides_[i].lo > sides_[i].hi)
        throw InvalidInput("box side " + std::to_string(i) + " is empty");
  }

  static Box uniform(std::size_t dim, const Rational& lo, const Rational& hi) {
    return Box(std::vector<Interval>(dim, Interval{lo, hi}));
  }
  static Box unit(std::size_t dim) { return uniform(dim, Rational(0), Rational(1)); }

  /// "unit" (needs `dim`), "lo,hi" (broadcast to `dim`), or "lo,hi;lo,hi;...".
  static Box parse(const std::string& text, std::size_t dim);

  std::size_t dim() const { return sides_.size(); }
  const Interval& side(std::size_t i) const { return sides_[i]; }
  const std::vector<Interval>& sides() const { return sides_; }

  bool contains(const Vec& x) const {
    if (x.size() != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i)
      if (x[i] < sides_[i].lo || x[i] > sides_[i].hi) return false;
    return true;
  }

  /// All sides equal, i.e. the box is [a,b]^d.
  bool is_cube() const {
    return std::all_of(sides_.begin(), sides_.end(),
                       [&](const Interval& s) { return s == sides_.front(); });
  }

  std::string str() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < dim(); ++i)
      os << (i ? ";" : "") << sides_[i].lo << "," << sides_[i].hi;
    return os.str();
  }

  friend bool operator==(const Box&, const Box&) = default;

 private:
  std::vector<Interval> sides_;
};

inline Box Box::parse(const std::string& text, std::size_t dim) {
  if (text == "unit") {
    if (dim == 0) throw InvalidInput("box \"unit\" needs a positive dimension");
    return unit(dim);
  }
  std::vector<Interval> sides;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) {
    const auto comma = part.find(',');
    if (comma == std::string::npos) throw InvalidInput("box side \"" + part + "\" is not lo,hi");
    sides.push_back({Rational::parse(part.substr(0, comma)), Rational::parse(part.substr(comma + 1))});
  }
  if (sides.size() == 1 && dim > 1) sides.assign(dim, sides.front());
  if (dim != 0 && sides.size() != dim)
    throw InvalidInput("box has " + std::to_string(sides.size()) + " sides, expected " +
                       std::to_string(dim));
  return Box(std::move(sides));
}

}  // namespace relumax
