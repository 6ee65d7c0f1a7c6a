#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "relumax/network.hpp"

namespace relumax::transforms {

using Edge = std::pair<std::size_t, std::size_t>;  // i < j, 0-based

/// Fixed-size vertex set.
class VertexSet {
 public:
  explicit VertexSet(std::size_t n = 0) : n_(n), words_((n + 63) / 64) {}

  static VertexSet full(std::size_t n) {
    VertexSet s(n);
    for (std::size_t i = 0; i < n; ++i) s.insert(i);
    return s;
  }

  void insert(std::size_t i) { words_[i / 64] |= (std::uint64_t{1} << (i % 64)); }
  void erase(std::size_t i) { words_[i / 64] &= ~(std::uint64_t{1} << (i % 64)); }
  bool contains(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool empty() const {
    return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
  }

  VertexSet operator&(const VertexSet& o) const {
    VertexSet out(n_);
    for (std::size_t k = 0; k < words_.size(); ++k) out.words_[k] = words_[k] & o.words_[k];
    return out;
  }

  /// Members in increasing order.
  std::vector<std::size_t> members() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < words_.size(); ++k) {
      std::uint64_t w = words_[k];
      while (w) {
        out.push_back(k * 64 + static_cast<std::size_t>(std::countr_zero(w)));
        w &= w - 1;
      }
    }
    return out;
  }

  /// Drop every member below `i`.
  void erase_below(std::size_t i) {
    for (std::size_t k = 0; k < words_.size() && k * 64 < i; ++k) {
      if ((k + 1) * 64 <= i)
        words_[k] = 0;
      else
        words_[k] &= ~((std::uint64_t{1} << (i % 64)) - 1);
    }
  }

 private:
  std::size_t n_;
  std::vector<std::uint64_t> words_;
};

/// What a first-layer neuron did to K_d.
struct RemovalEntry {
  enum class Kind { kRemoved, kAlreadyRemoved, kFewerThanTwoNonzeros };
  std::size_t neuron = 0;
  Kind kind = Kind::kRemoved;
  std::optional<Edge> edge;  // the edge of its two smallest nonzero indices, if any
};

class WeightGraph {
 public:
  explicit WeightGraph(std::size_t d) : d_(d), adj_(d, VertexSet(d)) {}

  static WeightGraph complete(std::size_t d) {
    WeightGraph g(d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j) g.add_edge(i, j);
    return g;
  }

  static WeightGraph from_edges(std::size_t d, const std::vector<Edge>& edges) {
    WeightGraph g(d);
    for (const auto& [i, j] : edges) g.add_edge(i, j);
    return g;
  }

  std::size_t vertex_count() const { return d_; }

  bool has_edge(std::size_t i, std::size_t j) const { return i != j && adj_[i].contains(j); }
  void add_edge(std::size_t i, std::size_t j) {
    if (i == j || i >= d_ || j >= d_) throw InvalidInput("graph: bad edge");
    adj_[i].insert(j);
    adj_[j].insert(i);
  }
  bool remove_edge(std::size_t i, std::size_t j) {
    if (!has_edge(i, j)) return false;
    adj_[i].erase(j);
    adj_[j].erase(i);
    return true;
  }

  const VertexSet& neighbours(std::size_t i) const { return adj_[i]; }

  std::size_t edge_count() const {
    std::size_t c = 0;
    for (const auto& a : adj_) c += a.count();
    return c / 2;
  }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (std::size_t i = 0; i < d_; ++i)
      for (std::size_t j : adj_[i].members())
        if (i < j) out.emplace_back(i, j);
    return out;
  }

  bool is_clique(const std::vector<std::size_t>& vs) const {
    for (std::size_t a = 0; a < vs.size(); ++a)
      for (std::size_t b = a + 1; b < vs.size(); ++b)
        if (!has_edge(vs[a], vs[b])) return false;
    return true;
  }

  /// Copy with every edge at the given vertices deleted.
  WeightGraph isolating(const std::vector<std::size_t>& vertices) const {
    WeightGraph g = *this;
    for (std::size_t v : vertices)
      for (std::size_t u : g.adj_[v].members()) g.remove_edge(u, v);
    return g;
  }

  const std::vector<RemovalEntry>& removal_log() const { return log_; }
  void log(RemovalEntry e) { log_.push_back(std::move(e)); }

  /// Edges actually deleted, in neuron order.
  std::vector<Edge> removed_edges() const {
    std::vector<Edge> out;
    for (const auto& e : log_)
      if (e.kind == RemovalEntry::Kind::kRemoved) out.push_back(*e.edge);
    return out;
  }

 private:
  std::size_t d_;
  std::vector<VertexSet> adj_;
  std::vector<RemovalEntry> log_;
};

inline std::vector<std::size_t> nonzero_indices(const Vec& row) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < row.size(); ++i)
    if (!row[i].is_zero()) out.push_back(i);
  return out;
}

/// K_d minus, for each first-layer neuron with at least two nonzero
/// weights, the edge joining its two smallest nonzero coordinates. A neuron
/// whose edge is already gone logs kAlreadyRemoved (lowest index wins).
inline WeightGraph first_layer_graph(const ReluNetwork& net) {
  WeightGraph g = WeightGraph::complete(net.input_dim());
  if (net.hidden().empty()) return g;
  const AffineMap& first = net.hidden(0);
  for (std::size_t n = 0; n < first.out_dim(); ++n) {
    const auto nz = nonzero_indices(first.row(n));
    if (nz.size() < 2) {
      g.log({n, RemovalEntry::Kind::kFewerThanTwoNonzeros, std::nullopt});
      continue;
    }
    const Edge e{nz[0], nz[1]};
    const bool removed = g.remove_edge(e.first, e.second);
    g.log({n, removed ? RemovalEntry::Kind::kRemoved : RemovalEntry::Kind::kAlreadyRemoved, e});
  }
  return g;
}

namespace detail {

/// Greedy colouring of `cand`; the number of colours bounds its clique number.
inline std::size_t colour_bound(const WeightGraph& g, const VertexSet& cand) {
  std::vector<std::size_t> verts = cand.members();
  std::vector<std::vector<std::size_t>> classes;
  for (std::size_t v : verts) {
    bool placed = false;
    for (auto& cls : classes) {
      if (std::none_of(cls.begin(), cls.end(), [&](std::size_t u) { return g.has_edge(u, v); })) {
        cls.push_back(v);
        placed = true;
        break;
      }
    }
    if (!placed) classes.push_back({v});
  }
  return classes.size();
}

// Extends `current` by vertices from `cand` (all larger than current's last)
// in increasing order; the first clique reaching `target` is lexicographically least.
inline bool extend(const WeightGraph& g, std::vector<std::size_t>& current, const VertexSet& cand,
                   std::size_t target) {
  if (current.size() == target) return true;
  const std::size_t need = target - current.size();
  if (cand.count() < need) return false;
  if (need > 1 && colour_bound(g, cand) < need) return false;
  for (std::size_t v : cand.members()) {
    VertexSet next = cand & g.neighbours(v);
    next.erase_below(v + 1);
    current.push_back(v);
    if (extend(g, current, next, target)) return true;
    current.pop_back();
  }
  return false;
}

inline void grow_max(const WeightGraph& g, std::size_t size, const VertexSet& cand, std::size_t& best) {
  if (size > best) best = size;
  if (cand.empty() || size + cand.count() <= best) return;
  if (size + colour_bound(g, cand) <= best) return;
  for (std::size_t v : cand.members()) {
    VertexSet next = cand & g.neighbours(v);
    next.erase_below(v + 1);
    grow_max(g, size + 1, next, best);
  }
}

}  // namespace detail

/// Lexicographically least clique of exactly r vertices (sorted, 0-based),
/// or nullopt when none exists. Exhaustive with colouring bounds.
inline std::optional<std::vector<std::size_t>> find_clique(const WeightGraph& g, std::size_t r) {
  if (r == 0) throw InvalidInput("find_clique: r must be at least 1");
  if (r > g.vertex_count()) return std::nullopt;
  std::vector<std::size_t> current;
  if (detail::extend(g, current, VertexSet::full(g.vertex_count()), r)) return current;
  return std::nullopt;
}

inline std::size_t clique_number(const WeightGraph& g) {
  std::size_t best = 0;
  detail::grow_max(g, 0, VertexSet::full(g.vertex_count()), best);
  return best;
}

/// Lexicographically least maximum clique.
inline std::vector<std::size_t> max_clique(const WeightGraph& g) {
  if (g.vertex_count() == 0) return {};
  return *find_clique(g, clique_number(g));
}

/// Graphviz rendering; vertices are x1..xd, removals appear as comments.
inline std::string to_dot(const WeightGraph& g) {
  std::ostringstream os;
  os << "graph weight_graph {\n";
  for (std::size_t i = 0; i < g.vertex_count(); ++i) os << "  x" << i + 1 << ";\n";
  for (const auto& [i, j] : g.edges()) os << "  x" << i + 1 << " -- x" << j + 1 << ";\n";
  for (const auto& e : g.removal_log()) {
    os << "  // neuron " << e.neuron + 1 << ": ";
    switch (e.kind) {
      case RemovalEntry::Kind::kRemoved:
        os << "removed x" << e.edge->first + 1 << " -- x" << e.edge->second + 1;
        break;
      case RemovalEntry::Kind::kAlreadyRemoved:
        os << "no removal (x" << e.edge->first + 1 << " -- x" << e.edge->second + 1 << " already removed)";
        break;
      case RemovalEntry::Kind::kFewerThanTwoNonzeros:
        os << "no removal (fewer than two nonzero weights)";
        break;
    }
    os << "\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace relumax::transforms
