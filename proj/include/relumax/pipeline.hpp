#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "relumax/bounds.hpp"
#include "relumax/graph.hpp"
#include "relumax/random.hpp"
#include "relumax/serialize.hpp"
#include "relumax/transforms.hpp"
#include "relumax/verify.hpp"

namespace relumax::transforms {

enum class ReductionOutcome { kCollapsed, kNoClique, kActivationNotFixed, kPreconditionFailed };

inline const char* to_string(ReductionOutcome o) {
  switch (o) {
    case ReductionOutcome::kCollapsed: return "collapsed";
    case ReductionOutcome::kNoClique: return "no-clique";
    case ReductionOutcome::kActivationNotFixed: return "activation-not-fixed";
    case ReductionOutcome::kPreconditionFailed: return "precondition-failed";
  }
  return "?";
}

struct PipelineOptions {
  std::uint64_t seed = 0;
  std::size_t shift_attempts = 8;
  bool verify_collapsed = true;
  std::size_t budget = verify::kDefaultBudget;
};

/// Every stage artifact of one reduction run. Optional members are present
/// exactly when their stage ran.
struct ReductionReport {
  ReductionReport(ReluNetwork in, Box b, std::uint64_t s) : input(std::move(in)), box(std::move(b)), seed(s) {}

  ReluNetwork input;
  Box box;
  std::uint64_t seed = 0;
  ReductionOutcome outcome = ReductionOutcome::kPreconditionFailed;
  std::vector<std::string> notes;

  std::optional<Rational> shift;
  std::size_t shift_attempts = 0;
  std::optional<HomogenizeResult> homogenized;
  std::optional<WeightGraph> graph;
  std::vector<std::size_t> isolated;  // sole support of some first-layer neuron
  std::size_t clique_target = 0;
  std::string clique_source;          // "guaranteed" or "maximum"
  std::optional<std::vector<std::size_t>> clique;
  std::optional<AssignmentPlan> plan;
  std::optional<SignCertificate> certificate;
  std::optional<ReluNetwork> restricted;
  std::optional<ReluNetwork> collapsed;
  std::optional<verify::VerificationVerdict> collapsed_verdict;  // collapsed vs Max_r on [0,1]^r
};

/// Shift grid: a + (b - a) * (2/5 + k/1000), k = 0..200.
inline constexpr long kShiftGridSteps = 200;

inline Rational shift_from_grid(const Box& box, long k) {
  const Rational t = Rational(2, 5) + Rational(k, 1000);
  return box.side(0).lo + (box.side(0).hi - box.side(0).lo) * t;
}

/// Composes shift, homogenize, weight graph, clique, negative assignment,
/// sign certification and first-layer collapse for a network assumed equal
/// to Max_d on the cube `assume_max_on`. Never throws on a valid network:
/// failures become report outcomes.
inline ReductionReport reduce_pipeline(const ReluNetwork& net, const Box& assume_max_on,
                                       const PipelineOptions& opts = {}) {
  ReductionReport rep(net, assume_max_on, opts.seed);
  const std::size_t d = net.input_dim();
  if (net.depth() < 3) {
    rep.notes.push_back("depth is " + std::to_string(net.depth()) + "; the reduction needs depth at least 3");
    return rep;
  }
  if (assume_max_on.dim() != d || !assume_max_on.is_cube() || !(assume_max_on.side(0).lo < assume_max_on.side(0).hi)) {
    rep.notes.push_back("box must be a nondegenerate cube [a,b]^d matching the input dimension");
    return rep;
  }

  // shift and homogenize, resampling c while a first-layer neuron has < 2 nonzeros
  Rng rng(opts.seed);
  for (std::size_t attempt = 0; attempt < std::max<std::size_t>(1, opts.shift_attempts); ++attempt) {
    const long k = static_cast<long>(rng.below(kShiftGridSteps + 1));
    rep.shift = shift_from_grid(assume_max_on, k);
    rep.homogenized = homogenize(net, *rep.shift);
    rep.shift_attempts = attempt + 1;
    if (rep.homogenized->diagnostics.first_layer_ok()) break;
  }
  const auto& hom = *rep.homogenized;
  if (!hom.diagnostics.first_layer_ok())
    rep.notes.push_back(std::to_string(hom.diagnostics.single_support.size()) +
                        " first-layer neurons keep fewer than two nonzero weights after " +
                        std::to_string(rep.shift_attempts) + " shifts; their coordinates are excluded from the clique");
  if (!hom.diagnostics.output_bias_zero())
    rep.notes.push_back("output bias after homogenization is " + hom.diagnostics.output_bias.str() +
                        "; the input is not Max_d on the box");

  // weight graph, minus the coordinates that are the sole support of a neuron
  rep.graph = first_layer_graph(hom.net);
  const AffineMap& first = hom.net.hidden(0);
  std::vector<bool> lone(d, false);
  for (std::size_t n : hom.diagnostics.single_support) {
    const auto nz = nonzero_indices(first.row(n));
    if (nz.size() == 1) lone[nz[0]] = true;
  }
  for (std::size_t i = 0; i < d; ++i)
    if (lone[i]) rep.isolated.push_back(i);
  const WeightGraph search_graph = rep.graph->isolating(rep.isolated);

  const auto k = static_cast<unsigned long>(net.depth());
  bool guaranteed = false;
  if (bounds::thm1_hypothesis(d, k)) {
    const mpz_class r = bounds::guaranteed_clique_size(d, k);
    if (r.fits_ulong_p() && r.get_ui() <= d) {
      rep.clique_target = r.get_ui();
      const Rational edges(static_cast<long>(search_graph.edge_count()));
      guaranteed = edges > bounds::turan_max_edges(d, rep.clique_target);
    }
  }
  if (guaranteed) {
    rep.clique_source = "guaranteed";
    rep.clique = find_clique(search_graph, rep.clique_target);
  } else {
    rep.clique_source = "maximum";
    rep.clique = max_clique(search_graph);
    rep.clique_target = rep.clique->size();
  }
  if (!rep.clique || rep.clique->size() < 2) {
    rep.clique.reset();
    rep.outcome = ReductionOutcome::kNoClique;
    rep.notes.push_back("no clique of size at least 2 in the weight graph");
    return rep;
  }

  try {
    rep.plan = negative_assignment(hom.net, *rep.clique);
  } catch (const PreconditionFailed& e) {
    rep.outcome = ReductionOutcome::kPreconditionFailed;
    rep.notes.push_back(e.what());
    return rep;
  }
  rep.certificate = fixed_activation_analysis(hom.net, *rep.plan);
  rep.restricted = restrict_inputs(hom.net, *rep.plan);
  if (auto n = rep.certificate->first_not_fixed()) {
    rep.outcome = ReductionOutcome::kActivationNotFixed;
    rep.notes.push_back("first-layer neuron " + std::to_string(*n) + " changes sign on [0,1]^r");
    return rep;
  }
  rep.collapsed = collapse_first_layer(*rep.restricted, *rep.certificate);
  rep.outcome = ReductionOutcome::kCollapsed;
  if (opts.verify_collapsed)
    rep.collapsed_verdict = verify::equals_max_on_box(*rep.collapsed, Box::unit(rep.plan->r()), opts.budget);
  return rep;
}

// ---------------------------------------------------------------------------
// JSON (indices 0-based)

inline Json to_json(const Box& box) {
  Json out = Json::array();
  for (const auto& s : box.sides()) out.push_back(Json::array({to_json(s.lo), to_json(s.hi)}));
  return out;
}

inline Json to_json(const std::vector<std::size_t>& v) {
  Json out = Json::array();
  for (auto i : v) out.push_back(i);
  return out;
}

inline Json to_json(const WeightGraph& g) {
  Json edges = Json::array();
  for (const auto& [i, j] : g.edges()) edges.push_back(Json::array({i, j}));
  Json log = Json::array();
  for (const auto& e : g.removal_log()) {
    Json entry{{"neuron", e.neuron}};
    switch (e.kind) {
      case RemovalEntry::Kind::kRemoved: entry["action"] = "removed"; break;
      case RemovalEntry::Kind::kAlreadyRemoved: entry["action"] = "already-removed"; break;
      case RemovalEntry::Kind::kFewerThanTwoNonzeros: entry["action"] = "fewer-than-two-nonzeros"; break;
    }
    entry["edge"] = e.edge ? Json::array({e.edge->first, e.edge->second}) : Json();
    log.push_back(std::move(entry));
  }
  return Json{{"vertex_count", g.vertex_count()}, {"edge_count", g.edge_count()}, {"edges", edges},
              {"removal_log", log}};
}

inline Json to_json(const HomogenizeDiagnostics& diag) {
  Json layers = Json::array();
  for (const auto& l : diag.layers)
    layers.push_back(Json{{"removed_negative_bias", l.removed_negative},
                          {"split_positive_bias", l.split_positive},
                          {"removed_zero", l.removed_dead}});
  Json nz = Json::array();
  for (auto n : diag.first_layer_nonzeros) nz.push_back(n);
  return Json{{"shift", to_json(diag.shift)},
              {"layers", layers},
              {"first_layer_nonzeros", nz},
              {"single_support_neurons", to_json(diag.single_support)},
              {"output_bias", to_json(diag.output_bias)},
              {"output_bias_zero", diag.output_bias_zero()}};
}

inline Json to_json(const AssignmentPlan& plan) {
  Json values = Json::object();
  for (std::size_t i = 0; i < plan.input_dim; ++i)
    if (!plan.in_clique(i)) values[std::to_string(i)] = to_json(*plan.values[i]);
  return Json{{"clique", to_json(plan.clique)},
              {"order", to_json(plan.order)},
              {"w_min", to_json(plan.weights.w_min)},
              {"w_max", to_json(plan.weights.w_max)},
              {"W", to_json(plan.weights.ratio)},
              {"values", values}};
}

inline Json to_json(const SignCertificate& cert) {
  Json neurons = Json::array();
  for (const auto& n : cert.neurons) {
    Json e{{"sign", to_string(n.sign)}};
    e["dominant"] = n.dominant ? Json(*n.dominant) : Json();
    e["matches_dominance"] = n.matches_dominance;
    e["positive_witness"] = n.positive_witness ? to_json(*n.positive_witness) : Json();
    e["negative_witness"] = n.negative_witness ? to_json(*n.negative_witness) : Json();
    neurons.push_back(std::move(e));
  }
  return Json{{"box", to_json(cert.box)}, {"all_fixed", cert.all_fixed()}, {"neurons", neurons}};
}

inline Json to_json(const verify::VerificationVerdict& v) {
  Json out{{"verdict", verify::to_string(v.kind)}, {"regions", v.regions_visited}};
  if (v.counterexample()) {
    out["point"] = to_json(v.point);
    out["net_value"] = to_json(v.net_value);
    out["target_value"] = to_json(v.target_value);
  }
  return out;
}

inline Json to_json(const Hyperplane& h) { return Json{{"normal", to_json(h.normal)}, {"offset", to_json(h.offset)}}; }

inline Json to_json(const ReductionReport& rep) {
  auto opt = [](const auto& o) { return o ? to_json(*o) : Json(); };
  Json out{{"outcome", to_string(rep.outcome)}, {"notes", rep.notes}, {"seed", rep.seed},
           {"box", to_json(rep.box)}, {"input_net", to_json(rep.input)}};
  out["shift"] = opt(rep.shift);
  out["shift_attempts"] = rep.shift_attempts;
  out["homogenized_net"] = rep.homogenized ? to_json(rep.homogenized->net) : Json();
  out["homogenize_diagnostics"] = rep.homogenized ? to_json(rep.homogenized->diagnostics) : Json();
  out["weight_graph"] = opt(rep.graph);
  out["isolated_vertices"] = to_json(rep.isolated);
  out["clique_target"] = rep.clique_target;
  out["clique_source"] = rep.clique_source.empty() ? Json() : Json(rep.clique_source);
  out["clique"] = opt(rep.clique);
  out["assignment"] = opt(rep.plan);
  out["sign_certificate"] = opt(rep.certificate);
  out["restricted_net"] = opt(rep.restricted);
  out["collapsed_net"] = opt(rep.collapsed);
  out["collapsed_verification"] = opt(rep.collapsed_verdict);
  return out;
}

}  // namespace relumax::transforms
