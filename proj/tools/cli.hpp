#pragma once

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "relumax/relumax.hpp"

namespace relumax::cli {

enum ExitCode : int { kOk = 0, kCounterexample = 2, kInvalid = 3, kBudgetExceeded = 4 };

struct Globals {
  std::string format = "text";
  std::uint64_t seed = 0;
  std::size_t budget = verify::kDefaultBudget;
  bool json() const { return format == "json"; }
};

namespace detail {

/// "~1.2345" style truncated decimal, marked approximate.
inline std::string approx(const Rational& x, int digits = 6) {
  const bool neg = x.sign() < 0;
  std::string s = bounds::detail::decimal_floor(x.abs(), digits);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  const bool exact = Rational(x.abs()) == Rational::parse(s);
  return std::string(exact ? "" : "~") + (neg ? "-" : "") + s;
}

inline std::string trim_decimal(std::string s) {
  if (s.find('.') == std::string::npos) return s;
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

inline std::string vec_text(const Vec& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i].str();
  return out + ")";
}

inline std::string one_based(const std::vector<std::size_t>& v) {
  std::string out = "{";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i] + 1);
  return out + "}";
}

inline int verdict_exit(const verify::VerificationVerdict& v) {
  switch (v.kind) {
    case verify::VerificationVerdict::Kind::kEqual: return kOk;
    case verify::VerificationVerdict::Kind::kCounterexample: return kCounterexample;
    case verify::VerificationVerdict::Kind::kBudgetExceeded: return kBudgetExceeded;
  }
  return kInvalid;
}

inline void print_verdict(const verify::VerificationVerdict& v, const Globals& g, std::ostream& out) {
  if (g.json()) {
    out << transforms::to_json(v).dump(2) << "\n";
    return;
  }
  out << "verdict: " << verify::to_string(v.kind) << "\n";
  if (v.regions_visited > 0) out << "regions: " << v.regions_visited << "\n";
  if (v.counterexample()) {
    out << "point: " << to_json(v.point).dump() << "\n";
    out << "network value: " << v.net_value.str() << " (" << approx(v.net_value) << ")\n";
    out << "target value: " << v.target_value.str() << " (" << approx(v.target_value) << ")\n";
  }
}

inline void describe(const ReluNetwork& net, std::ostream& out) {
  out << "input_dim " << net.input_dim() << ", depth " << net.depth() << ", width " << net.width() << ", size "
      << net.size() << "\n";
}

inline int emit_network(const ReluNetwork& net, const std::string& path, const Globals& g, std::ostream& out) {
  if (path.empty()) {
    out << serialize(net);
    return kOk;
  }
  save_text(path, serialize(net));
  if (g.json()) {
    out << Json{{"path", path},
                {"input_dim", net.input_dim()},
                {"depth", net.depth()},
                {"width", net.width()},
                {"size", net.size()}}
               .dump(2)
        << "\n";
  } else {
    out << "wrote " << path << ": ";
    describe(net, out);
  }
  return kOk;
}

inline std::vector<std::size_t> parse_dims(const std::string& text) {
  std::vector<std::size_t> dims;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      const long v = std::stol(part, &used);
      if (used != part.size() || v <= 0) throw std::invalid_argument("");
      dims.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw InvalidInput("--dims: expected positive integers separated by commas, got '" + text + "'");
    }
  }
  if (dims.size() < 2) throw InvalidInput("--dims: need the input dimension and at least one hidden width");
  return dims;
}

// ---------------------------------------------------------------------------

inline int run_bounds(std::uint64_t d, unsigned long k, const std::string& delta_text, unsigned long r, int digits,
                      const Globals& g, std::ostream& out) {
  if (d < 2) throw InvalidInput("bounds: --d must be at least 2");
  struct Row {
    std::string name, exact, decimal, note;
  };
  std::vector<Row> rows;
  Json j{{"d", d}, {"k", k}, {"digits", digits}};

  if (k >= 3) {
    const Rational a = bounds::alpha(k);
    rows.push_back({"alpha_k", a.str(), trim_decimal(bounds::detail::decimal_floor(a, digits)), ""});
    j["alpha"] = Json{{"exact", a.str()}, {"decimal", bounds::detail::decimal_floor(a, digits)}};
    const auto t1 = bounds::thm1_width_bound(d, k, digits);
    rows.push_back({"thm1 width bound", t1.value_exact ? t1.value_exact->str() : "irrational",
                    t1.value_exact ? trim_decimal(t1.value_decimal) : t1.value_decimal,
                    std::string(t1.valid ? "valid: " : "not valid: ") + t1.validity_note});
    j["thm1"] = Json{{"exact", t1.value_exact ? Json(t1.value_exact->str()) : Json()},
                     {"decimal", t1.value_decimal},
                     {"rounding", "down"},
                     {"valid", t1.valid},
                     {"note", t1.validity_note}};
    if (bounds::thm1_hypothesis(d, k)) {
      const auto r0 = bounds::guaranteed_clique_size(d, k);
      rows.push_back({"guaranteed clique size", r0.get_str(), r0.get_str(), "floor(2.1 d^(1-alpha_k) + 1)"});
      j["guaranteed_clique_size"] = r0.get_str();
    } else {
      rows.push_back({"guaranteed clique size", "n/a", "", "needs 3 <= k <= log2(log2(d))"});
      j["guaranteed_clique_size"] = Json();
    }
  } else {
    rows.push_back({"alpha_k", "n/a", "", "needs k >= 3"});
    rows.push_back({"thm1 width bound", "n/a", "", "needs k >= 3"});
    j["alpha"] = Json();
    j["thm1"] = Json();
    j["guaranteed_clique_size"] = Json();
  }

  const auto t3 = bounds::thm3_width_bound(d);
  rows.push_back({"thm3 width bound (depth 3)", t3.get_str(), t3.get_str(), "floor((d^2 - 2d - 4)/8)"});
  j["thm3"] = t3.get_str();

  if (r != 0) {
    const Rational tm = bounds::turan_max_edges(d, r);
    rows.push_back({"turan max edges (r=" + std::to_string(r) + ")", tm.str(),
                    trim_decimal(bounds::detail::decimal_floor(tm, digits)), "more edges force K_r"});
    j["turan"] = Json{{"r", r}, {"exact", tm.str()}};
    if (!delta_text.empty()) {
      const Rational delta = Rational::parse(delta_text);
      const auto c = bounds::corollary_edge_threshold(d, r, delta, digits);
      rows.push_back({"corollary threshold (delta=" + delta.str() + ")", c.value_exact->str(),
                      trim_decimal(c.value_decimal), c.validity_note});
      j["corollary"] = Json{{"r", r}, {"delta", delta.str()}, {"exact", c.value_exact->str()}, {"note", c.validity_note}};
    }
  } else if (!delta_text.empty()) {
    throw InvalidInput("bounds: --delta needs --r");
  }

  if (g.json()) {
    out << j.dump(2) << "\n";
    return kOk;
  }
  std::size_t w0 = 8, w1 = 5, w2 = 7;
  for (const auto& row : rows) {
    w0 = std::max(w0, row.name.size());
    w1 = std::max(w1, row.exact.size());
    w2 = std::max(w2, row.decimal.size());
  }
  out << "d = " << d << ", k = " << k << "\n";
  out << std::left << std::setw(static_cast<int>(w0)) << "quantity" << "  " << std::setw(static_cast<int>(w1))
      << "exact" << "  " << std::setw(static_cast<int>(w2)) << "decimal" << "  note\n";
  for (const auto& row : rows)
    out << std::left << std::setw(static_cast<int>(w0)) << row.name << "  " << std::setw(static_cast<int>(w1))
        << row.exact << "  " << std::setw(static_cast<int>(w2)) << row.decimal << "  " << row.note << "\n";
  out << "decimals are rounded down (approximate unless exact is shown)\n";
  return kOk;
}

inline int run_reduce(const std::string& net_path, const std::string& box_text, const std::string& out_path,
                      bool verify_collapsed, const Globals& g, std::ostream& out, std::ostream& err) {
  const ReluNetwork net = load_network(net_path);
  const Box box = Box::parse(box_text, net.input_dim());
  transforms::PipelineOptions opts;
  opts.seed = g.seed;
  opts.budget = g.budget;
  opts.verify_collapsed = verify_collapsed;
  const auto rep = transforms::reduce_pipeline(net, box, opts);
  const std::string text = transforms::to_json(rep).dump(2) + "\n";
  if (!out_path.empty()) save_text(out_path, text);

  if (rep.outcome == transforms::ReductionOutcome::kPreconditionFailed) {
    err << "precondition failed:";
    for (const auto& n : rep.notes) err << " " << n;
    err << "\n";
    return kInvalid;
  }
  if (g.json()) {
    if (out_path.empty()) out << text;
    else out << Json{{"path", out_path}, {"outcome", to_string(rep.outcome)}}.dump(2) << "\n";
    return kOk;
  }
  out << "outcome: " << to_string(rep.outcome) << "\n";
  out << "shift c: " << rep.shift->str() << " (attempts: " << rep.shift_attempts << ")\n";
  out << "homogenized: ";
  describe(rep.homogenized->net, out);
  out << "weight graph: " << rep.graph->edge_count() << " edges";
  if (!rep.isolated.empty()) out << ", isolated " << detail::one_based(rep.isolated);
  out << "\n";
  if (rep.clique) out << "clique (" << rep.clique_source << "): " << detail::one_based(*rep.clique) << "\n";
  if (rep.plan) out << "W: " << rep.plan->weights.ratio.str() << "\n";
  if (rep.collapsed) {
    out << "collapsed: ";
    describe(*rep.collapsed, out);
  }
  if (rep.collapsed_verdict)
    out << "collapsed vs Max_" << rep.plan->r() << " on [0,1]^" << rep.plan->r() << ": "
        << verify::to_string(rep.collapsed_verdict->kind) << "\n";
  for (const auto& n : rep.notes) out << "note: " << n << "\n";
  if (!out_path.empty()) out << "report: " << out_path << "\n";
  return kOk;
}

inline int run_graph(const std::string& net_path, const std::string& dot_path, const Globals& g, std::ostream& out) {
  const ReluNetwork net = load_network(net_path);
  const auto graph = transforms::first_layer_graph(net);
  const std::string dot = transforms::to_dot(graph);
  if (!dot_path.empty()) save_text(dot_path, dot);
  const auto clique = transforms::max_clique(graph);
  if (g.json()) {
    Json j = transforms::to_json(graph);
    j["max_clique"] = transforms::to_json(clique);
    out << j.dump(2) << "\n";
  } else if (dot_path.empty()) {
    out << dot;
  } else {
    out << "vertices: " << graph.vertex_count() << ", edges: " << graph.edge_count() << "\n";
    out << "removed:";
    for (const auto& [i, j] : graph.removed_edges()) out << " (" << i + 1 << "," << j + 1 << ")";
    out << "\nmaximum clique: " << detail::one_based(clique) << "\n";
    out << "wrote " << dot_path << "\n";
  }
  return kOk;
}

inline int run_simplify(const std::string& net_path, const std::string& out_path, const Globals& g,
                        std::ostream& out) {
  const ReluNetwork net = load_network(net_path);
  const auto simplified = transforms::depth2_simplify(net);
  const auto planes = transforms::nondiff_hyperplanes(net);
  if (!out_path.empty()) save_text(out_path, serialize(simplified.net));
  if (g.json()) {
    Json pairs = Json::array();
    for (const auto& [a, b] : simplified.smoothed_pairs) pairs.push_back(Json::array({a, b}));
    Json hs = Json::array();
    for (const auto& h : planes) hs.push_back(transforms::to_json(h));
    out << Json{{"net", to_json(simplified.net)}, {"smoothed_pairs", pairs}, {"hyperplanes", hs}}.dump(2) << "\n";
    return kOk;
  }
  out << "width " << net.width() << " -> " << simplified.net.width() << "\n";
  for (const auto& [a, b] : simplified.smoothed_pairs)
    out << "smoothed pair: neurons " << a + 1 << " and " << b + 1 << "\n";
  out << "non-differentiability hyperplanes: " << planes.size() << "\n";
  for (const auto& h : planes) out << "  " << h.str() << "\n";
  return kOk;
}

}  // namespace detail

/// Parses argv and runs one subcommand. Returns the process exit code.
inline int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact-arithmetic toolkit for ReLU networks computing Max_d", "relumax"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--seed", g.seed, "Seed for every randomized path");
  app.add_option("--budget", g.budget, "Region budget for exact verification")->check(CLI::PositiveNumber);

  std::function<int()> action;

  // build
  auto* build = app.add_subcommand("build", "Construct a network");
  build->require_subcommand(1);
  std::string build_out;
  std::size_t tour_d = 0;
  auto* tour = build->add_subcommand("tournament", "Max_d by a pairwise tournament");
  tour->add_option("--d", tour_d, "Input dimension")->required();
  tour->add_option("-o,--out", build_out, "Output path");
  tour->callback([&] { action = [&] { return detail::emit_network(tournament_max(tour_d), build_out, g, out); }; });
  auto* max2 = build->add_subcommand("max2", "The Max_2 gadget");
  max2->add_option("-o,--out", build_out, "Output path");
  max2->callback([&] { action = [&] { return detail::emit_network(max2_gadget(), build_out, g, out); }; });
  std::string dims;
  auto* rnd = build->add_subcommand("random", "Random network on a rational weight grid");
  rnd->add_option("--dims", dims, "input_dim,width_1,...,width_L")->required();
  rnd->add_option("-o,--out", build_out, "Output path");
  rnd->callback([&] {
    action = [&] {
      const auto v = detail::parse_dims(dims);
      const std::vector<std::size_t> widths(v.begin() + 1, v.end());
      return detail::emit_network(random_network(v.front(), widths, WeightGrid{}, g.seed), build_out, g, out);
    };
  });

  // bounds
  auto* bnd = app.add_subcommand("bounds", "Width lower bounds and graph thresholds");
  std::uint64_t bd = 0;
  unsigned long bk = 0, br = 0;
  int digits = bounds::kDefaultDigits;
  std::string delta;
  bnd->add_option("--d", bd, "Input dimension")->required();
  bnd->add_option("--k", bk, "Depth")->required();
  bnd->add_option("--r", br, "Clique size for the Turan and corollary thresholds");
  bnd->add_option("--delta", delta, "Corollary slack (rational)");
  bnd->add_option("--digits", digits, "Fractional digits")->check(CLI::Range(1, 1000));
  bnd->callback([&] { action = [&] { return detail::run_bounds(bd, bk, delta, br, digits, g, out); }; });

  // verify
  auto* ver = app.add_subcommand("verify", "Exact or sampled equivalence checks");
  ver->require_subcommand(1);
  std::string vnet, vbox = "unit", mode = "exact", va, vb;
  std::size_t samples = 10000;
  auto* vmax = ver->add_subcommand("max", "Does the network compute Max_d on the box?");
  vmax->add_option("--net", vnet, "Network JSON")->required();
  vmax->add_option("--box", vbox, "unit | lo,hi | lo,hi;lo,hi;...");
  vmax->add_option("--mode", mode, "exact or sample")->check(CLI::IsMember({"exact", "sample"}));
  vmax->add_option("--samples", samples, "Sample count (sample mode)");
  vmax->callback([&] {
    action = [&] {
      const ReluNetwork net = load_network(vnet);
      const Box box = Box::parse(vbox, net.input_dim());
      const auto v = mode == "exact" ? verify::equals_max_on_box(net, box, g.budget)
                                     : verify::sample_max_on_box(net, box, samples, g.seed);
      detail::print_verdict(v, g, out);
      return detail::verdict_exit(v);
    };
  });
  auto* veq = ver->add_subcommand("eq", "Do two networks agree on the box?");
  veq->add_option("--a", va, "First network JSON")->required();
  veq->add_option("--b", vb, "Second network JSON")->required();
  veq->add_option("--box", vbox, "unit | lo,hi | lo,hi;lo,hi;...");
  veq->callback([&] {
    action = [&] {
      const ReluNetwork a = load_network(va);
      const ReluNetwork b = load_network(vb);
      const Box box = Box::parse(vbox, a.input_dim());
      const auto v = verify::equals_network_on_box(a, b, box, g.budget);
      detail::print_verdict(v, g, out);
      return detail::verdict_exit(v);
    };
  });

  // reduce
  auto* red = app.add_subcommand("reduce", "Depth reduction pipeline");
  std::string rnet, rbox = "unit", rout;
  bool no_verify = false;
  red->add_option("--net", rnet, "Network JSON")->required();
  red->add_option("--box", rbox, "Cube on which the network is assumed to equal Max_d");
  red->add_option("-o,--out", rout, "Report path");
  red->add_flag("--no-verify", no_verify, "Skip exact verification of the collapsed network");
  red->callback([&] { action = [&] { return detail::run_reduce(rnet, rbox, rout, !no_verify, g, out, err); }; });

  // graph
  auto* gr = app.add_subcommand("graph", "First-layer weight graph");
  std::string gnet, dot;
  gr->add_option("--net", gnet, "Network JSON")->required();
  gr->add_option("--dot", dot, "DOT output path");
  gr->callback([&] { action = [&] { return detail::run_graph(gnet, dot, g, out); }; });

  // simplify
  auto* simp = app.add_subcommand("simplify", "Depth-2 canonicalization and hyperplanes");
  std::string snet, sout;
  simp->add_option("--net", snet, "Depth-2 network JSON")->required();
  simp->add_option("-o,--out", sout, "Simplified network path");
  simp->callback([&] { action = [&] { return detail::run_simplify(snet, sout, g, out); }; });

  for (auto* sub : {build, tour, max2, rnd, bnd, ver, vmax, veq, red, gr, simp}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kInvalid;
  }

  try {
    return action ? action() : kInvalid;
  } catch (const PreconditionFailed& e) {
    err << "precondition failed: " << e.what() << "\n";
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << "\n";
  } catch (const nlohmann::json::exception& e) {
    err << "invalid input: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kInvalid;
}

}  // namespace relumax::cli
