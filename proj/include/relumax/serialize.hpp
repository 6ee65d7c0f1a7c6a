#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "relumax/network.hpp"

namespace relumax {

using Json = nlohmann::ordered_json;

inline Json to_json(const Rational& r) { return r.str(); }

inline Rational rational_from_json(const Json& j) {
  if (j.is_string()) return Rational::parse(j.get<std::string>());
  if (j.is_number_integer()) return Rational(mpz_class(j.dump(), 10));
  throw InvalidInput("expected a rational literal string, got " + j.dump());
}

inline Json to_json(const Vec& v) {
  Json out = Json::array();
  for (const auto& r : v) out.push_back(to_json(r));
  return out;
}

inline Json to_json(const AffineMap& m) {
  Json w = Json::array();
  for (const auto& row : m.weights()) w.push_back(to_json(row));
  return Json{{"weights", w}, {"biases", to_json(m.biases())}};
}

/// Network interchange document:
/// {"input_dim": d, "hidden": [{"weights": [[..]], "biases": [..]}, ..],
///  "output": {"weights": [[..]], "biases": [..]}}
inline Json to_json(const ReluNetwork& net) {
  Json hidden = Json::array();
  for (const auto& h : net.hidden()) hidden.push_back(to_json(h));
  return Json{{"input_dim", net.input_dim()}, {"hidden", hidden}, {"output", to_json(net.output())}};
}

namespace detail {

inline AffineMap affine_from_json(const Json& j, std::size_t in_dim, const std::string& where) {
  if (!j.is_object() || !j.contains("weights") || !j.contains("biases"))
    throw InvalidInput(where + ": expected an object with \"weights\" and \"biases\"");
  const Json& w = j.at("weights");
  const Json& b = j.at("biases");
  if (!w.is_array() || !b.is_array()) throw InvalidInput(where + ": weights and biases must be arrays");
  Matrix rows;
  for (std::size_t r = 0; r < w.size(); ++r) {
    if (!w[r].is_array()) throw InvalidInput(where + ": weight row " + std::to_string(r) + " is not an array");
    if (w[r].size() != in_dim)
      throw InvalidInput(where + ": weight row " + std::to_string(r) + " has length " +
                         std::to_string(w[r].size()) + ", expected " + std::to_string(in_dim));
    Vec row;
    for (const auto& e : w[r]) row.push_back(rational_from_json(e));
    rows.push_back(std::move(row));
  }
  Vec biases;
  for (const auto& e : b) biases.push_back(rational_from_json(e));
  return AffineMap(in_dim, std::move(rows), std::move(biases));
}

}  // namespace detail

inline ReluNetwork network_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidInput("network document must be a JSON object");
  for (const char* key : {"input_dim", "hidden", "output"})
    if (!j.contains(key)) throw InvalidInput(std::string("network document lacks \"") + key + "\"");
  if (!j.at("input_dim").is_number_unsigned() || j.at("input_dim").get<std::size_t>() == 0)
    throw InvalidInput("input_dim must be a positive integer");
  if (!j.at("hidden").is_array()) throw InvalidInput("\"hidden\" must be an array");

  const auto input_dim = j.at("input_dim").get<std::size_t>();
  std::vector<AffineMap> hidden;
  std::size_t in = input_dim;
  for (std::size_t l = 0; l < j.at("hidden").size(); ++l) {
    hidden.push_back(detail::affine_from_json(j.at("hidden")[l], in, "hidden[" + std::to_string(l) + "]"));
    in = hidden.back().out_dim();
  }
  AffineMap output = detail::affine_from_json(j.at("output"), in, "output");
  return ReluNetwork(input_dim, std::move(hidden), std::move(output));
}

inline std::string serialize(const ReluNetwork& net) { return to_json(net).dump(2) + "\n"; }

inline ReluNetwork deserialize(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput(std::string("malformed network document: ") + e.what());
  }
  return network_from_json(j);
}

inline ReluNetwork load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

inline void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path);
  out << text;
}

}  // namespace relumax
