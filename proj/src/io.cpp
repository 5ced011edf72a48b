#include "bcsp/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace bcsp {

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& msg) {
  throw StructuralError("field '" + field + "': " + msg);
}

template <class T>
T get_field(const json& j, const std::string& field) {
  try {
    return j.at(field).get<T>();
  } catch (const json::exception& e) {
    field_error(field, e.what());
  }
}

void dump_rec(const json& j, int indent, int depth, std::string& out) {
  auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        dump_rec(it.value(), indent, depth + 1, out);
      }
      newline(depth);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool scalar = std::all_of(j.begin(), j.end(), [](const json& x) { return x.is_primitive(); });
      out += '[';
      bool first = true;
      for (const auto& x : j) {
        if (!first) out += scalar && indent >= 0 ? ", " : ",";
        first = false;
        if (!scalar) newline(depth + 1);
        dump_rec(x, indent, depth + 1, out);
      }
      if (!scalar) newline(depth);
      out += ']';
      return;
    }
    case json::value_t::number_float: {
      double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

CspInstance ParsedInstance::csp(std::optional<double> bias_override) const {
  if (!predicate) field_error("predicate", "required for a CSP instance");
  CspInstance c;
  c.graph = graph;
  c.predicate = *predicate;
  c.bias = bias_override ? *bias_override : bias.value_or(0.5);
  c.negations = negations;
  c.validate();
  return c;
}

Predicate parse_predicate_json(const json& j) {
  if (j.is_string()) return parse_named_predicate(j.get<std::string>());
  if (!j.is_object()) field_error("predicate", "must be an object or a predicate name");
  if (j.contains("name")) return parse_named_predicate(get_field<std::string>(j, "name"));
  int arity = get_field<int>(j, "arity");
  auto acc = get_field<std::vector<std::string>>(j, "accepting");
  try {
    return Predicate::from_strings(arity, acc);
  } catch (const StructuralError& e) {
    field_error("predicate.accepting", e.what());
  }
}

ParsedInstance parse_instance(const json& j, bool allow_empty_edges) {
  if (!j.is_object()) throw StructuralError("instance must be a JSON object");
  if (j.contains("allow_empty_edges")) allow_empty_edges = allow_empty_edges || get_field<bool>(j, "allow_empty_edges");
  ParsedInstance p;
  auto& h = p.graph;
  long long n = get_field<long long>(j, "n");
  if (n < 0) field_error("n", "must be nonnegative");
  h.n = static_cast<std::size_t>(n);
  h.arity = get_field<int>(j, "arity");
  if (h.arity < 0) field_error("arity", "must be nonnegative");
  auto raw_edges = get_field<std::vector<std::vector<long long>>>(j, "edges");
  for (std::size_t i = 0; i < raw_edges.size(); ++i) {
    Edge e;
    for (auto v : raw_edges[i]) {
      if (v < 0 || v >= n) field_error("edges", "edge " + std::to_string(i) + " has vertex out of range");
      e.push_back(static_cast<std::uint32_t>(v));
    }
    if (static_cast<int>(e.size()) > h.arity)
      field_error("edges", "edge " + std::to_string(i) + " is longer than arity");
    if (e.empty() && !allow_empty_edges) field_error("edges", "edge " + std::to_string(i) + " is empty");
    h.edges.push_back(std::move(e));
  }
  if (j.contains("edge_weights")) {
    h.edge_weights = get_field<std::vector<double>>(j, "edge_weights");
    if (h.edge_weights.size() != h.edges.size()) field_error("edge_weights", "length must equal number of edges");
    for (double w : h.edge_weights)
      if (!(w > 0)) field_error("edge_weights", "entries must be positive");
  } else {
    h.edge_weights.assign(h.edges.size(), 1.0);
  }
  if (j.contains("vertex_weights")) {
    h.vertex_weights = get_field<std::vector<double>>(j, "vertex_weights");
    if (h.vertex_weights.size() != h.n) field_error("vertex_weights", "length must equal n");
    for (double w : h.vertex_weights)
      if (!(w >= 0)) field_error("vertex_weights", "entries must be nonnegative");
  } else {
    h.vertex_weights.assign(h.n, 1.0);
  }
  h.allow_empty_edges = allow_empty_edges;
  try {
    h.validate();
  } catch (const StructuralError& e) {
    field_error("edges", e.what());
  }
  if (j.contains("predicate")) {
    p.predicate = parse_predicate_json(j.at("predicate"));
    if (p.predicate->arity() != h.arity) field_error("predicate.arity", "must equal instance arity");
  }
  if (j.contains("bias")) {
    p.bias = get_field<double>(j, "bias");
    if (!(*p.bias > 0 && *p.bias <= 1)) field_error("bias", "must lie in (0, 1]");
  }
  if (j.contains("negations")) {
    p.negations = get_field<std::vector<std::vector<int>>>(j, "negations");
    if (p.negations.size() != h.edges.size()) field_error("negations", "must have one entry per edge");
    for (const auto& s : p.negations) {
      if (static_cast<int>(s.size()) != h.arity) field_error("negations", "each pattern must have arity entries");
      for (int v : s)
        if (v != 1 && v != -1) field_error("negations", "entries must be +1 or -1");
    }
  }
  if (p.predicate && p.negations.empty() && symmetric_decomposition(*p.predicate))
    for (auto& e : h.edges) std::sort(e.begin(), e.end());
  return p;
}

ParsedInstance parse_instance_text(const std::string& text, bool allow_empty_edges) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw StructuralError(std::string("instance is not valid JSON: ") + e.what());
  }
  return parse_instance(j, allow_empty_edges);
}

ParsedInstance load_instance_file(const std::string& path, bool allow_empty_edges) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open instance file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_instance_text(ss.str(), allow_empty_edges);
}

json to_json(const Hypergraph& h) {
  json j;
  j["n"] = h.n;
  j["arity"] = h.arity;
  j["vertex_weights"] = h.vertex_weights;
  json edges = json::array();
  for (const auto& e : h.edges) edges.push_back(e);
  j["edges"] = edges;
  j["edge_weights"] = h.edge_weights;
  if (h.allow_empty_edges) j["allow_empty_edges"] = true;
  return j;
}

json to_json(const Predicate& p) {
  json acc = json::array();
  for (auto b : p.accepting()) acc.push_back(p.to_string(b));
  return json{{"arity", p.arity()}, {"accepting", acc}};
}

json to_json(const CspInstance& psi) {
  json j = to_json(psi.graph);
  j["predicate"] = to_json(psi.predicate);
  j["bias"] = psi.bias;
  if (!psi.negations.empty()) j["negations"] = psi.negations;
  return j;
}

json to_json(const PredicateProfile& p, int arity) {
  json j;
  json m = json::array();
  for (auto b : p.minimal_elements) m.push_back(pattern_string(b, arity));
  j["minimal_elements"] = m;
  j["bias_independent"] = p.bias_independent;
  if (p.curve_exponent)
    j["exponent"] = *p.curve_exponent;
  else
    j["exponent"] = "inf";
  if (p.symmetric_weights)
    j["symmetric_weights"] = *p.symmetric_weights;
  else
    j["symmetric_weights"] = nullptr;
  return j;
}

std::string dump_json(const json& j, int indent) {
  std::string out;
  dump_rec(j, indent, 0, out);
  return out;
}

}  // namespace bcsp
