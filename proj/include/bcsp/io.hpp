#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "bcsp/instance.hpp"

namespace bcsp {

using json = nlohmann::json;

struct ParsedInstance {
  Hypergraph graph;
  std::optional<Predicate> predicate;
  std::optional<double> bias;
  std::vector<std::vector<int>> negations;

  CspInstance csp(std::optional<double> bias_override = std::nullopt) const;
};

ParsedInstance parse_instance(const json& j, bool allow_empty_edges = false);
ParsedInstance parse_instance_text(const std::string& text, bool allow_empty_edges = false);
ParsedInstance load_instance_file(const std::string& path, bool allow_empty_edges = false);

Predicate parse_predicate_json(const json& j);

json to_json(const Hypergraph& h);
json to_json(const CspInstance& psi);
json to_json(const Predicate& p);
json to_json(const PredicateProfile& p, int arity);

// Serializes with every floating-point number written as %.17g.
std::string dump_json(const json& j, int indent = 2);

}  // namespace bcsp
