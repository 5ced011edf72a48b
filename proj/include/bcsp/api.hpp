#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bcsp/gadgets.hpp"
#include "bcsp/io.hpp"
#include "bcsp/solvers.hpp"

namespace bcsp::api {

json analyze_predicate(const Predicate& p);

json brute_force(const json& instance, double mu, const std::string& mode, const std::string& problem,
                 int threads = 1);

// kind: dksh-to-pred, pred-to-dksh, heavy-split, cloud, clique, dks-to-2csp, rescale
json reduce(const std::string& kind, const json& instance, const json& params, std::uint64_t seed);

json config_to_json(const SolverConfig& cfg);
SolverConfig config_from_json(const json& j, SolverConfig base = {});
json result_to_json(const SolveResult& r);

// problem: dks, dksh, csp. algorithm: auto, weighted, bounded, unweighted, single-string, general, negations.
json solve(const std::string& problem, const json& instance, std::optional<double> bias, const SolverConfig& cfg,
           const std::string& algorithm = "auto");

json gadget_params_to_json(const GadgetParams& p);
GadgetParams gadget_params_from_json(const json& j, GadgetParams base = {});

// test: hypercube, sse, ug. assignment: dictator, constant:v, table:<file>.
// params holds GadgetParams fields plus test extras (variant, graph, set, ug_n, fold).
json gadget(const std::string& test, const std::string& assignment, const json& params);

json gamma(double rho, const std::vector<double>& mus);

}  // namespace bcsp::api
