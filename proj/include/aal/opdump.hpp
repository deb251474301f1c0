#pragma once

// JSON form of a query-probability problem over an explicit finite class, as
// read by `aal solve-op`:
//
//   {
//     "u": 4,
//     "in_region": [1, 1, 0, 1],
//     "constants": {"alpha": 1, "beta": 0, "gamma": 216, "xi": 0, ...},
//     "epoch": {"tau_prev": 10, "delta_prev": 0.1, "p_min": 0.25},
//     "slack": 0.001,
//     "hypotheses": [{"disagreements": [0, 3], "regret": 0.05}, ...]
//   }
//
// Each hypothesis lists the sample indices where it disagrees with h_m; only
// indices inside the region count. Missing constants keep their defaults.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "aal/opsolver.hpp"

namespace aal {

struct OpDump {
  OpInstance instance;
  std::vector<Candidate<std::size_t>> hypotheses;
};

inline OpDump parse_op_dump(const nlohmann::json& j) {
  OpDump d;
  auto& inst = d.instance;
  try {
    inst.u = j.at("u").get<std::size_t>();
    const auto& flags = j.at("in_region");
    if (!flags.is_array() || flags.size() != inst.u) throw std::invalid_argument("in_region must list u flags");
    for (const auto& f : flags) inst.in_region.push_back(f.get<int>() != 0 ? 1 : 0);
    if (j.contains("constants")) {
      const auto& c = j["constants"];
      auto& k = inst.constants;
      k.alpha = c.value("alpha", k.alpha);
      k.beta = c.value("beta", k.beta);
      k.gamma = c.value("gamma", k.gamma);
      k.xi = c.value("xi", k.xi);
      k.eta = c.value("eta", k.eta);
      k.c1 = c.value("c1", k.c1);
      k.c2 = c.value("c2", k.c2);
      k.c3 = c.value("c3", k.c3);
    }
    const auto& e = j.at("epoch");
    inst.epoch.tau_prev = e.at("tau_prev").get<double>();
    inst.epoch.delta_prev = e.at("delta_prev").get<double>();
    inst.epoch.p_min = e.at("p_min").get<double>();
    inst.slack = j.value("slack", 0.0);
    std::size_t id = 0;
    for (const auto& h : j.at("hypotheses")) {
      Candidate<std::size_t> c;
      c.hypothesis = id;
      c.key = id++;
      for (const auto& i : h.at("disagreements")) {
        const auto v = i.get<std::uint32_t>();
        if (v >= inst.u) throw std::invalid_argument("disagreement index out of range");
        if (inst.in_region[v]) c.disagreements.push_back(v);
      }
      std::sort(c.disagreements.begin(), c.disagreements.end());
      c.disagreements.erase(std::unique(c.disagreements.begin(), c.disagreements.end()), c.disagreements.end());
      c.regret = h.value("regret", 0.0);
      if (c.regret < 0.0) throw std::invalid_argument("regret must be >= 0");
      d.hypotheses.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw std::invalid_argument(std::string("bad instance: ") + ex.what());
  }
  if (d.hypotheses.empty()) throw std::invalid_argument("bad instance: no hypotheses");
  inst.validate();
  return d;
}

/// Exhaustive most-violated search over the listed hypotheses.
inline ViolationOracle<std::size_t> exhaustive_oracle(const OpDump& d) {
  return [&d](std::span<const double> p) {
    std::size_t best = 0;
    double best_v = -std::numeric_limits<double>::infinity();
    for (std::size_t h = 0; h < d.hypotheses.size(); ++h) {
      const auto& c = d.hypotheses[h];
      const double v = violation(c, b_m(c, d.instance), p, d.instance);
      if (v > best_v) {
        best_v = v;
        best = h;
      }
    }
    return d.hypotheses[best];
  };
}

inline nlohmann::json solve_op_json(const OpDump& d) {
  const auto r = solve<std::size_t>(d.instance, exhaustive_oracle(d));
  const auto p = p_lambda_all(r.state, d.instance);
  nlohmann::json out;
  nlohmann::json lambda = nlohmann::json::array();
  for (const auto& e : r.state.cover) lambda.push_back({{"hypothesis", e.candidate.hypothesis}, {"lambda", e.lambda}});
  nlohmann::json viol = nlohmann::json::array();
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& c : d.hypotheses) {
    const double v = violation(c, b_m(c, d.instance), p, d.instance);
    worst = std::max(worst, v);
    viol.push_back(v);
  }
  out["lambda"] = lambda;
  out["iterations"] = r.iterations;
  out["iteration_bound"] = r.iteration_bound;
  out["slack"] = r.slack;
  out["violations"] = viol;
  out["max_violation"] = worst;
  out["dual_objective"] = dual_objective(r.state, d.instance);
  out["objective"] = primal_objective(p);
  out["p"] = p;
  return out;
}

}  // namespace aal
