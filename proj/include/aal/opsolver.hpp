#pragma once

// Coordinate ascent on the Lagrangian dual of the query-probability problem
//
//   minimize   E[1 / (1 - P(X))]
//   subject to E[I_h(X) / P(X)] <= b(h)  for every h,   P >= P_min on D,
//
// where I_h(x) = 1(h(x) != h_m(x) and x in D) and every expectation is a
// uniform mean over an unlabeled sample S of size u. The primal solution for
// dual weights lambda is P(x) = q(x) / (1 + q(x)) on D with
// q(x) = sqrt(mu^2 + sum_h lambda_h I_h(x)).
//
// The solver sees hypotheses only through Candidate records: the indices of S
// on which a candidate disagrees with h_m inside D, and its empirical regret
// on the previous biased sample. A violation oracle supplies the most violated
// candidate for the current P.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace aal {

struct OpConstants {
  double alpha = 1.0;
  double beta = 0.0;
  double gamma = 216.0;
  double xi = 0.0;
  double eta = 864.0;
  double c1 = 2.0 * std::sqrt(6.0);
  double c2 = 864.0 * 24.0 / 4.0;
  double c3 = 1.0;

  /// The horizon-independent constraints on the constants. Throws on violation.
  void validate() const {
    auto need = [](bool ok, const char* what) {
      if (!ok) throw std::invalid_argument(std::string("invalid constant: ") + what);
    };
    constexpr double tol = 1e-12;
    need(alpha >= 1.0, "alpha >= 1");
    need(eta >= 864.0, "eta >= 864");
    need(gamma >= eta / 4.0 * (1.0 - tol), "gamma >= eta / 4");
    need(c1 >= 2.0 * alpha * std::sqrt(6.0) * (1.0 - tol), "c1 >= 2 alpha sqrt(6)");
    need(c2 >= eta * c1 * c1 / 4.0 * (1.0 - tol), "c2 >= eta c1^2 / 4");
    need(c3 >= 1.0, "c3 >= 1");
    need(beta >= 0.0 && std::isfinite(beta), "beta >= 0");
    need(xi >= 0.0 && std::isfinite(xi), "xi >= 0");
  }

  /// Extreme feasible values for horizon n and final-epoch epsilon eps_M:
  /// xi and beta at their upper bounds, everything else at its lower bound.
  static OpConstants for_horizon(double n, double eps_M, double alpha = 1.0, double eta = 864.0) {
    OpConstants k;
    k.alpha = alpha;
    k.eta = eta;
    k.gamma = eta / 4.0;
    k.c1 = 2.0 * alpha * std::sqrt(6.0);
    k.c2 = eta * k.c1 * k.c1 / 4.0;
    k.c3 = 1.0;
    const double scale = n * eps_M * std::log(n);
    if (!(scale > 0.0)) throw std::invalid_argument("horizon must exceed 1");
    k.xi = 1.0 / (8.0 * scale);
    k.beta = std::sqrt(eta / (864.0 * k.gamma * scale));
    return k;
  }
};

/// Per-epoch scalars: tau_{m-1}, Delta_{m-1} and P_min,m.
struct EpochScalars {
  double tau_prev = 0.0;
  double delta_prev = 0.0;
  double p_min = 0.5;
};

struct OpInstance {
  std::size_t u = 0;
  std::vector<char> in_region;  ///< 1(x_i in D), size u
  OpConstants constants;
  EpochScalars epoch;
  double slack = 0.0;           ///< tolerated violation; <= 0 selects the default

  double region_mass() const {
    std::size_t k = 0;
    for (char c : in_region) k += c ? 1 : 0;
    return u ? static_cast<double>(k) / static_cast<double>(u) : 0.0;
  }

  /// xi tau Delta^2 floored at 1e-8, or the configured slack.
  double effective_slack() const {
    if (slack > 0.0) return slack;
    const double s = constants.xi * epoch.tau_prev * epoch.delta_prev * epoch.delta_prev;
    return std::max(s, 1e-8);
  }

  double mu() const { return 2.0 * epoch.p_min; }

  void validate() const {
    constants.validate();
    if (in_region.size() != u) throw std::invalid_argument("region flags must cover the unlabeled sample");
    if (!(epoch.p_min > 0.0 && epoch.p_min <= 0.5)) throw std::invalid_argument("P_min must lie in (0, 1/2]");
    if (epoch.tau_prev < 0.0 || epoch.delta_prev < 0.0) throw std::invalid_argument("epoch scalars must be >= 0");
  }
};

template <class H>
struct Candidate {
  H hypothesis;
  std::uint64_t key = 0;                   ///< identity for merging dual weights
  std::vector<std::uint32_t> disagreements;  ///< i in S with x_i in D and h(x_i) != h_m(x_i)
  double regret = 0.0;                     ///< reg(h, h_m, previous biased sample)
};

template <class H>
struct CoverEntry {
  Candidate<H> candidate;
  double lambda = 0.0;
  double bound = 0.0;  ///< b(h)
};

template <class H>
struct DualState {
  double mu = 0.0;
  std::vector<CoverEntry<H>> cover;
  std::vector<double> load;  ///< sum_h lambda_h I_h(x_i)
  std::unordered_map<std::uint64_t, std::size_t> index;

  explicit DualState(const OpInstance& inst) : mu(inst.mu()), load(inst.u, 0.0) {}

  double lambda_l1() const {
    double s = 0.0;
    for (const auto& e : cover) s += e.lambda;
    return s;
  }
};

inline double q_from_load(double mu, double load) { return std::sqrt(mu * mu + load); }

inline double p_from_q(double q) { return std::isinf(q) ? 1.0 : q / (1.0 + q); }

/// Query probability of a point given its load sum_h lambda_h 1(h(x) != h_m(x)).
inline double query_probability(double mu, double load, bool in_region) {
  return in_region ? p_from_q(q_from_load(mu, load)) : 0.0;
}

template <class H>
double q_lambda(const DualState<H>& st, const OpInstance& inst, std::size_t i) {
  return q_from_load(st.mu, inst.in_region[i] ? st.load[i] : 0.0);
}

template <class H>
double p_lambda(const DualState<H>& st, const OpInstance& inst, std::size_t i) {
  return inst.in_region[i] ? p_from_q(q_lambda(st, inst, i)) : 0.0;
}

template <class H>
std::vector<double> p_lambda_all(const DualState<H>& st, const OpInstance& inst) {
  std::vector<double> p(inst.u);
  for (std::size_t i = 0; i < inst.u; ++i) p[i] = p_lambda(st, inst, i);
  return p;
}

/// b(h) = 2 alpha^2 E[I_h] + 2 beta^2 gamma reg tau Delta + xi tau Delta^2.
inline double b_m(std::size_t disagreement_count, double regret, const OpInstance& inst) {
  const auto& k = inst.constants;
  const auto& e = inst.epoch;
  const double mass = inst.u ? static_cast<double>(disagreement_count) / static_cast<double>(inst.u) : 0.0;
  return 2.0 * k.alpha * k.alpha * mass
       + 2.0 * k.beta * k.beta * k.gamma * regret * e.tau_prev * e.delta_prev
       + k.xi * e.tau_prev * e.delta_prev * e.delta_prev;
}

template <class H>
double b_m(const Candidate<H>& c, const OpInstance& inst) {
  return b_m(c.disagreements.size(), c.regret, inst);
}

/// E[1(D)(1 + q)^2] - sum lambda_h b(h) + (1 - Pr(D)) at lambda scaled by s.
template <class H>
double dual_objective(const DualState<H>& st, const OpInstance& inst, double s = 1.0) {
  if (inst.u == 0) return 1.0;
  double acc = 0.0;
  std::size_t outside = 0;
  for (std::size_t i = 0; i < inst.u; ++i) {
    if (!inst.in_region[i]) {
      ++outside;
      continue;
    }
    const double q = q_from_load(st.mu, s * st.load[i]);
    acc += (1.0 + q) * (1.0 + q);
  }
  double penalty = 0.0;
  for (const auto& e : st.cover) penalty += e.lambda * e.bound;
  const double u = static_cast<double>(inst.u);
  return acc / u - s * penalty + static_cast<double>(outside) / u;
}

/// E[1 / (1 - P(X))] over S.
inline double primal_objective(std::span<const double> p) {
  if (p.empty()) return 1.0;
  double s = 0.0;
  for (double v : p) s += 1.0 / (1.0 - v);
  return s / static_cast<double>(p.size());
}

/// E[I_h / P] - b(h) for the given P.
template <class H>
double violation(const Candidate<H>& c, double bound, std::span<const double> p, const OpInstance& inst) {
  double s = 0.0;
  for (auto i : c.disagreements) s += 1.0 / p[i];
  return (inst.u ? s / static_cast<double>(inst.u) : 0.0) - bound;
}

/// Given the current P on S (0 off D), returns a candidate maximizing the violation.
template <class H>
using ViolationOracle = std::function<Candidate<H>(std::span<const double> p)>;

template <class H>
struct ViolatedCandidate {
  Candidate<H> candidate;
  double bound = 0.0;
  double violation = 0.0;
};

/// The oracle's best response, or a cover member if one is more violated
/// (which can only happen when the oracle is approximate).
template <class H>
ViolatedCandidate<H> most_violated(const DualState<H>& st, const OpInstance& inst, const ViolationOracle<H>& oracle) {
  const auto p = p_lambda_all(st, inst);
  ViolatedCandidate<H> best{oracle(p), 0.0, 0.0};
  std::erase_if(best.candidate.disagreements, [&](std::uint32_t i) { return !inst.in_region.at(i); });
  best.bound = b_m(best.candidate, inst);
  best.violation = violation(best.candidate, best.bound, p, inst);
  for (const auto& e : st.cover) {
    const double v = violation(e.candidate, e.bound, p, inst);
    if (v > best.violation) best = {e.candidate, e.bound, v};
  }
  return best;
}

/// lambda_h += 2 viol / E[I_h / q^3]. Returns the increment.
template <class H>
double coordinate_step(DualState<H>& st, const OpInstance& inst, const ViolatedCandidate<H>& vc) {
  double denom = 0.0;
  for (auto i : vc.candidate.disagreements) {
    const double q = q_lambda(st, inst, i);
    denom += 1.0 / (q * q * q);
  }
  denom /= static_cast<double>(inst.u);
  if (!(denom > 0.0)) throw std::logic_error("coordinate step on a candidate with no disagreement mass");
  const double delta = 2.0 * vc.violation / denom;

  std::size_t slot;
  if (auto it = st.index.find(vc.candidate.key); it != st.index.end()) {
    slot = it->second;
  } else {
    slot = st.cover.size();
    st.index.emplace(vc.candidate.key, slot);
    st.cover.push_back({vc.candidate, 0.0, vc.bound});
  }
  st.cover[slot].lambda += delta;
  for (auto i : st.cover[slot].candidate.disagreements) st.load[i] += delta;
  return delta;
}

/// lambda <- s lambda with s maximizing the concave g(s) = D(s lambda) on [0, 1]
/// by golden-section search. Returns s.
template <class H>
double rescale(DualState<H>& st, const OpInstance& inst, double tol = 1e-8, int max_iter = 200) {
  if (st.cover.empty()) return 1.0;
  auto g = [&](double s) { return dual_objective(st, inst, s); };
  constexpr double invphi = 0.6180339887498949;
  double a = 0.0, b = 1.0;
  double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
  double f1 = g(x1), f2 = g(x2);
  for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = g(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = g(x1);
    }
  }
  double s = 0.5 * (a + b);
  double fs = g(s);
  for (double edge : {0.0, 1.0}) {
    const double fe = g(edge);
    if (fe > fs || (edge == 1.0 && fe >= fs)) {
      s = edge;
      fs = fe;
    }
  }
  if (s != 1.0) {
    for (auto& e : st.cover) e.lambda *= s;
    for (auto& l : st.load) l *= s;
  }
  return s;
}

template <class H>
struct SolveResult {
  DualState<H> state;
  std::size_t iterations = 0;
  std::size_t iteration_bound = 0;
  double max_violation = 0.0;  ///< at halt, over the oracle's answer and the cover
  double slack = 0.0;
  std::vector<double> dual_trace;  ///< D after every rescale and every step

  double dual() const { return dual_trace.empty() ? 0.0 : dual_trace.back(); }
};

/// Ceiling on coordinate steps: Pr(D) / (8 P_min^3 eps^2), rounded up.
inline std::size_t iteration_bound(const OpInstance& inst, double eps) {
  const double pm = inst.epoch.p_min;
  const double v = inst.region_mass() / (8.0 * pm * pm * pm * eps * eps);
  if (v >= 1e18) return std::numeric_limits<std::size_t>::max();
  return static_cast<std::size_t>(std::ceil(v));
}

template <class H>
SolveResult<H> solve(const OpInstance& inst, const ViolationOracle<H>& oracle, bool trace = false) {
  inst.validate();
  SolveResult<H> r{DualState<H>(inst), 0, 0, 0.0, 0.0, {}};
  r.slack = inst.effective_slack();
  r.iteration_bound = iteration_bound(inst, r.slack);
  if (trace) r.dual_trace.push_back(dual_objective(r.state, inst));
  if (inst.region_mass() == 0.0) return r;

  for (;;) {
    rescale(r.state, inst);
    if (trace) r.dual_trace.push_back(dual_objective(r.state, inst));
    auto vc = most_violated(r.state, inst, oracle);
    r.max_violation = vc.violation;
    if (vc.violation <= r.slack) break;
    if (r.iterations >= r.iteration_bound)
      throw std::logic_error("coordinate ascent exceeded its iteration bound");
    coordinate_step(r.state, inst, vc);
    ++r.iterations;
    if (trace) r.dual_trace.push_back(dual_objective(r.state, inst));
  }
  return r;
}

}  // namespace aal
