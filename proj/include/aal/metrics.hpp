#pragma once

// Label-budget curves and the AUC family of summaries.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace aal {

struct CurvePoint {
  std::size_t budget = 0;
  std::size_t queries = 0;
  double error = 0.0;
};

using BudgetCurve = std::vector<CurvePoint>;

/// Trapezoids over log2 query counts; 0 queries count as 1. Compensated
/// summation, so a constant error on doubling queries gives exactly 10 e.
inline double auc(const BudgetCurve& c) {
  double s = 0.0, comp = 0.0;
  for (std::size_t q = 0; q + 1 < c.size(); ++q) {
    if (c[q + 1].queries < c[q].queries) throw std::invalid_argument("query counts must be non-decreasing");
    const double a = static_cast<double>(std::max<std::size_t>(c[q].queries, 1));
    const double b = static_cast<double>(std::max<std::size_t>(c[q + 1].queries, 1));
    const double term = 0.5 * (c[q + 1].error + c[q].error) * std::log2(b / a);
    const double t = s + term;
    comp += std::abs(s) >= std::abs(term) ? (s - t) + term : (term - t) + s;
    s = t;
  }
  return s + comp;
}

/// Linear-interpolation quantile (the usual "type 7"); q in [0, 1].
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile of an empty set");
  std::sort(v.begin(), v.end());
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

inline double mean(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("mean of an empty set");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

struct CellKey {
  std::string algorithm;
  std::string params;
  std::string dataset;
  std::size_t permutation = 0;
  auto operator<=>(const CellKey&) const = default;
};

/// Every curve of a sweep, keyed by cell.
using ResultSet = std::map<CellKey, BudgetCurve>;

struct Baseline {
  std::string algorithm = "passive";
  std::string params = "lr=0.4";
};

namespace detail {

struct Axes {
  std::set<std::string> params;
  std::set<std::string> datasets;
  std::set<std::size_t> permutations;
};

inline Axes axes_of(const ResultSet& r, const std::string& algorithm) {
  Axes a;
  for (const auto& [k, c] : r) {
    a.datasets.insert(k.dataset);
    a.permutations.insert(k.permutation);
    if (k.algorithm == algorithm) a.params.insert(k.params);
  }
  return a;
}

inline const BudgetCurve& find_curve(const ResultSet& r, const CellKey& k) {
  auto it = r.find(k);
  if (it == r.end())
    throw std::out_of_range("missing cell " + k.algorithm + " [" + k.params + "] " + k.dataset + " #" +
                            std::to_string(k.permutation));
  return it->second;
}

/// median_j of (AUC_base - AUC_{a,p}) / AUC_base on dataset d.
inline double median_gain(const ResultSet& r, const Baseline& base, const std::string& a, const std::string& p,
                          const std::string& d, const std::set<std::size_t>& perms) {
  std::vector<double> g;
  for (auto j : perms) {
    const double ab = auc(find_curve(r, {base.algorithm, base.params, d, j}));
    const double aa = auc(find_curve(r, {a, p, d, j}));
    if (ab == 0.0) throw std::domain_error("baseline AUC is zero on " + d);
    g.push_back((ab - aa) / ab);
  }
  return median(std::move(g));
}

}  // namespace detail

/// mean_d max_p median_j of the relative AUC improvement over the baseline.
inline double auc_gain_star(const ResultSet& r, const std::string& algorithm, const Baseline& base = {}) {
  const auto ax = detail::axes_of(r, algorithm);
  if (ax.params.empty()) throw std::out_of_range("no cells for " + algorithm);
  std::vector<double> per_d;
  for (const auto& d : ax.datasets) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& p : ax.params) best = std::max(best, detail::median_gain(r, base, algorithm, p, d, ax.permutations));
    per_d.push_back(best);
  }
  return mean(per_d);
}

/// The parameter setting maximizing mean_d median_j of the gain, with its value.
inline std::pair<std::string, double> best_params(const ResultSet& r, const std::string& algorithm,
                                                  const Baseline& base = {}) {
  const auto ax = detail::axes_of(r, algorithm);
  if (ax.params.empty()) throw std::out_of_range("no cells for " + algorithm);
  std::pair<std::string, double> best{"", -std::numeric_limits<double>::infinity()};
  for (const auto& p : ax.params) {
    std::vector<double> per_d;
    for (const auto& d : ax.datasets) per_d.push_back(detail::median_gain(r, base, algorithm, p, d, ax.permutations));
    const double v = mean(per_d);
    if (v > best.second) best = {p, v};
  }
  return best;
}

/// max_p mean_d median_j of the relative AUC improvement over the baseline.
inline double auc_gain(const ResultSet& r, const std::string& algorithm, const Baseline& base = {}) {
  return best_params(r, algorithm, base).second;
}

enum class ParamSelection { global, per_dataset };

struct RelErrorPoint {
  std::size_t budget = 0;
  double value = 0.0;  ///< mean over datasets of the per-dataset order statistic
};

/// mean_d stat_j (error_base(d,j,q) - error_{a,p}(d,j,q)) / error_base(d,j,5), with
/// stat the 0.5 quantile by default (0.25 / 0.75 for the quartile bands).
inline std::vector<RelErrorPoint> rel_error_curve(const ResultSet& r, const std::string& algorithm,
                                                  ParamSelection sel, const Baseline& base = {},
                                                  double q_stat = 0.5, std::size_t reference_q = 5) {
  const auto ax = detail::axes_of(r, algorithm);
  std::map<std::string, std::string> chosen;
  if (sel == ParamSelection::global) {
    const auto p = best_params(r, algorithm, base).first;
    for (const auto& d : ax.datasets) chosen[d] = p;
  } else {
    for (const auto& d : ax.datasets) {
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& p : ax.params) {
        const double g = detail::median_gain(r, base, algorithm, p, d, ax.permutations);
        if (g > best) {
          best = g;
          chosen[d] = p;
        }
      }
    }
  }
  std::vector<RelErrorPoint> out;
  std::size_t nq = 0;
  for (const auto& d : ax.datasets)
    for (auto j : ax.permutations) {
      const auto sz = detail::find_curve(r, {base.algorithm, base.params, d, j}).size();
      nq = nq == 0 ? sz : std::min(nq, sz);
    }
  if (reference_q == 0 || reference_q > nq) throw std::out_of_range("reference budget index outside the curve");
  for (std::size_t q = 0; q < nq; ++q) {
    std::vector<double> per_d;
    for (const auto& d : ax.datasets) {
      std::vector<double> v;
      for (auto j : ax.permutations) {
        const auto& bc = detail::find_curve(r, {base.algorithm, base.params, d, j});
        const auto& ac = detail::find_curve(r, {algorithm, chosen.at(d), d, j});
        const double ref = bc.at(reference_q - 1).error;
        if (ref == 0.0) throw std::domain_error("baseline reference error is zero on " + d);
        v.push_back((bc.at(q).error - ac.at(q).error) / ref);
      }
      per_d.push_back(quantile(std::move(v), q_stat));
    }
    const auto& bc0 = detail::find_curve(r, {base.algorithm, base.params, *ax.datasets.begin(), *ax.permutations.begin()});
    out.push_back({bc0[q].budget, mean(per_d)});
  }
  return out;
}

}  // namespace aal
