#pragma once

// Epoch-based Active Cover over a batch backend (EnumeratedBatch or LinearBatch).
//
// Epoch ends follow the doubling schedule 3, 6, 12, ... After absorbing the
// last example of epoch m the learner freezes Z~_m, takes h_{m+1} as its ERM,
// sets
//
//   eps_m   = 32 (log(|H| / delta) + log tau_m) / tau_m
//   Delta_m = c1 sqrt(eps_m err(h_{m+1}, Z~_m)) + c2 eps_m log tau_m
//   P_min   = min(c3 / (sqrt(tau_m err(h_{m+1}, Z~_m) / N) + log tau_m), 1/2)
//
// (N = n eps_M unless configured), and solves for the next query probability
// on a fresh unlabeled sample.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "aal/backends.hpp"
#include "aal/learner.hpp"
#include "aal/opsolver.hpp"

namespace aal {

struct AcParams {
  std::size_t horizon = 0;       ///< n; required
  double delta = 0.05;
  double alpha = 1.0;
  double eta = 864.0;
  std::optional<OpConstants> constants;  ///< overrides the horizon-derived defaults
  std::optional<double> pmin_normalizer; ///< N above; defaults to n eps_M
  std::size_t max_unlabeled = 4096;      ///< cap on u
  double slack = 0.0;                    ///< <= 0: xi tau Delta^2 floored at 1e-8
  bool force_full_query = false;         ///< query everything with p = 1
  std::optional<double> threshold;       ///< replaces gamma Delta_{m-1}

  double epsilon(double log_class_size, double tau) const {
    return 32.0 * (log_class_size - std::log(delta) + std::log(tau)) / tau;
  }
};

struct AcEpochRecord {
  std::size_t tau = 0;
  double error = 0.0;
  double delta = 0.0;
  double p_min = 0.5;
  double threshold = 0.0;
  std::size_t unlabeled = 0;
  std::size_t iterations = 0;
  std::size_t cover_size = 0;
};

template <class Backend>
class ActiveCover final : public StreamingLearner<typename Backend::point_type> {
 public:
  using X = typename Backend::point_type;
  using H = typename Backend::hypothesis_type;
  /// Supplies u unlabeled points given the 0-based index of the next stream element.
  using UnlabeledSource = std::function<std::vector<X>(std::size_t next_index, std::size_t u)>;

  ActiveCover(Backend backend, AcParams params, UnlabeledSource source)
      : backend_(std::move(backend)), params_(std::move(params)), source_(std::move(source)) {
    if (params_.horizon < 2) throw std::invalid_argument("Active Cover needs a horizon n >= 2");
    if (!(params_.delta > 0.0 && params_.delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
    const double n = static_cast<double>(params_.horizon);
    eps_M_ = params_.epsilon(backend_.log_class_size(), n);
    constants_ = params_.constants ? *params_.constants
                                   : OpConstants::for_horizon(n, eps_M_, params_.alpha, params_.eta);
    constants_.validate();
    normalizer_ = params_.pmin_normalizer.value_or(n * eps_M_);
    if (!(normalizer_ > 0.0)) throw std::invalid_argument("P_min normalizer must be positive");
  }

  QueryDecision decide(const X& x) const override {
    if (params_.force_full_query || this->examples_seen() < 3) return QueryDecision::query(1.0);
    if (!backend_.in_region(x, threshold_)) return QueryDecision::use_predicted(backend_.predict_frozen(x));
    double load = 0.0;
    const Label ref = backend_.predict_frozen(x);
    for (const auto& e : cover_)
      if (e.lambda > 0.0 && backend_.predict(e.candidate.hypothesis, x) != ref) load += e.lambda;
    const double p = std::max(query_probability(mu_, load, true), epoch_.p_min);
    return QueryDecision::query(p);
  }

  /// The ERM on everything absorbed so far.
  Label predict(const X& x) const override { return backend_.predict_live(x); }

  const Backend& backend() const { return backend_; }
  const OpConstants& constants() const { return constants_; }
  const std::vector<AcEpochRecord>& epochs() const { return records_; }
  double current_threshold() const { return threshold_; }

 protected:
  void on_absorb(const X& x, const Outcome& o) override {
    switch (o.kind) {
      case OutcomeKind::queried: backend_.add(x, o.label, 1.0 / o.probability); break;
      case OutcomeKind::skipped: backend_.add(x, Label::pos(), 0.0); break;
      case OutcomeKind::predicted: backend_.add(x, o.label, 1.0); break;
    }
    if (this->examples_seen() == next_end_) advance();
  }

 private:
  void advance() {
    const std::size_t tau = next_end_;
    next_end_ *= 2;
    if (params_.force_full_query) return;

    backend_.freeze();
    const double t = static_cast<double>(tau);
    const double err = backend_.frozen_error();
    const double eps = params_.epsilon(backend_.log_class_size(), t);
    const double delta = constants_.c1 * std::sqrt(eps * err) + constants_.c2 * eps * std::log(t);
    epoch_.tau_prev = t;
    epoch_.delta_prev = delta;
    epoch_.p_min = std::min(constants_.c3 / (std::sqrt(t * err / normalizer_) + std::log(t)), 0.5);
    mu_ = 2.0 * epoch_.p_min;
    threshold_ = params_.threshold.value_or(constants_.gamma * delta);

    const std::size_t u = std::min(tau, params_.max_unlabeled);
    std::vector<X> points = source_ ? source_(this->examples_seen(), u) : std::vector<X>{};
    OpInstance inst;
    inst.u = points.size();
    inst.in_region.resize(inst.u);
    for (std::size_t i = 0; i < inst.u; ++i) inst.in_region[i] = backend_.in_region(points[i], threshold_) ? 1 : 0;
    inst.constants = constants_;
    inst.epoch = epoch_;
    inst.slack = params_.slack;

    AcEpochRecord rec{tau, err, delta, epoch_.p_min, threshold_, inst.u, 0, 0};
    cover_.clear();
    if (inst.u > 0) {
      auto oracle = backend_.violation_oracle(std::span<const X>(points), inst);
      auto res = solve<H>(inst, oracle);
      rec.iterations = res.iterations;
      cover_ = std::move(res.state.cover);
    }
    rec.cover_size = cover_.size();
    records_.push_back(rec);
  }

  Backend backend_;
  AcParams params_;
  UnlabeledSource source_;
  OpConstants constants_;
  double eps_M_ = 0.0;
  double normalizer_ = 1.0;
  std::size_t next_end_ = 3;
  EpochScalars epoch_;
  double mu_ = 1.0;
  double threshold_ = std::numeric_limits<double>::infinity();
  std::vector<CoverEntry<H>> cover_;
  std::vector<AcEpochRecord> records_;
};

}  // namespace aal
