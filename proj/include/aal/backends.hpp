#pragma once

// Biased-sample backends for the epoch-based learner. Each keeps the live
// sample Z~ plus a copy frozen at the last epoch boundary, answers the
// disagreement test against the frozen copy, and turns the most-violated
// constraint search into one importance-weighted ERM over
//
//   Z~ with every weight scaled by 2 gamma beta^2 Delta, and
//   each x_i in S and D labelled sign(s_i) h_m(x_i) with weight |s_i| / u,
//   s_i = 2 alpha^2 - 1 / P(x_i).
//
// Minimizing that weighted error over h maximizes E[I_h / P] - b(h).

#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <vector>

#include "aal/core.hpp"
#include "aal/enumerated.hpp"
#include "aal/linear.hpp"
#include "aal/opsolver.hpp"
#include "aal/random.hpp"

namespace aal {

inline double regret_scale(const OpInstance& inst) {
  const auto& k = inst.constants;
  return 2.0 * k.gamma * k.beta * k.beta * inst.epoch.delta_prev;
}

template <class X>
class EnumeratedBatch {
 public:
  using point_type = X;
  using hypothesis_type = MemberId;

  explicit EnumeratedBatch(ClassHandle<X> cls) : live_(cls), frozen_(cls) {}

  void add(const X& x, Label y, double w) { live_.add(x, y, w); }

  void freeze() {
    frozen_ = live_;
    h_m_ = frozen_.erm();
  }

  MemberId frozen_hypothesis() const { return h_m_; }
  double frozen_error() const { return frozen_.weighted_error(h_m_); }
  std::size_t frozen_count() const { return frozen_.count(); }
  std::size_t live_count() const { return live_.count(); }

  Label predict(MemberId h, const X& x) const { return live_.hypothesis_class().predict(h, x); }
  Label predict_frozen(const X& x) const { return predict(h_m_, x); }
  Label predict_live(const X& x) const { return live_.count() ? predict(live_.erm(), x) : predict(MemberId{0}, x); }
  MemberId live_hypothesis() const { return live_.count() ? live_.erm() : MemberId{0}; }

  bool in_region(const X& x, double threshold) const { return frozen_.in_disagreement_region(x, h_m_, threshold); }

  double log_class_size() const { return std::log(static_cast<double>(live_.hypothesis_class().size())); }

  const ErrorTable<X>& frozen_table() const { return frozen_; }

  /// Best response by exact weighted ERM over the class. Disagreement lists
  /// are built once per instance, so each call costs O(sum of list sizes + |H|).
  ViolationOracle<MemberId> violation_oracle(std::span<const X> points, const OpInstance& inst) const {
    const auto& cls = frozen_.hypothesis_class();
    const std::size_t n = cls.size();
    auto lists = std::make_shared<std::vector<std::vector<std::uint32_t>>>(n);
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!inst.in_region[i]) continue;
      const Label ref = cls.predict(h_m_, points[i]);
      for (std::size_t h = 0; h < n; ++h)
        if (cls.predict(MemberId{h}, points[i]) != ref) (*lists)[h].push_back(static_cast<std::uint32_t>(i));
    }
    const double scale = regret_scale(inst);
    const double alpha2 = inst.constants.alpha * inst.constants.alpha;
    const double u = static_cast<double>(inst.u);
    const double count = static_cast<double>(frozen_.count());
    std::vector<double> base(n);
    for (std::size_t h = 0; h < n; ++h) base[h] = scale * frozen_.weighted_mistakes(MemberId{h});
    const MemberId hm = h_m_;
    const double hm_sum = frozen_.weighted_mistakes(hm);
    auto sums = std::make_shared<std::vector<double>>(n);
    for (std::size_t h = 0; h < n; ++h) (*sums)[h] = frozen_.weighted_mistakes(MemberId{h});

    return [lists, sums, base = std::move(base), alpha2, u, count, hm, hm_sum](std::span<const double> p) {
      // Points with s_i < 0 are labelled -h_m and cost |s_i| / u to every h
      // agreeing with h_m there; that constant shift is dropped.
      std::size_t best = 0;
      double best_cost = std::numeric_limits<double>::infinity();
      for (std::size_t h = 0; h < lists->size(); ++h) {
        double c = base[h];
        for (auto i : (*lists)[h]) c += (2.0 * alpha2 - 1.0 / p[i]) / u;
        if (c < best_cost) {
          best_cost = c;
          best = h;
        }
      }
      Candidate<MemberId> out;
      out.hypothesis = MemberId{best};
      out.key = best;
      out.disagreements = (*lists)[best];
      out.regret = count > 0 ? ((*sums)[best] - hm_sum) / count : 0.0;
      return out;
    };
  }

 private:
  ErrorTable<X> live_;
  ErrorTable<X> frozen_;
  MemberId h_m_{0};
};

/// Linear backend: the online learner stands in for ERM, so every "minimizer"
/// is approximate and regrets are clamped at 0.
class LinearBatch {
 public:
  using point_type = SparseVector;
  using hypothesis_type = LinearHypothesis;

  explicit LinearBatch(double eta0, double log_class_size, FlipScaling scaling = FlipScaling::importance)
      : eta0_(eta0), scaling_(scaling), log_class_size_(log_class_size), live_(eta0, scaling), frozen_(eta0, scaling) {}

  void add(const SparseVector& x, Label y, double w) {
    sample_.push_back({x, y, w});
    live_.update(x, y, w);
  }

  void freeze() {
    frozen_ = live_;
    frozen_count_ = sample_.size();
  }

  const LinearHypothesis& frozen_hypothesis() const { return frozen_.hypothesis(); }
  double frozen_error() const { return error_on_frozen(frozen_.hypothesis()); }
  std::size_t frozen_count() const { return frozen_count_; }
  std::size_t live_count() const { return sample_.size(); }

  Label predict(const LinearHypothesis& h, const SparseVector& x) const { return h.predict(x); }
  Label predict_frozen(const SparseVector& x) const { return frozen_.predict(x); }
  Label predict_live(const SparseVector& x) const { return live_.predict(x); }
  const LinearHypothesis& live_hypothesis() const { return live_.hypothesis(); }

  bool in_region(const SparseVector& x, double threshold) const {
    return frozen_.in_disagreement_region(x, threshold);
  }

  double log_class_size() const { return log_class_size_; }

  double error_on_frozen(const LinearHypothesis& h) const {
    if (frozen_count_ == 0) throw std::domain_error("weighted error of an empty sample is undefined");
    double s = 0.0;
    for (std::size_t i = 0; i < frozen_count_; ++i) {
      const auto& e = sample_[i];
      if (e.weight > 0.0 && h.predict(e.features) != e.label) s += e.weight;
    }
    return s / static_cast<double>(frozen_count_);
  }

  /// Best response by training a fresh learner on the cost-weighted combined
  /// sample, with the unlabeled points spread evenly through Z~.
  ViolationOracle<LinearHypothesis> violation_oracle(std::span<const SparseVector> points, const OpInstance& inst) const {
    std::vector<std::uint32_t> region;
    std::vector<Label> ref;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!inst.in_region[i]) continue;
      region.push_back(static_cast<std::uint32_t>(i));
      ref.push_back(frozen_.predict(points[i]));
    }
    const double scale = regret_scale(inst);
    const double alpha2 = inst.constants.alpha * inst.constants.alpha;
    const double u = static_cast<double>(inst.u);
    const double hm_err = frozen_count_ ? frozen_error() : 0.0;

    return [this, points, region = std::move(region), ref = std::move(ref), scale, alpha2, u, hm_err](
               std::span<const double> p) {
      LinearLearner fresh(eta0_, scaling_);
      const std::size_t nz = frozen_count_;
      const std::size_t ns = region.size();
      std::size_t j = 0;
      auto feed_unlabeled = [&](std::size_t upto) {
        for (; j < upto; ++j) {
          const std::uint32_t i = region[j];
          const double s = 2.0 * alpha2 - 1.0 / p[i];
          const Label y = s >= 0.0 ? ref[j] : -ref[j];
          fresh.update(points[i], y, std::abs(s) / u);
        }
      };
      for (std::size_t k = 0; k < nz; ++k) {
        const auto& e = sample_[k];
        fresh.update(e.features, e.label, scale * e.weight);
        feed_unlabeled(nz ? (k + 1) * ns / nz : ns);
      }
      feed_unlabeled(ns);

      Candidate<LinearHypothesis> out;
      out.hypothesis = fresh.hypothesis();
      std::uint64_t key = 0x5bd1e995ULL;
      for (std::size_t jj = 0; jj < ns; ++jj) {
        if (out.hypothesis.predict(points[region[jj]]) != ref[jj]) {
          out.disagreements.push_back(region[jj]);
          key = hash_combine(key, region[jj]);
        }
      }
      out.regret = nz ? std::max(0.0, error_on_frozen(out.hypothesis) - hm_err) : 0.0;
      std::uint64_t bits;
      std::memcpy(&bits, &out.regret, sizeof bits);
      out.key = hash_combine(key, bits);
      return out;
    };
  }

 private:
  double eta0_;
  FlipScaling scaling_;
  double log_class_size_;
  std::vector<WeightedExample<SparseVector>> sample_;
  LinearLearner live_;
  LinearLearner frozen_;
  std::size_t frozen_count_ = 0;
};

}  // namespace aal
