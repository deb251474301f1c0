#pragma once

// IWAL with the two error-difference thresholds, and the oracular variants
// that replace sub-threshold randomization by predicted labels.
//
//   variant 0:  T_k = sqrt(b_k) + b_k
//   variant 1:  T_k = sqrt(b_k e_{k-1}) + b_k,   b_k = C0 log k / (k - 1)
//
// The randomized rule queries with p = 1 when G_k <= T_k and otherwise with the
// p at which the threshold, re-evaluated with b_k / p, equals G_k.

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "aal/learner.hpp"

namespace aal {

enum class IwalVariant { zero = 0, one = 1 };

inline double iwal_b(double c0, std::size_t k) {
  if (k < 2) throw std::domain_error("threshold needs k >= 2");
  return c0 * std::log(static_cast<double>(k)) / static_cast<double>(k - 1);
}

inline double iwal_threshold(IwalVariant v, double c0, std::size_t k, double e_prev) {
  const double b = iwal_b(c0, k);
  return v == IwalVariant::zero ? std::sqrt(b) + b : std::sqrt(b * e_prev) + b;
}

/// Root p of G = sqrt(b e / p) + b / p (e = 1 for variant 0), clipped to (0, 1].
/// Closed form: with r = 1/sqrt(p), b r^2 + sqrt(b e) r - G = 0.
inline double iwal_probability(IwalVariant v, double c0, std::size_t k, double e_prev, double gap) {
  const double b = iwal_b(c0, k);
  const double e = v == IwalVariant::zero ? 1.0 : e_prev;
  if (gap <= std::sqrt(b * e) + b) return 1.0;
  if (!std::isfinite(gap)) return 0.0;
  const double a = std::sqrt(b * e);
  const double r = (-a + std::sqrt(a * a + 4.0 * b * gap)) / (2.0 * b);
  return std::min(1.0, 1.0 / (r * r));
}

template <class Oracle>
class Iwal final : public StreamingLearner<typename Oracle::point_type> {
 public:
  using X = typename Oracle::point_type;

  Iwal(Oracle oracle, IwalVariant variant, double c0, bool oracular = false)
      : oracle_(std::move(oracle)), variant_(variant), c0_(c0), oracular_(oracular) {
    if (!(c0 > 0.0)) throw std::invalid_argument("C0 must be positive");
  }

  QueryDecision decide(const X& x) const override {
    const std::size_t k = this->examples_seen() + 1;
    if (k < 2) return QueryDecision::query(1.0);
    const double e = oracle_.progressive_error();
    const double gap = oracle_.disagreement_gap(x);
    if (gap <= iwal_threshold(variant_, c0_, k, e)) return QueryDecision::query(1.0);
    if (oracular_) return QueryDecision::use_predicted(oracle_.predict(x));
    return QueryDecision::query(iwal_probability(variant_, c0_, k, e, gap));
  }

  Label predict(const X& x) const override { return oracle_.predict(x); }
  const Oracle& oracle() const { return oracle_; }

 protected:
  void on_absorb(const X& x, const Outcome& o) override {
    switch (o.kind) {
      case OutcomeKind::queried: oracle_.update(x, o.label, 1.0 / o.probability); break;
      case OutcomeKind::skipped: oracle_.update(x, Label::pos(), 0.0); break;
      case OutcomeKind::predicted: oracle_.update(x, o.label, 1.0); break;
    }
  }

 private:
  Oracle oracle_;
  IwalVariant variant_;
  double c0_;
  bool oracular_;
};

}  // namespace aal
