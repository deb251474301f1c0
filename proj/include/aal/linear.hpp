#pragma once

// Online importance-weighted logistic regression with importance-aware updates.
//
// The learning rate decays with the importance mass t absorbed so far,
// eta(t) = eta0 / sqrt(1 + t). A weighted update integrates the logistic
// gradient flow over that schedule, which in the margin z = y * <w, x~> solves
//
//   z + exp(z) = z0 + exp(z0) + 2 * eta0 * |x~|^2 * (sqrt(1 + t + w) - sqrt(1 + t)),
//
// (x~ is x with the constant bias feature). The right side is additive in w,
// so k updates of weight w/k land exactly where one update of weight w does.

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "aal/core.hpp"

namespace aal {

struct LinearHypothesis {
  std::vector<double> weights;
  double bias = 0.0;

  double margin(const SparseVector& x) const { return x.dot(weights) + bias; }
  Label predict(const SparseVector& x) const { return Label::sign(margin(x)); }
};

/// How the flip cost is turned into a regret-scale disagreement gap.
enum class FlipScaling {
  importance,   ///< gap = tau(x) / examples_seen
  rate_scaled,  ///< gap = tau(x) * eta / examples_seen
};

namespace detail {

/// Solves d + a * expm1(d) = k for d >= 0 given a = exp(z0), k >= 0.
/// Both k and log1p(k / a) lie right of the root of this convex increasing
/// function, so Newton from their minimum decreases monotonically onto it.
inline double margin_increment(double z0, double k) {
  if (k <= 0.0) return 0.0;
  const double a = std::exp(std::min(z0, 700.0));
  double d = std::min(k, std::log1p(k / a));
  for (int it = 0; it < 200; ++it) {
    const double f = d + a * std::expm1(d) - k;
    if (f <= 0.0) break;
    const double next = d - f / (1.0 + a * std::exp(d));
    if (!(next < d)) break;
    d = std::max(next, 0.0);
  }
  return d;
}

}  // namespace detail

class LinearLearner {
 public:
  using point_type = SparseVector;
  using hypothesis_type = LinearHypothesis;

  explicit LinearLearner(double eta0 = 0.4, FlipScaling scaling = FlipScaling::importance)
      : eta0_(eta0), scaling_(scaling) {
    if (!(eta0 > 0.0) || !std::isfinite(eta0)) throw std::invalid_argument("learning rate must be positive");
  }

  double margin(const SparseVector& x) const { return h_.margin(x); }
  Label predict(const SparseVector& x) const { return h_.predict(x); }
  Label predict_with(const LinearHypothesis& h, const SparseVector& x) const { return h.predict(x); }

  void update(const SparseVector& x, Label y, double w) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("importance weight must be finite and >= 0");
    const double p0 = h_.margin(x);
    progressive_.add(Label::sign(p0) != y, w);
    max_weight_ = std::max(max_weight_, w);
    if (w == 0.0) return;

    const double norm2 = x.squared_norm() + 1.0;
    const double k = 2.0 * eta0_ * norm2 * (std::sqrt(1.0 + mass_ + w) - std::sqrt(1.0 + mass_));
    const double z0 = y.value() * p0;
    const double dz = detail::margin_increment(z0, k);
    const double step = y.value() * dz / norm2;

    if (x.dimension() > h_.weights.size()) h_.weights.resize(x.dimension(), 0.0);
    for (const auto& [i, v] : x.entries()) h_.weights[i] += step * v;
    h_.bias += step;
    mass_ += w;
  }

  /// Smallest importance weight whose update toward -predict(x) moves the
  /// margin to the decision boundary.
  double flip_weight(const SparseVector& x) const {
    const double p0 = h_.margin(x);
    const double z0 = -std::abs(p0);
    const double needed = 1.0 - z0 - std::exp(z0);  // >= 0
    if (needed <= 0.0) return 0.0;
    const double norm2 = x.squared_norm() + 1.0;
    const double root = std::sqrt(1.0 + mass_) + needed / (2.0 * eta0_ * norm2);
    return std::max(0.0, root * root - (1.0 + mass_));
  }

  double learning_rate() const { return eta0_ / std::sqrt(1.0 + mass_); }

  /// Regret-scale cost of flipping the prediction at x.
  double disagreement_gap(const SparseVector& x) const {
    if (progressive_.count == 0) return 0.0;
    double tau = flip_weight(x);
    if (scaling_ == FlipScaling::rate_scaled) tau *= learning_rate();
    return tau / static_cast<double>(progressive_.count);
  }

  bool in_disagreement_region(const SparseVector& x, double threshold) const {
    return disagreement_gap(x) <= threshold;
  }

  const LinearHypothesis& hypothesis() const { return h_; }
  double progressive_error() const { return progressive_.count ? progressive_.value() : 0.0; }
  double progressive_mistakes() const { return progressive_.weighted_mistakes; }
  std::size_t examples_seen() const { return progressive_.count; }
  double importance_mass() const { return mass_; }
  double max_weight_seen() const { return max_weight_; }
  double initial_rate() const { return eta0_; }
  FlipScaling flip_scaling() const { return scaling_; }

 private:
  double eta0_;
  FlipScaling scaling_;
  LinearHypothesis h_;
  double mass_ = 0.0;
  double max_weight_ = 0.0;
  ErrorAccumulator progressive_;
};

}  // namespace aal
