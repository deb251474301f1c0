#pragma once

// Online Active Cover. The ERM learner O_0 and l cover learners h_1..h_l are
// online oracles; each absorbed example updates O_0, then trains every cover
// member on the cost-sensitive example
//
//   c_y = 2 beta^2 (k - 1) Dhat_{k-1} 1(y != Y*) W + (2 alpha^2 - 1/p_t) 1(X in D and y != Y~)
//
// and moves its dual weight lambda_t = nu_t / omega_t. k is the 1-based index of
// the absorbed example, Y~ = O_0(X) before the update, (Y*, W) the label and
// weight fed to O_0.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "aal/learner.hpp"
#include "aal/opsolver.hpp"

namespace aal {

struct OacParams {
  double c0 = 0.1;
  std::size_t cover_size = 12;
  double alpha = 1.0;
  double beta_scale = 3.1622776601683795;

  double beta() const { return std::sqrt(alpha / c0) / beta_scale; }
};

inline double oac_delta_hat(double c0, double alpha, double e, std::size_t k) {
  const double kk = static_cast<double>(k);
  return std::sqrt(c0 * e / kk) + std::max(2.0 * alpha, 4.0) * c0 * std::log(kk) / kk;
}

inline double oac_p_min(double e, std::size_t k) {
  const double kk = static_cast<double>(k);
  return std::min(1.0 / (std::sqrt(kk * e) + std::log(kk)), 0.5);
}

template <class Oracle>
class OnlineActiveCover final : public StreamingLearner<typename Oracle::point_type> {
 public:
  using X = typename Oracle::point_type;

  struct Member {
    Oracle h;
    double lambda = 0.0;
    double nu = 0.0;
    double omega = 0.0;
  };

  OnlineActiveCover(const Oracle& prototype, OacParams params)
      : erm_(prototype), params_(params), beta_(params.beta()) {
    if (!(params_.c0 > 0.0)) throw std::invalid_argument("c0 must be positive");
    if (params_.cover_size == 0) throw std::invalid_argument("cover size must be positive");
    if (!(params_.alpha >= 1.0)) throw std::invalid_argument("alpha must be >= 1");
    if (!(params_.beta_scale > 0.0)) throw std::invalid_argument("beta_scale must be positive");
    cover_.assign(params_.cover_size, Member{prototype});
  }

  QueryDecision decide(const X& x) const override {
    const std::size_t k = this->examples_seen() + 1;
    if (k <= 3) return QueryDecision::query(1.0);
    const Label yt = erm_.predict(x);
    if (!erm_.in_disagreement_region(x, delta_hat_)) return QueryDecision::use_predicted(yt);
    return QueryDecision::query(p_from_q(q_of(x, yt, cover_.size())));
  }

  Label predict(const X& x) const override { return erm_.predict(x); }

  const Oracle& erm() const { return erm_; }
  const std::vector<Member>& cover() const { return cover_; }
  double delta_hat() const { return delta_hat_; }
  double p_min() const { return p_min_; }
  double beta() const { return beta_; }

 protected:
  void on_absorb(const X& x, const Outcome& o) override {
    const std::size_t k = this->examples_seen();
    const Label yt = erm_.predict(x);
    const bool in_d = k > 3 && erm_.in_disagreement_region(x, delta_hat_);
    Label ystar = o.label;
    double w = 1.0;
    if (o.kind == OutcomeKind::queried) w = 1.0 / o.probability;
    if (o.kind == OutcomeKind::skipped) w = 0.0;

    erm_.update(x, ystar, w);
    if (k >= 3) train_cover(x, yt, ystar, w, in_d, k);

    if (k >= 2) {
      const double e = erm_.progressive_error();
      delta_hat_ = oac_delta_hat(params_.c0, params_.alpha, e, k);
      p_min_ = oac_p_min(e, k);
    }
  }

 private:
  double q_of(const X& x, Label yt, std::size_t upto) const {
    const double mu = 2.0 * p_min_;
    double s = mu * mu;
    for (std::size_t t = 0; t < upto; ++t)
      if (cover_[t].lambda > 0.0 && cover_[t].h.predict(x) != yt) s += cover_[t].lambda;
    return std::sqrt(s);
  }

  // p_min_ and delta_hat_ still hold the values used when x was decided.
  void train_cover(const X& x, Label yt, Label ystar, double w, bool in_d, std::size_t k) {
    const double a2 = 2.0 * params_.alpha * params_.alpha;
    const double reg = 2.0 * beta_ * beta_ * static_cast<double>(k - 1) * delta_hat_ * w;
    for (std::size_t t = 0; t < cover_.size(); ++t) {
      const double q = q_of(x, yt, t);
      const double p = p_from_q(q);
      auto cost = [&](Label y) {
        double c = (y != ystar) ? reg : 0.0;
        if (in_d && y != yt) c += a2 - 1.0 / p;
        return c;
      };
      const double c_pos = cost(Label::pos());
      const double c_neg = cost(Label::neg());
      const Label yb = c_neg < c_pos ? Label::neg() : (c_pos < c_neg ? Label::pos() : yt);
      auto& m = cover_[t];
      m.h.update(x, yb, std::abs(c_pos - c_neg));
      const Label ht = m.h.predict(x);
      m.nu = std::max(m.nu + 2.0 * (cost(yt) - cost(ht)), 0.0);
      if (in_d && ht != yt) m.omega += 1.0 / (q * q * q);
      m.lambda = m.omega > 0.0 ? m.nu / m.omega : 0.0;
    }
  }

  Oracle erm_;
  OacParams params_;
  double beta_;
  std::vector<Member> cover_;
  double delta_hat_ = 0.0;
  double p_min_ = 0.5;
};

}  // namespace aal
