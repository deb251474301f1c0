#pragma once

// Exact ERM over a finite, explicitly enumerated hypothesis class.

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "aal/core.hpp"

namespace aal {

struct MemberId {
  std::size_t value = 0;
  bool operator==(const MemberId&) const = default;
};

/// A finite class H = {h_0, ..., h_{N-1}} given by a deterministic predictor.
template <class X>
class EnumeratedClass {
 public:
  using point_type = X;
  using predictor = std::function<Label(std::size_t member, const X&)>;

  EnumeratedClass(std::size_t size, predictor f) : size_(size), f_(std::move(f)) {
    if (size_ < 2) throw std::invalid_argument("an enumerated class needs at least two members");
    if (!f_) throw std::invalid_argument("empty predictor");
  }

  std::size_t size() const { return size_; }
  Label predict(MemberId h, const X& x) const { return f_(h.value, x); }

 private:
  std::size_t size_;
  predictor f_;
};

template <class X>
using ClassHandle = std::shared_ptr<const EnumeratedClass<X>>;

/// Per-member running sums of w * 1(h(x) != y) over a biased sample, plus |S|.
template <class X>
class ErrorTable {
 public:
  explicit ErrorTable(ClassHandle<X> cls)
      : cls_(std::move(cls)), sums_(cls_->size(), 0.0) {}

  const EnumeratedClass<X>& hypothesis_class() const { return *cls_; }
  const ClassHandle<X>& handle() const { return cls_; }
  std::size_t count() const { return count_; }

  void add(const X& x, Label y, double w) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("importance weight must be finite and >= 0");
    ++count_;
    if (w == 0.0) return;
    for (std::size_t h = 0; h < sums_.size(); ++h)
      if (cls_->predict(MemberId{h}, x) != y) sums_[h] += w;
  }

  /// Unnormalized sum, i.e. |S| * err(h, S).
  double weighted_mistakes(MemberId h) const { return sums_.at(h.value); }

  double weighted_error(MemberId h) const {
    if (count_ == 0) throw std::domain_error("weighted error of an empty sample is undefined");
    return sums_.at(h.value) / static_cast<double>(count_);
  }

  /// Exact minimizer, lowest member id on ties.
  MemberId erm() const {
    if (count_ == 0) throw std::domain_error("ERM on an empty sample");
    return argmin_all();
  }

  /// Minimizer among members predicting -forbidden on x; nullopt when none does.
  std::optional<MemberId> constrained_erm(const X& x, Label forbidden) const {
    std::optional<MemberId> best;
    double best_sum = std::numeric_limits<double>::infinity();
    for (std::size_t h = 0; h < sums_.size(); ++h) {
      if (cls_->predict(MemberId{h}, x) == forbidden) continue;
      if (sums_[h] < best_sum) {
        best_sum = sums_[h];
        best = MemberId{h};
      }
    }
    return best;
  }

  /// err(h', S) - err(h_m, S) for h' the constrained ERM disagreeing with h_m at x;
  /// +inf when no member disagrees. An empty sample gives 0 for any feasible h'.
  double disagreement_gap(const X& x, MemberId h_m) const {
    const auto alt = constrained_erm(x, cls_->predict(h_m, x));
    if (!alt) return std::numeric_limits<double>::infinity();
    if (count_ == 0) return 0.0;
    return (sums_[alt->value] - sums_[h_m.value]) / static_cast<double>(count_);
  }

  bool in_disagreement_region(const X& x, MemberId h_m, double threshold) const {
    return disagreement_gap(x, h_m) <= threshold;
  }

 private:
  MemberId argmin_all() const {
    std::size_t best = 0;
    for (std::size_t h = 1; h < sums_.size(); ++h)
      if (sums_[h] < sums_[best]) best = h;
    return MemberId{best};
  }

  ClassHandle<X> cls_;
  std::vector<double> sums_;
  std::size_t count_ = 0;
};

/// Online importance-weighted ERM oracle over an enumerated class: the
/// hypothesis after each update is the exact ERM on everything seen so far.
template <class X>
class EnumeratedLearner {
 public:
  using point_type = X;
  using hypothesis_type = MemberId;

  explicit EnumeratedLearner(ClassHandle<X> cls) : table_(std::move(cls)) {}

  Label predict(const X& x) const { return table_.hypothesis_class().predict(current_, x); }
  Label predict_with(MemberId h, const X& x) const { return table_.hypothesis_class().predict(h, x); }

  void update(const X& x, Label y, double w) {
    progressive_.add(predict(x) != y, w);
    table_.add(x, y, w);
    if (w > 0.0) current_ = table_.erm();
  }

  MemberId hypothesis() const { return current_; }
  double progressive_error() const { return progressive_.count ? progressive_.value() : 0.0; }
  std::size_t examples_seen() const { return table_.count(); }

  double disagreement_gap(const X& x) const { return table_.disagreement_gap(x, current_); }
  bool in_disagreement_region(const X& x, double threshold) const {
    return disagreement_gap(x) <= threshold;
  }

  const ErrorTable<X>& table() const { return table_; }

 private:
  ErrorTable<X> table_;
  MemberId current_{0};
  ErrorAccumulator progressive_;
};

}  // namespace aal
