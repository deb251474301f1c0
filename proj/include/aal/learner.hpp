#pragma once

// The streaming contract every learner implements, and the driver that draws
// the query coin and reveals labels.

#include <cstddef>
#include <stdexcept>
#include <string>

#include "aal/core.hpp"
#include "aal/random.hpp"

namespace aal {

enum class QueryMode { query, predicted };

struct QueryDecision {
  double probability = 0.0;
  QueryMode mode = QueryMode::query;
  Label predicted = Label::pos();

  static QueryDecision query(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::logic_error("query probability outside [0, 1]");
    return {p, QueryMode::query, Label::pos()};
  }
  static QueryDecision use_predicted(Label y) { return {0.0, QueryMode::predicted, y}; }
};

enum class OutcomeKind { queried, skipped, predicted };

/// What happened to one stream element. For queried, label is the true label
/// and probability the p it was queried with; for predicted, label is the
/// substituted prediction.
struct Outcome {
  OutcomeKind kind = OutcomeKind::skipped;
  Label label = Label::pos();
  double probability = 0.0;

  static Outcome queried(Label y, double p) { return {OutcomeKind::queried, y, p}; }
  static Outcome skipped(double p) { return {OutcomeKind::skipped, Label::pos(), p}; }
  static Outcome predicted(Label y) { return {OutcomeKind::predicted, y, 0.0}; }
};

template <class X>
class StreamingLearner {
 public:
  virtual ~StreamingLearner() = default;

  virtual QueryDecision decide(const X& x) const = 0;

  void absorb(const X& x, const Outcome& o) {
    if (o.kind == OutcomeKind::queried) ++queries_;
    ++seen_;
    on_absorb(x, o);
  }

  /// Prediction of the current output hypothesis.
  virtual Label predict(const X& x) const = 0;

  std::size_t queries_made() const { return queries_; }
  std::size_t examples_seen() const { return seen_; }

 protected:
  virtual void on_absorb(const X& x, const Outcome& o) = 0;

 private:
  std::size_t queries_ = 0;
  std::size_t seen_ = 0;
};

/// One decide / coin / absorb round. The coin is drawn only for 0 < p < 1, so
/// learners that never randomize never consume randomness. Returns the outcome.
template <class X>
Outcome step(StreamingLearner<X>& learner, const StreamExample<X>& ex, Rng& rng) {
  const auto d = learner.decide(ex.features());
  Outcome o;
  if (d.mode == QueryMode::predicted) {
    o = Outcome::predicted(d.predicted);
  } else {
    bool ask = d.probability >= 1.0;
    if (d.probability > 0.0 && d.probability < 1.0) ask = bernoulli(rng, d.probability);
    o = ask ? Outcome::queried(LabelChannel::reveal(ex), d.probability) : Outcome::skipped(d.probability);
  }
  learner.absorb(ex.features(), o);
  return o;
}

}  // namespace aal
