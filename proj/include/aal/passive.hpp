#pragma once

#include <cstddef>
#include <limits>

#include "aal/learner.hpp"

namespace aal {

/// Queries every label until the budget is spent, then ignores the stream.
template <class Oracle>
class Passive final : public StreamingLearner<typename Oracle::point_type> {
 public:
  using X = typename Oracle::point_type;

  explicit Passive(Oracle oracle, std::size_t budget = std::numeric_limits<std::size_t>::max())
      : oracle_(std::move(oracle)), budget_(budget) {}

  QueryDecision decide(const X&) const override {
    return QueryDecision::query(this->queries_made() < budget_ ? 1.0 : 0.0);
  }

  Label predict(const X& x) const override { return oracle_.predict(x); }
  const Oracle& oracle() const { return oracle_; }

 protected:
  void on_absorb(const X& x, const Outcome& o) override {
    if (o.kind == OutcomeKind::queried) oracle_.update(x, o.label, 1.0);
  }

 private:
  Oracle oracle_;
  std::size_t budget_;
};

}  // namespace aal
