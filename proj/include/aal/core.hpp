#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace aal {

/// Binary label in {-1, +1}.
class Label {
 public:
  static constexpr Label pos() { return Label(1); }
  static constexpr Label neg() { return Label(-1); }

  /// sign(v) with sign(0) := +1.
  static constexpr Label sign(double v) { return v >= 0.0 ? pos() : neg(); }

  static Label from_int(int v) {
    if (v != 1 && v != -1) throw std::invalid_argument("label must be -1 or +1");
    return Label(v);
  }

  constexpr int value() const { return value_; }
  constexpr bool is_pos() const { return value_ > 0; }
  constexpr Label operator-() const { return Label(-value_); }
  constexpr bool operator==(const Label&) const = default;

 private:
  constexpr explicit Label(int v) : value_(static_cast<std::int8_t>(v)) {}
  std::int8_t value_;
};

/// Sparse feature map with strictly increasing indices and no stored zeros.
class SparseVector {
 public:
  using index_type = std::uint32_t;
  using entry = std::pair<index_type, double>;

  SparseVector() = default;

  /// Entries must have strictly increasing indices; explicit zeros are dropped.
  explicit SparseVector(std::vector<entry> entries) : entries_(std::move(entries)) {
    std::erase_if(entries_, [](const entry& e) { return e.second == 0.0; });
    for (std::size_t i = 1; i < entries_.size(); ++i) {
      if (entries_[i].first <= entries_[i - 1].first)
        throw std::invalid_argument("sparse vector indices must be strictly increasing");
    }
    for (const auto& e : entries_) {
      if (!std::isfinite(e.second)) throw std::invalid_argument("non-finite feature value");
    }
  }

  SparseVector(std::initializer_list<entry> entries)
      : SparseVector(std::vector<entry>(entries)) {}

  /// Builds from a dense array, skipping zeros.
  static SparseVector from_dense(std::span<const double> dense) {
    std::vector<entry> e;
    for (std::size_t i = 0; i < dense.size(); ++i)
      if (dense[i] != 0.0) e.emplace_back(static_cast<index_type>(i), dense[i]);
    return SparseVector(std::move(e));
  }

  std::span<const entry> entries() const { return entries_; }
  std::size_t nnz() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// One past the largest index, 0 when empty.
  std::size_t dimension() const { return entries_.empty() ? 0 : entries_.back().first + 1; }

  double squared_norm() const {
    double s = 0.0;
    for (const auto& [i, v] : entries_) s += v * v;
    return s;
  }

  double dot(const SparseVector& other) const {
    double s = 0.0;
    auto a = entries_.begin();
    auto b = other.entries_.begin();
    while (a != entries_.end() && b != other.entries_.end()) {
      if (a->first < b->first) {
        ++a;
      } else if (b->first < a->first) {
        ++b;
      } else {
        s += a->second * b->second;
        ++a;
        ++b;
      }
    }
    return s;
  }

  /// Dot product with a dense vector; indices past its end count as zero.
  double dot(std::span<const double> dense) const {
    double s = 0.0;
    for (const auto& [i, v] : entries_)
      if (i < dense.size()) s += dense[i] * v;
    return s;
  }

  bool operator==(const SparseVector&) const = default;

 private:
  std::vector<entry> entries_;
};

/// A stream element whose label is hidden from learners. Only LabelChannel reads it.
template <class X>
class StreamExample {
 public:
  StreamExample(X features, Label label) : features_(std::move(features)), label_(label) {}
  const X& features() const { return features_; }

 private:
  friend class LabelChannel;
  X features_;
  Label label_;
};

/// The label-query channel: the single place where a hidden label is revealed.
class LabelChannel {
 public:
  template <class X>
  static Label reveal(const StreamExample<X>& ex) {
    return ex.label_;
  }
};

/// (x, y, w). w = 0 is an ignored placeholder, w = 1 a plain or predicted label,
/// w = 1/p an inverse-probability weighted queried label.
template <class X>
struct WeightedExample {
  X features;
  Label label;
  double weight;
};

/// Running (numerator, count) pair for an importance-weighted error.
struct ErrorAccumulator {
  double weighted_mistakes = 0.0;
  std::size_t count = 0;

  void add(bool mistake, double weight) {
    if (mistake) weighted_mistakes += weight;
    ++count;
  }
  double value() const {
    if (count == 0) throw std::domain_error("weighted error of an empty sample is undefined");
    return weighted_mistakes / static_cast<double>(count);
  }
};

/// err(h, S) = sum w * 1(h(x) != y) / |S|, placeholders included in |S|.
template <class X, class Predict>
double weighted_error(const Predict& h, std::span<const WeightedExample<X>> sample) {
  if (sample.empty()) throw std::domain_error("weighted error of an empty sample is undefined");
  double s = 0.0;
  for (const auto& ex : sample) {
    if (ex.weight < 0.0) throw std::invalid_argument("negative importance weight");
    if (ex.weight > 0.0 && h(ex.features) != ex.label) s += ex.weight;
  }
  return s / static_cast<double>(sample.size());
}

/// reg(h, h', S) = err(h, S) - err(h', S).
template <class X, class PredictA, class PredictB>
double empirical_regret(const PredictA& h, const PredictB& h_ref,
                        std::span<const WeightedExample<X>> sample) {
  return weighted_error<X>(h, sample) - weighted_error<X>(h_ref, sample);
}

}  // namespace aal
