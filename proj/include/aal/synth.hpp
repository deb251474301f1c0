#pragma once

// Synthetic streams with known ground truth.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "aal/core.hpp"
#include "aal/enumerated.hpp"
#include "aal/random.hpp"

namespace aal {

// ---------------------------------------------------------------------------
// Hard instance. With probability epsilon the example is informative: y is a
// coin, h*(x) = y and every other member predicts an independent coin. Otherwise
// y and h*(x) are independent coins, one uniformly drawn member h_r != h*
// predicts -h*(x) and the rest copy h*(x). Members are evaluated lazily from
// the per-example seed.

struct HardInstanceSpec {
  double epsilon = 0.01;
  std::size_t class_size = 1000;
  std::size_t h_star = 0;
  std::uint64_t seed = 1;
};

struct HardPoint {
  std::uint64_t seed = 0;
  bool informative = false;
  std::uint32_t h_r = 0;   ///< meaningful only when !informative
  Label star = Label::pos();
};

inline Label hard_predict(std::size_t h_star, std::size_t member, const HardPoint& x) {
  if (member == h_star) return x.star;
  if (x.informative) return (hash_combine(x.seed, member) >> 63) ? Label::pos() : Label::neg();
  return member == x.h_r ? -x.star : x.star;
}

inline ClassHandle<HardPoint> hard_class(const HardInstanceSpec& spec) {
  const std::size_t star = spec.h_star;
  return std::make_shared<const EnumeratedClass<HardPoint>>(
      spec.class_size, [star](std::size_t h, const HardPoint& x) { return hard_predict(star, h, x); });
}

struct HardStream {
  ClassHandle<HardPoint> hypothesis_class;
  std::vector<StreamExample<HardPoint>> examples;
};

inline HardStream gen_hard(const HardInstanceSpec& spec, std::size_t n) {
  if (spec.class_size < 2) throw std::invalid_argument("hard instance needs |H| >= 2");
  if (spec.h_star >= spec.class_size) throw std::invalid_argument("h* outside the class");
  if (!(spec.epsilon >= 0.0 && spec.epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
  Rng rng(hash_combine(spec.seed, 0x4841524455ULL));
  HardStream out{hard_class(spec), {}};
  out.examples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    HardPoint x;
    x.seed = rng();
    x.informative = uniform01(rng) < spec.epsilon;
    const Label y = (rng() >> 63) ? Label::pos() : Label::neg();
    if (x.informative) {
      x.star = y;
    } else {
      x.star = (rng() >> 63) ? Label::pos() : Label::neg();
      auto r = static_cast<std::uint32_t>(uniform_index(rng, spec.class_size - 1));
      if (r >= spec.h_star) ++r;
      x.h_r = r;
    }
    out.examples.emplace_back(x, y);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Linear streams. Points are uniform on the unit sphere of R^dim.

struct LinearStream {
  std::vector<double> w_star;
  std::vector<StreamExample<SparseVector>> examples;
};

namespace detail {

inline std::vector<double> unit_gaussian(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  double s = 0.0;
  do {
    s = 0.0;
    for (auto& c : v) {
      c = standard_normal(rng);
      s += c * c;
    }
  } while (s == 0.0);
  const double inv = 1.0 / std::sqrt(s);
  for (auto& c : v) c *= inv;
  return v;
}

inline double dense_dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

/// Labels sign(<w*, x>); points with |<w*, x>| < margin are rejected.
inline LinearStream gen_realizable(std::size_t dim, std::size_t n, double margin, std::uint64_t seed) {
  if (dim == 0) throw std::invalid_argument("dimension must be positive");
  if (!(margin >= 0.0 && margin < 1.0)) throw std::invalid_argument("margin must lie in [0, 1)");
  Rng rng(hash_combine(seed, 0x5245414cULL));
  LinearStream out{detail::unit_gaussian(rng, dim), {}};
  out.examples.reserve(n);
  while (out.examples.size() < n) {
    auto x = detail::unit_gaussian(rng, dim);
    const double m = detail::dense_dot(out.w_star, x);
    if (std::abs(m) < margin) continue;
    out.examples.emplace_back(SparseVector::from_dense(x), Label::sign(m));
  }
  return out;
}

/// Probability that the label at margin m = <w*, x> is flipped.
inline double tsybakov_flip_probability(double m, double omega) {
  if (!(omega > 0.0 && omega <= 1.0)) throw std::invalid_argument("omega must lie in (0, 1]");
  const double p = 0.5 * (1.0 - std::pow(std::abs(m), (1.0 - omega) / omega));
  return std::clamp(p, 0.0, 0.5);
}

inline LinearStream gen_tsybakov(std::size_t dim, std::size_t n, double omega, std::uint64_t seed) {
  if (dim == 0) throw std::invalid_argument("dimension must be positive");
  Rng rng(hash_combine(seed, 0x54535942ULL));
  LinearStream out{detail::unit_gaussian(rng, dim), {}};
  out.examples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto x = detail::unit_gaussian(rng, dim);
    const double m = detail::dense_dot(out.w_star, x);
    Label y = Label::sign(m);
    if (bernoulli(rng, tsybakov_flip_probability(m, omega))) y = -y;
    out.examples.emplace_back(SparseVector::from_dense(x), y);
  }
  return out;
}

}  // namespace aal
