#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "cmest/noise_model.hpp"

namespace test_support {

// Plain bisection on w·e^w = x over w >= -1; positive arguments compare in
// log space so huge x does not overflow.
inline double lambert_w0_bisection(double x) {
  if (x == 0.0) return 0.0;
  double lo = -1.0;
  double hi = x > 0.0 ? std::max(1.0, std::log(x)) : 0.0;
  auto above = [x](double w) {
    if (x > 0.0) return w > 0.0 && std::log(w) + w > std::log(x);
    return w * std::exp(w) > x;
  };
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (above(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double cdf(const cmest::NoiseModel& m, double x) {
  const double s = m.scale();
  switch (m.family()) {
    case cmest::Family::gaussian: return 0.5 * std::erfc(-x / (s * std::numbers::sqrt2));
    case cmest::Family::laplace: return x < 0.0 ? 0.5 * std::exp(x / s) : 1.0 - 0.5 * std::exp(-x / s);
    case cmest::Family::cauchy: return 0.5 + std::atan(x / s) / std::numbers::pi;
    case cmest::Family::uniform: return std::clamp((x + s) / (2.0 * s), 0.0, 1.0);
  }
  return 0.0;
}

// Kolmogorov-Smirnov distance between a sample and the model CDF.
inline double ks_distance(const cmest::NoiseModel& m, std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(m, xs[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

inline const std::vector<cmest::NoiseModel>& finite_fisher_models() {
  static const std::vector<cmest::NoiseModel> models = {
      cmest::NoiseModel::gaussian(1.0), cmest::NoiseModel::laplace(1.0 / std::numbers::sqrt2),
      cmest::NoiseModel::cauchy(1.0)};
  return models;
}

inline const std::vector<cmest::NoiseModel>& all_models() {
  static const std::vector<cmest::NoiseModel> models = {
      cmest::NoiseModel::gaussian(1.0), cmest::NoiseModel::laplace(1.0 / std::numbers::sqrt2),
      cmest::NoiseModel::cauchy(1.0), cmest::NoiseModel::uniform(1.0)};
  return models;
}

inline double relative_error(double value, double reference) {
  return std::abs(value - reference) / std::abs(reference);
}

}  // namespace test_support
