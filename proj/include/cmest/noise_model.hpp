#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "cmest/numerics.hpp"

namespace cmest {

enum class Family { gaussian, laplace, cauchy, uniform };

std::string_view family_name(Family family) noexcept;
/// Name of the family-native scale parameter: sigma, b, gamma or a.
std::string_view scale_name(Family family) noexcept;

/// Zero-location sensing-noise distribution.
///
/// The scale is family-native: Gaussian standard deviation σ, Laplace b
/// (variance 2b²), Cauchy γ, Uniform half-width a (support [-a, a]).
class NoiseModel {
 public:
  NoiseModel() = default;
  NoiseModel(Family family, double scale);

  static NoiseModel gaussian(double sigma) { return {Family::gaussian, sigma}; }
  static NoiseModel laplace(double b) { return {Family::laplace, b}; }
  static NoiseModel cauchy(double gamma) { return {Family::cauchy, gamma}; }
  static NoiseModel uniform(double a) { return {Family::uniform, a}; }
  /// Member of `family` with the given variance. Throws UnsupportedModel for Cauchy.
  static NoiseModel from_variance(Family family, double variance);

  Family family() const noexcept { return family_; }
  double scale() const noexcept { return scale_; }

  NoiseModel scaled(double factor) const { return {family_, scale_ * factor}; }

  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;

 private:
  Family family_ = Family::gaussian;
  double scale_ = 1.0;
};

/// Characteristic function value φ(ω) = φ_R + j φ_I.
struct CfValue {
  double phi_r;
  double phi_i;
};

/// A moment that may not exist. Undefined moments carry value = +inf.
struct Moment {
  double value;
  bool defined;
};

double pdf(const NoiseModel& model, double x);

/// p'(x)/p(x). At the Laplace kink (x = 0) the right limit -1/b is returned;
/// the uniform score is 0 everywhere (interior points, and by convention
/// outside the support).
double score(const NoiseModel& model, double x);

CfValue cf(const NoiseModel& model, double omega);

/// 1 - φ_R(ω), evaluated without cancellation for small |ω|.
double cf_complement(const NoiseModel& model, double omega);

double draw(const NoiseModel& model, RandomStream& stream);
void sample(const NoiseModel& model, RandomStream& stream, std::span<double> out);
std::vector<double> sample(const NoiseModel& model, RandomStream& stream, std::size_t n);

/// Fisher information about a location shift; +inf for Uniform.
double fisher(const NoiseModel& model);

Moment variance(const NoiseModel& model);

/// Points where the density is not smooth (Laplace 0, Uniform ±a).
std::vector<double> kinks(const NoiseModel& model);

}  // namespace cmest
