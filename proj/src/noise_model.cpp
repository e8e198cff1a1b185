#include "cmest/noise_model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cmest/errors.hpp"

namespace cmest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// sin(x)/x with exact zeros at nonzero integer multiples of π.
double sinc(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
  }
  const double turns = ax / std::numbers::pi;
  if (turns == std::nearbyint(turns)) return 0.0;
  return std::sin(ax) / ax;
}

double one_minus_sinc(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-2) {
    const double x2 = x * x;
    return x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0));
  }
  return 1.0 - sinc(x);
}

}  // namespace

std::string_view family_name(Family family) noexcept {
  switch (family) {
    case Family::gaussian: return "gaussian";
    case Family::laplace: return "laplace";
    case Family::cauchy: return "cauchy";
    case Family::uniform: return "uniform";
  }
  return "unknown";
}

std::string_view scale_name(Family family) noexcept {
  switch (family) {
    case Family::gaussian: return "sigma";
    case Family::laplace: return "b";
    case Family::cauchy: return "gamma";
    case Family::uniform: return "a";
  }
  return "scale";
}

NoiseModel::NoiseModel(Family family, double scale) : family_(family), scale_(scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw DomainError(std::string(family_name(family)) + ": scale must be finite and > 0");
  }
}

NoiseModel NoiseModel::from_variance(Family family, double var) {
  if (!(var > 0.0)) throw DomainError("from_variance: variance must be > 0");
  switch (family) {
    case Family::gaussian: return gaussian(std::sqrt(var));
    case Family::laplace: return laplace(std::sqrt(var / 2.0));
    case Family::uniform: return uniform(std::sqrt(3.0 * var));
    case Family::cauchy: break;
  }
  throw UnsupportedModel("cauchy: variance does not exist");
}

double pdf(const NoiseModel& model, double x) {
  const double s = model.scale();
  switch (model.family()) {
    case Family::gaussian: {
      const double u = x / s;
      return std::exp(-0.5 * u * u) / (s * std::sqrt(2.0 * std::numbers::pi));
    }
    case Family::laplace: return std::exp(-std::abs(x) / s) / (2.0 * s);
    case Family::cauchy: return s / (std::numbers::pi * (s * s + x * x));
    case Family::uniform: return std::abs(x) <= s ? 0.5 / s : 0.0;
  }
  return 0.0;
}

double score(const NoiseModel& model, double x) {
  const double s = model.scale();
  switch (model.family()) {
    case Family::gaussian: return -x / (s * s);
    case Family::laplace: return x < 0.0 ? 1.0 / s : -1.0 / s;
    case Family::cauchy: return -2.0 * x / (s * s + x * x);
    case Family::uniform: return 0.0;
  }
  return 0.0;
}

CfValue cf(const NoiseModel& model, double omega) {
  const double s = model.scale();
  const double w = std::abs(omega);
  switch (model.family()) {
    case Family::gaussian: return {std::exp(-0.5 * s * s * w * w), 0.0};
    case Family::laplace: return {1.0 / (1.0 + s * s * w * w), 0.0};
    case Family::cauchy: return {std::exp(-s * w), 0.0};
    case Family::uniform: return {sinc(s * w), 0.0};
  }
  return {1.0, 0.0};
}

double cf_complement(const NoiseModel& model, double omega) {
  const double s = model.scale();
  const double w = std::abs(omega);
  switch (model.family()) {
    case Family::gaussian: return -std::expm1(-0.5 * s * s * w * w);
    case Family::laplace: {
      const double t = s * s * w * w;
      return t / (1.0 + t);
    }
    case Family::cauchy: return -std::expm1(-s * w);
    case Family::uniform: return one_minus_sinc(s * w);
  }
  return 0.0;
}

double draw(const NoiseModel& model, RandomStream& stream) {
  const double s = model.scale();
  switch (model.family()) {
    case Family::gaussian: return s * stream.normal();
    case Family::laplace: {
      const double u = stream.uniform_open() - 0.5;
      const double magnitude = -s * std::log1p(-2.0 * std::abs(u));
      return u < 0.0 ? -magnitude : magnitude;
    }
    case Family::cauchy: return s * std::tan(std::numbers::pi * (stream.uniform_open() - 0.5));
    case Family::uniform: return s * (2.0 * stream.uniform() - 1.0);
  }
  return 0.0;
}

void sample(const NoiseModel& model, RandomStream& stream, std::span<double> out) {
  for (double& v : out) v = draw(model, stream);
}

std::vector<double> sample(const NoiseModel& model, RandomStream& stream, std::size_t n) {
  std::vector<double> out(n);
  sample(model, stream, out);
  return out;
}

double fisher(const NoiseModel& model) {
  const double s = model.scale();
  switch (model.family()) {
    case Family::gaussian: return 1.0 / (s * s);
    case Family::laplace: return 1.0 / (s * s);
    case Family::cauchy: return 1.0 / (2.0 * s * s);
    case Family::uniform: return kInf;
  }
  return kInf;
}

Moment variance(const NoiseModel& model) {
  const double s = model.scale();
  switch (model.family()) {
    case Family::gaussian: return {s * s, true};
    case Family::laplace: return {2.0 * s * s, true};
    case Family::uniform: return {s * s / 3.0, true};
    case Family::cauchy: return {kInf, false};
  }
  return {kInf, false};
}

std::vector<double> kinks(const NoiseModel& model) {
  switch (model.family()) {
    case Family::laplace: return {0.0};
    case Family::uniform: return {-model.scale(), model.scale()};
    default: return {};
  }
}

}  // namespace cmest
