#include "cmest/efficiency.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "cmest/cf_analysis.hpp"
#include "cmest/errors.hpp"
#include "cmest/numerics.hpp"

namespace cmest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Relative slack for the ω → 0 candidate to beat an interior value that is
// equal up to rounding (Gaussian AsV is flat at the origin).
constexpr double kBoundaryTieSlack = 1e-12;

double max_omega(double theta_r) {
  if (!(theta_r > 0.0) || !std::isfinite(theta_r)) throw DomainError("theta_r must be finite and > 0");
  return 2.0 * std::numbers::pi / theta_r;
}

// Grid-then-golden minimum of AsV on [lo, hi]. For wide noise AsV overflows
// to +inf beyond some ω; the search is then restricted to the finite part.
ScalarMinimum interior_minimum(const NoiseModel& model, double lo, double hi, int grid_points) {
  auto f = [&](double w) { return asv(model, w); };
  try {
    return minimize_scalar(f, lo, hi, 1e-10 * hi, grid_points);
  } catch (const NumericFailure&) {
    if (!std::isfinite(f(lo)) || std::isfinite(f(hi))) throw;
    double a = lo, b = hi;
    while (b - a > 1e-12 * b) {
      const double mid = 0.5 * (a + b);
      (std::isfinite(f(mid)) ? a : b) = mid;
    }
    return minimize_scalar(f, lo, a, 1e-10 * hi, grid_points);
  }
}

}  // namespace

MeanVector mean_vector(const NoiseModel& model, double omega, double theta, double rho) {
  const auto [phi_r, phi_i] = cf(model, omega);
  const double c = std::cos(omega * theta);
  const double s = std::sin(omega * theta);
  return std::sqrt(rho) * MeanVector(phi_r * c - phi_i * s, phi_r * s + phi_i * c);
}

Eigen::Vector2d mean_vector_derivative(const NoiseModel& model, double omega, double theta, double rho) {
  const auto [phi_r, phi_i] = cf(model, omega);
  const double c = std::cos(omega * theta);
  const double s = std::sin(omega * theta);
  return std::sqrt(rho) * omega * Eigen::Vector2d(-phi_r * s - phi_i * c, phi_r * c - phi_i * s);
}

AsymCovariance sigma_matrix(const NoiseModel& model, double omega, double theta, double rho) {
  const auto [v_c, v_s] = trig_moments(model, omega);
  const double c = std::cos(omega * theta);
  const double s = std::sin(omega * theta);
  AsymCovariance m;
  m(0, 0) = rho * (v_c * c * c + v_s * s * s);
  m(1, 1) = rho * (v_s * c * c + v_c * s * s);
  m(0, 1) = m(1, 0) = rho * (v_c - v_s) * s * c;
  return m;
}

double asv(const NoiseModel& model, double omega) {
  if (!(omega > 0.0)) throw DomainError("asv: omega must be > 0");
  const auto [phi_r, phi_i] = cf(model, omega);
  const auto [v_c, v_s] = trig_moments(model, omega);
  const double w2 = omega * omega;
  if (phi_i == 0.0) {
    // v_c cancels; dividing it out avoids 0/0 where v_c = O(ω⁴) underflows.
    const double den = w2 * phi_r * phi_r;
    return den < 1e-300 ? kInf : v_s / den;
  }
  const double den = w2 * (v_s * phi_i * phi_i + v_c * phi_r * phi_r);
  return den < 1e-300 ? kInf : v_c * v_s / den;
}

double asv_quadratic_form(const NoiseModel& model, double omega, double theta, double rho) {
  const Eigen::Vector2d d = mean_vector_derivative(model, omega, theta, rho);
  const AsymCovariance sigma = sigma_matrix(model, omega, theta, rho);
  const double q = d.dot(sigma.ldlt().solve(d));
  return 1.0 / q;
}

double asv_closed_form(const NoiseModel& model, double omega) {
  if (!(omega > 0.0)) throw DomainError("asv_closed_form: omega must be > 0");
  const double w2 = omega * omega;
  switch (model.family()) {
    case Family::gaussian: {
      const double var = model.scale() * model.scale();
      return std::sinh(var * w2) / w2;
    }
    case Family::laplace: {
      const double var = variance(model).value;
      const double t = var * w2;
      const double lift = 1.0 + 0.5 * t;
      return var * lift * lift / (1.0 + 2.0 * t);
    }
    case Family::cauchy: return std::expm1(2.0 * model.scale() * omega) / (2.0 * w2);
    case Family::uniform: break;
  }
  throw UnsupportedModel("asv_closed_form: no closed form for uniform noise");
}

AsvInfimum inf_asv(const NoiseModel& model, double theta_r, int grid_points) {
  const double hi = max_omega(theta_r);
  const double lo = kOmegaFloorFraction * hi;
  const auto interior = interior_minimum(model, lo, hi, grid_points);
  const Moment var = variance(model);
  if (var.defined && var.value <= interior.value * (1.0 + kBoundaryTieSlack)) {
    return {kNaN, true, var.value};
  }
  return {interior.argmin, false, interior.value};
}

AsvInfimum inf_asv_closed_form(const NoiseModel& model, double theta_r) {
  const double hi = max_omega(theta_r);
  // Laplace AsV is unimodal in ω with its minimum at σ_η·ω = 1; Cauchy AsV is
  // unimodal with its minimum at 2γω = c, c = 2 + W₀(−2e⁻²).
  auto capped = [&](double omega_star, double value) -> AsvInfimum {
    if (omega_star <= hi) return {omega_star, false, value};
    return {hi, false, asv_closed_form(model, hi)};
  };
  switch (model.family()) {
    case Family::gaussian: return {kNaN, true, variance(model).value};
    case Family::laplace: {
      const double var = variance(model).value;
      return capped(1.0 / std::sqrt(var), 0.75 * var);
    }
    case Family::cauchy: {
      const double c = 2.0 + lambert_w0(-2.0 * std::exp(-2.0));
      const double gamma = model.scale();
      return capped(c / (2.0 * gamma), 2.0 * gamma * gamma * std::expm1(c) / (c * c));
    }
    case Family::uniform: break;
  }
  throw UnsupportedModel("inf_asv_closed_form: no closed form for uniform noise");
}

EfficiencyReport relative_efficiency(const NoiseModel& model, double theta_r, Method method) {
  if (model.family() == Family::uniform) method = Method::numeric;
  const AsvInfimum inf =
      method == Method::closed_form ? inf_asv_closed_form(model, theta_r) : inf_asv(model, theta_r);
  const double info = fisher(model);
  const double eff = std::isinf(info) ? 0.0 : 1.0 / (info * inf.value);
  return {info, inf.value, inf.omega_star, inf.limit_at_zero, eff, method};
}

double to_db(double v) {
  if (std::isnan(v) || v < 0.0) return kNaN;
  if (v == 0.0) return -kInf;
  if (std::isinf(v)) return kInf;
  return 10.0 * std::log10(v);
}

std::vector<SweepRow> asv_sweep(const NoiseModel& model, std::span<const double> omega_grid) {
  if (omega_grid.empty()) throw DomainError("asv_sweep: empty grid");
  const double inv_fisher = 1.0 / fisher(model);
  std::vector<SweepRow> rows;
  rows.reserve(omega_grid.size());
  for (double w : omega_grid) {
    const double a = asv(model, w);
    rows.push_back({w, a, to_db(a), inv_fisher, to_db(inv_fisher)});
  }
  return rows;
}

}  // namespace cmest
