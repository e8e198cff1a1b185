#include "cmest/cf_analysis.hpp"

#include <cmath>
#include <limits>

#include "cmest/errors.hpp"

namespace cmest {

TrigMoments trig_moments(const NoiseModel& model, double omega) {
  // With d₁ = 1 − φ_R(ω), d₂ = 1 − φ_R(2ω):
  //   v_c = ½ + ½φ_R(2ω) − φ_R²(ω) = 2d₁ − d₁² − d₂/2
  //   v_s = ½ − ½φ_R(2ω) − φ_I²(ω) = d₂/2 − φ_I²
  const double d1 = cf_complement(model, omega);
  const double d2 = cf_complement(model, 2.0 * omega);
  const double phi_i = cf(model, omega).phi_i;
  return {2.0 * d1 - d1 * d1 - 0.5 * d2, 0.5 * d2 - phi_i * phi_i};
}

Theorem1Residuals theorem1_residuals(const NoiseModel& model, double omega) {
  const double info = fisher(model);
  if (!std::isfinite(info)) {
    throw UnsupportedModel(std::string(family_name(model.family())) +
                           ": infinite Fisher information, bounds are vacuous");
  }
  const auto [phi_r, phi_i] = cf(model, omega);
  const auto [v_c, v_s] = trig_moments(model, omega);
  const double w2 = omega * omega;
  return {info * v_c - w2 * phi_i * phi_i, info * v_s - w2 * phi_r * phi_r};
}

namespace {

QuadratureSpec scaled_spec(const NoiseModel& model, QuadratureSpec spec) {
  spec.tail_cut *= model.scale();
  return spec;
}

}  // namespace

double expect(const NoiseModel& model, const ScalarFunction& f, const QuadratureSpec& spec) {
  const auto weighted = [&](double x) {
    const double p = pdf(model, x);
    return p == 0.0 ? 0.0 : f(x) * p;
  };
  const auto breaks = kinks(model);
  if (model.family() == Family::uniform) {
    return integrate(weighted, -model.scale(), model.scale(), spec);
  }
  const double inf = std::numeric_limits<double>::infinity();
  return integrate(weighted, -inf, inf, breaks, scaled_spec(model, spec));
}

double expect_trig(const NoiseModel& model, const ScalarFunction& h, double omega, Kernel kernel,
                   const QuadratureSpec& spec) {
  const auto trig = [kernel](double v) { return kernel == Kernel::cosine ? std::cos(v) : std::sin(v); };
  const auto weighted = [&](double x) {
    const double p = pdf(model, x);
    return p == 0.0 ? 0.0 : h(x) * p;
  };
  if (omega == 0.0) {
    if (kernel == Kernel::sine) return 0.0;
    return expect(model, h, spec);
  }
  const auto full = [&](double x) { return weighted(x) * trig(omega * x); };
  if (model.family() == Family::uniform) {
    return integrate(full, -model.scale(), model.scale(), spec);
  }

  const QuadratureSpec s = scaled_spec(model, spec);
  const double cut = s.tail_cut;
  const auto breaks = kinks(model);
  const double centre = integrate(full, -cut, cut, breaks, s);

  // The tail integrator needs ω > 0: fold the sign into the kernel.
  const double w = std::abs(omega);
  const double sign = (kernel == Kernel::sine && omega < 0.0) ? -1.0 : 1.0;
  const double right = integrate_oscillatory_tail(weighted, w, kernel, cut, s);
  // ∫_{-∞}^{-T} F(x) k(wx) dx = ∫_T^∞ F(-y) k(-wy) dy, with sin odd.
  const double left_raw =
      integrate_oscillatory_tail([&](double y) { return weighted(-y); }, w, kernel, cut, s);
  const double left = kernel == Kernel::sine ? -left_raw : left_raw;
  return centre + sign * (right + left);
}

double TrigTestFunction::operator()(double x) const {
  return offset + cos_coeff * std::cos(omega * x) + sin_coeff * std::sin(omega * x);
}

double TrigTestFunction::derivative(double x) const {
  return omega * (sin_coeff * std::cos(omega * x) - cos_coeff * std::sin(omega * x));
}

TrigTestFunction cos_test_function(const NoiseModel& model, double omega) {
  return {omega, -cf(model, omega).phi_r, 1.0, 0.0};
}

TrigTestFunction sin_test_function(const NoiseModel& model, double omega) {
  return {omega, -cf(model, omega).phi_i, 0.0, 1.0};
}

double stein_check(const NoiseModel& model, const ScalarFunction& g, const ScalarFunction& g_prime,
                   const QuadratureSpec& spec) {
  const double lhs = expect(model, [&](double x) { return g(x) * score(model, x); }, spec);
  const double rhs = expect(model, g_prime, spec);
  return std::abs(lhs + rhs);
}

double stein_check(const NoiseModel& model, const TrigTestFunction& g, const QuadratureSpec& spec) {
  const auto s = [&](double x) { return score(model, x); };
  const auto one = [](double) { return 1.0; };
  const double w = g.omega;

  // E[g s] = offset·E[s] + a·E[s cos] + b·E[s sin]
  double g_score = 0.0;
  if (g.offset != 0.0) g_score += g.offset * expect(model, s, spec);
  if (g.cos_coeff != 0.0) g_score += g.cos_coeff * expect_trig(model, s, w, Kernel::cosine, spec);
  if (g.sin_coeff != 0.0) g_score += g.sin_coeff * expect_trig(model, s, w, Kernel::sine, spec);

  // E[g'] = ω(b·E[cos] − a·E[sin])
  double g_deriv = 0.0;
  if (g.sin_coeff != 0.0) g_deriv += w * g.sin_coeff * expect_trig(model, one, w, Kernel::cosine, spec);
  if (g.cos_coeff != 0.0) g_deriv -= w * g.cos_coeff * expect_trig(model, one, w, Kernel::sine, spec);

  return std::abs(g_score + g_deriv);
}

}  // namespace cmest
