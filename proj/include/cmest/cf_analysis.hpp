#pragma once

#include "cmest/noise_model.hpp"
#include "cmest/numerics.hpp"

namespace cmest {

/// Variances of cos(ωη) and sin(ωη).
struct TrigMoments {
  double v_c;
  double v_s;
};

/// Slack in the two Fisher-information / characteristic-function bounds:
///   r_imag = I·v_c − ω²φ_I²,   r_real = I·v_s − ω²φ_R².
/// Both are zero at ω = 0 and strictly positive otherwise.
struct Theorem1Residuals {
  double r_imag;
  double r_real;
};

TrigMoments trig_moments(const NoiseModel& model, double omega);

/// Throws UnsupportedModel when the Fisher information is infinite.
Theorem1Residuals theorem1_residuals(const NoiseModel& model, double omega);

// Expectations by quadrature -------------------------------------------------
//
// `spec.tail_cut` is measured in units of the model scale.

/// E[f(η)].
double expect(const NoiseModel& model, const ScalarFunction& f, const QuadratureSpec& spec = {});

/// E[h(η)·k(ωη)] with k = cos or sin. Infinite tails go through the
/// oscillatory tail integrator, so h may decay as slowly as the Cauchy pdf.
double expect_trig(const NoiseModel& model, const ScalarFunction& h, double omega, Kernel kernel,
                   const QuadratureSpec& spec = {});

/// g(x) = offset + cos_coeff·cos(ωx) + sin_coeff·sin(ωx).
struct TrigTestFunction {
  double omega;
  double offset;
  double cos_coeff;
  double sin_coeff;

  double operator()(double x) const;
  double derivative(double x) const;
};

/// g₁(x) = cos(ωx) − φ_R(ω).
TrigTestFunction cos_test_function(const NoiseModel& model, double omega);
/// g₂(x) = sin(ωx) − φ_I(ω).
TrigTestFunction sin_test_function(const NoiseModel& model, double omega);

/// |E[g(η)s(η)] + E[g'(η)]| for a general differentiable g with g·p → 0 at ±∞.
/// The integrands must not oscillate in heavy tails; use the TrigTestFunction
/// overload for trigonometric g.
double stein_check(const NoiseModel& model, const ScalarFunction& g, const ScalarFunction& g_prime,
                   const QuadratureSpec& spec = {});

double stein_check(const NoiseModel& model, const TrigTestFunction& g, const QuadratureSpec& spec = {});

}  // namespace cmest
