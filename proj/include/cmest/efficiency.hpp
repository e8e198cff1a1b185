#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "cmest/noise_model.hpp"

namespace cmest {

/// E[z_L] = √ρ·e^{jωθ}φ(ω) as a real 2-vector (real, imaginary).
using MeanVector = Eigen::Vector2d;
/// Asymptotic covariance Σ(θ) of √L·(z_L − z̄(θ)).
using AsymCovariance = Eigen::Matrix2d;

MeanVector mean_vector(const NoiseModel& model, double omega, double theta, double rho);
/// ∂z̄/∂θ.
Eigen::Vector2d mean_vector_derivative(const NoiseModel& model, double omega, double theta, double rho);
AsymCovariance sigma_matrix(const NoiseModel& model, double omega, double theta, double rho);

/// Asymptotic variance of the minimum-asymptotic-variance estimator,
///   AsV(ω) = v_c·v_s / (ω²[v_s·φ_I²(ω) + v_c·φ_R²(ω)]).
/// Returns +inf at zeros of the characteristic function. Throws DomainError for ω ≤ 0.
double asv(const NoiseModel& model, double omega);

/// [(∂z̄/∂θ)ᵀ Σ⁻¹(θ) (∂z̄/∂θ)]⁻¹ evaluated with dense 2×2 algebra. Independent
/// of θ and equal to asv(); kept as a second route for consistency checks.
double asv_quadratic_form(const NoiseModel& model, double omega, double theta, double rho = 1.0);

/// Closed forms for Gaussian, Laplace and Cauchy noise. Throws UnsupportedModel for Uniform.
double asv_closed_form(const NoiseModel& model, double omega);

/// Infimum of AsV over ω ∈ (0, 2π/θ_R].
struct AsvInfimum {
  double omega_star;    ///< minimizer; NaN when `limit_at_zero`
  bool limit_at_zero;   ///< infimum is the ω → 0 limit (the noise variance)
  double value;
};

AsvInfimum inf_asv(const NoiseModel& model, double theta_r, int grid_points = 256);
/// Same, from the analytic minimizers (Gaussian/Laplace/Cauchy only).
AsvInfimum inf_asv_closed_form(const NoiseModel& model, double theta_r);

enum class Method { closed_form, numeric };

struct EfficiencyReport {
  double fisher;
  double inf_asv;
  double omega_star;
  bool omega_star_limit;
  double efficiency;
  Method method;
};

/// E(η) = [I(η)·inf AsV]⁻¹ with 1/∞ = 0. Uniform always uses the numeric infimum.
EfficiencyReport relative_efficiency(const NoiseModel& model, double theta_r,
                                     Method method = Method::numeric);

struct SweepRow {
  double omega;
  double asv;
  double asv_db;
  double inv_fisher;
  double inv_fisher_db;
};

/// 10·log₁₀(v); non-finite for v ≤ 0 or v = +inf.
double to_db(double v);

std::vector<SweepRow> asv_sweep(const NoiseModel& model, std::span<const double> omega_grid);

/// Lower end of the searched ω range, as a fraction of 2π/θ_R.
inline constexpr double kOmegaFloorFraction = 1e-4;

}  // namespace cmest
