#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "cmest/noise_model.hpp"
#include "cmest/numerics.hpp"

namespace cmest {

enum class EstimatorKind { angle, gls };

std::string_view estimator_name(EstimatorKind kind) noexcept;

/// One network experiment: L sensors observing θ + η_l, each sending
/// √ρ·e^{jωx_l} over a Gaussian multiple-access channel with CN(0, σ_ν²) noise.
struct SimConfig {
  NoiseModel model;
  std::size_t sensors = 1000;
  double rho = 1.0;
  double sigma_nu2 = 1.0;
  double omega = 1.0;
  double theta = 1.0;
  double theta_r = 1.0;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  EstimatorKind estimator = EstimatorKind::angle;
  /// Worker threads for run_campaign; 0 = hardware concurrency. Results do not depend on it.
  unsigned threads = 0;

  /// Throws ConfigError on any violated constraint (ω·θ_R ≤ 2π, θ ∈ [0, θ_R], ...).
  void validate() const;
};

struct TrialOutput {
  double z_r;
  double z_i;
  double theta_hat;  ///< NaN when the received signal was exactly zero
};

struct CampaignSummary {
  double mean_theta_hat;
  double bias;
  double variance;          ///< unbiased (n − 1) sample variance of θ̂
  double l_times_variance;
  double predicted_asv;
  std::size_t trials_used;
};

/// z_L = (√ρ Σ e^{jω(θ+η_l)} + ν) / L for given sensing and channel noise.
std::complex<double> received_signal(std::span<const double> sensing_noise, double omega, double theta,
                                     double rho, std::complex<double> channel_noise);

/// Draws η_1..η_L and then ν (real, imaginary each N(0, σ_ν²/2)) from `stream`.
std::complex<double> simulate_received(const SimConfig& config, RandomStream& stream);

/// θ̂ = ∠z/ω with the angle lifted to [0, 2π); result in [0, 2π/ω).
/// Throws DegenerateSignal for z = 0.
double angle_estimate(std::complex<double> z, double omega);

/// [z − z̄(θ)]ᵀ Σ⁻¹(θ) [z − z̄(θ)]. Throws SingularCovariance if v_c or v_s ≤ 1e-12.
double gls_cost(const NoiseModel& model, std::complex<double> z, double omega, double theta, double rho);

/// The same cost expanded in trigonometric terms of ωθ (symmetric noise only).
double gls_cost_expanded(const NoiseModel& model, std::complex<double> z, double omega, double theta,
                         double rho);

/// argmin of gls_cost over [0, θ_R]: grid scan, golden-section refinement,
/// then a comparison against the analytic stationary points inside the
/// refined cell. Ties go to the point nearest angle_estimate(z, ω).
double gls_estimate(const NoiseModel& model, std::complex<double> z, double omega, double theta_r,
                    double rho, int grid_points = 1024);

/// Trial `index` uses derive_substream(config.seed, index).
TrialOutput run_trial(const SimConfig& config, std::uint64_t index);

/// All trials in index order. Parallel over config.threads; deterministic.
std::vector<TrialOutput> run_trials(const SimConfig& config);

/// Runs the campaign and summarizes θ̂. Refuses (ConfigError) configurations
/// whose θ lies within three predicted standard deviations of the estimator's
/// wrap boundary, where aliasing would bias the variance.
CampaignSummary run_campaign(const SimConfig& config);

}  // namespace cmest
