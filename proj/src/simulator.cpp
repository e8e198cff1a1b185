#include "cmest/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <thread>

#include "cmest/cf_analysis.hpp"
#include "cmest/efficiency.hpp"
#include "cmest/errors.hpp"

namespace cmest {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSingularMoment = 1e-12;

}  // namespace

std::string_view estimator_name(EstimatorKind kind) noexcept {
  return kind == EstimatorKind::angle ? "angle" : "gls";
}

void SimConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("simulation config: " + msg); };
  if (sensors < 1) fail("L must be >= 1");
  if (!(rho > 0.0) || !std::isfinite(rho)) fail("rho must be > 0");
  if (!(sigma_nu2 >= 0.0) || !std::isfinite(sigma_nu2)) fail("sigma_nu2 must be >= 0");
  if (!(theta_r > 0.0) || !std::isfinite(theta_r)) fail("theta_r must be > 0");
  if (!(omega > 0.0)) fail("omega must be > 0");
  if (omega * theta_r > kTwoPi * (1.0 + 1e-12)) fail("omega must not exceed 2*pi/theta_r");
  if (!(theta >= 0.0 && theta <= theta_r)) fail("theta must lie in [0, theta_r]");
  if (trials < 2) fail("trials must be >= 2");
}

std::complex<double> received_signal(std::span<const double> sensing_noise, double omega, double theta,
                                     double rho, std::complex<double> channel_noise) {
  double re = 0.0, im = 0.0;
  for (double eta : sensing_noise) {
    const double phase = omega * (theta + eta);
    re += std::cos(phase);
    im += std::sin(phase);
  }
  const double amp = std::sqrt(rho);
  const auto count = static_cast<double>(sensing_noise.size());
  return (amp * std::complex<double>(re, im) + channel_noise) / count;
}

std::complex<double> simulate_received(const SimConfig& config, RandomStream& stream) {
  const std::vector<double> eta = sample(config.model, stream, config.sensors);
  const double nu_sd = std::sqrt(0.5 * config.sigma_nu2);
  const double nu_r = nu_sd * stream.normal();
  const double nu_i = nu_sd * stream.normal();
  return received_signal(eta, config.omega, config.theta, config.rho, {nu_r, nu_i});
}

double angle_estimate(std::complex<double> z, double omega) {
  if (!(omega > 0.0)) throw DomainError("angle_estimate: omega must be > 0");
  if (z == std::complex<double>(0.0, 0.0)) throw DegenerateSignal("angle_estimate: z = 0 has no phase");
  double phase = std::arg(z);
  if (phase < 0.0) phase += kTwoPi;
  const double period = kTwoPi / omega;
  double theta = phase / omega;
  if (theta >= period) theta -= period;
  return theta;
}

namespace {

struct CostTerms {
  double v_c;
  double v_s;
};

CostTerms checked_moments(const NoiseModel& model, double omega) {
  const auto [v_c, v_s] = trig_moments(model, omega);
  if (!(v_c > kSingularMoment)) {
    throw SingularCovariance("gls_cost: covariance is singular (v_c = " + std::to_string(v_c) + ")");
  }
  if (!(v_s > kSingularMoment)) {
    throw SingularCovariance("gls_cost: covariance is singular (v_s = " + std::to_string(v_s) + ")");
  }
  return {v_c, v_s};
}

}  // namespace

double gls_cost(const NoiseModel& model, std::complex<double> z, double omega, double theta, double rho) {
  checked_moments(model, omega);
  const Eigen::Vector2d d = Eigen::Vector2d(z.real(), z.imag()) - mean_vector(model, omega, theta, rho);
  const AsymCovariance sigma = sigma_matrix(model, omega, theta, rho);
  return d.dot(sigma.ldlt().solve(d));
}

double gls_cost_expanded(const NoiseModel& model, std::complex<double> z, double omega, double theta,
                         double rho) {
  const auto [v_c, v_s] = checked_moments(model, omega);
  const double phi = cf(model, omega).phi_r;
  const double zr = z.real(), zi = z.imag();
  const double wt = omega * theta;
  const double bracket = -4.0 * std::pow(rho, 1.5) * v_s * phi * (zi * std::sin(wt) + zr * std::cos(wt)) +
                         2.0 * rho * rho * v_s * phi * phi +
                         rho * (v_c - v_s) * (zi * zi - zr * zr) * std::cos(2.0 * wt) -
                         2.0 * rho * (v_c - v_s) * zi * zr * std::sin(2.0 * wt) +
                         rho * (v_c + v_s) * (zi * zi + zr * zr);
  return bracket / (2.0 * rho * rho * v_c * v_s);
}

double gls_estimate(const NoiseModel& model, std::complex<double> z, double omega, double theta_r, double rho,
                    int grid_points) {
  if (grid_points < 3) throw DomainError("gls_estimate: grid needs at least 3 points");
  if (!(theta_r > 0.0)) throw DomainError("gls_estimate: theta_r must be > 0");
  const auto [v_c, v_s] = checked_moments(model, omega);
  auto cost = [&](double t) { return gls_cost(model, z, omega, t, rho); };

  const auto n = static_cast<std::size_t>(grid_points);
  std::size_t best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = i + 1 == n ? theta_r : theta_r * static_cast<double>(i) / static_cast<double>(n - 1);
    const double c = cost(grid[i]);
    if (c < best_cost) {
      best_cost = c;
      best = i;
    }
  }
  const double lo = grid[best == 0 ? 0 : best - 1];
  const double hi = grid[best + 1 == n ? n - 1 : best + 1];
  const auto refined = golden_section(cost, lo, hi, 1e-13 * std::max(1.0, theta_r));

  std::vector<double> candidates = {grid[best], refined.argmin};
  const double phi = cf(model, omega).phi_r;
  if (cf(model, omega).phi_i == 0.0 && std::abs(z) > 0.0) {
    // For symmetric noise the cost depends on α = ∠z − ωθ through
    // v_s(|z|cos α − √ρφ)² + v_c|z|²sin²α, stationary at α ∈ {0, π} and
    // cos α = v_s√ρφ / ((v_s − v_c)|z|).
    std::vector<double> alphas = {0.0, std::numbers::pi};
    if (v_s != v_c) {
      const double x = v_s * std::sqrt(rho) * phi / ((v_s - v_c) * std::abs(z));
      if (std::abs(x) <= 1.0) {
        alphas.push_back(std::acos(x));
        alphas.push_back(-std::acos(x));
      }
    }
    const double period = kTwoPi / omega;
    for (double alpha : alphas) {
      const double base = (std::arg(z) - alpha) / omega;
      const double k0 = std::floor((lo - base) / period);
      for (double k = k0; k <= k0 + 2.0; k += 1.0) {
        const double t = base + k * period;
        if (t >= lo && t <= hi) candidates.push_back(t);
      }
    }
  }

  const double anchor = angle_estimate(z, omega);
  double chosen = refined.argmin;
  double chosen_cost = cost(chosen);
  for (double t : candidates) {
    const double c = cost(t);
    const double slack = 1e-14 * std::max(1.0, std::abs(chosen_cost));
    if (c < chosen_cost - slack ||
        (std::abs(c - chosen_cost) <= slack && std::abs(t - anchor) < std::abs(chosen - anchor))) {
      chosen = t;
      chosen_cost = std::min(c, chosen_cost);
    }
  }
  return chosen;
}

TrialOutput run_trial(const SimConfig& config, std::uint64_t index) {
  RandomStream stream = derive_substream(config.seed, index);
  const std::complex<double> z = simulate_received(config, stream);
  double theta_hat = std::numeric_limits<double>::quiet_NaN();
  if (z != std::complex<double>(0.0, 0.0)) {
    theta_hat = config.estimator == EstimatorKind::angle
                    ? angle_estimate(z, config.omega)
                    : gls_estimate(config.model, z, config.omega, config.theta_r, config.rho);
  }
  return {z.real(), z.imag(), theta_hat};
}

std::vector<TrialOutput> run_trials(const SimConfig& config) {
  config.validate();
  std::vector<TrialOutput> out(config.trials);
  unsigned workers = config.threads != 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, config.trials));
  if (workers <= 1) {
    for (std::size_t i = 0; i < config.trials; ++i) out[i] = run_trial(config, i);
    return out;
  }
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < config.trials; i += workers) out[i] = run_trial(config, i);
      });
    }
  }
  return out;
}

CampaignSummary run_campaign(const SimConfig& config) {
  config.validate();
  const double predicted = asv(config.model, config.omega);
  if (!std::isfinite(predicted)) {
    throw ConfigError("simulation config: AsV is infinite at this omega (characteristic function zero)");
  }
  const double sd = std::sqrt(predicted / static_cast<double>(config.sensors));
  const double upper = config.estimator == EstimatorKind::angle ? kTwoPi / config.omega : config.theta_r;
  if (config.theta < 3.0 * sd || config.theta > upper - 3.0 * sd) {
    throw ConfigError("simulation config: theta within 3 predicted standard deviations (" + std::to_string(sd) +
                      ") of the estimator's wrap boundary");
  }

  const auto trials = run_trials(config);
  std::vector<double> estimates;
  estimates.reserve(trials.size());
  for (const auto& t : trials) {
    if (!std::isnan(t.theta_hat)) estimates.push_back(t.theta_hat);
  }
  if (estimates.size() < 2) throw NumericFailure("run_campaign: fewer than two usable trials", 0.0, 0.0);

  const auto n = static_cast<double>(estimates.size());
  const double mean = pairwise_sum(estimates) / n;
  std::vector<double> sq(estimates.size());
  std::transform(estimates.begin(), estimates.end(), sq.begin(), [mean](double v) { return (v - mean) * (v - mean); });
  const double var = pairwise_sum(sq) / (n - 1.0);
  return {mean, mean - config.theta, var, static_cast<double>(config.sensors) * var, predicted, estimates.size()};
}

}  // namespace cmest
