// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cmest/cli.hpp"
#include "cmest/efficiency.hpp"
#include "cmest/numerics.hpp"
#include "cmest/simulator.hpp"

using namespace cmest;
using Json = nlohmann::ordered_json;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kSeed = 12345;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct CliResult {
  int code;
  std::string out;
};

CliResult cli_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str()};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome table_efficiencies() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  auto eff = [](const std::string& dist) {
    const auto r = cli_run({"efficiency", "--dist", dist, "--theta-r", cli::format_number(kPi)});
    return r.code == 0 ? Json::parse(r.out)["relative_efficiency"].get<double>() : std::nan("");
  };
  const double g = eff("gaussian:sigma=1");
  const double l = eff("laplace:variance=1");
  const double c = eff("cauchy:gamma=1");
  const double u = eff("uniform:a=1");
  const double dt = seconds_since(t0);
  o.require(g == 1.0, fmt("gaussian %.17g", g));
  o.require(std::abs(l - 2.0 / 3.0) < 1e-6, fmt("laplace %.9f", l));
  o.require(std::abs(c - 0.647613) < 1e-4, fmt("cauchy %.9f", c));
  o.require(u == 0.0, fmt("uniform %g", u));
  o.require(dt < 1.0, fmt("%.3f s", dt));
  return o;
}

Outcome laplace_infimum() {
  Outcome o;
  const auto r = inf_asv(NoiseModel::from_variance(Family::laplace, 1.0), kPi);
  o.require(!r.limit_at_zero && std::abs(r.omega_star - 1.0) < 1e-4, fmt("omega* %.9f", r.omega_star));
  o.require(std::abs(r.value - 0.75) < 1e-6, fmt("value %.12f", r.value));
  return o;
}

Outcome cauchy_critical_point() {
  Outcome o;
  const double c = 2.0 + lambert_w0(-2.0 * std::exp(-2.0));
  o.require(std::abs(c - 1.593625) < 1e-5, fmt("c %.9f", c));
  for (double gamma : {0.5, 1.0, 2.0}) {
    const auto r = inf_asv(NoiseModel::cauchy(gamma), kPi * gamma);
    o.require(std::abs(r.omega_star - c / (2.0 * gamma)) < 1e-5 / gamma,
              fmt("gamma %g omega* %.9f vs %.9f", gamma, r.omega_star, c / (2.0 * gamma)));
  }
  return o;
}

Outcome gaussian_limit() {
  Outcome o;
  const NoiseModel g = NoiseModel::gaussian(1.0);
  bool monotone = true;
  double prev = 0.0;
  for (int i = 1; i <= 200; ++i) {
    const double a = asv(g, 3.0 * i / 200.0);
    monotone = monotone && a >= prev;
    prev = a;
  }
  o.require(monotone, "nondecreasing on 200 points in (0, 3]");
  const double a = asv(g, 1e-3);
  o.require(std::abs(a - 1.0) < 1e-5, fmt("asv(1e-3) - var = %.3g", a - 1.0));
  return o;
}

Outcome bound_strictness() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  for (const char* dist : {"gaussian:sigma=1", "laplace:variance=1", "cauchy:gamma=1"}) {
    const auto r = cli_run({"verify", "--dist", dist, "--omega-min", "0.05", "--omega-max", "8", "--points", "60"});
    double worst_stein = 0.0, min_r = INFINITY;
    for (const auto& row : cli::parse_csv(r.out).rows) {
      min_r = std::min({min_r, row[1].value_or(-1.0), row[2].value_or(-1.0)});
      worst_stein = std::max({worst_stein, row[3].value_or(1.0), row[4].value_or(1.0)});
    }
    o.require(r.code == 0, fmt("%s exit %d min r %.3g max stein %.3g", dist, r.code, min_r, worst_stein));
  }
  const double dt = seconds_since(t0);
  o.require(dt < 30.0, fmt("%.2f s", dt));
  return o;
}

SimConfig campaign(const NoiseModel& m, double omega, std::size_t sensors, double sigma_nu2) {
  SimConfig c;
  c.model = m;
  c.omega = omega;
  // Largest admissible range for this ω, true value in the middle of it.
  c.theta_r = 2.0 * kPi / omega;
  c.theta = 0.5 * c.theta_r;
  c.sensors = sensors;
  c.trials = 4000;
  c.rho = 1.0;
  c.sigma_nu2 = sigma_nu2;
  c.seed = kSeed;
  c.estimator = EstimatorKind::angle;
  return c;
}

Outcome monte_carlo_variance() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  struct Case {
    NoiseModel model;
    double omega;
    double tol;
  };
  const std::vector<Case> cases = {
      {NoiseModel::gaussian(1.0), 0.5, 0.05},
      {NoiseModel::gaussian(1.0), 1.0, 0.05},
      {NoiseModel::from_variance(Family::laplace, 1.0), 0.7, 0.05},
      {NoiseModel::from_variance(Family::laplace, 1.0), 1.0, 0.05},
      {NoiseModel::cauchy(1.0), 0.8, 0.07},
      {NoiseModel::cauchy(1.0), 1.5, 0.07},
  };
  for (const auto& c : cases) {
    const auto s = run_campaign(campaign(c.model, c.omega, 2000, 1.0));
    const double rel = std::abs(s.l_times_variance - s.predicted_asv) / s.predicted_asv;
    // A doubled prediction must be rejected by the same test.
    const double rel2 = std::abs(s.l_times_variance - 2.0 * s.predicted_asv) / (2.0 * s.predicted_asv);
    o.require(rel < c.tol && rel2 >= c.tol, fmt("%s w=%g L*var %.4f AsV %.4f (%.1f%%)",
                                                std::string(family_name(c.model.family())).c_str(), c.omega,
                                                s.l_times_variance, s.predicted_asv, 100.0 * rel));
  }
  const double dt = seconds_since(t0);
  o.require(dt < 120.0, fmt("%.1f s", dt));
  return o;
}

Outcome channel_noise_washout() {
  Outcome o;
  for (double omega : {0.5, 1.0}) {
    const auto lo = run_campaign(campaign(NoiseModel::gaussian(1.0), omega, 5000, 0.1));
    const auto hi = run_campaign(campaign(NoiseModel::gaussian(1.0), omega, 5000, 10.0));
    const double change = std::abs(hi.l_times_variance - lo.l_times_variance) / lo.l_times_variance;
    o.require(change < 0.03, fmt("w=%g L*var %.4f -> %.4f (%.2f%%)", omega, lo.l_times_variance,
                                 hi.l_times_variance, 100.0 * change));
  }
  return o;
}

Outcome estimator_equivalence() {
  Outcome o;
  std::uint64_t index = 0;
  for (const auto& m : {NoiseModel::gaussian(1.0), NoiseModel::from_variance(Family::laplace, 1.0),
                        NoiseModel::cauchy(1.0), NoiseModel::uniform(1.0)}) {
    SimConfig c = campaign(m, 1.0, 2000, 1.0);
    RandomStream s = derive_substream(kSeed, index++);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const auto z = simulate_received(c, s);
      worst = std::max(worst, std::abs(gls_estimate(m, z, c.omega, c.theta_r, c.rho) - angle_estimate(z, c.omega)));
    }
    o.require(worst < 1e-6, fmt("%s max diff %.2g", std::string(family_name(m.family())).c_str(), worst));
  }
  return o;
}

std::vector<std::vector<std::optional<double>>> sweep_rows(const std::string& dist, double lo, double hi, int n) {
  const auto r = cli_run({"sweep", "--dist", dist, "--omega-min", cli::format_number(lo), "--omega-max",
                          cli::format_number(hi), "--points", std::to_string(n)});
  if (r.code != 0) return {};
  return cli::parse_csv(r.out).rows;
}

Outcome figure_shapes() {
  Outcome o;
  {
    const auto rows = sweep_rows("gaussian:sigma=1", 1e-3, 3.0, 300);
    bool rising = !rows.empty();
    for (std::size_t i = 1; i < rows.size(); ++i) rising = rising && *rows[i][1] >= *rows[i - 1][1];
    const bool limit = !rows.empty() && std::abs(*rows[0][1] - *rows[0][3]) < 1e-5;
    o.require(limit && rising, "gaussian: starts at 1/I and is nondecreasing");
  }
  {
    const auto rows = sweep_rows("laplace:variance=1", 0.01, 4.0, 400);
    double lowest = INFINITY, at = 0.0;
    bool above_crb = !rows.empty();
    for (const auto& r : rows) {
      if (*r[1] < lowest) lowest = *r[1], at = *r[0];
      above_crb = above_crb && *r[1] > *r[3];
    }
    const bool dip = lowest >= 0.75 - 1e-12 && lowest < 0.75 + 1e-4 && std::abs(at - 1.0) < 0.02;
    const bool rises = !rows.empty() && *rows.front()[1] > lowest + 0.2 && *rows.back()[1] > lowest + 0.2;
    o.require(dip && rises && above_crb, fmt("laplace: min %.6f at w=%.3f, above 1/I=0.5", lowest, at));
  }
  {
    const auto rows = sweep_rows("uniform:a=1", 0.5, kPi, 101);
    const bool pole = !rows.empty() && !rows.back()[1].has_value() && !rows.back()[2].has_value();
    bool climbing = !rows.empty();
    for (std::size_t i = rows.size() / 2; i + 2 < rows.size(); ++i) climbing = climbing && *rows[i + 1][1] > *rows[i][1];
    const double last = rows.size() > 1 ? rows[rows.size() - 2][1].value_or(0.0) : 0.0;
    o.require(pole && climbing && last > 100.0 * *rows.front()[1],
              fmt("uniform: diverges to the pole at pi (last finite %.3g)", last));
  }
  return o;
}

Outcome scale_invariance() {
  Outcome o;
  for (const auto& m : {NoiseModel::gaussian(1.0), NoiseModel::laplace(1.0), NoiseModel::cauchy(1.0),
                        NoiseModel::uniform(1.0)}) {
    const double e0 = relative_efficiency(m, 1.0).efficiency;
    double worst = 0.0;
    for (double alpha : {0.5, 2.0, 10.0}) {
      worst = std::max(worst, std::abs(relative_efficiency(m.scaled(alpha), 1.0 / alpha).efficiency - e0));
    }
    o.require(worst < 1e-9, fmt("%s max diff %.2g", std::string(family_name(m.family())).c_str(), worst));
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"table efficiencies", table_efficiencies},
      {"laplace infimum", laplace_infimum},
      {"cauchy critical point", cauchy_critical_point},
      {"gaussian limit and monotonicity", gaussian_limit},
      {"fisher/cf bounds strict", bound_strictness},
      {"monte carlo variance", monte_carlo_variance},
      {"channel-noise washout", channel_noise_washout},
      {"estimator equivalence", estimator_equivalence},
      {"figure shapes", figure_shapes},
      {"scale invariance", scale_invariance},
  };
  int failures = 0;
  int n = 0;
  for (const auto& [name, check] : criteria) {
    ++n;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s  %2d %-32s %s\n", o.pass ? "PASS" : "FAIL", n, name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", n - failures, n);
  return failures == 0 ? 0 : 1;
}
