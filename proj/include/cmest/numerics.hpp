#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>

namespace cmest {

using ScalarFunction = std::function<double(double)>;

// ---------------------------------------------------------------------------
// Quadrature

/// Controls for the adaptive Gauss-Kronrod integrator.
///
/// `tail_cut` is the abscissa beyond which an infinite range is handled by
/// the tail transformation rather than integrated directly. It should sit
/// where the integrand has started to decay; tail accuracy does not depend
/// on it being large.
struct QuadratureSpec {
  double abs_tol = 1e-11;
  double rel_tol = 1e-11;
  int max_subdivisions = 4000;
  double tail_cut = 10.0;

  void validate() const;
};

/// Integrates `f` over [lower, upper]. Either end may be infinite; infinite
/// tails are mapped onto a finite interval via x = c + T u / (1 - u).
/// `breakpoints` are interior points where f has a kink or jump.
///
/// Throws NumericFailure when the error target is not met within
/// `spec.max_subdivisions` bisections.
double integrate(const ScalarFunction& f, double lower, double upper,
                 const QuadratureSpec& spec = {});
double integrate(const ScalarFunction& f, double lower, double upper,
                 std::span<const double> breakpoints, const QuadratureSpec& spec = {});

enum class Kernel { cosine, sine };

/// ∫_lower^∞ amplitude(x)·k(ωx) dx for a decaying, non-oscillating amplitude.
///
/// The range is cut into half-period panels, each integrated adaptively, and
/// the partial sums are accelerated with Wynn's epsilon algorithm. This
/// converges for amplitudes like 1/x² where the plain mapped-tail integrator
/// cannot resolve the oscillation.
double integrate_oscillatory_tail(const ScalarFunction& amplitude, double omega, Kernel kernel,
                                  double lower, const QuadratureSpec& spec = {});

// ---------------------------------------------------------------------------
// Scalar minimization and roots

struct ScalarMinimum {
  double argmin;
  double value;
};

/// Grid scan over [lo, hi] (inclusive, `grid_points` nodes) followed by
/// golden-section refinement inside the best grid cell. Non-finite values are
/// treated as +inf; if more than half the grid is non-finite the scan throws
/// NumericFailure.
ScalarMinimum minimize_scalar(const ScalarFunction& f, double lo, double hi, double tol,
                              int grid_points = 256);

/// Golden-section search on [lo, hi] assuming f is unimodal there.
ScalarMinimum golden_section(const ScalarFunction& f, double lo, double hi, double tol);

/// Bracketed root of f on [lo, hi] (Illinois-modified regula falsi with a
/// bisection fallback). f(lo) and f(hi) must differ in sign.
double find_root(const ScalarFunction& f, double lo, double hi, double tol);

/// Principal branch W₀ of the Lambert W function: w·e^w = x, w ≥ -1.
/// Throws DomainError for x < -1/e.
double lambert_w0(double x);

// ---------------------------------------------------------------------------
// Random streams

/// A deterministic stream of draws identified by (seed, stream_index).
///
/// Backed by std::mt19937_64, whose output sequence is fixed by the
/// standard; the uniform and normal transforms are implemented here so the
/// whole draw sequence is reproducible across standard libraries.
/// Single-owner: give each task its own stream via derive_substream.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_index);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_index() const noexcept { return stream_index_; }

  std::uint64_t next_u64() { return engine_(); }
  /// 53-bit uniform on [0, 1).
  double uniform();
  /// Uniform on the open interval (0, 1).
  double uniform_open();
  /// Standard normal (Box-Muller; second variate of each pair is cached).
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_index_;
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

RandomStream derive_substream(std::uint64_t seed, std::uint64_t index);

/// Summation over a fixed binary reduction tree, so the result depends only
/// on the values and their order.
double pairwise_sum(std::span<const double> values);

}  // namespace cmest
