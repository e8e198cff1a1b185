#include "cmest/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "cmest/errors.hpp"

namespace cmest {

void QuadratureSpec::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_subdivisions < 1 || !(tail_cut > 0.0)) {
    throw DomainError("QuadratureSpec: tolerances and tail_cut must be positive, max_subdivisions >= 1");
  }
}

namespace {

// Gauss-Kronrod 7/15 nodes and weights (QUADPACK qk15).
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct RuleResult {
  double value;
  double error;
};

template <class G>
RuleResult gauss_kronrod15(const G& g, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = g(center);
  double gauss = fc * kWg[3];
  double kronrod = fc * kWgk[7];
  double res_abs = std::abs(kronrod);
  std::array<double, 7> f1{}, f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = g(center - dx);
    f2[j] = g(center + dx);
    const double sum = f1[j] + f2[j];
    kronrod += kWgk[j] * sum;
    res_abs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) gauss += kWg[j / 2] * sum;
  }
  const double mean = 0.5 * kronrod;
  double res_asc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) {
    res_asc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  }
  const double value = kronrod * half;
  res_abs *= std::abs(half);
  res_asc *= std::abs(half);
  double err = std::abs((kronrod - gauss) * half);
  if (res_asc != 0.0 && err != 0.0) {
    err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (res_abs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(err, 50.0 * eps * res_abs);
  }
  return {value, err};
}

// A piece of the integration range in its own coordinate t.
struct Piece {
  enum class Kind { finite, right_tail, left_tail };
  Kind kind;
  double anchor;  // tail origin
  double scale;   // tail length scale
};

struct Interval {
  double a;
  double b;
  double value;
  double error;
  int piece;
};

struct ByError {
  bool operator()(const Interval& lhs, const Interval& rhs) const { return lhs.error < rhs.error; }
};

}  // namespace

double integrate(const ScalarFunction& f, double lower, double upper, const QuadratureSpec& spec) {
  return integrate(f, lower, upper, std::span<const double>{}, spec);
}

double integrate(const ScalarFunction& f, double lower, double upper,
                 std::span<const double> breakpoints, const QuadratureSpec& spec) {
  spec.validate();
  if (std::isnan(lower) || std::isnan(upper) || !(lower < upper)) {
    throw DomainError("integrate: requires lower < upper");
  }
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<double> points;
  for (double p : breakpoints) {
    if (std::isfinite(p) && p > lower && p < upper) points.push_back(p);
  }
  if (std::isfinite(lower)) points.push_back(lower);
  if (std::isfinite(upper)) points.push_back(upper);
  if (lower == -inf) points.push_back(-spec.tail_cut);
  if (upper == inf) points.push_back(spec.tail_cut);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  // Drop tail cuts that landed outside a half-infinite range.
  std::erase_if(points, [&](double p) { return p < lower || p > upper; });

  std::vector<Piece> pieces;
  std::vector<std::pair<double, double>> spans;
  if (lower == -inf) {
    pieces.push_back({Piece::Kind::left_tail, points.front(), spec.tail_cut});
    spans.emplace_back(0.0, 1.0);
  }
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    pieces.push_back({Piece::Kind::finite, 0.0, 1.0});
    spans.emplace_back(points[i], points[i + 1]);
  }
  if (upper == inf) {
    pieces.push_back({Piece::Kind::right_tail, points.back(), spec.tail_cut});
    spans.emplace_back(0.0, 1.0);
  }

  auto integrand = [&](int piece) {
    return [&f, p = pieces[static_cast<std::size_t>(piece)]](double t) {
      if (p.kind == Piece::Kind::finite) return f(t);
      const double one_minus = 1.0 - t;
      const double dx = p.scale * t / one_minus;
      const double x = p.kind == Piece::Kind::right_tail ? p.anchor + dx : p.anchor - dx;
      if (!std::isfinite(x)) return 0.0;
      const double fx = f(x);
      if (fx == 0.0) return 0.0;
      return fx * p.scale / (one_minus * one_minus);
    };
  };

  std::vector<Interval> heap;
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto [a, b] = spans[i];
    const auto r = gauss_kronrod15(integrand(static_cast<int>(i)), a, b);
    heap.push_back({a, b, r.value, r.error, static_cast<int>(i)});
    total += r.value;
    total_err += r.error;
  }
  std::make_heap(heap.begin(), heap.end(), ByError{});

  auto recompute = [&] {
    total = 0.0;
    total_err = 0.0;
    for (const auto& iv : heap) {
      total += iv.value;
      total_err += iv.error;
    }
  };

  for (int iter = 0;; ++iter) {
    if (total_err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
      recompute();
      if (total_err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) return total;
    }
    if (!std::isfinite(total)) {
      throw NumericFailure("integrate: non-finite integrand", total, inf);
    }
    if (iter >= spec.max_subdivisions) {
      recompute();
      throw NumericFailure("integrate: no convergence after " + std::to_string(spec.max_subdivisions) +
                               " subdivisions",
                           total, total_err);
    }
    std::pop_heap(heap.begin(), heap.end(), ByError{});
    const Interval worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      recompute();
      throw NumericFailure("integrate: interval too small to subdivide", total, total_err);
    }
    const auto g = integrand(worst.piece);
    const auto left = gauss_kronrod15(g, worst.a, mid);
    const auto right = gauss_kronrod15(g, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push_back({worst.a, mid, left.value, left.error, worst.piece});
    std::push_heap(heap.begin(), heap.end(), ByError{});
    heap.push_back({mid, worst.b, right.value, right.error, worst.piece});
    std::push_heap(heap.begin(), heap.end(), ByError{});
    if (iter % 64 == 63) recompute();
  }
}

namespace {

// Wynn epsilon extrapolation of a partial-sum sequence; returns the highest
// even-order element that uses the newest sum.
double wynn_epsilon(std::span<const double> sums) {
  const std::size_t n = sums.size();
  if (n < 3) return sums.back();
  std::vector<double> prev(n, 0.0);  // column k-2
  std::vector<double> cur(sums.begin(), sums.end());  // column k-1
  double best = sums.back();
  for (std::size_t k = 1; k < n; ++k) {
    const std::size_t len = n - k;
    std::vector<double> next(len);
    for (std::size_t j = 0; j < len; ++j) {
      const double diff = cur[j + 1] - cur[j];
      if (diff == 0.0) return (k % 2 == 1) ? cur[j + 1] : best;
      next[j] = prev[j + 1] + 1.0 / diff;
    }
    if (k % 2 == 0) best = next.back();
    prev = std::move(cur);
    cur = std::move(next);
  }
  return best;
}

}  // namespace

double integrate_oscillatory_tail(const ScalarFunction& amplitude, double omega, Kernel kernel,
                                  double lower, const QuadratureSpec& spec) {
  spec.validate();
  if (!(omega > 0.0) || !std::isfinite(lower)) {
    throw DomainError("integrate_oscillatory_tail: requires omega > 0 and finite lower limit");
  }
  constexpr int kMaxPanels = 400;
  constexpr std::size_t kWindow = 40;
  const double half_period = std::numbers::pi / omega;

  QuadratureSpec panel_spec = spec;
  panel_spec.abs_tol = spec.abs_tol * 1e-2;
  panel_spec.rel_tol = std::max(spec.rel_tol * 1e-2, 1e-13);

  auto integrand = [&](double x) {
    const double a = amplitude(x);
    if (a == 0.0) return 0.0;
    return a * (kernel == Kernel::cosine ? std::cos(omega * x) : std::sin(omega * x));
  };

  std::vector<double> sums;
  std::vector<double> estimates;
  double sum = 0.0;
  double prev_panel = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kMaxPanels; ++k) {
    const double a = lower + k * half_period;
    const double panel = integrate(integrand, a, a + half_period, panel_spec);
    sum += panel;
    sums.push_back(sum);
    const double tol = std::max(spec.abs_tol, spec.rel_tol * std::abs(sum));
    if (std::abs(panel) <= 1e-3 * tol && std::abs(prev_panel) <= 1e-3 * tol) return sum;
    prev_panel = panel;

    const std::size_t first = sums.size() > kWindow ? sums.size() - kWindow : 0;
    estimates.push_back(wynn_epsilon(std::span<const double>(sums).subspan(first)));
    const std::size_t m = estimates.size();
    if (m >= 8) {
      const double e = estimates[m - 1];
      const double etol = std::max(spec.abs_tol, spec.rel_tol * std::abs(e));
      if (std::abs(e - estimates[m - 2]) <= etol && std::abs(estimates[m - 2] - estimates[m - 3]) <= etol) {
        return e;
      }
    }
  }
  const std::size_t m = estimates.size();
  throw NumericFailure("integrate_oscillatory_tail: extrapolation did not settle", estimates.back(),
                       std::abs(estimates[m - 1] - estimates[m - 2]));
}

ScalarMinimum golden_section(const ScalarFunction& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto eval = [&](double x) {
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = eval(c), fd = eval(d);
  for (int i = 0; i < 400 && (b - a) > tol; ++i) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = eval(d);
    }
  }
  return fc <= fd ? ScalarMinimum{c, fc} : ScalarMinimum{d, fd};
}

ScalarMinimum minimize_scalar(const ScalarFunction& f, double lo, double hi, double tol, int grid_points) {
  if (!(lo < hi) || !(tol > 0.0)) throw DomainError("minimize_scalar: requires lo < hi and tol > 0");
  if (grid_points < 3) throw DomainError("minimize_scalar: grid needs at least 3 points");

  const auto n = static_cast<std::size_t>(grid_points);
  std::vector<double> xs(n), fs(n);
  std::size_t non_finite = 0;
  std::size_t best = 0;
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    const double v = f(xs[i]);
    if (std::isfinite(v)) {
      fs[i] = v;
    } else {
      fs[i] = std::numeric_limits<double>::infinity();
      ++non_finite;
    }
    if (fs[i] < fs[best]) best = i;
  }
  if (2 * non_finite > n) {
    throw NumericFailure("minimize_scalar: objective non-finite on more than half the grid", fs[best],
                         std::numeric_limits<double>::infinity());
  }
  const double a = xs[best == 0 ? 0 : best - 1];
  const double b = xs[best + 1 == n ? n - 1 : best + 1];
  const auto refined = golden_section(f, a, b, tol);
  if (refined.value < fs[best]) return refined;
  return {xs[best], fs[best]};
}

double find_root(const ScalarFunction& f, double lo, double hi, double tol) {
  double fa = f(lo), fb = f(hi);
  if (fa == 0.0) return lo;
  if (fb == 0.0) return hi;
  if (!(std::signbit(fa) != std::signbit(fb))) {
    throw DomainError("find_root: f(lo) and f(hi) must bracket a root");
  }
  double a = lo, b = hi;
  int side = 0;
  for (int i = 0; i < 200; ++i) {
    double x = (a * fb - b * fa) / (fb - fa);
    // Fall back to bisection when the secant point is not strictly inside.
    if (!(x > std::min(a, b) && x < std::max(a, b))) x = 0.5 * (a + b);
    const double fx = f(x);
    if (fx == 0.0) return x;
    if (std::signbit(fx) == std::signbit(fb)) {
      b = x;
      fb = fx;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = x;
      fa = fx;
      if (side == 1) fb *= 0.5;
      side = 1;
    }
    if (std::abs(b - a) <= tol) return 0.5 * (a + b);
  }
  throw NumericFailure("find_root: no convergence", 0.5 * (a + b), std::abs(b - a));
}

double lambert_w0(double x) {
  const double branch = -1.0 / std::numbers::e;
  if (std::isnan(x)) throw DomainError("lambert_w0: NaN argument");
  if (x < branch) {
    if (branch - x > 4.0 * std::numeric_limits<double>::epsilon() * -branch) {
      throw DomainError("lambert_w0: argument below -1/e");
    }
    return -1.0;
  }
  if (x == 0.0) return 0.0;
  if (x == std::numeric_limits<double>::infinity()) return x;

  double w;
  if (x < -0.25) {
    // Series about the branch point.
    const double p = std::sqrt(std::max(0.0, 2.0 * (std::numbers::e * x + 1.0)));
    w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  } else if (x < 3.0) {
    w = std::log1p(x);
    w *= 1.0 - std::log1p(w) / (2.0 + w);
  } else {
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }

  double lo = x < 0.0 ? -1.0 : 0.0;
  double hi = x < 0.0 ? 0.0 : (x <= std::numbers::e ? x : std::log(x));
  w = std::clamp(w, lo, hi);
  for (int i = 0; i < 100; ++i) {
    const double ew = std::exp(w);
    const double residual = w * ew - x;
    if (residual == 0.0) return w;
    if (residual > 0.0) hi = w; else lo = w;
    const double wp1 = w + 1.0;
    const double denom = ew * wp1 - (w + 2.0) * residual / (2.0 * wp1);
    double next = w - residual / denom;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    if (std::abs(next - w) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(w))) {
      return next;
    }
    w = next;
  }
  return w;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_index)
    : seed_(seed),
      stream_index_(stream_index),
      engine_(mix64(mix64(seed) ^ mix64(stream_index ^ 0xD1B54A32D192ED03ULL))) {}

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform_open() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() {
  if (spare_normal_) {
    const double v = *spare_normal_;
    spare_normal_.reset();
    return v;
  }
  const double radius = std::sqrt(-2.0 * std::log(uniform_open()));
  const double angle = 2.0 * std::numbers::pi * uniform();
  spare_normal_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

RandomStream derive_substream(std::uint64_t seed, std::uint64_t index) {
  return RandomStream(seed, index);
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace cmest
