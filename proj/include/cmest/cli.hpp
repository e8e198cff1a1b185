#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cmest/noise_model.hpp"

namespace cmest::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,         ///< bad flags, model spec or configuration
  kNumeric = 3,       ///< an iterative method failed to converge
  kVerification = 4,  ///< `verify` found a violated bound or Stein residual
};

/// Parses `family:key=value`, e.g. `gaussian:sigma=1`, `laplace:b=0.7071`,
/// `cauchy:gamma=1`, `uniform:a=1`. `variance=v` is accepted for the
/// finite-variance families. Throws ConfigError.
NoiseModel parse_noise_model(std::string_view spec);

/// Canonical spec string for a model (family-native key, 17 digits).
std::string format_model(const NoiseModel& model);

/// 17 significant digits; empty string for non-finite values.
std::string format_number(double v);

/// `points` equally spaced values with both endpoints exact.
std::vector<double> linear_grid(double lo, double hi, std::size_t points);

struct CsvTable {
  std::vector<std::string> comments;  ///< `#` lines, without the marker
  std::vector<std::string> header;
  std::vector<std::vector<std::optional<double>>> rows;  ///< empty field -> nullopt
};

CsvTable parse_csv(std::string_view text);

/// Runs one command line (without the program name). Output documents go to
/// `out` unless `--out <path>` is given; diagnostics go to `err`.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace cmest::cli
