#include "cmest/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "cmest/cf_analysis.hpp"
#include "cmest/efficiency.hpp"
#include "cmest/errors.hpp"
#include "cmest/simulator.hpp"

namespace cmest::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kSteinTolerance = 1e-6;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

double parse_double(std::string_view text, std::string_view what) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("cannot parse " + std::string(what) + " '" + t + "' as a number");
  }
  return v;
}

Json extended(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

struct Document {
  std::string text;
  int code = kOk;
};

std::string csv_document(const Json& config, const std::vector<std::string>& header,
                         const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  for (const auto& [key, value] : config.items()) {
    os << "# " << key << '=' << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
  }
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << '\n';
  }
  return os.str();
}

std::string json_rows_document(const Json& config, const std::vector<std::string>& header,
                               const std::vector<std::vector<double>>& rows) {
  Json doc;
  doc["config"] = config;
  Json arr = Json::array();
  for (const auto& row : rows) {
    Json obj;
    for (std::size_t i = 0; i < header.size(); ++i) obj[header[i]] = finite_or_null(row[i]);
    arr.push_back(std::move(obj));
  }
  doc["rows"] = std::move(arr);
  return doc.dump(2) + '\n';
}

bool take_format(const std::string& format) {
  if (format == "csv") return false;
  if (format == "json") return true;
  throw ConfigError("--format must be csv or json");
}

// Splices the contents of `--config <path>` in after the subcommand name so
// that flags given explicitly on the command line (which come later) win.
std::vector<std::string> expand_config(std::span<const std::string> args) {
  std::vector<std::string> plain;
  std::vector<std::string> from_file;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ConfigError("--config requires a path");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      plain.push_back(args[i]);
      continue;
    }
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::string line;
    while (std::getline(in, line)) {
      std::string t = trim(line);
      if (t.empty() || t.front() == '#') continue;
      if (t.rfind("--", 0) != 0) t = "--" + t;
      const auto eq = t.find('=');
      const auto sp = t.find_first_of(" \t");
      const auto cut = std::min(eq, sp);
      if (cut == std::string::npos) {
        from_file.push_back(t);
      } else {
        from_file.push_back(t.substr(0, cut));
        from_file.push_back(trim(std::string_view(t).substr(cut + 1)));
      }
    }
  }
  if (from_file.empty()) return plain;
  std::size_t at = 0;
  while (at < plain.size() && plain[at].rfind("-", 0) == 0) ++at;
  if (at < plain.size()) ++at;
  plain.insert(plain.begin() + static_cast<std::ptrdiff_t>(at), from_file.begin(), from_file.end());
  return plain;
}

Json model_json(const NoiseModel& model) {
  Json params;
  params[std::string(scale_name(model.family()))] = model.scale();
  return params;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
  std::string dist;
  double omega_min = 0.0;
  double omega_max = 0.0;
  std::size_t points = 0;
  std::optional<double> theta_r;
  std::string format = "csv";
};

Document run_sweep(const SweepArgs& a) {
  const NoiseModel model = parse_noise_model(a.dist);
  const bool json = take_format(a.format);
  if (!(a.omega_min > 0.0) || !(a.omega_max >= a.omega_min) || !std::isfinite(a.omega_max)) {
    throw ConfigError("sweep: require 0 < omega-min <= omega-max");
  }
  if (a.points < 1) throw ConfigError("sweep: --points must be >= 1");
  if (a.points == 1 && a.omega_max != a.omega_min) throw ConfigError("sweep: one point needs omega-min == omega-max");
  if (a.theta_r) {
    if (!(*a.theta_r > 0.0)) throw ConfigError("sweep: --theta-r must be > 0");
    if (a.omega_max > 2.0 * std::numbers::pi / *a.theta_r * (1.0 + 1e-12)) {
      throw ConfigError("sweep: omega-max exceeds 2*pi/theta-r");
    }
  }

  Json config;
  config["command"] = "sweep";
  config["dist"] = format_model(model);
  config["omega_min"] = a.omega_min;
  config["omega_max"] = a.omega_max;
  config["points"] = a.points;
  if (a.theta_r) config["theta_r"] = *a.theta_r;

  const auto grid = linear_grid(a.omega_min, a.omega_max, a.points);
  std::vector<std::vector<double>> rows;
  for (const auto& r : asv_sweep(model, grid)) rows.push_back({r.omega, r.asv, r.asv_db, r.inv_fisher, r.inv_fisher_db});
  const std::vector<std::string> header = {"omega", "asv", "asv_db", "inv_fisher", "inv_fisher_db"};
  return {json ? json_rows_document(config, header, rows) : csv_document(config, header, rows), kOk};
}

struct EfficiencyArgs {
  std::string dist;
  double theta_r = 0.0;
  std::string method = "numeric";
};

Document run_efficiency(const EfficiencyArgs& a) {
  const NoiseModel model = parse_noise_model(a.dist);
  Method method;
  if (a.method == "numeric") method = Method::numeric;
  else if (a.method == "closed_form") method = Method::closed_form;
  else throw ConfigError("--method must be numeric or closed_form");
  if (!(a.theta_r > 0.0) || !std::isfinite(a.theta_r)) throw ConfigError("efficiency: --theta-r must be > 0");

  const EfficiencyReport rep = relative_efficiency(model, a.theta_r, method);
  Json doc;
  doc["dist"] = std::string(family_name(model.family()));
  doc["params"] = model_json(model);
  doc["fisher_information"] = extended(rep.fisher);
  doc["inf_asv"] = extended(rep.inf_asv);
  doc["omega_star"] = rep.omega_star_limit ? Json("limit0") : Json(rep.omega_star);
  doc["relative_efficiency"] = rep.efficiency;
  doc["method"] = rep.method == Method::numeric ? "numeric" : "closed_form";
  Json config;
  config["command"] = "efficiency";
  config["dist"] = format_model(model);
  config["theta_r"] = a.theta_r;
  config["method"] = a.method;
  doc["config"] = std::move(config);
  return {doc.dump(2) + '\n', kOk};
}

struct SimulateArgs {
  std::string dist;
  std::size_t sensors = 0;
  std::size_t trials = 0;
  double omega = 0.0;
  double theta = 0.0;
  double theta_r = 0.0;
  double rho = 0.0;
  double sigma_nu2 = 0.0;
  std::uint64_t seed = 0;
  std::string estimator = "angle";
  unsigned threads = 0;
};

Document run_simulate(const SimulateArgs& a) {
  SimConfig cfg;
  cfg.model = parse_noise_model(a.dist);
  cfg.sensors = a.sensors;
  cfg.trials = a.trials;
  cfg.omega = a.omega;
  cfg.theta = a.theta;
  cfg.theta_r = a.theta_r;
  cfg.rho = a.rho;
  cfg.sigma_nu2 = a.sigma_nu2;
  cfg.seed = a.seed;
  cfg.threads = a.threads;
  if (a.estimator == "angle") cfg.estimator = EstimatorKind::angle;
  else if (a.estimator == "gls") cfg.estimator = EstimatorKind::gls;
  else throw ConfigError("--estimator must be angle or gls");
  cfg.validate();

  const CampaignSummary s = run_campaign(cfg);
  Json config;
  config["command"] = "simulate";
  config["dist"] = format_model(cfg.model);
  config["l"] = cfg.sensors;
  config["trials"] = cfg.trials;
  config["omega"] = cfg.omega;
  config["theta"] = cfg.theta;
  config["theta_r"] = cfg.theta_r;
  config["rho"] = cfg.rho;
  config["sigma_nu2"] = cfg.sigma_nu2;
  config["seed"] = cfg.seed;
  config["estimator"] = std::string(estimator_name(cfg.estimator));
  Json doc;
  doc["config"] = std::move(config);
  doc["mean_theta_hat"] = s.mean_theta_hat;
  doc["bias"] = s.bias;
  doc["variance"] = s.variance;
  doc["l_times_variance"] = s.l_times_variance;
  doc["predicted_asv"] = s.predicted_asv;
  doc["trials_used"] = s.trials_used;
  return {doc.dump(2) + '\n', kOk};
}

struct VerifyArgs {
  std::string dist;
  double omega_min = 0.0;
  double omega_max = 0.0;
  std::size_t points = 0;
  std::string format = "csv";
};

Document run_verify(const VerifyArgs& a) {
  const NoiseModel model = parse_noise_model(a.dist);
  const bool json = take_format(a.format);
  if (!(a.omega_min >= 0.0) || !(a.omega_max >= a.omega_min) || !std::isfinite(a.omega_max)) {
    throw ConfigError("verify: require 0 <= omega-min <= omega-max");
  }
  if (a.points < 1) throw ConfigError("verify: --points must be >= 1");
  if (!std::isfinite(fisher(model))) {
    throw UnsupportedModel("verify: " + std::string(family_name(model.family())) +
                           " has infinite Fisher information");
  }

  Json config;
  config["command"] = "verify";
  config["dist"] = format_model(model);
  config["omega_min"] = a.omega_min;
  config["omega_max"] = a.omega_max;
  config["points"] = a.points;
  config["stein_tolerance"] = kSteinTolerance;

  bool all_pass = true;
  std::vector<std::vector<double>> rows;
  for (double w : linear_grid(a.omega_min, a.omega_max, a.points)) {
    const auto r = theorem1_residuals(model, w);
    const double g1 = stein_check(model, cos_test_function(model, w));
    const double g2 = stein_check(model, sin_test_function(model, w));
    all_pass = all_pass && r.r_imag > 0.0 && r.r_real > 0.0 && g1 < kSteinTolerance && g2 < kSteinTolerance;
    rows.push_back({w, r.r_imag, r.r_real, g1, g2});
  }
  const std::vector<std::string> header = {"omega", "r_imag", "r_real", "stein_g1", "stein_g2"};
  return {json ? json_rows_document(config, header, rows) : csv_document(config, header, rows),
          all_pass ? kOk : kVerification};
}

}  // namespace

NoiseModel parse_noise_model(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw ConfigError("model spec '" + std::string(spec) + "' must look like family:key=value");
  }
  const std::string family_text = trim(spec.substr(0, colon));
  const std::string_view rest = spec.substr(colon + 1);
  const auto eq = rest.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("model spec '" + std::string(spec) + "' must look like family:key=value");
  }
  const std::string key = trim(rest.substr(0, eq));
  const double value = parse_double(rest.substr(eq + 1), "model parameter");

  Family family;
  if (family_text == "gaussian") family = Family::gaussian;
  else if (family_text == "laplace") family = Family::laplace;
  else if (family_text == "cauchy") family = Family::cauchy;
  else if (family_text == "uniform") family = Family::uniform;
  else throw ConfigError("unknown noise family '" + family_text + "'");

  try {
    if (key == scale_name(family)) return NoiseModel(family, value);
    if (key == "variance" && family != Family::cauchy) return NoiseModel::from_variance(family, value);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown parameter '" + key + "' for " + family_text + " (expected " +
                    std::string(scale_name(family)) + ")");
}

std::string format_model(const NoiseModel& model) {
  return std::string(family_name(model.family())) + ":" + std::string(scale_name(model.family())) + "=" +
         format_number(model.scale());
}

std::string format_number(double v) {
  if (!std::isfinite(v)) return {};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
  if (points == 0) return {};
  if (points == 1) return {lo};
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  grid.back() = hi;
  return grid;
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line.front() == '#') {
      table.comments.push_back(trim(line.substr(1)));
      continue;
    }
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!have_header) {
      for (auto f : fields) table.header.push_back(trim(f));
      have_header = true;
      continue;
    }
    std::vector<std::optional<double>> row;
    for (auto f : fields) {
      if (trim(f).empty()) row.emplace_back();
      else row.emplace_back(parse_double(f, "CSV field"));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

int run(std::span<const std::string> raw_args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  try {
    args = expand_config(raw_args);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  CLI::App app{"Asymptotic efficiency of constant-modulus distributed estimation", "cmest"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string out_path;

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "AsV(omega) and 1/I over an omega grid (CSV)");
  sweep_cmd->add_option("--dist", sweep.dist, "noise model, family:key=value")->required();
  sweep_cmd->add_option("--omega-min", sweep.omega_min)->required();
  sweep_cmd->add_option("--omega-max", sweep.omega_max)->required();
  sweep_cmd->add_option("--points", sweep.points)->required();
  sweep_cmd->add_option("--theta-r", sweep.theta_r, "parameter range; caps omega at 2*pi/theta_r");
  sweep_cmd->add_option("--format", sweep.format, "csv or json");
  sweep_cmd->add_option("--out", out_path, "output file (default stdout)");

  EfficiencyArgs eff;
  auto* eff_cmd = app.add_subcommand("efficiency", "relative efficiency and infimum AsV (JSON)");
  eff_cmd->add_option("--dist", eff.dist)->required();
  eff_cmd->add_option("--theta-r", eff.theta_r)->required();
  eff_cmd->add_option("--method", eff.method, "numeric or closed_form");
  eff_cmd->add_option("--out", out_path);

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo campaign of the sensor network (JSON)");
  sim_cmd->add_option("--dist", sim.dist)->required();
  sim_cmd->add_option("--l", sim.sensors, "number of sensors L")->required();
  sim_cmd->add_option("--trials", sim.trials)->required();
  sim_cmd->add_option("--omega", sim.omega)->required();
  sim_cmd->add_option("--theta", sim.theta)->required();
  sim_cmd->add_option("--theta-r", sim.theta_r)->required();
  sim_cmd->add_option("--rho", sim.rho)->required();
  sim_cmd->add_option("--sigma-nu2", sim.sigma_nu2)->required();
  sim_cmd->add_option("--seed", sim.seed)->required();
  sim_cmd->add_option("--estimator", sim.estimator, "angle or gls")->required();
  sim_cmd->add_option("--threads", sim.threads, "worker threads (0 = all cores); output is unaffected");
  sim_cmd->add_option("--out", out_path);

  VerifyArgs ver;
  auto* ver_cmd = app.add_subcommand("verify", "Fisher/characteristic-function bounds and Stein residuals (CSV)");
  ver_cmd->add_option("--dist", ver.dist)->required();
  ver_cmd->add_option("--omega-min", ver.omega_min)->required();
  ver_cmd->add_option("--omega-max", ver.omega_max)->required();
  ver_cmd->add_option("--points", ver.points)->required();
  ver_cmd->add_option("--format", ver.format, "csv or json");
  ver_cmd->add_option("--out", out_path);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  Document doc;
  try {
    if (sweep_cmd->parsed()) doc = run_sweep(sweep);
    else if (eff_cmd->parsed()) doc = run_efficiency(eff);
    else if (sim_cmd->parsed()) doc = run_simulate(sim);
    else doc = run_verify(ver);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const UnsupportedModel& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::runtime_error& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  }

  if (out_path.empty()) {
    out << doc.text;
  } else {
    std::ofstream file(out_path, std::ios::binary);
    if (!file) {
      err << "error: cannot write '" << out_path << "'\n";
      return kUsage;
    }
    file << doc.text;
  }
  if (doc.code == kVerification) err << "verification failed: see rows with non-positive residuals\n";
  return doc.code;
}

}  // namespace cmest::cli
