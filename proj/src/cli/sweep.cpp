#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "nhsense/cli.hpp"

namespace nhsense::cli {

namespace {

[[noreturn]] void usage(const std::string& message) { throw Error(ErrorKind::UsageError, message); }

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

double parse_real(std::string_view text, const std::string& what) {
  const std::string s = trim(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
    usage("invalid number '" + s + "' for " + what);
  return v;
}

int parse_int(std::string_view text, const std::string& what) {
  const double v = parse_real(text, what);
  if (v != std::floor(v) || std::abs(v) > std::numeric_limits<int>::max())
    usage("expected an integer for " + what + ", got '" + trim(text) + "'");
  return static_cast<int>(v);
}

bool parse_bool(std::string_view text, const std::string& what) {
  const std::string s = trim(text);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  usage("expected true/false for " + what + ", got '" + s + "'");
}

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '-', '_');
  return key;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::vector<std::string>& model_param_keys() {
  static const std::vector<std::string> keys = {"lambda", "omega_ep", "omega_ccw", "r",
                                                "phi",    "v",        "g",         "k_h",
                                                "k_v"};
  return keys;
}

}  // namespace

std::vector<double> ThetaRange::grid() const {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i)
    out[i] = i == count - 1 ? max : min + (max - min) * i / (count - 1);
  return out;
}

void SweepConfig::validate() const {
  if (model.empty()) usage("no model given");
  const auto& names = model_names();
  if (std::find(names.begin(), names.end(), model) == names.end())
    usage("unknown model '" + model + "'");
  if (theta.count < 2) usage("theta needs count >= 2");
  if (!(theta.min < theta.max)) usage("theta needs min < max");
  if (times.empty()) usage("no evolution times given");
  for (double t : times)
    if (!(t >= 0.0)) usage("evolution times must be >= 0");
  if (steps_per_unit_time < 100) usage("steps_per_unit_time must be >= 100");
  try {
    make_model(model, fixed_params);
  } catch (const Error& e) {
    usage(e.what());
  }
}

ThetaRange parse_theta_range(std::string_view text) {
  const std::string s = trim(text);
  const auto a = s.find(':');
  const auto b = a == std::string::npos ? a : s.find(':', a + 1);
  if (a == std::string::npos || b == std::string::npos)
    usage("theta range must read min:max:count, got '" + s + "'");
  ThetaRange r;
  r.min = parse_real(s.substr(0, a), "theta min");
  r.max = parse_real(s.substr(a + 1, b - a - 1), "theta max");
  r.count = parse_int(s.substr(b + 1), "theta count");
  return r;
}

std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) out.push_back(parse_real(item, "time list"));
  if (out.empty()) usage("empty list");
  return out;
}

Eta0Mode parse_eta0(std::string_view text) {
  const std::string s = trim(text);
  if (s == "auto") return Eta0Mode::auto_rescale();
  const double c = parse_real(s, "eta0");
  if (!(c >= 1.0)) usage("fixed eta0 scalar must be >= 1");
  return Eta0Mode::fixed(c);
}

void apply_setting(SweepConfig& config, const std::string& raw_key, const std::string& value) {
  const std::string key = normalize_key(trim(raw_key));
  const auto& params = model_param_keys();
  if (key == "model") {
    config.model = trim(value);
  } else if (std::find(params.begin(), params.end(), key) != params.end()) {
    config.fixed_params[key] = parse_real(value, key);
  } else if (key == "theta") {
    config.theta = parse_theta_range(value);
  } else if (key == "t" || key == "times") {
    config.times = parse_real_list(value);
  } else if (key == "fd_step") {
    config.fd_step = parse_real(value, key);
  } else if (key == "steps_per_unit_time") {
    config.steps_per_unit_time = parse_int(value, key);
  } else if (key == "eta0") {
    config.eta0 = parse_eta0(value);
  } else if (key == "out" || key == "output") {
    config.output = trim(value);
  } else if (key == "format") {
    const std::string f = trim(value);
    if (f == "csv") config.format = OutputFormat::csv;
    else if (f == "jsonl" || f == "json-lines") config.format = OutputFormat::jsonl;
    else usage("unknown format '" + f + "'");
  } else if (key == "jobs") {
    config.jobs = parse_int(value, key);
  } else if (key == "strict") {
    config.strict = parse_bool(value, key);
  } else {
    usage("unknown config key '" + key + "'");
  }
}

SweepConfig parse_config(std::string_view text) {
  SweepConfig config;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      usage("config line " + std::to_string(number) + ": expected key = value");
    apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
  }
  return config;
}

SweepConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) usage("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

HierarchyTolerance default_tolerance() {
  HierarchyTolerance tol;
  if (const char* env = std::getenv("NHSENSE_TOL"); env && *env) {
    const double v = parse_real(env, "NHSENSE_TOL");
    if (!(v > 0.0)) usage("NHSENSE_TOL must be positive");
    tol.relative = v;
  }
  return tol;
}

std::string csv_header() {
  return "model,theta,t,f_q_nh,f_q_joint,p_d,q_d,q_r,f_post,f_tot,eff_qfi,hierarchy_ok";
}

SweepRecord make_record(const FisherBreakdown& b, const HierarchyTolerance& tol) {
  SweepRecord r;
  r.model = b.model;
  r.theta = b.theta;
  r.t = b.t;
  r.f_q_nh = b.f_q_nh;
  r.f_q_joint = b.f_q_joint;
  r.p_d = b.p_d;
  r.q_d = b.q_d;
  r.q_r = b.q_r;
  r.f_post = b.f_post;
  r.f_tot = b.f_tot;
  r.eff_qfi = b.effective_qfi();
  r.hierarchy_ok = check_hierarchy(b, tol).pass();
  r.warnings = b.warnings;
  return r;
}

SweepRecord failed_record(const std::string& model, double theta, double t,
                          const std::string& reason) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  SweepRecord r;
  r.model = model;
  r.theta = theta;
  r.t = t;
  r.f_q_nh = r.f_q_joint = r.p_d = r.q_d = r.q_r = r.f_post = r.f_tot = r.eff_qfi = nan;
  r.failure = reason;
  return r;
}

SweepResult run_sweep(const SweepConfig& config, const HierarchyTolerance& tol) {
  config.validate();
  const HamiltonianModel model = make_model(config.model, config.fixed_params);
  FisherOptions options;
  options.fd_step = config.fd_step;
  options.dilation.steps_per_unit_time = config.steps_per_unit_time;
  options.dilation.eta0 = config.eta0;

  struct Point {
    double theta, t;
  };
  std::vector<Point> grid;
  const std::vector<double> thetas = config.theta.grid();
  for (double t : config.times)
    for (double theta : thetas) grid.push_back({theta, t});

  std::vector<std::optional<SweepRecord>> slots(grid.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  auto worker = [&] {
    for (;;) {
      if (stop.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= grid.size()) return;
      const Point p = grid[i];
      try {
        slots[i] = make_record(fisher_breakdown(model, p.theta, p.t, options), tol);
      } catch (const Error& e) {
        slots[i] = failed_record(model.name, p.theta, p.t,
                                 std::string(to_string(e.kind())) + ": " + e.what());
        if (config.strict) stop.store(true);
      }
    }
  };

  int jobs = config.jobs > 0 ? config.jobs : static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(grid.size(), 1)));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  SweepResult result;
  for (auto& slot : slots) {
    if (!slot) {
      result.aborted = true;
      break;
    }
    const bool failed = slot->failure.has_value();
    result.records.push_back(std::move(*slot));
    if (failed && config.strict) {
      result.aborted = true;
      break;
    }
  }
  return result;
}

void write_records(std::ostream& out, const std::vector<SweepRecord>& records,
                   OutputFormat format) {
  if (format == OutputFormat::csv) {
    out << csv_header() << '\n';
    for (const auto& r : records) {
      out << r.model << ',' << fmt(r.theta) << ',' << fmt(r.t) << ',' << fmt(r.f_q_nh) << ','
          << fmt(r.f_q_joint) << ',' << fmt(r.p_d) << ',' << fmt(r.q_d) << ',' << fmt(r.q_r)
          << ',' << fmt(r.f_post) << ',' << fmt(r.f_tot) << ',' << fmt(r.eff_qfi) << ','
          << (r.hierarchy_ok ? "true" : "false") << '\n';
    }
    return;
  }
  for (const auto& r : records) {
    nlohmann::ordered_json row;
    row["model"] = r.model;
    row["theta"] = r.theta;
    row["t"] = r.t;
    row["f_q_nh"] = r.f_q_nh;
    row["f_q_joint"] = r.f_q_joint;
    row["p_d"] = r.p_d;
    row["q_d"] = r.q_d;
    row["q_r"] = r.q_r;
    row["f_post"] = r.f_post;
    row["f_tot"] = r.f_tot;
    row["eff_qfi"] = r.eff_qfi;
    row["hierarchy_ok"] = r.hierarchy_ok;
    out << row.dump() << '\n';
  }
}

}  // namespace nhsense::cli
