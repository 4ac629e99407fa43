#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "nhsense/cli.hpp"

namespace nhsense::cli {

namespace {

void add_param_flags(CLI::App* sub, ParamMap& into) {
  static const std::vector<std::pair<std::string, std::string>> flags = {
      {"--lambda", "lambda"}, {"--omega-ep", "omega_ep"}, {"--omega-ccw", "omega_ccw"},
      {"--r", "r"},           {"--phi", "phi"},           {"--v", "v"},
      {"--g", "g"},           {"--k-h", "k_h"},           {"--k-v", "k_v"}};
  for (const auto& [flag, key] : flags)
    sub->add_option_function<double>(
        flag, [&into, key = key](double v) { into[key] = v; }, "model parameter " + key);
}

int sweep_main(SweepConfig config, std::ostream& out, std::ostream& err) {
  const HierarchyTolerance tol = default_tolerance();
  const SweepResult result = run_sweep(config, tol);

  bool hierarchy_failed = false;
  for (const auto& r : result.records) {
    if (r.failure) {
      err << "warning: " << r.model << " theta=" << r.theta << " t=" << r.t << ": " << *r.failure
          << '\n';
    } else if (!r.hierarchy_ok) {
      hierarchy_failed = true;
      err << "hierarchy violated: " << r.model << " theta=" << r.theta << " t=" << r.t << '\n';
    }
  }

  if (config.output.empty()) {
    write_records(out, result.records, config.format);
  } else {
    std::ofstream file(config.output);
    if (!file) throw Error(ErrorKind::UsageError, "cannot write '" + config.output + "'");
    write_records(file, result.records, config.format);
  }
  if (result.aborted) {
    err << "error: sweep stopped at the first failed point (--strict)\n";
    return 1;
  }
  return hierarchy_failed ? 1 : 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fisher-information bookkeeping for non-Hermitian sensors and their dilations",
               "nhsense"};
  app.require_subcommand(1);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "theta x t grid of the Fisher breakdown");
  std::string config_path;
  std::map<std::string, std::string> sweep_settings;
  ParamMap sweep_params;
  bool strict = false;
  sweep->add_option("--config", config_path, "flat key = value config file");
  for (const auto& [flag, key] :
       std::vector<std::pair<std::string, std::string>>{{"--model", "model"},
                                                        {"--t", "t"},
                                                        {"--theta", "theta"},
                                                        {"--out", "out"},
                                                        {"--format", "format"},
                                                        {"--jobs", "jobs"},
                                                        {"--fd-step", "fd_step"},
                                                        {"--steps-per-unit-time", "steps_per_unit_time"},
                                                        {"--eta0", "eta0"}})
    sweep->add_option_function<std::string>(
        flag, [&sweep_settings, key = key](const std::string& v) { sweep_settings[key] = v; });
  sweep->add_flag("--strict", strict, "stop at the first failed grid point");
  add_param_flags(sweep, sweep_params);

  // verify
  auto* verify = app.add_subcommand("verify", "randomized invariant suite");
  VerifyOptions vopt;
  std::string verify_model = "all", verify_theta;
  double verify_t = -1.0;
  verify->add_option("--model", verify_model, "model name or 'all'");
  verify->add_option("--seed", vopt.seed, "random seed");
  verify->add_option("--points", vopt.points, "random points per model");
  verify->add_flag("--corrupt", vopt.corrupt, "inflate q_d (negative control)");
  verify->add_flag("--convergence", vopt.convergence, "step halving/doubling self-check");
  verify->add_option("--theta", verify_theta, "restrict theta to MIN:MAX");
  verify->add_option("--t", verify_t, "fix the evolution time");
  add_param_flags(verify, vopt.params);

  // dilate
  auto* dil = app.add_subcommand("dilate", "inspect the dilation at one point");
  DilateOptions dopt;
  std::string dil_eta0 = "auto";
  dil->add_option("--model", dopt.model, "model name")->required();
  dil->add_option("--theta", dopt.theta, "estimated parameter")->required();
  dil->add_option("--t", dopt.t, "evolution time")->required();
  dil->add_option("--steps-per-unit-time", dopt.dilation.steps_per_unit_time, "time-ordered steps");
  dil->add_option("--eta0", dil_eta0, "auto or a scalar c >= 1");
  dil->add_option("--samples", dopt.dilation.inspection_samples, "time samples to print");
  add_param_flags(dil, dopt.params);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sweep) {
      SweepConfig config = config_path.empty() ? SweepConfig{} : load_config(config_path);
      for (const auto& [key, value] : sweep_settings) apply_setting(config, key, value);
      for (const auto& [key, value] : sweep_params) config.fixed_params[key] = value;
      if (strict) config.strict = true;
      return sweep_main(config, out, err);
    }
    if (*verify) {
      if (verify_model != "all") vopt.models = {verify_model};
      for (const auto& m : vopt.models) {
        const auto& names = model_names();
        if (std::find(names.begin(), names.end(), m) == names.end())
          throw Error(ErrorKind::UsageError, "unknown model '" + m + "'");
      }
      if (!verify_theta.empty()) {
        const auto colon = verify_theta.find(':');
        if (colon == std::string::npos)
          throw Error(ErrorKind::UsageError, "--theta must read MIN:MAX");
        const std::vector<double> ends =
            parse_real_list(verify_theta.substr(0, colon) + "," + verify_theta.substr(colon + 1));
        if (!(ends[0] < ends[1])) throw Error(ErrorKind::UsageError, "--theta needs MIN < MAX");
        vopt.theta = std::make_pair(ends[0], ends[1]);
      }
      if (verify->count("--t")) {
        if (!(verify_t >= 0.0)) throw Error(ErrorKind::UsageError, "--t must be >= 0");
        vopt.t = verify_t;
      }
      vopt.tol = default_tolerance();
      return cmd_verify(vopt, out, err);
    }
    dopt.dilation.eta0 = parse_eta0(dil_eta0);
    if (dopt.dilation.steps_per_unit_time < 100)
      throw Error(ErrorKind::UsageError, "--steps-per-unit-time must be >= 100");
    return cmd_dilate(dopt, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::UsageError || e.kind() == ErrorKind::InvalidParam ? 2 : 1;
  }
}

}  // namespace nhsense::cli
