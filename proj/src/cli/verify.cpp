#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>

#include "nhsense/cli.hpp"

namespace nhsense::cli {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Worst value of one invariant over the sampled points of a model.
struct Tally {
  std::string name;
  double threshold = 0.0;
  bool upper = true;  // value <= threshold, else value >= threshold
  int points = 0;
  int failures = 0;
  double worst = 0.0;

  void add(double value) {
    const bool ok = upper ? value <= threshold : value >= threshold;
    if (!ok || std::isnan(value)) ++failures;
    if (points == 0 || std::isnan(value) || (upper ? value > worst : value < worst)) worst = value;
    ++points;
  }
};

class Tallies {
 public:
  void add(const std::string& name, double value, double threshold, bool upper = true) {
    auto it = std::find_if(items_.begin(), items_.end(),
                           [&](const Tally& t) { return t.name == name; });
    if (it == items_.end()) {
      items_.push_back({name, threshold, upper});
      it = items_.end() - 1;
    }
    it->add(value);
  }
  const std::vector<Tally>& items() const { return items_; }

 private:
  std::vector<Tally> items_;
};

constexpr double kAmplificationSkip = 1e5;

struct Domain {
  double theta_min, theta_max, t_min, t_max;
};

Domain domain_for(const std::string& model) {
  if (model == "pseudo_hermitian") return {0.05, 1.5, 0.5, 4.0};
  if (model == "loss_loss") return {0.2, 2.0, 0.5, 6.0};
  return {0.2, 2.0, 0.5, 8.0};
}

StateFamily direct_family(const HamiltonianModel& model, double t) {
  return [model, t](double theta) {
    return normalize(evolve(model, theta, make_state(model.initial_state()), t)).state.amplitudes;
  };
}

double direct_qfi(const HamiltonianModel& model, double theta, double t) {
  const StateFamily f = direct_family(model, t);
  return qfi_pure(f(theta), param_derivative(f, theta, default_fd_step(theta)));
}

double relative(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

double infidelity(const Vector& a, const Vector& b) {
  return 1.0 - std::norm(a.normalized().dot(b.normalized()));
}

void emit_warning(std::ostream& err, const std::string& model, double theta, double t,
                  const std::string& message) {
  err << "warning model=" << model << " theta=" << num(theta) << " t=" << num(t) << ' '
      << message << '\n';
}

Matrix pseudo_hermitian_h_se(double theta, double lambda) {
  return theta * lambda *
         (kron(pauli_x(), identity(2)) -
          std::sqrt(1.0 / (lambda * lambda) - 1.0) * kron(pauli_y(), pauli_y()));
}

}  // namespace

int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err) {
  std::vector<std::string> models = options.models.empty() ? model_names() : options.models;
  if (!options.params.empty() && models.size() != 1)
    throw Error(ErrorKind::UsageError, "model parameters need a single --model");
  if (options.points < 1) throw Error(ErrorKind::UsageError, "--points must be >= 1");

  std::mt19937_64 rng(options.seed);
  int failed = 0, invariants = 0, skipped = 0;

  for (const auto& name : models) {
    const HamiltonianModel model = make_model(name, options.params);
    const Domain dom = domain_for(name);
    const double theta_lo = options.theta ? options.theta->first : dom.theta_min;
    const double theta_hi = options.theta ? options.theta->second : dom.theta_max;
    std::uniform_real_distribution<double> theta_dist(theta_lo, theta_hi);
    std::uniform_real_distribution<double> t_dist(dom.t_min, dom.t_max);
    const StateVector psi0 = make_state(model.initial_state());
    Tallies tallies;
    bool documented = false;

    for (int i = 0; i < options.points; ++i) {
      const double theta = theta_dist(rng);
      const double t = options.t ? *options.t : t_dist(rng);

      const DilationReport rep = verify_dilation(model, theta, t, 1e-6);
      if (rep.construction_error == ErrorKind::AmplificationOverflow) {
        ++skipped;
        emit_warning(err, name, theta, t, "kind=AmplificationOverflow skipped=1");
        continue;
      }
      // Past this factor eta(t) is too ill-conditioned for the 1e-6 checks.
      if (!rep.construction_error && rep.rescale_factor > kAmplificationSkip) {
        ++skipped;
        emit_warning(err, name, theta, t,
                     "kind=AmplificationOverflow rescale_factor=" + num(rep.rescale_factor) +
                         " skipped=1");
        continue;
      }
      for (const auto& w : rep.warnings) emit_warning(err, name, theta, t, "note=\"" + w + "\"");
      if (rep.construction_error) {
        tallies.add("dilation.constructible", 1.0, 0.0);
        continue;
      }
      const bool shortcut = rep.path == DilationPath::pseudo_hermitian_shortcut;
      for (const auto& c : rep.checks) {
        double threshold = 1e-6;
        bool upper = true;
        if (c.name == "joint_norm_drift") threshold = 1e-9;
        if (c.name == "h_se_hermiticity") threshold = shortcut ? 1e-12 : 1e-8;
        if (c.name == "detected_infidelity") threshold = shortcut ? 1e-10 : 1e-6;
        if (c.name == "eta_minus_identity_min") threshold = -1e-9, upper = false;
        tallies.add("dilation." + c.name, c.value, threshold, upper);
      }

      FisherBreakdown fb;
      try {
        fb = fisher_breakdown(model, theta, t);
      } catch (const Error& e) {
        tallies.add("fisher.computable", 1.0, 0.0);
        emit_warning(err, name, theta, t, "kind=" + std::string(to_string(e.kind())));
        continue;
      }
      if (options.corrupt) fb.q_d *= 2.0;
      for (const auto& c : check_hierarchy(fb, options.tol).checks) {
        if (c.name == "additivity" || c.name == "finite")
          tallies.add("fisher." + c.name, c.value, c.threshold);
        else
          tallies.add("fisher." + c.name, c.value - c.threshold, 0.0);
      }
      tallies.add("fisher.detected_qfi_matches_direct", relative(fb.q_d, fb.f_q_nh), 1e-4);

      // SLD formula on the rank-one family of the direct state.
      const StateFamily family = direct_family(model, t);
      const Vector psi = family(theta);
      const Vector dpsi = param_derivative(family, theta, default_fd_step(theta));
      // Both formulas see the same derivative; removing Re<psi|dpsi> psi leaves
      // qfi_pure unchanged and makes drho traceless.
      const Vector dpsi_t = dpsi - psi.dot(dpsi).real() * psi;
      const Matrix rho = psi * psi.adjoint();
      const Matrix drho = dpsi_t * psi.adjoint() + psi * dpsi_t.adjoint();
      const double pure = qfi_pure(psi, dpsi);
      tallies.add("fisher.sld_matches_pure",
                  std::abs(qfi_mixed(rho, drho) - pure) / std::max(1.0, pure), 1e-7);

      // <psi~(t)| eta(t) |psi~(t)> against its initial value.
      const DilationBundle bundle = dilate(model, theta, t);
      const StateVector raw = evolve(model, theta, psi0, t);
      Matrix eta_t = bundle.eta0;
      if (!shortcut && bundle.time_independent) {
        const Matrix m = mat_exp(bundle.generator(0.0), Complex(0.0, t));
        eta_t = m.adjoint() * bundle.eta0 * m;
      } else if (!shortcut) {
        eta_t = eta_of_t(bundle.generator, bundle.eta0, t, steps_for(t, kDefaultStepsPerUnitTime));
      }
      const double initial = (psi0.amplitudes.adjoint() * bundle.eta0 * psi0.amplitudes)(0, 0).real();
      const double later = (raw.amplitudes.adjoint() * eta_t * raw.amplitudes)(0, 0).real();
      // The quadratic form cancels |eta| |psi~|^2 down to the conserved value; the
      // bound is lifted to the rounding floor of that cancellation when it is higher.
      const double cancellation = eta_t.norm() * raw.amplitudes.squaredNorm() / initial;
      tallies.add("dilation.eta_conservation",
                  relative(later, initial) / std::max(1.0, cancellation * 1e-7), 1e-8);

      if (options.convergence && !shortcut) {
        auto p_d_at = [&](int steps_per_unit_time) {
          DilationBundle b = bundle;
          b.options.steps_per_unit_time = steps_per_unit_time;
          return dilated_evolve_postselect(b, psi0, t).p_d;
        };
        const double p_half = p_d_at(kDefaultStepsPerUnitTime / 2);
        const double p_default = p_d_at(kDefaultStepsPerUnitTime);
        const double p_double = p_d_at(kDefaultStepsPerUnitTime * 2);
        tallies.add("dilation.step_convergence", std::abs(p_default - p_double), 1e-6);
        tallies.add("dilation.step_refinement_gain",
                    std::abs(p_default - p_double) - std::abs(p_half - p_default), 1e-12);
      }

      if (model.analytic.qfi)
        tallies.add("model.analytic_qfi", relative(fb.f_q_nh, model.analytic.qfi(theta, t)), 1e-5);
      if (model.analytic.p_d)
        tallies.add("model.analytic_p_d", std::abs(fb.p_d - model.analytic.p_d(theta, t)), 1e-10);
      if (model.analytic.state)
        tallies.add("model.analytic_state", infidelity(model.analytic.state(theta, t), psi), 1e-10);

      if (name == "pseudo_hermitian") {
        const double lambda = model.param("lambda");
        tallies.add("fisher.rejected_qfi_zero", fb.q_r, 1e-8);
        tallies.add("dilation.h_se_closed_form",
                    max_abs(Matrix(bundle.samples.front().h_se - pseudo_hermitian_h_se(theta, lambda))),
                    1e-12);
        // Printed success probability: the gap to the exact value is x^2/(1+x), x = (1-l^2) sin^2.
        const double exact = model.analytic.p_d(theta, t);
        const double printed = model.analytic.printed_p_d(theta, t);
        const double s = std::sin(theta * t);
        const double x = (1.0 - lambda * lambda) * s * s;
        tallies.add("model.printed_p_d_gap_prediction",
                    std::abs((printed - exact) - x * x / (1.0 + x)), 1e-12);
        if (!documented) {
          const double theta_q = std::numbers::pi / 4, t_q = 2.0;
          out << "discrepancy model=" << name << " name=printed_p_d lambda=" << num(lambda)
              << " theta=" << num(theta_q) << " t=" << num(t_q)
              << " exact=" << num(model.analytic.p_d(theta_q, t_q))
              << " printed=" << num(model.analytic.printed_p_d(theta_q, t_q))
              << " formula_exact=\"cos^2(theta t) + lambda^2 sin^2(theta t)\""
              << " formula_printed=\"" << model.analytic.printed.at("P_d") << "\""
              << " status=DOCUMENTED\n";
          documented = true;
        }
      }
      if (name == "loss_loss") {
        const HamiltonianModel gl = gain_loss_partner(model);
        tallies.add("model.gauge_state", infidelity(direct_family(gl, t)(theta), psi), 1e-10);
        tallies.add("model.gauge_qfi", relative(direct_qfi(gl, theta, t), pure), 1e-6);
      }
    }

    for (const auto& tally : tallies.items()) {
      ++invariants;
      const bool ok = tally.failures == 0;
      if (!ok) ++failed;
      out << "invariant model=" << name << " name=" << tally.name << " points=" << tally.points
          << " worst=" << num(tally.worst) << " threshold=" << num(tally.threshold)
          << " cmp=" << (tally.upper ? "le" : "ge") << " status=" << (ok ? "PASS" : "FAIL")
          << '\n';
    }
  }

  out << "summary status=" << (failed == 0 ? "PASS" : "FAIL") << " invariants=" << invariants
      << " failed=" << failed << " skipped_points=" << skipped << '\n';
  return failed == 0 ? 0 : 1;
}

}  // namespace nhsense::cli
