#ifndef NHSENSE_MODELS_HPP
#define NHSENSE_MODELS_HPP

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nhsense/linalg.hpp"

namespace nhsense {

using ParamMap = std::map<std::string, double>;

/// Closed-form references attached to a model. The state formulas give the
/// direction of the evolved vector only; normalization is always taken from
/// the numeric vector norm. Printed normalization constants are kept as text.
struct AnalyticForms {
  std::function<Vector(double theta, double t)> state;
  std::function<double(double theta, double t)> qfi;
  std::function<double(double theta, double t)> p_d;
  /// Success probability as printed for the pseudo-Hermitian sensor; kept
  /// to report its disagreement with the unitary evolution.
  std::function<double(double theta, double t)> printed_p_d;
  bool normalization_numeric = true;
  std::map<std::string, std::string> printed;
};

struct HamiltonianModel {
  std::string name;
  ParamMap params;
  /// (theta, t) -> 2x2 system Hamiltonian.
  std::function<Matrix(double theta, double t)> generator;
  bool time_independent = true;
  /// Positive metric with H^dagger zeta = zeta H, when the model has one.
  std::optional<Matrix> zeta;
  AnalyticForms analytic;
  /// Eigenvalue gap (complex inside the broken phase).
  std::function<Complex(double theta)> energy_gap;
  std::vector<double> exceptional_points;

  Matrix hamiltonian(double theta, double t = 0.0) const { return generator(theta, t); }
  Vector initial_state() const { return basis_state(2, 0); }
  double param(const std::string& key) const;
};

HamiltonianModel pseudo_hermitian_model(double lambda);
HamiltonianModel ep_gyro_model(double omega_ep, double omega_ccw);
HamiltonianModel pt_symmetric_model(double r, double phi);
HamiltonianModel loss_loss_model(double v, double g, double k_h, double k_v);

/// H_GL = H_LL + i k I with k the mean loss; the loss-loss state is the
/// gain-loss state times exp(-k t).
HamiltonianModel gain_loss_partner(const HamiltonianModel& loss_loss);

/// Default parameters per registry name.
ParamMap default_params(std::string_view name);
const std::vector<std::string>& model_names();

/// Registry lookup; `overrides` replaces defaults key by key. Unknown names
/// or keys raise InvalidParam.
HamiltonianModel make_model(std::string_view name, const ParamMap& overrides = {});

}  // namespace nhsense

#endif  // NHSENSE_MODELS_HPP
