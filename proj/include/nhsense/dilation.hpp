#ifndef NHSENSE_DILATION_HPP
#define NHSENSE_DILATION_HPP

// Naimark dilation of a 2-level non-Hermitian generator onto system (x) ancilla.
//
// The metric eta(t) = T exp(-i int H^dagger) eta(0) Tbar exp(+i int H) keeps
// <psi~(t)| eta(t) |psi~(t)> constant, m(t) = (eta(t) - I)^(1/2) and
//
//   H1 = {H + m H m + i (dm/dt) m} eta^-1
//   H2 = {[H, m] - i dm/dt} eta^-1
//   H_SE = H1 (x) I + i H2 (x) sigma_y
//
// generates the unitary joint evolution whose ancilla-|0> branch is the
// non-Hermitian state. Joint index is 2 * system + ancilla.

#include <optional>
#include <string>
#include <vector>

#include "nhsense/dynamics.hpp"
#include "nhsense/linalg.hpp"
#include "nhsense/models.hpp"

namespace nhsense {

enum class DilationPath { pseudo_hermitian_shortcut, time_ordered };

std::string to_string(DilationPath path);

/// How dm/dt is obtained on the time-ordered path.
enum class DmDtMethod {
  sylvester,           ///< exact: m dm + dm m = d(eta)/dt with d(eta)/dt = i(eta H - H^dagger eta)
  central_difference,  ///< (m(t + dt/2) - m(t - dt/2)) / dt on the propagation grid
};

struct Eta0Mode {
  enum class Kind { auto_rescale, fixed_scalar };
  Kind kind = Kind::auto_rescale;
  double scalar = 1.0;

  static Eta0Mode auto_rescale() { return {}; }
  static Eta0Mode fixed(double c) { return {Kind::fixed_scalar, c}; }
};

struct DilationOptions {
  int steps_per_unit_time = kDefaultStepsPerUnitTime;
  DmDtMethod dm_dt = DmDtMethod::sylvester;
  /// Positivity scan density and safety factor for the eta(0) rescaling.
  int rescale_grid_per_unit_time = 200;
  double rescale_safety = 1.001;
  /// H_SE residuals above this abort with ConstructionDrift.
  double hermiticity_limit = 1e-6;
  Eta0Mode eta0 = Eta0Mode::auto_rescale();
  /// Rescale factors above this are reported as an amplification risk.
  double amplification_warning = 1e3;
  /// Models carrying a metric use the time-independent construction.
  bool prefer_shortcut = true;
  /// H_SE snapshots stored on time-ordered bundles for inspection.
  int inspection_samples = 5;
};

struct DilatedHamiltonian {
  Matrix h1;
  Matrix h2;
  Matrix h_se;
  double hermiticity_residual = 0.0;
};

struct DilationSample {
  double t = 0.0;
  Matrix eta;
  Matrix m;
  Matrix h_se;
  double hermiticity_residual = 0.0;
};

struct DilationBundle {
  DilationPath path = DilationPath::time_ordered;
  Matrix eta0;
  /// 1/nu (shortcut: 1/nu_zeta; time-ordered: safety/nu' or the fixed scalar).
  double rescale_factor = 1.0;
  /// Minimum eigenvalue that fixed the rescaling (nu_zeta or nu').
  double nu = 1.0;
  TimeGenerator generator;
  /// Lets the time-ordered evolution reuse its sub-step propagators.
  bool time_independent = false;
  DilationOptions options;
  double t_max = 0.0;
  /// Inspection samples; the shortcut path has a single constant sample.
  std::vector<DilationSample> samples;

  bool amplification_risk() const { return rescale_factor > options.amplification_warning; }
};

struct PostSelectionOutcome {
  double p_d = 0.0;
  double p_r = 0.0;
  StateVector psi_d;
  StateVector psi_r;
  bool psi_r_degenerate = false;
  StateVector psi_joint;
  /// | ||Psi(t)|| - 1 | before the final renormalization.
  double joint_norm_drift = 0.0;
  double max_hermiticity_residual = 0.0;
  /// Smallest eigenvalue of eta - I met along the evolution.
  double min_eta_minus_identity = 0.0;
};

/// Two-sided ordered conjugation of eta0 over [0, t].
Matrix eta_of_t(const TimeGenerator& h, const Matrix& eta0, double t, int steps);

struct EtaSpectrum {
  double min = 0.0;
  double max = 0.0;
};

/// Extreme eigenvalues of eta(t). For 2x2 the small eigenvalue is recovered
/// as det/max with det = det(eta0) exp(-2 int Im tr H), which stays accurate
/// when eta(t) spans many decades.
EtaSpectrum eta_spectrum(const TimeGenerator& h, const Matrix& eta0, double t, int steps);

struct RescaleResult {
  Matrix eta0;
  double nu_prime = 1.0;
  double rescale_factor = 1.0;
};

/// Scales eta'(0) so that eta(t) - I stays positive on [0, t_max]:
/// nu' = min over the grid of the smallest eigenvalue of eta'(t) and
/// eta(0) = safety * eta'(0) / nu'. nu' < 1e-12 raises AmplificationOverflow.
RescaleResult rescale_eta0(const Matrix& eta_prime0, const TimeGenerator& h, double t_max,
                           int grid_per_unit_time = 200, double safety = 1.001);

/// Time-independent dilation for H^dagger zeta = zeta H with zeta > 0.
DilationBundle pseudo_hermitian_shortcut(const Matrix& h, const Matrix& zeta);

/// Assembles H1, H2 and H_SE from the metric data at one instant.
DilatedHamiltonian build_h_se(const Matrix& h, const Matrix& eta, const Matrix& m,
                              const Matrix& dm_dt);

/// Exact dm/dt from the Sylvester equation m X + X m = d(eta)/dt.
Matrix sqrt_derivative(const Matrix& m, const Matrix& eta_dot);

/// H_SE(t) on the time-ordered path (dm/dt per bundle options).
DilatedHamiltonian build_h_se(const DilationBundle& bundle, double t);

/// Time-ordered dilation with a given eta(0); options.inspection_samples
/// snapshots (at least one, at t = 0) are stored across [0, t_max].
DilationBundle time_ordered_dilation(const TimeGenerator& h, const Matrix& eta0, double t_max,
                                     const DilationOptions& options);

/// Picks the path for a model at one theta: shortcut when the model carries a
/// metric, time-ordered otherwise with eta(0) from options.eta0.
DilationBundle dilate(const HamiltonianModel& model, double theta, double t_max,
                      const DilationOptions& options = {});

/// Rebuilds `reference` at another theta with the same path and eta(0), so
/// that the dilation itself carries no extra theta dependence.
DilationBundle redilate(const DilationBundle& reference, const HamiltonianModel& model,
                        double theta);

/// Initial joint state (psi0 (x) |0> + m(0) psi0 (x) |1>) / norm.
Vector joint_initial_state(const DilationBundle& bundle, const Vector& psi0);

/// Unitary joint evolution to time t followed by projection of the ancilla.
PostSelectionOutcome dilated_evolve_postselect(const DilationBundle& bundle,
                                               const StateVector& psi0, double t);

/// Splits a joint state into detected (ancilla |0>) and rejected (|1>) branches.
PostSelectionOutcome postselect(const Vector& joint);

struct CheckResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct DilationReport {
  std::string model;
  double theta = 0.0;
  double t = 0.0;
  DilationPath path = DilationPath::time_ordered;
  double rescale_factor = 1.0;
  double p_d = 0.0;
  std::vector<CheckResult> checks;
  std::vector<std::string> warnings;
  /// Set when the dilation could not be built (e.g. AmplificationOverflow).
  std::optional<ErrorKind> construction_error;

  bool pass() const;
};

/// End-to-end certificate: joint-norm drift, H_SE Hermiticity, eta - I
/// positivity, detected-state fidelity against direct evolution and the two
/// routes to P_d. All thresholds derive from `tol`.
DilationReport verify_dilation(const HamiltonianModel& model, double theta, double t, double tol,
                               const DilationOptions& options = {});

}  // namespace nhsense

#endif  // NHSENSE_DILATION_HPP
