#include "nhsense/fisher.hpp"

#include <array>
#include <cmath>

namespace nhsense {

namespace {

constexpr double kNegativeClamp = 1e-12;

double clamp_information(double value, double scale, const char* who) {
  if (value >= 0.0) return value;
  if (value > -kNegativeClamp * std::max(1.0, scale)) return 0.0;
  throw Error(ErrorKind::NumericalInconsistency,
              std::string(who) + ": negative information " + std::to_string(value));
}

}  // namespace

double qfi_pure(const Vector& psi, const Vector& dpsi) {
  if (psi.size() != dpsi.size()) throw Error(ErrorKind::InvalidInput, "qfi_pure: size mismatch");
  const double dd = dpsi.squaredNorm();
  const double overlap = std::norm(psi.dot(dpsi));
  return clamp_information(4.0 * (dd - overlap), 4.0 * dd, "qfi_pure");
}

double qfi_mixed(const Matrix& rho, const Matrix& drho) {
  constexpr double kTol = 1e-9;
  if (rho.rows() != rho.cols() || drho.rows() != rho.rows() || drho.cols() != rho.cols())
    throw Error(ErrorKind::InvalidState, "qfi_mixed: shape mismatch");
  if (hermiticity_residual(rho) > kTol || std::abs(rho.trace() - 1.0) > kTol)
    throw Error(ErrorKind::InvalidState, "qfi_mixed: rho is not a Hermitian unit-trace matrix");
  const double drho_scale = std::max(1.0, max_abs(drho));
  if (hermiticity_residual(drho) > kTol * drho_scale ||
      std::abs(drho.trace()) > kTol * drho_scale)
    throw Error(ErrorKind::InvalidState, "qfi_mixed: drho is not Hermitian and traceless");
  const auto eig = eig_herm(rho, kTol);
  if (eig.values(0) < -kTol) throw Error(ErrorKind::InvalidState, "qfi_mixed: rho not PSD");

  const Matrix d = eig.vectors.adjoint() * drho * eig.vectors;
  double f = 0.0;
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
      const double s = eig.values(i) + eig.values(j);
      if (s > 1e-12) f += 2.0 * std::norm(d(i, j)) / s;
    }
  return f;
}

double fisher_post(double p_d, double dp_d) {
  constexpr double kEdge = 1e-12;
  if (!(p_d >= -kEdge && p_d <= 1.0 + kEdge))
    throw Error(ErrorKind::InvalidInput, "fisher_post: p_d outside [0, 1]");
  if (p_d < kEdge || p_d > 1.0 - kEdge) {
    if (std::abs(dp_d) < 1e-10) return 0.0;
    throw Error(ErrorKind::PostSelectionSingular,
                "fisher_post: p_d = " + std::to_string(p_d) + " with dp_d = " +
                    std::to_string(dp_d));
  }
  return dp_d * dp_d / (p_d * (1.0 - p_d));
}

FisherBreakdown fisher_breakdown(const HamiltonianModel& model, double theta, double t,
                                 const FisherOptions& options) {
  const double h = options.fd_step > 0.0 ? options.fd_step : default_fd_step(theta);
  const StateVector psi0{model.initial_state(), true};

  FisherBreakdown b;
  b.model = model.name;
  b.theta = theta;
  b.t = t;

  DilationOptions dilation = options.dilation;
  dilation.inspection_samples = 1;
  const DilationBundle center = dilate(model, theta, t, dilation);
  b.path = center.path;
  b.rescale_factor = center.rescale_factor;
  if (center.amplification_risk())
    b.warnings.push_back("AmplificationOverflow risk: rescale factor " +
                         std::to_string(center.rescale_factor));

  const std::array<double, 3> thetas = {theta - h, theta, theta + h};
  std::array<PostSelectionOutcome, 3> outcomes;
  std::array<Vector, 3> direct;
  for (std::size_t i = 0; i < 3; ++i) {
    const DilationBundle bundle = i == 1 ? center : redilate(center, model, thetas[i]);
    outcomes[i] = dilated_evolve_postselect(bundle, psi0, t);
    direct[i] = normalize(evolve(model, thetas[i], psi0, t)).state.amplitudes;
  }
  auto derivative = [h](const Vector& minus, const Vector& plus) -> Vector {
    return (plus - minus) / (2.0 * h);
  };

  const PostSelectionOutcome& mid = outcomes[1];
  b.p_d = mid.p_d;
  b.f_q_joint = qfi_pure(mid.psi_joint.amplitudes,
                         derivative(outcomes[0].psi_joint.amplitudes,
                                    outcomes[2].psi_joint.amplitudes));
  b.q_d = qfi_pure(mid.psi_d.amplitudes,
                   derivative(outcomes[0].psi_d.amplitudes, outcomes[2].psi_d.amplitudes));
  b.rejected_degenerate = outcomes[0].psi_r_degenerate || mid.psi_r_degenerate ||
                          outcomes[2].psi_r_degenerate;
  if (b.rejected_degenerate) {
    b.q_r = 0.0;
    b.warnings.push_back("rejected branch degenerate; Q_r recorded as 0");
  } else {
    b.q_r = qfi_pure(mid.psi_r.amplitudes,
                     derivative(outcomes[0].psi_r.amplitudes, outcomes[2].psi_r.amplitudes));
  }
  const double dp_d = (outcomes[2].p_d - outcomes[0].p_d) / (2.0 * h);
  b.f_post = fisher_post(b.p_d, dp_d);
  b.f_tot = b.p_d * b.q_d + b.p_r() * b.q_r + b.f_post;
  b.f_q_nh = qfi_pure(direct[1], derivative(direct[0], direct[2]));
  return b;
}

bool HierarchyReport::pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

std::vector<std::string> HierarchyReport::violations() const {
  std::vector<std::string> out;
  for (const auto& c : checks)
    if (!c.pass) out.push_back(c.name);
  return out;
}

HierarchyReport check_hierarchy(const FisherBreakdown& b, const HierarchyTolerance& tol) {
  const double slack = tol.relative * b.f_q_joint + tol.absolute;
  HierarchyReport r;
  // Margins are stored as value = lhs - rhs against threshold = slack.
  const double effective_margin = b.effective_qfi() - b.f_tot;
  r.checks.push_back({"effective_qfi_le_total", effective_margin, slack, effective_margin <= slack});
  const double total_margin = b.f_tot - b.f_q_joint;
  r.checks.push_back({"total_le_joint_qfi", total_margin, slack, total_margin <= slack});
  const double sum = b.p_d * b.q_d + b.p_r() * b.q_r + b.f_post;
  const double additivity = std::abs(b.f_tot - sum) / std::max(std::abs(b.f_tot), 1e-300);
  r.checks.push_back({"additivity", additivity, tol.additivity, additivity <= tol.additivity});
  const bool finite = std::isfinite(b.f_tot) && std::isfinite(b.f_q_joint) &&
                      std::isfinite(b.f_q_nh) && std::isfinite(b.p_d);
  r.checks.push_back({"finite", finite ? 0.0 : 1.0, 0.0, finite});
  return r;
}

}  // namespace nhsense
