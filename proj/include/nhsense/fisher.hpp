#ifndef NHSENSE_FISHER_HPP
#define NHSENSE_FISHER_HPP

#include <string>
#include <vector>

#include "nhsense/dilation.hpp"
#include "nhsense/dynamics.hpp"
#include "nhsense/linalg.hpp"
#include "nhsense/models.hpp"

namespace nhsense {

/// Pure-state QFI 4(<dpsi|dpsi> - |<psi|dpsi>|^2). Values slightly below zero
/// from rounding are clamped; clearly negative ones raise NumericalInconsistency.
double qfi_pure(const Vector& psi, const Vector& dpsi);

/// SLD quantum Fisher information in the eigenbasis of rho:
/// sum over p_i + p_j > 1e-12 of 2 |<i|drho|j>|^2 / (p_i + p_j).
double qfi_mixed(const Matrix& rho, const Matrix& drho);

/// Classical information carried by the two post-selection outcomes,
/// (dP_d)^2 / (P_d (1 - P_d)).
double fisher_post(double p_d, double dp_d);

struct FisherOptions {
  /// <= 0 selects default_fd_step(theta).
  double fd_step = 0.0;
  DilationOptions dilation;
};

struct FisherBreakdown {
  std::string model;
  double theta = 0.0;
  double t = 0.0;
  double f_q_joint = 0.0;
  double p_d = 0.0;
  double q_d = 0.0;
  double q_r = 0.0;
  double f_post = 0.0;
  double f_tot = 0.0;
  double f_q_nh = 0.0;
  bool rejected_degenerate = false;
  DilationPath path = DilationPath::time_ordered;
  double rescale_factor = 1.0;
  std::vector<std::string> warnings;

  double p_r() const { return 1.0 - p_d; }
  double effective_qfi() const { return p_d * f_q_nh; }
};

/// Dilates `model` at theta, holds eta(0) fixed and differentiates the joint,
/// detected and rejected states as well as P_d by central differences.
FisherBreakdown fisher_breakdown(const HamiltonianModel& model, double theta, double t,
                                 const FisherOptions& options = {});

struct HierarchyTolerance {
  double relative = 1e-4;  ///< times f_q_joint
  double absolute = 1e-8;
  double additivity = 1e-8;  ///< relative
};

struct HierarchyReport {
  std::vector<CheckResult> checks;
  bool pass() const;
  std::vector<std::string> violations() const;
};

/// P_d F_Q^nH <= F_tot <= F_Q(joint) and F_tot = P_d Q_d + P_r Q_r + F_post.
HierarchyReport check_hierarchy(const FisherBreakdown& b, const HierarchyTolerance& tol = {});

}  // namespace nhsense

#endif  // NHSENSE_FISHER_HPP
