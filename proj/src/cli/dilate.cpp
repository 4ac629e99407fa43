#include <cstdio>
#include <ostream>

#include "nhsense/cli.hpp"

namespace nhsense::cli {

namespace {

void print_matrix(std::ostream& out, const std::string& label, const Matrix& a) {
  out << label << ":\n";
  char buf[64];
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    out << "  ";
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      std::snprintf(buf, sizeof buf, " %+.10f%+.10fi", a(i, j).real(), a(i, j).imag());
      out << buf;
    }
    out << '\n';
  }
}

void print_value(std::ostream& out, const std::string& label, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  out << label << ": " << buf << '\n';
}

}  // namespace

int cmd_dilate(const DilateOptions& options, std::ostream& out, std::ostream& err) {
  HamiltonianModel model;
  try {
    model = make_model(options.model, options.params);
  } catch (const Error& e) {
    throw Error(ErrorKind::UsageError, e.what());
  }
  if (!(options.t >= 0.0)) throw Error(ErrorKind::UsageError, "--t must be >= 0");

  const DilationBundle b = dilate(model, options.theta, options.t, options.dilation);
  out << "model: " << model.name << '\n';
  print_value(out, "theta", options.theta);
  print_value(out, "t", options.t);
  out << "path: " << to_string(b.path) << '\n';
  print_value(out, "rescale_factor", b.rescale_factor);
  print_value(out, "nu", b.nu);
  if (b.amplification_risk())
    err << "warning: AmplificationOverflow risk, rescale factor " << b.rescale_factor << '\n';
  print_matrix(out, "eta0", b.eta0);

  if (b.path == DilationPath::pseudo_hermitian_shortcut) {
    const DilationSample& s = b.samples.front();
    print_matrix(out, "m", s.m);
    const DilatedHamiltonian d = build_h_se(b, 0.0);
    print_matrix(out, "h1", d.h1);
    print_matrix(out, "h2", d.h2);
    print_matrix(out, "h_se", s.h_se);
    print_value(out, "h_se_hermiticity_residual", s.hermiticity_residual);
    print_value(out, "eta_minus_identity_min", min_eigenvalue(Matrix(s.eta - identity(2))));
  } else {
    for (const auto& s : b.samples) {
      out << "sample:\n";
      print_value(out, "  t", s.t);
      print_value(out, "  eta_minus_identity_min", min_eigenvalue(Matrix(s.eta - identity(2))));
      print_value(out, "  h_se_hermiticity_residual", s.hermiticity_residual);
      print_matrix(out, "  eta", s.eta);
      print_matrix(out, "  m", s.m);
      print_matrix(out, "  h_se", s.h_se);
    }
  }
  const PostSelectionOutcome o = dilated_evolve_postselect(b, make_state(model.initial_state()), options.t);
  print_value(out, "p_d", o.p_d);
  print_value(out, "joint_norm_drift", o.joint_norm_drift);
  print_value(out, "max_h_se_hermiticity_residual", o.max_hermiticity_residual);
  return 0;
}

}  // namespace nhsense::cli
