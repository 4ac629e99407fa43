#include "nhsense/dilation.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace nhsense {

namespace {

Matrix hermitian_part(const Matrix& a) { return (a + a.adjoint()) / 2.0; }

// Conjugation M^dagger eta0 M, symmetrized.
Matrix conjugate(const Matrix& eta0, const Matrix& m) {
  return hermitian_part(m.adjoint() * eta0 * m);
}

struct RootWithFloor {
  Matrix root;
  double min_eigenvalue = 0.0;
};

// (eta - I)^(1/2) together with the smallest eigenvalue of eta - I.
RootWithFloor metric_root(const Matrix& eta) {
  const Matrix shifted = eta - identity(eta.rows());
  auto eig = eig_herm(shifted);
  const double floor = -tol::kClamp * std::max(1.0, max_abs(shifted));
  if (eig.values(0) < floor)
    throw Error(ErrorKind::NotPositive,
                "eta - I has eigenvalue " + std::to_string(eig.values(0)) +
                    "; eta(0) is too small for this time window");
  RVector<double> roots = eig.values.cwiseMax(0.0).cwiseSqrt();
  return {eig.vectors * roots.asDiagonal() * eig.vectors.adjoint(), eig.values(0)};
}

// The system is a qubit, so the hot paths below run on fixed-size blocks.
using M2 = Eigen::Matrix2cd;

M2 exp2(const M2& a, Complex s) { return detail::exp_2x2(M2(s * a)); }

M2 hermitian_part(const M2& a) { return (a + a.adjoint()) / 2.0; }

// Eigenframe of eta = V diag(1 + mu^2) V^dagger, columns ascending. The small
// eigenvalue comes from det(eta) when supplied, which survives a wide spread.
struct MetricFrame {
  M2 vectors;
  Eigen::Vector2d mu;
  double min_eigenvalue = 0.0;  // of eta - I
};

MetricFrame metric_frame(const M2& eta, double det = 0.0) {
  const double a = eta(0, 0).real(), d = eta(1, 1).real();
  const Complex b = eta(0, 1);
  const double mean = (a + d) / 2, half = (a - d) / 2;
  const double r = std::hypot(half, std::abs(b));
  const double hi = mean + r;
  const double lo = det > 0.0 && hi > 0.0 ? det / hi : mean - r;

  MetricFrame f;
  if (r == 0.0) {
    f.vectors = M2::Identity();
  } else {
    Eigen::Vector2cd v_hi = half >= 0.0 ? Eigen::Vector2cd(r + half, std::conj(b))
                                        : Eigen::Vector2cd(b, r - half);
    v_hi.normalize();
    f.vectors.col(0) << -std::conj(v_hi(1)), std::conj(v_hi(0));
    f.vectors.col(1) = v_hi;
  }
  f.min_eigenvalue = lo - 1.0;
  if (f.min_eigenvalue < -tol::kClamp * std::max(1.0, hi))
    throw Error(ErrorKind::NotPositive,
                "eta - I has eigenvalue " + std::to_string(f.min_eigenvalue) +
                    "; eta(0) is too small for this time window");
  f.mu << std::sqrt(std::max(0.0, lo - 1.0)), std::sqrt(std::max(0.0, hi - 1.0));
  return f;
}

// H_SE = H1 (x) I + K (x) sigma_y with K = i H2, kept as its two 2x2 blocks.
struct Blocks {
  M2 h1;
  M2 k;
  double residual = 0.0;  // Hermiticity residual of the assembled H_SE
};

Blocks blocks_of(const M2& h1, const M2& h2) {
  const M2 k = kI * h2;
  const double residual = std::max(max_abs(M2(h1 - h1.adjoint())), max_abs(M2(k - k.adjoint())));
  return {h1, k, residual};
}

// H1 and H2 with the exact (Sylvester) dm/dt, evaluated in the eigenframe of m.
// Substituting dm/dt reduces them to
//   H1_ij = (mu_i A_ij + mu_j B_ij) / (mu_i + mu_j),  H2_ij = (A_ij - B_ij) / (mu_i + mu_j)
// with A = V^dagger H V and B = A^dagger, which avoids cancelling O(eta) terms.
Blocks frame_blocks(const M2& h, const MetricFrame& f) {
  const M2 a = f.vectors.adjoint() * h * f.vectors;
  const M2 b = a.adjoint();
  const double scale = std::max(1.0, f.mu.maxCoeff());
  M2 h1, h2;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double s = f.mu(i) + f.mu(j);
      if (s > 1e-14 * scale) {
        h1(i, j) = (f.mu(i) * a(i, j) + f.mu(j) * b(i, j)) / s;
        h2(i, j) = (a(i, j) - b(i, j)) / s;
      } else {
        h1(i, j) = (a(i, j) + b(i, j)) / 2.0;
        h2(i, j) = 0.0;
      }
    }
  return blocks_of(f.vectors * h1 * f.vectors.adjoint(), f.vectors * h2 * f.vectors.adjoint());
}

DilatedHamiltonian assemble(const Blocks& b) {
  DilatedHamiltonian out;
  out.h1 = b.h1;
  out.h2 = -kI * b.k;
  out.h_se = kron(out.h1, identity(2)) + kron(Matrix(b.k), pauli_y());
  out.hermiticity_residual = b.residual;
  return out;
}

// Anti-ordered propagator M(t) = Tbar exp(i int_0^t H) in `steps` midpoint slices.
struct Conjugator {
  Matrix m;
  double im_trace_integral = 0.0;  // int_0^t Im tr H
};

Conjugator anti_ordered(const TimeGenerator& h, double t, int steps) {
  Conjugator out{identity(2), 0.0};
  if (t == 0.0) return out;
  const double dt = t / steps;
  for (int k = 0; k < steps; ++k) {
    const Matrix hk = h((k + 0.5) * dt);
    out.m = out.m * mat_exp(hk, Complex(0.0, dt));
    out.im_trace_integral += hk.trace().imag() * dt;
  }
  return out;
}

}  // namespace

std::string to_string(DilationPath path) {
  return path == DilationPath::pseudo_hermitian_shortcut ? "pseudo_hermitian_shortcut"
                                                         : "time_ordered";
}

Matrix eta_of_t(const TimeGenerator& h, const Matrix& eta0, double t, int steps) {
  require_hermitian(eta0, 1e-10, "eta_of_t");
  if (steps <= 0) throw Error(ErrorKind::InvalidInput, "eta_of_t: steps <= 0");
  return conjugate(eta0, anti_ordered(h, t, steps).m);
}

EtaSpectrum eta_spectrum(const TimeGenerator& h, const Matrix& eta0, double t, int steps) {
  const Conjugator c = anti_ordered(h, t, steps);
  const Matrix eta = conjugate(eta0, c.m);
  const auto eig = eig_herm(eta);
  EtaSpectrum out{eig.values(0), eig.values(eig.values.size() - 1)};
  if (eta.rows() == 2 && out.max > 0.0) {
    const double det0 = eta0.determinant().real();
    out.min = det0 * std::exp(-2.0 * c.im_trace_integral) / out.max;
  }
  return out;
}

RescaleResult rescale_eta0(const Matrix& eta_prime0, const TimeGenerator& h, double t_max,
                           int grid_per_unit_time, double safety) {
  require_hermitian(eta_prime0, 1e-10, "rescale_eta0");
  if (grid_per_unit_time <= 0 || !(safety >= 1.0))
    throw Error(ErrorKind::InvalidInput, "rescale_eta0: bad grid or safety factor");
  const int points = steps_for(t_max, grid_per_unit_time);
  const double dt = t_max / points;
  const double det0 = eta_prime0.determinant().real();

  Matrix m = identity(2);
  double im_trace = 0.0;
  double nu = min_eigenvalue(eta_prime0);
  for (int k = 0; k < points && t_max > 0.0; ++k) {
    const Matrix hk = h((k + 0.5) * dt);
    m = m * mat_exp(hk, Complex(0.0, dt));
    im_trace += hk.trace().imag() * dt;
    const Matrix eta = conjugate(eta_prime0, m);
    const auto eig = eig_herm(eta);
    double lo = eig.values(0);
    const double hi = eig.values(eig.values.size() - 1);
    if (eta.rows() == 2 && hi > 0.0) lo = det0 * std::exp(-2.0 * im_trace) / hi;
    nu = std::min(nu, lo);
  }
  if (!(nu >= 1e-12))
    throw Error(ErrorKind::AmplificationOverflow,
                "rescale_eta0: nu' = " + std::to_string(nu) + " on [0, " +
                    std::to_string(t_max) + "]");
  return {safety * eta_prime0 / nu, nu, safety / nu};
}

DilatedHamiltonian build_h_se(const Matrix& h, const Matrix& eta, const Matrix& m,
                              const Matrix& dm_dt) {
  Eigen::PartialPivLU<Matrix> lu(eta);
  if (!(lu.rcond() > 1e-14)) throw Error(ErrorKind::SingularEta, "build_h_se: eta is singular");
  const Matrix eta_inv = lu.inverse();

  DilatedHamiltonian out;
  out.h1 = (h + m * h * m + kI * dm_dt * m) * eta_inv;
  out.h2 = (h * m - m * h - kI * dm_dt) * eta_inv;
  out.h_se = kron(out.h1, identity(2)) + kI * kron(out.h2, pauli_y());
  out.hermiticity_residual = hermiticity_residual(out.h_se);
  return out;
}

Matrix sqrt_derivative(const Matrix& m, const Matrix& eta_dot_value) {
  const auto eig = eig_herm(m);
  const Matrix x = eig.vectors.adjoint() * eta_dot_value * eig.vectors;
  const double scale = std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  Matrix y = Matrix::Zero(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const double denom = eig.values(i) + eig.values(j);
      if (denom > 1e-14 * scale) y(i, j) = x(i, j) / denom;
    }
  return eig.vectors * y * eig.vectors.adjoint();
}

DilationBundle pseudo_hermitian_shortcut(const Matrix& h, const Matrix& zeta) {
  require_hermitian(zeta, 1e-10, "pseudo_hermitian_shortcut");
  const double nu = min_eigenvalue(zeta);
  if (!(nu > 0.0))
    throw Error(ErrorKind::NotPseudoHermitian, "pseudo_hermitian_shortcut: zeta not positive");
  const Matrix lhs = h.adjoint() * zeta;
  const Matrix rhs = zeta * h;
  const double scale = std::max(1.0, std::max(max_abs(lhs), max_abs(rhs)));
  if (max_abs(lhs - rhs) > 1e-9 * scale)
    throw Error(ErrorKind::NotPseudoHermitian,
                "pseudo_hermitian_shortcut: H^dagger zeta != zeta H (residual " +
                    std::to_string(max_abs(lhs - rhs)) + ")");

  DilationBundle b;
  b.path = DilationPath::pseudo_hermitian_shortcut;
  b.eta0 = zeta / nu;
  b.rescale_factor = 1.0 / nu;
  b.nu = nu;
  b.generator = [h](double) { return h; };
  const Matrix m = metric_root(b.eta0).root;
  const DilatedHamiltonian d = build_h_se(h, b.eta0, m, Matrix::Zero(2, 2));
  b.samples.push_back({0.0, b.eta0, m, d.h_se, d.hermiticity_residual});
  return b;
}

DilatedHamiltonian build_h_se(const DilationBundle& bundle, double t) {
  if (bundle.path == DilationPath::pseudo_hermitian_shortcut) {
    const DilationSample& s = bundle.samples.front();
    return build_h_se(bundle.generator(t), s.eta, s.m, Matrix::Zero(2, 2));
  }
  const int spu = bundle.options.steps_per_unit_time;
  const Matrix h = bundle.generator(t);
  const Conjugator c = anti_ordered(bundle.generator, t, steps_for(t, spu));
  const Matrix eta = conjugate(bundle.eta0, c.m);
  if (bundle.options.dm_dt == DmDtMethod::sylvester) {
    const double det = bundle.eta0.determinant().real() * std::exp(-2.0 * c.im_trace_integral);
    return assemble(frame_blocks(h, metric_frame(eta, det)));
  }
  const double half = 0.5 / spu;
  const Matrix up = c.m * mat_exp(bundle.generator(t + half / 2), Complex(0.0, half));
  const Matrix down = c.m * mat_exp(bundle.generator(t - half / 2), Complex(0.0, -half));
  const Matrix dm = (metric_root(conjugate(bundle.eta0, up)).root -
                     metric_root(conjugate(bundle.eta0, down)).root) /
                    (2.0 * half);
  return build_h_se(h, eta, metric_root(eta).root, dm);
}

DilationBundle time_ordered_dilation(const TimeGenerator& h, const Matrix& eta0, double t_max,
                                     const DilationOptions& options) {
  require_hermitian(eta0, 1e-10, "time_ordered_dilation");
  DilationBundle b;
  b.path = DilationPath::time_ordered;
  b.eta0 = hermitian_part(eta0);
  b.generator = h;
  b.options = options;
  b.t_max = t_max;
  b.nu = 1.0;
  b.rescale_factor = 1.0;
  const int sample_count = std::max(1, options.inspection_samples);
  for (int j = 0; j < sample_count; ++j) {
    const double t = sample_count == 1 ? 0.0 : t_max * j / (sample_count - 1);
    const Conjugator c = anti_ordered(h, t, steps_for(t, options.steps_per_unit_time));
    DilationSample s;
    s.t = t;
    s.eta = conjugate(b.eta0, c.m);
    s.m = metric_root(s.eta).root;
    const DilatedHamiltonian d = build_h_se(b, t);
    s.h_se = d.h_se;
    s.hermiticity_residual = d.hermiticity_residual;
    b.samples.push_back(std::move(s));
  }
  return b;
}

DilationBundle dilate(const HamiltonianModel& model, double theta, double t_max,
                      const DilationOptions& options) {
  if (model.zeta && options.prefer_shortcut && model.time_independent) {
    DilationBundle b = pseudo_hermitian_shortcut(model.hamiltonian(theta), *model.zeta);
    b.options = options;
    b.t_max = t_max;
    return b;
  }
  TimeGenerator gen = [model, theta](double t) { return model.generator(theta, t); };
  Matrix eta0;
  double factor = 1.0, nu = 1.0;
  if (options.eta0.kind == Eta0Mode::Kind::fixed_scalar) {
    if (!(options.eta0.scalar >= 1.0))
      throw Error(ErrorKind::InvalidParam, "fixed eta(0) scalar must be >= 1");
    eta0 = options.eta0.scalar * identity(2);
    factor = options.eta0.scalar;
    nu = 1.0 / options.eta0.scalar;
  } else {
    const RescaleResult r = rescale_eta0(identity(2), gen, t_max,
                                         options.rescale_grid_per_unit_time,
                                         options.rescale_safety);
    eta0 = r.eta0;
    factor = r.rescale_factor;
    nu = r.nu_prime;
  }
  DilationBundle b = time_ordered_dilation(gen, eta0, t_max, options);
  b.time_independent = model.time_independent;
  b.rescale_factor = factor;
  b.nu = nu;
  return b;
}

DilationBundle redilate(const DilationBundle& reference, const HamiltonianModel& model,
                        double theta) {
  if (reference.path == DilationPath::pseudo_hermitian_shortcut) {
    DilationBundle b = pseudo_hermitian_shortcut(model.hamiltonian(theta), *model.zeta);
    b.options = reference.options;
    b.t_max = reference.t_max;
    return b;
  }
  TimeGenerator gen = [model, theta](double t) { return model.generator(theta, t); };
  DilationOptions options = reference.options;
  options.inspection_samples = 1;
  DilationBundle b = time_ordered_dilation(gen, reference.eta0, reference.t_max, options);
  b.time_independent = model.time_independent;
  b.options = reference.options;
  b.rescale_factor = reference.rescale_factor;
  b.nu = reference.nu;
  return b;
}

Vector joint_initial_state(const DilationBundle& bundle, const Vector& psi0) {
  const Matrix m0 = bundle.path == DilationPath::pseudo_hermitian_shortcut
                        ? bundle.samples.front().m
                        : metric_root(bundle.eta0).root;
  const Vector upper = psi0;
  const Vector lower = m0 * psi0;
  const double norm_sq = (psi0.adjoint() * bundle.eta0 * psi0)(0, 0).real();
  Vector joint(4);
  for (int s = 0; s < 2; ++s) {
    joint(2 * s) = upper(s);
    joint(2 * s + 1) = lower(s);
  }
  return joint / std::sqrt(norm_sq);
}

PostSelectionOutcome postselect(const Vector& joint) {
  if (joint.size() != 4) throw Error(ErrorKind::InvalidInput, "postselect: joint state must be 4-dim");
  const double norm = joint.norm();
  const Vector psi = joint / norm;
  Vector detected(2), rejected(2);
  detected << psi(0), psi(2);
  rejected << psi(1), psi(3);

  PostSelectionOutcome out;
  out.joint_norm_drift = std::abs(norm - 1.0);
  out.psi_joint = {psi, true};
  out.p_d = detected.squaredNorm();
  out.p_r = 1.0 - out.p_d;
  const double nd = detected.norm();
  if (!(nd > 1e-300))
    throw Error(ErrorKind::DegenerateState, "postselect: detected branch vanishes");
  out.psi_d = {detected / nd, true};
  const double nr = rejected.norm();
  if (nr < 1e-14) {
    out.psi_r_degenerate = true;
    out.psi_r = {Vector::Zero(2), false};
  } else {
    out.psi_r = {rejected / nr, true};
  }
  return out;
}

PostSelectionOutcome dilated_evolve_postselect(const DilationBundle& bundle,
                                               const StateVector& psi0, double t) {
  if (psi0.dim() != 2 || !psi0.normalized)
    throw Error(ErrorKind::InvalidInput, "dilated_evolve_postselect: psi0 must be a normalized qubit state");
  if (!(t >= 0.0)) throw Error(ErrorKind::InvalidInput, "dilated_evolve_postselect: t < 0");
  Vector joint = joint_initial_state(bundle, psi0.amplitudes);

  double residual = 0.0;
  double floor = 0.0;
  if (bundle.path == DilationPath::pseudo_hermitian_shortcut) {
    const DilationSample& s = bundle.samples.front();
    residual = s.hermiticity_residual;
    floor = min_eigenvalue(Matrix(s.eta - identity(2)));
    joint = mat_exp(hermitian_part(s.h_se), Complex(0.0, -t)) * joint;
  } else {
    const int steps = steps_for(t, bundle.options.steps_per_unit_time);
    const double dt = t / steps;
    const auto& gen = bundle.generator;
    const M2 eta0 = bundle.eta0;
    const double det0 = eta0.determinant().real();
    floor = metric_frame(eta0).min_eigenvalue;

    // H_SE blocks at time `at` from the anti-ordered propagator and
    // int Im tr H at that time.
    auto dilated_at = [&](const M2& m_at, double trace, double at) {
      const M2 eta = hermitian_part(M2(m_at.adjoint() * eta0 * m_at));
      const M2 h = gen(at);
      Blocks blk;
      double lowest = 0.0;
      if (bundle.options.dm_dt == DmDtMethod::sylvester) {
        const MetricFrame f = metric_frame(eta, det0 * std::exp(-2.0 * trace));
        blk = frame_blocks(h, f);
        lowest = f.min_eigenvalue;
      } else {
        const RootWithFloor root = metric_root(eta);
        const double half = dt / 4;
        const M2 up = m_at * exp2(gen(at + half / 2), Complex(0.0, half));
        const M2 down = m_at * exp2(gen(at - half / 2), Complex(0.0, -half));
        const Matrix dm = (metric_root(hermitian_part(M2(up.adjoint() * eta0 * up))).root -
                           metric_root(hermitian_part(M2(down.adjoint() * eta0 * down))).root) /
                          (2.0 * half);
        const DilatedHamiltonian d = build_h_se(h, eta, root.root, dm);
        blk = blocks_of(d.h1, d.h2);
        lowest = root.min_eigenvalue;
      }
      if (blk.residual > bundle.options.hermiticity_limit)
        throw Error(ErrorKind::ConstructionDrift,
                    "H_SE Hermiticity residual " + std::to_string(blk.residual) +
                        " at t = " + std::to_string(at));
      residual = std::max(residual, blk.residual);
      floor = std::min(floor, lowest);
      blk.h1 = hermitian_part(blk.h1);
      blk.k = hermitian_part(blk.k);
      return blk;
    };

    // Fourth-order Magnus step on the two Gauss-Legendre nodes. Operators of
    // the form P (x) I + Q (x) sigma_y are closed under commutation and act as
    // P + Q and P - Q on the sigma_y = +1 and -1 ancilla eigenspaces.
    const double offset = std::sqrt(3.0) / 6.0;
    const double c = std::sqrt(3.0) / 12.0 * dt * dt;
    const M2 sy = pauli_y();
    const M2 proj_plus = (M2::Identity() + sy) / 2.0;
    const M2 proj_minus = (M2::Identity() - sy) / 2.0;
    auto comm = [](const M2& x, const M2& y) -> M2 { return x * y - y * x; };

    // psi(s, e) = joint(2 s + e); (X (x) Y) joint = X psi Y^T.
    M2 psi;
    psi << joint(0), joint(1), joint(2), joint(3);
    // Sub-step propagators from t_k to the two nodes and to t_k + dt.
    bool k_cached = false;
    const std::array<double, 3> fractions = {0.5 - offset, 0.5 + offset, 1.0};
    std::array<M2, 3> cached;
    std::array<double, 3> cached_trace{};
    auto substep = [&](double tk, std::size_t i, M2& prop, double& trace_gain) {
      if (bundle.time_independent && k_cached) {
        prop = cached[i];
        trace_gain = cached_trace[i];
        return;
      }
      const double len = fractions[i] * dt;
      const M2 g = gen(tk + len / 2);
      prop = exp2(g, Complex(0.0, len));
      trace_gain = g.trace().imag() * len;
      cached[i] = prop;
      cached_trace[i] = trace_gain;
    };

    M2 m_prop = M2::Identity();
    double trace = 0.0;
    for (int k = 0; k < steps && t > 0.0; ++k) {
      const double tk = k * dt;
      std::array<M2, 3> prop;
      std::array<double, 3> gain{};
      for (std::size_t i = 0; i < 3; ++i) substep(tk, i, prop[i], gain[i]);
      k_cached = true;
      const Blocks a = dilated_at(M2(m_prop * prop[0]), trace + gain[0], tk + fractions[0] * dt);
      const Blocks b = dilated_at(M2(m_prop * prop[1]), trace + gain[1], tk + fractions[1] * dt);
      const M2 p = Complex(0.0, -dt / 2) * (a.h1 + b.h1) - c * (comm(b.h1, a.h1) + comm(b.k, a.k));
      const M2 q = Complex(0.0, -dt / 2) * (a.k + b.k) - c * (comm(b.h1, a.k) + comm(b.k, a.h1));
      psi = exp2(M2(p + q), 1.0) * psi * proj_plus.transpose() +
            exp2(M2(p - q), 1.0) * psi * proj_minus.transpose();
      m_prop = m_prop * prop[2];
      trace += gain[2];
    }
    joint << psi(0, 0), psi(0, 1), psi(1, 0), psi(1, 1);
  }

  PostSelectionOutcome out = postselect(joint);
  out.max_hermiticity_residual = residual;
  out.min_eta_minus_identity = floor;
  return out;
}

bool DilationReport::pass() const {
  if (construction_error) return false;
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

DilationReport verify_dilation(const HamiltonianModel& model, double theta, double t, double tol,
                               const DilationOptions& options) {
  DilationReport report;
  report.model = model.name;
  report.theta = theta;
  report.t = t;
  try {
    DilationOptions quiet = options;
    quiet.inspection_samples = 1;
    const DilationBundle bundle = dilate(model, theta, t, quiet);
    report.path = bundle.path;
    report.rescale_factor = bundle.rescale_factor;
    if (bundle.amplification_risk())
      report.warnings.push_back("AmplificationOverflow risk: rescale factor " +
                                std::to_string(bundle.rescale_factor));

    const StateVector psi0{model.initial_state(), true};
    const PostSelectionOutcome out = dilated_evolve_postselect(bundle, psi0, t);
    report.p_d = out.p_d;

    const StateVector direct = evolve(model, theta, psi0, t);
    const Normalized direct_n = normalize(direct);
    const double fidelity = std::norm(out.psi_d.amplitudes.dot(direct_n.state.amplitudes));

    const Matrix eta_t = bundle.path == DilationPath::pseudo_hermitian_shortcut
                             ? bundle.eta0
                             : eta_of_t(bundle.generator, bundle.eta0, t,
                                        steps_for(t, options.steps_per_unit_time));
    const double metric_norm =
        (direct.amplitudes.adjoint() * eta_t * direct.amplitudes)(0, 0).real();
    const double p_d_metric = direct.amplitudes.squaredNorm() / metric_norm;

    report.checks.push_back({"joint_norm_drift", out.joint_norm_drift, tol,
                             out.joint_norm_drift <= tol});
    report.checks.push_back({"h_se_hermiticity", out.max_hermiticity_residual, tol,
                             out.max_hermiticity_residual <= tol});
    report.checks.push_back({"eta_minus_identity_min", out.min_eta_minus_identity, -tol,
                             out.min_eta_minus_identity >= -tol});
    report.checks.push_back({"detected_infidelity", 1.0 - fidelity, tol, 1.0 - fidelity <= tol});
    const double gap = std::abs(out.p_d - p_d_metric);
    report.checks.push_back({"p_d_consistency", gap, tol, gap <= tol});
    if (out.p_d < 1e-6)
      report.warnings.push_back("success probability " + std::to_string(out.p_d) +
                                " is extremely small");
  } catch (const Error& e) {
    report.construction_error = e.kind();
    report.warnings.push_back(e.what());
  }
  return report;
}

}  // namespace nhsense
