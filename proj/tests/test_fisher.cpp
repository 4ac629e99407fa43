#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nhsense/fisher.hpp"
#include "oracles.hpp"

using namespace nhsense;

namespace {

Matrix projector(const Vector& v) { return v * v.adjoint(); }

Matrix drho_of(const Vector& psi, const Vector& dpsi) {
  return dpsi * psi.adjoint() + psi * dpsi.adjoint();
}

bool names_violation(const HierarchyReport& r, const std::string& fragment) {
  for (const auto& v : r.violations())
    if (v.find(fragment) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("qfi_pure: pseudo-Hermitian closed form") {
  for (double lambda : {0.2, 0.5, 0.9}) {
    const oracle::PseudoHermitian ph{lambda};
    for (double theta : {0.1, 0.6, 1.2})
      for (double t : {1.0, 2.0}) {
        const double f = qfi_pure(ph.state(theta, t), ph.dstate(theta, t));
        CHECK(f == doctest::Approx(ph.qfi(theta, t)).epsilon(1e-12));
      }
  }
}

TEST_CASE("qfi_pure: Hermitian limit gives 4 t^2") {
  const oracle::PseudoHermitian ph{1.0};
  CHECK(qfi_pure(ph.state(0.4, 2.0), ph.dstate(0.4, 2.0)) == doctest::Approx(16.0));
}

TEST_CASE("qfi_pure: theta-independent state and pure phase derivatives carry nothing") {
  const Vector psi = basis_state(2, 0);
  CHECK(qfi_pure(psi, Vector::Zero(2)) == 0.0);
  std::mt19937_64 rng(41);
  const Vector v = oracle::random_state(rng, 2);
  CHECK(qfi_pure(v, Vector(Complex(0.0, 0.7) * v)) < 1e-14);
}

TEST_CASE("qfi_pure: global phase invariance and positivity") {
  std::mt19937_64 rng(42);
  const Complex phase = std::exp(Complex(0.0, 1.234));
  for (int trial = 0; trial < 50; ++trial) {
    const Vector psi = oracle::random_state(rng, 4);
    const Vector dpsi = oracle::random_matrix(rng, 4).col(0);
    const double a = qfi_pure(psi, dpsi);
    CHECK(a >= 0.0);
    CHECK(qfi_pure(Vector(phase * psi), Vector(phase * dpsi)) == doctest::Approx(a).epsilon(1e-12));
  }
}

TEST_CASE("qfi_pure: the minus sign is the consistent one") {
  // psi(theta) = exp(-i theta G) psi0 has F_Q = 4 Var(G) and <psi|dpsi> = -i <G> != 0,
  // so the "+" variant disagrees with both the variance and the SLD value.
  std::mt19937_64 rng(44);
  const Matrix g = oracle::random_hermitian(rng, 2);
  const Vector psi = oracle::random_state(rng, 2);
  const Vector dpsi = -kI * (g * psi);
  const double mean = psi.dot(g * psi).real();
  const double var = psi.dot(g * g * psi).real() - mean * mean;
  const double plus = 4.0 * (dpsi.squaredNorm() + std::norm(psi.dot(dpsi)));
  CHECK(qfi_pure(psi, dpsi) == doctest::Approx(4.0 * var).epsilon(1e-12));
  CHECK(qfi_mixed(projector(psi), drho_of(psi, dpsi)) == doctest::Approx(4.0 * var).epsilon(1e-10));
  CHECK(std::abs(plus - 4.0 * var) > 1e-3);
}

TEST_CASE("qfi_mixed: agrees with qfi_pure on the pseudo-Hermitian family") {
  const oracle::PseudoHermitian ph{0.5};
  for (double theta : {0.2, 0.785, 1.3}) {
    const Vector psi = ph.state(theta, 2.0), dpsi = ph.dstate(theta, 2.0);
    const double pure = qfi_pure(psi, dpsi);
    CHECK(std::abs(qfi_mixed(projector(psi), drho_of(psi, dpsi)) - pure) <= 1e-7 * std::max(1.0, pure));
  }
}

TEST_CASE("qfi_mixed: maximally mixed static state") {
  CHECK(qfi_mixed(identity(2) / 2.0, Matrix::Zero(2, 2)) == 0.0);
}

TEST_CASE("qfi_mixed: commuting family matches classical Fisher information") {
  const double theta = 0.5;
  Matrix rho = Matrix::Zero(2, 2), drho = Matrix::Zero(2, 2);
  rho(0, 0) = (1.0 + theta) / 2.0;
  rho(1, 1) = (1.0 - theta) / 2.0;
  drho(0, 0) = 0.5;
  drho(1, 1) = -0.5;
  CHECK(qfi_mixed(rho, drho) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(oracle::discrete_fi({0.75, 0.25}, {0.5, -0.5}) == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("qfi_mixed: invalid density matrices") {
  CHECK_THROWS_AS(qfi_mixed(identity(2), Matrix::Zero(2, 2)), Error);
  Matrix neg = Matrix::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  try {
    qfi_mixed(neg, Matrix::Zero(2, 2));
    FAIL("expected InvalidState");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidState);
  }
}

TEST_CASE("qfi_mixed = qfi_pure on random pure families") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    // psi(theta) = exp(-i theta G) psi0, dpsi = -i G psi.
    const int dim = trial % 2 == 0 ? 2 : 4;
    const Matrix g = oracle::random_hermitian(rng, dim);
    const Vector psi = oracle::random_state(rng, dim);
    const Vector dpsi = -kI * (g * psi);
    const double pure = qfi_pure(psi, dpsi);
    CHECK(std::abs(qfi_mixed(projector(psi), drho_of(psi, dpsi)) - pure) <= 1e-7 * std::max(1.0, pure));
  }
}

TEST_CASE("fisher_post examples") {
  CHECK(fisher_post(0.25, 0.0) == 0.0);
  CHECK(fisher_post(1.0, 0.0) == 0.0);
  CHECK(fisher_post(0.3, 0.2) == doctest::Approx(0.04 / 0.21));
  try {
    fisher_post(1.0, 0.5);
    FAIL("expected PostSelectionSingular");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PostSelectionSingular);
  }
}

TEST_CASE("fisher_post against the two-outcome oracle") {
  const oracle::PseudoHermitian ph{0.5};
  const double theta = 0.4, t = 2.0;
  const double p = ph.p_d(theta, t), dp = ph.dp_d(theta, t);
  CHECK(fisher_post(p, dp) == doctest::Approx(oracle::discrete_fi({p, 1.0 - p}, {dp, -dp})).epsilon(1e-12));

  // The pipeline's finite-difference F_post lands on the same number.
  const FisherBreakdown b = fisher_breakdown(pseudo_hermitian_model(0.5), theta, t);
  CHECK(b.f_post == doctest::Approx(oracle::discrete_fi({p, 1.0 - p}, {dp, -dp})).epsilon(1e-6));
}

TEST_CASE("fisher_breakdown: pseudo-Hermitian efficiency point") {
  const FisherBreakdown b = fisher_breakdown(pseudo_hermitian_model(0.5), std::numbers::pi / 4, 2.0);
  CHECK(b.q_r <= 1e-8);
  CHECK(std::abs(b.p_d * b.q_d - b.f_q_joint) / b.f_q_joint <= 1e-3);
  CHECK(b.f_post <= 1e-3 * b.f_q_joint);
  CHECK(b.p_d == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(b.f_q_joint == doctest::Approx(16.0).epsilon(1e-6));
  CHECK(check_hierarchy(b).pass());
}

TEST_CASE("fisher_breakdown: Hermitian limit") {
  for (double t : {1.0, 2.0}) {
    const FisherBreakdown b = fisher_breakdown(pseudo_hermitian_model(1.0), 0.7, t);
    CHECK(b.p_d == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(b.f_post == 0.0);
    CHECK(b.f_q_nh == doctest::Approx(4 * t * t).epsilon(1e-8));
    CHECK(b.f_q_joint == doctest::Approx(4 * t * t).epsilon(1e-8));
    CHECK(b.f_tot == doctest::Approx(4 * t * t).epsilon(1e-8));
    CHECK(b.rejected_degenerate);
    const HierarchyReport r = check_hierarchy(b);
    CHECK(r.pass());
  }
}

TEST_CASE("fisher_breakdown: EP gyroscope has strict gaps") {
  const FisherBreakdown b = fisher_breakdown(ep_gyro_model(1.0, 1.0), 1.5, 8.0);
  CHECK(check_hierarchy(b).pass());
  CHECK(b.p_d * b.q_d < b.f_tot * (1.0 - 1e-3));
  // The ancilla readout costs little here: about 4e-5 of the joint QFI.
  CHECK(b.f_tot < b.f_q_joint);
  // Detected QFI is the bare sensor QFI: the detected state is the normalized evolved state.
  CHECK(b.q_d == doctest::Approx(b.f_q_nh).epsilon(1e-5));
}

TEST_CASE("fisher_breakdown: additivity across models") {
  for (const auto& name : model_names()) {
    const HamiltonianModel m = make_model(name);
    const FisherBreakdown b = fisher_breakdown(m, 1.3, 2.5);
    const double parts = b.p_d * b.q_d + b.p_r() * b.q_r + b.f_post;
    CHECK(std::abs(b.f_tot - parts) <= 1e-8 * std::max(1.0, b.f_tot));
    CHECK(b.f_tot >= -1e-9);
    CHECK(b.p_d * b.f_q_nh <= b.f_q_joint * (1.0 + 1e-4) + 1e-8);
  }
}

TEST_CASE("check_hierarchy: corrupted q_d fails with a named inequality") {
  FisherBreakdown b = fisher_breakdown(make_model("ep_gyro"), 1.5, 8.0);
  b.q_d *= 2.0;
  const HierarchyReport r = check_hierarchy(b);
  CHECK_FALSE(r.pass());
  CHECK_FALSE(r.violations().empty());
  CHECK(names_violation(r, "additivity"));
}

TEST_CASE("check_hierarchy: f_tot above the joint QFI is caught") {
  FisherBreakdown b;
  b.f_q_joint = 10.0;
  b.p_d = 0.5;
  b.q_d = 30.0;
  b.q_r = 0.0;
  b.f_post = 0.0;
  b.f_tot = 15.0;
  b.f_q_nh = 30.0;
  const HierarchyReport r = check_hierarchy(b);
  CHECK_FALSE(r.pass());
  CHECK(r.violations().size() >= 1);
}
