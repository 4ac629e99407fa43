#include <doctest.h>

#include <cmath>
#include <random>

#include "nhsense/linalg.hpp"
#include "nhsense/models.hpp"
#include "nhsense/dilation.hpp"
#include "oracles.hpp"

using namespace nhsense;

namespace {

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST_CASE("mat_exp of zero is the identity") {
  CHECK(max_abs(Matrix(mat_exp(Matrix::Zero(2, 2), Complex(3.0, -1.0)) - identity(2))) == 0.0);
  CHECK(max_abs(Matrix(mat_exp(Matrix::Zero(4, 4), Complex(0.0, 7.0)) - identity(4))) < 1e-15);
}

TEST_CASE("mat_exp reproduces the pseudo-Hermitian propagator") {
  const Matrix h = pseudo_hermitian_model(0.5).hamiltonian(1.0);
  const Matrix u = mat_exp(h, Complex(0.0, -2.0));
  Matrix expected(2, 2);
  expected << std::cos(2.0), Complex(0, -2.0 * std::sin(2.0)), Complex(0, -0.5 * std::sin(2.0)),
      std::cos(2.0);
  CHECK(max_abs(Matrix(u - expected)) < 1e-14);
}

TEST_CASE("mat_exp on non-normal 4x4 against the Taylor oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const oracle::Mat a = oracle::random_matrix(rng, 4);
    const Complex s(0.0, -0.7);
    const oracle::Mat ref = oracle::taylor_exp(s * a);
    const Matrix got = mat_exp(Matrix(a), s);
    CHECK((oracle::Mat(got) - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("mat_exp on general 2x2 against the Taylor oracle") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const oracle::Mat a = oracle::random_matrix(rng, 2, 2.0);
    const oracle::Mat ref = oracle::taylor_exp(a, 20, 8);
    const Matrix got = mat_exp(Matrix(a), Complex(1.0));
    CHECK((oracle::Mat(got) - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("mat_exp near a 2x2 exceptional point") {
  // Nilpotent traceless part: exp(s N) = I + s N exactly.
  Matrix n(2, 2);
  n << Complex(0, 1), 1.0, 1.0, Complex(0, -1);
  const Matrix got = mat_exp(n, Complex(0.0, -3.0));
  const Matrix expected = identity(2) + Complex(0.0, -3.0) * n;
  CHECK(max_abs(Matrix(got - expected)) < 1e-12);
}

TEST_CASE("exp(A) exp(-A) = I") {
  std::mt19937_64 rng(13);
  for (int dim : {2, 4}) {
    for (int trial = 0; trial < 20; ++trial) {
      oracle::Mat a = oracle::random_matrix(rng, dim);
      a *= 10.0 / a.operatorNorm();
      const Matrix p = mat_exp(Matrix(a), Complex(1.0));
      const Matrix m = mat_exp(Matrix(a), Complex(-1.0));
      const double scale = std::max(1.0, max_abs(p) * max_abs(m));
      CHECK(max_abs(Matrix(p * m - identity(dim))) / scale < 1e-9);
    }
  }
}

TEST_CASE("unitary exponential of a Hermitian generator") {
  std::mt19937_64 rng(14);
  for (int dim : {2, 4}) {
    for (int trial = 0; trial < 20; ++trial) {
      const Matrix h = oracle::random_hermitian(rng, dim, 2.0);
      const Matrix u = mat_exp(h, Complex(0.0, -1.3));
      CHECK(max_abs(Matrix(u.adjoint() * u - identity(dim))) < 1e-10);
    }
  }
}

TEST_CASE("mat_exp input checks") {
  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 1) = std::nan("");
  CHECK_THROWS_AS(mat_exp(bad, Complex(1.0)), Error);
  Matrix big = 40.0 * pauli_x();
  CHECK(mat_exp_checked(big, Complex(0.0, -2.0)).overflow_risk);
  CHECK_FALSE(mat_exp_checked(big, Complex(0.0, -0.1)).overflow_risk);
}

TEST_CASE("herm_sqrt examples") {
  CHECK(max_abs(Matrix(herm_sqrt(diag2(1.0, 4.0)) - diag2(1.0, 2.0))) < 1e-14);

  const double lambda = 0.5;
  const Matrix p = diag2(0.0, 1.0 / (lambda * lambda) - 1.0);
  CHECK(max_abs(Matrix(herm_sqrt(p) - diag2(0.0, std::sqrt(3.0)))) < 1e-14);

  std::mt19937_64 rng(15);
  const Matrix v = oracle::random_unitary(rng, 2);
  const Matrix q = v * diag2(0.25, 2.25) * v.adjoint();
  const Matrix s = herm_sqrt(q);
  CHECK(max_abs(Matrix(s * s - q)) < 1e-9);
  CHECK(max_abs(Matrix(s - v * diag2(0.5, 1.5) * v.adjoint())) < 1e-12);
  CHECK(hermiticity_residual(s) < 1e-14);
}

TEST_CASE("herm_sqrt on random PSD matrices") {
  std::mt19937_64 rng(16);
  for (int dim : {2, 4}) {
    for (int trial = 0; trial < 20; ++trial) {
      const Matrix a = oracle::random_matrix(rng, dim);
      const Matrix p = a * a.adjoint();
      const Matrix s = herm_sqrt(p);
      CHECK(max_abs(Matrix(s * s - p)) < 1e-9);
      CHECK(min_eigenvalue(s) >= -1e-12);
    }
  }
}

TEST_CASE("herm_sqrt clamps rounding and rejects real negatives") {
  CHECK(max_abs(herm_sqrt(diag2(-1e-12, 1.0))) == doctest::Approx(1.0));
  CHECK_THROWS_AS(herm_sqrt(diag2(-0.01, 1.0)), Error);
  try {
    herm_sqrt(diag2(-0.01, 1.0));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotPositive);
  }
}

TEST_CASE("eig_herm of sigma_z") {
  const auto e = eig_herm(pauli_z());
  CHECK(e.values(0) == doctest::Approx(-1.0));
  CHECK(e.values(1) == doctest::Approx(1.0));
  CHECK(std::abs(e.vectors(1, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(e.vectors(0, 1)) == doctest::Approx(1.0));
}

TEST_CASE("eig_herm of sigma_x (x) sigma_x") {
  const Matrix h = kron(pauli_x(), pauli_x());
  const auto e = eig_herm(h);
  CHECK(e.values(0) == doctest::Approx(-1.0));
  CHECK(e.values(1) == doctest::Approx(-1.0));
  CHECK(e.values(2) == doctest::Approx(1.0));
  CHECK(e.values(3) == doctest::Approx(1.0));
  const Matrix rebuilt = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
  CHECK(max_abs(Matrix(rebuilt - h)) < 1e-10);
  // Each eigenvector lives in a Bell pair: support on {00, 11} or on {01, 10}.
  for (int k = 0; k < 4; ++k) {
    const Vector v = e.vectors.col(k);
    const double even = std::norm(v(0)) + std::norm(v(3));
    const double odd = std::norm(v(1)) + std::norm(v(2));
    CHECK(std::min(even, odd) < 1e-12);
    CHECK(std::abs(std::abs(v(0)) - std::abs(v(3))) < 1e-12);
  }
}

TEST_CASE("eig_herm invariants on random Hermitian matrices") {
  std::mt19937_64 rng(17);
  for (int dim : {2, 4}) {
    for (int trial = 0; trial < 20; ++trial) {
      const Matrix h = oracle::random_hermitian(rng, dim, 3.0);
      const auto e = eig_herm(h);
      for (int i = 1; i < dim; ++i) CHECK(e.values(i) >= e.values(i - 1));
      CHECK(max_abs(Matrix(e.vectors.adjoint() * e.vectors - identity(dim))) < 1e-12);
      for (int i = 0; i < dim; ++i)
        CHECK(max_abs(Vector(h * e.vectors.col(i) - e.values(i) * e.vectors.col(i))) < 1e-10);
      const Matrix rebuilt = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
      CHECK(max_abs(Matrix(rebuilt - h)) < 1e-10);
    }
  }
}

TEST_CASE("eig_herm rejects non-Hermitian input") {
  Matrix a = pauli_x();
  a(0, 1) = 2.0;
  try {
    eig_herm(a);
    FAIL("expected NotHermitian");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotHermitian);
  }
}

TEST_CASE("eig_herm on the broken-phase PT metric") {
  const HamiltonianModel pt = make_model("pt_symmetric");
  const TimeGenerator h = [&pt](double t) { return pt.hamiltonian(0.5, t); };
  const Matrix eta = eta_of_t(h, identity(2), 8.0, 16000);
  const auto e = eig_herm(eta, 1e-8);
  CHECK(e.values(1) > 1e3);
  CHECK(e.values(0) < 1e-3);
}

TEST_CASE("min_eigenvalue examples") {
  CHECK(min_eigenvalue(diag2(1.0, 4.0)) == doctest::Approx(1.0));
  CHECK(min_eigenvalue(identity(2)) == doctest::Approx(1.0));
  CHECK(min_eigenvalue(identity(4)) == doctest::Approx(1.0));
}

TEST_CASE("min_eigenvalue of the broken-phase metric drops below one") {
  const HamiltonianModel pt = make_model("pt_symmetric");
  const TimeGenerator h = [&pt](double t) { return pt.hamiltonian(0.5, t); };
  // Grid scan against a direct M^dagger M evaluation at each sample.
  for (int k = 1; k <= 40; ++k) {
    const double t = 0.1 * k;
    const oracle::Mat m = oracle::taylor_exp(oracle::I * t * oracle::Mat(pt.hamiltonian(0.5)), 20, 8);
    const oracle::Mat eta = m.adjoint() * m;
    const double lo = Eigen::SelfAdjointEigenSolver<oracle::Mat>(eta).eigenvalues()(0);
    CHECK(lo < 1.0);
    CHECK(min_eigenvalue(eta_of_t(h, identity(2), t, steps_for(t, 2000)), 1e-8) ==
          doctest::Approx(lo).epsilon(1e-5));
  }
}

TEST_CASE("is_psd examples") {
  CHECK(is_psd(diag2(0.0, 3.0), 1e-10));
  CHECK_FALSE(is_psd(diag2(-0.01, 1.0), 1e-10));
  bool symmetrized = false;
  Matrix a = diag2(1.0, 1.0);
  a(0, 1) = 0.1;
  CHECK(is_psd(a, 1e-10, &symmetrized));
  CHECK(symmetrized);
}

TEST_CASE("rescaled metric keeps eta - I positive") {
  const HamiltonianModel ep = make_model("ep_gyro");
  const TimeGenerator h = [&ep](double t) { return ep.hamiltonian(1.5, t); };
  const RescaleResult r = rescale_eta0(identity(2), h, 4.0);
  for (int k = 0; k <= 80; ++k) {
    const double t = 0.05 * k;
    const Matrix eta = eta_of_t(h, r.eta0, t, steps_for(t, 2000) + 1);
    CHECK(is_psd(Matrix(eta - identity(2)), 1e-9));
  }
}
