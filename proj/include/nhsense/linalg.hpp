#ifndef NHSENSE_LINALG_HPP
#define NHSENSE_LINALG_HPP

// Dense complex linear algebra for the qubit (2x2) and qubit-ancilla (4x4)
// matrices used throughout the library. Everything is templated on the real
// scalar; storage is stack-allocated with a maximum dimension of 4.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "nhsense/error.hpp"

namespace nhsense {

template <typename Scalar>
using CMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic,
                              Eigen::ColMajor, 4, 4>;
template <typename Scalar>
using CVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1, Eigen::ColMajor, 4, 1>;
template <typename Scalar>
using RVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, Eigen::ColMajor, 4, 1>;

using Complex = std::complex<double>;
using Matrix = CMatrix<double>;
using Vector = CVector<double>;

inline constexpr Complex kI{0.0, 1.0};

namespace tol {
inline constexpr double kHermitian = 1e-10;
inline constexpr double kClamp = 1e-10;
/// Above this 1-norm of s*A the exponential is still computed but flagged.
inline constexpr double kExpRange = 50.0;
}  // namespace tol

// ---------------------------------------------------------------------------
// Constructors for the fixed operator basis.

template <typename Scalar = double>
CMatrix<Scalar> identity(Eigen::Index dim) {
  return CMatrix<Scalar>::Identity(dim, dim);
}

template <typename Scalar = double>
CMatrix<Scalar> pauli_x() {
  CMatrix<Scalar> m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

template <typename Scalar = double>
CMatrix<Scalar> pauli_y() {
  using C = std::complex<Scalar>;
  CMatrix<Scalar> m(2, 2);
  m << C(0), C(0, -1), C(0, 1), C(0);
  return m;
}

template <typename Scalar = double>
CMatrix<Scalar> pauli_z() {
  CMatrix<Scalar> m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

template <typename Scalar = double>
CVector<Scalar> basis_state(Eigen::Index dim, Eigen::Index index) {
  CVector<Scalar> v = CVector<Scalar>::Zero(dim);
  v(index) = 1;
  return v;
}

/// Kronecker product a (x) b; the second factor is the fast index.
template <typename DA, typename DB>
CMatrix<typename DA::RealScalar> kron(const Eigen::MatrixBase<DA>& a,
                                     const Eigen::MatrixBase<DB>& b) {
  CMatrix<typename DA::RealScalar> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

template <typename Derived>
typename Derived::RealScalar max_abs(const Eigen::MatrixBase<Derived>& a) {
  return a.size() == 0 ? typename Derived::RealScalar(0) : a.cwiseAbs().maxCoeff();
}

/// max_ij |A - A^dagger|_ij
template <typename Derived>
typename Derived::RealScalar hermiticity_residual(const Eigen::MatrixBase<Derived>& a) {
  return max_abs(a - a.adjoint());
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& a) {
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
  return true;
}

template <typename Derived>
typename Derived::RealScalar norm_1(const Eigen::MatrixBase<Derived>& a) {
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

// ---------------------------------------------------------------------------
// Matrix exponential.

template <typename Scalar>
struct ExpResult {
  CMatrix<Scalar> value;
  /// ||s A||_1 exceeded tol::kExpRange; accuracy is no longer guaranteed.
  bool overflow_risk = false;
};

namespace detail {

// exp(B) for traceless 2x2 B via B^2 = q^2 I.
template <typename MatrixType>
MatrixType exp_2x2(const MatrixType& a) {
  using Scalar = typename MatrixType::RealScalar;
  using C = std::complex<Scalar>;
  const C half_trace = (a(0, 0) + a(1, 1)) / Scalar(2);
  MatrixType b = a;
  b(0, 0) -= half_trace;
  b(1, 1) -= half_trace;
  const C q = std::sqrt(b(0, 0) * b(0, 0) + b(0, 1) * b(1, 0));
  C sinhc;
  if (std::abs(q) < Scalar(1e-4)) {
    const C q2 = q * q;
    sinhc = Scalar(1) + q2 / Scalar(6) + q2 * q2 / Scalar(120);
  } else {
    sinhc = std::sinh(q) / q;
  }
  MatrixType out = sinhc * b;
  out(0, 0) += std::cosh(q);
  out(1, 1) += std::cosh(q);
  return std::exp(half_trace) * out;
}

// Scaling and squaring with the degree-adaptive Pade table of Higham (2005).
template <typename Scalar>
CMatrix<Scalar> exp_pade(const CMatrix<Scalar>& a) {
  const Eigen::Index n = a.rows();
  const CMatrix<Scalar> id = CMatrix<Scalar>::Identity(n, n);
  const Scalar norm = norm_1(a);

  static constexpr std::array<double, 4> kTheta = {1.495585217958292e-2, 2.539398330063230e-1,
                                                   9.504178996162932e-1, 2.097847961257068e0};
  static constexpr std::array<std::array<double, 10>, 4> kLow = {{
      {120, 60, 12, 1},
      {30240, 15120, 3360, 420, 30, 1},
      {17297280, 8648640, 1995840, 277200, 25200, 1512, 56, 1},
      {17643225600., 8821612800., 2075673600., 302702400., 30270240., 2162160., 110880., 3960.,
       90., 1.},
  }};
  static constexpr std::array<int, 4> kDegree = {3, 5, 7, 9};

  auto solve = [&](const CMatrix<Scalar>& u, const CMatrix<Scalar>& v) -> CMatrix<Scalar> {
    return (v - u).partialPivLu().solve(v + u);
  };

  for (std::size_t k = 0; k < kTheta.size(); ++k) {
    if (norm > Scalar(kTheta[k])) continue;
    const auto& b = kLow[k];
    const CMatrix<Scalar> a2 = a * a;
    CMatrix<Scalar> power = id;
    CMatrix<Scalar> u_even = Scalar(b[1]) * id;
    CMatrix<Scalar> v = Scalar(b[0]) * id;
    for (int j = 2; j < kDegree[k]; j += 2) {
      power = power * a2;
      u_even += Scalar(b[j + 1]) * power;
      v += Scalar(b[j]) * power;
    }
    return solve(a * u_even, v);
  }

  static constexpr std::array<double, 14> b = {
      64764752532480000., 32382376266240000., 7771770303897600., 1187353796428800.,
      129060195264000.,   10559470521600.,    670442572800.,     33522128640.,
      1323241920.,        40840800.,          960960.,           16380.,
      182.,               1.};
  constexpr double kTheta13 = 5.371920351148152e0;
  int squarings = 0;
  if (norm > Scalar(kTheta13))
    squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / Scalar(kTheta13)))));
  const CMatrix<Scalar> as = a / std::ldexp(Scalar(1), squarings);
  const CMatrix<Scalar> a2 = as * as;
  const CMatrix<Scalar> a4 = a2 * a2;
  const CMatrix<Scalar> a6 = a4 * a2;
  auto c = [&](int i) { return Scalar(b[static_cast<std::size_t>(i)]); };
  const CMatrix<Scalar> u =
      as * (a6 * (c(13) * a6 + c(11) * a4 + c(9) * a2) + c(7) * a6 + c(5) * a4 + c(3) * a2 +
            c(1) * id);
  const CMatrix<Scalar> v =
      a6 * (c(12) * a6 + c(10) * a4 + c(8) * a2) + c(6) * a6 + c(4) * a4 + c(2) * a2 + c(0) * id;
  CMatrix<Scalar> r = solve(u, v);
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

}  // namespace detail

/// exp(s A). 2x2 inputs use the exact closed form through the traceless part;
/// larger matrices use Pade scaling and squaring.
template <typename Derived>
ExpResult<typename Derived::RealScalar> mat_exp_checked(const Eigen::MatrixBase<Derived>& a,
                                                        typename Derived::Scalar s) {
  using Scalar = typename Derived::RealScalar;
  if (a.rows() != a.cols() || a.rows() == 0)
    throw Error(ErrorKind::InvalidInput, "mat_exp: matrix must be square and non-empty");
  if (!all_finite(a) || !std::isfinite(s.real()) || !std::isfinite(s.imag()))
    throw Error(ErrorKind::InvalidInput, "mat_exp: non-finite entries");
  const CMatrix<Scalar> scaled = s * a;
  ExpResult<Scalar> result;
  result.overflow_risk = norm_1(scaled) > Scalar(tol::kExpRange);
  result.value = scaled.rows() == 2 ? detail::exp_2x2(scaled)
                                    : detail::exp_pade<Scalar>(scaled);
  return result;
}

template <typename Derived>
CMatrix<typename Derived::RealScalar> mat_exp(const Eigen::MatrixBase<Derived>& a,
                                              typename Derived::Scalar s) {
  return mat_exp_checked(a, s).value;
}

// ---------------------------------------------------------------------------
// Hermitian spectral tools.

template <typename Scalar>
struct EigenDecomposition {
  RVector<Scalar> values;   ///< ascending
  CMatrix<Scalar> vectors;  ///< columns are the orthonormal eigenvectors
};

/// Hermiticity is judged relative to the matrix scale: |A - A^dagger| <= tol * max(1, max|A|).
template <typename Derived>
void require_hermitian(const Eigen::MatrixBase<Derived>& h, typename Derived::RealScalar tol,
                       const char* who) {
  using Scalar = typename Derived::RealScalar;
  if (h.rows() != h.cols())
    throw Error(ErrorKind::InvalidInput, std::string(who) + ": matrix must be square");
  const Scalar residual = hermiticity_residual(h);
  if (!(residual <= tol * std::max(Scalar(1), max_abs(h))))
    throw Error(ErrorKind::NotHermitian,
                std::string(who) + ": residual " + std::to_string(residual));
}

template <typename Derived>
EigenDecomposition<typename Derived::RealScalar> eig_herm(
    const Eigen::MatrixBase<Derived>& h,
    typename Derived::RealScalar tol = typename Derived::RealScalar(tol::kHermitian)) {
  using Scalar = typename Derived::RealScalar;
  require_hermitian(h, tol, "eig_herm");
  const CMatrix<Scalar> sym = (h + h.adjoint()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<CMatrix<Scalar>> solver(sym);
  return {solver.eigenvalues(), solver.eigenvectors()};
}

template <typename Derived>
typename Derived::RealScalar min_eigenvalue(
    const Eigen::MatrixBase<Derived>& h,
    typename Derived::RealScalar tol = typename Derived::RealScalar(tol::kHermitian)) {
  return eig_herm(h, tol).values(0);
}

/// Principal square root of a positive semidefinite Hermitian matrix.
/// Eigenvalues in [-clamp * max(1, max|P|), 0) are treated as rounding and set to zero.
template <typename Derived>
CMatrix<typename Derived::RealScalar> herm_sqrt(
    const Eigen::MatrixBase<Derived>& p,
    typename Derived::RealScalar clamp = typename Derived::RealScalar(tol::kClamp)) {
  using Scalar = typename Derived::RealScalar;
  auto eig = eig_herm(p);
  const Scalar floor = -clamp * std::max(Scalar(1), max_abs(p));
  if (eig.values(0) < floor)
    throw Error(ErrorKind::NotPositive,
                "herm_sqrt: eigenvalue " + std::to_string(eig.values(0)));
  RVector<Scalar> roots = eig.values.cwiseMax(Scalar(0)).cwiseSqrt();
  return eig.vectors * roots.asDiagonal() * eig.vectors.adjoint();
}

/// min eigenvalue >= -tol. Non-Hermitian input is symmetrized first and
/// `symmetrized` (if given) is set.
template <typename Derived>
bool is_psd(const Eigen::MatrixBase<Derived>& p, typename Derived::RealScalar tol,
            bool* symmetrized = nullptr) {
  using Scalar = typename Derived::RealScalar;
  const bool asymmetric = hermiticity_residual(p) > tol;
  if (symmetrized) *symmetrized = asymmetric;
  const CMatrix<Scalar> sym = (p + p.adjoint()) / Scalar(2);
  return min_eigenvalue(sym) >= -tol;
}

/// Eigenvalues of a general 2x2 complex matrix, ordered by real part.
template <typename Derived>
std::array<std::complex<typename Derived::RealScalar>, 2> eigenvalues_2x2(
    const Eigen::MatrixBase<Derived>& a) {
  using C = std::complex<typename Derived::RealScalar>;
  if (a.rows() != 2 || a.cols() != 2)
    throw Error(ErrorKind::InvalidInput, "eigenvalues_2x2: matrix must be 2x2");
  const C mean = (a(0, 0) + a(1, 1)) / typename Derived::RealScalar(2);
  const C half_diff = (a(0, 0) - a(1, 1)) / typename Derived::RealScalar(2);
  const C root = std::sqrt(half_diff * half_diff + a(0, 1) * a(1, 0));
  C lo = mean - root;
  C hi = mean + root;
  if (hi.real() < lo.real()) std::swap(lo, hi);
  return {lo, hi};
}

}  // namespace nhsense

#endif  // NHSENSE_LINALG_HPP
