#ifndef NHSENSE_TESTS_ORACLES_HPP
#define NHSENSE_TESTS_ORACLES_HPP

// Independent reference computations for the tests. None of these call into
// the library's exponential, propagator or Fisher code.

#include <cmath>
#include <complex>
#include <functional>
#include <random>

#include <Eigen/Dense>

namespace oracle {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline const Complex I{0.0, 1.0};

// Truncated Taylor series on A / 2^squarings, then repeated squaring.
inline Mat taylor_exp(const Mat& a, int order = 12, int squarings = 6) {
  const Mat x = a / std::ldexp(1.0, squarings);
  Mat term = Mat::Identity(a.rows(), a.cols());
  Mat sum = term;
  for (int k = 1; k <= order; ++k) {
    term = term * x / double(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

// Classical RK4 on i d/dt psi = H(t) psi.
inline Vec rk4(const std::function<Mat(double)>& h, const Vec& psi0, double t, int steps) {
  const double dt = t / steps;
  Vec psi = psi0;
  auto f = [&](double s, const Vec& y) -> Vec { return -I * (h(s) * y); };
  for (int k = 0; k < steps; ++k) {
    const double s = k * dt;
    const Vec k1 = f(s, psi);
    const Vec k2 = f(s + dt / 2, psi + dt / 2 * k1);
    const Vec k3 = f(s + dt / 2, psi + dt / 2 * k2);
    const Vec k4 = f(s + dt, psi + dt * k3);
    psi += dt / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return psi;
}

inline Vec rk4(const Mat& h, const Vec& psi0, double t, int steps) {
  return rk4([&h](double) { return h; }, psi0, t, steps);
}

// Observed convergence order from errors at step sizes h and h / ratio.
inline double observed_order(double coarse_error, double fine_error, double ratio = 2.0) {
  return std::log(coarse_error / fine_error) / std::log(ratio);
}

// Richardson extrapolation of an order-p quantity sampled at h and h/2.
inline double richardson(double coarse, double fine, int p) {
  const double f = std::ldexp(1.0, p);
  return (f * fine - coarse) / (f - 1.0);
}

// Fisher information of a discrete distribution, sum_i (dP_i)^2 / P_i.
inline double discrete_fi(const std::vector<double>& p, const std::vector<double>& dp) {
  double f = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) f += dp[i] * dp[i] / p[i];
  return f;
}

// Pseudo-Hermitian sensor in closed form: psi = (cos x, -i l sin x) / C, x = theta t.
struct PseudoHermitian {
  double lambda;

  double c2(double theta, double t) const {
    const double c = std::cos(theta * t), s = std::sin(theta * t);
    return c * c + lambda * lambda * s * s;
  }
  Vec state(double theta, double t) const {
    Vec v(2);
    v << std::cos(theta * t), -I * lambda * std::sin(theta * t);
    return v / std::sqrt(c2(theta, t));
  }
  // d/dtheta of the normalized state, differentiated by hand.
  Vec dstate(double theta, double t) const {
    const double c = std::cos(theta * t), s = std::sin(theta * t);
    const double n2 = c2(theta, t), n = std::sqrt(n2);
    const double dn2 = 2.0 * t * (lambda * lambda - 1.0) * s * c;
    const double dn = dn2 / (2.0 * n);
    Vec raw(2), draw(2);
    raw << c, -I * lambda * s;
    draw << -t * s, -I * lambda * t * c;
    return draw / n - raw * dn / n2;
  }
  double qfi(double theta, double t) const {
    const double n2 = c2(theta, t);
    return 4.0 * lambda * lambda * t * t / (n2 * n2);
  }
  double p_d(double theta, double t) const { return c2(theta, t); }
  double dp_d(double theta, double t) const {
    const double c = std::cos(theta * t), s = std::sin(theta * t);
    return 2.0 * t * (lambda * lambda - 1.0) * s * c;
  }
};

inline Mat random_matrix(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  return a;
}

inline Mat random_unitary(std::mt19937_64& rng, int n) {
  Eigen::HouseholderQR<Mat> qr(random_matrix(rng, n));
  return qr.householderQ() * Mat::Identity(n, n);
}

inline Mat random_hermitian(std::mt19937_64& rng, int n, double scale = 1.0) {
  const Mat a = random_matrix(rng, n, scale);
  return (a + a.adjoint()) / 2.0;
}

inline Vec random_state(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = Complex(g(rng), g(rng));
  return v.normalized();
}

}  // namespace oracle

#endif  // NHSENSE_TESTS_ORACLES_HPP
