#include "nhsense/models.hpp"

#include <cmath>
#include <numbers>

namespace nhsense {

double HamiltonianModel::param(const std::string& key) const {
  auto it = params.find(key);
  if (it == params.end()) throw Error(ErrorKind::InvalidParam, name + ": no parameter " + key);
  return it->second;
}

HamiltonianModel pseudo_hermitian_model(double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw Error(ErrorKind::InvalidParam, "pseudo_hermitian: lambda must lie in (0, 1]");

  HamiltonianModel m;
  m.name = "pseudo_hermitian";
  m.params = {{"lambda", lambda}};
  m.generator = [lambda](double theta, double) {
    Matrix h(2, 2);
    h << 0.0, theta / lambda, theta * lambda, 0.0;
    return h;
  };
  Matrix zeta = Matrix::Zero(2, 2);
  zeta(0, 0) = 1.0;
  zeta(1, 1) = 1.0 / (lambda * lambda);
  m.zeta = zeta;

  auto c2 = [lambda](double theta, double t) {
    const double c = std::cos(theta * t), s = std::sin(theta * t);
    return c * c + lambda * lambda * s * s;
  };
  m.analytic.state = [lambda](double theta, double t) {
    Vector v(2);
    v << std::cos(theta * t), -kI * lambda * std::sin(theta * t);
    return v;
  };
  m.analytic.qfi = [lambda, c2](double theta, double t) {
    const double c_sq = c2(theta, t);
    return 4.0 * lambda * lambda * t * t / (c_sq * c_sq);
  };
  m.analytic.p_d = c2;
  m.analytic.printed_p_d = [lambda](double theta, double t) {
    const double s = std::sin(theta * t);
    return 1.0 / ((1.0 - lambda * lambda) * s * s + 1.0);
  };
  m.analytic.printed["C"] = "[cos^2(theta t) + lambda^2 sin^2(theta t)]^(1/2)";
  m.analytic.printed["P_d"] = "[(1 - lambda^2) sin^2(theta t) + 1]^(-1)";

  m.energy_gap = [](double theta) { return Complex(2.0 * theta); };
  return m;
}

HamiltonianModel ep_gyro_model(double omega_ep, double omega_ccw) {
  if (!(omega_ep > 0.0)) throw Error(ErrorKind::InvalidParam, "ep_gyro: omega_ep must be > 0");

  HamiltonianModel m;
  m.name = "ep_gyro";
  m.params = {{"omega_ep", omega_ep}, {"omega_ccw", omega_ccw}};
  m.generator = [omega_ep, omega_ccw](double theta, double) {
    Matrix h(2, 2);
    h << theta + omega_ccw, kI * omega_ep / 2.0, kI * omega_ep / 2.0, omega_ccw;
    return h;
  };
  m.energy_gap = [omega_ep](double theta) {
    return std::sqrt(Complex(theta * theta - omega_ep * omega_ep));
  };
  // (dE cos(dE t/2) - i theta sin(dE t/2)) |0> + omega_ep sin(dE t/2) |1>
  m.analytic.state = [omega_ep, gap = m.energy_gap](double theta, double t) {
    const Complex de = gap(theta);
    const Complex s = std::sin(de * t / 2.0), c = std::cos(de * t / 2.0);
    Vector v(2);
    v << de * c - kI * theta * s, omega_ep * s;
    return v;
  };
  m.analytic.printed["C1"] = "(theta^2 - cos(dE t))^(1/2)";
  m.exceptional_points = {-omega_ep, omega_ep};
  return m;
}

HamiltonianModel pt_symmetric_model(double r, double phi) {
  if (!(r > 0.0)) throw Error(ErrorKind::InvalidParam, "pt_symmetric: r must be > 0");

  HamiltonianModel m;
  m.name = "pt_symmetric";
  m.params = {{"r", r}, {"phi", phi}};
  m.generator = [r, phi](double theta, double) {
    Matrix h(2, 2);
    h << r * std::exp(kI * phi), theta, theta, r * std::exp(-kI * phi);
    return h;
  };
  const double gain = r * std::sin(phi);
  m.energy_gap = [gain](double theta) {
    return 2.0 * std::sqrt(Complex(theta * theta - gain * gain));
  };
  // w = sqrt(theta^2 - r^2 sin^2 phi):
  // (w cos(w t) + r sin(phi) sin(w t)) |0> - i theta sin(w t) |1>
  m.analytic.state = [gain](double theta, double t) {
    const Complex w = std::sqrt(Complex(theta * theta - gain * gain));
    Vector v(2);
    v << w * std::cos(w * t) + gain * std::sin(w * t), -kI * theta * std::sin(w * t);
    return v;
  };
  m.analytic.printed["state"] =
      "[(dE/2 cos(dE t/2) - (sqrt2/2) r sin(dE t/2)) |0> - i sin(dE t/2) |1>] / C2, "
      "dE = (theta^2 - r^2/2)^(1/2)";
  m.exceptional_points = {-std::abs(gain), std::abs(gain)};
  return m;
}

HamiltonianModel loss_loss_model(double v, double g, double k_h, double k_v) {
  if (k_h < 0.0 || k_v < 0.0)
    throw Error(ErrorKind::InvalidParam, "loss_loss: loss rates must be >= 0");

  HamiltonianModel m;
  m.name = "loss_loss";
  const double k = (k_h + k_v) / 2.0;
  const double dk = (k_v - k_h) / 2.0;
  m.params = {{"v", v}, {"g", g}, {"k_h", k_h}, {"k_v", k_v}, {"k", k}, {"delta_k", dk}};
  m.generator = [v, g, k_h, k_v](double theta, double) {
    Matrix h(2, 2);
    h << v - kI * k_h, kI * g * theta, -kI * g * theta, v - kI * k_v;
    return h;
  };
  m.energy_gap = [g, dk](double theta) {
    return 2.0 * std::sqrt(Complex(g * g * theta * theta - dk * dk));
  };
  // a = sqrt(g^2 theta^2 - dk^2): (a cos(a t) + dk sin(a t)) |0> - g theta sin(a t) |1>
  m.analytic.state = [g, dk](double theta, double t) {
    const Complex a = std::sqrt(Complex(g * g * theta * theta - dk * dk));
    Vector out(2);
    out << a * std::cos(a * t) + dk * std::sin(a * t), -g * theta * std::sin(a * t);
    return out;
  };
  m.analytic.printed["C_GL"] = "theta^2 - dk^2 cos(2 a t) - a dk sin(2 a t)";
  if (g != 0.0) m.exceptional_points = {-std::abs(dk / g), std::abs(dk / g)};
  return m;
}

HamiltonianModel gain_loss_partner(const HamiltonianModel& loss_loss) {
  if (loss_loss.name != "loss_loss")
    throw Error(ErrorKind::InvalidParam, "gain_loss_partner: expected a loss_loss model");
  HamiltonianModel m = loss_loss;
  m.name = "gain_loss";
  const double k = loss_loss.param("k");
  m.generator = [k, base = loss_loss.generator](double theta, double t) {
    Matrix h = base(theta, t);
    h.diagonal().array() += kI * k;
    return h;
  };
  return m;
}

ParamMap default_params(std::string_view name) {
  if (name == "pseudo_hermitian") return {{"lambda", 0.5}};
  if (name == "ep_gyro") return {{"omega_ep", 1.0}, {"omega_ccw", 1.0}};
  if (name == "pt_symmetric") return {{"r", std::numbers::sqrt2}, {"phi", std::numbers::pi / 4}};
  if (name == "loss_loss") return {{"v", 1.0}, {"g", 1.0}, {"k_h", 0.0}, {"k_v", 2.0}};
  throw Error(ErrorKind::InvalidParam, "unknown model '" + std::string(name) + "'");
}

const std::vector<std::string>& model_names() {
  static const std::vector<std::string> names = {"pseudo_hermitian", "ep_gyro", "pt_symmetric",
                                                 "loss_loss"};
  return names;
}

HamiltonianModel make_model(std::string_view name, const ParamMap& overrides) {
  ParamMap p = default_params(name);
  for (const auto& [key, value] : overrides) {
    if (!p.count(key))
      throw Error(ErrorKind::InvalidParam,
                  "model '" + std::string(name) + "' has no parameter '" + key + "'");
    p[key] = value;
  }
  if (name == "pseudo_hermitian") return pseudo_hermitian_model(p["lambda"]);
  if (name == "ep_gyro") return ep_gyro_model(p["omega_ep"], p["omega_ccw"]);
  if (name == "pt_symmetric") return pt_symmetric_model(p["r"], p["phi"]);
  return loss_loss_model(p["v"], p["g"], p["k_h"], p["k_v"]);
}

}  // namespace nhsense
