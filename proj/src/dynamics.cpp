#include "nhsense/dynamics.hpp"

#include <cmath>

namespace nhsense {

StateVector make_state(const Vector& amplitudes) {
  return {amplitudes, std::abs(amplitudes.norm() - 1.0) <= 1e-10};
}

StateVector evolve(const Matrix& h, const StateVector& psi0, double t) {
  if (!(t >= 0.0)) throw Error(ErrorKind::InvalidInput, "evolve: t must be >= 0");
  if (h.rows() != psi0.dim())
    throw Error(ErrorKind::InvalidInput, "evolve: dimension mismatch");
  if (t == 0.0) return psi0;
  return {mat_exp(h, Complex(0.0, -t)) * psi0.amplitudes, false};
}

StateVector evolve(const HamiltonianModel& model, double theta, const StateVector& psi0,
                   double t) {
  if (!model.time_independent)
    throw Error(ErrorKind::InvalidInput,
                "evolve: " + model.name + " is time-dependent; use time_ordered_propagator");
  return evolve(model.hamiltonian(theta), psi0, t);
}

int steps_for(double t, int steps_per_unit_time) {
  return std::max(1, static_cast<int>(std::ceil(std::abs(t) * steps_per_unit_time - 1e-9)));
}

Propagator time_ordered_propagator(const TimeGenerator& h, double t_end, int steps,
                                   Ordering ordering, Complex coefficient, double t_start) {
  if (steps <= 0) throw Error(ErrorKind::InvalidInput, "time_ordered_propagator: steps <= 0");
  const double dt = (t_end - t_start) / steps;
  Matrix u = identity(h(t_start).rows());
  for (int k = 0; k < steps; ++k) {
    const Matrix slice = mat_exp(h(t_start + (k + 0.5) * dt), coefficient * dt);
    u = ordering == Ordering::forward ? Matrix(slice * u) : Matrix(u * slice);
  }
  return {u, ordering, t_start, t_end, steps};
}

Normalized normalize(const StateVector& psi) {
  const double n = psi.norm();
  if (!(n > 1e-300)) throw Error(ErrorKind::DegenerateState, "normalize: zero vector");
  return {{psi.amplitudes / n, true}, n};
}

Vector param_derivative(const StateFamily& state_fn, double theta, double h) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidInput, "param_derivative: h must be > 0");
  return (state_fn(theta + h) - state_fn(theta - h)) / (2.0 * h);
}

}  // namespace nhsense
