#ifndef NHSENSE_DYNAMICS_HPP
#define NHSENSE_DYNAMICS_HPP

#include <functional>

#include "nhsense/linalg.hpp"
#include "nhsense/models.hpp"

namespace nhsense {

/// Time-dependent generator at a fixed parameter value.
using TimeGenerator = std::function<Matrix(double t)>;

struct StateVector {
  Vector amplitudes;
  bool normalized = false;

  Eigen::Index dim() const { return amplitudes.size(); }
  double norm() const { return amplitudes.norm(); }
};

StateVector make_state(const Vector& amplitudes);

enum class Ordering {
  forward,  ///< later times act on the left
  reverse,  ///< later times act on the right
};

struct Propagator {
  Matrix matrix;
  Ordering ordering = Ordering::forward;
  double t_start = 0.0;
  double t_end = 0.0;
  int steps = 0;
};

inline constexpr int kDefaultStepsPerUnitTime = 2000;

/// exp(-i H(theta) t) psi0 without normalization. Requires a time-independent model.
StateVector evolve(const HamiltonianModel& model, double theta, const StateVector& psi0, double t);
StateVector evolve(const Matrix& h, const StateVector& psi0, double t);

/// Product over `steps` equal slices of exp(coefficient * H(t_mid) * dt).
/// With coefficient -i and forward ordering this is T exp(-i int H); with
/// +i and reverse ordering it is the anti-ordered T-bar exp(+i int H).
Propagator time_ordered_propagator(const TimeGenerator& h, double t_end, int steps,
                                   Ordering ordering, Complex coefficient = -kI,
                                   double t_start = 0.0);

/// Number of slices used for a span of length t at the given density.
int steps_for(double t, int steps_per_unit_time);

struct Normalized {
  StateVector state;
  double norm = 0.0;
};

Normalized normalize(const StateVector& psi);

using StateFamily = std::function<Vector(double theta)>;

inline double default_fd_step(double theta) { return 1e-5 * std::max(1.0, std::abs(theta)); }

/// Central difference (f(theta + h) - f(theta - h)) / 2h. The family must be a
/// deterministic function of theta: no per-call phase fixing.
Vector param_derivative(const StateFamily& state_fn, double theta, double h);

}  // namespace nhsense

#endif  // NHSENSE_DYNAMICS_HPP
