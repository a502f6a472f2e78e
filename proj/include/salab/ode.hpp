#ifndef SALAB_ODE_HPP
#define SALAB_ODE_HPP

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace salab {

class FlowDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One classical fourth-order Runge-Kutta step of x' = f(x).
template <typename Field, typename Derived>
typename Derived::PlainObject rk4_step(const Field& f, const Eigen::MatrixBase<Derived>& x,
                                       typename Derived::Scalar h)
{
  using Vec = typename Derived::PlainObject;
  using Scalar = typename Derived::Scalar;
  const Scalar half = Scalar(0.5) * h;
  const Vec k1 = f(x.eval());
  const Vec k2 = f((x + half * k1).eval());
  const Vec k3 = f((x + half * k2).eval());
  const Vec k4 = f((x + h * k3).eval());
  return x + (h / Scalar(6)) * (k1 + Scalar(2) * (k2 + k3) + k4);
}

/// Integrates x' = f(x) for `duration` with fixed step dt; the last step is shortened to land
/// exactly on `duration`. Throws FlowDiverged on a non-finite state.
template <typename Field, typename Derived>
typename Derived::PlainObject integrate_rk4(const Field& f, const Eigen::MatrixBase<Derived>& x0,
                                            typename Derived::Scalar duration,
                                            typename Derived::Scalar dt)
{
  using Scalar = typename Derived::Scalar;
  if (!(dt > Scalar(0))) throw std::invalid_argument("ode step dt must be positive");
  if (!(duration >= Scalar(0))) throw std::invalid_argument("ode duration must be nonnegative");

  typename Derived::PlainObject x = x0;
  const auto full_steps = static_cast<long long>(std::floor(duration / dt));
  Scalar elapsed = Scalar(0);
  for (long long k = 0; k < full_steps; ++k) {
    x = rk4_step(f, x, dt);
    elapsed = static_cast<Scalar>(k + 1) * dt;
    if (!x.allFinite()) throw FlowDiverged("ode flow produced a non-finite state");
  }
  const Scalar rest = duration - elapsed;
  if (rest > Scalar(0)) {
    x = rk4_step(f, x, rest);
    if (!x.allFinite()) throw FlowDiverged("ode flow produced a non-finite state");
  }
  return x;
}

}  // namespace salab

#endif  // SALAB_ODE_HPP
