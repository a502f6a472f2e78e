#ifndef SALAB_PROBLEM_HPP
#define SALAB_PROBLEM_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "salab/rng.hpp"

namespace salab {

using State = Eigen::VectorXd;

class ProblemError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Axis-aligned box [lo, hi].
struct Box {
  State lo;
  State hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const State& x) const;
  bool nondegenerate() const;
  State sample(Rng& rng) const;
};

struct Ball {
  State center;
  double radius = 1.0;

  int dim() const { return static_cast<int>(center.size()); }
  bool contains(const State& x) const { return (x - center).norm() < radius; }
  Box bounding_box() const;
};

using Region = std::variant<Box, Ball>;

bool region_contains(const Region& region, const State& x);
Box bounding_box(const Region& region);

/// Drift h, Lyapunov function V with gradient, target set H (finite points) and the domain B.
struct Problem {
  std::string name;
  int dim = 1;
  std::function<State(const State&)> drift;
  std::function<double(const State&)> lyapunov;
  std::function<State(const State&)> lyapunov_grad;
  std::vector<State> targets;
  Region domain;

  double target_distance(const State& x) const;
};

/// h(x) = -x, V = |x|^2, H = {0}, B = (-2, 2)^d.
Problem linear_well(int dim);

/// h(x) = x - x^3, V = (x-1)^2, H = {1}, B = (0.2, 1.8). Competing attractor at -1.
Problem double_well();

/// h(x) = (-x1 - x2, x1 - x2), V = |x|^2, H = {0}, B = (-2, 2)^2.
Problem contracting_spiral();

/// 1-d drift h(x) = sum_k coeffs[k] x^k, with V = (x - target)^2 and H = {target}.
Problem polynomial_drift_1d(std::vector<double> coeffs, double target, Box domain);

/// 2-d drift with component i = sum_{p,q} coeffs[i][p][q] x1^p x2^q, V = |x - target|^2.
Problem polynomial_drift_2d(std::vector<std::vector<std::vector<double>>> coeffs, State target,
                            Box domain);

struct Evaluation {
  State drift;
  double V = 0.0;
  State grad;
  double dist = 0.0;
};

Evaluation evaluate(const Problem& problem, const State& x);

double distance_to_target(const Problem& problem, const State& x);

struct AuditThresholds {
  double lipschitz_max = std::numeric_limits<double>::infinity();
  double hessian_max = std::numeric_limits<double>::infinity();
  double growth_max = std::numeric_limits<double>::infinity();
  double tol_descent = 1e-9;
};

struct AssumptionAudit {
  double lipschitz_estimate = 0.0;
  double hessian_bound_estimate = 0.0;
  double quadratic_growth_c = 0.0;
  std::int64_t descent_violations = 0;
  std::int64_t samples_used = 0;
  /// |h(0)|, needed to turn the Lipschitz constant into a linear growth bound.
  double drift_at_origin = 0.0;

  struct Flags {
    bool lipschitz = false;
    bool hessian = false;
    bool quadratic_growth = false;
    bool descent = false;
  } pass_flags;
};

/// Monte Carlo reading of the Lipschitz, bounded-Hessian, quadratic-growth and descent conditions
/// on `region`, deterministic in `rng_seed`.
AssumptionAudit audit_assumptions(const Problem& problem, int sample_count, const Box& region,
                                  std::uint64_t rng_seed, const AuditThresholds& thresholds = {});

/// Central-difference Hessian entries of V at x, step max(1e-4, 1e-4 |x|).
Eigen::MatrixXd finite_difference_hessian(const Problem& problem, const State& x);

/// Central-difference gradient of V at x.
State finite_difference_gradient(const Problem& problem, const State& x);

}  // namespace salab

#endif  // SALAB_PROBLEM_HPP
