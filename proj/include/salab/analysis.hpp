#ifndef SALAB_ANALYSIS_HPP
#define SALAB_ANALYSIS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "salab/engine.hpp"
#include "salab/montecarlo.hpp"
#include "salab/noise.hpp"
#include "salab/problem.hpp"
#include "salab/schedule.hpp"
#include "salab/stats.hpp"

namespace salab {

/// A required input condition does not hold (as opposed to a check that ran and failed).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The estimator ran but its output cannot be interpreted (e.g. nothing ever converged).
class EstimatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------------------------
// Closed-form evaluators

/// Two-sided Azuma-Hoeffding bound 2 exp(-t^2 / (2 sum c_k^2)).
double azuma_bound(double t, const std::vector<double>& c_list);

/// c1 exp(-c delta^{2/3} / b^{1/4}).
double theoretical_bound(double c1, double c, double delta, double b_n0);

/// g(y) = c1 exp(-c delta^{2/3} / y^{1/4}) for y > 0, extended by g(0) = 0.
struct ExpBoundFamily {
  double c1 = 1.0;
  double c = 1.0;
  double delta = 1.0;

  double operator()(double y) const;
  /// g is convex exactly on (0, (c delta^{2/3} / 5)^4).
  double convex_limit() const;
};

/// Checks g(a) + g(b) <= g(a+b) + 1e-12 for g convex on (0, region_c) with g(0) = 0.
/// Convexity is probed by second differences on `probes` interior points; a failed probe (or
/// g(0) != 0, or a + b >= region_c) throws PreconditionError.
bool superadditivity_check(const std::function<double(double)>& g, double a, double b, double region_c,
                           int probes = 512);

/// gamma = ((max V - epsilon) / (Delta / 2)) (T + 1).
double compute_gamma(double max_V_on_B, double epsilon, double Delta, double T);

// ---------------------------------------------------------------------------------------------
// Grid helpers (d <= 2)

/// `resolution` points per axis including both endpoints.
std::vector<State> grid_points(const Box& box, int resolution);

double max_lyapunov_on(const Problem& problem, const Box& box, int resolution);

/// min over grid points of B with V >= epsilon of V(x) - V(flow_T(x)). Throws PreconditionError
/// if {V < epsilon} reaches the boundary of B, and std::domain_error if the minimum is <= 0.
double compute_Delta(const Problem& problem, double epsilon, double T, int grid_resolution = 801,
                     double dt = 1e-3);

/// Largest delta (times 0.99) with N_delta({V <= epsilon}) inside B and |V(x)-V(y)| < Delta/2
/// whenever |x - y| < delta on B.
double choose_delta_nbhd(const Problem& problem, double epsilon, double Delta, int grid_resolution = 801);

// ---------------------------------------------------------------------------------------------
// Monte Carlo estimators

struct EstimatorOptions {
  /// Block length for checkpoint placement.
  double T = 1.0;
  int per_block = 8;
  int jobs = 1;
};

struct MomentBoundOptions {
  EstimatorOptions run;
  std::optional<Box> audit_region;  ///< defaults to [-5, 5]^d
  int audit_samples = 1000;
  std::int64_t noise_samples_per_probe = 20000;
  std::uint64_t audit_seed = 7;
};

struct MomentEnvelopeConstants {
  double hessian_bound = 0.0;
  double lipschitz = 0.0;
  double drift_at_origin = 0.0;
  double noise_second_moment = 0.0;
  double quadratic_growth = 0.0;
  /// (d H / 2) ((|h(0)| + L)^2 + c_M) (1 + c_Q).
  double composed = 0.0;
};

struct MomentBoundReport {
  std::vector<Index> checkpoints;
  std::vector<double> curve;     ///< 1 + mean V(x_n)
  std::vector<double> std_error; ///< standard error of mean V(x_n)
  std::vector<double> envelope;  ///< exp(c sum_{i<n} a(i)^2) (1 + mean V(x_0))
  MomentEnvelopeConstants constants;
  std::int64_t replicas = 0;
  std::int64_t diverged = 0;
  bool pass = false;
};

MomentBoundReport moment_bound_check(const Problem& problem, const StepSchedule& schedule, const NoiseModel& noise,
                                     const InitLaw& x_init_law, Index horizon, std::int64_t replicas,
                                     std::uint64_t seed, const MomentBoundOptions& options = {});

struct TightnessResult {
  std::vector<double> radius_grid;
  std::vector<double> sup_escape;  ///< max over checkpoints of P[|x_n| > K]
  std::vector<Index> checkpoints;
  std::int64_t replicas = 0;
  std::int64_t diverged = 0;

  /// Smallest K with sup_escape <= level, if any.
  std::optional<double> witness(double level) const;
};

TightnessResult estimate_tightness(const Problem& problem, const StepSchedule& schedule, const NoiseModel& noise,
                                   const InitLaw& x_init, Index horizon, std::int64_t replicas, std::uint64_t seed,
                                   const std::vector<double>& radius_grid, const EstimatorOptions& options = {});

struct LockinCurve {
  std::vector<Index> n0_values;
  std::int64_t replicas = 0;
  std::vector<std::int64_t> success_counts;
  std::vector<double> failure_rate;
  std::vector<Interval> confidence_intervals;
  std::vector<double> b_values;
};

struct LockinOptions {
  EstimatorOptions run;
  double conv_tol = 0.05;
  double conv_window = 0.1;
};

/// q(n0) = fraction of replicas started at n0 (x_{n0} drawn from `x_init_law`) that fail to stay
/// within conv_tol of H over the trailing conv_window fraction of `horizon_time` ODE time.
LockinCurve estimate_lockin(const Problem& problem, const StepSchedule& schedule, const NoiseModel& noise,
                            const std::vector<Index>& n0_values, const InitLaw& x_init_law, double horizon_time,
                            std::int64_t replicas, std::uint64_t seed, const LockinOptions& options = {});

struct BoundFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int censored_points = 0;
  int fitted_points = 0;
  /// False when fewer than 3 uncensored points remain; the other numbers are then meaningless.
  bool fitted = false;
  /// Negative slope, as the exponential bound shape requires.
  bool consistent_with_bound = false;
};

/// Least squares of log q(n0) against b(n0)^{-1/4} over points with q > 0.
BoundFit fit_failure_curve(const LockinCurve& curve);

/// Nonincreasing in n0 up to overlap of the confidence intervals.
bool failure_rate_nonincreasing(const LockinCurve& curve);

struct SampleComplexityResult {
  double epsilon = 0.0;
  double delta_nbhd = 0.0;
  double Delta = 0.0;
  double gamma = 0.0;
  double max_V = 0.0;
  double trapped_fraction = 0.0;
  std::int64_t trapped = 0;
  std::int64_t replicas = 0;
};

struct SampleComplexityOptions {
  EstimatorOptions run;
  int grid_resolution = 801;
  double dt = 1e-3;
  /// Use this Delta instead of computing it; lets callers vary delta_nbhd on fixed geometry.
  std::optional<double> Delta;
};

/// Fraction of replicas whose iterates stay in N_delta({V <= epsilon + Delta/2}) for every n with
/// t(n) in [t(n0) + gamma, t(n0) + horizon_time].
SampleComplexityResult estimate_sample_complexity(const Problem& problem, const StepSchedule& schedule,
                                                  const NoiseModel& noise, Index n0, double epsilon,
                                                  double delta_nbhd, double T, std::int64_t replicas,
                                                  std::uint64_t seed, double horizon_time, const InitLaw& x_init,
                                                  const SampleComplexityOptions& options = {});

}  // namespace salab

#endif  // SALAB_ANALYSIS_HPP
