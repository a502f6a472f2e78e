#include "salab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace salab {

double azuma_bound(double t, const std::vector<double>& c_list)
{
  if (c_list.empty()) throw std::invalid_argument("azuma_bound needs at least one increment bound");
  if (!(t > 0.0)) throw std::invalid_argument("azuma_bound needs t > 0");
  double sum_sq = 0.0;
  for (double c : c_list) {
    if (!(c > 0.0)) throw std::invalid_argument("azuma_bound increment bounds must be positive");
    sum_sq += c * c;
  }
  return 2.0 * std::exp(-t * t / (2.0 * sum_sq));
}

double theoretical_bound(double c1, double c, double delta, double b_n0)
{
  if (!(c1 > 0.0) || !(c > 0.0) || !(delta > 0.0) || !(b_n0 > 0.0))
    throw std::invalid_argument("theoretical_bound arguments must be positive");
  return c1 * std::exp(-c * std::cbrt(delta * delta) / std::pow(b_n0, 0.25));
}

double ExpBoundFamily::operator()(double y) const
{
  if (y <= 0.0) return 0.0;
  return c1 * std::exp(-c * std::cbrt(delta * delta) / std::pow(y, 0.25));
}

double ExpBoundFamily::convex_limit() const
{
  // g'' has the sign of k y^{-1/4} - 5 with k = c delta^{2/3}.
  const double k = c * std::cbrt(delta * delta);
  return std::pow(k / 5.0, 4);
}

bool superadditivity_check(const std::function<double(double)>& g, double a, double b, double region_c, int probes)
{
  if (!(a >= 0.0) || !(b >= 0.0)) throw PreconditionError("superadditivity needs a, b >= 0");
  if (!(region_c > 0.0) || !(a + b < region_c)) throw PreconditionError("superadditivity needs a + b < region_c");
  if (std::abs(g(0.0)) > 1e-12) throw PreconditionError("superadditivity needs g(0) = 0");
  if (probes < 3) throw std::invalid_argument("convexity probe needs >= 3 points");

  const double h = region_c / (2.0 * (probes + 1));
  for (int k = 1; k <= probes; ++k) {
    const double y = region_c * k / (probes + 1);
    const double lo = std::max(y - h, 0.0);
    const double hi = std::min(y + h, region_c);
    const double w = std::min(y - lo, hi - y);
    const double gm = g(y - w), g0 = g(y), gp = g(y + w);
    const double second = gm - 2.0 * g0 + gp;
    const double scale = std::abs(gm) + 2.0 * std::abs(g0) + std::abs(gp);
    if (second < -1e-12 * scale - 1e-300) {
      std::ostringstream msg;
      msg << "g is not convex near y=" << y << " (second difference " << second << ")";
      throw PreconditionError(msg.str());
    }
  }
  return g(a) + g(b) <= g(a + b) + 1e-12;
}

double compute_gamma(double max_V_on_B, double epsilon, double Delta, double T)
{
  if (!(max_V_on_B - epsilon > 0.0)) throw std::invalid_argument("gamma needs max V on B > epsilon");
  if (!(Delta > 0.0)) throw std::invalid_argument("gamma needs Delta > 0");
  if (!(T >= 0.0)) throw std::invalid_argument("gamma needs T >= 0");
  return ((max_V_on_B - epsilon) / (Delta / 2.0)) * (T + 1.0);
}

std::vector<State> grid_points(const Box& box, int resolution)
{
  if (!box.nondegenerate()) throw std::invalid_argument("grid box is degenerate");
  if (resolution < 2) throw std::invalid_argument("grid resolution must be >= 2");
  const int d = box.dim();
  if (d > 2) throw std::invalid_argument("grid helpers support d <= 2");

  auto coord = [&](int axis, int k) {
    if (k == resolution - 1) return box.hi[axis];
    return box.lo[axis] + (box.hi[axis] - box.lo[axis]) * k / (resolution - 1);
  };
  std::vector<State> pts;
  if (d == 1) {
    for (int k = 0; k < resolution; ++k) pts.push_back(State::Constant(1, coord(0, k)));
  } else {
    for (int i = 0; i < resolution; ++i)
      for (int j = 0; j < resolution; ++j) {
        State x(2);
        x << coord(0, i), coord(1, j);
        pts.push_back(x);
      }
  }
  return pts;
}

double max_lyapunov_on(const Problem& problem, const Box& box, int resolution)
{
  double best = 0.0;
  for (const auto& x : grid_points(box, resolution)) best = std::max(best, problem.lyapunov(x));
  return best;
}

namespace {

bool on_box_boundary(const Box& box, const State& x)
{
  return ((x.array() == box.lo.array()) || (x.array() == box.hi.array())).any();
}

}  // namespace

double compute_Delta(const Problem& problem, double epsilon, double T, int grid_resolution, double dt)
{
  if (!(epsilon > 0.0)) throw std::invalid_argument("compute_Delta needs epsilon > 0");
  if (!(T >= 0.0)) throw std::invalid_argument("compute_Delta needs T >= 0");
  const Box box = bounding_box(problem.domain);

  double best = std::numeric_limits<double>::infinity();
  for (const auto& x : grid_points(box, grid_resolution)) {
    const double V = problem.lyapunov(x);
    if (V < epsilon) {
      if (on_box_boundary(box, x))
        throw PreconditionError("sublevel set {V < epsilon} reaches the boundary of B");
      continue;
    }
    const State y = T > 0.0 ? ode_flow(problem, x, T, dt) : x;
    best = std::min(best, V - problem.lyapunov(y));
  }
  if (!std::isfinite(best)) throw PreconditionError("no grid point of B lies outside {V < epsilon}");
  if (!(best > 0.0)) {
    std::ostringstream msg;
    msg << "Delta = " << best << " is not positive: epsilon too large or T too small";
    throw std::domain_error(msg.str());
  }
  return best;
}

double choose_delta_nbhd(const Problem& problem, double epsilon, double Delta, int grid_resolution)
{
  const Box box = bounding_box(problem.domain);
  double grad_max = 0.0;
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& x : grid_points(box, grid_resolution)) {
    grad_max = std::max(grad_max, problem.lyapunov_grad(x).norm());
    if (problem.lyapunov(x) <= epsilon) {
      const double to_lo = (x - box.lo).minCoeff();
      const double to_hi = (box.hi - x).minCoeff();
      margin = std::min({margin, to_lo, to_hi});
    }
  }
  const double by_potential = grad_max > 0.0 ? Delta / (2.0 * grad_max) : std::numeric_limits<double>::infinity();
  const double delta = 0.99 * std::min(by_potential, margin);
  if (!(delta > 0.0) || !std::isfinite(delta)) throw PreconditionError("no admissible neighbourhood radius");
  return delta;
}

// ---------------------------------------------------------------------------------------------

MomentBoundReport moment_bound_check(const Problem& problem, const StepSchedule& schedule, const NoiseModel& noise,
                                     const InitLaw& x_init_law, Index horizon, std::int64_t replicas,
                                     std::uint64_t seed, const MomentBoundOptions& options)
{
  if (schedule.is_constant())
    throw ScheduleError("moment bound needs square-summable steps; constant schedule is inadmissible");
  if (replicas < 2) throw std::invalid_argument("moment bound needs >= 2 replicas");
  if (horizon <= 0) throw std::invalid_argument("moment bound needs horizon > 0");

  const int d = problem.dim;
  const Box region = options.audit_region.value_or(Box{State::Constant(d, -5.0), State::Constant(d, 5.0)});
  const AssumptionAudit audit = audit_assumptions(problem, options.audit_samples, region, options.audit_seed);
  if (!audit.pass_flags.hessian || !audit.pass_flags.quadratic_growth)
    throw PreconditionError("problem fails the bounded-Hessian or quadratic-growth audit");

  std::vector<State> probes{State::Zero(d)};
  for (double r : {0.5, 1.0, 2.0, 4.0})
    for (int i = 0; i < d; ++i) {
      State p = State::Zero(d);
      p[i] = r;
      probes.push_back(p);
    }
  const double c_M = verify_second_moment(noise, probes, options.noise_samples_per_probe,
                                          derive_replica_seed(options.audit_seed, 1));

  MomentBoundReport rep;
  auto& k = rep.constants;
  k.hessian_bound = audit.hessian_bound_estimate;
  k.lipschitz = audit.lipschitz_estimate;
  k.drift_at_origin = audit.drift_at_origin;
  k.noise_second_moment = c_M;
  k.quadratic_growth = audit.quadratic_growth_c;
  const double drift_growth = (k.drift_at_origin + k.lipschitz) * (k.drift_at_origin + k.lipschitz);
  k.composed = (d * k.hessian_bound / 2.0) * (drift_growth + c_M) * (1.0 + k.quadratic_growth);

  rep.checkpoints = checkpoint_indices(schedule, 0, options.run.T, horizon, options.run.per_block);
  rep.replicas = replicas;
  const std::size_t m = rep.checkpoints.size();

  auto task = [&](std::size_t r) {
    const std::uint64_t rs = derive_replica_seed(seed, r);
    Rng init_rng(init_stream_seed(rs));
    SaStepper stepper(problem, schedule, noise, 0, x_init_law.sample(init_rng), rs);
    std::vector<double> values(m, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t c = 0; c < m; ++c) {
      while (stepper.index() < rep.checkpoints[c])
        if (!stepper.advance()) return values;
      values[c] = problem.lyapunov(stepper.state());
    }
    return values;
  };
  const auto per_replica = run_replicas(static_cast<std::size_t>(replicas), options.run.jobs, task);

  std::vector<MeanAccumulator> acc(m);
  for (const auto& values : per_replica) {
    if (std::isnan(values.back())) {
      ++rep.diverged;
      continue;
    }
    for (std::size_t c = 0; c < m; ++c) acc[c].add(values[c]);
  }
  if (static_cast<double>(rep.diverged) > 0.01 * static_cast<double>(replicas))
    throw EstimatorError("more than 1% of replicas diverged in the moment-bound run");

  double sum_sq = 0.0;
  Index n = 0;
  rep.pass = true;
  for (std::size_t c = 0; c < m; ++c) {
    for (; n < rep.checkpoints[c]; ++n) sum_sq += schedule.step(n) * schedule.step(n);
    rep.curve.push_back(1.0 + acc[c].mean);
    rep.std_error.push_back(acc[c].standard_error());
    rep.envelope.push_back(std::exp(k.composed * sum_sq) * (1.0 + acc[0].mean));
    if (rep.curve.back() > rep.envelope.back() * (1.0 + 3.0 * rep.std_error.back())) rep.pass = false;
  }
  return rep;
}

std::optional<double> TightnessResult::witness(double level) const
{
  for (std::size_t i = 0; i < radius_grid.size(); ++i)
    if (sup_escape[i] <= level) return radius_grid[i];
  return std::nullopt;
}

TightnessResult estimate_tightness(const Problem& problem, const StepSchedule& schedule, const NoiseModel& noise,
                                   const InitLaw& x_init, Index horizon, std::int64_t replicas, std::uint64_t seed,
                                   const std::vector<double>& radius_grid, const EstimatorOptions& options)
{
  if (replicas < 100) throw std::invalid_argument("tightness estimate needs >= 100 replicas");
  if (radius_grid.empty() || !std::is_sorted(radius_grid.begin(), radius_grid.end()))
    throw std::invalid_argument("radius grid must be nonempty and increasing");

  TightnessResult res;
  res.radius_grid = radius_grid;
  res.replicas = replicas;
  res.checkpoints = checkpoint_indices(schedule, 0, options.T, horizon, options.per_block);
  const std::size_t m = res.checkpoints.size();

  auto task = [&](std::size_t r) {
    const std::uint64_t rs = derive_replica_seed(seed, r);
    Rng init_rng(init_stream_seed(rs));
    SaStepper stepper(problem, schedule, noise, 0, x_init.sample(init_rng), rs);
    std::vector<double> norms(m, std::numeric_limits<double>::infinity());
    for (std::size_t c = 0; c < m; ++c) {
      while (stepper.index() < res.checkpoints[c])
        if (!stepper.advance()) return norms;
      norms[c] = stepper.state().norm();
    }
    return norms;
  };
  const auto per_replica = run_replicas(static_cast<std::size_t>(replicas), options.jobs, task);

  std::vector<std::vector<std::int64_t>> outside(radius_grid.size(), std::vector<std::int64_t>(m, 0));
  for (const auto& norms : per_replica) {
    if (std::isinf(norms.back())) ++res.diverged;
    for (std::size_t c = 0; c < m; ++c)
      for (std::size_t i = 0; i < radius_grid.size(); ++i)
        if (norms[c] > radius_grid[i]) ++outside[i][c];
  }
  for (std::size_t i = 0; i < radius_grid.size(); ++i) {
    const auto worst = *std::max_element(outside[i].begin(), outside[i].end());
    res.sup_escape.push_back(static_cast<double>(worst) / static_cast<double>(replicas));
  }
  return res;
}

LockinCurve estimate_lockin(const Problem& problem, const StepSchedule& schedule, const NoiseModel& noise,
                            const std::vector<Index>& n0_values, const InitLaw& x_init_law, double horizon_time,
                            std::int64_t replicas, std::uint64_t seed, const LockinOptions& options)
{
  if (n0_values.empty()) throw std::invalid_argument("lock-in needs at least one n0");
  if (replicas < 1) throw std::invalid_argument("lock-in needs >= 1 replica");
  if (!(horizon_time > 0.0)) throw std::invalid_argument("lock-in needs horizon_time > 0");
  if (!(options.conv_window > 0.0 && options.conv_window <= 1.0))
    throw std::invalid_argument("conv_window must be in (0, 1]");
  if (const auto* box = std::get_if<Box>(&x_init_law.law)) {
    const Box B = bounding_box(problem.domain);
    if (!B.contains(box->lo) || !B.contains(box->hi))
      throw PreconditionError("initial law must sample from inside B");
  } else if (!region_contains(problem.domain, std::get<State>(x_init_law.law))) {
    throw PreconditionError("initial state must lie inside B");
  }

  LockinCurve curve;
  curve.n0_values = n0_values;
  curve.replicas = replicas;

  for (const Index n0 : n0_values) {
    const Index horizon = index_after_time(schedule, n0, horizon_time);
    const std::vector<Index> checkpoints =
        checkpoint_indices(schedule, n0, options.run.T, horizon, options.run.per_block);
    const double window_start = (1.0 - options.conv_window) * horizon_time;

    auto task = [&](std::size_t r) -> int {
      const std::uint64_t rs = derive_replica_seed(seed, r);
      Rng init_rng(init_stream_seed(rs));
      SaStepper stepper(problem, schedule, noise, n0, x_init_law.sample(init_rng), rs);
      const double t0 = stepper.time();
      for (const Index c : checkpoints) {
        while (stepper.index() < c)
          if (!stepper.advance()) return 0;
        if (stepper.time() - t0 >= window_start && problem.target_distance(stepper.state()) >= options.conv_tol)
          return 0;
      }
      return 1;
    };
    const auto outcomes = run_replicas(static_cast<std::size_t>(replicas), options.run.jobs, task);
    const std::int64_t successes = std::accumulate(outcomes.begin(), outcomes.end(), std::int64_t{0});

    curve.success_counts.push_back(successes);
    curve.failure_rate.push_back(1.0 - static_cast<double>(successes) / static_cast<double>(replicas));
    const Interval s = wilson_interval(replicas - successes, replicas);
    curve.confidence_intervals.push_back(s);
    curve.b_values.push_back(tail_sum_squares(schedule, n0));
  }

  const auto largest = std::max_element(n0_values.begin(), n0_values.end()) - n0_values.begin();
  if (curve.success_counts[static_cast<std::size_t>(largest)] == 0)
    throw EstimatorError("no replica converged at the largest n0: problem or horizon misconfigured");
  return curve;
}

BoundFit fit_failure_curve(const LockinCurve& curve)
{
  if (curve.failure_rate.size() != curve.b_values.size())
    throw std::invalid_argument("lock-in curve has mismatched columns");
  BoundFit fit;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < curve.failure_rate.size(); ++i) {
    if (curve.failure_rate[i] > 0.0) {
      x.push_back(std::pow(curve.b_values[i], -0.25));
      y.push_back(std::log(curve.failure_rate[i]));
    } else {
      ++fit.censored_points;
    }
  }
  fit.fitted_points = static_cast<int>(x.size());
  if (x.size() < 3) return fit;
  const LineFit line = least_squares_line(x, y);
  fit.slope = line.slope;
  fit.intercept = line.intercept;
  fit.r_squared = line.r_squared;
  fit.fitted = true;
  fit.consistent_with_bound = line.slope < 0.0;
  return fit;
}

bool failure_rate_nonincreasing(const LockinCurve& curve)
{
  // Pairs are compared in increasing n0 order regardless of how n0_values was listed.
  std::vector<std::size_t> order(curve.n0_values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return curve.n0_values[a] < curve.n0_values[b]; });
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      const auto early = order[i], late = order[j];
      if (curve.failure_rate[late] > curve.failure_rate[early] &&
          curve.confidence_intervals[late].lo > curve.confidence_intervals[early].hi)
        return false;
    }
  return true;
}

SampleComplexityResult estimate_sample_complexity(const Problem& problem, const StepSchedule& schedule,
                                                  const NoiseModel& noise, Index n0, double epsilon,
                                                  double delta_nbhd, double T, std::int64_t replicas,
                                                  std::uint64_t seed, double horizon_time, const InitLaw& x_init,
                                                  const SampleComplexityOptions& options)
{
  if (replicas < 1) throw std::invalid_argument("sample complexity needs >= 1 replica");
  if (!(delta_nbhd >= 0.0)) throw std::invalid_argument("delta_nbhd must be >= 0");

  SampleComplexityResult res;
  res.epsilon = epsilon;
  res.delta_nbhd = delta_nbhd;
  res.replicas = replicas;
  res.Delta = options.Delta ? *options.Delta : compute_Delta(problem, epsilon, T, options.grid_resolution, options.dt);
  const Box box = bounding_box(problem.domain);
  res.max_V = max_lyapunov_on(problem, box, options.grid_resolution);
  res.gamma = compute_gamma(res.max_V, epsilon, res.Delta, T);
  if (res.gamma >= horizon_time) {
    std::ostringstream msg;
    msg << "gamma = " << res.gamma << " is not below horizon_time = " << horizon_time;
    throw PreconditionError(msg.str());
  }

  const double level = epsilon + res.Delta / 2.0;
  std::vector<State> sublevel;
  for (const auto& x : grid_points(box, options.grid_resolution))
    if (problem.lyapunov(x) <= level) sublevel.push_back(x);

  auto inside = [&](const State& x) {
    if (problem.lyapunov(x) <= level) return true;
    for (const auto& p : sublevel)
      if ((x - p).norm() <= delta_nbhd) return true;
    return false;
  };

  const Index horizon = index_after_time(schedule, n0, horizon_time);
  auto task = [&](std::size_t r) -> int {
    const std::uint64_t rs = derive_replica_seed(seed, r);
    Rng init_rng(init_stream_seed(rs));
    SaStepper stepper(problem, schedule, noise, n0, x_init.sample(init_rng), rs);
    const double t0 = stepper.time();
    while (stepper.index() < horizon) {
      if (!stepper.advance()) return 0;
      if (stepper.time() - t0 >= res.gamma && !inside(stepper.state())) return 0;
    }
    return 1;
  };
  const auto outcomes = run_replicas(static_cast<std::size_t>(replicas), options.run.jobs, task);
  res.trapped = std::accumulate(outcomes.begin(), outcomes.end(), std::int64_t{0});
  res.trapped_fraction = static_cast<double>(res.trapped) / static_cast<double>(replicas);
  return res;
}

}  // namespace salab
