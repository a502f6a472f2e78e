#include "salab/engine.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace salab {

SaStepper::SaStepper(const Problem& problem, const StepSchedule& schedule, const NoiseModel& noise, Index n0,
                     State x_init, std::uint64_t seed)
    : problem_(&problem),
      schedule_(&schedule),
      noise_(&noise),
      rng_(seed),
      x_(std::move(x_init)),
      noise_draw_(State::Zero(x_.size())),
      n_(n0),
      t_(schedule.elapsed_time(n0))
{
  if (x_.size() != problem.dim) throw ProblemError("initial state dimension does not match the problem");
  if (!x_.allFinite()) throw ProblemError("initial state must be finite");
}

bool SaStepper::advance()
{
  if (diverged_) return false;
  const double a = schedule_->step(n_);
  const State h = problem_->drift(x_);
  sample_into(*noise_, x_, rng_, noise_draw_);
  State next = x_ + a * (h + noise_draw_);
  if (!next.allFinite()) {
    diverged_ = true;
    return false;
  }
  x_ = std::move(next);
  t_ += a;
  ++n_;
  return true;
}

Trajectory run_sa(const Problem& problem, const StepSchedule& schedule, const NoiseModel& noise, Index n0,
                  const State& x_init, Index horizon, std::uint64_t seed, const RunOptions& options)
{
  if (horizon <= n0) throw std::invalid_argument("run_sa requires horizon > n0");

  Trajectory traj;
  traj.n0 = n0;
  traj.schedule = schedule;
  traj.schedule_id = schedule.describe();
  traj.problem_id = problem.name;
  traj.noise_id = noise.describe();
  traj.seed = seed;

  SaStepper stepper(problem, schedule, noise, n0, x_init, seed);
  const auto steps = static_cast<std::size_t>(horizon - n0);
  traj.states.reserve(steps + 1);
  traj.times.reserve(steps + 1);
  traj.noise.reserve(steps);
  traj.states.push_back(stepper.state());
  traj.times.push_back(stepper.time());
  while (stepper.index() < horizon) {
    if (!stepper.advance()) {
      traj.diverged_at = stepper.index() + 1;
      break;
    }
    traj.noise.push_back(stepper.last_noise());
    traj.states.push_back(stepper.state());
    traj.times.push_back(stepper.time());
  }

  traj.blocks.n0 = n0;
  traj.blocks.T = options.block_length;
  traj.blocks.boundaries = {n0};
  if (traj.last_index() > n0) {
    try {
      traj.blocks = partition_blocks(schedule, n0, options.block_length, traj.last_index());
    } catch (const InsufficientHorizon&) {
    }
  }
  return traj;
}

std::optional<Index> check_recursion(const Trajectory& traj, const Problem& problem, const NoiseModel& noise)
{
  Rng rng(traj.seed);
  State m;
  for (std::size_t k = 0; k + 1 < traj.states.size(); ++k) {
    const Index n = traj.n0 + static_cast<Index>(k);
    const State& x = traj.states[k];
    sample_into(noise, x, rng, m);
    if (m != traj.noise[k]) return n;
    const State next = x + traj.schedule.step(n) * (problem.drift(x) + m);
    if (next != traj.states[k + 1]) return n;
  }
  return std::nullopt;
}

State ode_flow(const Problem& problem, const State& x0, double duration, double dt)
{
  if (!x0.allFinite()) throw FlowDiverged("ode flow started from a non-finite state");
  return integrate_rk4(problem.drift, x0, duration, dt);
}

State interpolate(const Trajectory& traj, double t)
{
  if (traj.times.empty() || !(t >= traj.times.front()) || !(t <= traj.times.back()))
    throw std::out_of_range("interpolation time outside the trajectory");
  const auto it = std::upper_bound(traj.times.begin(), traj.times.end(), t);
  const auto k = static_cast<std::size_t>(it - traj.times.begin()) - 1;
  if (traj.times[k] == t || k + 1 == traj.times.size()) return traj.states[k];
  const double w = (t - traj.times[k]) / (traj.times[k + 1] - traj.times[k]);
  return traj.states[k] + w * (traj.states[k + 1] - traj.states[k]);
}

BlockDiagnostics block_deviations(const Trajectory& traj, const Problem& problem, double T, double dt)
{
  const BlockPartition part = partition_blocks(traj.schedule, traj.n0, T, traj.last_index());
  BlockDiagnostics diag;
  diag.rho.reserve(part.block_count());

  for (std::size_t i = 0; i < part.block_count(); ++i) {
    const Index start = part.boundaries[i];
    const Index stop = part.boundaries[i + 1];
    const double step_dt = dt > 0.0 ? dt : std::min(1e-3, traj.schedule.step(start) / 10.0);

    State y = traj.states[static_cast<std::size_t>(start - traj.n0)];
    double sup = 0.0;
    for (Index n = start; n < stop && std::isfinite(sup); ++n) {
      const auto k = static_cast<std::size_t>(n - traj.n0);
      const State& xa = traj.states[k];
      const State& xb = traj.states[k + 1];
      const double a = traj.schedule.step(n);
      const auto pieces = std::max<long long>(1, static_cast<long long>(std::ceil(a / step_dt)));
      const double h = a / static_cast<double>(pieces);
      for (long long s = 1; s <= pieces; ++s) {
        y = rk4_step(problem.drift, y, h);
        if (!y.allFinite()) {
          sup = std::numeric_limits<double>::infinity();
          break;
        }
        const double w = static_cast<double>(s) / static_cast<double>(pieces);
        sup = std::max(sup, (xa + w * (xb - xa) - y).norm());
      }
    }
    diag.rho.push_back(sup);
  }
  return diag;
}

double clip_increment(double value, double v)
{
  if (std::abs(value) <= v) return value;
  return std::copysign(v, value);
}

MartingaleDiagnostics martingale_diagnostics(const Trajectory& traj, std::size_t block_index, double delta,
                                             double v)
{
  if (block_index >= traj.blocks.block_count()) throw std::out_of_range("block index outside the trajectory");
  if (!(delta > 0.0) || !(v > 0.0)) throw std::invalid_argument("delta and v must be positive");

  const Index start = traj.blocks.boundaries[block_index];
  const Index stop = traj.blocks.boundaries[block_index + 1];
  const Eigen::Index d = traj.states.front().size();
  const double level = delta / std::sqrt(static_cast<double>(d));

  MartingaleDiagnostics out;
  out.tau_index = stop;
  State zeta = State::Zero(d);
  out.zeta.push_back(zeta);
  bool stopped = false;
  for (Index n = start; n < stop; ++n) {
    const State& m = traj.noise[static_cast<std::size_t>(n - traj.n0)];
    zeta += traj.schedule.step(n) * m;
    out.zeta.push_back(zeta);
    if (!stopped && zeta.lpNorm<Eigen::Infinity>() > level) {
      out.tau_index = n + 1;
      stopped = true;
    }
    out.truncated.push_back(m.unaryExpr([v](double c) { return clip_increment(c, v); }));
  }
  return out;
}

void attach_martingale_diagnostics(BlockDiagnostics& diag, const Trajectory& traj, double delta)
{
  diag.zeta_sup.clear();
  diag.tau_index.clear();
  for (std::size_t i = 0; i < traj.blocks.block_count(); ++i) {
    const auto md = martingale_diagnostics(traj, i, delta, std::numeric_limits<double>::max());
    double sup = 0.0;
    for (const auto& z : md.zeta) sup = std::max(sup, z.norm());
    diag.zeta_sup.push_back(sup);
    diag.tau_index.push_back(md.tau_index);
  }
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out)
{
  const Eigen::Index d = traj.states.empty() ? 0 : traj.states.front().size();
  out << "n,t";
  for (Eigen::Index i = 0; i < d; ++i) out << ",x" << (i + 1);
  out << ",block\n";
  out << std::setprecision(17);
  std::size_t block = 0;
  const auto& b = traj.blocks.boundaries;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const Index n = traj.n0 + static_cast<Index>(k);
    while (block + 1 < b.size() && n >= b[block + 1]) ++block;
    const long long label = (block + 1 < b.size()) ? static_cast<long long>(block) : -1;
    out << n << ',' << traj.times[k];
    for (Eigen::Index i = 0; i < d; ++i) out << ',' << traj.states[k][i];
    out << ',' << label << '\n';
  }
}

}  // namespace salab
