#ifndef SALAB_ENGINE_HPP
#define SALAB_ENGINE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "salab/noise.hpp"
#include "salab/ode.hpp"
#include "salab/problem.hpp"
#include "salab/rng.hpp"
#include "salab/schedule.hpp"

namespace salab {

/// Streaming form of x_{n+1} = x_n + a(n) (h(x_n) + M_{n+1}).
///
/// Holds the current iterate, index, and elapsed ODE time t(n); each advance() draws one noise
/// vector from the owned generator. Estimators drive it directly to avoid storing trajectories.
class SaStepper {
 public:
  SaStepper(const Problem& problem, const StepSchedule& schedule, const NoiseModel& noise, Index n0,
            State x_init, std::uint64_t seed);

  /// One step. Returns false (and leaves the state untouched) if the update is non-finite.
  bool advance();

  const State& state() const { return x_; }
  Index index() const { return n_; }
  double time() const { return t_; }
  /// M_{n+1} used by the most recent successful advance().
  const State& last_noise() const { return noise_draw_; }
  bool diverged() const { return diverged_; }

 private:
  const Problem* problem_;
  const StepSchedule* schedule_;
  const NoiseModel* noise_;
  Rng rng_;
  State x_;
  State noise_draw_;
  Index n_;
  double t_;
  bool diverged_ = false;
};

struct Trajectory {
  Index n0 = 0;
  /// states[k] = x_{n0+k}.
  std::vector<State> states;
  /// times[k] = t(n0+k).
  std::vector<double> times;
  /// noise[k] = M_{n0+k+1}, the draw used to go from states[k] to states[k+1].
  std::vector<State> noise;
  StepSchedule schedule = StepSchedule::constant_for_testing(1.0);
  std::string schedule_id;
  std::string problem_id;
  std::string noise_id;
  std::uint64_t seed = 0;
  BlockPartition blocks;
  /// Set when the recursion produced a non-finite state at this index; states stop before it.
  std::optional<Index> diverged_at;

  Index last_index() const { return n0 + static_cast<Index>(states.size()) - 1; }
};

struct RunOptions {
  /// Block length T (ODE time) used to populate Trajectory::blocks.
  double block_length = 1.0;
};

Trajectory run_sa(const Problem& problem, const StepSchedule& schedule, const NoiseModel& noise, Index n0,
                  const State& x_init, Index horizon, std::uint64_t seed, const RunOptions& options = {});

/// Re-derives every noise draw from the seed and checks that each recorded step reproduces
/// bit-for-bit. Returns the index of the first mismatch, or nullopt.
std::optional<Index> check_recursion(const Trajectory& traj, const Problem& problem, const NoiseModel& noise);

/// Fourth-order flow of x' = h(x) for `duration`.
State ode_flow(const Problem& problem, const State& x0, double duration, double dt);

/// Piecewise-linear x_bar(t) through (t(n), x_n).
State interpolate(const Trajectory& traj, double t);

struct BlockDiagnostics {
  std::vector<double> rho;
  std::vector<double> zeta_sup;
  std::vector<Index> tau_index;
};

/// rho_i = sup over block i of |x_bar(t) - x^{t(n_i)}(t)|, on a grid made of every iterate knot
/// plus dt-spaced fill. dt <= 0 selects min(1e-3, a(n_i)/10) per block. Blocks are recomputed
/// from traj.n0 with length T; a flow blow-up yields +inf for that block.
BlockDiagnostics block_deviations(const Trajectory& traj, const Problem& problem, double T, double dt = 0.0);

/// Martingale quantities of one block: zeta_{n_i+j} = sum_{m<j} a(n_i+m) M_{n_i+m+1}.
struct MartingaleDiagnostics {
  /// zeta[j] for j = 0 .. n_{i+1}-n_i.
  std::vector<State> zeta;
  /// First n_i + j with |zeta|_inf > delta/sqrt(d), capped at n_{i+1}.
  Index tau_index = 0;
  /// M_{n_i+m+1} with each coordinate clipped to [-v, v].
  std::vector<State> truncated;
};

double clip_increment(double value, double v);

MartingaleDiagnostics martingale_diagnostics(const Trajectory& traj, std::size_t block_index, double delta,
                                             double v);

/// Fills zeta_sup and tau_index of `diag` for every block of traj.blocks.
void attach_martingale_diagnostics(BlockDiagnostics& diag, const Trajectory& traj, double delta);

/// CSV dump: n, t, x_1..x_d, block (-1 past the last boundary).
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

}  // namespace salab

#endif  // SALAB_ENGINE_HPP
