#ifndef SALAB_SCHEDULE_HPP
#define SALAB_SCHEDULE_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace salab {

using Index = std::int64_t;

class ScheduleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InsufficientHorizon : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Step sizes a(n) = 1 / ((n+offset)^alpha * log(n+offset)^beta).
///
/// Admissible members have alpha in (1/2, 1), or alpha = 1 with beta <= 0. A constant schedule
/// exists only for exact-arithmetic tests of the block logic; it violates square summability and
/// is rejected wherever that matters.
class StepSchedule {
 public:
  static StepSchedule poly_log(double alpha, double beta, int offset = 2);
  static StepSchedule constant_for_testing(double step);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  int offset() const { return offset_; }
  bool is_constant() const { return constant_; }

  /// sup_n a(n).
  double a_max() const { return a_max_; }

  /// First index from which a(n) is nonincreasing.
  Index monotone_from() const { return monotone_from_; }

  double step(Index n) const;

  /// t(n) = sum_{i<n} a(i), summed sequentially from i = 0.
  double elapsed_time(Index n) const;

  std::string describe() const;

  bool operator==(const StepSchedule&) const = default;

 private:
  StepSchedule() = default;

  double alpha_ = 1.0;
  double beta_ = 0.0;
  int offset_ = 2;
  bool constant_ = false;
  double constant_step_ = 0.0;
  double a_max_ = 0.0;
  Index monotone_from_ = 0;
};

/// b(n0) = sum_{m >= n0} a(m)^2, as the partial sum up to `cutoff` plus the tail integral taken from
/// half a step before the cutoff. Throws ScheduleError for schedules whose squares are not summable.
double tail_sum_squares(const StepSchedule& schedule, Index n0, Index cutoff);
double tail_sum_squares(const StepSchedule& schedule, Index n0);

struct BlockPartition {
  Index n0 = 0;
  double T = 0.0;
  /// n_0 < n_1 < ...; consecutive entries delimit one block [n_i, n_{i+1}).
  std::vector<Index> boundaries;

  std::size_t block_count() const { return boundaries.empty() ? 0 : boundaries.size() - 1; }
};

/// n_i = min{n : t(n) >= t(n_{i-1}) + T}, starting from n0 and stopping at `horizon`.
BlockPartition partition_blocks(const StepSchedule& schedule, Index n0, double T, Index horizon);

/// max a(n)/min a(n) within each block.
std::vector<double> block_ratios(const BlockPartition& partition, const StepSchedule& schedule);

/// Max over blocks of the within-block step ratio. Always >= 1.
double block_ratio_stats(const BlockPartition& partition, const StepSchedule& schedule);

/// Numerical reading of the step-size conditions over a finite horizon.
struct StepConditionReport {
  Index horizon = 0;
  bool positive = false;
  bool sum_diverges = false;      ///< dyadic increments of sum a(n) do not decay
  bool squares_converge = false;  ///< dyadic increments of sum a(n)^2 shrink geometrically
  bool nonincreasing = false;     ///< a(n) nonincreasing on [monotone_from, horizon]
  double sum_increment_ratio = 0.0;
  double square_increment_ratio = 0.0;

  bool all_pass() const { return positive && sum_diverges && squares_converge && nonincreasing; }
};

StepConditionReport check_step_conditions(const StepSchedule& schedule, Index horizon);

}  // namespace salab

#endif  // SALAB_SCHEDULE_HPP
