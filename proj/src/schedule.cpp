#include "salab/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace salab {

namespace {

constexpr Index kDefaultTailWindow = 200000;

double poly_log_value(double x, double alpha, double beta)
{
  double v = std::pow(x, -alpha);
  if (beta != 0.0) v *= std::pow(std::log(x), -beta);
  return v;
}

// Upper incomplete gamma for any real s, lifting s <= 0 by Gamma(s, x) = (Gamma(s+1, x) - x^s e^{-x}) / s.
double upper_gamma(double s, double x)
{
  if (s > 0.0) return boost::math::tgamma(s, x);
  if (s == 0.0) return boost::math::expint(1, x);
  return (upper_gamma(s + 1.0, x) - std::pow(x, s) * std::exp(-x)) / s;
}

// int_X^inf x^{-2 alpha} (log x)^{-2 beta} dx for X > 1, 2 alpha > 1. With u = log x this is
// Gamma(1 - 2 beta, k log X) / k^{1 - 2 beta}, k = 2 alpha - 1.
double remainder_integral(double X, double alpha, double beta)
{
  const double k = 2.0 * alpha - 1.0;
  if (beta == 0.0) return std::pow(X, -k) / k;
  const double s = 1.0 - 2.0 * beta;
  return upper_gamma(s, k * std::log(X)) / std::pow(k, s);
}

}  // namespace

StepSchedule StepSchedule::poly_log(double alpha, double beta, int offset)
{
  if (!std::isfinite(alpha) || !std::isfinite(beta))
    throw ScheduleError("schedule exponents must be finite");
  const bool family = (alpha > 0.5 && alpha < 1.0) || (alpha == 1.0 && beta <= 0.0);
  if (!family) {
    std::ostringstream msg;
    msg << "step schedule (alpha=" << alpha << ", beta=" << beta
        << ") is outside the admissible family: need alpha in (1/2,1), or alpha=1 with beta<=0";
    throw ScheduleError(msg.str());
  }
  if (offset < 1) throw ScheduleError("schedule offset must be >= 1");
  if (beta != 0.0 && offset < 2) throw ScheduleError("schedule offset must be >= 2 when beta != 0");

  StepSchedule s;
  s.alpha_ = alpha;
  s.beta_ = beta;
  s.offset_ = offset;

  // x^{-alpha} (log x)^{-beta} peaks at log x = -beta/alpha when beta < 0, else decreases for x > 1.
  double peak_x = 0.0;
  if (beta < 0.0) peak_x = std::exp(-beta / alpha);
  const Index last = std::max<Index>(0, static_cast<Index>(std::ceil(peak_x)) - offset + 1);
  Index argmax = 0;
  for (Index n = 0; n <= last; ++n) {
    const double a = s.step(n);
    if (a > s.a_max_) {
      s.a_max_ = a;
      argmax = n;
    }
  }
  s.monotone_from_ = argmax;
  return s;
}

StepSchedule StepSchedule::constant_for_testing(double step)
{
  if (!(step > 0.0) || !std::isfinite(step)) throw ScheduleError("constant step must be positive");
  StepSchedule s;
  s.constant_ = true;
  s.constant_step_ = step;
  s.alpha_ = 0.0;
  s.beta_ = 0.0;
  s.offset_ = 1;
  s.a_max_ = step;
  return s;
}

double StepSchedule::step(Index n) const
{
  if (constant_) return constant_step_;
  return poly_log_value(static_cast<double>(n + offset_), alpha_, beta_);
}

double StepSchedule::elapsed_time(Index n) const
{
  double t = 0.0;
  for (Index i = 0; i < n; ++i) t += step(i);
  return t;
}

std::string StepSchedule::describe() const
{
  std::ostringstream out;
  if (constant_)
    out << "constant(a=" << constant_step_ << ")";
  else
    out << "poly-log(alpha=" << alpha_ << ", beta=" << beta_ << ", offset=" << offset_ << ")";
  return out.str();
}

double tail_sum_squares(const StepSchedule& schedule, Index n0, Index cutoff)
{
  if (schedule.is_constant())
    throw ScheduleError("tail sum of squared steps diverges for a constant schedule");
  if (schedule.alpha() <= 0.5) throw ScheduleError("tail sum of squared steps diverges for alpha <= 1/2");
  if (n0 < 0) throw ScheduleError("n0 must be nonnegative");
  if (cutoff <= n0) throw ScheduleError("tail_sum_squares requires cutoff > n0");
  // The integral approximation needs a nonincreasing summand past the cutoff.
  cutoff = std::max(cutoff, schedule.monotone_from());

  double partial = 0.0;
  for (Index m = n0; m <= cutoff; ++m) {
    const double a = schedule.step(m);
    partial += a * a;
  }
  // The rest, sum over k > cutoff + offset of k^{-2 alpha} (log k)^{-2 beta}, by the integral
  // from half a step earlier.
  const double X = static_cast<double>(cutoff + schedule.offset()) + 0.5;
  return partial + remainder_integral(X, schedule.alpha(), schedule.beta());
}

double tail_sum_squares(const StepSchedule& schedule, Index n0)
{
  return tail_sum_squares(schedule, n0, n0 + kDefaultTailWindow);
}

BlockPartition partition_blocks(const StepSchedule& schedule, Index n0, double T, Index horizon)
{
  if (!(T > 0.0)) throw ScheduleError("block length T must be positive");
  if (horizon <= n0) throw ScheduleError("partition_blocks requires horizon > n0");

  BlockPartition part;
  part.n0 = n0;
  part.T = T;
  part.boundaries.push_back(n0);

  double t = schedule.elapsed_time(n0);
  double block_start = t;
  for (Index n = n0; n < horizon; ++n) {
    t += schedule.step(n);
    if (t >= block_start + T) {
      part.boundaries.push_back(n + 1);
      block_start = t;
    }
  }
  if (part.boundaries.size() < 2) {
    std::ostringstream msg;
    msg << "insufficient horizon: no complete block of length " << T << " fits in [" << n0 << ", "
        << horizon << "]";
    throw InsufficientHorizon(msg.str());
  }
  return part;
}

std::vector<double> block_ratios(const BlockPartition& partition, const StepSchedule& schedule)
{
  std::vector<double> ratios;
  ratios.reserve(partition.block_count());
  for (std::size_t i = 0; i + 1 < partition.boundaries.size(); ++i) {
    double hi = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    for (Index n = partition.boundaries[i]; n < partition.boundaries[i + 1]; ++n) {
      const double a = schedule.step(n);
      hi = std::max(hi, a);
      lo = std::min(lo, a);
    }
    ratios.push_back(hi / lo);
  }
  return ratios;
}

double block_ratio_stats(const BlockPartition& partition, const StepSchedule& schedule)
{
  if (partition.block_count() == 0) throw ScheduleError("block_ratio_stats needs a nonempty partition");
  const auto ratios = block_ratios(partition, schedule);
  return *std::max_element(ratios.begin(), ratios.end());
}

StepConditionReport check_step_conditions(const StepSchedule& schedule, Index horizon)
{
  if (horizon < 8) throw ScheduleError("step-condition check needs horizon >= 8");
  StepConditionReport rep;
  rep.horizon = horizon;
  rep.positive = true;
  rep.nonincreasing = true;

  const Index q = horizon / 4;
  const Index h = horizon / 2;
  double sum_lo = 0.0, sum_hi = 0.0, sq_lo = 0.0, sq_hi = 0.0;
  double prev = schedule.step(0);
  for (Index n = 0; n < horizon; ++n) {
    const double a = schedule.step(n);
    if (!(a > 0.0) || !std::isfinite(a)) rep.positive = false;
    if (n > schedule.monotone_from() && a > prev) rep.nonincreasing = false;
    prev = a;
    if (n >= q && n < h) {
      sum_lo += a;
      sq_lo += a * a;
    } else if (n >= h) {
      sum_hi += a;
      sq_hi += a * a;
    }
  }
  // Divergent series with slowly varying terms have comparable dyadic increments; square-summable
  // ones shrink by roughly 2^{1-2 alpha} per dyadic block.
  rep.sum_increment_ratio = sum_hi / sum_lo;
  rep.square_increment_ratio = sq_hi / sq_lo;
  rep.sum_diverges = rep.sum_increment_ratio >= 0.9;
  rep.squares_converge = rep.square_increment_ratio <= 0.98;
  return rep;
}

}  // namespace salab
