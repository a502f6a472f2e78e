#ifndef SALAB_STATS_HPP
#define SALAB_STATS_HPP

#include <cstdint>
#include <span>
#include <utility>

namespace salab {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// 1 - SS_res/SS_tot; defined as 0 when y is constant.
  double r_squared = 0.0;
};

/// Ordinary least squares y = intercept + slope * x. Needs >= 2 distinct x.
LineFit least_squares_line(std::span<const double> x, std::span<const double> y);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Wilson score interval for a binomial proportion; z = 1.959964 gives 95%.
Interval wilson_interval(std::int64_t successes, std::int64_t trials, double z = 1.959963984540054);

/// P[Binomial(n, 1/2) >= k], the one-sided sign-test p-value.
double sign_test_pvalue(std::int64_t k, std::int64_t n);

/// Running mean and sum of squared deviations, merged in a fixed order by callers.
struct MeanAccumulator {
  std::int64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v)
  {
    ++count;
    const double delta = v - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (v - mean);
  }

  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
  double standard_error() const;
};

}  // namespace salab

#endif  // SALAB_STATS_HPP
