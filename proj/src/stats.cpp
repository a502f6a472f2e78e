#include "salab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace salab {

LineFit least_squares_line(std::span<const double> x, std::span<const double> y)
{
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("line fit needs >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("line fit needs distinct x values");

  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy > 0.0) {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - (fit.intercept + fit.slope * x[i]);
      ss_res += r * r;
    }
    fit.r_squared = 1.0 - ss_res / syy;
  }
  return fit;
}

Interval wilson_interval(std::int64_t successes, std::int64_t trials, double z)
{
  if (trials <= 0 || successes < 0 || successes > trials)
    throw std::invalid_argument("wilson_interval needs 0 <= successes <= trials, trials > 0");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  Interval ci{std::max(0.0, center - half), std::min(1.0, center + half)};
  // Guard the endpoints against round-off so the interval always contains p.
  if (successes == 0) ci.lo = 0.0;
  if (successes == trials) ci.hi = 1.0;
  return ci;
}

double sign_test_pvalue(std::int64_t k, std::int64_t n)
{
  if (n <= 0) return 1.0;
  // Sum binomial(n, j) / 2^n for j >= k, in log space.
  double total = 0.0;
  for (std::int64_t j = std::max<std::int64_t>(k, 0); j <= n; ++j) {
    const double log_term = std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(j) + 1.0) -
                            std::lgamma(static_cast<double>(n - j) + 1.0) - static_cast<double>(n) * std::log(2.0);
    total += std::exp(log_term);
  }
  return std::min(1.0, total);
}

double MeanAccumulator::standard_error() const
{
  return count > 1 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
}

}  // namespace salab
