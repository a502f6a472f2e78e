#ifndef SALAB_NOISE_HPP
#define SALAB_NOISE_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "salab/problem.hpp"
#include "salab/rng.hpp"

namespace salab {

enum class NoiseFamily { bounded_uniform, gaussian, laplace, pareto };
enum class TailClass { bounded, sub_exponential, heavy };

std::string to_string(NoiseFamily family);
std::string to_string(TailClass tail);
NoiseFamily parse_noise_family(const std::string& name);
TailClass parse_tail_class(const std::string& name);

class NoiseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Martingale-difference noise M = s(x) * scale * xi, with xi i.i.d. per coordinate from a
/// symmetric base law and s(x) = 1 + |x| when state coupling is on (1 otherwise).
///
/// Base laws: uniform on [-1, 1]; standard normal; standard Laplace (density e^{-|v|}/2);
/// symmetric Pareto with |xi| = U^{-1/shape} >= 1.
struct NoiseModel {
  NoiseFamily family = NoiseFamily::gaussian;
  double scale = 1.0;
  bool state_coupling = true;
  double pareto_shape = 2.5;

  TailClass tail_class() const;

  /// Checks scale, shape, and (when given) the declared tail class against the family.
  void validate(std::optional<TailClass> declared = std::nullopt) const;

  std::string describe() const;

  bool operator==(const NoiseModel&) const = default;
};

/// Draws xi into `out` (resized to d) and scales it. Consumes the same words regardless of x.
void sample_into(const NoiseModel& model, const State& x, Rng& rng, State& out);

State sample(const NoiseModel& model, const State& x, Rng& rng);

enum class TailVerdict { pass, fail, too_light };

std::string to_string(TailVerdict verdict);

struct TailFit {
  double C1_hat = 0.0;
  double C2_hat = 0.0;
  double r_squared = 0.0;
  /// Ratio of the fitted log-tail slope on the upper half of the usable grid to the lower half.
  /// Near 1 for exponential tails, well below 1 for convex (polynomial) log-tails.
  double slope_ratio = 1.0;
  std::vector<double> v_grid;
  std::vector<double> exceedance_probs;
  std::vector<std::int64_t> exceedance_counts;
  int points_used = 0;
  TailVerdict verdict = TailVerdict::fail;

  bool passed() const { return verdict != TailVerdict::fail; }
};

/// Minimum exceedance count for a grid point to enter the tail fit.
inline constexpr std::int64_t kMinTailExceedances = 10;
/// Slope-ratio floor below which the log-tail is judged visibly convex.
inline constexpr double kTailConvexityFloor = 0.7;

/// Estimates P[|M|/(1+|x|) > v] over the probes, fits log p = log C1 - C2 v.
TailFit verify_tail(const NoiseModel& model, const std::vector<State>& x_probe,
                    const std::vector<double>& v_grid, std::int64_t samples_per_point,
                    std::uint64_t rng_seed);

/// max over probes of E[|M|^2 | x] / (1 + |x|^2), by Monte Carlo.
double verify_second_moment(const NoiseModel& model, const std::vector<State>& x_probe,
                            std::int64_t samples_per_point, std::uint64_t rng_seed);

}  // namespace salab

#endif  // SALAB_NOISE_HPP
