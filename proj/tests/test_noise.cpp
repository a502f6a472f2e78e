#include <doctest.h>

#include <cmath>

#include "salab/noise.hpp"
#include "salab/stats.hpp"

using namespace salab;

namespace {

NoiseModel model(NoiseFamily f, double scale = 1.0, bool coupled = true)
{
  NoiseModel m;
  m.family = f;
  m.scale = scale;
  m.state_coupling = coupled;
  return m;
}

std::vector<double> grid(double lo, double hi, int n)
{
  std::vector<double> g;
  for (int k = 0; k < n; ++k) g.push_back(lo + (hi - lo) * k / (n - 1));
  return g;
}

const std::vector<State> kOrigin{State::Zero(1)};

}  // namespace

TEST_CASE("bounded-uniform support")
{
  Rng rng(1);
  const auto m = model(NoiseFamily::bounded_uniform);
  for (int k = 0; k < 100000; ++k) {
    const State s = sample(m, State::Zero(3), rng);
    CHECK(s.cwiseAbs().maxCoeff() <= 1.0);
  }
}

TEST_CASE("sample mean is centered for every family")
{
  for (auto f : {NoiseFamily::bounded_uniform, NoiseFamily::gaussian, NoiseFamily::laplace, NoiseFamily::pareto}) {
    Rng rng(2024);
    const auto m = model(f);
    MeanAccumulator acc;
    State s;
    for (int k = 0; k < 1000000; ++k) {
      sample_into(m, State::Zero(1), rng, s);
      acc.add(s[0]);
    }
    CHECK(std::abs(acc.mean) <= 4.0 * std::sqrt(acc.variance()) / 1e3);
  }
}

TEST_CASE("laplace variance is 2 b^2")
{
  for (double b : {0.5, 1.0, 3.0}) {
    Rng rng(77);
    const auto m = model(NoiseFamily::laplace, b);
    double sum = 0.0;
    for (int k = 0; k < 1000000; ++k) sum += std::pow(sample(m, State::Zero(1), rng)[0], 2);
    CHECK(sum / 1e6 == doctest::Approx(2.0 * b * b).epsilon(0.05));
  }
}

TEST_CASE("state coupling multiplies by 1 + |x|")
{
  const auto m = model(NoiseFamily::gaussian);
  State x(2);
  x << 3.0, 4.0;
  Rng r1(5), r2(5);
  const State a = sample(m, x, r1);
  const State b = sample(model(NoiseFamily::gaussian, 1.0, false), x, r2);
  CHECK(a.isApprox(6.0 * b));
}

TEST_CASE("tail verifier verdicts")
{
  const auto g = grid(2.0, 8.0, 13);
  const auto lap = verify_tail(model(NoiseFamily::laplace), kOrigin, g, 200000, 1);
  CHECK(lap.verdict == TailVerdict::pass);
  CHECK(lap.C2_hat == doctest::Approx(1.0).epsilon(0.2));
  CHECK(lap.r_squared >= 0.95);
  for (std::size_t i = 1; i < lap.exceedance_probs.size(); ++i)
    CHECK(lap.exceedance_probs[i] <= lap.exceedance_probs[i - 1]);

  const auto uni = verify_tail(model(NoiseFamily::bounded_uniform), kOrigin, g, 200000, 1);
  CHECK(uni.verdict == TailVerdict::too_light);
  CHECK(uni.passed());
  for (auto c : uni.exceedance_counts) CHECK(c == 0);

  const auto par = verify_tail(model(NoiseFamily::pareto), kOrigin, g, 200000, 1);
  CHECK(par.verdict == TailVerdict::fail);
  CHECK((par.r_squared < 0.9 || par.slope_ratio < kTailConvexityFloor));
}

TEST_CASE("second moment")
{
  CHECK(verify_second_moment(model(NoiseFamily::bounded_uniform), kOrigin, 200000, 3) ==
        doctest::Approx(1.0 / 3.0).epsilon(0.1));

  std::vector<State> probes;
  for (double r : {0.0, 0.5, 1.0, 2.0, 5.0}) probes.push_back(State::Constant(1, r));
  for (double sigma : {0.5, 2.0}) {
    const double c = verify_second_moment(model(NoiseFamily::gaussian, sigma), probes, 100000, 4);
    CHECK(c <= 2.0 * sigma * sigma * 1.05);
  }

  // Without coupling the ratio falls as |x| grows.
  double prev = INFINITY;
  for (double r : {0.0, 1.0, 2.0, 4.0}) {
    const double c = verify_second_moment(model(NoiseFamily::gaussian, 1.0, false), {State::Constant(1, r)}, 100000, 4);
    CHECK(c < prev);
    prev = c;
  }
}

TEST_CASE("validation and names")
{
  CHECK_THROWS_AS(model(NoiseFamily::gaussian, -1.0).validate(), NoiseError);
  auto p = model(NoiseFamily::pareto);
  p.pareto_shape = 2.0;
  CHECK_THROWS_AS(p.validate(), NoiseError);
  CHECK_THROWS_AS(model(NoiseFamily::pareto).validate(TailClass::sub_exponential), NoiseError);
  CHECK_NOTHROW(model(NoiseFamily::laplace).validate(TailClass::sub_exponential));
  CHECK_NOTHROW(model(NoiseFamily::gaussian, 0.0).validate());
  for (auto f : {NoiseFamily::bounded_uniform, NoiseFamily::gaussian, NoiseFamily::laplace, NoiseFamily::pareto})
    CHECK(parse_noise_family(to_string(f)) == f);
  CHECK_THROWS_AS(parse_noise_family("cauchy"), NoiseError);
}
