#include <doctest.h>

#include <cmath>

#include "salab/problem.hpp"

using namespace salab;

namespace {

State vec(std::initializer_list<double> v)
{
  State x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double c : v) x[i++] = c;
  return x;
}

Box box1(double lo, double hi) { return Box{vec({lo}), vec({hi})}; }

}  // namespace

TEST_CASE("evaluate closed forms")
{
  const auto lw = evaluate(linear_well(2), vec({1.0, 0.0}));
  CHECK(lw.drift.isApprox(vec({-1.0, 0.0})));
  CHECK(lw.V == 1.0);
  CHECK(lw.grad.isApprox(vec({2.0, 0.0})));
  CHECK(lw.dist == 1.0);

  const auto at1 = evaluate(double_well(), vec({1.0}));
  CHECK(at1.drift[0] == 0.0);
  CHECK(at1.V == 0.0);
  CHECK(at1.grad[0] == 0.0);
  CHECK(at1.dist == 0.0);

  const auto half = evaluate(double_well(), vec({0.5}));
  CHECK(half.drift[0] == doctest::Approx(0.375));
  CHECK(half.V == doctest::Approx(0.25));
  CHECK(half.grad[0] == doctest::Approx(-1.0));
  CHECK(half.dist == doctest::Approx(0.5));

  CHECK_THROWS_AS(evaluate(linear_well(2), vec({1.0})), ProblemError);
  CHECK_THROWS_AS(evaluate(linear_well(1), vec({std::nan("")})), ProblemError);
}

TEST_CASE("distance to target")
{
  CHECK(distance_to_target(linear_well(2), vec({3.0, 4.0})) == 5.0);
  CHECK(distance_to_target(double_well(), vec({1.0})) == 0.0);
  CHECK(distance_to_target(double_well(), vec({0.2})) == doctest::Approx(0.8));
}

TEST_CASE("audit of the linear well")
{
  const Box region{vec({-10.0, -10.0}), vec({10.0, 10.0})};
  for (std::uint64_t seed : {1u, 2u, 99u}) {
    const auto a = audit_assumptions(linear_well(2), 500, region, seed);
    CHECK(a.lipschitz_estimate <= 1.0 + 1e-9);
    CHECK(a.hessian_bound_estimate == doctest::Approx(2.0).epsilon(1e-4));
    CHECK(a.quadratic_growth_c <= 1.0);
    CHECK(a.descent_violations == 0);
    CHECK(a.drift_at_origin == 0.0);
  }
}

TEST_CASE("audit of the double well")
{
  // Descent holds on x >= 0.
  const auto pos = audit_assumptions(double_well(), 2000, box1(0.0, 3.0), 3);
  CHECK(pos.descent_violations == 0);

  // Dense-grid oracle for sup |h'| on [-3, 3].
  double sup = 0.0;
  for (int k = 0; k <= 60000; ++k) {
    const double x = -3.0 + 6.0 * k / 60000.0;
    sup = std::max(sup, std::abs(1.0 - 3.0 * x * x));
  }
  CHECK(sup == doctest::Approx(26.0));
  const auto full = audit_assumptions(double_well(), 2000, box1(-3.0, 3.0), 3);
  CHECK(full.lipschitz_estimate <= sup + 1e-9);
  CHECK(full.lipschitz_estimate >= 0.9 * sup);
  CHECK(full.descent_violations > 0);
}

TEST_CASE("audit thresholds set the pass flags")
{
  AuditThresholds t;
  t.lipschitz_max = 0.5;
  const auto a = audit_assumptions(linear_well(1), 200, box1(-1.0, 1.0), 5, t);
  CHECK_FALSE(a.pass_flags.lipschitz);
  CHECK(a.pass_flags.hessian);
  CHECK(a.pass_flags.descent);
}

TEST_CASE("property: finite-difference gradient agrees with the analytic one")
{
  Rng rng(17);
  for (const Problem& p : {linear_well(3), double_well(), contracting_spiral()}) {
    const Box b = bounding_box(p.domain);
    for (int k = 0; k < 100; ++k) {
      const State x = b.sample(rng);
      const State g = p.lyapunov_grad(x);
      CHECK((g - finite_difference_gradient(p, x)).norm() <= 1e-5 * std::max(1.0, g.norm()));
    }
  }
}

TEST_CASE("polynomial problems")
{
  // h(x) = 1 - x, target 1.
  const auto p = polynomial_drift_1d({1.0, -1.0}, 1.0, box1(-1.0, 3.0));
  CHECK(p.drift(vec({0.0}))[0] == 1.0);
  CHECK(p.lyapunov(vec({3.0})) == 4.0);
  CHECK(p.target_distance(vec({0.5})) == 0.5);

  // h = (-x1, -x2) via coefficient tables indexed [component][p][q].
  std::vector<std::vector<std::vector<double>>> c(2, std::vector<std::vector<double>>(2, std::vector<double>(2, 0.0)));
  c[0][1][0] = -1.0;
  c[1][0][1] = -1.0;
  const auto q = polynomial_drift_2d(c, vec({0.0, 0.0}), Box{vec({-1.0, -1.0}), vec({1.0, 1.0})});
  CHECK(q.drift(vec({0.5, -0.25})).isApprox(vec({-0.5, 0.25})));

  CHECK_THROWS_AS(polynomial_drift_1d({}, 0.0, box1(-1.0, 1.0)), ProblemError);
  CHECK_THROWS_AS(polynomial_drift_1d({1.0}, 0.0, box1(1.0, -1.0)), ProblemError);
}

TEST_CASE("regions")
{
  const Box b{vec({0.0, 0.0}), vec({1.0, 2.0})};
  CHECK(b.contains(vec({0.5, 1.5})));
  CHECK_FALSE(b.contains(vec({1.5, 1.5})));
  const Ball ball{vec({0.0, 0.0}), 1.0};
  CHECK(region_contains(ball, vec({0.5, 0.5})));
  CHECK_FALSE(region_contains(ball, vec({1.0, 0.5})));
  CHECK(bounding_box(ball).hi.isApprox(vec({1.0, 1.0})));
  Rng rng(3);
  for (int k = 0; k < 1000; ++k) CHECK(b.contains(b.sample(rng)));
}
