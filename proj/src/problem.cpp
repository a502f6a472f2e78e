#include "salab/problem.hpp"

#include <algorithm>
#include <cmath>

namespace salab {

namespace {

void require_finite(const State& x)
{
  if (!x.allFinite()) throw ProblemError("state contains non-finite entries");
}

Box symmetric_box(int dim, double half_width)
{
  return Box{State::Constant(dim, -half_width), State::Constant(dim, half_width)};
}

double fd_step(const State& x) { return std::max(1e-4, 1e-4 * x.norm()); }

}  // namespace

bool Box::contains(const State& x) const
{
  return x.size() == lo.size() && (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
}

bool Box::nondegenerate() const
{
  return lo.size() > 0 && lo.size() == hi.size() && lo.allFinite() && hi.allFinite() &&
         (hi.array() > lo.array()).all();
}

State Box::sample(Rng& rng) const
{
  State x(lo.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.uniform(lo[i], hi[i]);
  return x;
}

Box Ball::bounding_box() const
{
  return Box{center.array() - radius, center.array() + radius};
}

bool region_contains(const Region& region, const State& x)
{
  return std::visit([&](const auto& r) { return r.contains(x); }, region);
}

Box bounding_box(const Region& region)
{
  if (const auto* box = std::get_if<Box>(&region)) return *box;
  return std::get<Ball>(region).bounding_box();
}

double Problem::target_distance(const State& x) const
{
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : targets) best = std::min(best, (x - p).norm());
  return best;
}

Problem linear_well(int dim)
{
  if (dim < 1) throw ProblemError("dimension must be >= 1");
  Problem p;
  p.name = "linear-well";
  p.dim = dim;
  p.drift = [](const State& x) -> State { return -x; };
  p.lyapunov = [](const State& x) { return x.squaredNorm(); };
  p.lyapunov_grad = [](const State& x) -> State { return 2.0 * x; };
  p.targets = {State::Zero(dim)};
  p.domain = symmetric_box(dim, 2.0);
  return p;
}

Problem double_well()
{
  Problem p;
  p.name = "double-well";
  p.dim = 1;
  p.drift = [](const State& x) -> State { return x.array() - x.array().cube(); };
  p.lyapunov = [](const State& x) { return (x.array() - 1.0).square().sum(); };
  p.lyapunov_grad = [](const State& x) -> State { return 2.0 * (x.array() - 1.0); };
  p.targets = {State::Ones(1)};
  p.domain = Box{State::Constant(1, 0.2), State::Constant(1, 1.8)};
  return p;
}

Problem contracting_spiral()
{
  Problem p;
  p.name = "spiral";
  p.dim = 2;
  p.drift = [](const State& x) -> State {
    State h(2);
    h << -x[0] - x[1], x[0] - x[1];
    return h;
  };
  p.lyapunov = [](const State& x) { return x.squaredNorm(); };
  p.lyapunov_grad = [](const State& x) -> State { return 2.0 * x; };
  p.targets = {State::Zero(2)};
  p.domain = symmetric_box(2, 2.0);
  return p;
}

Problem polynomial_drift_1d(std::vector<double> coeffs, double target, Box domain)
{
  if (coeffs.empty()) throw ProblemError("polynomial drift needs at least one coefficient");
  if (domain.dim() != 1 || !domain.nondegenerate()) throw ProblemError("1-d polynomial drift needs a 1-d box");
  Problem p;
  p.name = "poly-1d";
  p.dim = 1;
  p.drift = [c = std::move(coeffs)](const State& x) -> State {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x[0] + *it;
    return State::Constant(1, acc);
  };
  p.lyapunov = [target](const State& x) { return (x[0] - target) * (x[0] - target); };
  p.lyapunov_grad = [target](const State& x) -> State { return State::Constant(1, 2.0 * (x[0] - target)); };
  p.targets = {State::Constant(1, target)};
  p.domain = std::move(domain);
  return p;
}

Problem polynomial_drift_2d(std::vector<std::vector<std::vector<double>>> coeffs, State target,
                            Box domain)
{
  if (coeffs.size() != 2) throw ProblemError("2-d polynomial drift needs two coefficient grids");
  if (target.size() != 2) throw ProblemError("2-d polynomial drift needs a 2-d target");
  if (domain.dim() != 2 || !domain.nondegenerate()) throw ProblemError("2-d polynomial drift needs a 2-d box");
  Problem p;
  p.name = "poly-2d";
  p.dim = 2;
  p.drift = [c = std::move(coeffs)](const State& x) -> State {
    State h = State::Zero(2);
    for (int i = 0; i < 2; ++i) {
      double xp = 1.0;
      for (const auto& row : c[i]) {
        double xq = 1.0;
        for (double coef : row) {
          h[i] += coef * xp * xq;
          xq *= x[1];
        }
        xp *= x[0];
      }
    }
    return h;
  };
  p.lyapunov = [target](const State& x) { return (x - target).squaredNorm(); };
  p.lyapunov_grad = [target](const State& x) -> State { return 2.0 * (x - target); };
  p.targets = {target};
  p.domain = std::move(domain);
  return p;
}

Evaluation evaluate(const Problem& problem, const State& x)
{
  if (x.size() != problem.dim) throw ProblemError("state dimension does not match the problem");
  require_finite(x);
  Evaluation e;
  e.drift = problem.drift(x);
  e.V = problem.lyapunov(x);
  e.grad = problem.lyapunov_grad(x);
  e.dist = problem.target_distance(x);
  return e;
}

double distance_to_target(const Problem& problem, const State& x)
{
  require_finite(x);
  return problem.target_distance(x);
}

Eigen::MatrixXd finite_difference_hessian(const Problem& problem, const State& x)
{
  const double h = fd_step(x);
  const auto& V = problem.lyapunov;
  const Eigen::Index d = x.size();
  Eigen::MatrixXd H(d, d);
  const double v0 = V(x);
  for (Eigen::Index i = 0; i < d; ++i) {
    State e_i = State::Zero(d);
    e_i[i] = h;
    H(i, i) = (V(x + e_i) - 2.0 * v0 + V(x - e_i)) / (h * h);
    for (Eigen::Index j = i + 1; j < d; ++j) {
      State e_j = State::Zero(d);
      e_j[j] = h;
      H(i, j) = (V(x + e_i + e_j) - V(x + e_i - e_j) - V(x - e_i + e_j) + V(x - e_i - e_j)) / (4.0 * h * h);
      H(j, i) = H(i, j);
    }
  }
  return H;
}

State finite_difference_gradient(const Problem& problem, const State& x)
{
  const double h = fd_step(x);
  State g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    State e = State::Zero(x.size());
    e[i] = h;
    g[i] = (problem.lyapunov(x + e) - problem.lyapunov(x - e)) / (2.0 * h);
  }
  return g;
}

AssumptionAudit audit_assumptions(const Problem& problem, int sample_count, const Box& region,
                                  std::uint64_t rng_seed, const AuditThresholds& thresholds)
{
  if (sample_count < 2) throw ProblemError("audit needs at least two samples");
  if (!region.nondegenerate() || region.dim() != problem.dim)
    throw ProblemError("audit region is degenerate or has the wrong dimension");

  Rng rng(rng_seed);
  std::vector<State> xs;
  std::vector<State> hs;
  xs.reserve(sample_count);
  hs.reserve(sample_count);

  AssumptionAudit audit;
  audit.samples_used = sample_count;
  audit.drift_at_origin = problem.drift(State::Zero(problem.dim)).norm();

  for (int k = 0; k < sample_count; ++k) {
    State x = region.sample(rng);
    const State h = problem.drift(x);
    const double V = problem.lyapunov(x);

    audit.quadratic_growth_c = std::max(audit.quadratic_growth_c, x.squaredNorm() / (1.0 + V));
    if (problem.lyapunov_grad(x).dot(h) > thresholds.tol_descent) ++audit.descent_violations;
    const Eigen::MatrixXd H = finite_difference_hessian(problem, x);
    audit.hessian_bound_estimate = std::max(audit.hessian_bound_estimate, H.cwiseAbs().maxCoeff());

    xs.push_back(std::move(x));
    hs.push_back(h);
  }

  // All pairs up to ~2e6 of them, otherwise consecutive pairs of a random order.
  const std::size_t n = xs.size();
  if (n <= 2000) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double dx = (xs[i] - xs[j]).norm();
        if (dx > 0.0) audit.lipschitz_estimate = std::max(audit.lipschitz_estimate, (hs[i] - hs[j]).norm() / dx);
      }
  } else {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double dx = (xs[i] - xs[i + 1]).norm();
      if (dx > 0.0)
        audit.lipschitz_estimate = std::max(audit.lipschitz_estimate, (hs[i] - hs[i + 1]).norm() / dx);
    }
  }

  audit.pass_flags.lipschitz =
      std::isfinite(audit.lipschitz_estimate) && audit.lipschitz_estimate <= thresholds.lipschitz_max;
  audit.pass_flags.hessian =
      std::isfinite(audit.hessian_bound_estimate) && audit.hessian_bound_estimate <= thresholds.hessian_max;
  audit.pass_flags.quadratic_growth =
      std::isfinite(audit.quadratic_growth_c) && audit.quadratic_growth_c <= thresholds.growth_max;
  audit.pass_flags.descent = audit.descent_violations == 0;
  return audit;
}

}  // namespace salab
