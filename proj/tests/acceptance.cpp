// Runs the twelve acceptance criteria and prints one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "salab/analysis.hpp"
#include "salab/commands.hpp"

using namespace salab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

ExperimentConfig config(const std::string& name) { return load_config(std::string(SALAB_CONFIG_DIR) + "/" + name); }

std::string fmt(double v)
{
  std::ostringstream s;
  s << v;
  return s.str();
}

double median(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Shared between criteria 5 and 6.
std::optional<LockinCurve> g_lockin;

Outcome ode_order()
{
  const auto c = config("c01_ode_order.json");
  const Problem p = build_problem(c.problem);
  Rng rng(c.master_seed);
  const State x0 = build_init(*c.params.init, p.dim).sample(rng);
  const double exact = std::exp(-1.0);
  auto err = [&](double dt) { return std::abs(ode_flow(p, x0, 1.0, dt)[0] - exact); };
  const double e = err(*c.params.dt);
  // At dt = 1e-3 the error is already at round-off, so the order is read at coarser steps.
  bool order_ok = true;
  std::string ratios;
  for (double dt : {0.2, 0.1, 0.05}) {
    const double r = err(dt) / err(dt / 2.0);
    order_ok = order_ok && r >= 8.0 && r <= 32.0;
    ratios += fmt(r) + " ";
  }
  return {e <= 1e-8 && order_ok, "err(1e-3)=" + fmt(e) + " halving ratios " + ratios};
}

Outcome zero_noise()
{
  const auto c = config("c02_zero_noise.json");
  const Problem lw = build_problem(c.problem);
  const NoiseModel quiet = build_noise(c.noise);
  Rng rng(c.master_seed);
  const State x0 = build_init(*c.params.init, 1).sample(rng);

  const auto euler = run_sa(lw, build_schedule(c.schedule), quiet, 0, x0, *c.params.horizon, c.master_seed);
  const double e1 = std::abs(euler.states.back()[0] - 0.9) / 0.9;

  Problem flat = lw;
  flat.drift = [](const State& x) { return State::Zero(x.size()); };
  const auto still = run_sa(flat, StepSchedule::poly_log(0.75, 0.0), quiet, 0, x0, 1000, c.master_seed);
  double e2 = 0.0;
  for (const auto& x : still.states) e2 = std::max(e2, std::abs(x[0] - x0[0]));

  const auto prod = run_sa(lw, StepSchedule::poly_log(1.0, 0.0, 2), quiet, 0, x0, 2, c.master_seed);
  const double e3 = std::abs(prod.states[2][0] - 1.0 / 3.0) * 3.0;
  return {e1 <= 1e-12 && e2 == 0.0 && e3 <= 1e-12,
          "rel errors " + fmt(e1) + ", " + fmt(e2) + ", " + fmt(e3)};
}

EstimatorOptions run_options(const ExperimentConfig& c)
{
  EstimatorOptions o;
  o.T = c.params.T.value_or(1.0);
  o.per_block = c.params.per_block.value_or(8);
  o.jobs = c.parallelism;
  return o;
}

Outcome moment_bound()
{
  const auto c = config("c03_moment_bound.json");
  const Problem p = build_problem(c.problem);
  MomentBoundOptions mo;
  mo.run = run_options(c);
  const auto r = moment_bound_check(p, build_schedule(c.schedule), build_noise(c.noise), build_init(*c.params.init, p.dim),
                                    *c.params.horizon, *c.params.replicas, c.master_seed, mo);
  double worst = 0.0;
  for (std::size_t i = 0; i < r.curve.size(); ++i) worst = std::max(worst, r.curve[i] / r.envelope[i]);
  return {r.pass, "max curve/envelope " + fmt(worst) + ", envelope constant " + fmt(r.constants.composed)};
}

Outcome tightness()
{
  const auto c = config("c04_tightness.json");
  const Problem p = build_problem(c.problem);
  const auto s = build_schedule(c.schedule);
  const auto init = build_init(*c.params.init, p.dim);
  std::vector<double> radii = c.params.radius_grid;
  if (radii.empty()) radii = {0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0};
  const auto base = estimate_tightness(p, s, build_noise(c.noise), init, *c.params.horizon, *c.params.replicas,
                                       c.master_seed, radii, run_options(c));
  const auto ctrl = estimate_tightness(p, s, build_noise(*c.params.control_noise), init, *c.params.horizon,
                                       *c.params.replicas, c.master_seed, radii, run_options(c));
  const auto k = base.witness(0.01);
  if (!k) return {false, "no K with escape <= 0.01"};
  const auto i = static_cast<std::size_t>(std::find(radii.begin(), radii.end(), *k) - radii.begin());
  return {ctrl.sup_escape[i] > base.sup_escape[i],
          "K=" + fmt(*k) + " escape " + fmt(base.sup_escape[i]) + " vs pareto " + fmt(ctrl.sup_escape[i])};
}

Outcome lockin()
{
  const auto c = config("c05_lockin.json");
  const Problem p = build_problem(c.problem);
  LockinOptions lo;
  lo.run = run_options(c);
  lo.conv_tol = *c.params.conv_tol;
  lo.conv_window = *c.params.conv_window;
  g_lockin = estimate_lockin(p, build_schedule(c.schedule), build_noise(c.noise), c.params.n0_values,
                             build_init(*c.params.init, p.dim), *c.params.horizon_time, *c.params.replicas,
                             c.master_seed, lo);
  const auto& q = g_lockin->failure_rate;
  const bool mono = failure_rate_nonincreasing(*g_lockin);
  const bool strict = q.front() < 0.05 || q.back() < q.front();
  std::string qs;
  for (double v : q) qs += fmt(v) + " ";
  return {mono && strict, "q_hat " + qs};
}

Outcome bound_fit()
{
  LockinCurve synth;
  for (double b : {0.6, 0.3, 0.15, 0.08, 0.04, 0.02}) {
    const double q = 0.5 * std::exp(-2.0 * std::pow(b, -0.25));
    synth.n0_values.push_back(static_cast<Index>(synth.n0_values.size()));
    synth.b_values.push_back(b);
    synth.failure_rate.push_back(q);
    synth.confidence_intervals.push_back({q, q});
  }
  const auto f = fit_failure_curve(synth);
  const bool synth_ok = f.fitted && std::abs(f.slope + 2.0) <= 1e-9 && std::abs(f.intercept - std::log(0.5)) <= 1e-9 &&
                        f.r_squared >= 1.0 - 1e-9;
  if (!g_lockin) return {false, "criterion 5 produced no curve"};
  const auto e = fit_failure_curve(*g_lockin);
  return {synth_ok && e.fitted && e.fitted_points >= 3 && e.slope < 0.0,
          "synthetic slope " + fmt(f.slope) + " intercept " + fmt(f.intercept) + "; empirical slope " + fmt(e.slope) +
              " over " + std::to_string(e.fitted_points) + " points"};
}

Outcome rho_decay()
{
  const auto c = config("c07_rho_decay.json");
  const Problem p = build_problem(c.problem);
  const auto s = build_schedule(c.schedule);
  const auto init = build_init(*c.params.init, p.dim);
  const double T = *c.params.T;
  const Index lo = c.params.n0_values.at(0), hi = c.params.n0_values.at(1);
  const auto replicas = static_cast<std::size_t>(*c.params.replicas);

  auto max_rho = [&](const NoiseModel& noise, Index n0, std::size_t r) {
    const std::uint64_t seed = derive_replica_seed(c.master_seed, r);
    Rng init_rng(init_stream_seed(seed));
    const State x0 = init.sample(init_rng);
    const Index horizon = index_after_time(s, n0, *c.params.horizon_time);
    const auto traj = run_sa(p, s, noise, n0, x0, horizon, seed, RunOptions{T});
    const auto rho = block_deviations(traj, p, T).rho;
    if (rho.empty()) throw std::runtime_error("horizon_time shorter than one block");
    return *std::max_element(rho.begin(), rho.end());
  };

  NoiseModel quiet = build_noise(c.noise);
  quiet.scale = 0.0;
  std::vector<double> q_lo, q_hi;
  for (std::size_t r = 0; r < 51; ++r) {
    q_lo.push_back(max_rho(quiet, lo, r));
    q_hi.push_back(max_rho(quiet, hi, r));
  }
  const bool quiet_ok = median(q_hi) < median(q_lo);

  const NoiseModel noise = build_noise(c.noise);
  const auto pairs = run_replicas(replicas, c.parallelism, [&](std::size_t r) {
    return std::pair{max_rho(noise, lo, r), max_rho(noise, hi, r)};
  });
  std::int64_t wins = 0;
  for (const auto& [a, b] : pairs) wins += b < a;
  const double pv = sign_test_pvalue(wins, static_cast<std::int64_t>(replicas));
  return {quiet_ok && pv < 0.05, "zero-noise median " + fmt(median(q_lo)) + " -> " + fmt(median(q_hi)) + "; laplace " +
                                     std::to_string(wins) + "/" + std::to_string(replicas) + " pairs decrease, p=" +
                                     fmt(pv)};
}

Outcome step_ratio()
{
  bool ok = true;
  std::string detail;
  for (const char* tag : {"a", "b", "c", "d"}) {
    const auto c = config(std::string("c08_step_ratio_") + tag + ".json");
    const auto s = build_schedule(c.schedule);
    const double T = *c.params.T;
    const auto part = partition_blocks(s, *c.params.n0, T, *c.params.horizon);
    const double worst = block_ratio_stats(part, s);
    const double bound = std::exp(T + s.a_max()) + 0.1;
    ok = ok && worst <= bound;
    detail += "(" + fmt(s.alpha()) + "," + fmt(s.beta()) + "): " + fmt(worst) + "<=" + fmt(bound) + " ";
  }
  return {ok, detail};
}

Outcome tail_verifier()
{
  const auto c = config("c09_tail_verifier.json");
  std::vector<State> probes;
  for (const auto& v : c.params.probes) probes.push_back(Eigen::Map<const State>(v.data(), static_cast<Eigen::Index>(v.size())));
  const auto samples = *c.params.samples;
  NoiseModel lap = build_noise(c.noise);
  NoiseModel uni = lap, par = lap;
  uni.family = NoiseFamily::bounded_uniform;
  par.family = NoiseFamily::pareto;
  bool ok = true;
  double c2_lo = INFINITY, c2_hi = 0.0, r2_min = 1.0;
  for (std::uint64_t k = 0; k < 10; ++k) {
    const std::uint64_t seed = derive_replica_seed(c.master_seed, k);
    const auto l = verify_tail(lap, probes, c.params.v_grid, samples, seed);
    ok = ok && l.verdict == TailVerdict::pass && std::abs(l.C2_hat - 1.0) <= 0.2 && l.r_squared >= 0.95;
    c2_lo = std::min(c2_lo, l.C2_hat);
    c2_hi = std::max(c2_hi, l.C2_hat);
    r2_min = std::min(r2_min, l.r_squared);
    ok = ok && verify_tail(uni, probes, c.params.v_grid, samples, seed).verdict == TailVerdict::too_light;
    ok = ok && verify_tail(par, probes, c.params.v_grid, samples, seed).verdict == TailVerdict::fail;
  }
  return {ok, "laplace C2_hat in [" + fmt(c2_lo) + ", " + fmt(c2_hi) + "], min R^2 " + fmt(r2_min) +
                  "; uniform too-light and pareto fail on all 10 seeds"};
}

Outcome proof_devices()
{
  const auto c = config("c10_proof_devices.json");
  const bool azuma = azuma_bound(2.0, {1.0}) == 2.0 * std::exp(-2.0);

  // Full precondition grid: both arguments across the convex region of the exp-bound family.
  bool super = superadditivity_check([](double y) { return y * y; }, 1.0, 1.0, 3.0) &&
               superadditivity_check([](double y) { return y * y; }, 0.0, 1.0, 3.0);
  for (double k : {0.5, 1.0, 2.0}) {
    const ExpBoundFamily g{1.0, k, 1.0};
    const double lim = g.convex_limit();
    for (int i = 0; i <= 24; ++i)
      for (int j = 0; i + j <= 48; ++j)
        super = super && superadditivity_check(g, lim * i / 50.0, lim * j / 50.0, lim);
  }

  Trajectory t;
  t.schedule = StepSchedule::constant_for_testing(1.0);
  for (double m : {0.3, 0.5, 0.4}) t.noise.push_back(State::Constant(1, m));
  for (int k = 0; k < 4; ++k) {
    t.states.push_back(State::Zero(1));
    t.times.push_back(k);
  }
  t.blocks.boundaries = {0, 3};
  const auto md = martingale_diagnostics(t, 0, *c.params.delta, *c.params.v);
  const double expect[] = {0.0, 0.3, 0.8, 1.2};
  bool zeta = md.zeta.size() == 4 && md.tau_index == 3;
  for (int j = 0; zeta && j < 4; ++j) zeta = std::abs(md.zeta[j][0] - expect[j]) <= 1e-15;
  const bool clip = clip_increment(3.5, *c.params.v) == 2.0 && clip_increment(-3.5, *c.params.v) == -2.0 &&
                    clip_increment(1.0, *c.params.v) == 1.0;

  NoiseModel quiet;
  quiet.scale = 0.0;
  const auto z = run_sa(linear_well(1), StepSchedule::poly_log(0.75, 0.0), quiet, 0, State::Ones(1), 200, 1);
  const auto zm = martingale_diagnostics(z, 0, 0.1, 1.0);
  bool zero = zm.tau_index == z.blocks.boundaries[1];
  for (const auto& v : zm.zeta) zero = zero && v[0] == 0.0;

  return {azuma && super && zeta && clip && zero, std::string("azuma ") + (azuma ? "exact" : "off") +
                                                      ", superadditivity " + (super ? "ok" : "fail") + ", zeta/tau " +
                                                      (zeta ? "ok" : "fail") + ", clip " + (clip ? "ok" : "fail") +
                                                      ", zero-noise " + (zero ? "ok" : "fail")};
}

Outcome sample_complexity()
{
  const auto c = config("c11_sample_complexity.json");
  const Problem p = build_problem(c.problem);
  const auto s = build_schedule(c.schedule);
  const double eps = *c.params.epsilon, T = *c.params.T;
  SampleComplexityOptions so;
  so.run = run_options(c);
  so.Delta = compute_Delta(p, eps, T, so.grid_resolution, so.dt);
  const double delta = choose_delta_nbhd(p, eps, *so.Delta, so.grid_resolution);
  const auto init = build_init(*c.params.init, p.dim);
  const Index lo = c.params.n0_values.at(0), hi = c.params.n0_values.at(1);
  NoiseModel quiet = build_noise(c.noise);
  quiet.scale = 0.0;
  const auto z = estimate_sample_complexity(p, s, quiet, lo, eps, delta, T, 100, c.master_seed, *c.params.horizon_time,
                                            init, so);
  const NoiseModel noise = build_noise(c.noise);
  const auto a = estimate_sample_complexity(p, s, noise, lo, eps, delta, T, *c.params.replicas, c.master_seed,
                                            *c.params.horizon_time, init, so);
  const auto b = estimate_sample_complexity(p, s, noise, hi, eps, delta, T, *c.params.replicas, c.master_seed,
                                            *c.params.horizon_time, init, so);
  return {*so.Delta > 0.0 && z.trapped_fraction == 1.0 && b.trapped_fraction >= a.trapped_fraction &&
              b.trapped_fraction >= 0.95,
          "Delta=" + fmt(*so.Delta) + " delta=" + fmt(delta) + " gamma=" + fmt(a.gamma) + "; zero-noise " +
              fmt(z.trapped_fraction) + ", laplace " + fmt(a.trapped_fraction) + " -> " + fmt(b.trapped_fraction)};
}

Outcome determinism()
{
  const fs::path root = fs::temp_directory_path() / "salab-acceptance-determinism";
  fs::remove_all(root);
  std::string bytes[2];
  int k = 0;
  for (int jobs : {1, 8}) {
    RunOverrides o;
    o.jobs = jobs;
    o.output_dir = (root / ("jobs" + std::to_string(jobs))).string();
    const auto c = apply_overrides(config("c12_determinism.json"), o);
    run_command("lockin", c);
    std::ifstream in(fs::path(*o.output_dir) / "lockin.csv", std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    bytes[k++] = s.str();
  }
  return {!bytes[0].empty() && bytes[0] == bytes[1],
          std::to_string(bytes[0].size()) + " bytes, " + (bytes[0] == bytes[1] ? "identical" : "DIFFERENT")};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main()
{
  const Criterion criteria[] = {
      {1, "ODE integrator order", 1.0, ode_order},
      {2, "recursion and zero-noise exactness", 1.0, zero_noise},
      {3, "moment bound envelope", 120.0, moment_bound},
      {4, "tightness witness with pareto control", 180.0, tightness},
      {5, "lock-in monotonicity", 600.0, lockin},
      {6, "bound-shape fit", 1.0, bound_fit},
      {7, "rho decay", 120.0, rho_decay},
      {8, "step-ratio bound", 10.0, step_ratio},
      {9, "tail verifier", 60.0, tail_verifier},
      {10, "proof-device unit checks", 1.0, proof_devices},
      {11, "sample complexity", 600.0, sample_complexity},
      {12, "determinism across job counts", 60.0, determinism},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_seconds;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("%s  %2d  %-40s %8.2fs / %.0fs  %s%s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs, c.budget_seconds,
                o.detail.c_str(), in_time ? "" : " [over time budget]");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", 12 - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
