#include "salab/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "salab/analysis.hpp"
#include "salab/engine.hpp"

namespace salab {

namespace fs = std::filesystem;

namespace {

class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir))
  {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw OutputError("cannot create output directory '" + dir_.string() + "'");
  }

  void write(const std::string& name, const std::string& content)
  {
    std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!out) throw OutputError("cannot write '" + (dir_ / name).string() + "'");
    out << content;
    if (!out) throw OutputError("write failed for '" + (dir_ / name).string() + "'");
    files_.push_back(name);
  }

  const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

/// Accumulates the plain-text report and the overall verdict.
class Report {
 public:
  explicit Report(const std::string& command) { out_ << "command: " << command << '\n'; }

  template <typename T>
  void line(const std::string& key, const T& value)
  {
    out_ << key << ": " << value << '\n';
  }

  void text(const std::string& s) { out_ << s; }

  void verdict(const std::string& name, bool pass)
  {
    out_ << "VERDICT " << name << ": " << (pass ? "PASS" : "FAIL") << '\n';
    all_pass_ = all_pass_ && pass;
  }

  bool all_pass() const { return all_pass_; }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
  bool all_pass_ = true;
};

std::ostringstream csv_stream()
{
  std::ostringstream s;
  s << std::setprecision(17);
  return s;
}

template <typename T>
T need(const std::optional<T>& value, const char* name)
{
  if (!value) throw ConfigError(std::string("params.") + name + " is required for this command");
  return *value;
}

InitLaw init_or_domain(const ExperimentConfig& c, const Problem& problem)
{
  if (c.params.init) return build_init(*c.params.init, problem.dim);
  return InitLaw{bounding_box(problem.domain)};
}

std::vector<Index> n0_list(const CommandParams& p)
{
  if (!p.n0_values.empty()) return p.n0_values;
  if (p.n0) return {*p.n0};
  throw ConfigError("params.n0_values (or params.n0) is required for this command");
}

void positive(double v, const char* name)
{
  if (!(v > 0.0)) throw ConfigError(std::string("params.") + name + " must be positive");
}

// ---------------------------------------------------------------------------------------------

void cmd_simulate(const ExperimentConfig& c, OutputSet& out, Report& rep)
{
  const Problem problem = build_problem(c.problem);
  const StepSchedule schedule = build_schedule(c.schedule);
  const NoiseModel noise = build_noise(c.noise);
  const Index n0 = c.params.n0.value_or(0);
  const Index horizon = c.params.horizon.value_or(n0 + 1000);
  if (horizon <= n0) throw ConfigError("params.horizon must exceed n0");
  const double T = c.params.T.value_or(1.0);
  positive(T, "T");

  Rng init_rng(init_stream_seed(c.master_seed));
  const State x0 = init_or_domain(c, problem).sample(init_rng);
  const Trajectory traj = run_sa(problem, schedule, noise, n0, x0, horizon, c.master_seed, RunOptions{T});

  auto csv = csv_stream();
  write_trajectory_csv(traj, csv);
  out.write("simulate.csv", csv.str());

  rep.line("problem", problem.name);
  rep.line("schedule", schedule.describe());
  rep.line("noise", noise.describe());
  rep.line("n0", n0);
  rep.line("last_index", traj.last_index());
  rep.line("diverged_at", traj.diverged_at ? std::to_string(*traj.diverged_at) : std::string("none"));
  rep.line("blocks", traj.blocks.block_count());
  rep.verdict("recursion-consistency", !check_recursion(traj, problem, noise).has_value());

  if (traj.blocks.block_count() > 0) {
    BlockDiagnostics diag = block_deviations(traj, problem, T, c.params.dt.value_or(0.0));
    attach_martingale_diagnostics(diag, traj, c.params.delta.value_or(0.1));
    std::ostringstream table;
    table << std::setprecision(10) << "block,n_start,rho,zeta_sup,tau_index\n";
    for (std::size_t i = 0; i < diag.rho.size(); ++i)
      table << i << ',' << traj.blocks.boundaries[i] << ',' << diag.rho[i] << ',' << diag.zeta_sup[i] << ','
            << diag.tau_index[i] << '\n';
    rep.text(table.str());
  }
  rep.verdict("no-divergence", !traj.diverged_at.has_value());
}

void cmd_audit(const ExperimentConfig& c, OutputSet& out, Report& rep)
{
  const Problem problem = build_problem(c.problem);
  const Box region = c.params.region ? build_box(*c.params.region, problem.dim) : bounding_box(problem.domain);
  const auto samples = static_cast<int>(c.params.samples.value_or(1000));
  const AssumptionAudit a = audit_assumptions(problem, samples, region, c.master_seed);

  // Gradient check against central differences at 100 random points of the region.
  Rng rng(derive_replica_seed(c.master_seed, 1));
  double worst_rel = 0.0;
  for (int k = 0; k < 100; ++k) {
    const State x = region.sample(rng);
    const State g = problem.lyapunov_grad(x);
    const State fd = finite_difference_gradient(problem, x);
    worst_rel = std::max(worst_rel, (g - fd).norm() / std::max(1.0, g.norm()));
  }

  auto csv = csv_stream();
  csv << "quantity,value,pass\n";
  csv << "lipschitz_estimate," << a.lipschitz_estimate << ',' << a.pass_flags.lipschitz << '\n';
  csv << "hessian_bound_estimate," << a.hessian_bound_estimate << ',' << a.pass_flags.hessian << '\n';
  csv << "quadratic_growth_c," << a.quadratic_growth_c << ',' << a.pass_flags.quadratic_growth << '\n';
  csv << "descent_violations," << a.descent_violations << ',' << a.pass_flags.descent << '\n';
  csv << "gradient_rel_error," << worst_rel << ',' << (worst_rel <= 1e-5) << '\n';
  csv << "samples_used," << a.samples_used << ",1\n";
  out.write("audit.csv", csv.str());

  rep.line("problem", problem.name);
  rep.line("samples", a.samples_used);
  rep.line("lipschitz_estimate", a.lipschitz_estimate);
  rep.line("hessian_bound_estimate", a.hessian_bound_estimate);
  rep.line("quadratic_growth_c", a.quadratic_growth_c);
  rep.line("descent_violations", a.descent_violations);
  rep.line("gradient_rel_error", worst_rel);
  rep.verdict("lipschitz", a.pass_flags.lipschitz);
  rep.verdict("hessian-bound", a.pass_flags.hessian);
  rep.verdict("quadratic-growth", a.pass_flags.quadratic_growth);
  rep.verdict("descent", a.pass_flags.descent);
  rep.verdict("gradient-check", worst_rel <= 1e-5);
}

void cmd_tightness(const ExperimentConfig& c, OutputSet& out, Report& rep)
{
  const Problem problem = build_problem(c.problem);
  const StepSchedule schedule = build_schedule(c.schedule);
  const NoiseModel noise = build_noise(c.noise);
  const Index horizon = c.params.horizon.value_or(10000);
  const std::int64_t replicas = c.params.replicas.value_or(1000);
  const InitLaw init = init_or_domain(c, problem);
  EstimatorOptions run;
  run.T = c.params.T.value_or(1.0);
  run.per_block = c.params.per_block.value_or(8);
  run.jobs = c.parallelism;
  std::vector<double> radii = c.params.radius_grid;
  if (radii.empty()) radii = {0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0};

  MomentBoundOptions mopts;
  mopts.run = run;
  if (c.params.region) mopts.audit_region = build_box(*c.params.region, problem.dim);
  const MomentBoundReport mb = moment_bound_check(problem, schedule, noise, init, horizon, replicas, c.master_seed, mopts);

  auto moment_csv = csv_stream();
  moment_csv << "n,one_plus_mean_V,std_error,envelope\n";
  for (std::size_t i = 0; i < mb.checkpoints.size(); ++i)
    moment_csv << mb.checkpoints[i] << ',' << mb.curve[i] << ',' << mb.std_error[i] << ',' << mb.envelope[i] << '\n';
  out.write("moment.csv", moment_csv.str());

  const TightnessResult tr = estimate_tightness(problem, schedule, noise, init, horizon, replicas, c.master_seed, radii, run);
  std::optional<TightnessResult> control;
  if (c.params.control_noise) {
    const NoiseModel control_noise = build_noise(*c.params.control_noise);
    control = estimate_tightness(problem, schedule, control_noise, init, horizon, replicas, c.master_seed, radii, run);
  }

  auto csv = csv_stream();
  csv << "K,sup_escape" << (control ? ",control_sup_escape" : "") << '\n';
  for (std::size_t i = 0; i < radii.size(); ++i) {
    csv << radii[i] << ',' << tr.sup_escape[i];
    if (control) csv << ',' << control->sup_escape[i];
    csv << '\n';
  }
  out.write("tightness.csv", csv.str());

  const auto& k = mb.constants;
  rep.line("problem", problem.name);
  rep.line("schedule", schedule.describe());
  rep.line("noise", noise.describe());
  rep.line("replicas", replicas);
  rep.line("horizon", horizon);
  rep.line("envelope_constant", k.composed);
  rep.line("  hessian_bound", k.hessian_bound);
  rep.line("  lipschitz", k.lipschitz);
  rep.line("  drift_at_origin", k.drift_at_origin);
  rep.line("  noise_second_moment", k.noise_second_moment);
  rep.line("  quadratic_growth", k.quadratic_growth);
  rep.line("moment_diverged_replicas", mb.diverged);
  rep.verdict("moment-bound", mb.pass);

  const auto witness = tr.witness(0.01);
  rep.line("tightness_witness_K", witness ? std::to_string(*witness) : std::string("none"));
  rep.verdict("tightness-witness", witness.has_value());
  if (control && witness) {
    const auto i = static_cast<std::size_t>(std::find(radii.begin(), radii.end(), *witness) - radii.begin());
    rep.line("control_noise", build_noise(*c.params.control_noise).describe());
    rep.line("control_escape_at_witness", control->sup_escape[i]);
    rep.verdict("control-escapes-more", control->sup_escape[i] > tr.sup_escape[i]);
  }
}

void write_lockin_csv(const LockinCurve& curve, OutputSet& out)
{
  auto csv = csv_stream();
  csv << "n0,b_n0,q_hat,ci_lo,ci_hi,successes,replicas\n";
  for (std::size_t i = 0; i < curve.n0_values.size(); ++i)
    csv << curve.n0_values[i] << ',' << curve.b_values[i] << ',' << curve.failure_rate[i] << ','
        << curve.confidence_intervals[i].lo << ',' << curve.confidence_intervals[i].hi << ','
        << curve.success_counts[i] << ',' << curve.replicas << '\n';
  out.write("lockin.csv", csv.str());
}

void report_fit(const BoundFit& fit, OutputSet& out, Report& rep)
{
  auto csv = csv_stream();
  csv << "fitted,slope,intercept,r_squared,fitted_points,censored_points,consistent_with_bound\n";
  csv << fit.fitted << ',' << fit.slope << ',' << fit.intercept << ',' << fit.r_squared << ',' << fit.fitted_points
      << ',' << fit.censored_points << ',' << fit.consistent_with_bound << '\n';
  out.write("fit.csv", csv.str());
  rep.line("fit_points", fit.fitted_points);
  rep.line("censored_points", fit.censored_points);
  if (!fit.fitted) {
    rep.line("fit", "censored (fewer than 3 points with q > 0)");
    return;
  }
  rep.line("fit_slope", fit.slope);
  rep.line("fit_intercept", fit.intercept);
  rep.line("fit_r_squared", fit.r_squared);
  rep.verdict("bound-shape-slope-negative", fit.consistent_with_bound);
}

void cmd_lockin(const ExperimentConfig& c, OutputSet& out, Report& rep)
{
  const Problem problem = build_problem(c.problem);
  const StepSchedule schedule = build_schedule(c.schedule);
  const NoiseModel noise = build_noise(c.noise);
  LockinOptions opts;
  opts.run.T = c.params.T.value_or(1.0);
  opts.run.per_block = c.params.per_block.value_or(8);
  opts.run.jobs = c.parallelism;
  opts.conv_tol = c.params.conv_tol.value_or(0.05);
  opts.conv_window = c.params.conv_window.value_or(0.1);
  const double horizon_time = c.params.horizon_time.value_or(20.0);
  const std::int64_t replicas = c.params.replicas.value_or(2000);

  const LockinCurve curve = estimate_lockin(problem, schedule, noise, n0_list(c.params), init_or_domain(c, problem),
                                            horizon_time, replicas, c.master_seed, opts);
  write_lockin_csv(curve, out);

  rep.line("problem", problem.name);
  rep.line("schedule", schedule.describe());
  rep.line("noise", noise.describe());
  rep.line("replicas", replicas);
  rep.line("horizon_time", horizon_time);
  rep.verdict("failure-rate-nonincreasing", failure_rate_nonincreasing(curve));
  report_fit(fit_failure_curve(curve), out, rep);
}

LockinCurve read_lockin_csv(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open lock-in CSV '" + path + "'");
  std::string header;
  std::getline(in, header);
  if (header.rfind("n0,b_n0,q_hat,ci_lo,ci_hi", 0) != 0) throw ConfigError("'" + path + "' is not a lock-in CSV");
  LockinCurve curve;
  std::string row;
  while (std::getline(in, row)) {
    if (row.empty()) continue;
    std::istringstream fields(row);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    if (cells.size() < 5) throw ConfigError("malformed lock-in CSV row: " + row);
    try {
      curve.n0_values.push_back(std::stoll(cells[0]));
      curve.b_values.push_back(std::stod(cells[1]));
      curve.failure_rate.push_back(std::stod(cells[2]));
      curve.confidence_intervals.push_back({std::stod(cells[3]), std::stod(cells[4])});
      if (cells.size() >= 7) {
        curve.success_counts.push_back(std::stoll(cells[5]));
        curve.replicas = std::stoll(cells[6]);
      }
    } catch (const std::exception&) {
      throw ConfigError("malformed lock-in CSV row: " + row);
    }
  }
  return curve;
}

void cmd_fit(const ExperimentConfig& c, OutputSet& out, Report& rep)
{
  const std::string path = need(c.params.input_csv, "input_csv");
  const LockinCurve curve = read_lockin_csv(path);
  rep.line("input", path);
  report_fit(fit_failure_curve(curve), out, rep);
}

void cmd_sample_complexity(const ExperimentConfig& c, OutputSet& out, Report& rep)
{
  const Problem problem = build_problem(c.problem);
  const StepSchedule schedule = build_schedule(c.schedule);
  const NoiseModel noise = build_noise(c.noise);
  const double epsilon = need(c.params.epsilon, "epsilon");
  const double T = c.params.T.value_or(1.0);
  const double horizon_time = need(c.params.horizon_time, "horizon_time");
  const std::int64_t replicas = c.params.replicas.value_or(500);
  SampleComplexityOptions opts;
  opts.run.jobs = c.parallelism;
  opts.grid_resolution = c.params.grid_resolution.value_or(problem.dim == 1 ? 801 : 101);
  opts.dt = c.params.dt.value_or(1e-3);
  opts.Delta = compute_Delta(problem, epsilon, T, opts.grid_resolution, opts.dt);
  const double delta = c.params.delta ? *c.params.delta : choose_delta_nbhd(problem, epsilon, *opts.Delta, opts.grid_resolution);

  auto csv = csv_stream();
  csv << "n0,epsilon,delta_nbhd,Delta,gamma,trapped_fraction,trapped,replicas\n";
  rep.line("problem", problem.name);
  rep.line("schedule", schedule.describe());
  rep.line("noise", noise.describe());
  for (const Index n0 : n0_list(c.params)) {
    const SampleComplexityResult r = estimate_sample_complexity(problem, schedule, noise, n0, epsilon, delta, T, replicas,
                                                                 c.master_seed, horizon_time,
                                                                 init_or_domain(c, problem), opts);
    csv << n0 << ',' << r.epsilon << ',' << r.delta_nbhd << ',' << r.Delta << ',' << r.gamma << ','
        << r.trapped_fraction << ',' << r.trapped << ',' << r.replicas << '\n';
    rep.line("n0=" + std::to_string(n0) + " trapped_fraction", r.trapped_fraction);
    if (n0 == n0_list(c.params).front()) {
      rep.line("Delta", r.Delta);
      rep.line("gamma", r.gamma);
      rep.line("delta_nbhd", r.delta_nbhd);
      rep.line("max_V_on_B", r.max_V);
    }
  }
  out.write("sample-complexity.csv", csv.str());
  rep.verdict("Delta-positive", *opts.Delta > 0.0);
}

void cmd_schedule_check(const ExperimentConfig& c, OutputSet& out, Report& rep)
{
  const StepSchedule schedule = build_schedule(c.schedule);
  const Index horizon = c.params.horizon.value_or(100000);
  const Index n0 = c.params.n0.value_or(1000);
  const double T = c.params.T.value_or(1.0);
  positive(T, "T");
  if (horizon <= n0) throw ConfigError("params.horizon must exceed n0");

  const StepConditionReport a2 = check_step_conditions(schedule, horizon);
  const BlockPartition part = partition_blocks(schedule, n0, T, horizon);
  const std::vector<double> ratios = block_ratios(part, schedule);
  const double bound = std::exp(T + schedule.a_max()) + 0.1;

  auto csv = csv_stream();
  csv << "block,n_start,n_end,ode_width,step_ratio,ratio_bound\n";
  bool widths_ok = true;
  double t = schedule.elapsed_time(n0);
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    double width = 0.0;
    for (Index n = part.boundaries[i]; n < part.boundaries[i + 1]; ++n) width += schedule.step(n);
    t += width;
    widths_ok = widths_ok && width >= T * (1.0 - 1e-12) && width <= T + schedule.a_max();
    csv << i << ',' << part.boundaries[i] << ',' << part.boundaries[i + 1] << ',' << width << ',' << ratios[i] << ','
        << bound << '\n';
  }
  out.write("schedule-check.csv", csv.str());

  const double worst = *std::max_element(ratios.begin(), ratios.end());
  rep.line("schedule", schedule.describe());
  rep.line("a_max", schedule.a_max());
  rep.line("horizon", horizon);
  rep.line("sum_increment_ratio", a2.sum_increment_ratio);
  rep.line("square_increment_ratio", a2.square_increment_ratio);
  rep.line("blocks", part.block_count());
  rep.line("max_block_ratio", worst);
  rep.line("ratio_bound", bound);
  if (!schedule.is_constant()) rep.line("b_n0", tail_sum_squares(schedule, n0));
  rep.verdict("A2-positive", a2.positive);
  rep.verdict("A2-sum-diverges", a2.sum_diverges);
  rep.verdict("A2-squares-converge", a2.squares_converge);
  rep.verdict("A2-nonincreasing", a2.nonincreasing);
  rep.verdict("block-widths", widths_ok);
  rep.verdict("block-ratio-bound", worst <= bound);
}

void cmd_noise_check(const ExperimentConfig& c, OutputSet& out, Report& rep)
{
  const NoiseModel noise = build_noise(c.noise);
  const int d = c.problem.dim > 0 ? c.problem.dim : 1;
  std::vector<State> probes;
  for (const auto& p : c.params.probes) {
    if (static_cast<int>(p.size()) != d) throw ConfigError("noise probe has the wrong dimension");
    probes.push_back(Eigen::Map<const State>(p.data(), d));
  }
  if (probes.empty()) {
    probes.push_back(State::Zero(d));
    for (double r : {1.0, 3.0}) {
      State p = State::Zero(d);
      p[0] = r;
      probes.push_back(p);
    }
  }
  std::vector<double> grid = c.params.v_grid;
  if (grid.empty())
    for (int k = 0; k <= 12; ++k) grid.push_back(2.0 + 0.5 * k);
  const std::int64_t samples = c.params.samples.value_or(100000);

  const TailFit tail = verify_tail(noise, probes, grid, samples, c.master_seed);
  const double c_hat = verify_second_moment(noise, probes, samples, derive_replica_seed(c.master_seed, 1));

  auto csv = csv_stream();
  csv << "v,exceedance_prob,exceedances\n";
  for (std::size_t i = 0; i < grid.size(); ++i)
    csv << grid[i] << ',' << tail.exceedance_probs[i] << ',' << tail.exceedance_counts[i] << '\n';
  out.write("noise-check.csv", csv.str());

  rep.line("noise", noise.describe());
  rep.line("tail_class", to_string(noise.tail_class()));
  rep.line("C1_hat", tail.C1_hat);
  rep.line("C2_hat", tail.C2_hat);
  rep.line("r_squared", tail.r_squared);
  rep.line("slope_ratio", tail.slope_ratio);
  rep.line("tail_verdict", to_string(tail.verdict));
  rep.line("second_moment_c_hat", c_hat);
  rep.verdict("exponential-tail", tail.passed());
  rep.verdict("second-moment-finite", std::isfinite(c_hat));
}

using CommandFn = void (*)(const ExperimentConfig&, OutputSet&, Report&);

CommandFn lookup(const std::string& command)
{
  if (command == "simulate") return cmd_simulate;
  if (command == "audit") return cmd_audit;
  if (command == "tightness") return cmd_tightness;
  if (command == "lockin") return cmd_lockin;
  if (command == "fit") return cmd_fit;
  if (command == "sample-complexity") return cmd_sample_complexity;
  if (command == "schedule-check") return cmd_schedule_check;
  if (command == "noise-check") return cmd_noise_check;
  throw UsageError("unknown command '" + command + "'");
}

}  // namespace

const std::vector<std::string>& command_names()
{
  static const std::vector<std::string> names{"simulate", "audit", "tightness", "lockin",
                                              "fit", "sample-complexity", "schedule-check", "noise-check"};
  return names;
}

std::string config_hash(const std::string& text)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

ExperimentConfig apply_overrides(ExperimentConfig config, const RunOverrides& overrides)
{
  if (overrides.seed) config.master_seed = *overrides.seed;
  if (overrides.jobs) config.parallelism = *overrides.jobs;
  if (overrides.output_dir) config.output_dir = *overrides.output_dir;
  if (config.output_dir.empty()) {
    const char* env = std::getenv(kOutputDirEnv);
    config.output_dir = (env != nullptr && *env != '\0') ? env : "out";
  }
  return config;
}

RunManifest run_command(const std::string& command, const ExperimentConfig& config)
{
  const CommandFn fn = lookup(command);
  const auto started = std::chrono::steady_clock::now();

  const std::string dir = config.output_dir.empty() ? std::string("out") : config.output_dir;
  OutputSet out{fs::path(dir)};
  const std::string serialized = serialize_config(config);

  Report rep(command);
  fn(config, out, rep);
  out.write("report.txt", rep.str());
  out.write("config.json", serialized);

  RunManifest m;
  m.command = command;
  m.config_hash = config_hash(serialized);
  m.output_dir = dir;
  m.files = out.files();
  m.files.push_back("manifest.txt");
  m.seed_rule = "replica seed = splitmix64(master_seed + (replica_index + 1) * 0x9E3779B97F4A7C15)";
  m.status = rep.all_pass() ? ExitCode::ok : ExitCode::verdict_failure;
  m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  std::ostringstream text;
  text << "version: " << m.version << '\n'
       << "command: " << m.command << '\n'
       << "config_hash: " << m.config_hash << " (fnv1a-64 of config.json)\n"
       << "master_seed: " << config.master_seed << '\n'
       << "parallelism: " << config.parallelism << '\n'
       << "seed_rule: " << m.seed_rule << '\n'
       << "wall_seconds: " << m.wall_seconds << '\n'
       << "status: " << static_cast<int>(m.status) << '\n'
       << "files:\n";
  for (const auto& f : m.files) text << "  " << f << '\n';
  out.write("manifest.txt", text.str());
  return m;
}

ExitCode exit_code_for(const std::exception& e)
{
  if (dynamic_cast<const UsageError*>(&e)) return ExitCode::usage;
  if (dynamic_cast<const OutputError*>(&e)) return ExitCode::io_error;
  if (dynamic_cast<const EstimatorError*>(&e) || dynamic_cast<const FlowDiverged*>(&e)) return ExitCode::divergence;
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const std::invalid_argument*>(&e) ||
      dynamic_cast<const std::domain_error*>(&e) || dynamic_cast<const InsufficientHorizon*>(&e))
    return ExitCode::config_error;
  return ExitCode::config_error;
}

}  // namespace salab
