#include "salab/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

namespace salab {

using nlohmann::json;

namespace {

void require_object(const json& j, const std::string& where)
{
  if (!j.is_object()) throw ConfigError(where + " must be an object");
}

void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> allowed)
{
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where)
{
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <typename T>
void read(const json& j, const char* key, std::optional<T>& out, const std::string& where)
{
  if (!j.contains(key)) return;
  T value{};
  read(j, key, value, where);
  out = std::move(value);
}

template <typename T>
void write(json& j, const char* key, const std::optional<T>& value)
{
  if (value) j[key] = *value;
}

template <typename T>
void write(json& j, const char* key, const std::vector<T>& value)
{
  if (!value.empty()) j[key] = value;
}

ProblemSpec parse_problem(const json& j)
{
  require_object(j, "problem");
  reject_unknown(j, "problem", {"name", "dim", "coefficients", "coefficients_2d", "target", "domain"});
  ProblemSpec s;
  read(j, "name", s.name, "problem");
  read(j, "dim", s.dim, "problem");
  read(j, "coefficients", s.coefficients, "problem");
  read(j, "coefficients_2d", s.coefficients_2d, "problem");
  read(j, "target", s.target, "problem");
  if (j.contains("domain")) {
    const json& d = j.at("domain");
    require_object(d, "problem.domain");
    reject_unknown(d, "problem.domain", {"lo", "hi"});
    read(d, "lo", s.domain_lo, "problem.domain");
    read(d, "hi", s.domain_hi, "problem.domain");
  }
  return s;
}

json dump_problem(const ProblemSpec& s)
{
  json j;
  j["name"] = s.name;
  j["dim"] = s.dim;
  write(j, "coefficients", s.coefficients);
  write(j, "coefficients_2d", s.coefficients_2d);
  write(j, "target", s.target);
  if (!s.domain_lo.empty() || !s.domain_hi.empty()) j["domain"] = {{"lo", s.domain_lo}, {"hi", s.domain_hi}};
  return j;
}

ScheduleSpec parse_schedule(const json& j)
{
  require_object(j, "schedule");
  reject_unknown(j, "schedule", {"family", "alpha", "beta", "offset", "step"});
  ScheduleSpec s;
  read(j, "family", s.family, "schedule");
  read(j, "alpha", s.alpha, "schedule");
  read(j, "beta", s.beta, "schedule");
  read(j, "offset", s.offset, "schedule");
  read(j, "step", s.step, "schedule");
  return s;
}

json dump_schedule(const ScheduleSpec& s)
{
  return json{{"family", s.family}, {"alpha", s.alpha}, {"beta", s.beta}, {"offset", s.offset}, {"step", s.step}};
}

NoiseSpec parse_noise(const json& j, const std::string& where)
{
  require_object(j, where);
  reject_unknown(j, where, {"family", "scale", "state_coupling", "pareto_shape", "tail_class"});
  NoiseSpec s;
  read(j, "family", s.family, where);
  read(j, "scale", s.scale, where);
  read(j, "state_coupling", s.state_coupling, where);
  read(j, "pareto_shape", s.pareto_shape, where);
  read(j, "tail_class", s.tail_class, where);
  return s;
}

json dump_noise(const NoiseSpec& s)
{
  json j{{"family", s.family},
         {"scale", s.scale},
         {"state_coupling", s.state_coupling},
         {"pareto_shape", s.pareto_shape}};
  write(j, "tail_class", s.tail_class);
  return j;
}

InitSpec parse_init(const json& j, const std::string& where)
{
  require_object(j, where);
  reject_unknown(j, where, {"point", "box"});
  InitSpec s;
  read(j, "point", s.point, where);
  if (j.contains("box")) {
    const json& b = j.at("box");
    require_object(b, where + ".box");
    reject_unknown(b, where + ".box", {"lo", "hi"});
    read(b, "lo", s.box_lo, where + ".box");
    read(b, "hi", s.box_hi, where + ".box");
  }
  if (s.point.empty() == s.box_lo.empty()) throw ConfigError(where + " needs exactly one of 'point' or 'box'");
  return s;
}

json dump_init(const InitSpec& s)
{
  if (!s.point.empty()) return json{{"point", s.point}};
  return json{{"box", {{"lo", s.box_lo}, {"hi", s.box_hi}}}};
}

CommandParams parse_params(const json& j)
{
  require_object(j, "params");
  reject_unknown(j, "params",
                 {"n0", "n0_values", "T", "replicas", "horizon", "horizon_time", "epsilon", "delta", "v", "conv_tol",
                  "conv_window", "radius_grid", "init", "v_grid", "probes", "samples", "dt", "per_block",
                  "grid_resolution", "input_csv", "control_noise", "region"});
  CommandParams p;
  const std::string w = "params";
  read(j, "n0", p.n0, w);
  read(j, "n0_values", p.n0_values, w);
  read(j, "T", p.T, w);
  read(j, "replicas", p.replicas, w);
  read(j, "horizon", p.horizon, w);
  read(j, "horizon_time", p.horizon_time, w);
  read(j, "epsilon", p.epsilon, w);
  read(j, "delta", p.delta, w);
  read(j, "v", p.v, w);
  read(j, "conv_tol", p.conv_tol, w);
  read(j, "conv_window", p.conv_window, w);
  read(j, "radius_grid", p.radius_grid, w);
  if (j.contains("init")) p.init = parse_init(j.at("init"), "params.init");
  read(j, "v_grid", p.v_grid, w);
  read(j, "probes", p.probes, w);
  read(j, "samples", p.samples, w);
  read(j, "dt", p.dt, w);
  read(j, "per_block", p.per_block, w);
  read(j, "grid_resolution", p.grid_resolution, w);
  read(j, "input_csv", p.input_csv, w);
  if (j.contains("control_noise")) p.control_noise = parse_noise(j.at("control_noise"), "params.control_noise");
  if (j.contains("region")) p.region = parse_init(j.at("region"), "params.region");
  return p;
}

json dump_params(const CommandParams& p)
{
  json j = json::object();
  write(j, "n0", p.n0);
  write(j, "n0_values", p.n0_values);
  write(j, "T", p.T);
  write(j, "replicas", p.replicas);
  write(j, "horizon", p.horizon);
  write(j, "horizon_time", p.horizon_time);
  write(j, "epsilon", p.epsilon);
  write(j, "delta", p.delta);
  write(j, "v", p.v);
  write(j, "conv_tol", p.conv_tol);
  write(j, "conv_window", p.conv_window);
  write(j, "radius_grid", p.radius_grid);
  if (p.init) j["init"] = dump_init(*p.init);
  write(j, "v_grid", p.v_grid);
  write(j, "probes", p.probes);
  write(j, "samples", p.samples);
  write(j, "dt", p.dt);
  write(j, "per_block", p.per_block);
  write(j, "grid_resolution", p.grid_resolution);
  write(j, "input_csv", p.input_csv);
  if (p.control_noise) j["control_noise"] = dump_noise(*p.control_noise);
  if (p.region) j["region"] = dump_init(*p.region);
  return j;
}

State to_state(const std::vector<double>& v) { return Eigen::Map<const State>(v.data(), static_cast<Eigen::Index>(v.size())); }

}  // namespace

ExperimentConfig parse_config(const std::string& text)
{
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  require_object(j, "config");
  reject_unknown(j, "config", {"problem", "schedule", "noise", "params", "master_seed", "output_dir", "parallelism"});
  ExperimentConfig c;
  if (j.contains("problem")) c.problem = parse_problem(j.at("problem"));
  if (j.contains("schedule")) c.schedule = parse_schedule(j.at("schedule"));
  if (j.contains("noise")) c.noise = parse_noise(j.at("noise"), "noise");
  if (j.contains("params")) c.params = parse_params(j.at("params"));
  read(j, "master_seed", c.master_seed, "config");
  read(j, "output_dir", c.output_dir, "config");
  read(j, "parallelism", c.parallelism, "config");
  return c;
}

ExperimentConfig load_config(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string serialize_config(const ExperimentConfig& c)
{
  json j;
  j["problem"] = dump_problem(c.problem);
  j["schedule"] = dump_schedule(c.schedule);
  j["noise"] = dump_noise(c.noise);
  j["params"] = dump_params(c.params);
  j["master_seed"] = c.master_seed;
  j["output_dir"] = c.output_dir;
  j["parallelism"] = c.parallelism;
  return j.dump(2) + "\n";
}

Problem build_problem(const ProblemSpec& spec)
{
  try {
    if (spec.name == "linear-well") return linear_well(spec.dim);
    if (spec.name == "double-well") return double_well();
    if (spec.name == "spiral") return contracting_spiral();
    if (spec.name == "poly-1d") {
      if (spec.target.size() != 1) throw ConfigError("poly-1d needs a 1-element target");
      Box domain{to_state(spec.domain_lo), to_state(spec.domain_hi)};
      return polynomial_drift_1d(spec.coefficients, spec.target[0], domain);
    }
    if (spec.name == "poly-2d") {
      Box domain{to_state(spec.domain_lo), to_state(spec.domain_hi)};
      return polynomial_drift_2d(spec.coefficients_2d, to_state(spec.target), domain);
    }
  } catch (const ProblemError& e) {
    throw ConfigError(std::string("problem: ") + e.what());
  }
  throw ConfigError("unknown problem '" + spec.name + "'");
}

StepSchedule build_schedule(const ScheduleSpec& spec)
{
  try {
    if (spec.family == "poly-log") return StepSchedule::poly_log(spec.alpha, spec.beta, spec.offset);
    if (spec.family == "constant-test") return StepSchedule::constant_for_testing(spec.step);
  } catch (const ScheduleError& e) {
    throw ConfigError(std::string("schedule: ") + e.what());
  }
  throw ConfigError("unknown schedule family '" + spec.family + "'");
}

NoiseModel build_noise(const NoiseSpec& spec)
{
  try {
    NoiseModel m;
    m.family = parse_noise_family(spec.family);
    m.scale = spec.scale;
    m.state_coupling = spec.state_coupling;
    m.pareto_shape = spec.pareto_shape;
    std::optional<TailClass> declared;
    if (spec.tail_class) declared = parse_tail_class(*spec.tail_class);
    m.validate(declared);
    return m;
  } catch (const NoiseError& e) {
    throw ConfigError(std::string("noise: ") + e.what());
  }
}

InitLaw build_init(const InitSpec& spec, int dim)
{
  if (!spec.point.empty()) {
    if (static_cast<int>(spec.point.size()) != dim) throw ConfigError("init point has the wrong dimension");
    return InitLaw{to_state(spec.point)};
  }
  return InitLaw{build_box(spec, dim)};
}

Box build_box(const InitSpec& spec, int dim)
{
  if (static_cast<int>(spec.box_lo.size()) != dim || static_cast<int>(spec.box_hi.size()) != dim)
    throw ConfigError("box has the wrong dimension");
  Box b{to_state(spec.box_lo), to_state(spec.box_hi)};
  if (!b.nondegenerate()) throw ConfigError("box is degenerate");
  return b;
}

}  // namespace salab
