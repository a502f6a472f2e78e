#ifndef SALAB_CONFIG_HPP
#define SALAB_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "salab/montecarlo.hpp"
#include "salab/noise.hpp"
#include "salab/problem.hpp"
#include "salab/schedule.hpp"

namespace salab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProblemSpec {
  std::string name = "linear-well";
  int dim = 1;
  std::vector<double> coefficients;                                 ///< poly-1d
  std::vector<std::vector<std::vector<double>>> coefficients_2d;    ///< poly-2d
  std::vector<double> target;
  std::vector<double> domain_lo;
  std::vector<double> domain_hi;

  bool operator==(const ProblemSpec&) const = default;
};

struct ScheduleSpec {
  std::string family = "poly-log";
  double alpha = 1.0;
  double beta = 0.0;
  int offset = 2;
  double step = 0.1;  ///< constant-test only

  bool operator==(const ScheduleSpec&) const = default;
};

struct NoiseSpec {
  std::string family = "gaussian";
  double scale = 1.0;
  bool state_coupling = true;
  double pareto_shape = 2.5;
  std::optional<std::string> tail_class;

  bool operator==(const NoiseSpec&) const = default;
};

struct InitSpec {
  std::vector<double> point;
  std::vector<double> box_lo;
  std::vector<double> box_hi;

  bool operator==(const InitSpec&) const = default;
};

/// Command-specific parameters; each command reads the subset it needs.
struct CommandParams {
  std::optional<Index> n0;
  std::vector<Index> n0_values;
  std::optional<double> T;
  std::optional<std::int64_t> replicas;
  std::optional<Index> horizon;
  std::optional<double> horizon_time;
  std::optional<double> epsilon;
  std::optional<double> delta;
  std::optional<double> v;
  std::optional<double> conv_tol;
  std::optional<double> conv_window;
  std::vector<double> radius_grid;
  std::optional<InitSpec> init;
  std::vector<double> v_grid;
  std::vector<std::vector<double>> probes;
  std::optional<std::int64_t> samples;
  std::optional<double> dt;
  std::optional<int> per_block;
  std::optional<int> grid_resolution;
  std::optional<std::string> input_csv;
  std::optional<NoiseSpec> control_noise;
  std::optional<InitSpec> region;

  bool operator==(const CommandParams&) const = default;
};

struct ExperimentConfig {
  ProblemSpec problem;
  ScheduleSpec schedule;
  NoiseSpec noise;
  CommandParams params;
  std::uint64_t master_seed = 1;
  std::string output_dir;  ///< empty means $SALAB_OUT, else "out"
  int parallelism = 0;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses the JSON text of a config; unknown keys and type mismatches raise ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical JSON text (sorted keys, 2-space indent). parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

Problem build_problem(const ProblemSpec& spec);
StepSchedule build_schedule(const ScheduleSpec& spec);
NoiseModel build_noise(const NoiseSpec& spec);
InitLaw build_init(const InitSpec& spec, int dim);
Box build_box(const InitSpec& spec, int dim);

}  // namespace salab

#endif  // SALAB_CONFIG_HPP
