#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "isindy/benchmarks.hpp"
#include "isindy/differentiation.hpp"
#include "isindy/dynamics.hpp"
#include "isindy/identify.hpp"
#include "isindy/io.hpp"

namespace isindy::cli {

/// Environment variable naming the directory under which runs are written by default.
inline constexpr const char* kOutputRootEnv = "ISINDY_OUTPUT_ROOT";

struct ValidationSpec {
  std::size_t count = 3;
  std::uint64_t seed = 1000;
  double t1 = 10.0;
  Eigen::Index samples = 1000;
};

/// Everything a run needs. A benchmark name fills in its own defaults; a model
/// file replaces the benchmark system and requires explicit ics or ranges.
struct RunConfig {
  std::string benchmark = "michaelis_menten";
  std::string model_file;
  ParameterMap parameters;
  std::vector<std::vector<double>> explicit_ics;
  std::vector<StateRange> ic_ranges;
  std::size_t n_ics = 0;
  std::uint64_t seed = 0;
  double t0 = 0.0;
  double t1 = 10.0;
  Eigen::Index samples = 1000;
  IntegratorConfig integrator;
  DiffConfig differentiation;
  IdentifyConfig identification;
  ValidationSpec validation;
  unsigned workers = 1;
  std::string output_dir;
};

/// Defaults of a benchmark run (its profile, parameters and output location).
RunConfig default_run_config(std::string_view benchmark = "michaelis_menten");

io::Json to_json(const RunConfig& cfg);
/// Keys absent from `j` keep the defaults of the benchmark it names.
RunConfig run_config_from_json(const io::Json& j);
RunConfig load_run_config(const std::filesystem::path& path);

/// Checks ranges and grids, and that a referenced model file exists.
void validate_config(const RunConfig& cfg);

/// Resolved system to simulate or compare against.
OdeModel truth_model(const RunConfig& cfg);
std::vector<Eigen::VectorXd> training_ics(const RunConfig& cfg);

/// Stage outputs under cfg.output_dir.
std::filesystem::path data_dir(const RunConfig& cfg);
std::filesystem::path identify_dir(const RunConfig& cfg);
std::filesystem::path validate_dir(const RunConfig& cfg);
std::filesystem::path report_dir(const RunConfig& cfg);

/// Each returns the process exit code: 0 success, 1 identification-quality
/// failure, 2 usage or I/O error.
int cmd_simulate(const RunConfig& cfg);
int cmd_differentiate(const RunConfig& cfg, const std::filesystem::path& input, const std::filesystem::path& output);
int cmd_identify(const RunConfig& cfg, const std::optional<std::filesystem::path>& data = std::nullopt);
int cmd_validate(const RunConfig& cfg, const std::optional<std::filesystem::path>& model_file = std::nullopt);
int cmd_report(const std::filesystem::path& run_dir);
int cmd_count(unsigned n, unsigned d);

/// Parses arguments and dispatches to a subcommand.
int run(int argc, const char* const* argv);

}  // namespace isindy::cli
