#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "isindy/dynamics.hpp"

namespace isindy {

enum class Benchmark { MichaelisMenten, Regulatory, Glycolysis };

std::string_view to_string(Benchmark b) noexcept;
/// Accepts "michaelis_menten", "regulatory", "glycolysis"; throws UnknownBenchmark.
Benchmark parse_benchmark(std::string_view name);

using ParameterMap = std::map<std::string, double>;

ParameterMap default_parameters(Benchmark b);
std::vector<std::string> parameter_names(Benchmark b);

/// Builds the benchmark system written exactly as its rate laws. Every
/// parameter of the system must be present in `params` (MissingParameter).
OdeModel make_benchmark(Benchmark b, const ParameterMap& params);
OdeModel make_benchmark(std::string_view name, const ParameterMap& params);

enum class IdentificationMethod { Auto, Implicit, Explicit };

std::string_view to_string(IdentificationMethod m) noexcept;
IdentificationMethod parse_method(std::string_view name);

/// How one state is identified by default.
struct StatePlan {
  IdentificationMethod method = IdentificationMethod::Implicit;
  int degree = 4;
  /// Number of leading trajectories used for this state (0 = all).
  std::size_t max_trajectories = 0;
  /// Relative singular-value cutoff for the null space of this state's library.
  double rank_tol_rel = 1e-8;
};

/// Expanded coefficient map of a fitted state with the denominator constant
/// normalized to one, from which a named parameter is read back.
using ParameterFormula = std::function<double(const Fraction&)>;

struct ParameterCorrespondence {
  std::string name;
  std::size_t state_index;
  ParameterFormula formula;
};

struct StateRange {
  double lo;
  double hi;
};

/// Data-generation and identification defaults for a benchmark.
struct BenchmarkProfile {
  Benchmark benchmark;
  std::vector<Eigen::VectorXd> explicit_ics;  // used when non-empty
  std::vector<StateRange> ic_ranges;          // sampled uniformly otherwise
  std::size_t n_ics = 0;
  double t0 = 0.0;
  double t1 = 10.0;
  Eigen::Index samples = 1000;
  std::vector<StatePlan> plans;
  std::vector<ParameterCorrespondence> correspondences;
};

BenchmarkProfile benchmark_profile(Benchmark b);

/// Uniform draws from per-state ranges with a seeded generator.
std::vector<Eigen::VectorXd> sample_ics(const std::vector<StateRange>& ranges, std::size_t count, std::uint64_t seed);

/// The profile's explicit initial conditions first, then draws from its ranges
/// until `count` are available.
std::vector<Eigen::VectorXd> benchmark_ics(const BenchmarkProfile& profile, std::size_t count, std::uint64_t seed);

/// Reads named parameters back out of normalized per-state fractions. States
/// that are missing (std::nullopt) leave their parameters out of the result.
ParameterMap extract_parameters(const BenchmarkProfile& profile,
                                const std::vector<std::optional<Fraction>>& normalized_states);

}  // namespace isindy
