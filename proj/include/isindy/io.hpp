#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "isindy/dynamics.hpp"
#include "isindy/identify.hpp"
#include "isindy/library.hpp"
#include "isindy/selection.hpp"
#include "isindy/sparse.hpp"

namespace isindy::io {

using Json = nlohmann::ordered_json;

/// 17 significant digits, enough to parse back to the same double.
std::string format_double(double v);

// Trajectory CSV: header t,x1,...,xn[,dx1,...,dxn], one row per sample.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
/// Derivative columns, when present, mark the trajectory as `derivative_source`.
Trajectory read_trajectory_csv(std::istream& is, TrajectorySource derivative_source = TrajectorySource::SimulatedExact);
Trajectory read_trajectory_csv(const std::filesystem::path& path,
                               TrajectorySource derivative_source = TrajectorySource::SimulatedExact);

/// All *.csv files of a directory in lexicographic order (manifest.json, if any, is ignored).
std::vector<std::filesystem::path> trajectory_files(const std::filesystem::path& dir);

Json to_json(const Polynomial& p);
Polynomial polynomial_from_json(const Json& j, std::size_t n_vars);

/// States are written in combined form: one numerator and one denominator each.
Json to_json(const OdeModel& model);
OdeModel model_from_json(const Json& j);

Json to_json(const LibrarySpec& spec);
LibrarySpec library_spec_from_json(const Json& j);

Json to_json(const LibraryTerm& term);
LibraryTerm library_term_from_json(const Json& j);

Json to_json(const SparseCoefficients& c);
Json sweep_to_json(const std::vector<SparseCoefficients>& sweep);
std::vector<SparseCoefficients> sweep_from_json(const Json& j);

// Pareto CSV: lambda,term_count,residual
void write_pareto_csv(std::ostream& os, const ParetoFront& front);
struct ParetoRow {
  double lambda;
  std::size_t term_count;
  double residual;
};
std::vector<ParetoRow> read_pareto_csv(std::istream& is);

Json to_json(const IdentifiedModel& model);
IdentifiedModel identified_model_from_json(const Json& j);

Json to_json(const ValidationReport& report);

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace isindy::io
