#include "isindy/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "isindy/error.hpp"

namespace isindy::io {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

double parse_double(const std::string& text, std::size_t line) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw Error(ErrorKind::Schema, "line " + std::to_string(line) + ": cannot parse number '" + t + "'");
  }
  return v;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  return out;
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::Schema, std::string("missing field '") + key + "'");
  return j.at(key);
}

template <class T>
T get(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Schema, std::string("field '") + key + "': " + e.what());
  }
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const Eigen::Index n = traj.n_states();
  os << 't';
  for (Eigen::Index j = 0; j < n; ++j) os << ",x" << j + 1;
  if (traj.derivs) {
    for (Eigen::Index j = 0; j < n; ++j) os << ",dx" << j + 1;
  }
  os << '\n';
  for (Eigen::Index i = 0; i < traj.samples(); ++i) {
    os << format_double(traj.times[i]);
    for (Eigen::Index j = 0; j < n; ++j) os << ',' << format_double(traj.states(i, j));
    if (traj.derivs) {
      for (Eigen::Index j = 0; j < n; ++j) os << ',' << format_double((*traj.derivs)(i, j));
    }
    os << '\n';
  }
}

void write_trajectory_csv(const fs::path& path, const Trajectory& traj) {
  auto out = open_out(path);
  write_trajectory_csv(out, traj);
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

Trajectory read_trajectory_csv(std::istream& is, TrajectorySource derivative_source) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorKind::Schema, "trajectory CSV is empty");
  std::vector<std::string> header = split(trim(line), ',');
  for (auto& h : header) h = trim(h);
  if (header.size() < 2 || header[0] != "t") {
    throw Error(ErrorKind::Schema, "trajectory CSV header must start with 't' followed by state columns");
  }
  const std::size_t cols = header.size() - 1;
  bool with_derivs = cols % 2 == 0;
  for (std::size_t i = 0; with_derivs && i < cols / 2; ++i) {
    with_derivs = header[1 + cols / 2 + i] == "d" + header[1 + i];
  }
  const std::size_t n = with_derivs ? cols / 2 : cols;

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) {
      throw Error(ErrorKind::Schema, "line " + std::to_string(line_no) + ": expected " +
                                         std::to_string(header.size()) + " columns, found " +
                                         std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_double(c, line_no));
    rows.push_back(std::move(row));
  }

  Trajectory traj;
  const auto m = static_cast<Eigen::Index>(rows.size());
  const auto ni = static_cast<Eigen::Index>(n);
  traj.times.resize(m);
  traj.states.resize(m, ni);
  if (with_derivs) traj.derivs = Eigen::MatrixXd(m, ni);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    traj.times[i] = r[0];
    for (Eigen::Index j = 0; j < ni; ++j) {
      traj.states(i, j) = r[static_cast<std::size_t>(1 + j)];
      if (with_derivs) (*traj.derivs)(i, j) = r[static_cast<std::size_t>(1 + ni + j)];
    }
  }
  traj.source = with_derivs ? derivative_source : TrajectorySource::Measured;
  traj.validate();
  return traj;
}

Trajectory read_trajectory_csv(const fs::path& path, TrajectorySource derivative_source) {
  auto in = open_in(path);
  try {
    return read_trajectory_csv(in, derivative_source);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::vector<fs::path> trajectory_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorKind::Io, "data directory " + dir.string() + " does not exist");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

Json to_json(const Polynomial& p) {
  Json terms = Json::array();
  for (const auto& [e, c] : p.terms()) terms.push_back(Json{{"exponents", e}, {"coeff", c}});
  return terms;
}

Polynomial polynomial_from_json(const Json& j, std::size_t n_vars) {
  if (!j.is_array()) throw Error(ErrorKind::Schema, "term list must be an array");
  Polynomial p(n_vars);
  for (const auto& t : j) {
    const auto e = get<Exponents>(t, "exponents");
    if (e.size() != n_vars) throw Error(ErrorKind::Schema, "exponent vector length differs from state count");
    p.add_term(e, get<double>(t, "coeff"));
  }
  return p;
}

Json to_json(const OdeModel& model) {
  Json states = Json::array();
  for (const auto& rhs : model.rhs) {
    const Fraction f = rhs.combined();
    states.push_back(Json{{"numerator", to_json(f.numerator)}, {"denominator", to_json(f.denominator)}});
  }
  Json names = Json::array();
  for (std::size_t k = 0; k < model.n_states; ++k) names.push_back(model.state_name(k));
  return Json{{"n_states", model.n_states}, {"state_names", names}, {"parameters", model.params}, {"states", states}};
}

OdeModel model_from_json(const Json& j) {
  OdeModel m;
  m.n_states = get<std::size_t>(j, "n_states");
  if (j.contains("state_names")) m.state_names = get<std::vector<std::string>>(j, "state_names");
  if (j.contains("parameters")) m.params = get<std::map<std::string, double>>(j, "parameters");
  const Json& states = field(j, "states");
  if (!states.is_array() || states.size() != m.n_states) {
    throw Error(ErrorKind::Schema, "'states' must list one entry per state");
  }
  for (const auto& s : states) {
    m.rhs.push_back(StateRhs{{Fraction{polynomial_from_json(field(s, "numerator"), m.n_states),
                                       polynomial_from_json(field(s, "denominator"), m.n_states)}}});
  }
  m.validate();
  return m;
}

Json to_json(const LibrarySpec& spec) {
  return Json{{"mode", to_string(spec.mode)},  {"d_num", spec.d_num},
              {"d_den", spec.d_den},           {"deriv_index", spec.deriv_index},
              {"include_trig", spec.include_trig}, {"frequencies", spec.frequencies},
              {"d_deriv", spec.d_deriv}};
}

LibrarySpec library_spec_from_json(const Json& j) {
  LibrarySpec s;
  s.mode = parse_library_mode(get<std::string>(j, "mode"));
  s.d_num = get<int>(j, "d_num");
  s.d_den = j.contains("d_den") ? get<int>(j, "d_den") : s.d_num;
  if (j.contains("deriv_index")) s.deriv_index = get<std::size_t>(j, "deriv_index");
  if (j.contains("include_trig")) s.include_trig = get<bool>(j, "include_trig");
  if (j.contains("frequencies")) s.frequencies = get<std::vector<double>>(j, "frequencies");
  if (j.contains("d_deriv")) s.d_deriv = get<int>(j, "d_deriv");
  if (s.d_num < 0 || s.d_den < 0 || s.d_deriv < 0) throw Error(ErrorKind::Schema, "library degrees must be nonnegative");
  return s;
}

Json to_json(const LibraryTerm& term) {
  Json j{{"exponents", term.monomial.exponents}, {"deriv_power", term.deriv_power}, {"deriv_index", term.deriv_index}};
  if (term.trig) {
    j["trig"] = Json{{"kind", term.trig->kind == TrigKind::Sin ? "sin" : "cos"},
                     {"state", term.trig->state},
                     {"frequency", term.trig->frequency}};
  }
  return j;
}

LibraryTerm library_term_from_json(const Json& j) {
  LibraryTerm t;
  t.monomial.exponents = get<Exponents>(j, "exponents");
  t.deriv_power = get<int>(j, "deriv_power");
  t.deriv_index = get<std::size_t>(j, "deriv_index");
  if (j.contains("trig")) {
    const Json& g = j.at("trig");
    const auto kind = get<std::string>(g, "kind");
    if (kind != "sin" && kind != "cos") throw Error(ErrorKind::Schema, "trig kind must be 'sin' or 'cos'");
    t.trig = TrigFactor{kind == "sin" ? TrigKind::Sin : TrigKind::Cos, get<std::size_t>(g, "state"),
                        get<double>(g, "frequency")};
  }
  return t;
}

Json to_json(const SparseCoefficients& c) {
  Json j{{"lambda", c.lambda},
         {"term_count", c.term_count},
         {"residual", finite_or_null(c.residual)},
         {"xi", std::vector<double>(c.xi.data(), c.xi.data() + c.xi.size())},
         {"converged", c.converged}};
  if (c.error) j["error"] = std::string(to_string(*c.error));
  if (!c.warnings.empty()) j["warnings"] = c.warnings;
  return j;
}

Json sweep_to_json(const std::vector<SparseCoefficients>& sweep) {
  Json arr = Json::array();
  for (const auto& c : sweep) arr.push_back(to_json(c));
  return arr;
}

namespace {

ErrorKind error_kind_from_name(const std::string& name) {
  for (int i = 0; i <= static_cast<int>(ErrorKind::Schema); ++i) {
    if (to_string(static_cast<ErrorKind>(i)) == name) return static_cast<ErrorKind>(i);
  }
  throw Error(ErrorKind::Schema, "unknown error kind '" + name + "'");
}

}  // namespace

std::vector<SparseCoefficients> sweep_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorKind::Schema, "sweep must be an array");
  std::vector<SparseCoefficients> out;
  for (const auto& e : j) {
    SparseCoefficients c;
    c.lambda = get<double>(e, "lambda");
    c.term_count = get<std::size_t>(e, "term_count");
    c.residual = field(e, "residual").is_null() ? std::numeric_limits<double>::infinity() : get<double>(e, "residual");
    const auto xi = get<std::vector<double>>(e, "xi");
    c.xi = Eigen::Map<const Eigen::VectorXd>(xi.data(), static_cast<Eigen::Index>(xi.size()));
    c.converged = get<bool>(e, "converged");
    c.active.resize(xi.size());
    for (std::size_t i = 0; i < xi.size(); ++i) c.active[i] = xi[i] != 0.0;
    if (e.contains("error")) c.error = error_kind_from_name(get<std::string>(e, "error"));
    if (e.contains("warnings")) c.warnings = get<std::vector<std::string>>(e, "warnings");
    out.push_back(std::move(c));
  }
  return out;
}

void write_pareto_csv(std::ostream& os, const ParetoFront& front) {
  os << "lambda,term_count,residual\n";
  for (const auto& p : front.points) {
    os << format_double(p.lambda) << ',' << p.term_count << ',' << format_double(p.residual) << '\n';
  }
}

std::vector<ParetoRow> read_pareto_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || trim(line) != "lambda,term_count,residual") {
    throw Error(ErrorKind::Schema, "Pareto CSV header must be 'lambda,term_count,residual'");
  }
  std::vector<ParetoRow> rows;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 3) throw Error(ErrorKind::Schema, "line " + std::to_string(line_no) + ": expected 3 columns");
    const double count = parse_double(cells[1], line_no);
    if (count < 0 || count != std::floor(count)) {
      throw Error(ErrorKind::Schema, "line " + std::to_string(line_no) + ": term_count must be a whole number");
    }
    rows.push_back(ParetoRow{parse_double(cells[0], line_no), static_cast<std::size_t>(count),
                             parse_double(cells[2], line_no)});
  }
  return rows;
}

namespace {

Json provenance_json(const StateProvenance& p) {
  return Json{{"method", to_string(p.method)},
              {"library", to_json(p.library)},
              {"lambda", p.lambda},
              {"residual", finite_or_null(p.residual)},
              {"term_count", p.term_count},
              {"samples", p.samples},
              {"null_space_dim", p.null_space_dim},
              {"cliff_decades", p.cliff_decades},
              {"no_cliff", p.no_cliff},
              {"warnings", p.warnings}};
}

StateProvenance provenance_from_json(const Json& j) {
  StateProvenance p;
  p.method = parse_method(get<std::string>(j, "method"));
  p.library = library_spec_from_json(field(j, "library"));
  p.lambda = get<double>(j, "lambda");
  p.residual = field(j, "residual").is_null() ? std::numeric_limits<double>::infinity() : get<double>(j, "residual");
  p.term_count = get<std::size_t>(j, "term_count");
  p.samples = get<std::size_t>(j, "samples");
  p.null_space_dim = get<std::size_t>(j, "null_space_dim");
  p.cliff_decades = get<double>(j, "cliff_decades");
  p.no_cliff = get<bool>(j, "no_cliff");
  p.warnings = get<std::vector<std::string>>(j, "warnings");
  return p;
}

}  // namespace

Json to_json(const IdentifiedModel& model) {
  Json states = Json::array();
  for (const auto& s : model.states) {
    const Fraction f = s.as_fraction();
    Json j{{"state_index", s.state_index}};
    if (const auto* r = std::get_if<RationalStateModel>(&s.model)) {
      j["kind"] = "rational";
      j["normalization"] = to_string(r->normalization);
    } else {
      j["kind"] = "explicit";
    }
    j["numerator"] = to_json(f.numerator);
    j["denominator"] = to_json(f.denominator);
    j["provenance"] = provenance_json(s.provenance);
    states.push_back(std::move(j));
  }
  Json names = Json::array();
  for (std::size_t k = 0; k < model.n_states; ++k) {
    names.push_back(k < model.state_names.size() ? model.state_names[k] : "x" + std::to_string(k + 1));
  }
  return Json{{"n_states", model.n_states}, {"state_names", names}, {"states", states}};
}

IdentifiedModel identified_model_from_json(const Json& j) {
  IdentifiedModel m;
  m.n_states = get<std::size_t>(j, "n_states");
  if (j.contains("state_names")) m.state_names = get<std::vector<std::string>>(j, "state_names");
  const Json& states = field(j, "states");
  if (!states.is_array()) throw Error(ErrorKind::Schema, "'states' must be an array");
  for (const auto& s : states) {
    StateIdentification id;
    id.state_index = get<std::size_t>(s, "state_index");
    if (id.state_index >= m.n_states) throw Error(ErrorKind::Schema, "state_index outside the model");
    const auto kind = get<std::string>(s, "kind");
    Polynomial num = polynomial_from_json(field(s, "numerator"), m.n_states);
    Polynomial den = polynomial_from_json(field(s, "denominator"), m.n_states);
    if (kind == "rational") {
      RationalStateModel r;
      r.state_index = id.state_index;
      r.numerator = std::move(num);
      r.denominator = std::move(den);
      r.normalization = get<std::string>(s, "normalization") == "lowest_degree_fallback"
                            ? Normalization::LowestDegreeFallback
                            : Normalization::ConstantDenominator;
      id.model = std::move(r);
    } else if (kind == "explicit") {
      if (den != Polynomial::constant(m.n_states, 1.0)) {
        throw Error(ErrorKind::Schema, "explicit state must have denominator 1");
      }
      id.model = ExplicitStateModel{id.state_index, std::move(num)};
    } else {
      throw Error(ErrorKind::Schema, "state kind must be 'rational' or 'explicit'");
    }
    if (s.contains("provenance")) id.provenance = provenance_from_json(s.at("provenance"));
    m.states.push_back(std::move(id));
  }
  return m;
}

Json to_json(const ValidationReport& report) {
  Json trajs = Json::array();
  for (const auto& t : report.trajectories) {
    Json errs = Json::array();
    for (double e : t.max_relative_error) errs.push_back(finite_or_null(e));
    trajs.push_back(
        Json{{"ic_index", t.ic_index}, {"diverged", t.diverged}, {"message", t.message}, {"max_relative_error", errs}});
  }
  Json params = Json::array();
  for (const auto& p : report.parameters) {
    params.push_back(Json{{"name", p.name},
                          {"true_value", p.true_value},
                          {"extracted", finite_or_null(p.extracted)},
                          {"relative_error", finite_or_null(p.relative_error)}});
  }
  return Json{{"worst_parameter_error", finite_or_null(report.worst_parameter_error())},
              {"worst_trajectory_error", finite_or_null(report.worst_trajectory_error())},
              {"parameters", params},
              {"trajectories", trajs}};
}

Json read_json(const fs::path& path) {
  auto in = open_in(path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Schema, path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

}  // namespace isindy::io
