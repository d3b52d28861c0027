#include "isindy/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "isindy/error.hpp"
#include "isindy/library.hpp"

namespace isindy::cli {

namespace fs = std::filesystem;
using io::Json;

namespace {

fs::path output_root() {
  const char* env = std::getenv(kOutputRootEnv);
  return env && *env ? fs::path(env) : fs::path("runs");
}

std::string_view diff_method_name(DiffMethod m) { return m == DiffMethod::Central ? "central" : "tv"; }

DiffMethod parse_diff_method(const std::string& s) {
  if (s == "central") return DiffMethod::Central;
  if (s == "tv") return DiffMethod::TvRegularized;
  throw Error(ErrorKind::Schema, "differentiation method must be 'central' or 'tv', got '" + s + "'");
}

std::string_view solver_name(RegressionSolver s) { return s == RegressionSolver::Stlsq ? "stlsq" : "lasso"; }

RegressionSolver parse_solver(const std::string& s) {
  if (s == "stlsq") return RegressionSolver::Stlsq;
  if (s == "lasso") return RegressionSolver::Lasso;
  throw Error(ErrorKind::Schema, "regression solver must be 'stlsq' or 'lasso', got '" + s + "'");
}

template <class T>
void overlay(const Json& j, const char* key, T& target) {
  if (!j.contains(key)) return;
  try {
    target = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Schema, std::string("config field '") + key + "': " + e.what());
  }
}

const Json* section(const Json& j, const char* key) {
  if (!j.contains(key)) return nullptr;
  if (!j.at(key).is_object()) throw Error(ErrorKind::Schema, std::string("config field '") + key + "' must be an object");
  return &j.at(key);
}

std::string state_file(const char* prefix, std::size_t k, const char* ext) {
  return std::string(prefix) + "_x" + std::to_string(k + 1) + ext;
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

Eigen::VectorXd time_grid(double t0, double t1, Eigen::Index samples) { return uniform_grid(t0, t1, samples); }

std::vector<std::string> names_of(const OdeModel& m) {
  std::vector<std::string> names;
  for (std::size_t k = 0; k < m.n_states; ++k) names.push_back(m.state_name(k));
  return names;
}

std::optional<BenchmarkProfile> profile_of(const RunConfig& cfg) {
  if (!cfg.model_file.empty() || cfg.benchmark.empty()) return std::nullopt;
  return benchmark_profile(parse_benchmark(cfg.benchmark));
}

}  // namespace

RunConfig default_run_config(std::string_view benchmark) {
  RunConfig cfg;
  cfg.benchmark = std::string(benchmark);
  if (benchmark.empty()) {
    cfg.identification.plans = {StatePlan{}};
    cfg.output_dir = (output_root() / "custom").string();
    return cfg;
  }
  const Benchmark b = parse_benchmark(benchmark);
  const BenchmarkProfile prof = benchmark_profile(b);
  cfg.parameters = default_parameters(b);
  for (const auto& ic : prof.explicit_ics) cfg.explicit_ics.emplace_back(ic.data(), ic.data() + ic.size());
  cfg.ic_ranges = prof.ic_ranges;
  cfg.n_ics = prof.n_ics;
  cfg.t0 = prof.t0;
  cfg.t1 = prof.t1;
  cfg.samples = prof.samples;
  cfg.identification = benchmark_identify_config(prof);
  if (b == Benchmark::Glycolysis) {
    cfg.validation.count = 1;
    cfg.validation.t1 = 3.0;
    cfg.validation.samples = 3000;
  }
  cfg.output_dir = (output_root() / std::string(benchmark)).string();
  return cfg;
}

Json to_json(const RunConfig& cfg) {
  Json ranges = Json::array();
  for (const auto& r : cfg.ic_ranges) ranges.push_back(Json::array({r.lo, r.hi}));
  Json plans = Json::array();
  for (const auto& p : cfg.identification.plans) {
    plans.push_back(Json{{"method", to_string(p.method)},
                         {"degree", p.degree},
                         {"max_trajectories", p.max_trajectories},
                         {"rank_tol_rel", p.rank_tol_rel}});
  }
  const auto& id = cfg.identification;
  return Json{
      {"benchmark", cfg.benchmark},
      {"model_file", cfg.model_file},
      {"parameters", cfg.parameters},
      {"initial_conditions",
       Json{{"explicit", cfg.explicit_ics}, {"ranges", ranges}, {"count", cfg.n_ics}, {"seed", cfg.seed}}},
      {"time_grid", Json{{"t0", cfg.t0}, {"t1", cfg.t1}, {"samples", cfg.samples}}},
      {"integrator", Json{{"rel_tol", cfg.integrator.rel_tol},
                          {"abs_tol", cfg.integrator.abs_tol},
                          {"initial_step", cfg.integrator.initial_step}}},
      {"differentiation", Json{{"method", diff_method_name(cfg.differentiation.method)},
                               {"alpha", cfg.differentiation.alpha},
                               {"max_iters", cfg.differentiation.max_iters},
                               {"tol", cfg.differentiation.tol},
                               {"epsilon", cfg.differentiation.epsilon}}},
      {"identification",
       Json{{"states", plans},
            {"lambda_grid", Json{{"lo", id.lambda_lo}, {"hi", id.lambda_hi}, {"count", id.lambda_count}}},
            {"adm", Json{{"max_iters", id.adm.max_iters},
                         {"tol", id.adm.tol},
                         {"n_initializations", id.adm.n_initializations},
                         {"seed", id.adm.seed},
                         {"polish", id.adm.polish}}},
            {"drop_threshold", id.drop_threshold},
            {"prune_tol", id.prune_tol},
            {"regression", Json{{"solver", solver_name(id.solver)}, {"lambda", id.regression_lambda}}}}},
      {"validation", Json{{"count", cfg.validation.count},
                          {"seed", cfg.validation.seed},
                          {"t1", cfg.validation.t1},
                          {"samples", cfg.validation.samples}}},
      {"workers", cfg.workers},
      {"output_dir", cfg.output_dir},
  };
}

RunConfig run_config_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Schema, "config must be a JSON object");
  std::string benchmark = "michaelis_menten";
  overlay(j, "benchmark", benchmark);
  std::string model_file;
  overlay(j, "model_file", model_file);
  if (!model_file.empty() && !j.contains("benchmark")) benchmark.clear();

  RunConfig cfg = default_run_config(benchmark);
  cfg.model_file = model_file;
  if (j.contains("parameters")) {
    ParameterMap given;
    overlay(j, "parameters", given);
    for (const auto& [k, v] : given) cfg.parameters[k] = v;
  }
  if (const Json* ic = section(j, "initial_conditions")) {
    overlay(*ic, "explicit", cfg.explicit_ics);
    if (ic->contains("ranges")) {
      std::vector<std::array<double, 2>> ranges;
      overlay(*ic, "ranges", ranges);
      cfg.ic_ranges.clear();
      for (const auto& r : ranges) cfg.ic_ranges.push_back(StateRange{r[0], r[1]});
    }
    overlay(*ic, "count", cfg.n_ics);
    overlay(*ic, "seed", cfg.seed);
  }
  if (const Json* g = section(j, "time_grid")) {
    overlay(*g, "t0", cfg.t0);
    overlay(*g, "t1", cfg.t1);
    overlay(*g, "samples", cfg.samples);
  }
  if (const Json* g = section(j, "integrator")) {
    overlay(*g, "rel_tol", cfg.integrator.rel_tol);
    overlay(*g, "abs_tol", cfg.integrator.abs_tol);
    overlay(*g, "initial_step", cfg.integrator.initial_step);
  }
  if (const Json* d = section(j, "differentiation")) {
    std::string method(diff_method_name(cfg.differentiation.method));
    overlay(*d, "method", method);
    cfg.differentiation.method = parse_diff_method(method);
    overlay(*d, "alpha", cfg.differentiation.alpha);
    overlay(*d, "max_iters", cfg.differentiation.max_iters);
    overlay(*d, "tol", cfg.differentiation.tol);
    overlay(*d, "epsilon", cfg.differentiation.epsilon);
  }
  if (const Json* id = section(j, "identification")) {
    auto& ic = cfg.identification;
    if (id->contains("states")) {
      if (!id->at("states").is_array()) throw Error(ErrorKind::Schema, "'identification.states' must be an array");
      ic.plans.clear();
      for (const auto& p : id->at("states")) {
        StatePlan plan;
        std::string method(to_string(plan.method));
        overlay(p, "method", method);
        plan.method = parse_method(method);
        overlay(p, "degree", plan.degree);
        overlay(p, "max_trajectories", plan.max_trajectories);
        overlay(p, "rank_tol_rel", plan.rank_tol_rel);
        ic.plans.push_back(plan);
      }
    }
    if (const Json* g = section(*id, "lambda_grid")) {
      overlay(*g, "lo", ic.lambda_lo);
      overlay(*g, "hi", ic.lambda_hi);
      overlay(*g, "count", ic.lambda_count);
    }
    if (const Json* a = section(*id, "adm")) {
      overlay(*a, "max_iters", ic.adm.max_iters);
      overlay(*a, "tol", ic.adm.tol);
      overlay(*a, "n_initializations", ic.adm.n_initializations);
      overlay(*a, "seed", ic.adm.seed);
      overlay(*a, "polish", ic.adm.polish);
    }
    overlay(*id, "drop_threshold", ic.drop_threshold);
    overlay(*id, "prune_tol", ic.prune_tol);
    if (const Json* r = section(*id, "regression")) {
      std::string solver(solver_name(ic.solver));
      overlay(*r, "solver", solver);
      ic.solver = parse_solver(solver);
      overlay(*r, "lambda", ic.regression_lambda);
    }
  }
  if (const Json* v = section(j, "validation")) {
    overlay(*v, "count", cfg.validation.count);
    overlay(*v, "seed", cfg.validation.seed);
    overlay(*v, "t1", cfg.validation.t1);
    overlay(*v, "samples", cfg.validation.samples);
  }
  overlay(j, "workers", cfg.workers);
  overlay(j, "output_dir", cfg.output_dir);
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorKind::Io, "config file " + path.string() + " does not exist");
  try {
    return run_config_from_json(io::read_json(path));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void validate_config(const RunConfig& cfg) {
  if (cfg.model_file.empty() && cfg.benchmark.empty()) {
    throw Error(ErrorKind::Schema, "config names neither a benchmark nor a model file");
  }
  if (!cfg.model_file.empty() && !fs::exists(cfg.model_file)) {
    throw Error(ErrorKind::Io, "model file " + cfg.model_file + " does not exist");
  }
  if (!cfg.benchmark.empty()) parse_benchmark(cfg.benchmark);
  const auto& id = cfg.identification;
  if (!(id.lambda_lo > 0.0) || !(id.lambda_hi >= id.lambda_lo) || id.lambda_count == 0) {
    throw Error(ErrorKind::Schema, "lambda grid must satisfy 0 < lo <= hi with count >= 1");
  }
  if (id.plans.empty()) throw Error(ErrorKind::Schema, "identification needs at least one state plan");
  for (const auto& r : cfg.ic_ranges) {
    if (!(r.hi >= r.lo)) throw Error(ErrorKind::Schema, "initial-condition range with hi < lo");
  }
  if (!(cfg.t1 > cfg.t0) || cfg.samples < 2) throw Error(ErrorKind::Schema, "time grid needs t1 > t0 and >= 2 samples");
  if (cfg.output_dir.empty()) throw Error(ErrorKind::Schema, "output_dir is empty");
}

OdeModel truth_model(const RunConfig& cfg) {
  if (!cfg.model_file.empty()) return io::model_from_json(io::read_json(cfg.model_file));
  return make_benchmark(cfg.benchmark, cfg.parameters);
}

std::vector<Eigen::VectorXd> training_ics(const RunConfig& cfg) {
  const std::size_t count = cfg.n_ics > 0 ? cfg.n_ics : cfg.explicit_ics.size();
  std::vector<Eigen::VectorXd> out;
  for (std::size_t i = 0; i < std::min(count, cfg.explicit_ics.size()); ++i) {
    const auto& v = cfg.explicit_ics[i];
    out.emplace_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  }
  if (out.size() < count) {
    if (cfg.ic_ranges.empty()) {
      throw Error(ErrorKind::Schema, "more initial conditions requested than listed, and no ranges to draw from");
    }
    auto drawn = sample_ics(cfg.ic_ranges, count - out.size(), cfg.seed);
    out.insert(out.end(), drawn.begin(), drawn.end());
  }
  return out;
}

fs::path data_dir(const RunConfig& cfg) { return fs::path(cfg.output_dir) / "data"; }
fs::path identify_dir(const RunConfig& cfg) { return fs::path(cfg.output_dir) / "identify"; }
fs::path validate_dir(const RunConfig& cfg) { return fs::path(cfg.output_dir) / "validate"; }
fs::path report_dir(const RunConfig& cfg) { return fs::path(cfg.output_dir) / "report"; }

int cmd_simulate(const RunConfig& cfg) {
  validate_config(cfg);
  const OdeModel model = truth_model(cfg);
  const auto ics = training_ics(cfg);
  for (const auto& ic : ics) {
    if (ic.size() != static_cast<Eigen::Index>(model.n_states)) {
      throw Error(ErrorKind::DimensionMismatch, "initial condition length differs from the model's state count");
    }
  }
  const Eigen::VectorXd grid = time_grid(cfg.t0, cfg.t1, cfg.samples);
  const Dataset data = generate_dataset(model, ics, grid, cfg.integrator, cfg.workers);

  const fs::path dir = data_dir(cfg);
  fs::create_directories(dir);
  Json files = Json::array();
  for (std::size_t i = 0; i < data.trajectories.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "traj_%04zu.csv", i);
    io::write_trajectory_csv(dir / name, data.trajectories[i]);
    files.push_back(name);
  }
  Json ic_list = Json::array();
  for (const auto& ic : ics) ic_list.push_back(std::vector<double>(ic.data(), ic.data() + ic.size()));
  io::write_json(dir / "manifest.json", Json{{"model", io::to_json(model)},
                                             {"initial_conditions", ic_list},
                                             {"time_grid", Json{{"t0", cfg.t0}, {"t1", cfg.t1}, {"samples", cfg.samples}}},
                                             {"seed", cfg.seed},
                                             {"derivatives", "exact"},
                                             {"files", files},
                                             {"config", to_json(cfg)}});
  std::cout << "wrote " << files.size() << " trajectories to " << dir.string() << "\n";
  return 0;
}

int cmd_differentiate(const RunConfig& cfg, const fs::path& input, const fs::path& output) {
  Trajectory traj = io::read_trajectory_csv(input);
  if (traj.derivs) std::cerr << "note: " << input.string() << " already has derivative columns; recomputing them\n";
  traj.derivs = differentiate(traj.times, traj.states, cfg.differentiation);
  traj.source = TrajectorySource::Differentiated;
  io::write_trajectory_csv(output, traj);
  std::cout << "wrote " << output.string() << " (" << diff_method_name(cfg.differentiation.method) << ")\n";
  return 0;
}

namespace {

Json state_log(const StateResult& s) {
  Json j{{"state_index", s.state_index}};
  if (!s.identification) {
    j["status"] = "failed";
    j["error"] = s.failure ? s.failure->message : "unknown";
    return j;
  }
  const auto& p = s.identification->provenance;
  const Fraction f = s.identification->as_fraction();
  j["status"] = "identified";
  j["method"] = to_string(p.method);
  j["term_count"] = p.term_count;
  j["numerator_terms"] = f.numerator.size();
  j["denominator_terms"] = std::holds_alternative<RationalStateModel>(s.identification->model) ? f.denominator.size() : 0;
  j["lambda"] = p.lambda;
  j["residual"] = p.residual;
  j["null_space_dim"] = p.null_space_dim;
  j["cliff_decades"] = p.cliff_decades;
  j["no_cliff"] = p.no_cliff;
  j["warnings"] = p.warnings;
  return j;
}

}  // namespace

int cmd_identify(const RunConfig& cfg, const std::optional<fs::path>& data) {
  validate_config(cfg);
  const fs::path dir = data ? *data : data_dir(cfg);
  const auto files = io::trajectory_files(dir);
  if (files.empty()) throw Error(ErrorKind::EmptyData, "no trajectory CSV files in " + dir.string());

  std::vector<Trajectory> trajs;
  for (const auto& f : files) {
    Trajectory t = io::read_trajectory_csv(f);
    if (!t.derivs) {
      t.derivs = differentiate(t.times, t.states, cfg.differentiation);
      t.source = TrajectorySource::Differentiated;
    }
    trajs.push_back(std::move(t));
  }
  const auto n = static_cast<std::size_t>(trajs.front().n_states());
  const Dataset dataset = make_dataset(std::move(trajs), n);
  if (cfg.identification.plans.size() > 1 && cfg.identification.plans.size() != n) {
    throw Error(ErrorKind::Schema, "config has " + std::to_string(cfg.identification.plans.size()) +
                                       " state plans but the data has " + std::to_string(n) + " states");
  }
  std::vector<std::string> names;
  try {
    const OdeModel truth = truth_model(cfg);
    if (truth.n_states == n) names = names_of(truth);
  } catch (const Error&) {
  }
  if (names.empty()) {
    for (std::size_t k = 0; k < n; ++k) names.push_back("x" + std::to_string(k + 1));
  }

  IdentifyConfig icfg = cfg.identification;
  icfg.workers = cfg.workers;
  const IdentificationResult result = identify(dataset, icfg);

  const fs::path out = identify_dir(cfg);
  fs::create_directories(out);
  Json log = Json::array();
  bool no_cliff = false;
  for (const auto& s : result.states) {
    log.push_back(state_log(s));
    const std::string label = names[s.state_index];
    if (!s.identification) {
      std::cout << label << ": failed: " << (s.failure ? s.failure->message : "unknown") << "\n";
      continue;
    }
    const auto& p = s.identification->provenance;
    no_cliff = no_cliff || p.no_cliff;
    const Fraction f = s.identification->as_fraction();
    std::cout << label << ": " << p.term_count << " terms";
    if (p.method == IdentificationMethod::Implicit) {
      std::cout << " (" << f.numerator.size() << " numerator, " << f.denominator.size() << " denominator), cliff "
                << short_number(p.cliff_decades) << " decades";
    }
    std::cout << ", residual " << short_number(p.residual) << ", lambda " << short_number(p.lambda) << "\n";
    for (const auto& w : p.warnings) std::cout << "  warning: " << w << "\n";

    if (s.front) {
      std::ostringstream csv;
      io::write_pareto_csv(csv, *s.front);
      io::write_text(out / state_file("pareto", s.state_index, ".csv"), csv.str());
    }
    io::write_json(out / state_file("sweep", s.state_index, ".json"), io::sweep_to_json(s.sweep));
    Json terms = Json::array();
    for (const auto& t : s.terms) terms.push_back(io::to_json(t));
    io::write_json(out / state_file("library", s.state_index, ".json"),
                   Json{{"spec", io::to_json(p.library)}, {"terms", terms}});
  }
  io::write_json(out / "log.json", Json{{"data", dir.string()},
                                        {"trajectories", dataset.trajectories.size()},
                                        {"samples", dataset.total_samples()},
                                        {"states", log}});
  if (!result.any_failed()) {
    io::write_json(out / "model.json", io::to_json(result.model(names)));
  } else {
    fs::remove(out / "model.json");
    std::cerr << "warning: not every state was identified; model.json was not written\n";
  }
  if (result.all_failed()) return 1;
  if (no_cliff && !cfg.benchmark.empty() && cfg.model_file.empty()) return 1;
  return 0;
}

int cmd_validate(const RunConfig& cfg, const std::optional<fs::path>& model_file) {
  validate_config(cfg);
  const fs::path path = model_file ? *model_file : identify_dir(cfg) / "model.json";
  if (!fs::exists(path)) throw Error(ErrorKind::Io, "identified model " + path.string() + " does not exist");
  const IdentifiedModel identified = io::identified_model_from_json(io::read_json(path));
  const OdeModel truth = truth_model(cfg);
  if (cfg.ic_ranges.empty()) throw Error(ErrorKind::Schema, "validation needs initial-condition ranges");
  const auto test_ics = sample_ics(cfg.ic_ranges, cfg.validation.count, cfg.validation.seed);
  const auto profile = profile_of(cfg);
  const ValidationReport report = validate_model(identified, truth, test_ics,
                                                 time_grid(cfg.t0, cfg.validation.t1, cfg.validation.samples),
                                                 profile ? &*profile : nullptr, cfg.integrator);
  io::write_json(validate_dir(cfg) / "report.json", io::to_json(report));

  for (const auto& p : report.parameters) {
    std::cout << p.name << ": true " << short_number(p.true_value) << ", extracted " << short_number(p.extracted)
              << ", error " << short_number(100.0 * p.relative_error) << "%\n";
  }
  for (const auto& t : report.trajectories) {
    if (t.diverged) {
      std::cout << "test ic " << t.ic_index << ": " << t.message << "\n";
      continue;
    }
    double worst = 0.0;
    for (double e : t.max_relative_error) worst = std::max(worst, e);
    std::cout << "test ic " << t.ic_index << ": max relative trajectory error " << short_number(worst) << "\n";
  }
  const bool diverged = std::any_of(report.trajectories.begin(), report.trajectories.end(),
                                    [](const TrajectoryComparison& t) { return t.diverged; });
  return diverged ? 1 : 0;
}

int cmd_report(const fs::path& run_dir) {
  if (!fs::is_directory(run_dir)) throw Error(ErrorKind::Io, "run directory " + run_dir.string() + " does not exist");
  const fs::path out = run_dir / "report";
  fs::create_directories(out);
  std::ostringstream text;
  std::vector<std::string> missing;

  text << "run: " << run_dir.string() << "\n\n";
  const fs::path manifest = run_dir / "data" / "manifest.json";
  if (fs::exists(manifest)) {
    const Json m = io::read_json(manifest);
    text << "data: " << m.at("files").size() << " trajectories, " << m.at("time_grid").at("samples").get<long>()
         << " samples each\n";
  } else {
    text << "data: not present\n";
    missing.push_back(manifest.string());
  }

  const fs::path log_path = run_dir / "identify" / "log.json";
  if (fs::exists(log_path)) {
    const Json log = io::read_json(log_path);
    text << "identification:\n";
    for (const auto& s : log.at("states")) {
      const auto k = s.at("state_index").get<std::size_t>();
      text << "  x" << k + 1 << ": ";
      if (s.at("status") != "identified") {
        text << "failed: " << s.at("error").get<std::string>() << "\n";
        continue;
      }
      text << s.at("term_count").get<std::size_t>() << " terms";
      if (s.at("method") == "implicit") {
        text << " (" << s.at("numerator_terms").get<std::size_t>() << " numerator, "
             << s.at("denominator_terms").get<std::size_t>() << " denominator), residual cliff "
             << short_number(s.at("cliff_decades").get<double>()) << " decades";
      } else {
        text << " by sparse regression";
      }
      text << ", residual " << short_number(s.at("residual").get<double>()) << "\n";
      for (const auto& w : s.at("warnings")) text << "    warning: " << w.get<std::string>() << "\n";
      const fs::path pareto = run_dir / "identify" / state_file("pareto", k, ".csv");
      if (fs::exists(pareto)) fs::copy_file(pareto, out / pareto.filename(), fs::copy_options::overwrite_existing);
    }
  } else {
    text << "identification: not present\n";
    missing.push_back(log_path.string());
  }

  const fs::path report_path = run_dir / "validate" / "report.json";
  if (fs::exists(report_path)) {
    const Json r = io::read_json(report_path);
    text << "validation:\n";
    std::ostringstream csv;
    csv << "name,true_value,extracted,relative_error\n";
    for (const auto& p : r.at("parameters")) {
      const double err = p.at("relative_error").is_null() ? NAN : p.at("relative_error").get<double>();
      const double ext = p.at("extracted").is_null() ? NAN : p.at("extracted").get<double>();
      text << "  " << p.at("name").get<std::string>() << ": true " << short_number(p.at("true_value").get<double>())
           << ", extracted " << short_number(ext) << ", error " << short_number(100.0 * err) << "%\n";
      csv << p.at("name").get<std::string>() << ',' << io::format_double(p.at("true_value").get<double>()) << ','
          << io::format_double(ext) << ',' << io::format_double(err) << '\n';
    }
    io::write_text(out / "parameters.csv", csv.str());
    const Json& worst = r.at("worst_trajectory_error");
    text << "  worst trajectory error: " << (worst.is_null() ? std::string("diverged") : short_number(worst.get<double>()))
         << "\n";
  } else {
    text << "validation: not present\n";
    missing.push_back(report_path.string());
  }

  if (!missing.empty()) {
    text << "\nmissing artifacts:\n";
    for (const auto& m : missing) text << "  " << m << "\n";
  }
  io::write_text(out / "summary.txt", text.str());
  std::cout << text.str();
  return 0;
}

int cmd_count(unsigned n, unsigned d) {
  const std::uint64_t nm = count_monomials(n, d);
  const StructureCount np = count_polynomial_structures(n, d);
  std::cout << "monomials of degree <= " << d << " in " << n << " variables: " << nm << "\n";
  std::cout << "candidate polynomial structures: " << np.value.str() << " (about 10^" << np.log10_floor << ")\n";
  return 0;
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Sparse identification of rational and implicit dynamics from time series"};
  app.require_subcommand(1);

  std::string config_path, benchmark, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_ics;
  std::optional<unsigned> workers;
  bool print_defaults = false;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "Run configuration JSON");
    sub->add_option("-b,--benchmark", benchmark, "michaelis_menten, regulatory or glycolysis");
    sub->add_option("-o,--out", out_dir, std::string("Run output directory (default: $") + kOutputRootEnv +
                                              "/<benchmark>, or runs/<benchmark>)");
    sub->add_option("-j,--workers", workers, "Worker threads");
    sub->add_flag("--print-defaults", print_defaults, "Print the effective configuration as JSON and exit");
  };

  auto* simulate = app.add_subcommand("simulate", "Simulate training trajectories to CSV");
  add_common(simulate);
  simulate->add_option("-n,--n-ics", n_ics, "Number of initial conditions");
  simulate->add_option("-s,--seed", seed, "Seed for drawn initial conditions");

  std::string diff_in, diff_out, diff_method;
  std::optional<double> alpha;
  auto* differentiate_cmd = app.add_subcommand("differentiate", "Append derivative columns to a trajectory CSV");
  add_common(differentiate_cmd);
  differentiate_cmd->add_option("-i,--input", diff_in, "Trajectory CSV without derivatives");
  differentiate_cmd->add_option("--output", diff_out, "Output CSV (default: overwrite input)");
  differentiate_cmd->add_option("-m,--method", diff_method, "central or tv");
  differentiate_cmd->add_option("--alpha", alpha, "TV regularization weight");

  std::string data_path;
  auto* identify_cmd = app.add_subcommand("identify", "Identify a model from trajectory CSVs");
  add_common(identify_cmd);
  identify_cmd->add_option("-d,--data", data_path, "Directory of trajectory CSVs (default: <out>/data)");

  std::string model_path;
  auto* validate_cmd = app.add_subcommand("validate", "Compare an identified model with the true system");
  add_common(validate_cmd);
  validate_cmd->add_option("-m,--model", model_path, "Identified model JSON (default: <out>/identify/model.json)");

  std::string run_dir;
  auto* report_cmd = app.add_subcommand("report", "Summarize a run directory");
  add_common(report_cmd);
  report_cmd->add_option("-r,--run", run_dir, "Run directory (default: the configured output directory)");

  unsigned count_n = 0, count_d = 0;
  auto* count_cmd = app.add_subcommand("count", "Count monomials and candidate polynomial structures");
  count_cmd->add_option("-n,--states", count_n, "Number of state variables")->required();
  count_cmd->add_option("-d,--degree", count_d, "Maximum total degree")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (count_cmd->parsed()) return cmd_count(count_n, count_d);

    RunConfig cfg = !config_path.empty() ? load_run_config(config_path)
                                         : default_run_config(benchmark.empty() ? "michaelis_menten" : benchmark);
    if (!config_path.empty() && !benchmark.empty()) cfg.benchmark = benchmark;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (workers) cfg.workers = *workers;
    if (seed) cfg.seed = *seed;
    if (n_ics) cfg.n_ics = *n_ics;
    if (!diff_method.empty()) cfg.differentiation.method = parse_diff_method(diff_method);
    if (alpha) cfg.differentiation.alpha = *alpha;

    if (print_defaults) {
      std::cout << to_json(cfg).dump(2) << "\n";
      return 0;
    }
    if (simulate->parsed()) return cmd_simulate(cfg);
    if (differentiate_cmd->parsed()) {
      if (diff_in.empty()) throw Error(ErrorKind::InvalidArgument, "differentiate needs --input");
      return cmd_differentiate(cfg, diff_in, diff_out.empty() ? diff_in : diff_out);
    }
    if (identify_cmd->parsed()) {
      return cmd_identify(cfg, data_path.empty() ? std::nullopt : std::optional<fs::path>(data_path));
    }
    if (validate_cmd->parsed()) {
      return cmd_validate(cfg, model_path.empty() ? std::nullopt : std::optional<fs::path>(model_path));
    }
    if (report_cmd->parsed()) return cmd_report(run_dir.empty() ? fs::path(cfg.output_dir) : fs::path(run_dir));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace isindy::cli
