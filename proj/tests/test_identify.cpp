#include <doctest.h>

#include <cmath>

#include "isindy/benchmarks.hpp"
#include "isindy/identify.hpp"

using namespace isindy;

namespace {

struct BenchmarkRun {
  OdeModel truth;
  BenchmarkProfile profile;
  Dataset data;
};

BenchmarkRun run_benchmark(Benchmark b) {
  BenchmarkRun r{make_benchmark(b, default_parameters(b)), benchmark_profile(b), {}};
  r.data = generate_dataset(r.truth, benchmark_ics(r.profile, r.profile.n_ics, 0),
                            uniform_grid(r.profile.t0, r.profile.t1, r.profile.samples));
  return r;
}

Dataset cubic_decay() {
  OdeModel m;
  m.n_states = 1;
  m.rhs = {StateRhs{{Fraction::polynomial(Polynomial::monomial({3}, -1.0))}}};
  return generate_dataset(m, {Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, 0.6)},
                          uniform_grid(0.0, 4.0, 200));
}

}  // namespace

TEST_CASE("Michaelis-Menten is identified exactly from clean data") {
  const BenchmarkRun r = run_benchmark(Benchmark::MichaelisMenten);
  const IdentificationResult res = identify(r.data, benchmark_identify_config(r.profile));
  REQUIRE_FALSE(res.any_failed());
  const IdentifiedModel model = res.model();
  const auto& prov = model.states[0].provenance;
  CHECK(prov.term_count == 4);
  CHECK_FALSE(prov.no_cliff);
  CHECK(prov.cliff_decades >= 2.0);

  const Fraction want = normalized_fraction(r.truth.rhs[0]);
  const Fraction got = model.states[0].as_fraction();
  CHECK(Polynomial::max_abs_difference(got.numerator, want.numerator) <= 1e-6);
  CHECK(Polynomial::max_abs_difference(got.denominator, want.denominator) <= 1e-6);

  const ParameterMap params = extract_parameters(r.profile, model.normalized_states());
  for (const auto& [name, value] : default_parameters(Benchmark::MichaelisMenten)) {
    CHECK(params.at(name) == doctest::Approx(value).epsilon(1e-6));
  }
}

TEST_CASE("regulatory network: both states and all parameters, serial and threaded") {
  const BenchmarkRun r = run_benchmark(Benchmark::Regulatory);
  IdentifyConfig cfg = benchmark_identify_config(r.profile);
  const IdentificationResult serial = identify(r.data, cfg);
  REQUIRE_FALSE(serial.any_failed());
  const IdentifiedModel model = serial.model();
  CHECK(model.states[1].provenance.term_count == 10);

  const ParameterMap params = extract_parameters(r.profile, model.normalized_states());
  REQUIRE(params.size() == 5);
  for (const auto& [name, value] : default_parameters(Benchmark::Regulatory)) {
    CHECK(params.at(name) == doctest::Approx(value).epsilon(1e-4));
  }

  cfg.workers = 2;
  const IdentificationResult threaded = identify(r.data, cfg);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(threaded.states[k].identification->provenance.term_count ==
          serial.states[k].identification->provenance.term_count);
    CHECK(threaded.states[k].identification->as_fraction().numerator ==
          serial.states[k].identification->as_fraction().numerator);
  }
}

TEST_CASE("auto mode falls back to sparse regression when the implicit library has no null space") {
  const Dataset data = cubic_decay();
  IdentifyConfig cfg;
  cfg.plans = {StatePlan{IdentificationMethod::Implicit, 1, 0, 1e-8}};
  const StateResult strict = identify_state(data, 0, cfg);
  REQUIRE(strict.failure);
  CHECK(strict.failure->kind == ErrorKind::EmptyNullSpace);
  CHECK_FALSE(strict.identification);

  cfg.plans[0].method = IdentificationMethod::Auto;
  cfg.plans[0].degree = 3;
  // Degree 3 has a null space, so auto stays implicit.
  const StateResult implicit = identify_state(data, 0, cfg);
  REQUIRE(implicit.identification);
  CHECK(implicit.identification->provenance.method == IdentificationMethod::Implicit);

  cfg.plans[0].degree = 1;
  const StateResult fallback = identify_state(data, 0, cfg);
  REQUIRE(fallback.identification);
  CHECK(fallback.identification->provenance.method == IdentificationMethod::Explicit);
  REQUIRE_FALSE(fallback.identification->provenance.warnings.empty());
  CHECK(fallback.identification->provenance.warnings[0].rfind("implicit path failed", 0) == 0);
}

TEST_CASE("explicit plans recover a polynomial right-hand side") {
  const Dataset data = cubic_decay();
  IdentifyConfig cfg;
  cfg.plans = {StatePlan{IdentificationMethod::Explicit, 3, 0, 1e-8}};
  const IdentificationResult res = identify(data, cfg);
  REQUIRE_FALSE(res.any_failed());
  const Fraction f = res.states[0].identification->as_fraction();
  CHECK(f.numerator.size() == 1);
  CHECK(f.numerator.coeff({3}) == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("an incomplete result refuses to produce a model") {
  IdentificationResult res;
  res.states.resize(2);
  res.states[0].failure = StateFailure{ErrorKind::EmptyNullSpace, "x"};
  res.states[1].failure = StateFailure{ErrorKind::EmptyNullSpace, "y"};
  CHECK(res.all_failed());
  CHECK_THROWS_AS(res.model(), Error);
}
