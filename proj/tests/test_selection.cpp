#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "isindy/benchmarks.hpp"
#include "isindy/error.hpp"
#include "isindy/library.hpp"
#include "isindy/selection.hpp"

using namespace isindy;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an isindy::Error");
  return ErrorKind::InvalidArgument;
}

SparseCoefficients candidate(std::size_t terms, double residual, double lambda) {
  SparseCoefficients c;
  c.term_count = terms;
  c.residual = residual;
  c.lambda = lambda;
  return c;
}

ParetoFront front_of(std::initializer_list<double> residuals) {
  std::vector<SparseCoefficients> cs;
  std::size_t k = 1;
  for (double r : residuals) cs.push_back(candidate(k++, r, 1.0 / static_cast<double>(k)));
  return pareto_front(cs);
}

// Random polynomial in n variables of degree <= d with coefficients of
// magnitude in [0.5, 2], each monomial kept with probability `density`.
Polynomial random_polynomial(std::size_t n, unsigned d, double density, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mag(0.5, 2.0), coin(0.0, 1.0);
  Polynomial p(n);
  for (const auto& m : enumerate_monomials(static_cast<unsigned>(n), d)) {
    if (coin(rng) < density) p.add_term(m.exponents, coin(rng) < 0.5 ? -mag(rng) : mag(rng));
  }
  return p;
}

EvaluatedLibrary symbolic_library(std::vector<LibraryTerm> terms, Eigen::VectorXd scales) {
  EvaluatedLibrary lib;
  lib.matrix = Eigen::MatrixXd::Zero(1, static_cast<Eigen::Index>(terms.size()));
  lib.terms = std::move(terms);
  lib.column_scales = std::move(scales);
  lib.mode = LibraryMode::Implicit;
  return lib;
}

std::size_t nonzeros(const Eigen::VectorXd& v, std::size_t begin, std::size_t end) {
  std::size_t c = 0;
  for (std::size_t j = begin; j < end; ++j) c += v[static_cast<Eigen::Index>(j)] != 0.0;
  return c;
}

}  // namespace

TEST_CASE("Pareto front keeps the best candidate per term count") {
  std::vector<SparseCoefficients> cs = {candidate(3, 1e-2, 0.1), candidate(3, 1e-5, 0.05), candidate(1, 0.5, 0.9),
                                        candidate(5, 1e-12, 1e-4), candidate(0, 0.0, 1.0)};
  SparseCoefficients failed = candidate(2, 0.0, 0.5);
  failed.error = ErrorKind::DegenerateLambda;
  cs.push_back(failed);
  const ParetoFront f = pareto_front(cs);
  REQUIRE(f.points.size() == 3);
  CHECK(f.points[0].term_count == 1);
  CHECK(f.points[1].term_count == 3);
  CHECK(f.points[1].residual == 1e-5);
  CHECK(f.points[1].lambda == 0.05);
  CHECK(f.points[2].term_count == 5);
  CHECK(kind_of([&] { pareto_front({failed}); }) == ErrorKind::NoValidCandidates);
}

TEST_CASE("knee is the sparsest point after a large residual drop") {
  const KneeSelection k = select_knee(front_of({1e-1, 3e-2, 1e-9, 5e-10, 4e-10}));
  CHECK_FALSE(k.no_cliff);
  CHECK(k.point_index == 2);
  CHECK(k.chosen.term_count == 3);
  CHECK(k.cliff_decades == doctest::Approx(std::log10(3e-2 / 1e-9)));

  // A drop that is followed by a much lower plateau is not the knee.
  const KneeSelection later = select_knee(front_of({1.0, 1e-3, 1e-4, 1e-10}));
  CHECK(later.point_index == 3);

  // Round-off residuals of denser points do not hide an exact sparse point.
  const KneeSelection roundoff = select_knee(front_of({1e-2, 1e-14, 1e-17}));
  CHECK(roundoff.point_index == 1);
}

TEST_CASE("without a cliff the smallest residual is chosen and flagged") {
  const KneeSelection k = select_knee(front_of({1e-1, 5e-2, 2e-2, 3e-2}));
  CHECK(k.no_cliff);
  CHECK(k.point_index == 2);
  REQUIRE_FALSE(k.warnings.empty());
  CHECK(k.warnings[0].rfind("NoCliff", 0) == 0);
  CHECK(kind_of([] { select_knee(ParetoFront{}); }) == ErrorKind::EmptyFront);
}

TEST_CASE("rational assembly inverts the coefficient construction") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> scale(0.1, 10.0), factor(-3.0, 3.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 3);
    const std::size_t k = static_cast<std::size_t>(trial) % n;
    OdeModel model;
    model.n_states = n;
    model.rhs.resize(n, StateRhs{{Fraction::polynomial(Polynomial::constant(n, 1.0))}});
    Polynomial num = random_polynomial(n, 2, 0.5, rng);
    if (num.is_zero()) num = Polynomial::constant(n, 1.0);
    Polynomial den = random_polynomial(n, 2, 0.4, rng);
    den.set_term(Exponents(n, 0), 1.0 + scale(rng));
    model.rhs[k] = StateRhs{{Fraction{num, den}}};

    const auto terms = implicit_terms(n, 2, 2, k);
    Eigen::VectorXd scales(static_cast<Eigen::Index>(terms.size()));
    for (auto& s : scales) s = scale(rng);
    const EvaluatedLibrary lib = symbolic_library(terms, scales);
    const Eigen::VectorXd xi = implicit_coefficients(model, k, lib);
    CHECK(xi.norm() == doctest::Approx(1.0));

    const Fraction want = normalized_fraction(model.rhs[k]);
    double f = factor(rng);
    if (std::abs(f) < 0.1) f = 0.5;
    for (const Eigen::VectorXd& v : {xi, Eigen::VectorXd(f * xi)}) {
      const RationalStateModel got = assemble_rational_model(v, lib, 0.0);
      CHECK(got.state_index == k);
      CHECK(got.normalization == Normalization::ConstantDenominator);
      CHECK(Polynomial::max_abs_difference(got.numerator, want.numerator) <= 1e-10);
      CHECK(Polynomial::max_abs_difference(got.denominator, want.denominator) <= 1e-10);
    }
  }
}

TEST_CASE("a denominator without a constant term falls back to its lowest-degree term") {
  const auto terms = implicit_terms(1, 1, 1, 0);  // 1, x, dx, x*dx
  const EvaluatedLibrary lib = symbolic_library(terms, Eigen::Vector4d::Ones());
  const RationalStateModel m = assemble_rational_model(Eigen::Vector4d(2.0, 0.0, 0.0, -4.0), lib, 0.0);
  CHECK(m.normalization == Normalization::LowestDegreeFallback);
  CHECK(m.denominator.coeff({1}) == 1.0);
  CHECK(m.numerator.coeff({0}) == 0.5);
  REQUIRE_FALSE(m.warnings.empty());
  CHECK(m.warnings[0].rfind("ZeroConstantDenominator", 0) == 0);
  CHECK(kind_of([&] { assemble_rational_model(Eigen::Vector4d(1.0, 1.0, 0.0, 0.0), lib, 0.0); }) ==
        ErrorKind::NoDenominatorTerms);
}

TEST_CASE("pruning is relative to the largest entry of the same block") {
  const auto terms = implicit_terms(1, 1, 1, 0);
  const EvaluatedLibrary lib = symbolic_library(terms, Eigen::Vector4d::Ones());
  const RationalStateModel m = assemble_rational_model(Eigen::Vector4d(1.0, 1e-5, -1e-3, -1e-8), lib, 1e-3);
  CHECK(m.numerator.size() == 1);
  CHECK(m.denominator.size() == 1);
  CHECK(m.numerator.coeff({0}) == doctest::Approx(1000.0));
}

TEST_CASE("true supports of the benchmark states") {
  const OdeModel mm = make_benchmark(Benchmark::MichaelisMenten, default_parameters(Benchmark::MichaelisMenten));
  LibrarySpec spec;
  spec.d_num = spec.d_den = 4;
  const Eigen::VectorXd mm_xi = implicit_coefficients(mm, 0, spec);
  CHECK(nonzeros(mm_xi, 0, 5) == 2);
  CHECK(nonzeros(mm_xi, 5, 10) == 2);

  const OdeModel reg = make_benchmark(Benchmark::Regulatory, default_parameters(Benchmark::Regulatory));
  spec.d_num = spec.d_den = 6;
  const Eigen::VectorXd reg_xi = implicit_coefficients(reg, 1, spec);
  const std::size_t half = static_cast<std::size_t>(reg_xi.size()) / 2;
  CHECK(nonzeros(reg_xi, 0, half) == 4);
  CHECK(nonzeros(reg_xi, half, 2 * half) == 6);
  spec.d_num = spec.d_den = 4;
  CHECK(kind_of([&] { implicit_coefficients(reg, 1, spec); }) == ErrorKind::DegreeOverflow);

  const OdeModel gly = make_benchmark(Benchmark::Glycolysis, default_parameters(Benchmark::Glycolysis));
  spec.d_num = spec.d_den = 6;
  const Eigen::VectorXd g2 = implicit_coefficients(gly, 1, spec);
  CHECK(nonzeros(g2, 0, 1716) == 5);
  CHECK(nonzeros(g2, 1716, 3432) == 2);
  const Eigen::VectorXd g6 = implicit_coefficients(gly, 5, spec);
  CHECK(nonzeros(g6, 0, 3432) == 9);
}

TEST_CASE("validating the true model against itself gives zero error") {
  const BenchmarkProfile prof = benchmark_profile(Benchmark::MichaelisMenten);
  const OdeModel mm = make_benchmark(Benchmark::MichaelisMenten, default_parameters(Benchmark::MichaelisMenten));
  const Fraction f = normalized_fraction(mm.rhs[0]);
  IdentifiedModel id;
  id.n_states = 1;
  RationalStateModel r;
  r.numerator = f.numerator;
  r.denominator = f.denominator;
  id.states.push_back(StateIdentification{0, r, {}});
  const ValidationReport rep = validate_model(id, mm, {Eigen::VectorXd::Constant(1, 0.8)}, uniform_grid(0, 5, 200), &prof);
  REQUIRE(rep.trajectories.size() == 1);
  CHECK_FALSE(rep.trajectories[0].diverged);
  CHECK(rep.worst_trajectory_error() <= 1e-12);
  REQUIRE(rep.parameters.size() == 3);
  CHECK(rep.worst_parameter_error() <= 1e-12);
}

TEST_CASE("a model with a pole in the validation window is reported as diverged") {
  const OdeModel mm = make_benchmark(Benchmark::MichaelisMenten, default_parameters(Benchmark::MichaelisMenten));
  IdentifiedModel id;
  id.n_states = 1;
  RationalStateModel r;
  r.numerator = Polynomial::constant(1, 1.0);
  r.denominator = Polynomial::constant(1, 1.0);
  r.denominator.add_term({1}, -1.0);  // 1 / (1 - x) reaches its pole
  id.states.push_back(StateIdentification{0, r, {}});
  const ValidationReport rep = validate_model(id, mm, {Eigen::VectorXd::Constant(1, 0.5)}, uniform_grid(0, 5, 100));
  CHECK(rep.trajectories[0].diverged);
  CHECK(std::isinf(rep.worst_trajectory_error()));
}
