#include "isindy/benchmarks.hpp"

#include <algorithm>
#include <random>

#include "isindy/error.hpp"

namespace isindy {

namespace {

/// Exponent vector over n variables from (0-based index, power) pairs.
Exponents mono(std::size_t n, std::initializer_list<std::pair<std::size_t, int>> factors) {
  Exponents e(n, 0);
  for (auto [i, p] : factors) e[i] += p;
  return e;
}

Polynomial poly(std::size_t n, std::initializer_list<std::pair<Exponents, double>> terms) {
  Polynomial p(n);
  for (const auto& [e, c] : terms) p.add_term(e, c);
  return p;
}

class ParamReader {
 public:
  ParamReader(Benchmark b, const ParameterMap& params) : benchmark_(b), params_(params) {}

  double operator()(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end()) {
      throw Error(ErrorKind::MissingParameter,
                  "benchmark " + std::string(to_string(benchmark_)) + " requires parameter '" + name + "'");
    }
    return it->second;
  }

 private:
  Benchmark benchmark_;
  const ParameterMap& params_;
};

OdeModel michaelis_menten(const ParamReader& p) {
  constexpr std::size_t n = 1;
  const double jx = p("j_x"), vmax = p("V_max"), km = p("K_m");
  OdeModel m{n, {}, {{"j_x", jx}, {"V_max", vmax}, {"K_m", km}}, {"x"}};
  // x' = j_x - V_max x / (K_m + x)
  m.rhs.push_back(StateRhs{{Fraction::polynomial(Polynomial::constant(n, jx)),
                            Fraction{poly(n, {{mono(n, {{0, 1}}), -vmax}}),
                                     poly(n, {{mono(n, {}), km}, {mono(n, {{0, 1}}), 1.0}})}}});
  return m;
}

OdeModel regulatory(const ParamReader& p) {
  constexpr std::size_t n = 2;
  const double a1 = p("a1"), a2 = p("a2"), a3 = p("a3"), b1 = p("b1"), b2 = p("b2");
  OdeModel m{n, {}, {{"a1", a1}, {"a2", a2}, {"a3", a3}, {"b1", b1}, {"b2", b2}}, {"x1", "x2"}};
  const Exponents one = mono(n, {});
  const Exponents x1 = mono(n, {{0, 1}});
  const Exponents x2 = mono(n, {{1, 1}});
  const Polynomial degradation = poly(n, {{one, 1.0}, {x1, 1.0}, {x2, 1.0}});
  // x1' = a1 + a2 x1^2 / (a3 + x1^2) - x1 / (1 + x1 + x2)
  m.rhs.push_back(StateRhs{{
      Fraction::polynomial(Polynomial::constant(n, a1)),
      Fraction{poly(n, {{mono(n, {{0, 2}}), a2}}), poly(n, {{one, a3}, {mono(n, {{0, 2}}), 1.0}})},
      Fraction{poly(n, {{x1, -1.0}}), degradation},
  }});
  // x2' = b1 / (1 + b2 x1^5) - x2 / (1 + x1 + x2)
  m.rhs.push_back(StateRhs{{
      Fraction{Polynomial::constant(n, b1), poly(n, {{one, 1.0}, {mono(n, {{0, 5}}), b2}})},
      Fraction{poly(n, {{x2, -1.0}}), degradation},
  }});
  return m;
}

OdeModel glycolysis(const ParamReader& p) {
  constexpr std::size_t n = 7;
  OdeModel m;
  m.n_states = n;
  m.state_names = {"x1", "x2", "x3", "x4", "x5", "x6", "x7"};
  for (const auto& name : parameter_names(Benchmark::Glycolysis)) m.params[name] = p(name);

  auto x = [](std::size_t i) { return mono(n, {{i - 1, 1}}); };
  auto xx = [](std::size_t i, std::size_t j) { return mono(n, {{i - 1, 1}, {j - 1, 1}}); };
  const Exponents one = mono(n, {});
  const Exponents x6_4 = mono(n, {{5, 4}});
  auto inhibited = [&](double num, double den) {
    return Fraction{poly(n, {{xx(1, 6), num}}), poly(n, {{one, 1.0}, {x6_4, den}})};
  };

  // x1' = c1 + c2 x1 x6 / (1 + c3 x6^4)
  m.rhs.push_back(StateRhs{{Fraction::polynomial(Polynomial::constant(n, p("c1"))), inhibited(p("c2"), p("c3"))}});
  // x2' = d1 x1 x6 / (1 + d2 x6^4) + d3 x2 + d4 x2 x7
  m.rhs.push_back(StateRhs{{inhibited(p("d1"), p("d2")),
                            Fraction::polynomial(poly(n, {{x(2), p("d3")}, {xx(2, 7), p("d4")}}))}});
  // x3' = e1 x2 + e2 x3 - e3 x2 x7 + e4 x3 x6
  m.rhs.push_back(StateRhs{{Fraction::polynomial(
      poly(n, {{x(2), p("e1")}, {x(3), p("e2")}, {xx(2, 7), -p("e3")}, {xx(3, 6), p("e4")}}))}});
  // x4' = f1 x3 + f2 x4 + f3 x5 + f4 x3 x6 + f5 x4 x7
  m.rhs.push_back(StateRhs{{Fraction::polynomial(poly(
      n, {{x(3), p("f1")}, {x(4), p("f2")}, {x(5), p("f3")}, {xx(3, 6), p("f4")}, {xx(4, 7), p("f5")}}))}});
  // x5' = g1 x4 + g2 x5
  m.rhs.push_back(StateRhs{{Fraction::polynomial(poly(n, {{x(4), p("g1")}, {x(5), p("g2")}}))}});
  // x6' = h1 x1 x6 / (1 + h2 x6^4) + h3 x3 + h4 x6 + h5 x3 x6
  m.rhs.push_back(StateRhs{{inhibited(p("h1"), p("h2")),
                            Fraction::polynomial(poly(n, {{x(3), p("h3")}, {x(6), p("h4")}, {xx(3, 6), p("h5")}}))}});
  // x7' = j1 x2 + j2 x2 x7 + j3 x4 x7
  m.rhs.push_back(
      StateRhs{{Fraction::polynomial(poly(n, {{x(2), p("j1")}, {xx(2, 7), p("j2")}, {xx(4, 7), p("j3")}}))}});
  return m;
}

ParameterFormula num(Exponents e, double sign = 1.0) {
  return [e = std::move(e), sign](const Fraction& f) { return sign * f.numerator.coeff(e); };
}

ParameterFormula den(Exponents e) {
  return [e = std::move(e)](const Fraction& f) { return f.denominator.coeff(e); };
}

}  // namespace

std::string_view to_string(Benchmark b) noexcept {
  switch (b) {
    case Benchmark::MichaelisMenten: return "michaelis_menten";
    case Benchmark::Regulatory: return "regulatory";
    case Benchmark::Glycolysis: return "glycolysis";
  }
  return "unknown";
}

Benchmark parse_benchmark(std::string_view name) {
  for (Benchmark b : {Benchmark::MichaelisMenten, Benchmark::Regulatory, Benchmark::Glycolysis}) {
    if (name == to_string(b)) return b;
  }
  throw Error(ErrorKind::UnknownBenchmark, "unknown benchmark '" + std::string(name) + "'");
}

std::string_view to_string(IdentificationMethod m) noexcept {
  switch (m) {
    case IdentificationMethod::Auto: return "auto";
    case IdentificationMethod::Implicit: return "implicit";
    case IdentificationMethod::Explicit: return "explicit";
  }
  return "unknown";
}

IdentificationMethod parse_method(std::string_view name) {
  for (auto m : {IdentificationMethod::Auto, IdentificationMethod::Implicit, IdentificationMethod::Explicit}) {
    if (name == to_string(m)) return m;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown identification method '" + std::string(name) + "'");
}

ParameterMap default_parameters(Benchmark b) {
  switch (b) {
    case Benchmark::MichaelisMenten:
      return {{"j_x", 0.6}, {"V_max", 1.5}, {"K_m", 0.3}};
    case Benchmark::Regulatory:
      return {{"a1", 0.004}, {"a2", 0.07}, {"a3", 0.04}, {"b1", 0.82}, {"b2", 1854.5}};
    case Benchmark::Glycolysis:
      return {{"c1", 2.5},  {"c2", -100.0},  {"c3", 13.6769}, {"d1", 200.0},  {"d2", 13.6769}, {"d3", -6.0},
              {"d4", -6.0}, {"e1", 6.0},     {"e2", -64.0},   {"e3", 6.0},    {"e4", 16.0},    {"f1", 64.0},
              {"f2", -13.0}, {"f3", 13.0},   {"f4", -16.0},   {"f5", -100.0}, {"g1", 1.3},     {"g2", -3.1},
              {"h1", -200.0}, {"h2", 13.6769}, {"h3", 128.0}, {"h4", -1.28},  {"h5", -32.0},   {"j1", 6.0},
              {"j2", -18.0}, {"j3", -100.0}};
  }
  throw Error(ErrorKind::UnknownBenchmark, "unknown benchmark");
}

std::vector<std::string> parameter_names(Benchmark b) {
  switch (b) {
    case Benchmark::MichaelisMenten: return {"j_x", "V_max", "K_m"};
    case Benchmark::Regulatory: return {"a1", "a2", "a3", "b1", "b2"};
    case Benchmark::Glycolysis:
      return {"c1", "c2", "c3", "d1", "d2", "d3", "d4", "e1", "e2", "e3", "e4", "f1", "f2",
              "f3", "f4", "f5", "g1", "g2", "h1", "h2", "h3", "h4", "h5", "j1", "j2", "j3"};
  }
  throw Error(ErrorKind::UnknownBenchmark, "unknown benchmark");
}

OdeModel make_benchmark(Benchmark b, const ParameterMap& params) {
  const ParamReader p(b, params);
  OdeModel m;
  switch (b) {
    case Benchmark::MichaelisMenten: m = michaelis_menten(p); break;
    case Benchmark::Regulatory: m = regulatory(p); break;
    case Benchmark::Glycolysis: m = glycolysis(p); break;
  }
  m.validate();
  return m;
}

OdeModel make_benchmark(std::string_view name, const ParameterMap& params) {
  return make_benchmark(parse_benchmark(name), params);
}

BenchmarkProfile benchmark_profile(Benchmark b) {
  BenchmarkProfile prof;
  prof.benchmark = b;
  switch (b) {
    case Benchmark::MichaelisMenten: {
      constexpr std::size_t n = 1;
      Eigen::VectorXd a(1), c(1);
      a << 0.5;
      c << 1.0;
      prof.explicit_ics = {a, c};
      prof.ic_ranges = {{0.1, 1.5}};
      prof.n_ics = 2;
      prof.samples = 1000;
      prof.plans = {StatePlan{IdentificationMethod::Implicit, 4, 0}};
      const Exponents one = mono(n, {}), x = mono(n, {{0, 1}});
      prof.correspondences = {
          {"j_x", 0, num(one)},
          {"K_m", 0, [x](const Fraction& f) { return 1.0 / f.denominator.coeff(x); }},
          {"V_max", 0,
           [one, x](const Fraction& f) {
             return f.numerator.coeff(one) - f.numerator.coeff(x) / f.denominator.coeff(x);
           }},
      };
      break;
    }
    case Benchmark::Regulatory: {
      constexpr std::size_t n = 2;
      prof.ic_ranges = {{0.0, 0.6}, {0.0, 6.0}};
      prof.n_ics = 40;
      prof.samples = 1000;
      prof.plans = {StatePlan{IdentificationMethod::Implicit, 6, 0}, StatePlan{IdentificationMethod::Implicit, 6, 0}};
      const Exponents one = mono(n, {}), x1sq = mono(n, {{0, 2}});
      prof.correspondences = {
          {"a1", 0, num(one)},
          {"a2", 0,
           [one, x1sq](const Fraction& f) {
             return f.numerator.coeff(x1sq) / f.denominator.coeff(x1sq) - f.numerator.coeff(one);
           }},
          {"a3", 0, [x1sq](const Fraction& f) { return 1.0 / f.denominator.coeff(x1sq); }},
          {"b1", 1, num(one)},
          {"b2", 1, den(mono(n, {{0, 5}}))},
      };
      break;
    }
    case Benchmark::Glycolysis: {
      constexpr std::size_t n = 7;
      // Short bursts from many initial conditions: the fast relaxation onto the
      // slow manifold otherwise leaves a degree-6 library nearly rank deficient.
      prof.ic_ranges = {{0.15, 1.6}, {0.19, 2.16}, {0.04, 0.2}, {0.1, 0.35}, {0.05, 0.1}, {0.14, 2.67}, {0.08, 0.3}};
      prof.n_ics = 1600;
      prof.t1 = 0.01;
      prof.samples = 10;
      prof.plans = {
          StatePlan{IdentificationMethod::Implicit, 4, 800, 1e-8},
          StatePlan{IdentificationMethod::Implicit, 6, 800, 1e-10},
          StatePlan{IdentificationMethod::Explicit, 2, 800},
          StatePlan{IdentificationMethod::Explicit, 2, 800},
          StatePlan{IdentificationMethod::Explicit, 2, 800},
          StatePlan{IdentificationMethod::Implicit, 6, 0, 1e-10},
          StatePlan{IdentificationMethod::Explicit, 2, 800},
      };
      auto x = [](std::size_t i) { return mono(n, {{i - 1, 1}}); };
      auto xx = [](std::size_t i, std::size_t j) { return mono(n, {{i - 1, 1}, {j - 1, 1}}); };
      const Exponents one = mono(n, {});
      const Exponents x6_4 = mono(n, {{5, 4}});
      prof.correspondences = {
          {"c1", 0, num(one)},      {"c2", 0, num(xx(1, 6))}, {"c3", 0, den(x6_4)},
          {"d1", 1, num(xx(1, 6))}, {"d2", 1, den(x6_4)},     {"d3", 1, num(x(2))},
          {"d4", 1, num(xx(2, 7))}, {"e1", 2, num(x(2))},     {"e2", 2, num(x(3))},
          {"e3", 2, num(xx(2, 7), -1.0)}, {"e4", 2, num(xx(3, 6))}, {"f1", 3, num(x(3))},
          {"f2", 3, num(x(4))},     {"f3", 3, num(x(5))},     {"f4", 3, num(xx(3, 6))},
          {"f5", 3, num(xx(4, 7))}, {"g1", 4, num(x(4))},     {"g2", 4, num(x(5))},
          {"h1", 5, num(xx(1, 6))}, {"h2", 5, den(x6_4)},     {"h3", 5, num(x(3))},
          {"h4", 5, num(x(6))},     {"h5", 5, num(xx(3, 6))}, {"j1", 6, num(x(2))},
          {"j2", 6, num(xx(2, 7))}, {"j3", 6, num(xx(4, 7))},
      };
      break;
    }
  }
  return prof;
}

std::vector<Eigen::VectorXd> sample_ics(const std::vector<StateRange>& ranges, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Eigen::VectorXd> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Eigen::VectorXd ic(static_cast<Eigen::Index>(ranges.size()));
    for (std::size_t j = 0; j < ranges.size(); ++j) {
      ic[static_cast<Eigen::Index>(j)] = ranges[j].lo + (ranges[j].hi - ranges[j].lo) * unit(rng);
    }
    out.push_back(std::move(ic));
  }
  return out;
}

std::vector<Eigen::VectorXd> benchmark_ics(const BenchmarkProfile& profile, std::size_t count, std::uint64_t seed) {
  std::vector<Eigen::VectorXd> out(profile.explicit_ics.begin(),
                                   profile.explicit_ics.begin() +
                                       static_cast<std::ptrdiff_t>(std::min(count, profile.explicit_ics.size())));
  if (out.size() < count) {
    if (profile.ic_ranges.empty()) throw Error(ErrorKind::InvalidArgument, "benchmark has no initial-condition ranges");
    auto drawn = sample_ics(profile.ic_ranges, count - out.size(), seed);
    out.insert(out.end(), drawn.begin(), drawn.end());
  }
  return out;
}

ParameterMap extract_parameters(const BenchmarkProfile& profile,
                                const std::vector<std::optional<Fraction>>& normalized_states) {
  ParameterMap out;
  for (const auto& c : profile.correspondences) {
    if (c.state_index >= normalized_states.size() || !normalized_states[c.state_index]) continue;
    out[c.name] = c.formula(*normalized_states[c.state_index]);
  }
  return out;
}

}  // namespace isindy
