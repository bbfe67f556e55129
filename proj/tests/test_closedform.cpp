#include <doctest.h>

#include <cmath>

#include "frailtycr/closedform.hpp"
#include "frailtycr/rng.hpp"
#include "test_support.hpp"

using namespace frailtycr;
using frailtycr::testing::single_cause_model;

namespace {

// Every law at small parameter values, on a two-cause hazard set, used by the
// property checks below.
std::vector<ModelSpec> property_models() {
  HazardSet hs;
  hs.individual1 = {ParametricHazard::weibull(1.5, 1.0), ParametricHazard::constant(0.8)};
  hs.individual2 = {ParametricHazard::gompertz(0.5, 0.6), ParametricHazard::weibull(2.0, 1.2)};
  HazardSet common;
  common.individual1 = {ParametricHazard::weibull(1.4, 1.1), ParametricHazard::weibull(1.4, 1.1)};
  common.individual2 = {ParametricHazard::constant(0.9), ParametricHazard::constant(0.9)};

  std::vector<ModelSpec> models;
  models.push_back({hs, FrailtySpec::shared_gamma(0.8)});
  models.push_back({hs, FrailtySpec::correlated_gamma(0.7, 0.9, 0.5)});
  models.push_back({hs, FrailtySpec::shared_cause_specific({0.6, 1.0})});
  models.push_back({hs, FrailtySpec::correlated_cause_specific({0.7, 0.5}, {0.6, 0.9},
                                                               {0.4, 0.45})});
  models.push_back({common, FrailtySpec::dirichlet_gamma({1.0, 2.0}, {1.5, 0.7}, 0.8)});
  models.push_back({hs, FrailtySpec::rescaled(FrailtySpec::shared_cause_specific({0.6, 1.0}),
                                              2.0, 0.5)});
  return models;
}

}  // namespace

TEST_SUITE("closedform") {

TEST_CASE("shared Gamma single-cause marginal has the explicit form") {
  for (double sigma : {0.5, 1.0, 2.0}) {
    const ModelSpec m = testing::shared_unit_constant_model(sigma);
    for (double t : {0.1, 0.5, 1.0, 2.0, 5.0}) {
      const double expected = 1.0 - std::pow(1.0 + sigma * sigma * t, -1.0 / (sigma * sigma));
      CHECK(marginal_subdist(m, 1, 1, t) == doctest::Approx(expected).epsilon(1e-9));
    }
  }
  CHECK(marginal_subdist(testing::shared_unit_constant_model(1.0), 1, 1, 1.0) ==
        doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("marginal and joint sub-distributions vanish at t = 0") {
  for (const auto& m : property_models()) {
    CHECK(marginal_subdist(m, 1, 1, 0.0) == 0.0);
    CHECK(joint_subdist(m, {0.0, 1.0, 1, 1}) == 0.0);
    CHECK(joint_subdist(m, {1.0, 0.0, 1, 2}) == 0.0);
  }
}

TEST_CASE("symmetric shared cause-specific marginals split the mass evenly") {
  ModelSpec m;
  m.hazards.individual1 = {ParametricHazard::constant(1.0), ParametricHazard::constant(1.0)};
  m.hazards.individual2 = m.hazards.individual1;
  m.frailty = FrailtySpec::shared_cause_specific({1.0, 1.0});
  // t large enough that the remaining mass is far below the tolerance.
  const double t = 1e6;
  const double f1 = marginal_subdist(m, 1, 1, t);
  const double f2 = marginal_subdist(m, 1, 2, t);
  CHECK(f1 == doctest::Approx(f2).epsilon(1e-10));
  CHECK(f1 + f2 == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("dirichlet joint closed form at the unit-hazard point") {
  ModelSpec m;
  m.hazards.individual1 = {ParametricHazard::constant(1.0), ParametricHazard::constant(1.0)};
  m.hazards.individual2 = m.hazards.individual1;
  m.frailty = FrailtySpec::dirichlet_gamma({1.0, 1.0}, {2.0, 2.0}, 1.0);
  // H1 = H2 = 1: (1/2)(1/2)[1 - 1/2 - 1/2 + 1/3] = 1/12.
  for (int j1 : {1, 2})
    for (int j2 : {1, 2})
      CHECK(joint_subdist(m, {1.0, 1.0, j1, j2}) ==
            doctest::Approx(1.0 / 12.0).epsilon(1e-13));
}

TEST_CASE("shared Gamma joint sub-distribution matches its exact antiderivative") {
  const ModelSpec m = testing::shared_unit_constant_model(1.0);
  // For sigma=1 and unit constant hazards the double integral is explicit:
  // F(t1,t2) = 1 - 1/(1+t1) - 1/(1+t2) + 1/(1+t1+t2).
  for (double t1 : {0.3, 1.0, 2.5}) {
    for (double t2 : {0.4, 1.0, 3.0}) {
      const double expected = 1.0 - 1.0 / (1.0 + t1) - 1.0 / (1.0 + t2) + 1.0 / (1.0 + t1 + t2);
      CHECK(joint_subdist(m, {t1, t2, 1, 1}) == doctest::Approx(expected).epsilon(1e-8));
    }
  }
}

TEST_CASE("shared Gamma joint sub-density closed form") {
  const ModelSpec m = testing::shared_unit_constant_model(1.0);
  CHECK(joint_subdensity(m, {1.0, 1.0, 1, 1}) ==
        doctest::Approx(2.0 / 27.0).epsilon(1e-12));
  for (double t1 : {0.2, 1.0, 2.0})
    for (double t2 : {0.5, 1.5, 3.0})
      CHECK(joint_subdensity(m, {t1, t2, 1, 1}) ==
            doctest::Approx(2.0 / std::pow(1.0 + t1 + t2, 3.0)).epsilon(1e-12));
}

TEST_CASE("correlated law collapses to the shared law at the equal-sigma corner") {
  const double sigma = 0.8;
  const ModelSpec shared = single_cause_model(ParametricHazard::weibull(1.5, 1.0),
                                              ParametricHazard::constant(0.7),
                                              FrailtySpec::shared_gamma(sigma));
  const ModelSpec corr = single_cause_model(ParametricHazard::weibull(1.5, 1.0),
                                            ParametricHazard::constant(0.7),
                                            FrailtySpec::correlated_gamma(sigma, sigma,
                                                                          1.0 - 1e-7));
  const ModelSpec ccs = single_cause_model(ParametricHazard::weibull(1.5, 1.0),
                                           ParametricHazard::constant(0.7),
                                           FrailtySpec::correlated_cause_specific(
                                               {sigma}, {sigma}, {1.0 - 1e-7}));
  for (double t1 : {0.5, 1.0, 2.0}) {
    for (double t2 : {0.4, 1.3}) {
      const double f_shared = joint_subdensity(shared, {t1, t2, 1, 1});
      CHECK(joint_subdensity(corr, {t1, t2, 1, 1}) ==
            doctest::Approx(f_shared).epsilon(1e-4));
      // L=1 correlated cause-specific is the correlated law itself.
      CHECK(joint_subdensity(ccs, {t1, t2, 1, 1}) ==
            doctest::Approx(joint_subdensity(corr, {t1, t2, 1, 1})).epsilon(1e-12));
    }
  }
}

TEST_CASE("joint survival closed forms at unit cumulative hazards") {
  const ModelSpec corr = single_cause_model(ParametricHazard::constant(1.0),
                                            ParametricHazard::constant(1.0),
                                            FrailtySpec::correlated_gamma(1.0, 1.0, 0.5));
  CHECK(joint_survival(corr, 1.0, 1.0) ==
        doctest::Approx(std::pow(3.0, -0.5) / 2.0).epsilon(1e-12));

  const ModelSpec shared = testing::shared_unit_constant_model(1.0);
  CHECK(joint_survival(shared, 1.0, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  for (const auto& m : property_models()) CHECK(joint_survival(m, 0.0, 0.0) == 1.0);
}

TEST_CASE("normalization: all cause pairs sum to one at exhausted hazards") {
  // Small frailty variances keep the survival tail below the tolerance at
  // total cumulative hazard 40.
  HazardSet hs;
  hs.individual1 = {ParametricHazard::weibull(1.5, 1.0), ParametricHazard::constant(0.8)};
  hs.individual2 = {ParametricHazard::constant(0.9), ParametricHazard::weibull(1.3, 1.2)};
  HazardSet common;
  common.individual1 = {ParametricHazard::weibull(1.4, 1.1), ParametricHazard::weibull(1.4, 1.1)};
  common.individual2 = {ParametricHazard::constant(0.9), ParametricHazard::constant(0.9)};

  std::vector<ModelSpec> models;
  models.push_back({hs, FrailtySpec::shared_gamma(0.25)});
  models.push_back({hs, FrailtySpec::correlated_gamma(0.25, 0.3, 0.5)});
  models.push_back({hs, FrailtySpec::shared_cause_specific({0.3, 0.3})});
  models.push_back({hs, FrailtySpec::correlated_cause_specific({0.3, 0.3}, {0.3, 0.3},
                                                               {0.5, 0.5})});
  models.push_back({common, FrailtySpec::dirichlet_gamma({1.0, 2.0}, {1.5, 0.7}, 0.25)});
  models.push_back({hs, FrailtySpec::rescaled(FrailtySpec::shared_cause_specific({0.3, 0.3}),
                                              2.0, 0.5)});

  for (const auto& m : models) {
    const ModelSpec reduced = reduce_rescaled(m);
    const bool dirichlet = std::get_if<DirichletGamma>(&reduced.frailty.law) != nullptr;
    double t1, t2;
    if (dirichlet) {
      // The common-hazard law exhausts when the per-cause hazard reaches 40.
      t1 = inverse_cumulative_hazard(reduced.hazards.individual1.front(), 40.0);
      t2 = inverse_cumulative_hazard(reduced.hazards.individual2.front(), 40.0);
    } else {
      const std::vector<double> ones1(reduced.hazards.individual1.size(), 1.0);
      const std::vector<double> ones2(reduced.hazards.individual2.size(), 1.0);
      t1 = total_inverse(reduced.hazards, 1, ones1, 40.0);
      t2 = total_inverse(reduced.hazards, 2, ones2, 40.0);
    }
    double total = 0.0;
    for (int j1 = 1; j1 <= m.num_causes(1); ++j1)
      for (int j2 = 1; j2 <= m.num_causes(2); ++j2)
        total += joint_subdist(reduced, {t1, t2, j1, j2});
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("joint sub-distribution is consistent with the marginals") {
  for (const auto& m : property_models()) {
    // Summing the joint over one individual's causes at an exhausted time
    // recovers the other individual's marginal. Gamma frailty leaves a
    // polynomial survival tail, so the exhaustion point is chosen from the
    // model's own survival function rather than a fixed hazard level.
    const std::vector<double> ones2(static_cast<std::size_t>(m.num_causes(2)), 1.0);
    const ModelSpec reduced = reduce_rescaled(m);
    const bool dirichlet = std::get_if<DirichletGamma>(&reduced.frailty.law) != nullptr;
    double target = 60.0, t2_inf = 0.0;
    for (int tries = 0; tries < 40; ++tries) {
      t2_inf = dirichlet
                   ? inverse_cumulative_hazard(reduced.hazards.individual2.front(), target)
                   : total_inverse(reduced.hazards, 2, ones2, target);
      if (joint_survival(reduced, 0.0, t2_inf) < 1e-9) break;
      target *= 2.0;
    }
    for (double t1 : {0.4, 1.1}) {
      for (int j1 = 1; j1 <= m.num_causes(1); ++j1) {
        double joint_sum = 0.0;
        for (int j2 = 1; j2 <= m.num_causes(2); ++j2)
          joint_sum += joint_subdist(reduced, {t1, t2_inf, j1, j2}, {1e-10, 1e-9, 2000000});
        const double marginal = marginal_subdist(reduced, 1, j1, t1);
        CHECK(joint_sum == doctest::Approx(marginal).epsilon(5e-7));
      }
    }
  }
}

TEST_CASE("Frechet upper bound holds at every tested point") {
  RngStream rng(777);
  for (const auto& m : property_models()) {
    for (int i = 0; i < 10; ++i) {
      const double t1 = 0.2 + 2.0 * rng.uniform();
      const double t2 = 0.2 + 2.0 * rng.uniform();
      const int j1 = 1 + static_cast<int>(rng.next_u64() % 2);
      const int j2 = 1 + static_cast<int>(rng.next_u64() % 2);
      const double joint = joint_subdist(m, {t1, t2, j1, j2});
      const double m1 = marginal_subdist(m, 1, j1, t1);
      const double m2 = marginal_subdist(m, 2, j2, t2);
      CHECK(joint <= std::min(m1, m2) + 1e-8);
    }
  }
}

TEST_CASE("sigma -> 0 degenerates to the independence model") {
  HazardSet hs;
  hs.individual1 = {ParametricHazard::weibull(1.5, 1.0), ParametricHazard::constant(0.8)};
  hs.individual2 = {ParametricHazard::constant(0.9), ParametricHazard::weibull(1.3, 1.2)};
  const ModelSpec m{hs, FrailtySpec::shared_gamma(1e-4)};

  // Unit-frailty factors computed by direct quadrature in the test.
  auto unit_marginal = [&](int k, int j, double t) {
    return integrate_1d(
               [&](double u) {
                 return hazard_value(hs.causes(k)[static_cast<std::size_t>(j - 1)], u) *
                        std::exp(-hs.total_cumulative(k, u));
               },
               0.0, t, 1e-12)
        .value;
  };
  for (double t1 : {0.5, 1.5}) {
    for (double t2 : {0.7, 2.0}) {
      for (int j1 : {1, 2}) {
        for (int j2 : {1, 2}) {
          const double independent = unit_marginal(1, j1, t1) * unit_marginal(2, j2, t2);
          CHECK(joint_subdist(m, {t1, t2, j1, j2}) ==
                doctest::Approx(independent).epsilon(1e-3));
        }
      }
    }
  }
}

TEST_CASE("inclusion-exclusion ties survival, marginals and the joint together") {
  for (const auto& m : property_models()) {
    for (double t1 : {0.5, 1.2}) {
      for (double t2 : {0.6, 1.5}) {
        double p1 = 0.0, p2 = 0.0, p12 = 0.0;
        for (int j = 1; j <= m.num_causes(1); ++j) p1 += marginal_subdist(m, 1, j, t1);
        for (int j = 1; j <= m.num_causes(2); ++j) p2 += marginal_subdist(m, 2, j, t2);
        for (int j1 = 1; j1 <= m.num_causes(1); ++j1)
          for (int j2 = 1; j2 <= m.num_causes(2); ++j2)
            p12 += joint_subdist(m, {t1, t2, j1, j2});
        const double lhs = joint_survival(m, t1, t2);
        CHECK(lhs == doctest::Approx(1.0 - p1 - p2 + p12).epsilon(1e-7));
      }
    }
  }
}

TEST_CASE("joint sub-distribution is monotone and survival is antitone") {
  for (const auto& m : property_models()) {
    const ClosedFormEvaluator eval(m);
    double prev_f = -1.0, prev_s = 2.0;
    for (int g = 1; g <= 8; ++g) {
      const double t = 0.3 * g;
      const double f = eval.joint_subdist({t, 0.8 + 0.1 * t, 1, 2});
      const double s = eval.joint_survival(t, 0.8 + 0.1 * t);
      CHECK(f >= prev_f - 1e-9);
      CHECK(s <= prev_s + 1e-12);
      prev_f = f;
      prev_s = s;
    }
  }
}

TEST_CASE("weibull shapes below one evaluate correctly despite the edge singularity") {
  // h(t) ~ t^(shape-1) diverges at 0; the substituted quadrature still
  // integrates it, and the exact single-cause shared-Gamma form is known.
  for (double shape : {0.7, 0.4}) {
    ModelSpec m;
    m.hazards.individual1 = {ParametricHazard::weibull(shape, 1.0)};
    m.hazards.individual2 = {ParametricHazard::weibull(shape, 1.0)};
    m.frailty = FrailtySpec::shared_gamma(1.0);
    for (double t : {0.4, 1.0, 2.2}) {
      const double H = std::pow(t, shape);
      CHECK(marginal_subdist(m, 1, 1, t) ==
            doctest::Approx(1.0 - 1.0 / (1.0 + H)).epsilon(1e-8));
    }
    // Joint against the same explicit antiderivative as the unit-rate case.
    const double H1 = std::pow(1.3, shape), H2 = std::pow(0.6, shape);
    const double expected = 1.0 - 1.0 / (1.0 + H1) - 1.0 / (1.0 + H2) + 1.0 / (1.0 + H1 + H2);
    CHECK(joint_subdist(m, {1.3, 0.6, 1, 1}) == doctest::Approx(expected).epsilon(1e-7));
  }
}

TEST_CASE("mixed finite difference of the joint recovers the density") {
  const EvalOptions tight{1e-12, 1e-13, 4000000};
  for (const auto& m : property_models()) {
    const ClosedFormEvaluator eval(m, tight);
    const double t1 = 1.0, t2 = 1.0, delta = 1e-4;
    const double fd = (eval.joint_subdist({t1 + delta, t2 + delta, 1, 2}) -
                       eval.joint_subdist({t1 + delta, t2 - delta, 1, 2}) -
                       eval.joint_subdist({t1 - delta, t2 + delta, 1, 2}) +
                       eval.joint_subdist({t1 - delta, t2 - delta, 1, 2})) /
                      (4.0 * delta * delta);
    const double f = eval.joint_subdensity({t1, t2, 1, 2});
    CHECK(fd == doctest::Approx(f).epsilon(1e-4));
  }
}

}  // TEST_SUITE
