#include <doctest.h>

#include "frailtycr/io_json.hpp"
#include "test_support.hpp"

using namespace frailtycr;
using nlohmann::json;

TEST_SUITE("io") {

TEST_CASE("model JSON round trip preserves every law") {
  std::vector<ModelSpec> models;
  {
    HazardSet hs;
    hs.individual1 = {ParametricHazard::weibull(1.5, 1.0), ParametricHazard::constant(0.8)};
    hs.individual2 = {ParametricHazard::gompertz(0.5, 0.6), ParametricHazard::weibull(2.0, 1.2)};
    models.push_back({hs, FrailtySpec::shared_gamma(0.7)});
    models.push_back({hs, FrailtySpec::correlated_gamma(0.8, 0.6, 0.5)});
    models.push_back({hs, FrailtySpec::shared_cause_specific({0.5, 0.9})});
    models.push_back({hs, FrailtySpec::correlated_cause_specific({0.7, 0.5}, {0.6, 0.8},
                                                                 {0.4, 0.3})});
    models.push_back({hs, FrailtySpec::rescaled(FrailtySpec::shared_cause_specific({0.5, 0.9}),
                                                2.0, 3.0)});
    HazardSet common;
    common.individual1 = {ParametricHazard::weibull(1.4, 1.1),
                          ParametricHazard::weibull(1.4, 1.1)};
    common.individual2 = {ParametricHazard::constant(0.9), ParametricHazard::constant(0.9)};
    models.push_back({common, FrailtySpec::dirichlet_gamma({1.0, 2.0}, {1.5, 0.7}, 0.8)});
  }
  for (const auto& m : models) {
    const ModelSpec back = model_from_string(model_to_compact_string(m));
    CHECK(model_to_compact_string(back) == model_to_compact_string(m));
  }
}

TEST_CASE("hazard JSON uses the documented key names") {
  const json j = hazard_to_json(ParametricHazard::weibull(2.0, 1.0));
  CHECK(j.at("family") == "weibull");
  CHECK(j.at("shape") == 2.0);
  CHECK(j.at("scale") == 1.0);
  const ParametricHazard hz = hazard_from_json(
      json::parse(R"({"family":"gompertz","a":0.4,"c":0.3})"), "hz");
  CHECK(hz.family == HazardFamily::Gompertz);
  CHECK(hz.a == 0.4);
}

TEST_CASE("parse errors name the JSON path") {
  auto expect_path = [](const char* text, const char* fragment) {
    try {
      model_from_string(text);
      FAIL_CHECK("expected ParameterError for ", text);
    } catch (const ParameterError& e) {
      CHECK(std::string(e.what()).find(fragment) != std::string::npos);
    }
  };
  expect_path(R"({"frailty":{"law":"shared_gamma","sigma":0.5}})", "model.hazards");
  expect_path(
      R"({"hazards":{"individual1":[{"family":"weibull","shape":2.0,"scale":1.0}],
           "individual2":[{"family":"weibull","shape":2.0}]},
          "frailty":{"law":"shared_gamma","sigma":0.5}})",
      "model.hazards.individual2[0].scale");
  expect_path(
      R"({"hazards":{"individual1":[{"family":"weibull","shape":2.0,"scale":1.0}],
           "individual2":[{"family":"weibull","shape":2.0,"scale":1.0}]},
          "frailty":{"law":"shared_gamma","sigma":-1.0}})",
      "model.frailty.sigma");
  expect_path(
      R"({"hazards":{"individual1":[{"family":"weibul","shape":2.0,"scale":1.0}],
           "individual2":[{"family":"weibull","shape":2.0,"scale":1.0}]},
          "frailty":{"law":"shared_gamma","sigma":0.5}})",
      "family");
}

TEST_CASE("grid axes accept lists and start/stop/count specs") {
  const auto list = grid_axis_from_json(json::parse("[0.5, 1.0, 2.0]"), "grid.t1");
  CHECK(list == std::vector<double>{0.5, 1.0, 2.0});

  const auto lin = grid_axis_from_json(
      json::parse(R"({"start":1.0,"stop":3.0,"count":3,"spacing":"linear"})"), "grid.t1");
  CHECK(lin == std::vector<double>{1.0, 2.0, 3.0});

  const auto log_axis = grid_axis_from_json(
      json::parse(R"({"start":0.1,"stop":10.0,"count":3,"spacing":"log"})"), "grid.t2");
  CHECK(log_axis[1] == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(grid_axis_from_json(
                      json::parse(R"({"start":1.0,"stop":3.0,"count":3,"spacing":"cubic"})"),
                      "grid.t1"),
                  ParameterError);
}

TEST_CASE("dirichlet models require common hazards per individual") {
  const char* text =
      R"({"hazards":{"individual1":[{"family":"weibull","shape":2.0,"scale":1.0},
                                    {"family":"weibull","shape":1.5,"scale":1.0}],
           "individual2":[{"family":"constant","rate":1.0},{"family":"constant","rate":1.0}]},
          "frailty":{"law":"dirichlet_gamma","alpha1":[1.0,2.0],"alpha2":[1.0,1.0],"sigma":0.5}})";
  CHECK_THROWS_AS(model_from_string(text), ParameterError);
}

}  // TEST_SUITE
