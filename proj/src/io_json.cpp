#include "frailtycr/io_json.hpp"

#include <cmath>
#include <fstream>

namespace frailtycr {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& why) {
  throw ParameterError(path + ": " + why);
}

double require_positive(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) fail(path + "." + key, "missing required field");
  const auto& v = j.at(key);
  if (!v.is_number()) fail(path + "." + key, "must be a number");
  const double x = v.get<double>();
  if (!(x > 0.0) || !std::isfinite(x)) fail(path + "." + key, "must be a positive finite number");
  return x;
}

std::vector<double> require_positive_array(const json& j, const std::string& path,
                                           const char* key) {
  if (!j.contains(key)) fail(path + "." + key, "missing required field");
  const auto& v = j.at(key);
  if (!v.is_array() || v.empty()) fail(path + "." + key, "must be a non-empty array");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number())
      fail(path + "." + key + "[" + std::to_string(i) + "]", "must be a number");
    const double x = v[i].get<double>();
    if (!(x > 0.0) || !std::isfinite(x))
      fail(path + "." + key + "[" + std::to_string(i) + "]", "must be a positive finite number");
    out.push_back(x);
  }
  return out;
}

std::string require_string(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) fail(path + "." + key, "missing required field");
  if (!j.at(key).is_string()) fail(path + "." + key, "must be a string");
  return j.at(key).get<std::string>();
}

}  // namespace

json hazard_to_json(const ParametricHazard& hz) {
  json j;
  j["family"] = hazard_family_name(hz.family);
  switch (hz.family) {
    case HazardFamily::Constant:
      j["rate"] = hz.rate;
      break;
    case HazardFamily::Weibull:
      j["shape"] = hz.shape;
      j["scale"] = hz.scale;
      break;
    case HazardFamily::Gompertz:
      j["a"] = hz.a;
      j["c"] = hz.c;
      break;
  }
  return j;
}

ParametricHazard hazard_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "must be an object");
  const std::string family = require_string(j, path, "family");
  if (family == "constant") return ParametricHazard::constant(require_positive(j, path, "rate"));
  if (family == "weibull")
    return ParametricHazard::weibull(require_positive(j, path, "shape"),
                                     require_positive(j, path, "scale"));
  if (family == "gompertz")
    return ParametricHazard::gompertz(require_positive(j, path, "a"),
                                      require_positive(j, path, "c"));
  fail(path + ".family", "unknown hazard family '" + family +
                             "' (expected constant, weibull or gompertz)");
}

json frailty_to_json(const FrailtySpec& spec) {
  json j;
  if (const auto* sg = std::get_if<SharedGamma>(&spec.law)) {
    j["law"] = "shared_gamma";
    j["sigma"] = sg->sigma;
  } else if (const auto* cg = std::get_if<CorrelatedGamma>(&spec.law)) {
    j["law"] = "correlated_gamma";
    j["sigma1"] = cg->sigma1;
    j["sigma2"] = cg->sigma2;
    j["rho"] = cg->rho;
  } else if (const auto* scs = std::get_if<SharedCauseSpecific>(&spec.law)) {
    j["law"] = "shared_cause_specific";
    j["sigmas"] = scs->sigmas;
  } else if (const auto* ccs = std::get_if<CorrelatedCauseSpecific>(&spec.law)) {
    j["law"] = "correlated_cause_specific";
    j["sigma1"] = ccs->sigma1;
    j["sigma2"] = ccs->sigma2;
    j["rho"] = ccs->rho;
  } else if (const auto* dir = std::get_if<DirichletGamma>(&spec.law)) {
    j["law"] = "dirichlet_gamma";
    j["alpha1"] = dir->alpha1;
    j["alpha2"] = dir->alpha2;
    j["sigma"] = dir->sigma;
  } else if (const auto* rs = std::get_if<GeneralRescaled>(&spec.law)) {
    j["law"] = "rescaled";
    j["base"] = frailty_to_json(*rs->base);
    j["c1"] = rs->c1;
    j["c2"] = rs->c2;
  }
  return j;
}

FrailtySpec frailty_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "must be an object");
  const std::string law = require_string(j, path, "law");
  if (law == "shared_gamma") return FrailtySpec::shared_gamma(require_positive(j, path, "sigma"));
  if (law == "correlated_gamma")
    return FrailtySpec::correlated_gamma(require_positive(j, path, "sigma1"),
                                         require_positive(j, path, "sigma2"),
                                         require_positive(j, path, "rho"));
  if (law == "shared_cause_specific")
    return FrailtySpec::shared_cause_specific(require_positive_array(j, path, "sigmas"));
  if (law == "correlated_cause_specific")
    return FrailtySpec::correlated_cause_specific(require_positive_array(j, path, "sigma1"),
                                                  require_positive_array(j, path, "sigma2"),
                                                  require_positive_array(j, path, "rho"));
  if (law == "dirichlet_gamma")
    return FrailtySpec::dirichlet_gamma(require_positive_array(j, path, "alpha1"),
                                        require_positive_array(j, path, "alpha2"),
                                        require_positive(j, path, "sigma"));
  if (law == "rescaled") {
    if (!j.contains("base")) fail(path + ".base", "missing required field");
    FrailtySpec base = frailty_from_json(j.at("base"), path + ".base");
    return FrailtySpec::rescaled(std::move(base), require_positive(j, path, "c1"),
                                 require_positive(j, path, "c2"));
  }
  fail(path + ".law", "unknown frailty law '" + law + "'");
}

json model_to_json(const ModelSpec& m) {
  json j;
  json hz;
  hz["individual1"] = json::array();
  hz["individual2"] = json::array();
  for (const auto& h : m.hazards.individual1) hz["individual1"].push_back(hazard_to_json(h));
  for (const auto& h : m.hazards.individual2) hz["individual2"].push_back(hazard_to_json(h));
  j["hazards"] = hz;
  j["frailty"] = frailty_to_json(m.frailty);
  return j;
}

ModelSpec model_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "must be an object");
  if (!j.contains("hazards")) fail(path + ".hazards", "missing required field");
  if (!j.contains("frailty")) fail(path + ".frailty", "missing required field");
  const auto& hz = j.at("hazards");
  if (!hz.is_object()) fail(path + ".hazards", "must be an object");

  ModelSpec m;
  for (int k = 1; k <= 2; ++k) {
    const std::string key = "individual" + std::to_string(k);
    const std::string hz_path = path + ".hazards." + key;
    if (!hz.contains(key)) fail(hz_path, "missing required field");
    const auto& arr = hz.at(key);
    if (!arr.is_array() || arr.empty()) fail(hz_path, "must be a non-empty array of hazards");
    auto& out = (k == 1) ? m.hazards.individual1 : m.hazards.individual2;
    for (std::size_t i = 0; i < arr.size(); ++i)
      out.push_back(hazard_from_json(arr[i], hz_path + "[" + std::to_string(i) + "]"));
  }
  m.frailty = frailty_from_json(j.at("frailty"), path + ".frailty");
  validate_model(m);
  return m;
}

std::string model_to_compact_string(const ModelSpec& m) { return model_to_json(m).dump(); }

ModelSpec model_from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParameterError(std::string("model JSON parse error: ") + e.what());
  }
  return model_from_json(j);
}

ModelSpec model_from_file(const std::string& file) {
  return model_from_json(load_json_file(file), file);
}

json load_json_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ParseError("cannot open file: " + file);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(file + ": " + e.what());
  }
}

std::vector<double> grid_axis_from_json(const json& j, const std::string& path) {
  std::vector<double> out;
  if (j.is_array()) {
    if (j.empty()) fail(path, "grid axis array must be non-empty");
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_number()) fail(path + "[" + std::to_string(i) + "]", "must be a number");
      const double t = j[i].get<double>();
      if (!(t >= 0.0) || !std::isfinite(t))
        fail(path + "[" + std::to_string(i) + "]", "must be a finite nonnegative time");
      out.push_back(t);
    }
    return out;
  }
  if (!j.is_object()) fail(path, "must be an array of times or {start, stop, count, spacing}");
  const double start = require_positive(j, path, "start");
  const double stop = require_positive(j, path, "stop");
  if (!j.contains("count")) fail(path + ".count", "missing required field");
  if (!j.at("count").is_number_integer() || j.at("count").get<long>() < 1)
    fail(path + ".count", "must be a positive integer");
  const long count = j.at("count").get<long>();
  std::string spacing = "linear";
  if (j.contains("spacing")) spacing = require_string(j, path, "spacing");
  if (spacing != "linear" && spacing != "log")
    fail(path + ".spacing", "must be 'linear' or 'log'");
  if (stop < start) fail(path + ".stop", "must be >= start");

  out.reserve(static_cast<std::size_t>(count));
  if (count == 1) {
    out.push_back(start);
    return out;
  }
  for (long i = 0; i < count; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(count - 1);
    if (spacing == "linear")
      out.push_back(start + frac * (stop - start));
    else
      out.push_back(start * std::exp(frac * std::log(stop / start)));
  }
  return out;
}

}  // namespace frailtycr
