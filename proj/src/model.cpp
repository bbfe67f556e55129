#include "frailtycr/model.hpp"

namespace frailtycr {

namespace {

const FrailtySpec& innermost_law(const FrailtySpec& spec) {
  if (const auto* rs = std::get_if<GeneralRescaled>(&spec.law))
    if (rs->base) return innermost_law(*rs->base);
  return spec;
}

}  // namespace

bool has_common_hazards(const HazardSet& hs) {
  for (const auto* causes : {&hs.individual1, &hs.individual2})
    for (const auto& hz : *causes)
      if (!hazards_equal(hz, causes->front())) return false;
  return true;
}

void validate_model(const ModelSpec& m) {
  validate_hazard_set(m.hazards);
  require_valid_frailty(m.frailty, m.num_causes(1), m.num_causes(2));
  if (std::get_if<DirichletGamma>(&innermost_law(m.frailty).law) && !has_common_hazards(m.hazards))
    throw ParameterError(
        "dirichlet frailty requires one common baseline hazard per individual (identical across "
        "causes)");
}

void validate_point(const ModelSpec& m, const EvalPoint& p) {
  if (p.t1 < 0.0 || p.t2 < 0.0) throw ParameterError("evaluation times must be >= 0");
  if (p.j1 < 1 || p.j1 > m.num_causes(1))
    throw ParameterError("cause index j1 out of range 1.." + std::to_string(m.num_causes(1)));
  if (p.j2 < 1 || p.j2 > m.num_causes(2))
    throw ParameterError("cause index j2 out of range 1.." + std::to_string(m.num_causes(2)));
}

}  // namespace frailtycr
