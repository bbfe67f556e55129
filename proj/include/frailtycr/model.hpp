#pragma once

#include "frailtycr/frailty.hpp"
#include "frailtycr/hazards.hpp"

namespace frailtycr {

// The complete joint law of (T1, T2, J1, J2): conditional cause-specific
// intensities h^(k)_0j(t) * eps^(k)_j with the frailty vector drawn once per
// pair.
struct ModelSpec {
  HazardSet hazards;
  FrailtySpec frailty;

  int num_causes(int k) const { return hazards.num_causes(k); }
};

struct EvalPoint {
  double t1 = 0.0, t2 = 0.0;
  int j1 = 1, j2 = 1;  // 1-based cause indices
};

// Throws ParameterError when the hazards are invalid, the frailty law is
// incompatible with the cause counts, or a Dirichlet law is paired with
// hazards that differ across causes within an individual (that law requires
// one common baseline hazard per individual).
void validate_model(const ModelSpec& m);

void validate_point(const ModelSpec& m, const EvalPoint& p);

// True when every cause within each individual carries an identical hazard.
bool has_common_hazards(const HazardSet& hs);

}  // namespace frailtycr
