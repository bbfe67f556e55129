#pragma once

#include <span>
#include <string>
#include <vector>

#include "frailtycr/errors.hpp"

namespace frailtycr {

enum class HazardFamily { Constant, Weibull, Gompertz };

// One baseline cause-specific hazard with closed-form cumulative hazard and
// inverse. Conventions:
//   Constant:  h(t) = rate,            H(t) = rate * t
//   Weibull:   H(t) = (t/scale)^shape, h(t) = (shape/scale) * (t/scale)^(shape-1)
//   Gompertz:  h(t) = a * exp(c*t),    H(t) = (a/c) * (exp(c*t) - 1)
// All parameters strictly positive, so H is continuous, strictly increasing,
// H(0)=0 and H(t) -> infinity.
struct ParametricHazard {
  HazardFamily family = HazardFamily::Constant;
  double rate = 1.0;                // constant
  double shape = 1.0, scale = 1.0;  // weibull
  double a = 1.0, c = 1.0;          // gompertz

  static ParametricHazard constant(double rate);
  static ParametricHazard weibull(double shape, double scale);
  static ParametricHazard gompertz(double a, double c);
};

void validate_hazard(const ParametricHazard& hz);
bool hazards_equal(const ParametricHazard& x, const ParametricHazard& y);
std::string hazard_family_name(HazardFamily family);

double hazard_value(const ParametricHazard& hz, double t);
double cumulative_hazard(const ParametricHazard& hz, double t);
// Returns t with H(t) = y, closed form, relative error <= 1e-12.
double inverse_cumulative_hazard(const ParametricHazard& hz, double y);
// Hazard scaled by a positive factor m, i.e. h'(t) = m*h(t); every family is
// closed under this operation.
ParametricHazard scale_hazard(const ParametricHazard& hz, double m);
// Power b with h(t) ~ t^(b-1) as t -> 0 (Weibull: shape; otherwise 1). Time
// quadratures substitute u = t*v^p with p chosen so the integrand stays
// bounded at the origin.
double hazard_zero_order(const ParametricHazard& hz);
int substitution_power(double zero_order);

// Per-individual collections of baseline cause-specific hazards.
struct HazardSet {
  std::vector<ParametricHazard> individual1, individual2;

  const std::vector<ParametricHazard>& causes(int k) const {
    if (k == 1) return individual1;
    if (k == 2) return individual2;
    throw ParameterError("individual index must be 1 or 2");
  }
  int num_causes(int k) const { return static_cast<int>(causes(k).size()); }
  double cause_cumulative(int k, int j, double t) const {  // j is 1-based
    return cumulative_hazard(causes(k).at(static_cast<std::size_t>(j - 1)), t);
  }
  double total_cumulative(int k, double t) const;
};

void validate_hazard_set(const HazardSet& hs);

// Solves sum_j weights[j] * H_j(t) = y for t (weights >= 0, not all zero),
// by exponential bracketing followed by safeguarded Newton iteration, to
// |A(t) - y| <= 1e-10 * max(1, y).
double total_inverse(const HazardSet& hs, int k, std::span<const double> weights, double y);

}  // namespace frailtycr
