#include "frailtycr/hazards.hpp"

#include <cmath>
#include <limits>

namespace frailtycr {

ParametricHazard ParametricHazard::constant(double rate) {
  ParametricHazard hz;
  hz.family = HazardFamily::Constant;
  hz.rate = rate;
  validate_hazard(hz);
  return hz;
}

ParametricHazard ParametricHazard::weibull(double shape, double scale) {
  ParametricHazard hz;
  hz.family = HazardFamily::Weibull;
  hz.shape = shape;
  hz.scale = scale;
  validate_hazard(hz);
  return hz;
}

ParametricHazard ParametricHazard::gompertz(double a, double c) {
  ParametricHazard hz;
  hz.family = HazardFamily::Gompertz;
  hz.a = a;
  hz.c = c;
  validate_hazard(hz);
  return hz;
}

void validate_hazard(const ParametricHazard& hz) {
  switch (hz.family) {
    case HazardFamily::Constant:
      if (!(hz.rate > 0.0)) throw ParameterError("constant hazard requires rate > 0");
      return;
    case HazardFamily::Weibull:
      if (!(hz.shape > 0.0) || !(hz.scale > 0.0))
        throw ParameterError("weibull hazard requires shape > 0 and scale > 0");
      return;
    case HazardFamily::Gompertz:
      if (!(hz.a > 0.0) || !(hz.c > 0.0))
        throw ParameterError("gompertz hazard requires a > 0 and c > 0");
      return;
  }
  throw ParameterError("unknown hazard family");
}

bool hazards_equal(const ParametricHazard& x, const ParametricHazard& y) {
  if (x.family != y.family) return false;
  switch (x.family) {
    case HazardFamily::Constant: return x.rate == y.rate;
    case HazardFamily::Weibull: return x.shape == y.shape && x.scale == y.scale;
    case HazardFamily::Gompertz: return x.a == y.a && x.c == y.c;
  }
  return false;
}

std::string hazard_family_name(HazardFamily family) {
  switch (family) {
    case HazardFamily::Constant: return "constant";
    case HazardFamily::Weibull: return "weibull";
    case HazardFamily::Gompertz: return "gompertz";
  }
  return "unknown";
}

double hazard_value(const ParametricHazard& hz, double t) {
  validate_hazard(hz);
  if (t < 0.0) throw ParameterError("hazard evaluation requires t >= 0");
  switch (hz.family) {
    case HazardFamily::Constant:
      return hz.rate;
    case HazardFamily::Weibull: {
      if (hz.shape == 1.0) return 1.0 / hz.scale;
      // t=0 gives 0 for shape>1 and +inf for shape<1.
      return (hz.shape / hz.scale) * std::pow(t / hz.scale, hz.shape - 1.0);
    }
    case HazardFamily::Gompertz:
      return hz.a * std::exp(hz.c * t);
  }
  return 0.0;
}

double cumulative_hazard(const ParametricHazard& hz, double t) {
  validate_hazard(hz);
  if (t < 0.0) throw ParameterError("cumulative hazard requires t >= 0");
  switch (hz.family) {
    case HazardFamily::Constant:
      return hz.rate * t;
    case HazardFamily::Weibull:
      return std::pow(t / hz.scale, hz.shape);
    case HazardFamily::Gompertz:
      return (hz.a / hz.c) * std::expm1(hz.c * t);
  }
  return 0.0;
}

double inverse_cumulative_hazard(const ParametricHazard& hz, double y) {
  validate_hazard(hz);
  if (y < 0.0) throw ParameterError("inverse cumulative hazard requires y >= 0");
  switch (hz.family) {
    case HazardFamily::Constant:
      return y / hz.rate;
    case HazardFamily::Weibull:
      return hz.scale * std::pow(y, 1.0 / hz.shape);
    case HazardFamily::Gompertz:
      return std::log1p(hz.c * y / hz.a) / hz.c;
  }
  return 0.0;
}

ParametricHazard scale_hazard(const ParametricHazard& hz, double m) {
  if (!(m > 0.0)) throw ParameterError("hazard scaling factor must be > 0");
  ParametricHazard out = hz;
  switch (hz.family) {
    case HazardFamily::Constant:
      out.rate = hz.rate * m;
      break;
    case HazardFamily::Weibull:
      // m*(t/s)^b = (t/(s*m^(-1/b)))^b
      out.scale = hz.scale * std::pow(m, -1.0 / hz.shape);
      break;
    case HazardFamily::Gompertz:
      out.a = hz.a * m;
      break;
  }
  validate_hazard(out);
  return out;
}

double hazard_zero_order(const ParametricHazard& hz) {
  return hz.family == HazardFamily::Weibull ? hz.shape : 1.0;
}

int substitution_power(double zero_order) {
  if (zero_order >= 1.0) return 2;
  return std::max(2, static_cast<int>(std::ceil(2.0 / zero_order)));
}

double HazardSet::total_cumulative(int k, double t) const {
  double total = 0.0;
  for (const auto& hz : causes(k)) total += cumulative_hazard(hz, t);
  return total;
}

void validate_hazard_set(const HazardSet& hs) {
  if (hs.individual1.empty() || hs.individual2.empty())
    throw ParameterError("each individual needs at least one cause-specific hazard");
  for (const auto& hz : hs.individual1) validate_hazard(hz);
  for (const auto& hz : hs.individual2) validate_hazard(hz);
}

double total_inverse(const HazardSet& hs, int k, std::span<const double> weights, double y) {
  const auto& causes = hs.causes(k);
  if (weights.size() != causes.size())
    throw ParameterError("total_inverse: weight count must match cause count");
  bool any_positive = false;
  for (double w : weights) {
    if (w < 0.0) throw ParameterError("total_inverse: weights must be nonnegative");
    if (w > 0.0) any_positive = true;
  }
  if (!any_positive) throw ParameterError("total_inverse: degenerate hazard, all weights zero");
  if (y < 0.0) throw ParameterError("total_inverse requires y >= 0");
  if (y == 0.0) return 0.0;

  auto value = [&](double t) {
    double acc = 0.0;
    for (std::size_t j = 0; j < causes.size(); ++j)
      if (weights[j] > 0.0) acc += weights[j] * cumulative_hazard(causes[j], t);
    return acc;
  };
  auto slope = [&](double t) {
    double acc = 0.0;
    for (std::size_t j = 0; j < causes.size(); ++j)
      if (weights[j] > 0.0) acc += weights[j] * hazard_value(causes[j], t);
    return acc;
  };

  const double tol = 1e-10 * std::max(1.0, y);

  double hi = 1.0;
  double hi_val = value(hi);
  int doublings = 0;
  while (hi_val < y) {
    hi *= 2.0;
    hi_val = value(hi);
    if (++doublings > 1100 || !std::isfinite(hi))
      throw NumericError("total_inverse: failed to bracket root", std::abs(hi_val - y));
  }
  double lo = (hi > 1.0) ? hi / 2.0 : 0.0;

  double t = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double f = value(t) - y;
    if (std::abs(f) <= tol) return t;
    if (f > 0.0)
      hi = t;
    else
      lo = t;
    const double d = slope(t);
    double next = (d > 0.0) ? t - f / d : std::numeric_limits<double>::quiet_NaN();
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    t = next;
  }
  const double achieved = std::abs(value(t) - y);
  if (achieved <= tol) return t;
  throw NumericError("total_inverse: iteration limit reached", achieved);
}

}  // namespace frailtycr
