#include "frailtycr/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "frailtycr/parallel.hpp"
#include "frailtycr/quadrature.hpp"
#include "frailtycr/rng.hpp"

namespace frailtycr {

namespace {

// Innermost law of a (possibly nested) rescaling wrapper together with the
// accumulated scale constants.
struct Unwrapped {
  const FrailtySpec* inner;
  double c1 = 1.0, c2 = 1.0;
};

Unwrapped unwrap_rescaled(const FrailtySpec& spec) {
  Unwrapped u{&spec};
  while (const auto* rs = std::get_if<GeneralRescaled>(&u.inner->law)) {
    if (!rs->base) throw ParameterError("rescaled law requires a base law");
    u.c1 *= rs->c1;
    u.c2 *= rs->c2;
    u.inner = rs->base.get();
  }
  return u;
}

double expected_eta(const std::vector<double>& alpha, int j) {
  const double total = std::accumulate(alpha.begin(), alpha.end(), 0.0);
  return alpha[static_cast<std::size_t>(j - 1)] / total;
}

// Conditional sub-distribution factor F^(k)_j(t | eps) evaluated by a fixed
// Gauss-Legendre rule under the substitution u = t v^2 (which removes the
// integrable endpoint singularity of Weibull hazards with shape < 1). The
// time grid and hazard values are precomputed so evaluation per frailty draw
// is a single weighted exponential sum.
class ConditionalFactor {
 public:
  ConditionalFactor(const ModelSpec& m, int k, int j, double t, int n_nodes) : t_(t) {
    const auto& causes = m.hazards.causes(k);
    const auto idx = static_cast<std::size_t>(j - 1);
    const int p = substitution_power(hazard_zero_order(causes[idx]));
    const auto& rule = gauss_legendre(n_nodes);
    wh_.reserve(rule.x.size());
    Hmat_.assign(causes.size(), {});
    for (auto& row : Hmat_) row.reserve(rule.x.size());
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
      const double v = 0.5 * (rule.x[i] + 1.0);
      const double u = t * std::pow(v, p);
      wh_.push_back(rule.w[i] * 0.5 * p * t * std::pow(v, p - 1) * hazard_value(causes[idx], u));
      for (std::size_t jj = 0; jj < causes.size(); ++jj)
        Hmat_[jj].push_back(cumulative_hazard(causes[jj], u));
    }
  }

  // Integral part only; the caller multiplies by eps_j of the target cause.
  double operator()(std::span<const double> eps) const {
    if (t_ <= 0.0) return 0.0;
    const std::size_t causes = Hmat_.size();
    const std::size_t nodes = wh_.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes; ++i) {
      double expo = 0.0;
      for (std::size_t jj = 0; jj < causes; ++jj) expo += eps[jj] * Hmat_[jj][i];
      acc += wh_[i] * std::exp(-expo);
    }
    return acc;
  }

 private:
  double t_;
  std::vector<double> wh_;
  std::vector<std::vector<double>> Hmat_;
};

double conditional_value(const ConditionalFactor& f, std::span<const double> eps, int j) {
  return eps[static_cast<std::size_t>(j - 1)] * f(eps);
}

// Odometer over a tensor grid; calls fn(index_vector).
template <typename Fn>
void tensor_loop(const std::vector<int>& sizes, Fn&& fn) {
  std::vector<int> idx(sizes.size(), 0);
  for (;;) {
    fn(idx);
    std::size_t d = 0;
    for (; d < sizes.size(); ++d) {
      if (++idx[d] < sizes[d]) break;
      idx[d] = 0;
    }
    if (d == sizes.size()) return;
  }
}

bool innermost_is_dirichlet(const ModelSpec& m) {
  return std::get_if<DirichletGamma>(&unwrap_rescaled(m.frailty).inner->law) != nullptr;
}

// Joint sub-distribution for (possibly rescaled) Dirichlet frailty: the
// simplex part contributes E[eta] factors exactly, leaving a 1-D integral
// over the shared scale a.
OracleEstimate dirichlet_quad_subdist(const ModelSpec& m, const EvalPoint& p, double tol) {
  const auto un = unwrap_rescaled(m.frailty);
  const auto& dir = std::get<DirichletGamma>(un.inner->law);
  const double shape = 1.0 / (dir.sigma * dir.sigma);
  const double H1 = cumulative_hazard(m.hazards.individual1.front(), p.t1) / un.c1;
  const double H2 = cumulative_hazard(m.hazards.individual2.front(), p.t2) * un.c2;
  const double pref = expected_eta(dir.alpha1, p.j1) * expected_eta(dir.alpha2, p.j2);

  OracleEstimate out;
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int level = 0; level <= 4; ++level) {
    const int n = 24 << level;
    const auto& rule = gauss_laguerre_gamma(n, shape - 1.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
      const double a = rule.x[i] / shape;  // Gamma(shape, rate=shape) draw value
      acc += rule.w[i] * (-std::expm1(-a * H1)) * (-std::expm1(-a * H2));
    }
    acc *= pref;
    out.work += n;
    if (level > 0 && std::abs(acc - prev) < tol) {
      out.value = acc;
      out.achieved_tol = std::abs(acc - prev);
      return out;
    }
    prev = acc;
  }
  throw NumericError("oracle: dirichlet scale quadrature did not converge", out.achieved_tol);
}

struct McAccumulator {
  double sum = 0.0, sumsq = 0.0;
};

OracleEstimate finish_mc(const std::vector<McAccumulator>& parts, long n) {
  double sum = 0.0, sumsq = 0.0;
  for (const auto& part : parts) {
    sum += part.sum;
    sumsq += part.sumsq;
  }
  OracleEstimate out;
  out.value = sum / static_cast<double>(n);
  const double var = std::max(0.0, (sumsq - sum * sum / static_cast<double>(n)) /
                                       (static_cast<double>(n) - 1.0));
  out.std_error = std::sqrt(var / static_cast<double>(n));
  out.work = n;
  return out;
}

}  // namespace

double conditional_subdist(const ModelSpec& m, int k, int j, double t,
                           std::span<const double> eps, int nodes) {
  validate_model(m);
  if (static_cast<int>(eps.size()) != m.num_causes(k))
    throw ParameterError("conditional_subdist: eps dimension must match the cause count");
  const ConditionalFactor f(m, k, j, t, nodes);
  return conditional_value(f, eps, j);
}

int oracle_quad_dimension(const ModelSpec& m) {
  validate_model(m);
  if (innermost_is_dirichlet(m)) return 1;
  return static_cast<int>(
      latent_components(m.frailty, m.num_causes(1), m.num_causes(2)).size());
}

OracleEstimate quad_joint_subdist(const ModelSpec& m, const EvalPoint& p, double tol) {
  validate_model(m);
  validate_point(m, p);
  if (p.t1 <= 0.0 || p.t2 <= 0.0) return {};
  if (innermost_is_dirichlet(m)) return dirichlet_quad_subdist(m, p, tol);

  const int L1 = m.num_causes(1), L2 = m.num_causes(2);
  const auto comps = latent_components(m.frailty, L1, L2);
  const int dim = static_cast<int>(comps.size());
  if (dim > 3)
    throw CapabilityError("latent dimension " + std::to_string(dim) +
                          " exceeds 3; use mc_joint_subdist");

  const int base_nodes = (dim == 1) ? 24 : (dim == 2 ? 16 : 12);
  const int max_level = (dim == 3) ? 2 : 3;

  OracleEstimate out;
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int level = 0; level <= max_level; ++level) {
    const int n_lat = base_nodes << level;
    const int n_t = 64 << level;
    const ConditionalFactor f1(m, 1, p.j1, p.t1, n_t);
    const ConditionalFactor f2(m, 2, p.j2, p.t2, n_t);

    std::vector<const QuadNodes*> rules;
    for (const auto& comp : comps) rules.push_back(&gauss_laguerre_gamma(n_lat, comp.shape - 1.0));

    std::vector<int> sizes(static_cast<std::size_t>(dim), n_lat);
    std::vector<double> latent(static_cast<std::size_t>(dim));
    double acc = 0.0;
    tensor_loop(sizes, [&](const std::vector<int>& idx) {
      double w = 1.0;
      for (int d = 0; d < dim; ++d) {
        const auto i = static_cast<std::size_t>(idx[static_cast<std::size_t>(d)]);
        w *= rules[static_cast<std::size_t>(d)]->w[i];
        latent[static_cast<std::size_t>(d)] =
            rules[static_cast<std::size_t>(d)]->x[i] / comps[static_cast<std::size_t>(d)].rate;
      }
      const FrailtyDraw draw = latent_to_draw(m.frailty, L1, L2, latent);
      acc += w * conditional_value(f1, draw.eps1, p.j1) * conditional_value(f2, draw.eps2, p.j2);
      out.work += 1;
    });

    if (level > 0 && std::abs(acc - prev) < tol) {
      out.value = acc;
      out.achieved_tol = std::abs(acc - prev);
      return out;
    }
    out.achieved_tol = std::abs(acc - prev);
    prev = acc;
  }
  throw NumericError("oracle: latent quadrature did not converge to the requested tolerance",
                     out.achieved_tol);
}

OracleEstimate quad_joint_subdensity(const ModelSpec& m, const EvalPoint& p, double tol) {
  validate_model(m);
  validate_point(m, p);

  const int L1 = m.num_causes(1), L2 = m.num_causes(2);
  const double h1 =
      hazard_value(m.hazards.individual1[static_cast<std::size_t>(p.j1 - 1)], p.t1);
  const double h2 =
      hazard_value(m.hazards.individual2[static_cast<std::size_t>(p.j2 - 1)], p.t2);

  if (innermost_is_dirichlet(m)) {
    const auto un = unwrap_rescaled(m.frailty);
    const auto& dir = std::get<DirichletGamma>(un.inner->law);
    const double shape = 1.0 / (dir.sigma * dir.sigma);
    const double H1 = cumulative_hazard(m.hazards.individual1.front(), p.t1) / un.c1;
    const double H2 = cumulative_hazard(m.hazards.individual2.front(), p.t2) * un.c2;
    // E[eta] from each simplex; the scale contributes E[a^2 e^{-a(H1+H2)}].
    const double pref = expected_eta(dir.alpha1, p.j1) * expected_eta(dir.alpha2, p.j2) *
                        (h1 / un.c1) * (h2 * un.c2);
    OracleEstimate out;
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int level = 0; level <= 4; ++level) {
      const int n = 24 << level;
      const auto& rule = gauss_laguerre_gamma(n, shape - 1.0);
      double acc = 0.0;
      for (std::size_t i = 0; i < rule.x.size(); ++i) {
        const double a = rule.x[i] / shape;
        acc += rule.w[i] * a * a * std::exp(-a * (H1 + H2));
      }
      acc *= pref;
      out.work += n;
      if (level > 0 && std::abs(acc - prev) < tol * std::max(1.0, std::abs(acc))) {
        out.value = acc;
        out.achieved_tol = std::abs(acc - prev);
        return out;
      }
      prev = acc;
    }
    throw NumericError("oracle: dirichlet density quadrature did not converge", 0.0);
  }

  const auto comps = latent_components(m.frailty, L1, L2);
  const int dim = static_cast<int>(comps.size());
  if (dim > 4)
    throw CapabilityError("latent dimension " + std::to_string(dim) +
                          " exceeds 4; use mc_subdensity");

  std::vector<double> Hvals1(static_cast<std::size_t>(L1)), Hvals2(static_cast<std::size_t>(L2));
  for (int j = 0; j < L1; ++j)
    Hvals1[static_cast<std::size_t>(j)] =
        cumulative_hazard(m.hazards.individual1[static_cast<std::size_t>(j)], p.t1);
  for (int j = 0; j < L2; ++j)
    Hvals2[static_cast<std::size_t>(j)] =
        cumulative_hazard(m.hazards.individual2[static_cast<std::size_t>(j)], p.t2);

  const int base_nodes = (dim <= 2) ? 24 : (dim == 3 ? 16 : 12);
  const int max_level = (dim <= 2) ? 3 : 2;

  OracleEstimate out;
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int level = 0; level <= max_level; ++level) {
    const int n_lat = base_nodes << level;
    std::vector<const QuadNodes*> rules;
    for (const auto& comp : comps) rules.push_back(&gauss_laguerre_gamma(n_lat, comp.shape - 1.0));
    std::vector<int> sizes(static_cast<std::size_t>(dim), n_lat);
    std::vector<double> latent(static_cast<std::size_t>(dim));
    double acc = 0.0;
    tensor_loop(sizes, [&](const std::vector<int>& idx) {
      double w = 1.0;
      for (int d = 0; d < dim; ++d) {
        const auto i = static_cast<std::size_t>(idx[static_cast<std::size_t>(d)]);
        w *= rules[static_cast<std::size_t>(d)]->w[i];
        latent[static_cast<std::size_t>(d)] =
            rules[static_cast<std::size_t>(d)]->x[i] / comps[static_cast<std::size_t>(d)].rate;
      }
      const FrailtyDraw draw = latent_to_draw(m.frailty, L1, L2, latent);
      double expo = 0.0;
      for (int j = 0; j < L1; ++j)
        expo += draw.eps1[static_cast<std::size_t>(j)] * Hvals1[static_cast<std::size_t>(j)];
      for (int j = 0; j < L2; ++j)
        expo += draw.eps2[static_cast<std::size_t>(j)] * Hvals2[static_cast<std::size_t>(j)];
      acc += w * draw.eps1[static_cast<std::size_t>(p.j1 - 1)] *
             draw.eps2[static_cast<std::size_t>(p.j2 - 1)] * std::exp(-expo);
      out.work += 1;
    });
    acc *= h1 * h2;
    if (level > 0 && std::abs(acc - prev) < tol * std::max(1.0, std::abs(acc))) {
      out.value = acc;
      out.achieved_tol = std::abs(acc - prev);
      return out;
    }
    out.achieved_tol = std::abs(acc - prev);
    prev = acc;
  }
  throw NumericError("oracle: latent density quadrature did not converge", out.achieved_tol);
}

OracleEstimate mc_joint_subdist(const ModelSpec& m, const EvalPoint& p, long n,
                                std::uint64_t seed, int threads) {
  validate_model(m);
  validate_point(m, p);
  if (n < 1000) throw ParameterError("mc_joint_subdist requires n >= 1000");

  const int L1 = m.num_causes(1), L2 = m.num_causes(2);
  const ConditionalFactor f1(m, 1, p.j1, p.t1, 96);
  const ConditionalFactor f2(m, 2, p.j2, p.t2, 96);

  const int used = resolve_threads(threads);
  std::vector<McAccumulator> parts(static_cast<std::size_t>(std::min<long>(used, n)));
  parallel_chunks(n, used, [&](long begin, long end, int chunk) {
    McAccumulator acc;
    for (long i = begin; i < end; ++i) {
      RngStream rng = RngStream::derived(seed, static_cast<std::uint64_t>(i));
      const FrailtyDraw draw = sample_frailty(m.frailty, L1, L2, rng);
      const double v =
          conditional_value(f1, draw.eps1, p.j1) * conditional_value(f2, draw.eps2, p.j2);
      acc.sum += v;
      acc.sumsq += v * v;
    }
    parts[static_cast<std::size_t>(chunk)] = acc;
  });
  return finish_mc(parts, n);
}

OracleEstimate mc_subdensity(const ModelSpec& m, const EvalPoint& p, long n, std::uint64_t seed,
                             int threads) {
  validate_model(m);
  validate_point(m, p);
  if (n < 1000) throw ParameterError("mc_subdensity requires n >= 1000");

  const int L1 = m.num_causes(1), L2 = m.num_causes(2);
  const double h1 =
      hazard_value(m.hazards.individual1[static_cast<std::size_t>(p.j1 - 1)], p.t1);
  const double h2 =
      hazard_value(m.hazards.individual2[static_cast<std::size_t>(p.j2 - 1)], p.t2);
  std::vector<double> Hvals1(static_cast<std::size_t>(L1)), Hvals2(static_cast<std::size_t>(L2));
  for (int j = 0; j < L1; ++j)
    Hvals1[static_cast<std::size_t>(j)] =
        cumulative_hazard(m.hazards.individual1[static_cast<std::size_t>(j)], p.t1);
  for (int j = 0; j < L2; ++j)
    Hvals2[static_cast<std::size_t>(j)] =
        cumulative_hazard(m.hazards.individual2[static_cast<std::size_t>(j)], p.t2);

  const int used = resolve_threads(threads);
  std::vector<McAccumulator> parts(static_cast<std::size_t>(std::min<long>(used, n)));
  parallel_chunks(n, used, [&](long begin, long end, int chunk) {
    McAccumulator acc;
    for (long i = begin; i < end; ++i) {
      RngStream rng = RngStream::derived(seed, static_cast<std::uint64_t>(i));
      const FrailtyDraw draw = sample_frailty(m.frailty, L1, L2, rng);
      double expo = 0.0;
      for (int j = 0; j < L1; ++j)
        expo += draw.eps1[static_cast<std::size_t>(j)] * Hvals1[static_cast<std::size_t>(j)];
      for (int j = 0; j < L2; ++j)
        expo += draw.eps2[static_cast<std::size_t>(j)] * Hvals2[static_cast<std::size_t>(j)];
      const double v = h1 * h2 * draw.eps1[static_cast<std::size_t>(p.j1 - 1)] *
                       draw.eps2[static_cast<std::size_t>(p.j2 - 1)] * std::exp(-expo);
      acc.sum += v;
      acc.sumsq += v * v;
    }
    parts[static_cast<std::size_t>(chunk)] = acc;
  });
  return finish_mc(parts, n);
}

}  // namespace frailtycr
