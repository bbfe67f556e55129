#include "frailtycr/closedform.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace frailtycr {

namespace {

double clamp_probability(double v) { return std::clamp(v, 0.0, 1.0); }

double expected_eta(const std::vector<double>& alpha, int j) {
  const double total = std::accumulate(alpha.begin(), alpha.end(), 0.0);
  return alpha[static_cast<std::size_t>(j - 1)] / total;
}

}  // namespace

ModelSpec reduce_rescaled(const ModelSpec& m) {
  ModelSpec out = m;
  while (const auto* rs = std::get_if<GeneralRescaled>(&out.frailty.law)) {
    if (!rs->base) throw ParameterError("rescaled law requires a base law");
    const double c1 = rs->c1, c2 = rs->c2;
    for (auto& hz : out.hazards.individual1) hz = scale_hazard(hz, 1.0 / c1);
    for (auto& hz : out.hazards.individual2) hz = scale_hazard(hz, c2);
    FrailtySpec base = *rs->base;
    out.frailty = std::move(base);
  }
  return out;
}

ClosedFormEvaluator::ClosedFormEvaluator(const ModelSpec& m, const EvalOptions& options)
    : model_(reduce_rescaled(m)), options_(options) {
  validate_model(m);
  validate_model(model_);
}

double ClosedFormEvaluator::marginal_subdist(int k, int j, double t) const {
  if (t < 0.0) throw ParameterError("marginal_subdist requires t >= 0");
  if (j < 1 || j > model_.num_causes(k)) throw ParameterError("cause index out of range");
  if (t == 0.0) return 0.0;
  const auto& causes = model_.hazards.causes(k);
  const auto& target = causes[static_cast<std::size_t>(j - 1)];

  if (const auto* dir = std::get_if<DirichletGamma>(&model_.frailty.law)) {
    const double sig2 = dir->sigma * dir->sigma;
    const double H = cumulative_hazard(causes.front(), t);
    const double eta = expected_eta(k == 1 ? dir->alpha1 : dir->alpha2, j);
    return clamp_probability(eta * (1.0 - gamma_laplace(H, sig2)));
  }

  std::function<double(double)> integrand;
  if (const auto* sg = std::get_if<SharedGamma>(&model_.frailty.law)) {
    const double sig2 = sg->sigma * sg->sigma;
    integrand = [&, sig2](double u) {
      return hazard_value(target, u) *
             gamma_tilted_moment(sig2, model_.hazards.total_cumulative(k, u), 1);
    };
  } else if (const auto* cg = std::get_if<CorrelatedGamma>(&model_.frailty.law)) {
    const double sigk = (k == 1) ? cg->sigma1 : cg->sigma2;
    const double sig2 = sigk * sigk;
    integrand = [&, sig2](double u) {
      return hazard_value(target, u) *
             gamma_tilted_moment(sig2, model_.hazards.total_cumulative(k, u), 1);
    };
  } else if (const auto* scs = std::get_if<SharedCauseSpecific>(&model_.frailty.law)) {
    integrand = [&, scs](double u) {
      double log_prod = 0.0;
      double own_factor = 1.0;
      for (std::size_t jj = 0; jj < causes.size(); ++jj) {
        const double s2 = scs->sigmas[jj] * scs->sigmas[jj];
        const double Hj = cumulative_hazard(causes[jj], u);
        log_prod += std::log1p(s2 * Hj) / s2;
        if (jj == static_cast<std::size_t>(j - 1)) own_factor = 1.0 / (1.0 + s2 * Hj);
      }
      return hazard_value(target, u) * own_factor * std::exp(-log_prod);
    };
  } else if (const auto* ccs = std::get_if<CorrelatedCauseSpecific>(&model_.frailty.law)) {
    const auto& sig = (k == 1) ? ccs->sigma1 : ccs->sigma2;
    integrand = [&](double u) {
      double log_prod = 0.0;
      double own_factor = 1.0;
      for (std::size_t jj = 0; jj < causes.size(); ++jj) {
        const double s2 = sig[jj] * sig[jj];
        const double Hj = cumulative_hazard(causes[jj], u);
        log_prod += std::log1p(s2 * Hj) / s2;
        if (jj == static_cast<std::size_t>(j - 1)) own_factor = 1.0 / (1.0 + s2 * Hj);
      }
      return hazard_value(target, u) * own_factor * std::exp(-log_prod);
    };
  } else {
    throw ParameterError("unsupported frailty law in marginal_subdist");
  }

  const double p_sub = substitution_power(hazard_zero_order(target));
  const QuadResult q = integrate_1d(
      [&](double v) {
        return p_sub * t * std::pow(v, p_sub - 1) * integrand(t * std::pow(v, p_sub));
      },
      0.0, 1.0, options_.abs_tol_1d, options_.max_eval);
  return clamp_probability(q.value);
}

double ClosedFormEvaluator::density_integrand(double u1, double u2, int j1, int j2) const {
  const auto& causes1 = model_.hazards.individual1;
  const auto& causes2 = model_.hazards.individual2;
  const double h1 = hazard_value(causes1[static_cast<std::size_t>(j1 - 1)], u1);
  const double h2 = hazard_value(causes2[static_cast<std::size_t>(j2 - 1)], u2);

  if (const auto* sg = std::get_if<SharedGamma>(&model_.frailty.law)) {
    const double sig2 = sg->sigma * sg->sigma;
    const double Hsum =
        model_.hazards.total_cumulative(1, u1) + model_.hazards.total_cumulative(2, u2);
    return h1 * h2 * gamma_tilted_moment(sig2, Hsum, 2);
  }
  if (const auto* cg = std::get_if<CorrelatedGamma>(&model_.frailty.law)) {
    const auto kap = correlated_kappas(cg->sigma1, cg->sigma2, cg->rho);
    return h1 * h2 *
           correlated_laplace_d12(kap, model_.hazards.total_cumulative(1, u1),
                                  model_.hazards.total_cumulative(2, u2));
  }
  if (const auto* scs = std::get_if<SharedCauseSpecific>(&model_.frailty.law)) {
    double prod = 1.0;
    for (std::size_t jj = 0; jj < causes1.size(); ++jj) {
      const double s2 = scs->sigmas[jj] * scs->sigmas[jj];
      const double Sj = cumulative_hazard(causes1[jj], u1) + cumulative_hazard(causes2[jj], u2);
      const int moment = (static_cast<int>(jj) == j1 - 1) + (static_cast<int>(jj) == j2 - 1);
      prod *= gamma_tilted_moment(s2, Sj, moment);
    }
    return h1 * h2 * prod;
  }
  if (const auto* ccs = std::get_if<CorrelatedCauseSpecific>(&model_.frailty.law)) {
    double prod = 1.0;
    for (std::size_t jj = 0; jj < causes1.size(); ++jj) {
      const auto kap = correlated_kappas(ccs->sigma1[jj], ccs->sigma2[jj], ccs->rho[jj]);
      const double s1 = cumulative_hazard(causes1[jj], u1);
      const double s2 = cumulative_hazard(causes2[jj], u2);
      const bool first = static_cast<int>(jj) == j1 - 1;
      const bool second = static_cast<int>(jj) == j2 - 1;
      if (first && second)
        prod *= correlated_laplace_d12(kap, s1, s2);
      else if (first)
        prod *= correlated_laplace_d1(kap, s1, s2, 1);
      else if (second)
        prod *= correlated_laplace_d1(kap, s1, s2, 2);
      else
        prod *= correlated_laplace(kap, s1, s2);
    }
    return h1 * h2 * prod;
  }
  if (const auto* dir = std::get_if<DirichletGamma>(&model_.frailty.law)) {
    const double sig2 = dir->sigma * dir->sigma;
    const double Hsum =
        cumulative_hazard(causes1.front(), u1) + cumulative_hazard(causes2.front(), u2);
    return expected_eta(dir->alpha1, j1) * expected_eta(dir->alpha2, j2) * h1 * h2 *
           gamma_tilted_moment(sig2, Hsum, 2);
  }
  throw ParameterError("unsupported frailty law in joint_subdensity");
}

double ClosedFormEvaluator::joint_subdensity(const EvalPoint& p) const {
  validate_point(model_, p);
  return density_integrand(p.t1, p.t2, p.j1, p.j2);
}

double ClosedFormEvaluator::joint_subdist(const EvalPoint& p) const {
  validate_point(model_, p);
  if (p.t1 == 0.0 || p.t2 == 0.0) return 0.0;

  if (const auto* dir = std::get_if<DirichletGamma>(&model_.frailty.law)) {
    const double sig2 = dir->sigma * dir->sigma;
    const double H1 = cumulative_hazard(model_.hazards.individual1.front(), p.t1);
    const double H2 = cumulative_hazard(model_.hazards.individual2.front(), p.t2);
    const double bracket =
        1.0 - gamma_laplace(H1, sig2) - gamma_laplace(H2, sig2) + gamma_laplace(H1 + H2, sig2);
    return clamp_probability(expected_eta(dir->alpha1, p.j1) * expected_eta(dir->alpha2, p.j2) *
                             bracket);
  }

  // Substituting u_k = t_k v_k^p removes the power-law edge behaviour of
  // Weibull-type hazards and concentrates panels where the density lives;
  // the power is raised when the target hazard diverges at the origin.
  const int p1 = substitution_power(
      hazard_zero_order(model_.hazards.individual1[static_cast<std::size_t>(p.j1 - 1)]));
  const int p2 = substitution_power(
      hazard_zero_order(model_.hazards.individual2[static_cast<std::size_t>(p.j2 - 1)]));
  const QuadResult q = integrate_2d(
      [&](double v1, double v2) {
        const double u1 = p.t1 * std::pow(v1, p1), u2 = p.t2 * std::pow(v2, p2);
        const double jac = p1 * p.t1 * std::pow(v1, p1 - 1) * p2 * p.t2 * std::pow(v2, p2 - 1);
        return jac * density_integrand(u1, u2, p.j1, p.j2);
      },
      0.0, 1.0, 0.0, 1.0, options_.abs_tol_2d, options_.max_eval);
  return clamp_probability(q.value);
}

double ClosedFormEvaluator::joint_survival(double t1, double t2) const {
  if (t1 < 0.0 || t2 < 0.0) throw ParameterError("joint_survival requires t1, t2 >= 0");
  const auto& causes1 = model_.hazards.individual1;
  const auto& causes2 = model_.hazards.individual2;

  if (const auto* sg = std::get_if<SharedGamma>(&model_.frailty.law)) {
    const double Hsum =
        model_.hazards.total_cumulative(1, t1) + model_.hazards.total_cumulative(2, t2);
    return gamma_laplace(Hsum, sg->sigma * sg->sigma);
  }
  if (const auto* cg = std::get_if<CorrelatedGamma>(&model_.frailty.law)) {
    const auto kap = correlated_kappas(cg->sigma1, cg->sigma2, cg->rho);
    return correlated_laplace(kap, model_.hazards.total_cumulative(1, t1),
                              model_.hazards.total_cumulative(2, t2));
  }
  if (const auto* scs = std::get_if<SharedCauseSpecific>(&model_.frailty.law)) {
    double prod = 1.0;
    for (std::size_t jj = 0; jj < causes1.size(); ++jj) {
      const double s2 = scs->sigmas[jj] * scs->sigmas[jj];
      prod *= gamma_laplace(
          cumulative_hazard(causes1[jj], t1) + cumulative_hazard(causes2[jj], t2), s2);
    }
    return prod;
  }
  if (const auto* ccs = std::get_if<CorrelatedCauseSpecific>(&model_.frailty.law)) {
    double prod = 1.0;
    for (std::size_t jj = 0; jj < causes1.size(); ++jj) {
      const auto kap = correlated_kappas(ccs->sigma1[jj], ccs->sigma2[jj], ccs->rho[jj]);
      prod *= correlated_laplace(kap, cumulative_hazard(causes1[jj], t1),
                                 cumulative_hazard(causes2[jj], t2));
    }
    return prod;
  }
  if (const auto* dir = std::get_if<DirichletGamma>(&model_.frailty.law)) {
    const double H1 = cumulative_hazard(causes1.front(), t1);
    const double H2 = cumulative_hazard(causes2.front(), t2);
    return gamma_laplace(H1 + H2, dir->sigma * dir->sigma);
  }
  throw ParameterError("unsupported frailty law in joint_survival");
}

double marginal_subdist(const ModelSpec& m, int k, int j, double t, const EvalOptions& o) {
  return ClosedFormEvaluator(m, o).marginal_subdist(k, j, t);
}

double joint_subdist(const ModelSpec& m, const EvalPoint& p, const EvalOptions& o) {
  return ClosedFormEvaluator(m, o).joint_subdist(p);
}

double joint_subdensity(const ModelSpec& m, const EvalPoint& p) {
  return ClosedFormEvaluator(m).joint_subdensity(p);
}

double joint_survival(const ModelSpec& m, double t1, double t2) {
  return ClosedFormEvaluator(m).joint_survival(t1, t2);
}

}  // namespace frailtycr
