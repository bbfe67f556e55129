#include "frailtycr/fit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "frailtycr/closedform.hpp"
#include "frailtycr/parallel.hpp"

namespace frailtycr {

namespace {

constexpr double kBadObjective = 1e15;

double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }
double logit(double r) { return std::log(r / (1.0 - r)); }

double rho_bound(double s1, double s2) { return std::min(s1 / s2, s2 / s1); }

bool is_dirichlet(const ModelSpec& m) {
  return std::get_if<DirichletGamma>(&m.frailty.law) != nullptr;
}

void pack_hazard(const ParametricHazard& hz, const std::string& prefix, std::vector<double>& u,
                 std::vector<std::string>* names) {
  auto push = [&](double value, const char* name) {
    u.push_back(std::log(value));
    if (names) names->push_back(prefix + "." + name);
  };
  switch (hz.family) {
    case HazardFamily::Constant:
      push(hz.rate, "rate");
      break;
    case HazardFamily::Weibull:
      push(hz.shape, "shape");
      push(hz.scale, "scale");
      break;
    case HazardFamily::Gompertz:
      push(hz.a, "a");
      push(hz.c, "c");
      break;
  }
}

ParametricHazard unpack_hazard(const ParametricHazard& templ, std::span<const double> u,
                               std::size_t& pos) {
  ParametricHazard hz = templ;
  switch (templ.family) {
    case HazardFamily::Constant:
      hz.rate = std::exp(u[pos++]);
      break;
    case HazardFamily::Weibull:
      hz.shape = std::exp(u[pos++]);
      hz.scale = std::exp(u[pos++]);
      break;
    case HazardFamily::Gompertz:
      hz.a = std::exp(u[pos++]);
      hz.c = std::exp(u[pos++]);
      break;
  }
  return hz;
}

}  // namespace

std::vector<double> pack_parameters(const ModelSpec& m, bool include_hazards,
                                    std::vector<std::string>* names) {
  std::vector<double> u;
  auto push_log = [&](double value, const std::string& name) {
    u.push_back(std::log(value));
    if (names) names->push_back(name);
  };
  auto push_rho = [&](double rho, double s1, double s2, const std::string& name) {
    u.push_back(logit(rho / rho_bound(s1, s2)));
    if (names) names->push_back(name);
  };

  if (const auto* sg = std::get_if<SharedGamma>(&m.frailty.law)) {
    push_log(sg->sigma, "sigma");
  } else if (const auto* cg = std::get_if<CorrelatedGamma>(&m.frailty.law)) {
    push_log(cg->sigma1, "sigma1");
    push_log(cg->sigma2, "sigma2");
    push_rho(cg->rho, cg->sigma1, cg->sigma2, "rho");
  } else if (const auto* scs = std::get_if<SharedCauseSpecific>(&m.frailty.law)) {
    for (std::size_t j = 0; j < scs->sigmas.size(); ++j)
      push_log(scs->sigmas[j], "sigma[" + std::to_string(j + 1) + "]");
  } else if (const auto* ccs = std::get_if<CorrelatedCauseSpecific>(&m.frailty.law)) {
    for (std::size_t j = 0; j < ccs->sigma1.size(); ++j) {
      const std::string tag = "[" + std::to_string(j + 1) + "]";
      push_log(ccs->sigma1[j], "sigma1" + tag);
      push_log(ccs->sigma2[j], "sigma2" + tag);
      push_rho(ccs->rho[j], ccs->sigma1[j], ccs->sigma2[j], "rho" + tag);
    }
  } else if (const auto* dir = std::get_if<DirichletGamma>(&m.frailty.law)) {
    for (std::size_t j = 0; j < dir->alpha1.size(); ++j)
      push_log(dir->alpha1[j], "alpha1[" + std::to_string(j + 1) + "]");
    for (std::size_t j = 0; j < dir->alpha2.size(); ++j)
      push_log(dir->alpha2[j], "alpha2[" + std::to_string(j + 1) + "]");
    push_log(dir->sigma, "sigma");
  } else {
    throw ParameterError("cannot fit a rescaled frailty law; fit its base law instead");
  }

  if (include_hazards) {
    for (int k = 1; k <= 2; ++k) {
      const auto& causes = m.hazards.causes(k);
      if (is_dirichlet(m)) {
        // One common baseline hazard per individual.
        pack_hazard(causes.front(), "h" + std::to_string(k), u, names);
      } else {
        for (std::size_t j = 0; j < causes.size(); ++j)
          pack_hazard(causes[j], "h" + std::to_string(k) + "c" + std::to_string(j + 1), u,
                      names);
      }
    }
  }
  return u;
}

ModelSpec unpack_parameters(const ModelSpec& structure, std::span<const double> u,
                            bool include_hazards) {
  ModelSpec m = structure;
  std::size_t pos = 0;

  if (std::get_if<SharedGamma>(&structure.frailty.law)) {
    m.frailty = FrailtySpec::shared_gamma(std::exp(u[pos++]));
  } else if (std::get_if<CorrelatedGamma>(&structure.frailty.law)) {
    const double s1 = std::exp(u[pos++]);
    const double s2 = std::exp(u[pos++]);
    const double rho = rho_bound(s1, s2) * logistic(u[pos++]);
    m.frailty = FrailtySpec::correlated_gamma(s1, s2, rho);
  } else if (const auto* scs = std::get_if<SharedCauseSpecific>(&structure.frailty.law)) {
    std::vector<double> sigmas(scs->sigmas.size());
    for (auto& s : sigmas) s = std::exp(u[pos++]);
    m.frailty = FrailtySpec::shared_cause_specific(std::move(sigmas));
  } else if (const auto* ccs = std::get_if<CorrelatedCauseSpecific>(&structure.frailty.law)) {
    const std::size_t L = ccs->sigma1.size();
    std::vector<double> s1(L), s2(L), rho(L);
    for (std::size_t j = 0; j < L; ++j) {
      s1[j] = std::exp(u[pos++]);
      s2[j] = std::exp(u[pos++]);
      rho[j] = rho_bound(s1[j], s2[j]) * logistic(u[pos++]);
    }
    m.frailty = FrailtySpec::correlated_cause_specific(std::move(s1), std::move(s2),
                                                       std::move(rho));
  } else if (const auto* dir = std::get_if<DirichletGamma>(&structure.frailty.law)) {
    std::vector<double> a1(dir->alpha1.size()), a2(dir->alpha2.size());
    for (auto& a : a1) a = std::exp(u[pos++]);
    for (auto& a : a2) a = std::exp(u[pos++]);
    const double sigma = std::exp(u[pos++]);
    m.frailty = FrailtySpec::dirichlet_gamma(std::move(a1), std::move(a2), sigma);
  } else {
    throw ParameterError("cannot fit a rescaled frailty law; fit its base law instead");
  }

  if (include_hazards) {
    for (int k = 1; k <= 2; ++k) {
      auto& causes = (k == 1) ? m.hazards.individual1 : m.hazards.individual2;
      if (is_dirichlet(structure)) {
        const ParametricHazard common = unpack_hazard(causes.front(), u, pos);
        for (auto& hz : causes) hz = common;
      } else {
        for (auto& hz : causes) hz = unpack_hazard(hz, u, pos);
      }
    }
  }
  if (pos != u.size()) throw ParameterError("parameter vector length mismatch");
  return m;
}

LogLikelihood log_likelihood_detail(const Dataset& ds, const ModelSpec& m, int threads) {
  const ClosedFormEvaluator eval(m);
  const long n = static_cast<long>(ds.records.size());
  LogLikelihood out;
  if (n == 0) return out;

  for (const auto& rec : ds.records) {
    if (rec.j1 < 1 || rec.j1 > m.num_causes(1) || rec.j2 < 1 || rec.j2 > m.num_causes(2))
      throw ParameterError("dataset cause index outside the model's cause counts");
  }

  std::vector<double> terms(static_cast<std::size_t>(n));
  parallel_chunks(n, threads, [&](long begin, long end, int) {
    for (long i = begin; i < end; ++i) {
      const auto& rec = ds.records[static_cast<std::size_t>(i)];
      const double f = eval.joint_subdensity({rec.t1, rec.t2, rec.j1, rec.j2});
      terms[static_cast<std::size_t>(i)] =
          (f > 0.0 && std::isfinite(f)) ? std::log(f) : -std::numeric_limits<double>::infinity();
    }
  });
  for (long i = 0; i < n; ++i) {
    if (!std::isfinite(terms[static_cast<std::size_t>(i)])) {
      out.value = -std::numeric_limits<double>::infinity();
      out.bad_record = i;
      return out;
    }
  }
  out.value = pairwise_sum(terms);
  return out;
}

double log_likelihood(const Dataset& ds, const ModelSpec& m, int threads) {
  return log_likelihood_detail(ds, m, threads).value;
}

namespace {

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

template <typename Fn>
NelderMeadResult nelder_mead(const Fn& fn, const std::vector<double>& x0, double step,
                             int max_iterations, double x_tol, double f_tol) {
  const std::size_t d = x0.size();
  std::vector<std::vector<double>> xs(d + 1, x0);
  std::vector<double> fs(d + 1);
  for (std::size_t i = 0; i < d; ++i) xs[i + 1][i] += step;
  for (std::size_t i = 0; i <= d; ++i) fs[i] = fn(xs[i]);

  std::vector<std::size_t> order(d + 1);
  NelderMeadResult result;
  for (result.iterations = 0; result.iterations < max_iterations; ++result.iterations) {
    for (std::size_t i = 0; i <= d; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return fs[a] < fs[b];
    });
    const std::size_t best = order[0], worst = order[d], second_worst = order[d - 1];

    double diameter = 0.0;
    for (std::size_t i = 0; i <= d; ++i)
      for (std::size_t c = 0; c < d; ++c)
        diameter = std::max(diameter, std::abs(xs[i][c] - xs[best][c]));
    if (diameter < x_tol && fs[worst] - fs[best] < f_tol) {
      result.converged = true;
      break;
    }

    std::vector<double> centroid(d, 0.0);
    for (std::size_t i = 0; i <= d; ++i) {
      if (i == worst) continue;
      for (std::size_t c = 0; c < d; ++c) centroid[c] += xs[i][c];
    }
    for (auto& c : centroid) c /= static_cast<double>(d);

    auto blend = [&](double coef) {
      std::vector<double> x(d);
      for (std::size_t c = 0; c < d; ++c) x[c] = centroid[c] + coef * (xs[worst][c] - centroid[c]);
      return x;
    };

    const std::vector<double> reflected = blend(-1.0);
    const double f_reflected = fn(reflected);
    if (f_reflected < fs[best]) {
      const std::vector<double> expanded = blend(-2.0);
      const double f_expanded = fn(expanded);
      if (f_expanded < f_reflected) {
        xs[worst] = expanded;
        fs[worst] = f_expanded;
      } else {
        xs[worst] = reflected;
        fs[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < fs[second_worst]) {
      xs[worst] = reflected;
      fs[worst] = f_reflected;
      continue;
    }
    const bool outside = f_reflected < fs[worst];
    const std::vector<double> contracted = blend(outside ? -0.5 : 0.5);
    const double f_contracted = fn(contracted);
    if (f_contracted < std::min(f_reflected, fs[worst])) {
      xs[worst] = contracted;
      fs[worst] = f_contracted;
      continue;
    }
    // Shrink toward the best vertex.
    for (std::size_t i = 0; i <= d; ++i) {
      if (i == best) continue;
      for (std::size_t c = 0; c < d; ++c) xs[i][c] = xs[best][c] + 0.5 * (xs[i][c] - xs[best][c]);
      fs[i] = fn(xs[i]);
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i <= d; ++i)
    if (fs[i] < fs[best]) best = i;
  result.x = xs[best];
  result.f = fs[best];
  return result;
}

// Same ordering as pack_parameters, natural scale.
std::vector<double> natural_parameters(const ModelSpec& m, bool include_hazards) {
  std::vector<double> natural;
  auto push_hazard = [&](const ParametricHazard& hz) {
    switch (hz.family) {
      case HazardFamily::Constant:
        natural.push_back(hz.rate);
        break;
      case HazardFamily::Weibull:
        natural.push_back(hz.shape);
        natural.push_back(hz.scale);
        break;
      case HazardFamily::Gompertz:
        natural.push_back(hz.a);
        natural.push_back(hz.c);
        break;
    }
  };
  if (const auto* sg = std::get_if<SharedGamma>(&m.frailty.law)) {
    natural.push_back(sg->sigma);
  } else if (const auto* cg = std::get_if<CorrelatedGamma>(&m.frailty.law)) {
    natural.insert(natural.end(), {cg->sigma1, cg->sigma2, cg->rho});
  } else if (const auto* scs = std::get_if<SharedCauseSpecific>(&m.frailty.law)) {
    natural.insert(natural.end(), scs->sigmas.begin(), scs->sigmas.end());
  } else if (const auto* ccs = std::get_if<CorrelatedCauseSpecific>(&m.frailty.law)) {
    for (std::size_t j = 0; j < ccs->sigma1.size(); ++j)
      natural.insert(natural.end(), {ccs->sigma1[j], ccs->sigma2[j], ccs->rho[j]});
  } else if (const auto* dir = std::get_if<DirichletGamma>(&m.frailty.law)) {
    natural.insert(natural.end(), dir->alpha1.begin(), dir->alpha1.end());
    natural.insert(natural.end(), dir->alpha2.begin(), dir->alpha2.end());
    natural.push_back(dir->sigma);
  }
  if (include_hazards) {
    for (int k = 1; k <= 2; ++k) {
      const auto& causes = m.hazards.causes(k);
      if (is_dirichlet(m)) {
        push_hazard(causes.front());
      } else {
        for (const auto& hz : causes) push_hazard(hz);
      }
    }
  }
  return natural;
}

}  // namespace

FitResult fit_mle(const Dataset& ds, const ModelSpec& init, const FitOptions& options) {
  validate_model(init);
  if (ds.records.empty()) throw ParameterError("fit_mle requires a non-empty dataset");

  const bool with_hazards = !options.freeze_hazards;
  const double scale = options.coordinate_scale;
  if (!(scale > 0.0)) throw ParameterError("coordinate_scale must be > 0");
  std::vector<std::string> names;
  std::vector<double> u0 = pack_parameters(init, with_hazards, &names);
  for (auto& u : u0) u *= scale;

  const auto to_natural_coords = [&](const std::vector<double>& u) {
    std::vector<double> v = u;
    for (auto& x : v) x /= scale;
    return v;
  };
  const auto objective = [&](const std::vector<double>& u) -> double {
    try {
      const ModelSpec m = unpack_parameters(init, to_natural_coords(u), with_hazards);
      const double ll = log_likelihood(ds, m, options.threads);
      return std::isfinite(ll) ? -ll : kBadObjective;
    } catch (const std::exception&) {
      return kBadObjective;
    }
  };

  const NelderMeadResult nm = nelder_mead(objective, u0, options.initial_step * scale,
                                          options.max_iterations, options.simplex_tol * scale,
                                          options.ll_tol);

  FitResult result;
  result.model = unpack_parameters(init, to_natural_coords(nm.x), with_hazards);
  result.log_lik = -nm.f;
  result.iterations = nm.iterations;
  result.converged = nm.converged;
  result.parameter_names = names;
  result.parameters = natural_parameters(result.model, with_hazards);

  if (options.compute_std_errors) {
    // Central-difference Hessian of -loglik in transformed coordinates;
    // advisory only (delta method per coordinate, cross terms ignored).
    const std::size_t d = nm.x.size();
    const double h = 1e-4;
    Eigen::MatrixXd hess(d, d);
    const double f0 = objective(nm.x);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i; j < d; ++j) {
        auto shifted = [&](double si, double sj) {
          std::vector<double> x = nm.x;
          x[i] += si;
          x[j] += sj;
          return objective(x);
        };
        double hij;
        if (i == j) {
          hij = (shifted(h, 0.0) - 2.0 * f0 + shifted(-h, 0.0)) / (h * h);
        } else {
          hij = (shifted(h, h) - shifted(h, -h) - shifted(-h, h) + shifted(-h, -h)) /
                (4.0 * h * h);
        }
        hess(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = hij;
        hess(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = hij;
      }
    }
    Eigen::MatrixXd cov = hess.completeOrthogonalDecomposition().pseudoInverse();
    result.std_errors.assign(d, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < d; ++i) {
      const double var_u = cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
      if (var_u <= 0.0) continue;
      // d(natural)/d(u) by central difference.
      std::vector<double> up = nm.x, dn = nm.x;
      up[i] += h;
      dn[i] -= h;
      const auto nat_up = natural_parameters(
          unpack_parameters(init, to_natural_coords(up), with_hazards), with_hazards);
      const auto nat_dn = natural_parameters(
          unpack_parameters(init, to_natural_coords(dn), with_hazards), with_hazards);
      const double slope = (nat_up[i] - nat_dn[i]) / (2.0 * h);
      result.std_errors[i] = std::sqrt(var_u) * std::abs(slope);
    }
  }
  return result;
}

ModelSpec auto_init(const Dataset& ds, const ModelSpec& structure, int threads) {
  validate_model(structure);
  if (ds.records.empty()) throw ParameterError("auto_init requires a non-empty dataset");
  const long n = static_cast<long>(ds.records.size());

  ModelSpec m = structure;
  for (int k = 1; k <= 2; ++k) {
    double mean_t = 0.0;
    for (const auto& rec : ds.records) mean_t += (k == 1) ? rec.t1 : rec.t2;
    mean_t /= static_cast<double>(n);
    auto& causes = (k == 1) ? m.hazards.individual1 : m.hazards.individual2;
    const double L = static_cast<double>(causes.size());
    for (auto& hz : causes) {
      switch (hz.family) {
        case HazardFamily::Constant:
          hz.rate = 1.0 / (L * mean_t);
          break;
        case HazardFamily::Weibull:
          hz.shape = 1.0;
          hz.scale = L * mean_t;
          break;
        case HazardFamily::Gompertz:
          hz.c = 1.0 / mean_t;
          hz.a = hz.c / (L * 1.7182818284590452);
          break;
      }
    }
  }

  // Empirical cause frequencies seed the Dirichlet weights (their scale is
  // immaterial); every sigma-type parameter starts from a coarse grid scan.
  if (auto* dir = std::get_if<DirichletGamma>(&m.frailty.law)) {
    DirichletGamma d = *dir;
    std::fill(d.alpha1.begin(), d.alpha1.end(), 0.02);
    std::fill(d.alpha2.begin(), d.alpha2.end(), 0.02);
    for (const auto& rec : ds.records) {
      d.alpha1[static_cast<std::size_t>(rec.j1 - 1)] += 1.0 / static_cast<double>(n);
      d.alpha2[static_cast<std::size_t>(rec.j2 - 1)] += 1.0 / static_cast<double>(n);
    }
    m.frailty = FrailtySpec{d};
  }

  const double candidates[] = {0.25, 0.5, 1.0, 1.5};
  double best_sigma = 0.5;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (double sigma : candidates) {
    ModelSpec trial = m;
    if (std::get_if<SharedGamma>(&trial.frailty.law)) {
      trial.frailty = FrailtySpec::shared_gamma(sigma);
    } else if (auto* dir = std::get_if<DirichletGamma>(&trial.frailty.law)) {
      DirichletGamma d = *dir;
      d.sigma = sigma;
      trial.frailty = FrailtySpec{d};
    } else if (const auto* scs = std::get_if<SharedCauseSpecific>(&trial.frailty.law)) {
      trial.frailty = FrailtySpec::shared_cause_specific(
          std::vector<double>(scs->sigmas.size(), sigma));
    } else if (const auto* cg = std::get_if<CorrelatedGamma>(&trial.frailty.law)) {
      (void)cg;
      trial.frailty = FrailtySpec::correlated_gamma(sigma, sigma, 0.5);
    } else if (const auto* ccs = std::get_if<CorrelatedCauseSpecific>(&trial.frailty.law)) {
      const std::size_t L = ccs->sigma1.size();
      trial.frailty = FrailtySpec::correlated_cause_specific(
          std::vector<double>(L, sigma), std::vector<double>(L, sigma),
          std::vector<double>(L, 0.5));
    }
    double ll;
    try {
      ll = log_likelihood(ds, trial, threads);
    } catch (const std::exception&) {
      continue;
    }
    if (std::isfinite(ll) && ll > best_ll) {
      best_ll = ll;
      best_sigma = sigma;
      m = trial;
    }
  }
  (void)best_sigma;
  return m;
}

}  // namespace frailtycr
