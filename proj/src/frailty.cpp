#include "frailtycr/frailty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace frailtycr {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double gamma_logpdf(double x, double shape, double rate) {
  if (!(x > 0.0)) return kNegInf;
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double dirichlet_logpdf(const std::vector<double>& eta, const std::vector<double>& alpha) {
  double alpha_sum = 0.0, value = 0.0;
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    if (!(eta[j] > 0.0)) return kNegInf;
    alpha_sum += alpha[j];
    value += (alpha[j] - 1.0) * std::log(eta[j]) - std::lgamma(alpha[j]);
  }
  return value + std::lgamma(alpha_sum);
}

bool nearly_equal(double x, double y) {
  return std::abs(x - y) <= 1e-12 * std::max({1.0, std::abs(x), std::abs(y)});
}

// Number of coordinates in a law's own (draw-space) coordinate system; used
// for the rescaling jacobian.
int own_coordinate_count(const FrailtySpec& spec) {
  if (const auto* sg = std::get_if<SharedGamma>(&spec.law)) {
    (void)sg;
    return 1;
  }
  if (const auto* scs = std::get_if<SharedCauseSpecific>(&spec.law))
    return static_cast<int>(scs->sigmas.size());
  if (const auto* rs = std::get_if<GeneralRescaled>(&spec.law))
    return own_coordinate_count(*rs->base);
  throw CapabilityError("law has no closed draw-space density; use latent_log_density");
}

}  // namespace

FrailtySpec FrailtySpec::shared_gamma(double sigma) { return FrailtySpec{SharedGamma{sigma}}; }

FrailtySpec FrailtySpec::correlated_gamma(double sigma1, double sigma2, double rho) {
  return FrailtySpec{CorrelatedGamma{sigma1, sigma2, rho}};
}

FrailtySpec FrailtySpec::shared_cause_specific(std::vector<double> sigmas) {
  return FrailtySpec{SharedCauseSpecific{std::move(sigmas)}};
}

FrailtySpec FrailtySpec::correlated_cause_specific(std::vector<double> sigma1,
                                                   std::vector<double> sigma2,
                                                   std::vector<double> rho) {
  return FrailtySpec{CorrelatedCauseSpecific{std::move(sigma1), std::move(sigma2), std::move(rho)}};
}

FrailtySpec FrailtySpec::dirichlet_gamma(std::vector<double> alpha1, std::vector<double> alpha2,
                                         double sigma) {
  return FrailtySpec{DirichletGamma{std::move(alpha1), std::move(alpha2), sigma}};
}

FrailtySpec FrailtySpec::rescaled(FrailtySpec base, double c1, double c2) {
  return FrailtySpec{GeneralRescaled{std::make_shared<FrailtySpec>(std::move(base)), c1, c2}};
}

std::string FrailtySpec::law_name() const {
  struct Visitor {
    std::string operator()(const SharedGamma&) const { return "shared_gamma"; }
    std::string operator()(const CorrelatedGamma&) const { return "correlated_gamma"; }
    std::string operator()(const SharedCauseSpecific&) const { return "shared_cause_specific"; }
    std::string operator()(const CorrelatedCauseSpecific&) const {
      return "correlated_cause_specific";
    }
    std::string operator()(const DirichletGamma&) const { return "dirichlet_gamma"; }
    std::string operator()(const GeneralRescaled&) const { return "rescaled"; }
  };
  return std::visit(Visitor{}, law);
}

std::vector<std::string> validate_frailty(const FrailtySpec& spec, int L1, int L2) {
  std::vector<std::string> violations;
  auto correlated_checks = [&](double s1, double s2, double rho, const std::string& label) {
    if (!(s1 > 0.0)) violations.push_back(label + "sigma1 must be > 0");
    if (!(s2 > 0.0)) violations.push_back(label + "sigma2 must be > 0");
    if (!(rho > 0.0)) violations.push_back(label + "rho must be > 0");
    if (s1 > 0.0 && s2 > 0.0 && rho > 0.0) {
      const double bound = std::min(s1 / s2, s2 / s1);
      if (rho == bound)
        violations.push_back(label +
                             "rho at the boundary min(sigma1/sigma2, sigma2/sigma1): a Gamma "
                             "component degenerates");
      else if (rho > bound)
        violations.push_back(label + "rho >= min(sigma1/sigma2, sigma2/sigma1)");
    }
  };

  if (const auto* sg = std::get_if<SharedGamma>(&spec.law)) {
    if (!(sg->sigma > 0.0)) violations.push_back("sigma must be > 0");
  } else if (const auto* cg = std::get_if<CorrelatedGamma>(&spec.law)) {
    correlated_checks(cg->sigma1, cg->sigma2, cg->rho, "");
  } else if (const auto* scs = std::get_if<SharedCauseSpecific>(&spec.law)) {
    if (L1 != L2) violations.push_back("shared cause-specific law requires L1 = L2");
    if (static_cast<int>(scs->sigmas.size()) != L1)
      violations.push_back("sigmas length must equal the number of causes");
    for (std::size_t j = 0; j < scs->sigmas.size(); ++j)
      if (!(scs->sigmas[j] > 0.0))
        violations.push_back("sigma[" + std::to_string(j + 1) + "] must be > 0");
  } else if (const auto* ccs = std::get_if<CorrelatedCauseSpecific>(&spec.law)) {
    if (L1 != L2) violations.push_back("correlated cause-specific law requires L1 = L2");
    if (static_cast<int>(ccs->sigma1.size()) != L1 ||
        static_cast<int>(ccs->sigma2.size()) != L1 || static_cast<int>(ccs->rho.size()) != L1) {
      violations.push_back("sigma1/sigma2/rho lengths must equal the number of causes");
    } else {
      for (int j = 0; j < L1; ++j)
        correlated_checks(ccs->sigma1[static_cast<std::size_t>(j)],
                          ccs->sigma2[static_cast<std::size_t>(j)],
                          ccs->rho[static_cast<std::size_t>(j)],
                          "cause " + std::to_string(j + 1) + ": ");
    }
  } else if (const auto* dir = std::get_if<DirichletGamma>(&spec.law)) {
    if (static_cast<int>(dir->alpha1.size()) != L1)
      violations.push_back("alpha1 length must equal L1");
    if (static_cast<int>(dir->alpha2.size()) != L2)
      violations.push_back("alpha2 length must equal L2");
    for (std::size_t j = 0; j < dir->alpha1.size(); ++j)
      if (!(dir->alpha1[j] > 0.0))
        violations.push_back("alpha1[" + std::to_string(j + 1) + "] must be > 0");
    for (std::size_t j = 0; j < dir->alpha2.size(); ++j)
      if (!(dir->alpha2[j] > 0.0))
        violations.push_back("alpha2[" + std::to_string(j + 1) + "] must be > 0");
    if (!(dir->sigma > 0.0)) violations.push_back("sigma must be > 0");
  } else if (const auto* rs = std::get_if<GeneralRescaled>(&spec.law)) {
    if (!(rs->c1 > 0.0)) violations.push_back("c1 must be > 0");
    if (!(rs->c2 > 0.0)) violations.push_back("c2 must be > 0");
    if (!rs->base) {
      violations.push_back("rescaled law requires a base law");
    } else {
      for (const auto& v : validate_frailty(*rs->base, L1, L2)) violations.push_back("base: " + v);
    }
  }
  return violations;
}

void require_valid_frailty(const FrailtySpec& spec, int L1, int L2) {
  const auto violations = validate_frailty(spec, L1, L2);
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << "invalid frailty spec (" << spec.law_name() << "):";
  for (const auto& v : violations) msg << " " << v << ";";
  throw ParameterError(msg.str());
}

CorrelatedKappas correlated_kappas(double sigma1, double sigma2, double rho) {
  CorrelatedKappas k;
  k.kappa0 = rho / (sigma1 * sigma2);
  k.mu1 = 1.0 / (sigma1 * sigma1);
  k.mu2 = 1.0 / (sigma2 * sigma2);
  k.kappa1 = k.mu1 - k.kappa0;
  k.kappa2 = k.mu2 - k.kappa0;
  if (!(k.kappa0 > 0.0) || !(k.kappa1 > 0.0) || !(k.kappa2 > 0.0))
    throw ParameterError("correlated Gamma parameters outside the admissible region");
  return k;
}

FrailtyDraw sample_frailty(const FrailtySpec& spec, int L1, int L2, RngStream& rng) {
  require_valid_frailty(spec, L1, L2);
  FrailtyDraw draw;

  if (const auto* sg = std::get_if<SharedGamma>(&spec.law)) {
    const double c = 1.0 / (sg->sigma * sg->sigma);
    const double eps = rng.gamma(c, c);
    draw.eps1.assign(static_cast<std::size_t>(L1), eps);
    draw.eps2.assign(static_cast<std::size_t>(L2), eps);
  } else if (const auto* cg = std::get_if<CorrelatedGamma>(&spec.law)) {
    const auto k = correlated_kappas(cg->sigma1, cg->sigma2, cg->rho);
    const double y0 = rng.gamma(k.kappa0, 1.0);
    const double y1 = rng.gamma(k.kappa1, k.mu1);
    const double y2 = rng.gamma(k.kappa2, k.mu2);
    draw.eps1.assign(static_cast<std::size_t>(L1), y0 / k.mu1 + y1);
    draw.eps2.assign(static_cast<std::size_t>(L2), y0 / k.mu2 + y2);
  } else if (const auto* scs = std::get_if<SharedCauseSpecific>(&spec.law)) {
    draw.eps1.resize(static_cast<std::size_t>(L1));
    for (int j = 0; j < L1; ++j) {
      const double s = scs->sigmas[static_cast<std::size_t>(j)];
      const double c = 1.0 / (s * s);
      draw.eps1[static_cast<std::size_t>(j)] = rng.gamma(c, c);
    }
    draw.eps2 = draw.eps1;
  } else if (const auto* ccs = std::get_if<CorrelatedCauseSpecific>(&spec.law)) {
    draw.eps1.resize(static_cast<std::size_t>(L1));
    draw.eps2.resize(static_cast<std::size_t>(L2));
    for (int j = 0; j < L1; ++j) {
      const auto idx = static_cast<std::size_t>(j);
      const auto k = correlated_kappas(ccs->sigma1[idx], ccs->sigma2[idx], ccs->rho[idx]);
      const double y0 = rng.gamma(k.kappa0, 1.0);
      const double y1 = rng.gamma(k.kappa1, k.mu1);
      const double y2 = rng.gamma(k.kappa2, k.mu2);
      draw.eps1[idx] = y0 / k.mu1 + y1;
      draw.eps2[idx] = y0 / k.mu2 + y2;
    }
  } else if (const auto* dir = std::get_if<DirichletGamma>(&spec.law)) {
    const double c = 1.0 / (dir->sigma * dir->sigma);
    const double a = rng.gamma(c, c);
    draw.eps1 = rng.dirichlet(dir->alpha1);
    draw.eps2 = rng.dirichlet(dir->alpha2);
    for (auto& e : draw.eps1) e *= a;
    for (auto& e : draw.eps2) e *= a;
  } else if (const auto* rs = std::get_if<GeneralRescaled>(&spec.law)) {
    draw = sample_frailty(*rs->base, L1, L2, rng);
    for (auto& e : draw.eps1) e /= rs->c1;
    for (auto& e : draw.eps2) e *= rs->c2;
  }
  return draw;
}

double log_density(const FrailtySpec& spec, const FrailtyDraw& draw) {
  if (draw.eps1.empty() || draw.eps2.empty())
    throw ParameterError("log_density: draw must have at least one component per individual");

  if (const auto* sg = std::get_if<SharedGamma>(&spec.law)) {
    const double eps = draw.eps1.front();
    for (double e : draw.eps1)
      if (!nearly_equal(e, eps)) throw ParameterError("shared law draw has unequal components");
    for (double e : draw.eps2)
      if (!nearly_equal(e, eps)) throw ParameterError("shared law draw has unequal components");
    const double c = 1.0 / (sg->sigma * sg->sigma);
    return gamma_logpdf(eps, c, c);
  }
  if (const auto* scs = std::get_if<SharedCauseSpecific>(&spec.law)) {
    if (draw.eps1.size() != scs->sigmas.size() || draw.eps2.size() != scs->sigmas.size())
      throw ParameterError("shared cause-specific draw has wrong dimension");
    double value = 0.0;
    for (std::size_t j = 0; j < scs->sigmas.size(); ++j) {
      if (!nearly_equal(draw.eps1[j], draw.eps2[j]))
        throw ParameterError("shared cause-specific draw differs between individuals");
      const double c = 1.0 / (scs->sigmas[j] * scs->sigmas[j]);
      value += gamma_logpdf(draw.eps1[j], c, c);
    }
    return value;
  }
  if (const auto* dir = std::get_if<DirichletGamma>(&spec.law)) {
    if (draw.eps1.size() != dir->alpha1.size() || draw.eps2.size() != dir->alpha2.size())
      throw ParameterError("dirichlet draw has wrong dimension");
    const double a1 = std::accumulate(draw.eps1.begin(), draw.eps1.end(), 0.0);
    const double a2 = std::accumulate(draw.eps2.begin(), draw.eps2.end(), 0.0);
    if (!nearly_equal(a1, a2))
      throw ParameterError("dirichlet draw: component sums differ between individuals");
    if (!(a1 > 0.0)) return kNegInf;
    std::vector<double> eta1(draw.eps1), eta2(draw.eps2);
    for (auto& e : eta1) e /= a1;
    for (auto& e : eta2) e /= a1;
    const double c = 1.0 / (dir->sigma * dir->sigma);
    return gamma_logpdf(a1, c, c) + dirichlet_logpdf(eta1, dir->alpha1) +
           dirichlet_logpdf(eta2, dir->alpha2);
  }
  if (const auto* rs = std::get_if<GeneralRescaled>(&spec.law)) {
    FrailtyDraw base_draw;
    base_draw.eps1 = draw.eps1;
    base_draw.eps2 = draw.eps2;
    for (auto& e : base_draw.eps1) e *= rs->c1;
    for (auto& e : base_draw.eps2) e /= rs->c2;
    const int d = own_coordinate_count(*rs->base);
    return d * std::log(rs->c1) + log_density(*rs->base, base_draw);
  }
  throw CapabilityError(
      "correlated laws have no closed eps-space density; use latent_log_density with the "
      "(Y0,Y1,Y2) coordinates");
}

double gamma_laplace(double H, double sigma_sq) {
  if (H < 0.0) throw ParameterError("gamma_laplace requires H >= 0");
  if (!(sigma_sq > 0.0)) throw ParameterError("gamma_laplace requires sigma_sq > 0");
  return std::exp(-std::log1p(sigma_sq * H) / sigma_sq);
}

double gamma_tilted_moment(double sigma_sq, double s, int m) {
  if (s < 0.0) throw ParameterError("gamma_tilted_moment requires s >= 0");
  if (!(sigma_sq > 0.0)) throw ParameterError("gamma_tilted_moment requires sigma_sq > 0");
  const double log1v = std::log1p(sigma_sq * s);
  switch (m) {
    case 0:
      return std::exp(-log1v / sigma_sq);
    case 1:
      return std::exp(-(1.0 / sigma_sq + 1.0) * log1v);
    case 2:
      return (1.0 + sigma_sq) * std::exp(-(1.0 / sigma_sq + 2.0) * log1v);
    default:
      throw ParameterError("gamma_tilted_moment supports m = 0, 1, 2");
  }
}

double correlated_laplace(const CorrelatedKappas& k, double s1, double s2) {
  const double A = 1.0 + s1 / k.mu1 + s2 / k.mu2;
  const double B1 = 1.0 + s1 / k.mu1;
  const double B2 = 1.0 + s2 / k.mu2;
  return std::exp(-k.kappa0 * std::log(A) - k.kappa1 * std::log(B1) - k.kappa2 * std::log(B2));
}

double correlated_laplace_d1(const CorrelatedKappas& k, double s1, double s2, int which) {
  const double A = 1.0 + s1 / k.mu1 + s2 / k.mu2;
  const double B1 = 1.0 + s1 / k.mu1;
  const double B2 = 1.0 + s2 / k.mu2;
  const double L = correlated_laplace(k, s1, s2);
  if (which == 1) return L * (k.kappa0 / (k.mu1 * A) + k.kappa1 / (k.mu1 * B1));
  if (which == 2) return L * (k.kappa0 / (k.mu2 * A) + k.kappa2 / (k.mu2 * B2));
  throw ParameterError("correlated_laplace_d1: individual index must be 1 or 2");
}

double correlated_laplace_d12(const CorrelatedKappas& k, double s1, double s2) {
  const double A = 1.0 + s1 / k.mu1 + s2 / k.mu2;
  const double B1 = 1.0 + s1 / k.mu1;
  const double B2 = 1.0 + s2 / k.mu2;
  const double L = correlated_laplace(k, s1, s2);
  const double g1 = k.kappa0 / (k.mu1 * A) + k.kappa1 / (k.mu1 * B1);
  const double g2 = k.kappa0 / (k.mu2 * A) + k.kappa2 / (k.mu2 * B2);
  return L * (g1 * g2 + k.kappa0 / (k.mu1 * k.mu2 * A * A));
}

std::vector<LatentGamma> latent_components(const FrailtySpec& spec, int L1, int L2) {
  require_valid_frailty(spec, L1, L2);
  std::vector<LatentGamma> comps;
  if (const auto* sg = std::get_if<SharedGamma>(&spec.law)) {
    const double c = 1.0 / (sg->sigma * sg->sigma);
    comps.push_back({c, c});
  } else if (const auto* cg = std::get_if<CorrelatedGamma>(&spec.law)) {
    const auto k = correlated_kappas(cg->sigma1, cg->sigma2, cg->rho);
    comps.push_back({k.kappa0, 1.0});
    comps.push_back({k.kappa1, k.mu1});
    comps.push_back({k.kappa2, k.mu2});
  } else if (const auto* scs = std::get_if<SharedCauseSpecific>(&spec.law)) {
    for (double s : scs->sigmas) {
      const double c = 1.0 / (s * s);
      comps.push_back({c, c});
    }
  } else if (const auto* ccs = std::get_if<CorrelatedCauseSpecific>(&spec.law)) {
    for (std::size_t j = 0; j < ccs->sigma1.size(); ++j) {
      const auto k = correlated_kappas(ccs->sigma1[j], ccs->sigma2[j], ccs->rho[j]);
      comps.push_back({k.kappa0, 1.0});
      comps.push_back({k.kappa1, k.mu1});
      comps.push_back({k.kappa2, k.mu2});
    }
  } else if (const auto* dir = std::get_if<DirichletGamma>(&spec.law)) {
    const double c = 1.0 / (dir->sigma * dir->sigma);
    comps.push_back({c, c});
  } else if (const auto* rs = std::get_if<GeneralRescaled>(&spec.law)) {
    comps = latent_components(*rs->base, L1, L2);
  }
  return comps;
}

FrailtyDraw latent_to_draw(const FrailtySpec& spec, int L1, int L2,
                           std::span<const double> latent) {
  FrailtyDraw draw;
  if (const auto* sg = std::get_if<SharedGamma>(&spec.law)) {
    (void)sg;
    if (latent.size() != 1) throw ParameterError("shared gamma latent has dimension 1");
    draw.eps1.assign(static_cast<std::size_t>(L1), latent[0]);
    draw.eps2.assign(static_cast<std::size_t>(L2), latent[0]);
  } else if (const auto* cg = std::get_if<CorrelatedGamma>(&spec.law)) {
    if (latent.size() != 3) throw ParameterError("correlated gamma latent has dimension 3");
    const auto k = correlated_kappas(cg->sigma1, cg->sigma2, cg->rho);
    draw.eps1.assign(static_cast<std::size_t>(L1), latent[0] / k.mu1 + latent[1]);
    draw.eps2.assign(static_cast<std::size_t>(L2), latent[0] / k.mu2 + latent[2]);
  } else if (const auto* scs = std::get_if<SharedCauseSpecific>(&spec.law)) {
    if (latent.size() != scs->sigmas.size())
      throw ParameterError("shared cause-specific latent has dimension L");
    draw.eps1.assign(latent.begin(), latent.end());
    draw.eps2 = draw.eps1;
  } else if (const auto* ccs = std::get_if<CorrelatedCauseSpecific>(&spec.law)) {
    const std::size_t L = ccs->sigma1.size();
    if (latent.size() != 3 * L)
      throw ParameterError("correlated cause-specific latent has dimension 3L");
    draw.eps1.resize(L);
    draw.eps2.resize(L);
    for (std::size_t j = 0; j < L; ++j) {
      const auto k = correlated_kappas(ccs->sigma1[j], ccs->sigma2[j], ccs->rho[j]);
      draw.eps1[j] = latent[3 * j] / k.mu1 + latent[3 * j + 1];
      draw.eps2[j] = latent[3 * j] / k.mu2 + latent[3 * j + 2];
    }
  } else if (std::get_if<DirichletGamma>(&spec.law)) {
    throw CapabilityError(
        "dirichlet latent holds the shared scale only; its eta part is handled analytically");
  } else if (const auto* rs = std::get_if<GeneralRescaled>(&spec.law)) {
    draw = latent_to_draw(*rs->base, L1, L2, latent);
    for (auto& e : draw.eps1) e /= rs->c1;
    for (auto& e : draw.eps2) e *= rs->c2;
  }
  return draw;
}

double latent_log_density(const FrailtySpec& spec, int L1, int L2,
                          std::span<const double> latent) {
  const auto comps = latent_components(spec, L1, L2);
  if (latent.size() != comps.size())
    throw ParameterError("latent vector dimension mismatch");
  double value = 0.0;
  for (std::size_t i = 0; i < comps.size(); ++i)
    value += gamma_logpdf(latent[i], comps[i].shape, comps[i].rate);
  return value;
}

}  // namespace frailtycr
