#pragma once

#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "frailtycr/errors.hpp"
#include "frailtycr/rng.hpp"

namespace frailtycr {

struct FrailtySpec;

// One Gamma frailty shared by both individuals and all causes;
// eps ~ Gamma(1/sigma^2, 1/sigma^2), mean 1, variance sigma^2.
struct SharedGamma {
  double sigma = 1.0;
};

// Individual-level frailty pair eps^(k) = Y0/mu_k + Y_k built from independent
// Y0 ~ Gamma(kappa0, 1), Y_k ~ Gamma(kappa_k, mu_k); sigma_k is the standard
// deviation of eps^(k) and rho their correlation, constrained by
// 0 < rho < min(sigma1/sigma2, sigma2/sigma1).
struct CorrelatedGamma {
  double sigma1 = 1.0, sigma2 = 1.0, rho = 0.5;
};

// One independent Gamma frailty per cause, shared between the two individuals.
struct SharedCauseSpecific {
  std::vector<double> sigmas;
};

// One correlated Gamma pair per cause, independent across causes.
struct CorrelatedCauseSpecific {
  std::vector<double> sigma1, sigma2, rho;
};

// eps^(k)_j = a * eta^(k)_j with a ~ Gamma(1/sigma^2, 1/sigma^2) shared and
// eta^(k) ~ Dirichlet(alpha^(k)) per individual, all independent.
struct DirichletGamma {
  std::vector<double> alpha1, alpha2;
  double sigma = 1.0;
};

// Rescaling wrapper realizing the hazard/frailty trade-off construction:
// draws are (eps1/c1, c2*eps2) for (eps1, eps2) from the base law, matching
// the density rescaling g~(e1,e2) = (c1^L1 / c2^L2) g(c1*e1, e2/c2).
struct GeneralRescaled {
  std::shared_ptr<const FrailtySpec> base;
  double c1 = 1.0, c2 = 1.0;
};

struct FrailtySpec {
  std::variant<SharedGamma, CorrelatedGamma, SharedCauseSpecific, CorrelatedCauseSpecific,
               DirichletGamma, GeneralRescaled>
      law;

  static FrailtySpec shared_gamma(double sigma);
  static FrailtySpec correlated_gamma(double sigma1, double sigma2, double rho);
  static FrailtySpec shared_cause_specific(std::vector<double> sigmas);
  static FrailtySpec correlated_cause_specific(std::vector<double> sigma1,
                                               std::vector<double> sigma2,
                                               std::vector<double> rho);
  static FrailtySpec dirichlet_gamma(std::vector<double> alpha1, std::vector<double> alpha2,
                                     double sigma);
  static FrailtySpec rescaled(FrailtySpec base, double c1, double c2);

  std::string law_name() const;
};

struct FrailtyDraw {
  std::vector<double> eps1, eps2;
};

// Returns every violated constraint; an empty list means the law is usable
// with a model having L1/L2 competing risks per individual.
std::vector<std::string> validate_frailty(const FrailtySpec& spec, int L1, int L2);
void require_valid_frailty(const FrailtySpec& spec, int L1, int L2);  // throws ParameterError

FrailtyDraw sample_frailty(const FrailtySpec& spec, int L1, int L2, RngStream& rng);

// Log density of the draw in the law's own coordinate system: the shared
// scalar for SharedGamma, the shared per-cause vector for SharedCauseSpecific,
// (a, eta) coordinates for DirichletGamma, and the first individual's scale
// for GeneralRescaled wrappers (where it reduces to the full-dimensional
// rescaling formula whenever the base density is full-dimensional). The
// correlated laws have no closed density in eps space; use
// latent_log_density with their (Y...) coordinates instead.
double log_density(const FrailtySpec& spec, const FrailtyDraw& draw);

// E[exp(-eps*H)] for eps ~ Gamma(1/sigma_sq, 1/sigma_sq).
double gamma_laplace(double H, double sigma_sq);

// E[eps^m * exp(-eps*s)] for eps ~ Gamma(1/sigma_sq, 1/sigma_sq), m = 0,1,2.
double gamma_tilted_moment(double sigma_sq, double s, int m);

// Derived Gamma component parameters of the correlated construction.
struct CorrelatedKappas {
  double kappa0, kappa1, kappa2;  // shapes of Y0, Y1, Y2
  double mu1, mu2;                // rates of Y1, Y2 (Y0 has rate fixed to 1)
};
CorrelatedKappas correlated_kappas(double sigma1, double sigma2, double rho);

// Joint Laplace transform of a correlated Gamma pair and its moment
// derivatives: E[e^{-s1 e1 - s2 e2}], E[e_k e^{-s.e}], E[e1 e2 e^{-s.e}].
double correlated_laplace(const CorrelatedKappas& k, double s1, double s2);
double correlated_laplace_d1(const CorrelatedKappas& k, double s1, double s2, int which);
double correlated_laplace_d12(const CorrelatedKappas& k, double s1, double s2);

// Latent coordinate description: every law is a deterministic map of
// independent Gamma variables (DirichletGamma additionally mixes in a
// Dirichlet vector, which the oracle handles analytically, so its latent
// reduces to the shared scale variable alone).
struct LatentGamma {
  double shape, rate;
};
std::vector<LatentGamma> latent_components(const FrailtySpec& spec, int L1, int L2);
// Maps a latent vector to a frailty draw; throws CapabilityError for
// DirichletGamma, whose eta part is integrated out analytically.
FrailtyDraw latent_to_draw(const FrailtySpec& spec, int L1, int L2,
                           std::span<const double> latent);
double latent_log_density(const FrailtySpec& spec, int L1, int L2,
                          std::span<const double> latent);

}  // namespace frailtycr
