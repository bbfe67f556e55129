#pragma once

#include <string>
#include <vector>

#include "frailtycr/model.hpp"
#include "frailtycr/simulate.hpp"

namespace frailtycr {

struct LogLikelihood {
  double value = 0.0;
  long bad_record = -1;  // first record with non-positive density, if any
};

// Sum over records of log joint_subdensity; -inf (with the offending record
// index) when any record has zero density. Per-record terms are evaluated in
// parallel and combined by a fixed-order pairwise reduction.
LogLikelihood log_likelihood_detail(const Dataset& ds, const ModelSpec& m, int threads = 0);
double log_likelihood(const Dataset& ds, const ModelSpec& m, int threads = 0);

struct FitOptions {
  int max_iterations = 2000;
  double simplex_tol = 1e-6;  // simplex diameter in transformed coordinates
  double ll_tol = 1e-8;       // best-to-worst log-likelihood spread
  double initial_step = 0.1;  // initial simplex edge in transformed coordinates
  // Uniform rescaling of the optimizer coordinates (u' = scale * u); the
  // maximized likelihood must not depend on it.
  double coordinate_scale = 1.0;
  bool freeze_hazards = false;
  bool compute_std_errors = false;
  int threads = 0;
};

struct FitResult {
  ModelSpec model;  // structure copied from the init model, parameters fitted
  double log_lik = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<std::string> parameter_names;
  std::vector<double> parameters;  // natural scale, aligned with the names
  std::vector<double> std_errors;  // optional, natural scale, advisory only
};

// Transformed (unconstrained) optimizer coordinates: log for every positive
// parameter; correlation parameters map through
// rho = min(sigma1/sigma2, sigma2/sigma1) * logistic(u) so the admissible
// region is respected at every iterate.
std::vector<double> pack_parameters(const ModelSpec& m, bool include_hazards,
                                    std::vector<std::string>* names = nullptr);
ModelSpec unpack_parameters(const ModelSpec& structure, std::span<const double> u,
                            bool include_hazards);

// Derivative-free (Nelder-Mead) maximization of the log-likelihood starting
// from `init`. Non-convergence is reported, not thrown; the best point found
// is always returned.
FitResult fit_mle(const Dataset& ds, const ModelSpec& init, const FitOptions& options = {});

// Moment-based starting point: hazard scales from mean failure times, unit
// shapes, Dirichlet weights from empirical cause frequencies, and the frailty
// standard deviation picked from a coarse likelihood grid scan.
ModelSpec auto_init(const Dataset& ds, const ModelSpec& structure, int threads = 0);

}  // namespace frailtycr
