#pragma once

#include <cstdint>

#include "frailtycr/model.hpp"

namespace frailtycr {

struct OracleEstimate {
  double value = 0.0;
  double std_error = 0.0;    // 0 for deterministic quadrature
  double achieved_tol = 0.0; // last refinement delta (quadrature only)
  long work = 0;             // integrand evaluations or MC draws
};

// Latent dimension the deterministic oracle integrates over (the Dirichlet
// law reduces to its shared scale because the simplex part enters the
// conditional sub-distributions linearly and is integrated analytically).
int oracle_quad_dimension(const ModelSpec& m);

// Ground truth for the joint sub-distribution: integrates the product of
// conditional sub-distribution factors (each a 1-D time quadrature) against
// the latent Gamma density with shape-matched generalized Gauss-Laguerre
// rules, doubling node counts until successive estimates differ by < tol.
// Requires oracle_quad_dimension(m) <= 3; use mc_joint_subdist beyond that.
OracleEstimate quad_joint_subdist(const ModelSpec& m, const EvalPoint& p, double tol = 1e-8);

// Same latent integration for the joint sub-density (no time quadrature in
// the integrand), feasible up to latent dimension 4.
OracleEstimate quad_joint_subdensity(const ModelSpec& m, const EvalPoint& p, double tol = 1e-9);

// Conditional sub-distribution F^(k)_j(t | eps) for a fixed frailty vector,
// by fixed-order Gauss-Legendre time quadrature (the building block of both
// oracle estimators).
double conditional_subdist(const ModelSpec& m, int k, int j, double t,
                           std::span<const double> eps, int nodes = 96);

// Monte Carlo forms: average of the conditional product over frailty draws,
// with the standard error from the sample variance. Draw i always uses the
// RNG stream derived from (seed, i), so estimates do not depend on how the
// work is split across threads.
OracleEstimate mc_joint_subdist(const ModelSpec& m, const EvalPoint& p, long n,
                                std::uint64_t seed, int threads = 0);
OracleEstimate mc_subdensity(const ModelSpec& m, const EvalPoint& p, long n, std::uint64_t seed,
                             int threads = 0);

}  // namespace frailtycr
