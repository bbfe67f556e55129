#pragma once

#include "frailtycr/model.hpp"
#include "frailtycr/quadrature.hpp"

namespace frailtycr {

struct EvalOptions {
  double abs_tol_1d = 1e-10;
  double abs_tol_2d = 1e-8;
  long max_eval = 1000000;
};

// Closed-form evaluator for one model: the frailty expectation is always done
// analytically, leaving at most a 1-D (marginal) or 2-D (joint) quadrature
// over time. Rescaling wrappers are folded into the baseline hazards up
// front, which leaves the joint law unchanged. Construction validates the
// model once; evaluation methods are pure and thread-safe.
class ClosedFormEvaluator {
 public:
  explicit ClosedFormEvaluator(const ModelSpec& m, const EvalOptions& options = {});

  // P[T_k <= t, J_k = j]
  double marginal_subdist(int k, int j, double t) const;
  // P[T_1 <= t1, T_2 <= t2, J_1 = j1, J_2 = j2]
  double joint_subdist(const EvalPoint& p) const;
  // d^2/dt1 dt2 of the joint sub-distribution
  double joint_subdensity(const EvalPoint& p) const;
  // P[T_1 > t1, T_2 > t2]
  double joint_survival(double t1, double t2) const;

  const ModelSpec& reduced_model() const { return model_; }

 private:
  double density_integrand(double u1, double u2, int j1, int j2) const;

  ModelSpec model_;  // rescaled wrappers folded into the hazards
  EvalOptions options_;
};

// One-shot conveniences.
double marginal_subdist(const ModelSpec& m, int k, int j, double t, const EvalOptions& o = {});
double joint_subdist(const ModelSpec& m, const EvalPoint& p, const EvalOptions& o = {});
double joint_subdensity(const ModelSpec& m, const EvalPoint& p);
double joint_survival(const ModelSpec& m, double t1, double t2);

// Folds GeneralRescaled wrappers into the hazard set (hazards of individual 1
// scaled by 1/c1, individual 2 by c2), yielding an equivalent model whose
// frailty is one of the five concrete laws.
ModelSpec reduce_rescaled(const ModelSpec& m);

}  // namespace frailtycr
