#pragma once

#include <functional>
#include <vector>

#include "frailtycr/errors.hpp"

namespace frailtycr {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  long evaluations = 0;
  bool converged = false;
};

// Adaptive Gauss-Kronrod (7,15) on [a,b] to absolute tolerance `abs_tol`.
// Throws NumericError carrying the achieved error when the evaluation budget
// runs out before the tolerance is met.
QuadResult integrate_1d(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1e-10, long max_eval = 1000000);

// Adaptive tensor Gauss-Kronrod on the rectangle [ax,bx] x [ay,by].
QuadResult integrate_2d(const std::function<double(double, double)>& f, double ax, double bx,
                        double ay, double by, double abs_tol = 1e-8, long max_eval = 1000000);

struct QuadNodes {
  std::vector<double> x, w;
};

// Gauss-Legendre nodes/weights on [-1,1]; cached by order.
const QuadNodes& gauss_legendre(int n);

// Generalized Gauss-Laguerre rule for the normalized Gamma weight
// x^alpha * exp(-x) / Gamma(alpha+1), alpha > -1; the weights sum to one, so
// sum_i w_i f(x_i) approximates E[f(X)] for X ~ Gamma(alpha+1, 1).
// Computed by Golub-Welsch and cached by (n, alpha).
const QuadNodes& gauss_laguerre_gamma(int n, double alpha);

}  // namespace frailtycr
