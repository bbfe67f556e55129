#include "frailtycr/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <queue>

namespace frailtycr {

namespace {

// Kronrod-15 abscissae (positive half) and weights, with the embedded
// Gauss-7 weights on the odd-indexed abscissae (QUADPACK dqk15 constants).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelEstimate {
  double kronrod = 0.0;
  double gauss = 0.0;
  double resasc = 0.0;  // integral of |f - mean|, for the QUADPACK error scale
};

template <typename Eval>
PanelEstimate gk15(const Eval& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(center - half * kXgk[i]);
    fv[14 - i] = f(center + half * kXgk[i]);
  }
  fv[7] = f(center);

  PanelEstimate est;
  for (int i = 0; i < 7; ++i) est.kronrod += kWgk[i] * (fv[i] + fv[14 - i]);
  est.kronrod += kWgk[7] * fv[7];
  for (int i = 0; i < 3; ++i) est.gauss += kWg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  est.gauss += kWg[3] * fv[7];

  const double mean = 0.5 * est.kronrod;
  for (int i = 0; i < 7; ++i)
    est.resasc += kWgk[i] * (std::abs(fv[i] - mean) + std::abs(fv[14 - i] - mean));
  est.resasc += kWgk[7] * std::abs(fv[7] - mean);

  est.kronrod *= half;
  est.gauss *= half;
  est.resasc *= std::abs(half);
  return est;
}

double panel_error(const PanelEstimate& est) {
  double err = std::abs(est.kronrod - est.gauss);
  if (est.resasc != 0.0 && err != 0.0)
    err = est.resasc * std::min(1.0, std::pow(200.0 * err / est.resasc, 1.5));
  return err;
}

struct Segment1D {
  double a, b, value, error;
  bool operator<(const Segment1D& o) const { return error < o.error; }
};

struct Segment2D {
  double ax, bx, ay, by, value, error;
  bool operator<(const Segment2D& o) const { return error < o.error; }
};

}  // namespace

QuadResult integrate_1d(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, long max_eval) {
  QuadResult out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  auto make_segment = [&](double lo, double hi) {
    PanelEstimate est = gk15(f, lo, hi);
    out.evaluations += 15;
    return Segment1D{lo, hi, est.kronrod, panel_error(est)};
  };

  std::priority_queue<Segment1D> queue;
  queue.push(make_segment(a, b));
  double total_value = queue.top().value;
  double total_error = queue.top().error;

  while (total_error > abs_tol) {
    if (out.evaluations + 30 > max_eval || queue.empty()) {
      out.value = total_value;
      out.error = total_error;
      throw NumericError("integrate_1d: tolerance not reached within evaluation budget",
                         total_error);
    }
    Segment1D worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // Interval at floating-point resolution; accept its estimate as final.
      total_error -= worst.error;
      continue;
    }
    Segment1D left = make_segment(worst.a, mid);
    Segment1D right = make_segment(mid, worst.b);
    total_value += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
  }
  out.value = total_value;
  out.error = total_error;
  out.converged = true;
  return out;
}

QuadResult integrate_2d(const std::function<double(double, double)>& f, double ax, double bx,
                        double ay, double by, double abs_tol, long max_eval) {
  QuadResult out;
  if (ax == bx || ay == by) {
    out.converged = true;
    return out;
  }

  // Tensor GK15: Kronrod value from the full 15x15 grid, embedded Gauss value
  // from the 7x7 sub-grid; the difference drives refinement.
  auto estimate = [&](double x0, double x1, double y0, double y1) {
    const double cx = 0.5 * (x0 + x1), hx = 0.5 * (x1 - x0);
    const double cy = 0.5 * (y0 + y1), hy = 0.5 * (y1 - y0);
    double xs[15], ys[15];
    for (int i = 0; i < 7; ++i) {
      xs[i] = cx - hx * kXgk[i];
      xs[14 - i] = cx + hx * kXgk[i];
      ys[i] = cy - hy * kXgk[i];
      ys[14 - i] = cy + hy * kXgk[i];
    }
    xs[7] = cx;
    ys[7] = cy;

    double fv[15][15];
    for (int i = 0; i < 15; ++i)
      for (int j = 0; j < 15; ++j) fv[i][j] = f(xs[i], ys[j]);
    out.evaluations += 225;

    auto wk = [](int i) { return kWgk[i < 8 ? i : 14 - i]; };
    double kron = 0.0;
    for (int i = 0; i < 15; ++i) {
      double row = 0.0;
      for (int j = 0; j < 15; ++j) row += wk(j) * fv[i][j];
      kron += wk(i) * row;
    }
    auto wg = [](int g) { return kWg[g < 4 ? g : 6 - g]; };
    double gauss = 0.0;
    for (int gi = 0; gi < 7; ++gi) {
      double row = 0.0;
      for (int gj = 0; gj < 7; ++gj) row += wg(gj) * fv[2 * gi + 1][2 * gj + 1];
      gauss += wg(gi) * row;
    }
    // QUADPACK-style damped error estimate, as in the 1-D rule.
    const double mean = 0.25 * kron;
    double resasc = 0.0;
    for (int i = 0; i < 15; ++i) {
      double row = 0.0;
      for (int j = 0; j < 15; ++j) row += wk(j) * std::abs(fv[i][j] - mean);
      resasc += wk(i) * row;
    }
    const double scale = hx * hy;
    resasc *= std::abs(scale);
    double err = std::abs((kron - gauss) * scale);
    if (resasc != 0.0 && err != 0.0)
      err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    Segment2D seg{x0, x1, y0, y1, kron * scale, err};
    return seg;
  };

  std::priority_queue<Segment2D> queue;
  queue.push(estimate(ax, bx, ay, by));
  double total_value = queue.top().value;
  double total_error = queue.top().error;

  while (total_error > abs_tol) {
    if (out.evaluations + 450 > max_eval || queue.empty()) {
      out.value = total_value;
      out.error = total_error;
      throw NumericError("integrate_2d: tolerance not reached within evaluation budget",
                         total_error);
    }
    Segment2D worst = queue.top();
    queue.pop();
    const double wx = worst.bx - worst.ax, wy = worst.by - worst.ay;
    Segment2D first, second;
    if (wx >= wy) {
      const double mid = 0.5 * (worst.ax + worst.bx);
      if (mid <= worst.ax || mid >= worst.bx) {
        total_error -= worst.error;  // rectangle at floating-point resolution
        continue;
      }
      first = estimate(worst.ax, mid, worst.ay, worst.by);
      second = estimate(mid, worst.bx, worst.ay, worst.by);
    } else {
      const double mid = 0.5 * (worst.ay + worst.by);
      if (mid <= worst.ay || mid >= worst.by) {
        total_error -= worst.error;
        continue;
      }
      first = estimate(worst.ax, worst.bx, worst.ay, mid);
      second = estimate(worst.ax, worst.bx, mid, worst.by);
    }
    total_value += first.value + second.value - worst.value;
    total_error += first.error + second.error - worst.error;
    queue.push(first);
    queue.push(second);
  }
  out.value = total_value;
  out.error = total_error;
  out.converged = true;
  return out;
}

const QuadNodes& gauss_legendre(int n) {
  static std::map<int, QuadNodes> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  if (n < 1) throw ParameterError("gauss_legendre order must be >= 1");

  QuadNodes nodes;
  nodes.x.resize(static_cast<std::size_t>(n));
  nodes.w.resize(static_cast<std::size_t>(n));
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    nodes.x[static_cast<std::size_t>(i)] = -z;
    nodes.x[static_cast<std::size_t>(n - 1 - i)] = z;
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    nodes.w[static_cast<std::size_t>(i)] = w;
    nodes.w[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return cache.emplace(n, std::move(nodes)).first->second;
}

const QuadNodes& gauss_laguerre_gamma(int n, double alpha) {
  static std::map<std::pair<int, double>, QuadNodes> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_pair(n, alpha);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  if (n < 1) throw ParameterError("gauss_laguerre_gamma order must be >= 1");
  if (!(alpha > -1.0)) throw ParameterError("gauss_laguerre_gamma requires alpha > -1");

  // Golub-Welsch: Jacobi matrix of the generalized Laguerre recurrence.
  Eigen::VectorXd diag(n), subdiag(std::max(n - 1, 1));
  for (int k = 0; k < n; ++k) diag(k) = 2.0 * k + alpha + 1.0;
  for (int k = 1; k < n; ++k) subdiag(k - 1) = std::sqrt(k * (k + alpha));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, subdiag.head(std::max(n - 1, 0)));
  if (solver.info() != Eigen::Success)
    throw NumericError("gauss_laguerre_gamma: eigen decomposition failed", 0.0);

  QuadNodes nodes;
  nodes.x.resize(static_cast<std::size_t>(n));
  nodes.w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    nodes.x[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    const double q0 = solver.eigenvectors()(0, i);
    nodes.w[static_cast<std::size_t>(i)] = q0 * q0;  // normalized zeroth moment
  }
  return cache.emplace(key, std::move(nodes)).first->second;
}

}  // namespace frailtycr
