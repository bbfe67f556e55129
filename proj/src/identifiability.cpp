#include "frailtycr/identifiability.hpp"

#include <algorithm>
#include <cmath>

#include "frailtycr/closedform.hpp"
#include "frailtycr/oracle.hpp"

namespace frailtycr {

GridSpec default_grid(const ModelSpec& m, int count, double hmin, double hmax) {
  validate_model(m);
  if (count < 1) throw ParameterError("grid count must be >= 1");
  GridSpec grid;
  for (int k = 1; k <= 2; ++k) {
    const std::vector<double> ones(static_cast<std::size_t>(m.num_causes(k)), 1.0);
    auto& axis = (k == 1) ? grid.t1 : grid.t2;
    for (int i = 0; i < count; ++i) {
      const double frac = (count == 1) ? 0.0 : static_cast<double>(i) / (count - 1);
      const double target = hmin * std::exp(frac * std::log(hmax / hmin));
      axis.push_back(total_inverse(m.hazards, k, ones, target));
    }
  }
  return grid;
}

InvarianceReport verify_general_nonidentifiability(const ModelSpec& base, double c1, double c2,
                                                   const GridSpec& grid, bool broken_pairing,
                                                   long mc_n, std::uint64_t seed, int threads) {
  validate_model(base);
  if (!(c1 > 0.0) || !(c2 > 0.0)) throw ParameterError("c1 and c2 must be > 0");

  ModelSpec tilde = base;
  for (auto& hz : tilde.hazards.individual1) hz = scale_hazard(hz, c1);
  for (auto& hz : tilde.hazards.individual2) hz = scale_hazard(hz, 1.0 / c2);
  if (!broken_pairing) tilde.frailty = FrailtySpec::rescaled(base.frailty, c1, c2);
  validate_model(tilde);

  const bool quadrable = oracle_quad_dimension(base) <= 4;

  InvarianceReport report;
  report.mode = "general";
  report.threshold = 1e-6;
  bool all_pass = true;
  std::uint64_t point_seed = seed;
  for (double t1 : grid.t1) {
    for (double t2 : grid.t2) {
      for (int j1 = 1; j1 <= base.num_causes(1); ++j1) {
        for (int j2 = 1; j2 <= base.num_causes(2); ++j2) {
          const EvalPoint p{t1, t2, j1, j2};
          PointDiff d;
          d.point = p;
          if (quadrable) {
            d.value_a = quad_joint_subdensity(base, p).value;
            d.value_b = quad_joint_subdensity(tilde, p).value;
          } else {
            const OracleEstimate ea = mc_subdensity(base, p, mc_n, point_seed++, threads);
            const OracleEstimate eb = mc_subdensity(tilde, p, mc_n, point_seed++, threads);
            d.value_a = ea.value;
            d.value_b = eb.value;
            d.std_error = std::sqrt(ea.std_error * ea.std_error + eb.std_error * eb.std_error);
          }
          d.diff = std::abs(d.value_a - d.value_b);
          const double point_threshold = std::max(1e-6, 4.0 * d.std_error);
          report.threshold = std::max(report.threshold, point_threshold);
          if (d.diff > point_threshold) all_pass = false;
          report.max_diff = std::max(report.max_diff, d.diff);
          report.points.push_back(d);
        }
      }
    }
  }
  report.pass = all_pass;
  return report;
}

InvarianceReport verify_dirichlet_invariance(const ModelSpec& dirichlet_model, double c1,
                                             double c2, const GridSpec& grid,
                                             double sigma_perturb) {
  validate_model(dirichlet_model);
  const auto* dir = std::get_if<DirichletGamma>(&dirichlet_model.frailty.law);
  if (!dir) throw ParameterError("verify_dirichlet_invariance requires a dirichlet_gamma law");
  if (!(c1 > 0.0) || !(c2 > 0.0)) throw ParameterError("c1 and c2 must be > 0");

  ModelSpec tilde = dirichlet_model;
  DirichletGamma scaled = *dir;
  for (auto& a : scaled.alpha1) a *= c1;
  for (auto& a : scaled.alpha2) a *= c2;
  scaled.sigma += sigma_perturb;
  tilde.frailty = FrailtySpec{scaled};
  validate_model(tilde);

  const ClosedFormEvaluator eval_a(dirichlet_model);
  const ClosedFormEvaluator eval_b(tilde);

  InvarianceReport report;
  report.mode = "dirichlet";
  report.threshold = 1e-12;
  for (double t1 : grid.t1) {
    for (double t2 : grid.t2) {
      for (int j1 = 1; j1 <= dirichlet_model.num_causes(1); ++j1) {
        for (int j2 = 1; j2 <= dirichlet_model.num_causes(2); ++j2) {
          const EvalPoint p{t1, t2, j1, j2};
          PointDiff d;
          d.point = p;
          d.value_a = eval_a.joint_subdist(p);
          d.value_b = eval_b.joint_subdist(p);
          d.diff = std::abs(d.value_a - d.value_b);
          report.max_diff = std::max(report.max_diff, d.diff);
          report.points.push_back(d);
        }
      }
    }
  }
  report.pass = report.max_diff <= report.threshold;
  return report;
}

InvarianceReport distinguishability_scan(const ModelSpec& a, const ModelSpec& b,
                                         const GridSpec& grid, double threshold) {
  validate_model(a);
  validate_model(b);
  if (a.num_causes(1) != b.num_causes(1) || a.num_causes(2) != b.num_causes(2))
    throw ParameterError("distinguishability_scan: models must have matching cause counts");

  const ClosedFormEvaluator eval_a(a);
  const ClosedFormEvaluator eval_b(b);

  InvarianceReport report;
  report.mode = "scan";
  report.threshold = threshold;
  for (double t1 : grid.t1) {
    for (double t2 : grid.t2) {
      for (int j1 = 1; j1 <= a.num_causes(1); ++j1) {
        for (int j2 = 1; j2 <= a.num_causes(2); ++j2) {
          const EvalPoint p{t1, t2, j1, j2};
          PointDiff d;
          d.point = p;
          d.value_a = eval_a.joint_subdist(p);
          d.value_b = eval_b.joint_subdist(p);
          d.diff = std::abs(d.value_a - d.value_b);
          report.max_diff = std::max(report.max_diff, d.diff);
          report.points.push_back(d);
        }
      }
    }
  }

  report.max_marginal_diff = 0.0;
  for (int k = 1; k <= 2; ++k) {
    const auto& axis = (k == 1) ? grid.t1 : grid.t2;
    for (double t : axis)
      for (int j = 1; j <= a.num_causes(k); ++j)
        report.max_marginal_diff =
            std::max(report.max_marginal_diff,
                     std::abs(eval_a.marginal_subdist(k, j, t) - eval_b.marginal_subdist(k, j, t)));
  }

  report.pass = report.max_diff > threshold;
  return report;
}

nlohmann::json report_to_json(const InvarianceReport& report) {
  nlohmann::json j;
  j["mode"] = report.mode;
  j["max_diff"] = report.max_diff;
  j["threshold"] = report.threshold;
  j["pass"] = report.pass;
  if (report.mode == "scan") j["max_marginal_diff"] = report.max_marginal_diff;
  j["points"] = nlohmann::json::array();
  for (const auto& d : report.points) {
    nlohmann::json pj;
    pj["t1"] = d.point.t1;
    pj["t2"] = d.point.t2;
    pj["j1"] = d.point.j1;
    pj["j2"] = d.point.j2;
    pj["value_a"] = d.value_a;
    pj["value_b"] = d.value_b;
    pj["diff"] = d.diff;
    if (d.std_error > 0.0) pj["std_error"] = d.std_error;
    j["points"].push_back(pj);
  }
  return j;
}

}  // namespace frailtycr
