#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "rheoflow/rheology.hpp"

namespace rheoflow {

struct VerifierConfig {
  int n_samples = 100;
  double t_max = 70.0;
  int de_population = 60;  // 15 * dim
  double de_F = 0.8;
  double de_CR = 0.9;
  int de_generations = 10000;
  std::uint64_t seed = 0;
  double feas_tol = 1e-8;
  double penalty_weight = 1e6;
  // Initial guess seeded into the population.
  double C0 = 10.0, alpha0 = 0.5, r0 = 1.5, M0 = 10.0;
  // Box bounds for the search.
  double C_max = 100.0, r_max = 4.0, M_max = 100.0;
  // Relative slack applied when tightening (C up, M down) after the search,
  // so the certificate stays feasible on denser sample grids.
  double repair_margin = 0.02;
  // Post-search refinement: the objective is nearly flat in alpha, so among
  // parameter sets within this relative slack of the best objective the least
  // degenerate one (smallest alpha) is certified.
  double alpha_slack = 0.25;
  double alpha_step = 0.025;

  void validate() const;
};

struct WorstResiduals {
  double f1 = 0.0, f2 = 0.0, f3 = 0.0;
};

struct AssumptionCertificate {
  double C = 0.0, alpha = 0.0, r = 2.0, M = 0.0;
  WorstResiduals worst_residuals;
  double objective = 0.0;
  bool satisfied = false;
};

struct SampleGrid {
  Eigen::VectorXd t, s;
};

/// N values each for t and s, uniform in (0, t_max]; zero excluded.
SampleGrid sample_grid(const VerifierConfig& config);

struct ResidualEval {
  Eigen::VectorXd f1;        // per t_j
  Eigen::MatrixXd f2, f3;    // (i, j); masked-out entries are NaN
  double F = 0.0;            // sum over f1 and the masked f2/f3 entries
  WorstResiduals worst;      // min over the active entries of each block
};

ResidualEval residuals(const ViscosityModel& k, const Eigen::VectorXd& t,
                       const Eigen::VectorXd& s, double C, double alpha, double r, double M);

/// Differential evolution (best/1/bin) over box-bounded (C, alpha, r, M)
/// minimizing F plus a quadratic penalty on constraint violations, followed
/// by a closed-form tightening of C and M.
AssumptionCertificate verify(const ViscosityModel& k, const VerifierConfig& config);

std::string certificate_to_json(const AssumptionCertificate& cert, const VerifierConfig& config);
void save_certificate(const AssumptionCertificate& cert, const VerifierConfig& config,
                      const std::string& path);

}  // namespace rheoflow
