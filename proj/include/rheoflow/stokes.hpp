#pragma once

#include <Eigen/Sparse>
#include <stdexcept>
#include <string>
#include <vector>

#include "rheoflow/fe_space.hpp"
#include "rheoflow/manufactured.hpp"
#include "rheoflow/quadrature.hpp"
#include "rheoflow/rheology.hpp"

namespace rheoflow {

/// Taylor-Hood pair on a structured mesh: continuous P_j velocity with
/// continuous P_{j-1} pressure, plus one scalar multiplier enforcing the
/// zero-mean pressure constraint.
///
/// Dof layout: [u_x, u_y per velocity node] ++ [p per pressure node] ++ [mu].
struct TaylorHood {
  Mesh mesh;
  FeSpace velocity;
  FeSpace pressure;
  int degree = 2;
  TriQuadrature assembly_quad;
  TriQuadrature error_quad;

  int n_velocity_nodes() const { return velocity.n_nodes(); }
  int n_pressure_nodes() const { return pressure.n_nodes(); }
  int n_dofs() const { return 2 * velocity.n_nodes() + pressure.n_nodes() + 1; }
  int u_dof(int node, int comp) const { return 2 * node + comp; }
  int p_dof(int node) const { return 2 * velocity.n_nodes() + node; }
  int mu_dof() const { return n_dofs() - 1; }
};

TaylorHood build_taylor_hood(int cells_per_side, int degree_j);

struct NewtonConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-9;
  int max_iter = 50;
  double ls_contraction = 0.5;
  double ls_sufficient_decrease = 1e-4;
  double ls_min_step = 1e-8;
  bool continuation = false;  // homotopy in the Carreau power index on stall
};

struct NewtonLogEntry {
  int iter = 0;
  double residual_norm = 0.0;
  double step = 1.0;
  double homotopy_n = 0.0;  // 0 when not in a continuation stage
};

struct NewtonResult {
  bool converged = false;
  bool used_continuation = false;
  std::vector<NewtonLogEntry> log;
};

struct NonConvergenceError : std::runtime_error {
  NewtonResult result;
  NonConvergenceError(std::string msg, NewtonResult res)
      : std::runtime_error(std::move(msg)), result(std::move(res)) {}
};

/// Sets boundary velocity dofs to the exact boundary data.
void apply_dirichlet(const TaylorHood& th, const ManufacturedCase& mc, Eigen::VectorXd& sol);

/// Nodal interpolant of the exact fields (mu = 0).
Eigen::VectorXd interpolate_exact(const TaylorHood& th, const ManufacturedCase& mc);

/// Residual of the discrete mixed system. The load is imposed weakly: the
/// exact fields are inserted into the same viscous/pressure forms (with
/// `load_model` as the viscosity) at quadrature points.
Eigen::VectorXd assemble_residual(const TaylorHood& th, const Eigen::VectorXd& sol,
                                  const ViscosityModel& model, const ViscosityModel& load_model,
                                  const ManufacturedCase& mc);

/// Exact tangent of assemble_residual with respect to (u, p, mu).
Eigen::SparseMatrix<double> assemble_jacobian(const TaylorHood& th, const Eigen::VectorXd& sol,
                                              const ViscosityModel& model);

NewtonResult newton_solve(const TaylorHood& th, const ViscosityModel& model,
                          const ViscosityModel& load_model, const ManufacturedCase& mc,
                          const NewtonConfig& config, Eigen::VectorXd& sol);

struct ErrorReport {
  double err_u = 0.0;  // full W^{1,r} norm
  double err_p = 0.0;  // L^{r'} norm
};

ErrorReport compute_errors(const TaylorHood& th, const Eigen::VectorXd& sol,
                           const ManufacturedCase& mc, double r);

/// W^{1,r} / L^{r'} norms of the FE fields themselves (pass a coefficient
/// difference to measure the distance between two solutions on one space).
ErrorReport fe_solution_norms(const TaylorHood& th, const Eigen::VectorXd& sol, double r);

double divergence_residual_max(const TaylorHood& th, const Eigen::VectorXd& sol);
double pressure_integral(const TaylorHood& th, const Eigen::VectorXd& sol);
double max_shear_rate(const TaylorHood& th, const Eigen::VectorXd& sol);
double strain_lp_norm(const TaylorHood& th, const Eigen::VectorXd& sol, double p);
/// sup over quadrature points of |k1(|eps(u)|) - k2(|eps(u)|)|.
double viscosity_gap_at_strains(const TaylorHood& th, const Eigen::VectorXd& sol,
                                const ViscosityModel& k1, const ViscosityModel& k2);

struct FePointValue {
  Eigen::Vector2d u;
  Eigen::Matrix2d grad_u;
  double p = 0.0;
};

/// Point evaluation on the structured mesh.
FePointValue evaluate_solution(const TaylorHood& th, const Eigen::VectorXd& sol, double x,
                               double y);

/// Error of a coarse solution against a reference solution on a finer mesh of
/// the same family, integrated over the fine mesh.
ErrorReport errors_vs_reference(const TaylorHood& coarse, const Eigen::VectorXd& sol_coarse,
                                const TaylorHood& fine, const Eigen::VectorXd& sol_fine,
                                double r);

struct RateRow {
  int degree = 0;
  int m = 0;
  double h = 0.0;
  double err_u = 0.0, err_p = 0.0;
  double rate_u = 0.0, rate_p = 0.0;  // pairwise log2 rates (0 for first row)
  bool failed = false;
};

struct RateTable {
  std::vector<RateRow> rows;
  double slope_u = 0.0, slope_p = 0.0;  // least-squares slopes of log err vs log h
};

void finalize_rates(RateTable& table);

RateTable convergence_study(const ViscosityModel& model, const ViscosityModel& load_model,
                            const ManufacturedCase& mc, int degree, const std::vector<int>& meshes,
                            double r, const NewtonConfig& config);

void save_rate_table_csv(const RateTable& table, const std::string& path);

void export_solution(const TaylorHood& th, const Eigen::VectorXd& sol, const std::string& path);

}  // namespace rheoflow
