#include "rheoflow/stokes.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

#include <json.hpp>

namespace rheoflow {

namespace {

struct BasisTab {
  std::vector<Eigen::VectorXd> vals;
  std::vector<Eigen::Matrix<double, Eigen::Dynamic, 2>> grads;
};

BasisTab tabulate(const LagrangeBasis& basis, const TriQuadrature& quad) {
  BasisTab tab;
  const int nq = static_cast<int>(quad.points.rows());
  tab.vals.resize(nq);
  tab.grads.resize(nq);
  for (int q = 0; q < nq; ++q)
    basis.eval(quad.points(q, 0), quad.points(q, 1), tab.vals[q], tab.grads[q]);
  return tab;
}

struct ElemGeom {
  Eigen::Vector2d p0;
  Eigen::Matrix2d J;
  Eigen::Matrix2d invJ;
  double detJ = 0.0;
};

ElemGeom elem_geom(const Mesh& mesh, int el) {
  ElemGeom g;
  const auto& tri = mesh.triangles[el];
  g.p0 = mesh.vertices[tri[0]];
  g.J.col(0) = mesh.vertices[tri[1]] - g.p0;
  g.J.col(1) = mesh.vertices[tri[2]] - g.p0;
  g.detJ = g.J(0, 0) * g.J(1, 1) - g.J(0, 1) * g.J(1, 0);
  g.invJ = g.J.inverse();
  return g;
}

SymTensor2 symmetric_part(const Eigen::Matrix2d& G) {
  return SymTensor2{G(0, 0), G(1, 1), 0.5 * (G(0, 1) + G(1, 0))};
}

}  // namespace

TaylorHood build_taylor_hood(int cells_per_side, int degree_j) {
  if (degree_j < 2) throw std::invalid_argument("build_taylor_hood: degree must be >= 2");
  TaylorHood th;
  th.degree = degree_j;
  th.mesh = build_mesh(cells_per_side);
  th.velocity = build_fe_space(th.mesh, degree_j);
  th.pressure = build_fe_space(th.mesh, degree_j - 1);
  th.assembly_quad = triangle_rule(degree_j == 2 ? 5 : 2 * degree_j + 1);
  th.error_quad = triangle_rule(2 * degree_j + 5);
  return th;
}

void apply_dirichlet(const TaylorHood& th, const ManufacturedCase& mc, Eigen::VectorXd& sol) {
  for (int n = 0; n < th.velocity.n_nodes(); ++n) {
    if (!th.velocity.boundary_node[n]) continue;
    const Eigen::Vector2d& x = th.velocity.node_coords[n];
    const Eigen::Vector2d ub = mc.velocity(x.x(), x.y());
    sol[th.u_dof(n, 0)] = ub.x();
    sol[th.u_dof(n, 1)] = ub.y();
  }
}

Eigen::VectorXd interpolate_exact(const TaylorHood& th, const ManufacturedCase& mc) {
  Eigen::VectorXd sol = Eigen::VectorXd::Zero(th.n_dofs());
  for (int n = 0; n < th.velocity.n_nodes(); ++n) {
    const Eigen::Vector2d& x = th.velocity.node_coords[n];
    const Eigen::Vector2d u = mc.velocity(x.x(), x.y());
    sol[th.u_dof(n, 0)] = u.x();
    sol[th.u_dof(n, 1)] = u.y();
  }
  for (int n = 0; n < th.pressure.n_nodes(); ++n) {
    const Eigen::Vector2d& x = th.pressure.node_coords[n];
    sol[th.p_dof(n)] = mc.pressure(x.x(), x.y());
  }
  return sol;
}

Eigen::VectorXd assemble_residual(const TaylorHood& th, const Eigen::VectorXd& sol,
                                  const ViscosityModel& model, const ViscosityModel& load_model,
                                  const ManufacturedCase& mc) {
  const int nv = th.velocity.n_local_nodes();
  const int np = th.pressure.n_local_nodes();
  const TriQuadrature& quad = th.assembly_quad;
  const int nq = static_cast<int>(quad.points.rows());
  const BasisTab vb = tabulate(LagrangeBasis::get(th.velocity.degree), quad);
  const BasisTab pb = tabulate(LagrangeBasis::get(th.pressure.degree), quad);

  Eigen::VectorXd R = Eigen::VectorXd::Zero(th.n_dofs());
  const double mu = sol[th.mu_dof()];

  Eigen::VectorXd ux(nv), uy(nv), pc(np);
  Eigen::Matrix<double, Eigen::Dynamic, 2> gphys(nv, 2);

  for (int el = 0; el < th.mesh.n_triangles(); ++el) {
    const ElemGeom g = elem_geom(th.mesh, el);
    for (int i = 0; i < nv; ++i) {
      const int n = th.velocity.element_nodes(el, i);
      ux[i] = sol[th.u_dof(n, 0)];
      uy[i] = sol[th.u_dof(n, 1)];
    }
    for (int i = 0; i < np; ++i) pc[i] = sol[th.p_dof(th.pressure.element_nodes(el, i))];

    for (int q = 0; q < nq; ++q) {
      gphys.noalias() = vb.grads[q] * g.invJ;
      Eigen::Matrix2d G;
      G(0, 0) = ux.dot(gphys.col(0));
      G(0, 1) = ux.dot(gphys.col(1));
      G(1, 0) = uy.dot(gphys.col(0));
      G(1, 1) = uy.dot(gphys.col(1));
      const SymTensor2 eps = symmetric_part(G);
      const StressEval se = stress_eval(model, eps);
      const double ph = pc.dot(pb.vals[q]);

      const Eigen::Vector2d X =
          g.p0 + g.J * Eigen::Vector2d(quad.points(q, 0), quad.points(q, 1));
      const SymTensor2 epsb = symmetric_part(mc.velocity_gradient(X.x(), X.y()));
      const double kb = viscosity_eval(load_model, std::sqrt(epsb.frobenius_norm_sq()));
      const double pbx = mc.pressure(X.x(), X.y());

      const double w = quad.weights[q] * g.detJ;
      const double dxx = se.tau.xx - kb * epsb.xx;
      const double dyy = se.tau.yy - kb * epsb.yy;
      const double dxy = se.tau.xy - kb * epsb.xy;
      const double dp = ph - pbx;

      for (int i = 0; i < nv; ++i) {
        const int n = th.velocity.element_nodes(el, i);
        const double gx = gphys(i, 0), gy = gphys(i, 1);
        R[th.u_dof(n, 0)] += w * (dxx * gx + dxy * gy - dp * gx);
        R[th.u_dof(n, 1)] += w * (dyy * gy + dxy * gx - dp * gy);
      }
      const double divu = G(0, 0) + G(1, 1);
      for (int i = 0; i < np; ++i)
        R[th.p_dof(th.pressure.element_nodes(el, i))] += w * pb.vals[q][i] * (divu + mu);
      R[th.mu_dof()] += w * ph;
    }
  }

  for (int n = 0; n < th.velocity.n_nodes(); ++n) {
    if (!th.velocity.boundary_node[n]) continue;
    const Eigen::Vector2d& x = th.velocity.node_coords[n];
    const Eigen::Vector2d ub = mc.velocity(x.x(), x.y());
    R[th.u_dof(n, 0)] = sol[th.u_dof(n, 0)] - ub.x();
    R[th.u_dof(n, 1)] = sol[th.u_dof(n, 1)] - ub.y();
  }
  return R;
}

Eigen::SparseMatrix<double> assemble_jacobian(const TaylorHood& th, const Eigen::VectorXd& sol,
                                              const ViscosityModel& model) {
  const int nv = th.velocity.n_local_nodes();
  const int np = th.pressure.n_local_nodes();
  const TriQuadrature& quad = th.assembly_quad;
  const int nq = static_cast<int>(quad.points.rows());
  const BasisTab vb = tabulate(LagrangeBasis::get(th.velocity.degree), quad);
  const BasisTab pb = tabulate(LagrangeBasis::get(th.pressure.degree), quad);

  const int ndof = th.n_dofs();
  std::vector<char> dirichlet(ndof, 0);
  for (int n = 0; n < th.velocity.n_nodes(); ++n) {
    if (!th.velocity.boundary_node[n]) continue;
    dirichlet[th.u_dof(n, 0)] = 1;
    dirichlet[th.u_dof(n, 1)] = 1;
  }

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(th.mesh.n_triangles()) * (2 * nv + np + 2) * (2 * nv + np));

  const int nloc = 2 * nv + np;
  Eigen::MatrixXd K(nloc, nloc);
  Eigen::VectorXd pm(np);
  Eigen::VectorXd ux(nv), uy(nv);
  Eigen::Matrix<double, Eigen::Dynamic, 2> gphys(nv, 2);
  std::vector<int> gdof(nloc);

  for (int el = 0; el < th.mesh.n_triangles(); ++el) {
    const ElemGeom g = elem_geom(th.mesh, el);
    for (int i = 0; i < nv; ++i) {
      const int n = th.velocity.element_nodes(el, i);
      ux[i] = sol[th.u_dof(n, 0)];
      uy[i] = sol[th.u_dof(n, 1)];
      gdof[2 * i] = th.u_dof(n, 0);
      gdof[2 * i + 1] = th.u_dof(n, 1);
    }
    for (int i = 0; i < np; ++i) gdof[2 * nv + i] = th.p_dof(th.pressure.element_nodes(el, i));
    K.setZero();
    pm.setZero();

    for (int q = 0; q < nq; ++q) {
      gphys.noalias() = vb.grads[q] * g.invJ;
      Eigen::Matrix2d G;
      G(0, 0) = ux.dot(gphys.col(0));
      G(0, 1) = ux.dot(gphys.col(1));
      G(1, 0) = uy.dot(gphys.col(0));
      G(1, 1) = uy.dot(gphys.col(1));
      const SymTensor2 eps = symmetric_part(G);
      const StressEval se = stress_eval(model, eps);
      const double w = quad.weights[q] * g.detJ;

      // eps(u) : eps(test (i,c)) for both components
      for (int i = 0; i < nv; ++i) {
        const double gxi = gphys(i, 0), gyi = gphys(i, 1);
        const double du_x = eps.xx * gxi + eps.xy * gyi;
        const double du_y = eps.yy * gyi + eps.xy * gxi;
        for (int j = 0; j < nv; ++j) {
          const double gxj = gphys(j, 0), gyj = gphys(j, 1);
          const double dv_x = eps.xx * gxj + eps.xy * gyj;
          const double dv_y = eps.yy * gyj + eps.xy * gxj;
          K(2 * i, 2 * j) += w * (se.a * (gxi * gxj + 0.5 * gyi * gyj) + se.b * du_x * dv_x);
          K(2 * i, 2 * j + 1) += w * (se.a * 0.5 * gyi * gxj + se.b * du_x * dv_y);
          K(2 * i + 1, 2 * j) += w * (se.a * 0.5 * gxi * gyj + se.b * du_y * dv_x);
          K(2 * i + 1, 2 * j + 1) +=
              w * (se.a * (gyi * gyj + 0.5 * gxi * gxj) + se.b * du_y * dv_y);
        }
        for (int jp = 0; jp < np; ++jp) {
          const double psi = pb.vals[q][jp];
          K(2 * i, 2 * nv + jp) -= w * psi * gxi;
          K(2 * i + 1, 2 * nv + jp) -= w * psi * gyi;
          K(2 * nv + jp, 2 * i) += w * psi * gxi;
          K(2 * nv + jp, 2 * i + 1) += w * psi * gyi;
        }
      }
      for (int ip = 0; ip < np; ++ip) pm[ip] += w * pb.vals[q][ip];
    }

    for (int a = 0; a < nloc; ++a) {
      const int row = gdof[a];
      if (dirichlet[row]) continue;
      for (int b = 0; b < nloc; ++b) {
        const double v = K(a, b);
        if (v != 0.0) trips.emplace_back(row, gdof[b], v);
      }
    }
    for (int ip = 0; ip < np; ++ip) {
      const int pd = gdof[2 * nv + ip];
      trips.emplace_back(pd, th.mu_dof(), pm[ip]);
      trips.emplace_back(th.mu_dof(), pd, pm[ip]);
    }
  }

  for (int d = 0; d < ndof; ++d)
    if (dirichlet[d]) trips.emplace_back(d, d, 1.0);

  Eigen::SparseMatrix<double> J(ndof, ndof);
  J.setFromTriplets(trips.begin(), trips.end());
  J.makeCompressed();
  return J;
}

namespace {

// One Newton run at a fixed viscosity model. Returns false on linear-solver
// failure, line-search stall, or exhausted iterations.
bool newton_stage(const TaylorHood& th, const ViscosityModel& model,
                  const ViscosityModel& load_model, const ManufacturedCase& mc,
                  const NewtonConfig& config, Eigen::VectorXd& sol, NewtonResult& result,
                  double stage_n) {
  apply_dirichlet(th, mc, sol);
  Eigen::VectorXd R = assemble_residual(th, sol, model, load_model, mc);
  double rn = R.norm();
  const double tol = std::max(config.abs_tol, config.rel_tol * rn);
  result.log.push_back({0, rn, 0.0, stage_n});

  for (int it = 1; it <= config.max_iter; ++it) {
    if (rn <= tol) return true;
    const Eigen::SparseMatrix<double> J = assemble_jacobian(th, sol, model);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success) return false;
    const Eigen::VectorXd d = lu.solve(-R);
    if (lu.info() != Eigen::Success) return false;

    double s = 1.0;
    Eigen::VectorXd trial;
    Eigen::VectorXd Rt;
    double rt = 0.0;
    while (true) {
      trial = sol + s * d;
      Rt = assemble_residual(th, trial, model, load_model, mc);
      rt = Rt.norm();
      if (std::isfinite(rt) && rt <= (1.0 - config.ls_sufficient_decrease * s) * rn) break;
      s *= config.ls_contraction;
      if (s < config.ls_min_step) return false;
    }
    sol = trial;
    R = Rt;
    rn = rt;
    result.log.push_back({it, rn, s, stage_n});
  }
  return rn <= tol;
}

bool power_index(const ViscosityModel& model, double& n_out) {
  if (const auto* c = std::get_if<CarreauParams>(&model.variant)) {
    n_out = c->n;
    return true;
  }
  if (const auto* p = std::get_if<PowerLawParams>(&model.variant)) {
    n_out = p->n;
    return true;
  }
  return false;
}

ViscosityModel with_power_index(const ViscosityModel& model, double n) {
  ViscosityModel out = model;
  if (auto* c = std::get_if<CarreauParams>(&out.variant))
    c->n = n;
  else if (auto* p = std::get_if<PowerLawParams>(&out.variant))
    p->n = n;
  return out;
}

}  // namespace

NewtonResult newton_solve(const TaylorHood& th, const ViscosityModel& model,
                          const ViscosityModel& load_model, const ManufacturedCase& mc,
                          const NewtonConfig& config, Eigen::VectorXd& sol) {
  NewtonResult result;
  Eigen::VectorXd work = sol;
  if (newton_stage(th, model, load_model, mc, config, work, result, 0.0)) {
    sol = work;
    result.converged = true;
    return result;
  }

  double n_target = 0.0;
  if (config.continuation && power_index(model, n_target) && n_target != 2.0) {
    result.used_continuation = true;
    work = sol;
    for (int k = 0; k <= 4; ++k) {
      const double nk = 2.0 + (n_target - 2.0) * k / 4.0;
      const ViscosityModel mk = with_power_index(model, nk);
      if (!newton_stage(th, mk, load_model, mc, config, work, result, nk))
        throw NonConvergenceError("newton_solve: continuation stage failed", std::move(result));
    }
    sol = work;
    result.converged = true;
    return result;
  }
  throw NonConvergenceError("newton_solve: line search stalled or max iterations reached",
                            std::move(result));
}

ErrorReport compute_errors(const TaylorHood& th, const Eigen::VectorXd& sol,
                           const ManufacturedCase& mc, double r) {
  const int nv = th.velocity.n_local_nodes();
  const int np = th.pressure.n_local_nodes();
  const TriQuadrature& quad = th.error_quad;
  const int nq = static_cast<int>(quad.points.rows());
  const BasisTab vb = tabulate(LagrangeBasis::get(th.velocity.degree), quad);
  const BasisTab pb = tabulate(LagrangeBasis::get(th.pressure.degree), quad);
  const double rp = r / (r - 1.0);

  double su = 0.0, sp = 0.0;
  Eigen::VectorXd ux(nv), uy(nv), pc(np);
  Eigen::Matrix<double, Eigen::Dynamic, 2> gphys(nv, 2);

  for (int el = 0; el < th.mesh.n_triangles(); ++el) {
    const ElemGeom g = elem_geom(th.mesh, el);
    for (int i = 0; i < nv; ++i) {
      const int n = th.velocity.element_nodes(el, i);
      ux[i] = sol[th.u_dof(n, 0)];
      uy[i] = sol[th.u_dof(n, 1)];
    }
    for (int i = 0; i < np; ++i) pc[i] = sol[th.p_dof(th.pressure.element_nodes(el, i))];

    for (int q = 0; q < nq; ++q) {
      gphys.noalias() = vb.grads[q] * g.invJ;
      const Eigen::Vector2d X =
          g.p0 + g.J * Eigen::Vector2d(quad.points(q, 0), quad.points(q, 1));
      Eigen::Vector2d uh(ux.dot(vb.vals[q]), uy.dot(vb.vals[q]));
      Eigen::Matrix2d G;
      G(0, 0) = ux.dot(gphys.col(0));
      G(0, 1) = ux.dot(gphys.col(1));
      G(1, 0) = uy.dot(gphys.col(0));
      G(1, 1) = uy.dot(gphys.col(1));
      const Eigen::Vector2d du = uh - mc.velocity(X.x(), X.y());
      const Eigen::Matrix2d dG = G - mc.velocity_gradient(X.x(), X.y());
      const double dp = pc.dot(pb.vals[q]) - mc.pressure(X.x(), X.y());

      const double w = quad.weights[q] * g.detJ;
      su += w * (std::pow(du.norm(), r) + std::pow(dG.norm(), r));
      sp += w * std::pow(std::abs(dp), rp);
    }
  }
  return {std::pow(su, 1.0 / r), std::pow(sp, 1.0 / rp)};
}

ErrorReport fe_solution_norms(const TaylorHood& th, const Eigen::VectorXd& sol, double r) {
  return compute_errors(th, sol, zero_case(), r);
}

double divergence_residual_max(const TaylorHood& th, const Eigen::VectorXd& sol) {
  const int nv = th.velocity.n_local_nodes();
  const int np = th.pressure.n_local_nodes();
  const TriQuadrature& quad = th.assembly_quad;
  const int nq = static_cast<int>(quad.points.rows());
  const BasisTab vb = tabulate(LagrangeBasis::get(th.velocity.degree), quad);
  const BasisTab pb = tabulate(LagrangeBasis::get(th.pressure.degree), quad);

  Eigen::VectorXd b = Eigen::VectorXd::Zero(th.pressure.n_nodes());
  Eigen::VectorXd ux(nv), uy(nv);
  Eigen::Matrix<double, Eigen::Dynamic, 2> gphys(nv, 2);

  for (int el = 0; el < th.mesh.n_triangles(); ++el) {
    const ElemGeom g = elem_geom(th.mesh, el);
    for (int i = 0; i < nv; ++i) {
      const int n = th.velocity.element_nodes(el, i);
      ux[i] = sol[th.u_dof(n, 0)];
      uy[i] = sol[th.u_dof(n, 1)];
    }
    for (int q = 0; q < nq; ++q) {
      gphys.noalias() = vb.grads[q] * g.invJ;
      const double divu = ux.dot(gphys.col(0)) + uy.dot(gphys.col(1));
      const double w = quad.weights[q] * g.detJ;
      for (int i = 0; i < np; ++i)
        b[th.pressure.element_nodes(el, i)] += w * pb.vals[q][i] * divu;
    }
  }
  return b.cwiseAbs().maxCoeff();
}

double pressure_integral(const TaylorHood& th, const Eigen::VectorXd& sol) {
  const int np = th.pressure.n_local_nodes();
  const TriQuadrature& quad = th.assembly_quad;
  const int nq = static_cast<int>(quad.points.rows());
  const BasisTab pb = tabulate(LagrangeBasis::get(th.pressure.degree), quad);
  double total = 0.0;
  Eigen::VectorXd pc(np);
  for (int el = 0; el < th.mesh.n_triangles(); ++el) {
    const ElemGeom g = elem_geom(th.mesh, el);
    for (int i = 0; i < np; ++i) pc[i] = sol[th.p_dof(th.pressure.element_nodes(el, i))];
    for (int q = 0; q < nq; ++q) total += quad.weights[q] * g.detJ * pc.dot(pb.vals[q]);
  }
  return total;
}

namespace {

template <typename Fn>
void for_each_strain(const TaylorHood& th, const Eigen::VectorXd& sol, const TriQuadrature& quad,
                     Fn&& fn) {
  const int nv = th.velocity.n_local_nodes();
  const int nq = static_cast<int>(quad.points.rows());
  const BasisTab vb = tabulate(LagrangeBasis::get(th.velocity.degree), quad);
  Eigen::VectorXd ux(nv), uy(nv);
  Eigen::Matrix<double, Eigen::Dynamic, 2> gphys(nv, 2);
  for (int el = 0; el < th.mesh.n_triangles(); ++el) {
    const ElemGeom g = elem_geom(th.mesh, el);
    for (int i = 0; i < nv; ++i) {
      const int n = th.velocity.element_nodes(el, i);
      ux[i] = sol[th.u_dof(n, 0)];
      uy[i] = sol[th.u_dof(n, 1)];
    }
    for (int q = 0; q < nq; ++q) {
      gphys.noalias() = vb.grads[q] * g.invJ;
      Eigen::Matrix2d G;
      G(0, 0) = ux.dot(gphys.col(0));
      G(0, 1) = ux.dot(gphys.col(1));
      G(1, 0) = uy.dot(gphys.col(0));
      G(1, 1) = uy.dot(gphys.col(1));
      const SymTensor2 eps = symmetric_part(G);
      fn(std::sqrt(eps.frobenius_norm_sq()), quad.weights[q] * g.detJ);
    }
  }
}

}  // namespace

double max_shear_rate(const TaylorHood& th, const Eigen::VectorXd& sol) {
  double t_max = 0.0;
  for_each_strain(th, sol, th.assembly_quad, [&](double t, double) { t_max = std::max(t_max, t); });
  return t_max;
}

double strain_lp_norm(const TaylorHood& th, const Eigen::VectorXd& sol, double p) {
  double s = 0.0;
  for_each_strain(th, sol, th.error_quad, [&](double t, double w) { s += w * std::pow(t, p); });
  return std::pow(s, 1.0 / p);
}

double viscosity_gap_at_strains(const TaylorHood& th, const Eigen::VectorXd& sol,
                                const ViscosityModel& k1, const ViscosityModel& k2) {
  double gap = 0.0;
  for_each_strain(th, sol, th.assembly_quad, [&](double t, double) {
    gap = std::max(gap, std::abs(viscosity_eval(k1, t) - viscosity_eval(k2, t)));
  });
  return gap;
}

FePointValue evaluate_solution(const TaylorHood& th, const Eigen::VectorXd& sol, double x,
                               double y) {
  const int m = th.mesh.cells_per_side;
  const double fx = (x + 0.5) * m, fy = (y + 0.5) * m;
  const int ci = std::clamp(static_cast<int>(std::floor(fx)), 0, m - 1);
  const int cj = std::clamp(static_cast<int>(std::floor(fy)), 0, m - 1);
  const double lx = fx - ci, ly = fy - cj;
  const int el = 2 * (cj * m + ci) + (ly <= lx ? 0 : 1);

  const ElemGeom g = elem_geom(th.mesh, el);
  const Eigen::Vector2d xi = g.invJ * (Eigen::Vector2d(x, y) - g.p0);

  Eigen::VectorXd vvals, pvals;
  Eigen::Matrix<double, Eigen::Dynamic, 2> vgrads, pgrads;
  LagrangeBasis::get(th.velocity.degree).eval(xi.x(), xi.y(), vvals, vgrads);
  LagrangeBasis::get(th.pressure.degree).eval(xi.x(), xi.y(), pvals, pgrads);
  const Eigen::Matrix<double, Eigen::Dynamic, 2> gphys = vgrads * g.invJ;

  FePointValue out;
  out.u.setZero();
  out.grad_u.setZero();
  for (int i = 0; i < th.velocity.n_local_nodes(); ++i) {
    const int n = th.velocity.element_nodes(el, i);
    const double cx = sol[th.u_dof(n, 0)], cy = sol[th.u_dof(n, 1)];
    out.u.x() += cx * vvals[i];
    out.u.y() += cy * vvals[i];
    out.grad_u(0, 0) += cx * gphys(i, 0);
    out.grad_u(0, 1) += cx * gphys(i, 1);
    out.grad_u(1, 0) += cy * gphys(i, 0);
    out.grad_u(1, 1) += cy * gphys(i, 1);
  }
  for (int i = 0; i < th.pressure.n_local_nodes(); ++i)
    out.p += sol[th.p_dof(th.pressure.element_nodes(el, i))] * pvals[i];
  return out;
}

ErrorReport errors_vs_reference(const TaylorHood& coarse, const Eigen::VectorXd& sol_coarse,
                                const TaylorHood& fine, const Eigen::VectorXd& sol_fine,
                                double r) {
  if (fine.mesh.cells_per_side % coarse.mesh.cells_per_side != 0)
    throw std::invalid_argument("errors_vs_reference: reference mesh must refine the study mesh");
  const int nv = fine.velocity.n_local_nodes();
  const int np = fine.pressure.n_local_nodes();
  const TriQuadrature& quad = fine.error_quad;
  const int nq = static_cast<int>(quad.points.rows());
  const BasisTab vb = tabulate(LagrangeBasis::get(fine.velocity.degree), quad);
  const BasisTab pb = tabulate(LagrangeBasis::get(fine.pressure.degree), quad);
  const double rp = r / (r - 1.0);

  double su = 0.0, sp = 0.0;
  Eigen::VectorXd ux(nv), uy(nv), pc(np);
  Eigen::Matrix<double, Eigen::Dynamic, 2> gphys(nv, 2);

  for (int el = 0; el < fine.mesh.n_triangles(); ++el) {
    const ElemGeom g = elem_geom(fine.mesh, el);
    for (int i = 0; i < nv; ++i) {
      const int n = fine.velocity.element_nodes(el, i);
      ux[i] = sol_fine[fine.u_dof(n, 0)];
      uy[i] = sol_fine[fine.u_dof(n, 1)];
    }
    for (int i = 0; i < np; ++i)
      pc[i] = sol_fine[fine.p_dof(fine.pressure.element_nodes(el, i))];

    for (int q = 0; q < nq; ++q) {
      gphys.noalias() = vb.grads[q] * g.invJ;
      const Eigen::Vector2d X =
          g.p0 + g.J * Eigen::Vector2d(quad.points(q, 0), quad.points(q, 1));
      const FePointValue cv = evaluate_solution(coarse, sol_coarse, X.x(), X.y());

      Eigen::Vector2d uh(ux.dot(vb.vals[q]), uy.dot(vb.vals[q]));
      Eigen::Matrix2d G;
      G(0, 0) = ux.dot(gphys.col(0));
      G(0, 1) = ux.dot(gphys.col(1));
      G(1, 0) = uy.dot(gphys.col(0));
      G(1, 1) = uy.dot(gphys.col(1));
      const double dp = pc.dot(pb.vals[q]) - cv.p;

      const double w = quad.weights[q] * g.detJ;
      su += w * (std::pow((uh - cv.u).norm(), r) + std::pow((G - cv.grad_u).norm(), r));
      sp += w * std::pow(std::abs(dp), rp);
    }
  }
  return {std::pow(su, 1.0 / r), std::pow(sp, 1.0 / rp)};
}

void finalize_rates(RateTable& table) {
  auto& rows = table.rows;
  for (size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].failed || rows[i - 1].failed) continue;
    const double lh = std::log(rows[i - 1].h / rows[i].h);
    if (rows[i].err_u > 0.0 && rows[i - 1].err_u > 0.0)
      rows[i].rate_u = std::log(rows[i - 1].err_u / rows[i].err_u) / lh;
    if (rows[i].err_p > 0.0 && rows[i - 1].err_p > 0.0)
      rows[i].rate_p = std::log(rows[i - 1].err_p / rows[i].err_p) / lh;
  }

  auto slope = [&](auto err_of) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& row : rows) {
      const double e = err_of(row);
      if (row.failed || e <= 0.0) continue;
      const double x = std::log(row.h), y = std::log(e);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++n;
    }
    if (n < 2) return 0.0;
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  table.slope_u = slope([](const RateRow& row) { return row.err_u; });
  table.slope_p = slope([](const RateRow& row) { return row.err_p; });
}

RateTable convergence_study(const ViscosityModel& model, const ViscosityModel& load_model,
                            const ManufacturedCase& mc, int degree, const std::vector<int>& meshes,
                            double r, const NewtonConfig& config) {
  RateTable table;
  for (int m : meshes) {
    const TaylorHood th = build_taylor_hood(m, degree);
    RateRow row;
    row.degree = degree;
    row.m = m;
    row.h = th.mesh.h;
    Eigen::VectorXd sol = Eigen::VectorXd::Zero(th.n_dofs());
    try {
      newton_solve(th, model, load_model, mc, config, sol);
      const ErrorReport err = compute_errors(th, sol, mc, r);
      row.err_u = err.err_u;
      row.err_p = err.err_p;
    } catch (const NonConvergenceError&) {
      row.failed = true;
    }
    table.rows.push_back(row);
  }
  finalize_rates(table);
  return table;
}

void save_rate_table_csv(const RateTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_rate_table_csv: cannot open " + path);
  out << "j,m,h,err_u,err_p,rate_u,rate_p\n";
  out << std::setprecision(17);
  for (const auto& row : table.rows) {
    out << row.degree << ',' << row.m << ',' << row.h << ',';
    if (row.failed)
      out << "nan,nan,nan,nan\n";
    else
      out << row.err_u << ',' << row.err_p << ',' << row.rate_u << ',' << row.rate_p << '\n';
  }
}

void export_solution(const TaylorHood& th, const Eigen::VectorXd& sol, const std::string& path) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["mesh"] = {{"cells_per_side", th.mesh.cells_per_side},
               {"h", th.mesh.h},
               {"n_vertices", th.mesh.n_vertices()},
               {"n_triangles", th.mesh.n_triangles()}};
  j["degree"] = th.degree;

  auto coords = [](const std::vector<Eigen::Vector2d>& nodes) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& x : nodes) arr.push_back({x.x(), x.y()});
    return arr;
  };
  j["velocity_nodes"] = coords(th.velocity.node_coords);
  j["pressure_nodes"] = coords(th.pressure.node_coords);

  nlohmann::json vel = nlohmann::json::array();
  for (int n = 0; n < th.velocity.n_nodes(); ++n) {
    vel.push_back(sol[th.u_dof(n, 0)]);
    vel.push_back(sol[th.u_dof(n, 1)]);
  }
  j["velocity"] = std::move(vel);

  nlohmann::json pres = nlohmann::json::array();
  for (int n = 0; n < th.pressure.n_nodes(); ++n) pres.push_back(sol[th.p_dof(n)]);
  j["pressure"] = std::move(pres);
  j["multiplier"] = sol[th.mu_dof()];

  std::ofstream out(path);
  if (!out) throw std::runtime_error("export_solution: cannot open " + path);
  out << j.dump(2) << '\n';
}

}  // namespace rheoflow
