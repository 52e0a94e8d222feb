#include "rheoflow/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <stdexcept>

namespace rheoflow {

CarreauParams study_carreau(double n) { return CarreauParams{2.0, 0.0, 2.0, n}; }

RheologyDataset sample_carreau_dataset(const CarreauParams& p, int n_samples, double t_max,
                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  RheologyDataset ds;
  ds.name = "carreau_n" + std::to_string(p.n);
  ds.samples.reserve(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    const double t = (1.0 - unif(rng)) * t_max;  // (0, t_max]
    ds.samples.emplace_back(t, carreau_eval(t, p));
  }
  return ds;
}

double carreau_icnn_l2_error(const CarreauParams& p, const IcnnModel& model, double t_max,
                             int grid_intervals) {
  const double h = t_max / grid_intervals;
  double sum = 0.0;
  for (int i = 0; i <= grid_intervals; ++i) {
    const double t = i * h;
    const double d = carreau_eval(t, p) - icnn_forward1(model, t);
    const double w = (i == 0 || i == grid_intervals) ? 0.5 : 1.0;
    sum += w * d * d;
  }
  return std::sqrt(sum * h / t_max);
}

double icnn_gap_inf(const ViscosityModel& law, const IcnnModel& model, double t_max,
                    int grid_points) {
  double gap = 0.0;
  for (int i = 0; i < grid_points; ++i) {
    const double t = t_max * i / (grid_points - 1);
    gap = std::max(gap, std::abs(viscosity_eval(law, t) - icnn_forward1(model, t)));
  }
  return gap;
}

std::vector<FitFamilyEntry> fit_carreau_family(const std::vector<double>& n_values,
                                               std::uint64_t seed, int epochs) {
  const std::vector<int> arch = {1, 120, 56, 1};
  std::vector<FitFamilyEntry> out;
  out.reserve(n_values.size());
  for (size_t i = 0; i < n_values.size(); ++i) {
    const CarreauParams p = study_carreau(n_values[i]);
    const RheologyDataset ds = sample_carreau_dataset(p, 100, 70.0, seed + i);
    TrainConfig tc;
    tc.epochs = epochs;
    tc.seed = seed + i;
    const SelectResult sel = select_convex_concave(ds, arch, tc);
    FitFamilyEntry entry;
    entry.n = n_values[i];
    entry.model = sel.model;
    entry.loss_plus = sel.loss_plus;
    entry.loss_minus = sel.loss_minus;
    entry.l2_error = carreau_icnn_l2_error(p, sel.model, 70.0);
    out.push_back(std::move(entry));
  }
  return out;
}

namespace {

// Solve the ICNN-Stokes problem; if plain Newton from zero fails, warm-start
// from the analytic-law solution (obtained with continuation).
void solve_icnn_stokes(const TaylorHood& th, const ViscosityModel& icnn,
                       const ViscosityModel& carreau_law, const ManufacturedCase& mc,
                       const NewtonConfig& config, Eigen::VectorXd& sol) {
  try {
    newton_solve(th, icnn, carreau_law, mc, config, sol);
  } catch (const NonConvergenceError&) {
    sol.setZero();
    NewtonConfig warm = config;
    warm.continuation = true;
    newton_solve(th, carreau_law, carreau_law, mc, warm, sol);
    newton_solve(th, icnn, carreau_law, mc, config, sol);
  }
}

}  // namespace

PlateauStudy plateau_study(double n, const IcnnModel& model, int fe_degree,
                           const std::vector<int>& meshes, const NewtonConfig& config) {
  PlateauStudy study;
  study.target = study_carreau(n);
  study.model = model;
  study.r = n;
  const ViscosityModel law = ViscosityModel::carreau(study.target);
  const ViscosityModel icnn = ViscosityModel::icnn(model);
  const ManufacturedCase mc = default_manufactured_case();

  for (int m : meshes) {
    const TaylorHood th = build_taylor_hood(m, fe_degree);
    Eigen::VectorXd sol = Eigen::VectorXd::Zero(th.n_dofs());
    solve_icnn_stokes(th, icnn, law, mc, config, sol);
    const ErrorReport err = compute_errors(th, sol, mc, study.r);
    study.rows.push_back({m, th.mesh.h, err.err_u, err.err_p});
    study.strain_max = std::max(study.strain_max, max_shear_rate(th, sol));
  }
  if (!study.rows.empty()) {
    study.eps_icnn_u = study.rows.back().err_u;
    study.eps_icnn_p = study.rows.back().err_p;
  }
  study.k_gap_inf = icnn_gap_inf(law, model, std::max(study.strain_max, 1e-6));
  return study;
}

RateTable icnn_reference_convergence(double n, const IcnnModel& model, int fe_degree,
                                     const std::vector<int>& meshes, int reference_mesh,
                                     const NewtonConfig& config) {
  for (int m : meshes)
    if (m >= reference_mesh || reference_mesh % m != 0)
      throw std::invalid_argument(
          "icnn_reference_convergence: every study mesh must strictly divide the reference mesh");

  const ViscosityModel law = ViscosityModel::carreau(study_carreau(n));
  const ViscosityModel icnn = ViscosityModel::icnn(model);
  const ManufacturedCase mc = default_manufactured_case();

  const TaylorHood ref = build_taylor_hood(reference_mesh, fe_degree);
  Eigen::VectorXd ref_sol = Eigen::VectorXd::Zero(ref.n_dofs());
  solve_icnn_stokes(ref, icnn, law, mc, config, ref_sol);

  RateTable table;
  for (int m : meshes) {
    const TaylorHood th = build_taylor_hood(m, fe_degree);
    RateRow row;
    row.degree = fe_degree;
    row.m = m;
    row.h = th.mesh.h;
    Eigen::VectorXd sol = Eigen::VectorXd::Zero(th.n_dofs());
    try {
      solve_icnn_stokes(th, icnn, law, mc, config, sol);
      const ErrorReport err = errors_vs_reference(th, sol, ref, ref_sol, n);
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

PerturbationCheck perturbation_check(const CarreauParams& base, const std::vector<double>& deltas,
                                     int fe_degree, int mesh, const NewtonConfig& config) {
  PerturbationCheck check;
  check.base = base;
  check.r = base.n;
  const double rp = check.r / (check.r - 1.0);
  const ManufacturedCase mc = default_manufactured_case();
  const ViscosityModel k1 = ViscosityModel::carreau(base);

  const TaylorHood th = build_taylor_hood(mesh, fe_degree);
  Eigen::VectorXd sol1 = Eigen::VectorXd::Zero(th.n_dofs());
  NewtonConfig cfg = config;
  cfg.continuation = true;
  newton_solve(th, k1, k1, mc, cfg, sol1);
  const double strain_norm = strain_lp_norm(th, sol1, rp);

  for (double delta : deltas) {
    CarreauParams p2 = base;
    p2.k0 = base.k0 + delta;
    const ViscosityModel k2 = ViscosityModel::carreau(p2);
    Eigen::VectorXd sol2 = Eigen::VectorXd::Zero(th.n_dofs());
    // both problems share the load built from the base law
    newton_solve(th, k2, k1, mc, cfg, sol2);

    PerturbationRun run;
    run.delta = delta;
    const ErrorReport lhs = fe_solution_norms(th, Eigen::VectorXd(sol1 - sol2), check.r);
    run.lhs_u = lhs.err_u;
    run.lhs_p = lhs.err_p;
    run.k_gap = viscosity_gap_at_strains(th, sol1, k1, k2);
    run.strain_norm = strain_norm;
    run.rhs = run.k_gap * run.strain_norm;
    run.ratio_u = run.rhs > 0.0 ? run.lhs_u / run.rhs : 0.0;
    check.runs.push_back(run);
  }
  return check;
}

RealFitEntry fit_dataset(const RheologyDataset& ds, std::uint64_t seed, int epochs,
                         const VerifierConfig* verifier_config) {
  const std::vector<int> arch = {1, 120, 56, 1};
  TrainConfig tc;
  tc.epochs = epochs;
  tc.seed = seed;
  const SelectResult sel = select_convex_concave(ds, arch, tc);

  RealFitEntry entry;
  entry.name = ds.name;
  entry.model = sel.model;

  double ss_res = 0.0, ss_tot = 0.0, y_mean = 0.0;
  for (const auto& [x, y] : ds.samples) y_mean += y;
  y_mean /= static_cast<double>(ds.samples.size());
  for (const auto& [x, y] : ds.samples) {
    const double d = icnn_forward1(sel.model, x) - y;
    ss_res += d * d;
    ss_tot += (y - y_mean) * (y - y_mean);
  }
  entry.rmse = std::sqrt(ss_res / static_cast<double>(ds.samples.size()));
  entry.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;

  VerifierConfig vc;
  if (verifier_config) vc = *verifier_config;
  vc.t_max = ds.max_shear_rate();
  vc.seed = seed;
  entry.certificate = verify(ViscosityModel::icnn(sel.model), vc);
  return entry;
}

std::vector<RealFitEntry> fit_real_datasets(const std::vector<std::string>& csv_paths,
                                            std::uint64_t seed, int epochs,
                                            const VerifierConfig* verifier_config) {
  std::vector<RealFitEntry> out;
  out.reserve(csv_paths.size());
  for (size_t i = 0; i < csv_paths.size(); ++i)
    out.push_back(fit_dataset(load_dataset_csv(csv_paths[i]), seed + i, epochs, verifier_config));
  return out;
}

RheologyDataset synthetic_xanthan_dataset(const std::string& name, std::uint64_t seed) {
  CarreauParams p{};
  if (name == "NaCL_00+XG")
    p = {1.2, 0.003, 8.0, 1.35};
  else if (name == "NaCL_01+XG")
    p = {0.9, 0.003, 6.0, 1.45};
  else if (name == "NaCL_05+XG")
    p = {0.7, 0.002, 5.0, 1.45};
  else if (name == "NaCL_07+XG")
    p = {0.5, 0.002, 4.0, 1.6};
  else
    throw std::invalid_argument("synthetic_xanthan_dataset: unknown name " + name);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.01);
  RheologyDataset ds;
  ds.name = name;
  const double t_max = 100.0;
  for (int i = 0; i < 100; ++i) {
    const double t = (1.0 - unif(rng)) * t_max;
    ds.samples.emplace_back(t, carreau_eval(t, p) * (1.0 + noise(rng)));
  }
  return ds;
}

void save_plateau_csv(const PlateauStudy& study, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_plateau_csv: cannot open " + path);
  out << std::setprecision(17);
  out << "m,h,err_u,err_p\n";
  for (const auto& row : study.rows)
    out << row.m << ',' << row.h << ',' << row.err_u << ',' << row.err_p << '\n';
}

void save_perturbation_csv(const PerturbationCheck& check, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_perturbation_csv: cannot open " + path);
  out << std::setprecision(17);
  out << "delta,lhs_u,lhs_p,k_gap,strain_norm,rhs,ratio_u\n";
  for (const auto& run : check.runs)
    out << run.delta << ',' << run.lhs_u << ',' << run.lhs_p << ',' << run.k_gap << ','
        << run.strain_norm << ',' << run.rhs << ',' << run.ratio_u << '\n';
}

}  // namespace rheoflow
