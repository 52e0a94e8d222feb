// Acceptance suite: one criterion per invocation, one PASS/FAIL line each.
// Trained models, rate tables, and plateau series are cached on disk so the
// criteria can share expensive artifacts across processes.

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rheoflow/experiments.hpp"
#include "rheoflow/stokes.hpp"
#include "rheoflow/verifier.hpp"

using namespace rheoflow;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path g_cache = "acceptance_cache";
bool g_all_ok = true;

const std::vector<double> kNValues = {1.2, 1.6, 2.0, 2.4, 2.8};
const std::vector<int> kRateMeshes = {8, 16, 32, 64};
const std::vector<int> kPlateauMeshes = {8, 16, 32, 64};
const std::vector<int> kSelfMeshes = {8, 16, 32};
const int kSelfReference = 96;
const int kEpochs = 20000;
const int kGenerations = 1000;
// Study-model training recipe: longer run with a decayed step so the n = 2.8
// fit clears its error ceiling (the loss plateaus for ~100k epochs at a
// constant rate).
const int kStudyEpochs = 120000;
const double kStudyLr = 1e-2;
const double kStudyLrDecay = 1e-2;

void detail(const std::string& line) { std::cout << "  " << line << "\n"; }

bool check(bool ok, const std::string& what) {
  if (!ok) {
    g_all_ok = false;
    detail("FAILED: " + what);
  }
  return ok;
}

std::string tag(double x) {
  std::ostringstream s;
  s << x;
  std::string t = s.str();
  for (char& c : t)
    if (c == '.') c = 'p';
  return t;
}

void write_json_file(const json& j, const fs::path& p) {
  std::ofstream out(p);
  out << j.dump(2) << '\n';
}

bool read_json_file(const fs::path& p, json& j) {
  std::ifstream in(p);
  if (!in.good()) return false;
  try {
    j = json::parse(in);
  } catch (const json::exception&) {
    return false;
  }
  return true;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(RHEOFLOW_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  return WEXITSTATUS(std::system(cmd.c_str()));
}

NewtonConfig newton_config() {
  NewtonConfig cfg;
  cfg.continuation = true;
  return cfg;
}

// Trained ICNN for the study Carreau law with index n; deterministic seeds
// keyed by the position in kNValues so every criterion sees the same model.
IcnnModel model_for(double n) {
  std::uint64_t seed = 0;
  for (size_t i = 0; i < kNValues.size(); ++i)
    if (kNValues[i] == n) seed = i;
  const fs::path file = g_cache / ("icnn_n" + tag(n) + ".json");
  if (fs::exists(file)) return load_model(file.string());

  const RheologyDataset ds = sample_carreau_dataset(study_carreau(n), 100, 70.0, seed);
  TrainConfig tc;
  tc.epochs = kStudyEpochs;
  tc.learning_rate = kStudyLr;
  tc.lr_decay_target = kStudyLrDecay;
  tc.seed = seed;
  const SelectResult sel = select_convex_concave(ds, {1, 120, 56, 1}, tc);
  save_model(sel.model, file.string());
  return sel.model;
}

RateTable cached_convergence(double r) {
  const fs::path file = g_cache / ("convergence_r" + tag(r) + ".json");
  RateTable table;
  json j;
  if (read_json_file(file, j)) {
    for (const auto& row : j.at("rows"))
      table.rows.push_back({2, row.at("m").get<int>(), row.at("h").get<double>(),
                            row.at("err_u").get<double>(), row.at("err_p").get<double>()});
    finalize_rates(table);
    return table;
  }
  const ViscosityModel law = ViscosityModel::carreau(study_carreau(r));
  table = convergence_study(law, law, default_manufactured_case(), 2, kRateMeshes, r,
                            newton_config());
  json rows = json::array();
  for (const auto& row : table.rows)
    rows.push_back({{"m", row.m}, {"h", row.h}, {"err_u", row.err_u}, {"err_p", row.err_p}});
  write_json_file({{"rows", rows}}, file);
  return table;
}

PlateauStudy cached_plateau(double n) {
  const fs::path file = g_cache / ("plateau_n" + tag(n) + ".json");
  json j;
  if (read_json_file(file, j)) {
    PlateauStudy study;
    study.target = study_carreau(n);
    study.r = n;
    for (const auto& row : j.at("rows"))
      study.rows.push_back({row.at("m").get<int>(), row.at("h").get<double>(),
                            row.at("err_u").get<double>(), row.at("err_p").get<double>()});
    study.eps_icnn_u = j.at("eps_icnn_u");
    study.eps_icnn_p = j.at("eps_icnn_p");
    study.k_gap_inf = j.at("k_gap_inf");
    study.strain_max = j.at("strain_max");
    return study;
  }
  const PlateauStudy study = plateau_study(n, model_for(n), 2, kPlateauMeshes, newton_config());
  json rows = json::array();
  for (const auto& row : study.rows)
    rows.push_back({{"m", row.m}, {"h", row.h}, {"err_u", row.err_u}, {"err_p", row.err_p}});
  write_json_file({{"rows", rows},
                   {"eps_icnn_u", study.eps_icnn_u},
                   {"eps_icnn_p", study.eps_icnn_p},
                   {"k_gap_inf", study.k_gap_inf},
                   {"strain_max", study.strain_max}},
                  file);
  return study;
}

RateTable cached_self_convergence(double n) {
  const fs::path file = g_cache / ("self_n" + tag(n) + ".json");
  RateTable table;
  json j;
  if (read_json_file(file, j)) {
    for (const auto& row : j.at("rows"))
      table.rows.push_back({2, row.at("m").get<int>(), row.at("h").get<double>(),
                            row.at("err_u").get<double>(), row.at("err_p").get<double>()});
    finalize_rates(table);
    return table;
  }
  table = icnn_reference_convergence(n, model_for(n), 2, kSelfMeshes, kSelfReference,
                                     newton_config());
  json rows = json::array();
  for (const auto& row : table.rows)
    rows.push_back({{"m", row.m}, {"h", row.h}, {"err_u", row.err_u}, {"err_p", row.err_p}});
  write_json_file({{"rows", rows}}, file);
  return table;
}

bool bitwise_equal(const IcnnModel& a, const IcnnModel& b) {
  if (a.weights.size() != b.weights.size()) return false;
  for (size_t l = 0; l < a.weights.size(); ++l) {
    if (a.weights[l].size() != b.weights[l].size()) return false;
    if (std::memcmp(a.weights[l].data(), b.weights[l].data(),
                    sizeof(double) * a.weights[l].size()) != 0)
      return false;
    if (std::memcmp(a.biases[l].data(), b.biases[l].data(),
                    sizeof(double) * a.biases[l].size()) != 0)
      return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

bool criterion_1() {
  bool ok = true;
  for (double r : kNValues) {
    const RateTable table = cached_convergence(r);
    std::ostringstream line;
    line << "r=" << r << ": slope_u=" << table.slope_u << " slope_p=" << table.slope_p;
    detail(line.str());
    ok &= check(std::abs(table.slope_u - 2.0) <= 0.10,
                "velocity rate at r=" + tag(r) + " outside 2.00 +/- 0.10");
    ok &= check(table.slope_p >= 2.0, "pressure rate at r=" + tag(r) + " below 2.0");
  }
  return ok;
}

bool criterion_2() {
  const ViscosityModel newton = ViscosityModel::carreau(study_carreau(2.0));
  const ManufacturedCase mc = default_manufactured_case();
  const TaylorHood th = build_taylor_hood(16, 2);
  Eigen::VectorXd sol = Eigen::VectorXd::Zero(th.n_dofs());
  const NewtonResult res = newton_solve(th, newton, newton, mc, NewtonConfig{}, sol);
  detail("newton iterations: " + std::to_string(res.log.back().iter));
  bool ok = check(res.converged && res.log.back().iter <= 2,
                  "Newtonian solve took more than 2 Newton iterations");

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> dist(-0.3, 0.3);
  Eigen::VectorXd s1(th.n_dofs()), s2(th.n_dofs());
  for (int i = 0; i < th.n_dofs(); ++i) {
    s1[i] = dist(rng);
    s2[i] = dist(rng);
  }
  const Eigen::SparseMatrix<double> J1 = assemble_jacobian(th, s1, newton);
  const Eigen::SparseMatrix<double> J2 = assemble_jacobian(th, s2, newton);
  const double rel = (Eigen::MatrixXd(J1) - Eigen::MatrixXd(J2)).norm() /
                     Eigen::MatrixXd(J1).norm();
  detail("jacobian state dependence (relative): " + std::to_string(rel));
  ok &= check(rel <= 1e-12, "Newtonian Jacobian depends on the state");
  return ok;
}

bool criterion_3() {
  bool ok = true;
  const std::vector<std::pair<double, double>> cases = {
      {2.0, 1e-4}, {1.2, 10.0 * 4.1e-3}, {2.8, 10.0 * 6.9e-3}};
  for (const auto& [n, ceiling] : cases) {
    const IcnnModel model = model_for(n);
    const double l2 = carreau_icnn_l2_error(study_carreau(n), model, 70.0);
    std::ostringstream line;
    line << "n=" << n << ": L2 error " << l2 << " (ceiling " << ceiling << ")";
    detail(line.str());
    ok &= check(l2 <= ceiling, "L2 error ceiling exceeded at n=" + tag(n));
  }
  return ok;
}

bool criterion_4() {
  bool ok = true;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> xs(0.0, 70.0), ls(0.0, 1.0);
  for (double n : kNValues) {
    IcnnModel model = model_for(n);
    ok &= check(check_convexity_structural(model),
                "structural convexity violated at n=" + tag(n));

    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double x = xs(rng), y = xs(rng), lam = ls(rng);
      const double lhs = icnn_forward1(model, lam * x + (1.0 - lam) * y);
      const double rhs = lam * icnn_forward1(model, x) + (1.0 - lam) * icnn_forward1(model, y);
      worst = std::min(worst, model.sign * (rhs - lhs));
    }
    detail("n=" + tag(n) + ": worst Jensen slack " + std::to_string(worst));
    ok &= check(worst >= -1e-9, "Jensen inequality violated at n=" + tag(n));

    IcnnModel projected = model;
    project_weights(projected, 30.0);
    ok &= check(bitwise_equal(model, projected),
                "projection not idempotent on the trained model at n=" + tag(n));
  }
  return ok;
}

bool criterion_5() {
  bool ok = true;
  VerifierConfig cfg;
  cfg.n_samples = 100;
  cfg.t_max = 70.0;
  cfg.de_generations = kGenerations;
  cfg.seed = 0;

  struct Case {
    double n, r_lo, r_hi, alpha_max;
  };
  for (const Case& c : {Case{1.6, 1.45, 1.75, 0.2}, Case{2.0, 1.95, 2.05, 1.0}}) {
    const ViscosityModel law = ViscosityModel::carreau(study_carreau(c.n));
    const AssumptionCertificate cert = verify(law, cfg);
    std::ostringstream line;
    line << "n=" << c.n << ": C=" << cert.C << " alpha=" << cert.alpha << " r=" << cert.r
         << " M=" << cert.M << " satisfied=" << cert.satisfied;
    detail(line.str());
    ok &= check(cert.satisfied, "certificate not satisfied at n=" + tag(c.n));
    ok &= check(cert.r >= c.r_lo && cert.r <= c.r_hi, "recovered r out of range at n=" + tag(c.n));
    ok &= check(cert.alpha <= c.alpha_max, "recovered alpha too large at n=" + tag(c.n));

    // Post-hoc robustness: a fresh, denser grid keeps the residuals within
    // ten times the feasibility tolerance.
    VerifierConfig dense = cfg;
    dense.n_samples = 400;
    dense.seed = 424242;
    const SampleGrid g = sample_grid(dense);
    const ResidualEval ev = residuals(law, g.t, g.s, cert.C, cert.alpha, cert.r, cert.M);
    const double worst = std::min({ev.worst.f1, ev.worst.f2, ev.worst.f3});
    detail("n=" + tag(c.n) + ": dense-grid worst residual " + std::to_string(worst));
    ok &= check(worst >= -10.0 * cfg.feas_tol, "dense-grid feasibility failed at n=" + tag(c.n));
  }
  return ok;
}

bool criterion_6() {
  bool ok = true;
  std::vector<double> final_err, gaps;
  for (double n : kNValues) {
    const PlateauStudy study = cached_plateau(n);
    final_err.push_back(study.rows.back().err_u);
    gaps.push_back(study.k_gap_inf);
    std::ostringstream line;
    line << "r=" << n << ": err_u per mesh";
    for (const auto& row : study.rows) line << " " << row.err_u;
    line << " | gap " << study.k_gap_inf;
    detail(line.str());
  }

  // r = 1.2 flattens: the last two refinements each improve err_u by < 30%.
  const PlateauStudy thin = cached_plateau(1.2);
  const size_t nr = thin.rows.size();
  for (size_t i = nr - 2; i < nr; ++i) {
    const double improvement = 1.0 - thin.rows[i].err_u / thin.rows[i - 1].err_u;
    detail("r=1.2 refinement to m=" + std::to_string(thin.rows[i].m) + ": improvement " +
           std::to_string(improvement));
    ok &= check(improvement < 0.30, "r=1.2 error series did not flatten");
  }

  // r = 2.0 keeps rate ~2: every refinement still cuts the error by ~4x.
  const PlateauStudy newt = cached_plateau(2.0);
  for (size_t i = 1; i < newt.rows.size(); ++i) {
    const double rate = std::log2(newt.rows[i - 1].err_u / newt.rows[i].err_u);
    detail("r=2.0 rate at m=" + std::to_string(newt.rows[i].m) + ": " + std::to_string(rate));
    ok &= check(rate >= 1.5, "r=2.0 error series flattened");
  }

  // Cross-r ranking: the final error and the viscosity gap are both minimal
  // at r = 2.
  size_t argmin_err = 0, argmin_gap = 0;
  for (size_t i = 1; i < kNValues.size(); ++i) {
    if (final_err[i] < final_err[argmin_err]) argmin_err = i;
    if (gaps[i] < gaps[argmin_gap]) argmin_gap = i;
  }
  ok &= check(kNValues[argmin_err] == 2.0, "final err_u not minimal at r=2");
  ok &= check(kNValues[argmin_gap] == 2.0, "viscosity gap not minimal at r=2");

  // Fitted-constant bound for r != 2 (at r = 2 the gap is negligible and the
  // error is discretization-dominated): fit one constant c across the other
  // r values and require every residual factor to stay within 10.
  double log_sum = 0.0;
  int n_fit = 0;
  for (size_t i = 0; i < kNValues.size(); ++i) {
    if (kNValues[i] == 2.0) continue;
    log_sum += std::log(final_err[i] / gaps[i]);
    ++n_fit;
  }
  const double c_fit = std::exp(log_sum / n_fit);
  double factor = 1.0;
  for (size_t i = 0; i < kNValues.size(); ++i) {
    if (kNValues[i] == 2.0) continue;
    const double ratio = final_err[i] / (c_fit * gaps[i]);
    factor = std::max({factor, ratio, 1.0 / ratio});
  }
  detail("fitted err/gap constant " + std::to_string(c_fit) + ", max residual factor " +
         std::to_string(factor));
  ok &= check(factor <= 10.0, "err <= c * gap residual factor exceeds 10");
  return ok;
}

bool criterion_7() {
  bool ok = true;
  for (double n : kNValues) {
    const RateTable table = cached_self_convergence(n);
    std::ostringstream line;
    line << "r=" << n << ": self-convergence slope_u=" << table.slope_u;
    detail(line.str());
    ok &= check(table.slope_u >= 1.8 && table.slope_u <= 2.2,
                "self-convergence rate out of [1.8, 2.2] at r=" + tag(n));
  }
  return ok;
}

bool criterion_8() {
  const PerturbationCheck check_run = perturbation_check(
      study_carreau(1.6), {0.2, 0.1, 0.05, 0.025}, 2, 16, newton_config());
  bool ok = true;
  double ratio_min = 1e300, ratio_max = 0.0;
  double prev_lhs = 1e300;
  for (const auto& run : check_run.runs) {
    std::ostringstream line;
    line << "delta=" << run.delta << ": lhs_u=" << run.lhs_u << " rhs=" << run.rhs
         << " ratio=" << run.ratio_u;
    detail(line.str());
    ratio_min = std::min(ratio_min, run.ratio_u);
    ratio_max = std::max(ratio_max, run.ratio_u);
    ok &= check(run.lhs_u < prev_lhs, "lhs_u not monotone decreasing in delta");
    prev_lhs = run.lhs_u;
  }
  ok &= check(ratio_max / ratio_min <= 5.0, "perturbation ratio varies by more than 5x");
  return ok;
}

bool criterion_9() {
  bool ok = true;

  // Analytic derivative of the Carreau law against central differences.
  const CarreauParams p{2.0, 0.0, 2.0, 1.6};
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ts(0.01, 70.0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double t = ts(rng);
    const double h = 1e-6 * std::max(1.0, t);
    const double fd = (carreau_eval(t + h, p) - carreau_eval(t - h, p)) / (2.0 * h);
    worst = std::max(worst, std::abs(carreau_deriv(t, p) - fd) / std::max(1.0, std::abs(fd)));
  }
  detail("carreau_deriv FD max relative error: " + std::to_string(worst));
  ok &= check(worst < 1e-6, "carreau_deriv finite-difference check");

  // Stress derivative coefficients against directional differences.
  const ViscosityModel law = ViscosityModel::carreau(p);
  std::uniform_real_distribution<double> es(-2.0, 2.0);
  worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    SymTensor2 e{es(rng), es(rng), es(rng)};
    if (e.frobenius_norm_sq() < 1e-4) e.xx += 1.0;
    const SymTensor2 d{es(rng), es(rng), es(rng)};
    const StressEval se = stress_eval(law, e);
    const double ed = e.dot(d);
    const double h = 1e-6;
    const SymTensor2 ep{e.xx + h * d.xx, e.yy + h * d.yy, e.xy + h * d.xy};
    const SymTensor2 em{e.xx - h * d.xx, e.yy - h * d.yy, e.xy - h * d.xy};
    const SymTensor2 tp = stress_eval(law, ep).tau;
    const SymTensor2 tm = stress_eval(law, em).tau;
    const SymTensor2 diff{se.a * d.xx + se.b * ed * e.xx - (tp.xx - tm.xx) / (2 * h),
                          se.a * d.yy + se.b * ed * e.yy - (tp.yy - tm.yy) / (2 * h),
                          se.a * d.xy + se.b * ed * e.xy - (tp.xy - tm.xy) / (2 * h)};
    worst = std::max(worst, std::sqrt(diff.frobenius_norm_sq()));
  }
  detail("stress_eval FD max error: " + std::to_string(worst));
  ok &= check(worst < 1e-5, "stress_eval finite-difference check");

  // Jacobian against directional residual differences.
  const ManufacturedCase mc = default_manufactured_case();
  const TaylorHood th = build_taylor_hood(8, 2);
  std::uniform_real_distribution<double> cs(-0.2, 0.2);
  worst = 0.0;
  for (int trial = 0; trial < 2; ++trial) {
    Eigen::VectorXd sol(th.n_dofs()), dir(th.n_dofs());
    for (int i = 0; i < th.n_dofs(); ++i) {
      sol[i] = cs(rng);
      dir[i] = cs(rng);
    }
    apply_dirichlet(th, mc, sol);
    const Eigen::SparseMatrix<double> J = assemble_jacobian(th, sol, law);
    const double h = 1e-6;
    const Eigen::VectorXd fd = (assemble_residual(th, sol + h * dir, law, law, mc) -
                                assemble_residual(th, sol - h * dir, law, law, mc)) /
                               (2.0 * h);
    const Eigen::VectorXd jd = J * dir;
    worst = std::max(worst, (jd - fd).norm() / std::max(1.0, jd.norm()));
  }
  detail("jacobian FD max relative error: " + std::to_string(worst));
  ok &= check(worst < 1e-5, "assemble_jacobian finite-difference check");

  // Manufactured fields: divergence-free velocity and mean-zero pressure.
  std::uniform_real_distribution<double> xs(-0.5, 0.5);
  worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Eigen::Matrix2d g = mc.velocity_gradient(xs(rng), xs(rng));
    worst = std::max(worst, std::abs(g(0, 0) + g(1, 1)));
  }
  ok &= check(worst < 1e-12, "manufactured velocity not divergence-free");
  Eigen::VectorXd pts, wts;
  gauss_legendre_01(12, pts, wts);
  double mean = 0.0;
  for (int i = 0; i < pts.size(); ++i)
    for (int j = 0; j < pts.size(); ++j)
      mean += wts[i] * wts[j] * mc.pressure(pts[i] - 0.5, pts[j] - 0.5);
  ok &= check(std::abs(mean) < 1e-12, "manufactured pressure not mean-zero");

  // Mesh identities.
  for (int m : {1, 8}) {
    const Mesh mesh = build_mesh(m);
    double area = 0.0;
    for (int e = 0; e < mesh.n_triangles(); ++e) area += mesh.triangle_area(e);
    ok &= check(mesh.n_triangles() == 2 * m * m, "triangle count at m=" + std::to_string(m));
    ok &= check(mesh.n_vertices() == (m + 1) * (m + 1), "vertex count at m=" + std::to_string(m));
    ok &= check(std::abs(area - 1.0) < 1e-13, "mesh area at m=" + std::to_string(m));
  }
  return ok;
}

bool criterion_10() {
  bool ok = true;
  for (const std::string& name :
       {"NaCL_00+XG", "NaCL_01+XG", "NaCL_05+XG", "NaCL_07+XG"}) {
    std::string base = name;
    for (char& c : base)
      if (c == '+') c = '_';
    const fs::path csv = g_cache / (base + ".csv");
    const fs::path model = g_cache / (base + "_model.json");
    const fs::path cert = g_cache / (base + "_cert.json");

    const RheologyDataset ds = synthetic_xanthan_dataset(name, 0);
    save_dataset_csv(ds, csv.string());

    if (!fs::exists(model) || !fs::exists(model.string() + ".metrics.json")) {
      const int rc = run_cli("fit " + csv.string() + " --epochs " + std::to_string(kEpochs) +
                             " --seed 0 --out " + model.string());
      ok &= check(rc == 0, "cmd_fit failed for " + name);
      if (rc != 0) continue;
    }
    json metrics;
    ok &= check(read_json_file(model.string() + ".metrics.json", metrics),
                "missing fit metrics for " + name);
    const double r2 = metrics.value("r_squared", 0.0);
    detail(name + ": R^2 = " + std::to_string(r2));
    ok &= check(r2 >= 0.99, "R^2 below 0.99 for " + name);

    std::ostringstream vcmd;
    vcmd << "verify " << model.string() << " --t-max " << ds.max_shear_rate()
         << " --generations " << kGenerations << " --seed 0 --out " << cert.string();
    const int rc = run_cli(vcmd.str());
    json cj;
    const bool satisfied = rc == 0 && read_json_file(cert, cj) && cj.value("satisfied", false);
    detail(name + ": verify exit " + std::to_string(rc));
    ok &= check(satisfied, "certificate not satisfied for " + name);
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int criterion = 0;
  std::string cache = "acceptance_cache";
  app.add_option("--criterion", criterion, "criterion number, 1-10")->required();
  app.add_option("--cache", cache, "shared artifact cache directory");
  CLI11_PARSE(app, argc, argv);

  g_cache = cache;
  fs::create_directories(g_cache);

  const std::vector<std::pair<bool (*)(), std::string>> criteria = {
      {criterion_1, "Taylor-Hood convergence rates across r"},
      {criterion_2, "Newtonian exactness of the solver machinery"},
      {criterion_3, "ICNN fit quality against the Carreau family"},
      {criterion_4, "convexity property suite on trained models"},
      {criterion_5, "assumption certificate recovery"},
      {criterion_6, "error plateau study"},
      {criterion_7, "ICNN self-convergence rates"},
      {criterion_8, "viscosity perturbation bound"},
      {criterion_9, "oracle suite"},
      {criterion_10, "real-dataset fit + certify pipeline"},
  };
  if (criterion < 1 || criterion > static_cast<int>(criteria.size())) {
    std::cerr << "criterion must be in 1..10\n";
    return 2;
  }

  const auto& [fn, label] = criteria[criterion - 1];
  bool ok = false;
  try {
    ok = fn();
  } catch (const std::exception& e) {
    detail(std::string("exception: ") + e.what());
    ok = false;
  }
  ok = ok && g_all_ok;
  std::cout << "criterion " << criterion << ": " << (ok ? "PASS" : "FAIL") << " - " << label
            << "\n";
  return ok ? 0 : 1;
}
