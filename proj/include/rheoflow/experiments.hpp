#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rheoflow/icnn.hpp"
#include "rheoflow/rheology.hpp"
#include "rheoflow/stokes.hpp"
#include "rheoflow/verifier.hpp"

namespace rheoflow {

/// The Carreau family used throughout the studies: k0 = 2, k_inf = 0,
/// lambda = 2, with the power index n as the free parameter.
CarreauParams study_carreau(double n);

/// n_samples shear rates uniform in (0, t_max], viscosities from the law.
RheologyDataset sample_carreau_dataset(const CarreauParams& p, int n_samples, double t_max,
                                       std::uint64_t seed);

/// ( integral_0^t_max (k - ICNN)^2 dt / t_max )^{1/2} by a trapezoid rule.
double carreau_icnn_l2_error(const CarreauParams& p, const IcnnModel& model, double t_max,
                             int grid_intervals = 10000);

double icnn_gap_inf(const ViscosityModel& law, const IcnnModel& model, double t_max,
                    int grid_points = 10001);

struct FitFamilyEntry {
  double n = 0.0;
  IcnnModel model;
  double l2_error = 0.0;
  double loss_plus = 0.0, loss_minus = 0.0;
};

std::vector<FitFamilyEntry> fit_carreau_family(const std::vector<double>& n_values,
                                               std::uint64_t seed, int epochs = 20000);

struct PlateauRow {
  int m = 0;
  double h = 0.0;
  double err_u = 0.0, err_p = 0.0;
};

struct PlateauStudy {
  CarreauParams target;
  IcnnModel model;
  double r = 2.0;
  std::vector<PlateauRow> rows;
  double eps_icnn_u = 0.0, eps_icnn_p = 0.0;  // errors at the finest mesh
  double k_gap_inf = 0.0;  // dense-grid sup of |k - ICNN| over the observed strains
  double strain_max = 0.0;
};

PlateauStudy plateau_study(double n, const IcnnModel& model, int fe_degree,
                           const std::vector<int>& meshes, const NewtonConfig& config);

/// Self-convergence toward the solution on reference_mesh (which every study
/// mesh must divide).
RateTable icnn_reference_convergence(double n, const IcnnModel& model, int fe_degree,
                                     const std::vector<int>& meshes, int reference_mesh,
                                     const NewtonConfig& config);

struct PerturbationRun {
  double delta = 0.0;
  double lhs_u = 0.0, lhs_p = 0.0;
  double k_gap = 0.0;        // ||k1 - k2||_inf at the strains of the base solution
  double strain_norm = 0.0;  // ||eps(u_1)||_{L^{r'}}
  double rhs = 0.0;          // k_gap * strain_norm (q = inf, s = r')
  double ratio_u = 0.0;
};

struct PerturbationCheck {
  CarreauParams base;
  double r = 2.0;
  std::vector<PerturbationRun> runs;
};

PerturbationCheck perturbation_check(const CarreauParams& base, const std::vector<double>& deltas,
                                     int fe_degree, int mesh, const NewtonConfig& config);

struct RealFitEntry {
  std::string name;
  IcnnModel model;
  double rmse = 0.0;
  double r_squared = 0.0;
  AssumptionCertificate certificate;
};

std::vector<RealFitEntry> fit_real_datasets(const std::vector<std::string>& csv_paths,
                                            std::uint64_t seed, int epochs = 20000,
                                            const VerifierConfig* verifier_config = nullptr);

RealFitEntry fit_dataset(const RheologyDataset& ds, std::uint64_t seed, int epochs,
                         const VerifierConfig* verifier_config);

/// Shear-thinning rheometry stand-in: Carreau samples with 1% multiplicative
/// noise. Known names: NaCL_00+XG, NaCL_01+XG, NaCL_05+XG, NaCL_07+XG.
RheologyDataset synthetic_xanthan_dataset(const std::string& name, std::uint64_t seed);

void save_plateau_csv(const PlateauStudy& study, const std::string& path);
void save_perturbation_csv(const PerturbationCheck& check, const std::string& path);

}  // namespace rheoflow
