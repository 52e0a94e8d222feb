#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "rheoflow/dataset.hpp"
#include "rheoflow/experiments.hpp"
#include "rheoflow/icnn.hpp"
#include "rheoflow/rheology.hpp"
#include "rheoflow/stokes.hpp"
#include "rheoflow/verifier.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rheoflow;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitDiverged = 3;
constexpr int kExitNotSatisfied = 4;
constexpr int kExitNoConvergence = 5;

std::uint64_t effective_seed(std::uint64_t flag_seed) {
  if (const char* env = std::getenv("RHEOFLOW_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw std::runtime_error("RHEOFLOW_SEED is not an unsigned integer");
    }
  }
  return flag_seed;
}

CarreauParams parse_carreau_spec(const std::string& spec) {
  CarreauParams p{};
  char comma1, comma2, comma3;
  std::istringstream in(spec);
  if (!(in >> p.k0 >> comma1 >> p.k_inf >> comma2 >> p.lambda >> comma3 >> p.n) ||
      comma1 != ',' || comma2 != ',' || comma3 != ',')
    throw ModelParseError("carreau spec must be k0,kinf,lambda,n: " + spec);
  p.validate();
  return p;
}

// "carreau:k0,kinf,lambda,n" or a path to a model file.
ViscosityModel parse_viscosity(const std::string& spec) {
  if (spec.rfind("carreau:", 0) == 0)
    return ViscosityModel::carreau(parse_carreau_spec(spec.substr(8)));
  return ViscosityModel::icnn(load_model(spec));
}

void write_json(const json& j, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << j.dump(2) << '\n';
}

json newton_log_json(const NewtonResult& result) {
  json log = json::array();
  for (const auto& entry : result.log)
    log.push_back({{"iter", entry.iter},
                   {"residual_norm", entry.residual_norm},
                   {"step", entry.step},
                   {"homotopy_n", entry.homotopy_n}});
  return {{"converged", result.converged},
          {"used_continuation", result.used_continuation},
          {"log", std::move(log)}};
}

struct FitArgs {
  std::string dataset;
  std::string arch = "1,120,56,1";
  int epochs = 20000;
  double learning_rate = 1e-3;
  double lr_decay_target = 1.0;
  std::uint64_t seed = 0;
  std::string out = "model.json";
};

std::vector<int> parse_arch(const std::string& arch) {
  std::vector<int> widths;
  std::istringstream in(arch);
  std::string tok;
  while (std::getline(in, tok, ',')) widths.push_back(std::stoi(tok));
  if (widths.size() < 2 || widths.front() != 1 || widths.back() != 1)
    throw std::runtime_error("--arch must be a 1,...,1 width list");
  return widths;
}

int cmd_fit(const FitArgs& args) {
  const std::uint64_t seed = effective_seed(args.seed);
  RheologyDataset ds;
  try {
    ds = load_dataset_csv(args.dataset);
  } catch (const CsvParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  }

  TrainConfig tc;
  tc.epochs = args.epochs;
  tc.learning_rate = args.learning_rate;
  tc.lr_decay_target = args.lr_decay_target;
  tc.seed = seed;
  SelectResult sel;
  try {
    sel = select_convex_concave(ds, parse_arch(args.arch), tc);
  } catch (const TrainingDiverged& e) {
    std::cerr << "training diverged: " << e.what() << "\n";
    return kExitDiverged;
  }
  save_model(sel.model, args.out);

  double ss_res = 0.0, ss_tot = 0.0, y_mean = 0.0;
  for (const auto& [x, y] : ds.samples) y_mean += y;
  y_mean /= static_cast<double>(ds.samples.size());
  for (const auto& [x, y] : ds.samples) {
    const double d = icnn_forward1(sel.model, x) - y;
    ss_res += d * d;
    ss_tot += (y - y_mean) * (y - y_mean);
  }
  const double rmse = std::sqrt(ss_res / static_cast<double>(ds.samples.size()));
  const double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;

  write_json({{"dataset", args.dataset},
              {"n_samples", ds.samples.size()},
              {"sign", sel.model.sign},
              {"rmse", rmse},
              {"r_squared", r2},
              {"loss_convex", sel.loss_plus},
              {"loss_concave", sel.loss_minus}},
             args.out + ".metrics.json");
  write_json({{"command", "fit"},
              {"dataset", args.dataset},
              {"arch", args.arch},
              {"epochs", args.epochs},
              {"learning_rate", args.learning_rate},
              {"lr_decay_target", args.lr_decay_target},
              {"seed", seed},
              {"out", args.out}},
             args.out + ".config.json");
  std::cout << "fit: sign=" << sel.model.sign << " rmse=" << rmse << " r2=" << r2 << "\n";
  return 0;
}

struct VerifyArgs {
  std::string model;
  std::string carreau;
  std::string out = "cert.json";
  VerifierConfig config;
  double t_max = -1.0;  // <0: default (70 analytic, dataset-free)
};

int cmd_verify(VerifyArgs args) {
  args.config.seed = effective_seed(args.config.seed);
  ViscosityModel model = ViscosityModel::carreau(study_carreau(2.0));
  try {
    if (!args.carreau.empty())
      model = ViscosityModel::carreau(parse_carreau_spec(args.carreau));
    else if (!args.model.empty())
      model = ViscosityModel::icnn(load_model(args.model));
    else
      throw ModelParseError("verify needs a model file or --carreau");
  } catch (const ModelParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::invalid_argument& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  }
  if (args.t_max > 0.0) args.config.t_max = args.t_max;

  const AssumptionCertificate cert = verify(model, args.config);
  save_certificate(cert, args.config, args.out);
  write_json({{"command", "verify"},
              {"model", args.model},
              {"carreau", args.carreau},
              {"n_samples", args.config.n_samples},
              {"t_max", args.config.t_max},
              {"de_generations", args.config.de_generations},
              {"seed", args.config.seed},
              {"out", args.out}},
             args.out + ".config.json");
  std::cout << "verify: satisfied=" << (cert.satisfied ? "true" : "false") << " C=" << cert.C
            << " alpha=" << cert.alpha << " r=" << cert.r << " M=" << cert.M << "\n";
  return cert.satisfied ? 0 : kExitNotSatisfied;
}

struct SolveArgs {
  std::string viscosity;
  int mesh = 16;
  int degree = 2;
  double r = 2.0;
  std::string out = "sol";
  NewtonConfig newton;
};

int cmd_solve(const SolveArgs& args) {
  ViscosityModel model = ViscosityModel::carreau(study_carreau(2.0));
  try {
    model = parse_viscosity(args.viscosity);
  } catch (const ModelParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::invalid_argument& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  }

  const fs::path dir(args.out);
  fs::create_directories(dir);
  const ManufacturedCase mc = default_manufactured_case();
  const TaylorHood th = build_taylor_hood(args.mesh, args.degree);
  Eigen::VectorXd sol = Eigen::VectorXd::Zero(th.n_dofs());

  NewtonConfig cfg = args.newton;
  cfg.continuation = true;
  NewtonResult result;
  try {
    result = newton_solve(th, model, model, mc, cfg, sol);
  } catch (const NonConvergenceError& e) {
    write_json(newton_log_json(e.result), dir / "newton_log.json");
    std::cerr << "newton did not converge: " << e.what() << "\n";
    return kExitNoConvergence;
  }

  export_solution(th, sol, (dir / "solution.json").string());
  const ErrorReport err = compute_errors(th, sol, mc, args.r);
  write_json({{"err_u", err.err_u},
              {"err_p", err.err_p},
              {"r", args.r},
              {"iterations", result.log.empty() ? 0 : result.log.back().iter},
              {"used_continuation", result.used_continuation}},
             dir / "errors.json");
  write_json(newton_log_json(result), dir / "newton_log.json");
  write_json({{"command", "solve"},
              {"viscosity", args.viscosity},
              {"mesh", args.mesh},
              {"degree", args.degree},
              {"r", args.r},
              {"out", args.out}},
             dir / "config.json");
  std::cout << "solve: err_u=" << err.err_u << " err_p=" << err.err_p << "\n";
  return 0;
}

struct StudyArgs {
  std::string kind;
  int degree = 2;
  double r = 1.6;
  double n = 1.6;
  std::vector<int> meshes = {8, 16, 32, 64};
  std::vector<double> n_values = {1.2, 1.6, 2.0, 2.4, 2.8};
  std::vector<double> deltas = {0.2, 0.1, 0.05, 0.025};
  int mesh = 32;
  int reference_mesh = 0;
  int epochs = 20000;
  int generations = 1000;
  std::uint64_t seed = 0;
  std::string model;  // optional pretrained model for plateau
  std::string out = "study";
};

int cmd_study(StudyArgs args) {
  args.seed = effective_seed(args.seed);
  const fs::path dir(args.out);
  fs::create_directories(dir);
  NewtonConfig newton;
  newton.continuation = true;

  json config{{"command", "study"},     {"kind", args.kind},
              {"degree", args.degree},  {"r", args.r},
              {"n", args.n},            {"meshes", args.meshes},
              {"n_values", args.n_values}, {"deltas", args.deltas},
              {"mesh", args.mesh},      {"reference_mesh", args.reference_mesh},
              {"epochs", args.epochs},  {"generations", args.generations},
              {"seed", args.seed},      {"model", args.model},
              {"out", args.out}};
  write_json(config, dir / "config.json");

  if (args.kind == "convergence") {
    const ViscosityModel model = ViscosityModel::carreau(study_carreau(args.r));
    const RateTable table = convergence_study(model, model, default_manufactured_case(),
                                              args.degree, args.meshes, args.r, newton);
    save_rate_table_csv(table, (dir / "rates.csv").string());
    write_json({{"slope_u", table.slope_u}, {"slope_p", table.slope_p}}, dir / "summary.json");
    std::cout << "convergence: slope_u=" << table.slope_u << " slope_p=" << table.slope_p << "\n";
    return 0;
  }

  if (args.kind == "fit-family") {
    const auto family = fit_carreau_family(args.n_values, args.seed, args.epochs);
    std::ofstream csv(dir / "family.csv");
    csv << std::setprecision(17) << "n,sign,l2_error,loss_convex,loss_concave\n";
    json summary = json::array();
    for (const auto& entry : family) {
      csv << entry.n << ',' << entry.model.sign << ',' << entry.l2_error << ','
          << entry.loss_plus << ',' << entry.loss_minus << '\n';
      std::ostringstream name;
      name << "model_n" << entry.n << ".json";
      save_model(entry.model, (dir / name.str()).string());
      summary.push_back({{"n", entry.n},
                         {"sign", entry.model.sign},
                         {"l2_error", entry.l2_error},
                         {"model", name.str()}});
    }
    write_json(summary, dir / "summary.json");
    return 0;
  }

  if (args.kind == "plateau") {
    IcnnModel model;
    if (!args.model.empty()) {
      model = load_model(args.model);
    } else {
      const auto family = fit_carreau_family({args.n}, args.seed, args.epochs);
      model = family.front().model;
      save_model(model, (dir / "model.json").string());
    }
    const PlateauStudy study = plateau_study(args.n, model, args.degree, args.meshes, newton);
    save_plateau_csv(study, (dir / "plateau.csv").string());
    write_json({{"n", study.target.n},
                {"r", study.r},
                {"eps_icnn_u", study.eps_icnn_u},
                {"eps_icnn_p", study.eps_icnn_p},
                {"k_gap_inf", study.k_gap_inf},
                {"strain_max", study.strain_max}},
               dir / "summary.json");
    std::cout << "plateau: eps_icnn_u=" << study.eps_icnn_u << " k_gap_inf=" << study.k_gap_inf
              << "\n";
    return 0;
  }

  if (args.kind == "perturb") {
    const PerturbationCheck check =
        perturbation_check(study_carreau(args.n), args.deltas, args.degree, args.mesh, newton);
    save_perturbation_csv(check, (dir / "perturb.csv").string());
    double ratio_min = 0.0, ratio_max = 0.0;
    for (const auto& run : check.runs) {
      if (run.ratio_u <= 0.0) continue;
      if (ratio_min == 0.0 || run.ratio_u < ratio_min) ratio_min = run.ratio_u;
      ratio_max = std::max(ratio_max, run.ratio_u);
    }
    write_json({{"n", args.n}, {"ratio_min", ratio_min}, {"ratio_max", ratio_max}},
               dir / "summary.json");
    std::cout << "perturb: ratio range [" << ratio_min << ", " << ratio_max << "]\n";
    return 0;
  }

  std::cerr << "unknown study kind: " << args.kind << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"structure-preserving viscosity models and non-Newtonian Stokes experiments"};
  app.require_subcommand(1);

  FitArgs fit_args;
  CLI::App* fit = app.add_subcommand("fit", "train a convex/concave viscosity model from CSV");
  fit->add_option("dataset", fit_args.dataset, "rheology CSV (shear_rate,viscosity)")->required();
  fit->add_option("--arch", fit_args.arch, "layer widths, comma separated");
  fit->add_option("--epochs", fit_args.epochs);
  fit->add_option("--lr", fit_args.learning_rate, "Adam learning rate");
  fit->add_option("--lr-decay-target", fit_args.lr_decay_target,
                  "final/initial learning-rate ratio (1 = constant)");
  fit->add_option("--seed", fit_args.seed);
  fit->add_option("--out", fit_args.out, "output model file");

  VerifyArgs verify_args;
  CLI::App* verify = app.add_subcommand("verify", "certify a model against Assumptions (A)");
  verify->add_option("model", verify_args.model, "model file");
  verify->add_option("--carreau", verify_args.carreau, "analytic law k0,kinf,lambda,n");
  verify->add_option("--out", verify_args.out);
  verify->add_option("--samples", verify_args.config.n_samples);
  verify->add_option("--t-max", verify_args.t_max);
  verify->add_option("--generations", verify_args.config.de_generations);
  verify->add_option("--seed", verify_args.config.seed);

  SolveArgs solve_args;
  CLI::App* solve = app.add_subcommand("solve", "solve the manufactured Stokes problem");
  solve->add_option("--viscosity", solve_args.viscosity, "model file or carreau:k0,kinf,lambda,n")
      ->required();
  solve->add_option("--mesh", solve_args.mesh);
  solve->add_option("--degree", solve_args.degree);
  solve->add_option("--r", solve_args.r);
  solve->add_option("--out", solve_args.out);
  solve->add_option("--abs-tol", solve_args.newton.abs_tol);
  solve->add_option("--max-iter", solve_args.newton.max_iter);

  StudyArgs study_args;
  CLI::App* study = app.add_subcommand("study", "run a reproduction study");
  study->add_option("kind", study_args.kind, "convergence|plateau|perturb|fit-family")
      ->required();
  study->add_option("--degree", study_args.degree);
  study->add_option("--r", study_args.r);
  study->add_option("--n", study_args.n);
  study->add_option("--meshes", study_args.meshes)->delimiter(',');
  study->add_option("--n-values", study_args.n_values)->delimiter(',');
  study->add_option("--deltas", study_args.deltas)->delimiter(',');
  study->add_option("--mesh", study_args.mesh);
  study->add_option("--reference-mesh", study_args.reference_mesh);
  study->add_option("--epochs", study_args.epochs);
  study->add_option("--generations", study_args.generations);
  study->add_option("--seed", study_args.seed);
  study->add_option("--model", study_args.model, "pretrained model for plateau");
  study->add_option("--out", study_args.out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit->parsed()) return cmd_fit(fit_args);
    if (verify->parsed()) return cmd_verify(verify_args);
    if (solve->parsed()) return cmd_solve(solve_args);
    if (study->parsed()) return cmd_study(study_args);
  } catch (const CsvParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const ModelParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const TrainingDiverged& e) {
    std::cerr << "training diverged: " << e.what() << "\n";
    return kExitDiverged;
  } catch (const NonConvergenceError& e) {
    std::cerr << "newton did not converge: " << e.what() << "\n";
    return kExitNoConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
