#pragma once

#include <variant>

#include "rheoflow/icnn.hpp"

namespace rheoflow {

/// Carreau law k(t) = k_inf + (k0 - k_inf)(1 + lambda t^2)^{(n-2)/2}.
struct CarreauParams {
  double k0;
  double k_inf = 0.0;
  double lambda;
  double n;
  void validate() const;
};

/// Power law k(t) = k0 t^{n-2}; singular at t = 0 for n < 2.
struct PowerLawParams {
  double k0;
  double n;
  void validate() const;
};

double carreau_eval(double t, const CarreauParams& p);
double carreau_deriv(double t, const CarreauParams& p);
double power_eval(double t, const PowerLawParams& p, double t_floor = 1e-10);
double power_deriv(double t, const PowerLawParams& p, double t_floor = 1e-10);

/// A positive scalar viscosity k(t) of shear rate, analytic or ICNN-backed.
struct ViscosityModel {
  std::variant<CarreauParams, PowerLawParams, IcnnModel> variant;
  double t_floor = 1e-10;

  static ViscosityModel carreau(const CarreauParams& p);
  static ViscosityModel power_law(const PowerLawParams& p);
  static ViscosityModel icnn(IcnnModel m);
};

double viscosity_eval(const ViscosityModel& model, double t);
double viscosity_deriv(const ViscosityModel& model, double t);

/// 2x2 symmetric tensor, stored as (xx, yy, xy).
struct SymTensor2 {
  double xx = 0.0, yy = 0.0, xy = 0.0;

  double frobenius_norm_sq() const { return xx * xx + yy * yy + 2.0 * xy * xy; }
  double dot(const SymTensor2& o) const { return xx * o.xx + yy * o.yy + 2.0 * xy * o.xy; }
};

/// Viscous stress tau = k(|eps|) eps and the coefficients (a, b) of its
/// directional derivative d tau[delta] = a delta + b (eps:delta) eps,
/// with a = k(t) and b = k'(t)/t safeguarded at t -> 0.
struct StressEval {
  SymTensor2 tau;
  double a = 0.0;
  double b = 0.0;
};

StressEval stress_eval(const ViscosityModel& model, const SymTensor2& eps);

}  // namespace rheoflow
