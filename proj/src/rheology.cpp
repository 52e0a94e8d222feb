#include "rheoflow/rheology.hpp"

#include <cmath>
#include <stdexcept>

namespace rheoflow {

void CarreauParams::validate() const {
  if (!(k0 > k_inf && k_inf >= 0.0))
    throw std::invalid_argument("carreau: need k0 > k_inf >= 0");
  if (!(lambda > 0.0)) throw std::invalid_argument("carreau: need lambda > 0");
  if (!(n > 1.0)) throw std::invalid_argument("carreau: need n > 1");
}

void PowerLawParams::validate() const {
  if (!(k0 > 0.0)) throw std::invalid_argument("power law: need k0 > 0");
  if (!(n > 1.0)) throw std::invalid_argument("power law: need n > 1");
}

double carreau_eval(double t, const CarreauParams& p) {
  return p.k_inf + (p.k0 - p.k_inf) * std::pow(1.0 + p.lambda * t * t, 0.5 * (p.n - 2.0));
}

double carreau_deriv(double t, const CarreauParams& p) {
  if (t == 0.0) return 0.0;
  return (p.k0 - p.k_inf) * (p.n - 2.0) * p.lambda * t *
         std::pow(1.0 + p.lambda * t * t, 0.5 * (p.n - 4.0));
}

double power_eval(double t, const PowerLawParams& p, double t_floor) {
  const double tf = t < t_floor ? t_floor : t;
  return p.k0 * std::pow(tf, p.n - 2.0);
}

double power_deriv(double t, const PowerLawParams& p, double t_floor) {
  const double tf = t < t_floor ? t_floor : t;
  return p.k0 * (p.n - 2.0) * std::pow(tf, p.n - 3.0);
}

ViscosityModel ViscosityModel::carreau(const CarreauParams& p) {
  p.validate();
  return ViscosityModel{p};
}

ViscosityModel ViscosityModel::power_law(const PowerLawParams& p) {
  p.validate();
  return ViscosityModel{p};
}

ViscosityModel ViscosityModel::icnn(IcnnModel m) { return ViscosityModel{std::move(m)}; }

double viscosity_eval(const ViscosityModel& model, double t) {
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, CarreauParams>) return carreau_eval(t, v);
        else if constexpr (std::is_same_v<T, PowerLawParams>) return power_eval(t, v, model.t_floor);
        else return icnn_forward1(v, t);
      },
      model.variant);
}

double viscosity_deriv(const ViscosityModel& model, double t) {
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, CarreauParams>) return carreau_deriv(t, v);
        else if constexpr (std::is_same_v<T, PowerLawParams>) return power_deriv(t, v, model.t_floor);
        else return icnn_grad1(v, t);
      },
      model.variant);
}

StressEval stress_eval(const ViscosityModel& model, const SymTensor2& eps) {
  const double t = std::sqrt(eps.frobenius_norm_sq());
  StressEval out;
  out.a = viscosity_eval(model, t);
  out.tau = {out.a * eps.xx, out.a * eps.yy, out.a * eps.xy};
  if (t >= model.t_floor) {
    out.b = viscosity_deriv(model, t) / t;
  } else if (const auto* c = std::get_if<CarreauParams>(&model.variant)) {
    // analytic limit of k'(t)/t as t -> 0
    out.b = (c->k0 - c->k_inf) * (c->n - 2.0) * c->lambda;
  } else {
    out.b = viscosity_deriv(model, model.t_floor) / model.t_floor;
  }
  return out;
}

}  // namespace rheoflow
