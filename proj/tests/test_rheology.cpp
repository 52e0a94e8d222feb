#include <doctest.h>

#include <cmath>
#include <random>

#include "rheoflow/rheology.hpp"

using namespace rheoflow;

namespace {

const CarreauParams kStudy12{2.0, 0.0, 2.0, 1.2};
const CarreauParams kStudy16{2.0, 0.0, 2.0, 1.6};
const CarreauParams kNewtonian{2.0, 0.0, 2.0, 2.0};

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace

TEST_SUITE("rheology") {

TEST_CASE("carreau_eval limits and frozen value") {
  CHECK(carreau_eval(0.0, kStudy12) == doctest::Approx(2.0).epsilon(1e-15));
  // n = 2 is Newtonian: constant viscosity at any shear rate.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(0.0, 70.0);
  for (int i = 0; i < 20; ++i)
    CHECK(carreau_eval(dist(rng), kNewtonian) == doctest::Approx(2.0).epsilon(1e-15));
  // k(1) = 2 * 3^{-0.4}, frozen to full double precision.
  CHECK(carreau_eval(1.0, kStudy12) ==
        doctest::Approx(1.28878802995450850).epsilon(1e-14));
  // k_inf shifts the whole curve.
  const CarreauParams shifted{2.0, 0.5, 2.0, 1.2};
  CHECK(carreau_eval(1.0, shifted) ==
        doctest::Approx(0.5 + 1.5 * std::pow(3.0, -0.4)).epsilon(1e-14));
}

TEST_CASE("carreau_deriv limits, frozen value, finite differences") {
  CHECK(carreau_deriv(0.0, kStudy12) == 0.0);
  CHECK(carreau_deriv(1.3, kNewtonian) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(carreau_deriv(1.0, kStudy12) ==
        doctest::Approx(-0.687353615975737867).epsilon(1e-13));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(0.01, 70.0);
  for (int i = 0; i < 20; ++i) {
    const double t = dist(rng);
    const double h = 1e-6 * std::max(1.0, t);
    const double fd = (carreau_eval(t + h, kStudy16) - carreau_eval(t - h, kStudy16)) / (2.0 * h);
    CHECK(rel_err(carreau_deriv(t, kStudy16), fd) < 1e-6);
  }
}

TEST_CASE("power law evaluation and floor") {
  const PowerLawParams p{2.0, 1.5};
  CHECK(power_eval(1.0, p) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(power_eval(4.0, p) == 1.0);  // 2 * 4^{-1/2}, exact in binary
  // Below the floor the argument clamps to t_floor = 1e-10.
  CHECK(power_eval(1e-20, p) == doctest::Approx(2e5).epsilon(1e-12));
  CHECK(power_eval(0.0, p) == power_eval(1e-30, p));

  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> dist(0.01, 70.0);
  for (int i = 0; i < 20; ++i) {
    const double t = dist(rng);
    const double h = 1e-6 * t;
    const double fd = (power_eval(t + h, p) - power_eval(t - h, p)) / (2.0 * h);
    CHECK(rel_err(power_deriv(t, p), fd) < 1e-5);
  }
}

TEST_CASE("viscosity model dispatch matches the analytic laws") {
  const ViscosityModel mc = ViscosityModel::carreau(kStudy16);
  const ViscosityModel mp = ViscosityModel::power_law(PowerLawParams{2.0, 1.5});
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> dist(0.01, 70.0);
  for (int i = 0; i < 20; ++i) {
    const double t = dist(rng);
    CHECK(viscosity_eval(mc, t) == carreau_eval(t, kStudy16));
    CHECK(viscosity_eval(mp, t) == power_eval(t, PowerLawParams{2.0, 1.5}));
    const double h = 1e-6 * std::max(1.0, t);
    const double fd = (viscosity_eval(mc, t + h) - viscosity_eval(mc, t - h)) / (2.0 * h);
    CHECK(rel_err(viscosity_deriv(mc, t), fd) < 1e-5);
  }
}

TEST_CASE("sym tensor norms are Frobenius-consistent") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    const SymTensor2 e{dist(rng), dist(rng), dist(rng)};
    const double frob = e.xx * e.xx + e.yy * e.yy + 2.0 * e.xy * e.xy;
    CHECK(e.frobenius_norm_sq() == doctest::Approx(frob).epsilon(1e-15));
    CHECK(e.dot(e) == doctest::Approx(e.frobenius_norm_sq()).epsilon(1e-15));
  }
}

TEST_CASE("stress_eval: zero strain, Newtonian, and derivative coefficients") {
  const ViscosityModel model = ViscosityModel::carreau(kStudy16);
  const ViscosityModel newton = ViscosityModel::carreau(kNewtonian);

  const StressEval at_zero = stress_eval(model, SymTensor2{});
  CHECK(at_zero.tau.xx == 0.0);
  CHECK(at_zero.tau.yy == 0.0);
  CHECK(at_zero.tau.xy == 0.0);
  CHECK(at_zero.a == doctest::Approx(2.0).epsilon(1e-14));
  // Carreau limit b(0) = (k0 - k_inf)(n - 2) lambda.
  CHECK(at_zero.b == doctest::Approx(2.0 * (1.6 - 2.0) * 2.0).epsilon(1e-12));

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int i = 0; i < 20; ++i) {
    const SymTensor2 e{dist(rng), dist(rng), dist(rng)};
    const StressEval se = stress_eval(newton, e);
    CHECK(se.tau.xx == doctest::Approx(2.0 * e.xx).epsilon(1e-14));
    CHECK(se.tau.yy == doctest::Approx(2.0 * e.yy).epsilon(1e-14));
    CHECK(se.tau.xy == doctest::Approx(2.0 * e.xy).epsilon(1e-14));
  }

  // d tau[delta] = a delta + b (eps:delta) eps against central differences.
  for (int i = 0; i < 5; ++i) {
    const SymTensor2 e{dist(rng), dist(rng), dist(rng)};
    const SymTensor2 d{dist(rng), dist(rng), dist(rng)};
    const StressEval se = stress_eval(model, e);
    const double ed = e.dot(d);
    const SymTensor2 want{se.a * d.xx + se.b * ed * e.xx, se.a * d.yy + se.b * ed * e.yy,
                          se.a * d.xy + se.b * ed * e.xy};
    const double h = 1e-6;
    const SymTensor2 ep{e.xx + h * d.xx, e.yy + h * d.yy, e.xy + h * d.xy};
    const SymTensor2 em{e.xx - h * d.xx, e.yy - h * d.yy, e.xy - h * d.xy};
    const SymTensor2 tp = stress_eval(model, ep).tau;
    const SymTensor2 tm = stress_eval(model, em).tau;
    const SymTensor2 fd{(tp.xx - tm.xx) / (2 * h), (tp.yy - tm.yy) / (2 * h),
                        (tp.xy - tm.xy) / (2 * h)};
    const double scale = std::max(1.0, std::sqrt(want.frobenius_norm_sq()));
    CHECK(std::abs(want.xx - fd.xx) / scale < 1e-6);
    CHECK(std::abs(want.yy - fd.yy) / scale < 1e-6);
    CHECK(std::abs(want.xy - fd.xy) / scale < 1e-6);
  }

  // 100 random (model, strain, direction) triples, looser tolerance.
  std::vector<ViscosityModel> models = {model, newton,
                                        ViscosityModel::carreau(CarreauParams{3.0, 0.5, 1.0, 2.4}),
                                        ViscosityModel::power_law(PowerLawParams{2.0, 1.7})};
  for (int i = 0; i < 100; ++i) {
    const ViscosityModel& vm = models[i % models.size()];
    SymTensor2 e{dist(rng), dist(rng), dist(rng)};
    if (e.frobenius_norm_sq() < 1e-4) e.xx += 1.0;
    const SymTensor2 d{dist(rng), dist(rng), dist(rng)};
    const StressEval se = stress_eval(vm, e);
    const double ed = e.dot(d);
    const double h = 1e-6;
    const SymTensor2 ep{e.xx + h * d.xx, e.yy + h * d.yy, e.xy + h * d.xy};
    const SymTensor2 em{e.xx - h * d.xx, e.yy - h * d.yy, e.xy - h * d.xy};
    const SymTensor2 tp = stress_eval(vm, ep).tau;
    const SymTensor2 tm = stress_eval(vm, em).tau;
    const SymTensor2 want{se.a * d.xx + se.b * ed * e.xx, se.a * d.yy + se.b * ed * e.yy,
                          se.a * d.xy + se.b * ed * e.xy};
    const SymTensor2 diff{want.xx - (tp.xx - tm.xx) / (2 * h), want.yy - (tp.yy - tm.yy) / (2 * h),
                          want.xy - (tp.xy - tm.xy) / (2 * h)};
    const double scale = std::max(1.0, std::sqrt(want.frobenius_norm_sq()));
    CHECK(std::sqrt(diff.frobenius_norm_sq()) / scale < 1e-5);
  }
}

TEST_CASE("k(t) t is nondecreasing for shear-thinning Carreau laws") {
  for (const double n : {1.2, 1.6, 2.0, 2.4}) {
    const CarreauParams p{2.0, 0.0, 2.0, n};
    double prev = 0.0;
    for (int i = 1; i <= 10000; ++i) {
      const double t = 70.0 * i / 10000.0;
      const double v = carreau_eval(t, p) * t;
      CHECK(v >= prev - 1e-12);
      prev = v;
    }
  }
}

TEST_CASE("parameter validation rejects nonsense") {
  CHECK_THROWS_AS((CarreauParams{-1.0, 0.0, 2.0, 1.5}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((CarreauParams{2.0, 0.0, -2.0, 1.5}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((PowerLawParams{0.0, 1.5}.validate()), std::invalid_argument);
  CHECK_NOTHROW((CarreauParams{2.0, 0.0, 2.0, 1.2}.validate()));
}

}  // TEST_SUITE
