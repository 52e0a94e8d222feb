#include <doctest.h>

#include <cmath>
#include <random>

#include "rheoflow/experiments.hpp"
#include "rheoflow/verifier.hpp"

using namespace rheoflow;

namespace {

VerifierConfig quick_config(std::uint64_t seed = 0) {
  VerifierConfig cfg;
  cfg.n_samples = 50;
  cfg.t_max = 70.0;
  cfg.de_generations = 200;
  cfg.seed = seed;
  return cfg;
}

double bracket(double x, double alpha, double r) {
  return std::pow(std::pow(x, alpha) * std::pow(1.0 + x, 1.0 - alpha), r - 2.0);
}

}  // namespace

TEST_SUITE("verifier") {

TEST_CASE("sample_grid is deterministic, in range, and sized") {
  VerifierConfig cfg = quick_config(21);
  cfg.n_samples = 100;
  const SampleGrid a = sample_grid(cfg);
  const SampleGrid b = sample_grid(cfg);
  REQUIRE(a.t.size() == 100);
  REQUIRE(a.s.size() == 100);
  CHECK((a.t - b.t).norm() == 0.0);
  CHECK((a.s - b.s).norm() == 0.0);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.t[i] > 0.0);
    CHECK(a.t[i] <= cfg.t_max);
    CHECK(a.s[i] > 0.0);
    CHECK(a.s[i] <= cfg.t_max);
  }
  cfg.seed = 22;
  const SampleGrid c = sample_grid(cfg);
  CHECK((a.t - c.t).norm() > 0.0);
}

TEST_CASE("residual formulas and masks on the Newtonian law") {
  const ViscosityModel k = ViscosityModel::carreau(CarreauParams{2.0, 0.0, 2.0, 2.0});
  const SampleGrid g = sample_grid(quick_config(3));
  const ResidualEval ev = residuals(k, g.t, g.s, 2.0, 0.37, 2.0, 2.0);

  // At r = 2 every bracket is 1, so f1 and f3 vanish identically.
  for (int j = 0; j < ev.f1.size(); ++j) CHECK(std::abs(ev.f1[j]) < 1e-12);
  int active3 = 0;
  for (int i = 0; i < ev.f3.rows(); ++i)
    for (int j = 0; j < ev.f3.cols(); ++j) {
      if (g.t[j] >= g.s[i]) {
        CHECK(std::abs(ev.f3(i, j)) < 1e-12);
        ++active3;
      } else {
        CHECK(std::isnan(ev.f3(i, j)));
      }
    }
  CHECK(active3 > 0);

  // The f2 mask keeps exactly the pairs with |s/t - 1| <= 1, i.e. s <= 2t.
  for (int i = 0; i < ev.f2.rows(); ++i)
    for (int j = 0; j < ev.f2.cols(); ++j) {
      const bool active = std::abs(g.s[i] / g.t[j] - 1.0) <= 1.0;
      CHECK(std::isnan(ev.f2(i, j)) == !active);
    }

  // Spot-check one active entry of each block against the formula.
  const double t0 = g.t[0], s0 = g.s[0];
  const double C = 1.7, alpha = 0.3, r = 1.8, M = 0.9;
  const ResidualEval ev2 = residuals(k, g.t, g.s, C, alpha, r, M);
  CHECK(ev2.f1[0] ==
        doctest::Approx(C * bracket(t0, alpha, r) - 2.0).epsilon(1e-12));
  if (std::abs(s0 / t0 - 1.0) <= 1.0) {
    const double want = C * std::abs(t0 - s0) * bracket(t0 + s0, alpha, r) -
                        std::abs(2.0 * t0 - 2.0 * s0);
    CHECK(ev2.f2(0, 0) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("Newtonian exact certificate (2, 0, 2, 2) is feasible on any grid") {
  const ViscosityModel k = ViscosityModel::carreau(CarreauParams{2.0, 0.0, 2.0, 2.0});
  for (std::uint64_t seed : {1ULL, 77ULL, 4096ULL}) {
    VerifierConfig cfg = quick_config(seed);
    cfg.n_samples = 200;
    const SampleGrid g = sample_grid(cfg);
    const ResidualEval ev = residuals(k, g.t, g.s, 2.0, 0.0, 2.0, 2.0);
    CHECK(ev.worst.f1 >= -1e-12);
    CHECK(ev.worst.f2 >= -1e-12);
    CHECK(ev.worst.f3 >= -1e-12);
    CHECK(std::abs(ev.F) < 1e-9);
  }
}

TEST_CASE("monotone tightening: raising C and lowering M relaxes every residual") {
  const ViscosityModel k = ViscosityModel::carreau(CarreauParams{2.0, 0.0, 2.0, 1.6});
  const SampleGrid g = sample_grid(quick_config(5));
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> Cs(0.5, 10.0), as(0.0, 1.0), rs(1.1, 3.5),
      Ms(0.5, 10.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double C = Cs(rng), alpha = as(rng), r = rs(rng), M = Ms(rng);
    const ResidualEval base = residuals(k, g.t, g.s, C, alpha, r, M);
    const ResidualEval tight = residuals(k, g.t, g.s, 1.5 * C, alpha, r, 0.5 * M);
    CHECK(tight.worst.f1 >= base.worst.f1 - 1e-12);
    CHECK(tight.worst.f2 >= base.worst.f2 - 1e-12);
    CHECK(tight.worst.f3 >= base.worst.f3 - 1e-12);
  }
}

TEST_CASE("verify is deterministic given the seed") {
  const ViscosityModel k = ViscosityModel::carreau(CarreauParams{2.0, 0.0, 2.0, 1.6});
  VerifierConfig cfg = quick_config(9);
  cfg.n_samples = 40;
  cfg.de_generations = 120;
  const AssumptionCertificate a = verify(k, cfg);
  const AssumptionCertificate b = verify(k, cfg);
  CHECK(a.C == b.C);
  CHECK(a.alpha == b.alpha);
  CHECK(a.r == b.r);
  CHECK(a.M == b.M);
  CHECK(a.objective == b.objective);
  CHECK(a.satisfied == b.satisfied);
}

TEST_CASE("verify certifies the Newtonian law with r near 2") {
  const ViscosityModel k = ViscosityModel::carreau(CarreauParams{2.0, 0.0, 2.0, 2.0});
  VerifierConfig cfg = quick_config(0);
  cfg.de_generations = 300;
  const AssumptionCertificate cert = verify(k, cfg);
  CHECK(cert.satisfied);
  CHECK(cert.r == doctest::Approx(2.0).epsilon(0.05));
  CHECK(cert.alpha <= 0.2);
}

TEST_CASE("a model with decreasing k(t) t fails certification") {
  // n < 1 makes k(t) t eventually decreasing, so f3 cannot be nonnegative.
  ViscosityModel bad;
  bad.variant = CarreauParams{2.0, 0.0, 2.0, 0.3};
  VerifierConfig cfg = quick_config(1);
  cfg.de_generations = 150;
  const AssumptionCertificate cert = verify(bad, cfg);
  CHECK_FALSE(cert.satisfied);

  // Direct residual scan: some active f3 entry is negative for any M > 0.
  const SampleGrid g = sample_grid(cfg);
  const ResidualEval ev = residuals(bad, g.t, g.s, cert.C, cert.alpha, cert.r, 1e-9);
  CHECK(ev.worst.f3 < 0.0);
}

TEST_CASE("config validation") {
  VerifierConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.n_samples = 1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = VerifierConfig{};
  cfg.de_F = 2.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = VerifierConfig{};
  cfg.de_CR = -0.1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = VerifierConfig{};
  cfg.t_max = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

}  // TEST_SUITE
