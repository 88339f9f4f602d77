#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "gamow/potential_model.hpp"
#include "oracle/oracle_values.hpp"

using namespace gamow;
using cd = std::complex<double>;
using std::numbers::pi;

namespace {
double rel(cd a, cd b) { return std::abs(a - b) / std::abs(b); }
} // namespace

TEST_CASE("well parameters") {
  CHECK_THROWS_AS(Well({0.0, 1.0}).validate(), InvalidParameters);
  CHECK_THROWS_AS(Well({10.0, -1.0}).validate(), InvalidParameters);
  CHECK(Well{10.0, 1.0}.metastable());
  CHECK_FALSE(Well{9.5, 1.0}.metastable());
  CHECK_THROWS_AS(ComplexWavenumber<double>(std::nan(""), 0.0), InvalidParameters);
}

TEST_CASE("coefficient A") {
  const Well w{100.0, 1.0};
  const cd a0 = coefficient_A(cd(0.0), w);
  CHECK(std::abs(a0 - cd(0.0, -2.0 / 101.0)) < 1e-15);
  CHECK(rel(coefficient_A(cd(1.0), w), oracle::A1_lambda100) < 1e-12);
  CHECK(std::abs(coefficient_A(cd(1.0), w)) == doctest::Approx(0.02362).epsilon(1e-3));

  const cd near = oracle::k1_lambda100 + 1e-6;
  CHECK(std::abs(coefficient_A(near, w)) > 1e3);
  CHECK(rel(coefficient_A(near, w), oracle::A_near_k1_lambda100) < 1e-6);
}

TEST_CASE("coefficient B") {
  CHECK(coefficient_B(cd(0.0), Well{100.0, 1.0}) == cd(-1.0));
  const Well w{10.0, 1.0};
  const cd k(2.5);
  CHECK(rel(coefficient_B(k, w), oracle::B2p5_lambda10) < 1e-12);
  const cd identity = -std::conj(scattering_denominator(std::conj(k), w)) /
                      scattering_denominator(k, w);
  CHECK(rel(coefficient_B(k, w), identity) < 1e-14);
}

TEST_CASE("coefficient A bar") {
  const Well w10{10.0, 1.0}, w100{100.0, 1.0};
  CHECK(coefficient_A_bar(cd(1.3), w10) == std::conj(coefficient_A(cd(1.3), w10)));
  CHECK(std::abs(coefficient_A_bar(cd(0.0), w10) - cd(0.0, 2.0 / 11.0)) < 1e-15);

  const cd k = 2.0 * std::polar(1.0, -pi / 4);
  CHECK(std::isfinite(std::abs(coefficient_A_bar(k, w100))));
  for (const auto &r : enumerate_poles(w100, 16.0))
    CHECK(std::abs(std::conj(r.k.value()) - k) > 0.1);
}

TEST_CASE("quantization residual") {
  for (int n = 1; n <= 4; ++n) {
    const cd f = quantization_residual(cd(n * pi), Well{37.0, 1.0});
    CHECK(std::abs(f - cd(n * pi * (n % 2 ? -1.0 : 1.0))) < 1e-12);
  }
  CHECK(rel(quantization_residual(cd(3.0), Well{10.0, 1.0}), oracle::F3_lambda10) < 1e-13);
  CHECK(std::abs(quantization_residual(oracle::k1_lambda100, Well{100.0, 1.0})) < 1e-12);
}

TEST_CASE("asymptotic pole seeds") {
  const Well w100{100.0, 1.0}, w10{10.0, 1.0};
  for (int n = 1; n <= 3; ++n) {
    const double npi = n * pi;
    const cd exact(npi * 100.0 / 101.0, -(npi / 100.0) * (npi / 100.0));
    CHECK(std::abs(asymptotic_pole_seed(n, w100).value() - exact) < 1e-14);
  }
  // Quoted to six digits as 3.110467 and 6.220934; pi * 100/101 = 3.1104878.
  CHECK(std::abs(asymptotic_pole_seed(1, w100).value() - cd(3.110467, -0.000986960)) < 5e-5);
  CHECK(std::abs(asymptotic_pole_seed(2, w100).value() - cd(6.220934, -0.003947842)) < 5e-5);
  CHECK(std::abs(asymptotic_pole_seed(1, w10).value() - cd(2.855993, -0.098696)) < 1e-6);
  CHECK_THROWS_AS(asymptotic_pole_seed(4, w10), SeedOutOfRegime);
  CHECK_THROWS_AS(asymptotic_pole_seed(0, w10), PreconditionViolated);
}

TEST_CASE("pole refinement") {
  const Well w{100.0, 1.0};
  const Resonance r = refine_pole(asymptotic_pole_seed(1, w), w, 1);
  CHECK(std::abs(quantization_residual(r.k.value(), w)) < 1e-12);
  CHECK(rel(r.k.value(), oracle::k1_lambda100) < 1e-14);
  CHECK(std::abs(r.k.value() - cd(3.110467, -0.000986960)) < 5e-3);
  CHECK(r.energy() == r.k.value() * r.k.value());
  CHECK(r.lifetime() == doctest::Approx(1.0 / r.width()));

  // The lifetime is 84.06, not the 80.57 of tau = (lambda a)^2 / (4 pi^3).
  CHECK(r.lifetime() == doctest::Approx(84.058576676238).epsilon(1e-10));

  // Third-quadrant growing states are rejected.
  CHECK_THROWS_AS(refine_pole(ComplexWavenumber<double>(-3.1, -0.001), w), WrongQuadrant);
}

TEST_CASE("pole enumeration") {
  const Well w{100.0, 1.0};
  const auto poles = enumerate_poles(w, 16.0);
  REQUIRE(poles.size() == 5);
  CHECK(int(poles.size()) == oracle::winding_lambda100_k16);
  const cd expected[] = {oracle::k1_lambda100, oracle::k2_lambda100, oracle::k3_lambda100,
                         oracle::k4_lambda100, oracle::k5_lambda100};
  for (int n = 1; n <= 5; ++n) {
    const auto &r = poles[n - 1];
    CHECK(r.index == n);
    CHECK(rel(r.k.value(), expected[n - 1]) < 1e-12);
    CHECK(std::abs(r.k.real() / (n * pi * 100.0 / 101.0) - 1.0) < 0.01);
  }
  CHECK(enumerate_poles(w, 3.0).empty());

  const Well w10{10.0, 1.0};
  const auto p10 = enumerate_poles(w10, 10.0);
  CHECK(int(p10.size()) == quantization_winding_number(w10, 10.0, pole_depth_bound(w10, 10.0)));
  CHECK(int(p10.size()) == oracle::winding_lambda10_k10);
  CHECK(rel(p10[0].k.value(), oracle::k1_lambda10) < 1e-12);
  CHECK(rel(p10[2].k.value(), oracle::k3_lambda10) < 1e-12);

  CHECK(rel(enumerate_poles(Well{30.0, 1.0}, 4.0).at(0).k.value(), oracle::k1_lambda30) < 1e-12);
  CHECK(rel(enumerate_poles(Well{0.5, 1.0}, 3.0).at(0).k.value(), oracle::k1_lambda0p5) < 1e-12);
  CHECK_THROWS_AS(enumerate_poles(w, 0.0), PreconditionViolated);
}

TEST_CASE("property: |B| = 1 on the real axis") {
  for (double lambda : {0.5, 10.0, 100.0})
    for (int i = 1; i <= 2000; ++i) {
      const double k = 20.0 * i / 2000.0;
      CHECK(std::abs(std::abs(coefficient_B(cd(k), Well{lambda, 1.0})) - 1.0) < 1e-12);
    }
}

TEST_CASE("property: A bar is the conjugate of A on the real axis") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.01, 30.0);
  const Well w{17.0, 1.3};
  for (int i = 0; i < 500; ++i) {
    const cd k(u(rng));
    CHECK(coefficient_A_bar(k, w) == std::conj(coefficient_A(k, w)));
  }
}

TEST_CASE("property: D = e^{ika} F") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> r(0.0, 20.0), th(-pi, pi);
  const Well w{23.0, 1.0};
  for (int i = 0; i < 100; ++i) {
    const cd k = std::polar(r(rng), th(rng));
    const cd d = scattering_denominator(k, w);
    const cd ef = std::exp(cd(0, 1) * k * w.width) * quantization_residual(k, w);
    CHECK(std::abs(d - ef) <= 1e-12 * std::max(std::abs(d), 1.0));
  }
}

TEST_CASE("property: resonance invariants and reflection pairs") {
  for (double lambda : {10.0, 30.0, 100.0}) {
    const Well w{lambda, 1.0};
    const auto poles = enumerate_poles(w, 40.0);
    REQUIRE(!poles.empty());
    double last = 0.0;
    for (const auto &r : poles) {
      CHECK(r.energy().real() > 0.0);
      CHECK(r.width() > last);
      last = r.width();
      CHECK(in_rotation_sector(r.k.value()));
      CHECK(r.residual < 1e-12 * std::max(1.0, std::abs(r.k.value())));
      const cd mirror = -std::conj(r.k.value());
      CHECK(std::abs(quantization_residual(mirror, w)) < 1e-10 * std::abs(mirror));
    }
  }
}

TEST_CASE("property: argument-principle count matches at large cutoff") {
  const Well w{100.0, 1.0};
  const double k_max = 400.0;
  const auto poles = enumerate_poles(w, k_max);
  CHECK(int(poles.size()) == quantization_winding_number(w, k_max, pole_depth_bound(w, k_max)));
}
