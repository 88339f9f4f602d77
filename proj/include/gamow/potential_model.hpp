#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "gamow/errors.hpp"
#include "gamow/well.hpp"

namespace gamow {

// Scattering coefficients of the delta-shell well. With N(k) = -2ika and
//   D(k)    = ka + lambda e^{ ika} sin ka
//   Dbar(k) = ka + lambda e^{-ika} sin ka
// the interior amplitude is A = N/D, the reflection coefficient B = -Dbar/D
// and Abar = -N/Dbar is the analytic function equal to conj(A) on the real
// axis. D(k) = e^{ika} F(k) with F the entire quantization function.

template <typename Scalar>
Complex<Scalar> scattering_denominator(Complex<Scalar> k,
                                       const WellParameters<Scalar> &w) {
  const Complex<Scalar> ka = k * w.width;
  const Complex<Scalar> i(0, 1);
  return ka + w.opacity * std::exp(i * ka) * std::sin(ka);
}

template <typename Scalar>
Complex<Scalar> conjugate_denominator(Complex<Scalar> k,
                                      const WellParameters<Scalar> &w) {
  const Complex<Scalar> ka = k * w.width;
  const Complex<Scalar> i(0, 1);
  return ka + w.opacity * std::exp(-i * ka) * std::sin(ka);
}

/// dD/dk = a (1 + lambda e^{2ika}).
template <typename Scalar>
Complex<Scalar> scattering_denominator_derivative(
    Complex<Scalar> k, const WellParameters<Scalar> &w) {
  const Complex<Scalar> i(0, 1);
  return w.width * (Scalar(1) + w.opacity * std::exp(Scalar(2) * i * k * w.width));
}

namespace detail {
template <typename Scalar> void check_pole_distance(Complex<Scalar> d) {
  if (std::abs(d) < Scalar(1e-300))
    throw PoleProximity("evaluation at a pole of the scattering coefficients");
}
} // namespace detail

template <typename Scalar>
Complex<Scalar> coefficient_A(Complex<Scalar> k,
                              const WellParameters<Scalar> &w) {
  const Complex<Scalar> i(0, 1);
  if (k == Complex<Scalar>(0))
    return Scalar(-2) * i / (Scalar(1) + w.opacity);
  const Complex<Scalar> d = scattering_denominator(k, w);
  detail::check_pole_distance(d);
  return Scalar(-2) * i * k * w.width / d;
}

template <typename Scalar>
Complex<Scalar> coefficient_B(Complex<Scalar> k,
                              const WellParameters<Scalar> &w) {
  if (k == Complex<Scalar>(0))
    return Complex<Scalar>(-1);
  const Complex<Scalar> d = scattering_denominator(k, w);
  detail::check_pole_distance(d);
  return -conjugate_denominator(k, w) / d;
}

template <typename Scalar>
Complex<Scalar> coefficient_A_bar(Complex<Scalar> k,
                                  const WellParameters<Scalar> &w) {
  const Complex<Scalar> i(0, 1);
  if (k == Complex<Scalar>(0))
    return Scalar(2) * i / (Scalar(1) + w.opacity);
  const Complex<Scalar> d = conjugate_denominator(k, w);
  detail::check_pole_distance(d);
  return Scalar(2) * i * k * w.width / d;
}

/// F(k) = ka cos ka + (lambda - ika) sin ka. Entire; zeros are the poles of
/// A and B plus the trivial zero at k = 0.
template <typename Scalar>
Complex<Scalar> quantization_residual(Complex<Scalar> k,
                                      const WellParameters<Scalar> &w) {
  const Complex<Scalar> ka = k * w.width;
  const Complex<Scalar> i(0, 1);
  return ka * std::cos(ka) + (w.opacity - i * ka) * std::sin(ka);
}

template <typename Scalar>
Complex<Scalar> quantization_derivative(Complex<Scalar> k,
                                        const WellParameters<Scalar> &w) {
  const Scalar a = w.width;
  const Complex<Scalar> ka = k * a;
  const Complex<Scalar> i(0, 1);
  const Complex<Scalar> c = std::cos(ka);
  const Complex<Scalar> s = std::sin(ka);
  return a * c - ka * a * s - i * a * s + (w.opacity - i * ka) * a * c;
}

template <typename Scalar = double> struct ScatteringPair {
  Complex<Scalar> A;
  Complex<Scalar> B;
  ComplexWavenumber<Scalar> k;
};

template <typename Scalar>
ScatteringPair<Scalar> scattering(Complex<Scalar> k,
                                  const WellParameters<Scalar> &w) {
  return {coefficient_A(k, w), coefficient_B(k, w), ComplexWavenumber<Scalar>(k)};
}

/// One Gamow pole. Energy, width and lifetime are always recomputed from k.
struct Resonance {
  int index = 0;
  ComplexWavenumber<double> k;
  double residual = 0.0; ///< |F(k)| at the stored k.

  std::complex<double> energy() const { return k.value() * k.value(); }
  double width() const { return -2.0 * energy().imag(); }
  double lifetime() const { return 1.0 / width(); }
  double argument() const { return std::arg(k.value()); }
};

/// True when -pi/4 < arg k < 0 with Re k > 0.
inline bool in_rotation_sector(std::complex<double> k) {
  return k.real() > 0.0 && k.imag() < 0.0 &&
         std::arg(k) > -std::numbers::pi / 4.0;
}

struct NewtonOptions {
  double tolerance = 1e-12; ///< relative to max(1, |ka|)
  int max_iterations = 50;
};

/// Large-opacity closed form k_n a ~ n pi lambda/(1+lambda) - i (n pi/lambda)^2.
ComplexWavenumber<double> asymptotic_pole_seed(int n, const Well &w);

/// Safeguarded Newton on F from `seed`.
Resonance refine_pole(ComplexWavenumber<double> seed, const Well &w,
                      int index = 0, const NewtonOptions &opts = {});

/// Net number of zeros of F inside [0, re_max] x [-im_max, 0], with the
/// corner at the origin indented by a quarter circle of radius `indent`.
int quantization_winding_number(const Well &w, double re_max, double im_max,
                                double indent = 1e-6);

/// Depth below which F has no zeros for Re k <= re_max.
double pole_depth_bound(const Well &w, double re_max);

/// Every fourth-quadrant pole with Re k < k_max, sorted by Re k and audited
/// against the argument principle.
std::vector<Resonance> enumerate_poles(const Well &w, double k_max);

} // namespace gamow
