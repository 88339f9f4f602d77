#pragma once

#include <cmath>
#include <complex>

#include "gamow/errors.hpp"

namespace gamow {

template <typename Scalar> using Complex = std::complex<Scalar>;

/// Hard wall at x = 0 plus the barrier (opacity / width) * delta(x - width).
///
/// Units are hbar = 2m = 1: wavenumbers carry 1/length, energies 1/length^2
/// and times length^2.
template <typename Scalar = double> struct WellParameters {
  Scalar opacity;
  Scalar width = Scalar(1);

  void validate() const {
    if (!(opacity > Scalar(0)) || !std::isfinite(double(opacity)))
      throw InvalidParameters("opacity must be finite and > 0");
    if (!(width > Scalar(0)) || !std::isfinite(double(width)))
      throw InvalidParameters("width must be finite and > 0");
  }

  /// Opaque-barrier regime where the large-opacity asymptotics apply.
  bool metastable() const { return opacity >= Scalar(10); }
};

using Well = WellParameters<double>;

/// A wavenumber known to be finite.
template <typename Scalar = double> class ComplexWavenumber {
public:
  ComplexWavenumber() = default;
  ComplexWavenumber(Complex<Scalar> k) : k_(k) { // NOLINT implicit on purpose
    using std::isfinite;
    if (!isfinite(double(k.real())) || !isfinite(double(k.imag())))
      throw InvalidParameters("wavenumber must be finite");
  }
  ComplexWavenumber(Scalar re, Scalar im)
      : ComplexWavenumber(Complex<Scalar>(re, im)) {}

  Complex<Scalar> value() const { return k_; }
  operator Complex<Scalar>() const { return k_; } // NOLINT

  Scalar real() const { return k_.real(); }
  Scalar imag() const { return k_.imag(); }

private:
  Complex<Scalar> k_{};
};

} // namespace gamow
