#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gamow {

enum class ProfileKind { box_mode, truncated_gaussian, custom_samples };

/// Initial wave packet psi(x, 0): real, continuous, supported on [0, a],
/// vanishing at both ends and normalised to one.
class InitialProfile {
public:
  /// sqrt(2/a) sin(n pi x / a).
  static InitialProfile box_mode(int n, double width = 1.0);

  /// exp(-(x-c)^2 / 2 s^2) minus the chord through its end values, normalised.
  static InitialProfile truncated_gaussian(double centre, double sigma,
                                           double width = 1.0);

  /// Piecewise-linear interpolant of the samples. The abscissae must start at
  /// 0, end at `width` and be strictly increasing; the end values must vanish.
  static InitialProfile custom_samples(Eigen::VectorXd x, Eigen::VectorXd values,
                                       double width = 1.0);

  ProfileKind kind() const { return kind_; }
  int mode() const { return mode_; }
  double width() const { return width_; }
  double centre() const { return centre_; }
  double sigma() const { return sigma_; }

  double value(double x) const;
  /// Left derivative (right derivative at x = 0).
  double derivative(double x) const;
  Eigen::VectorXcd sample(const Eigen::VectorXd &x) const;

  /// Short text form, e.g. "box:1" or "gauss:0.5,0.1".
  std::string descriptor() const;

  /// Breakpoints where the profile may have kinks (always includes 0 and a).
  std::vector<double> breakpoints() const;

  /// M with |phi(k)| <= M / k^2 for real k.
  double envelope_constant() const;

private:
  InitialProfile() = default;
  double raw_value(double x) const;
  double raw_derivative(double x) const;
  double raw_second_derivative(double x) const;

  ProfileKind kind_ = ProfileKind::box_mode;
  int mode_ = 1;
  double width_ = 1.0;
  double centre_ = 0.0;
  double sigma_ = 0.0;
  double scale_ = 1.0;
  double g0_ = 0.0, ga_ = 0.0;
  Eigen::VectorXd xs_, vs_;
};

/// phi(k) = int_0^a psi(x, 0) sin(kx) dx, entire in k.
class SpectralDensity {
public:
  explicit SpectralDensity(InitialProfile profile);

  std::complex<double> operator()(std::complex<double> k) const;

  /// phi'(0) = int_0^a psi(x, 0) x dx.
  double slope_at_zero() const { return slope_at_zero_; }

  const InitialProfile &profile() const { return profile_; }

  /// Evaluation through adaptive Gauss-Kronrod only (never the cached rule).
  std::complex<double> adaptive(std::complex<double> k) const;

private:
  InitialProfile profile_;
  // Composite Gauss-Legendre rule over [0, a] with psi folded into weights.
  std::vector<double> nodes_, weighted_values_;
  std::vector<double> panel_edges_;
  double widest_panel_ = 0.0;
  double slope_at_zero_ = 0.0;
};

std::complex<double> overlap_transform(const InitialProfile &p,
                                       std::complex<double> k);

/// Closed form of phi for box_mode(n) on [0, a].
std::complex<double> box_mode_overlap(int n, double width,
                                      std::complex<double> k);

} // namespace gamow
