#include "gamow/profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gamow/errors.hpp"
#include "gamow/quadrature.hpp"

namespace gamow {

namespace {

constexpr double pi = std::numbers::pi;
using cd = std::complex<double>;

cd sinc(cd z) {
  if (std::abs(z) < 1e-3) {
    const cd z2 = z * z;
    return 1.0 - z2 / 6.0 * (1.0 - z2 / 20.0 * (1.0 - z2 / 42.0));
  }
  return std::sin(z) / z;
}

// Integrate `f` on [0, a] with a composite 20-point Gauss-Legendre rule whose
// panels respect the given breakpoints and are at most `h` long.
template <typename F>
double composite(F &&f, const std::vector<double> &edges, double h) {
  const auto &rule = gauss_legendre(20);
  double sum = 0.0;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const int pieces = std::max(1, int(std::ceil((edges[p + 1] - edges[p]) / h)));
    const double step = (edges[p + 1] - edges[p]) / pieces;
    for (int s = 0; s < pieces; ++s) {
      const double lo = edges[p] + s * step;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q)
        sum += 0.5 * step * rule.weights[q] * f(lo + 0.5 * step * (rule.nodes[q] + 1.0));
    }
  }
  return sum;
}

} // namespace

InitialProfile InitialProfile::box_mode(int n, double width) {
  if (n < 1)
    throw InvalidParameters("box mode index must be positive");
  if (!(width > 0.0))
    throw InvalidParameters("width must be positive");
  InitialProfile p;
  p.kind_ = ProfileKind::box_mode;
  p.mode_ = n;
  p.width_ = width;
  p.scale_ = std::sqrt(2.0 / width);
  return p;
}

InitialProfile InitialProfile::truncated_gaussian(double centre, double sigma,
                                                  double width) {
  if (!(width > 0.0))
    throw InvalidParameters("width must be positive");
  if (!(centre > 0.0 && centre < width))
    throw InvalidParameters("gaussian centre must lie inside (0, a)");
  if (!(sigma > 0.0))
    throw InvalidParameters("gaussian width must be positive");
  InitialProfile p;
  p.kind_ = ProfileKind::truncated_gaussian;
  p.width_ = width;
  p.centre_ = centre;
  p.sigma_ = sigma;
  p.g0_ = std::exp(-centre * centre / (2.0 * sigma * sigma));
  p.ga_ = std::exp(-(width - centre) * (width - centre) / (2.0 * sigma * sigma));
  p.scale_ = 1.0;
  const double h = std::min(width / 64.0, sigma / 2.0);
  const double norm = composite(
      [&](double x) { return p.raw_value(x) * p.raw_value(x); }, {0.0, width}, h);
  if (!(norm > 0.0))
    throw InvalidParameters("gaussian profile has zero norm");
  p.scale_ = 1.0 / std::sqrt(norm);
  return p;
}

InitialProfile InitialProfile::custom_samples(Eigen::VectorXd x,
                                              Eigen::VectorXd values,
                                              double width) {
  if (!(width > 0.0))
    throw InvalidParameters("width must be positive");
  if (x.size() != values.size() || x.size() < 3)
    throw InvalidParameters("custom profile needs >= 3 matching samples");
  if (std::abs(x(0)) > 1e-14 * width || std::abs(x(x.size() - 1) - width) > 1e-12 * width)
    throw InvalidParameters("custom samples must span exactly [0, a]");
  for (Eigen::Index i = 1; i < x.size(); ++i)
    if (!(x(i) > x(i - 1)))
      throw InvalidParameters("custom abscissae must be strictly increasing");
  if (!values.allFinite())
    throw InvalidParameters("custom samples must be finite");
  const double peak = values.cwiseAbs().maxCoeff();
  if (!(peak > 0.0))
    throw InvalidParameters("custom profile is identically zero");
  if (std::abs(values(0)) > 1e-12 * peak ||
      std::abs(values(values.size() - 1)) > 1e-12 * peak)
    throw InvalidParameters("custom profile must vanish at x = 0 and x = a");
  x(0) = 0.0;
  x(x.size() - 1) = width;
  values(0) = 0.0;
  values(values.size() - 1) = 0.0;

  // Exact norm of the piecewise-linear interpolant.
  double norm = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double h = x(i + 1) - x(i);
    const double u = values(i), v = values(i + 1);
    norm += h * (u * u + u * v + v * v) / 3.0;
  }
  InitialProfile p;
  p.kind_ = ProfileKind::custom_samples;
  p.width_ = width;
  p.xs_ = std::move(x);
  p.vs_ = values / std::sqrt(norm);
  return p;
}

double InitialProfile::raw_value(double x) const {
  switch (kind_) {
  case ProfileKind::box_mode:
    return std::sin(mode_ * pi * x / width_);
  case ProfileKind::truncated_gaussian: {
    const double d = x - centre_;
    return std::exp(-d * d / (2.0 * sigma_ * sigma_)) - g0_ * (1.0 - x / width_) -
           ga_ * x / width_;
  }
  case ProfileKind::custom_samples: {
    const auto begin = xs_.data(), end = xs_.data() + xs_.size();
    auto it = std::upper_bound(begin, end, x);
    Eigen::Index i = std::clamp<Eigen::Index>(it - begin - 1, 0, xs_.size() - 2);
    const double t = (x - xs_(i)) / (xs_(i + 1) - xs_(i));
    return (1.0 - t) * vs_(i) + t * vs_(i + 1);
  }
  }
  return 0.0;
}

double InitialProfile::raw_derivative(double x) const {
  switch (kind_) {
  case ProfileKind::box_mode:
    return (mode_ * pi / width_) * std::cos(mode_ * pi * x / width_);
  case ProfileKind::truncated_gaussian: {
    const double d = x - centre_;
    return -d / (sigma_ * sigma_) * std::exp(-d * d / (2.0 * sigma_ * sigma_)) +
           (g0_ - ga_) / width_;
  }
  case ProfileKind::custom_samples: {
    const auto begin = xs_.data(), end = xs_.data() + xs_.size();
    // Left derivative: pick the segment ending at or after x.
    auto it = std::lower_bound(begin, end, x);
    Eigen::Index i = std::clamp<Eigen::Index>(it - begin - 1, 0, xs_.size() - 2);
    return (vs_(i + 1) - vs_(i)) / (xs_(i + 1) - xs_(i));
  }
  }
  return 0.0;
}

double InitialProfile::raw_second_derivative(double x) const {
  switch (kind_) {
  case ProfileKind::box_mode: {
    const double q = mode_ * pi / width_;
    return -q * q * std::sin(q * x);
  }
  case ProfileKind::truncated_gaussian: {
    const double d = x - centre_;
    const double s2 = sigma_ * sigma_;
    return (d * d / (s2 * s2) - 1.0 / s2) * std::exp(-d * d / (2.0 * s2));
  }
  case ProfileKind::custom_samples:
    return 0.0;
  }
  return 0.0;
}

double InitialProfile::value(double x) const {
  if (x < 0.0 || x > width_)
    return 0.0;
  if (kind_ == ProfileKind::box_mode)
    return scale_ * raw_value(x);
  if (kind_ == ProfileKind::truncated_gaussian)
    return scale_ * raw_value(x);
  return raw_value(x);
}

double InitialProfile::derivative(double x) const {
  if (x < 0.0 || x > width_)
    return 0.0;
  return kind_ == ProfileKind::custom_samples ? raw_derivative(x)
                                              : scale_ * raw_derivative(x);
}

Eigen::VectorXcd InitialProfile::sample(const Eigen::VectorXd &x) const {
  Eigen::VectorXcd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    out(i) = value(x(i));
  return out;
}

std::string InitialProfile::descriptor() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
  case ProfileKind::box_mode:
    os << "box:" << mode_;
    break;
  case ProfileKind::truncated_gaussian:
    os << "gauss:" << centre_ << ',' << sigma_;
    break;
  case ProfileKind::custom_samples:
    os << "custom:" << xs_.size();
    break;
  }
  return os.str();
}

std::vector<double> InitialProfile::breakpoints() const {
  if (kind_ == ProfileKind::custom_samples)
    return {xs_.data(), xs_.data() + xs_.size()};
  return {0.0, width_};
}

double InitialProfile::envelope_constant() const {
  // Two integrations by parts with psi(0) = psi(a) = 0:
  //   |phi(k)| <= (|psi'(a)| + int |psi''|) / k^2.
  switch (kind_) {
  case ProfileKind::box_mode: {
    const double q = mode_ * pi / width_;
    return scale_ * q * (1.0 + 2.0 * mode_);
  }
  case ProfileKind::truncated_gaussian: {
    const double h = std::min(width_ / 256.0, sigma_ / 8.0);
    const double curvature =
        composite([&](double x) { return std::abs(raw_second_derivative(x)); },
                  {0.0, width_}, h);
    return scale_ * (std::abs(raw_derivative(width_)) + curvature);
  }
  case ProfileKind::custom_samples: {
    double total = std::abs(derivative(width_));
    for (Eigen::Index i = 1; i + 1 < xs_.size(); ++i) {
      const double left = (vs_(i) - vs_(i - 1)) / (xs_(i) - xs_(i - 1));
      const double right = (vs_(i + 1) - vs_(i)) / (xs_(i + 1) - xs_(i));
      total += std::abs(right - left);
    }
    return total;
  }
  }
  return 0.0;
}

std::complex<double> box_mode_overlap(int n, double width, std::complex<double> k) {
  const double q = n * pi / width;
  return std::sqrt(2.0 / width) * 0.5 * width *
         (sinc((k - q) * width) - sinc((k + q) * width));
}

SpectralDensity::SpectralDensity(InitialProfile profile)
    : profile_(std::move(profile)) {
  const double a = profile_.width();
  if (profile_.kind() == ProfileKind::box_mode) {
    const int n = profile_.mode();
    slope_at_zero_ = std::sqrt(2.0 / a) * a * a * ((n % 2 == 1) ? 1.0 : -1.0) / (n * pi);
    return;
  }
  double h = a / 64.0;
  if (profile_.kind() == ProfileKind::truncated_gaussian)
    h = std::min(h, profile_.sigma() / 2.0);
  const auto edges = profile_.breakpoints();
  const auto &rule = gauss_legendre(20);
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const int pieces = std::max(1, int(std::ceil((edges[p + 1] - edges[p]) / h)));
    const double step = (edges[p + 1] - edges[p]) / pieces;
    for (int s = 0; s < pieces; ++s) {
      const double lo = edges[p] + s * step;
      panel_edges_.push_back(lo);
      widest_panel_ = std::max(widest_panel_, step);
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double x = lo + 0.5 * step * (rule.nodes[q] + 1.0);
        nodes_.push_back(x);
        weighted_values_.push_back(0.5 * step * rule.weights[q] * profile_.value(x));
      }
    }
  }
  panel_edges_.push_back(a);
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    slope_at_zero_ += weighted_values_[i] * nodes_[i];
}

std::complex<double> SpectralDensity::operator()(std::complex<double> k) const {
  if (profile_.kind() == ProfileKind::box_mode)
    return box_mode_overlap(profile_.mode(), profile_.width(), k);
  // A 20-point panel integrates sin(kx) to round-off while |k| h <= 6.
  if (std::abs(k) * widest_panel_ > 6.0)
    return adaptive(k);
  std::complex<double> sum = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    sum += weighted_values_[i] * std::sin(k * nodes_[i]);
  return sum;
}

std::complex<double> SpectralDensity::adaptive(std::complex<double> k) const {
  const double a = profile_.width();
  const double scale = std::exp(std::abs(k.imag()) * a);
  auto integrand = [&](double x) { return profile_.value(x) * std::sin(k * x); };
  const auto edges = profile_.breakpoints();
  auto r = integrate_adaptive<std::complex<double>>(
      integrand, std::span<const double>(edges), 1e-13 * std::max(1.0, scale), 50);
  return r.value;
}

std::complex<double> overlap_transform(const InitialProfile &p,
                                       std::complex<double> k) {
  return SpectralDensity(p)(k);
}

} // namespace gamow
