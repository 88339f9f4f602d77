#include "gamow/gamow_expansion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gamow/quadrature.hpp"

namespace gamow {

namespace {

constexpr double pi = std::numbers::pi;
using cd = std::complex<double>;
const cd I(0.0, 1.0);

// int_0^a sin(alpha x) sin(beta x) dx for complex alpha, beta.
cd sine_overlap(cd alpha, cd beta, double a) {
  auto sinc_term = [a](cd q) -> cd {
    if (std::abs(q * a) < 1e-6) {
      const cd qa2 = q * a * q * a;
      return a * (1.0 - qa2 / 6.0 + qa2 * qa2 / 120.0);
    }
    return std::sin(q * a) / q;
  };
  return 0.5 * (sinc_term(alpha - beta) - sinc_term(alpha + beta));
}

cd analytic_prefactor(const Resonance &r, const SpectralDensity &phi, const Well &w) {
  const cd k = r.k.value();
  const cd n = -2.0 * I * k * w.width;
  return -I * phi(k) * coefficient_A_bar(k, w) * n /
         scattering_denominator_derivative(k, w);
}

// Conservative width estimate of the pole near Re k = k, for choosing cutoffs.
double width_estimate(const Well &w, double k) {
  const double a = w.width;
  const double ka = k * a;
  const double depth = std::min(std::log1p(2.0 * ka / w.opacity) / (2.0 * a),
                                ka * ka / (w.opacity * w.opacity * a));
  return 0.5 * 4.0 * k * depth;
}

} // namespace

cd integrand_f(cd k, double x, const SpectralDensity &phi, const Well &w) {
  if (k == 0.0)
    return 0.0;
  return phi(k) * coefficient_A(k, w) * coefficient_A_bar(k, w) *
         std::sin(k * x) / (2.0 * pi);
}

cd integrand_f(cd k, double x, const InitialProfile &p, const Well &w) {
  return integrand_f(k, x, SpectralDensity(p), w);
}

cd residue_by_contour(const Resonance &r, double x, const SpectralDensity &phi,
                      const Well &w, int points) {
  const cd kn = r.k.value();
  const double rho = std::min(1e-3, std::abs(kn.imag()) / 10.0);
  cd sum = 0.0;
  for (int j = 0; j < points; ++j) {
    const cd e = std::polar(1.0, 2.0 * pi * (j + 0.5) / points);
    sum += integrand_f(kn + rho * e, x, phi, w) * (rho * e);
  }
  // oint f dk = 2 pi i mean(f (k - k_n)); C = -oint f dk.
  return -2.0 * pi * I * sum / double(points);
}

ResidueTerm make_residue(const Resonance &r, const SpectralDensity &phi,
                         const Well &w, double tolerance) {
  check_compatible(phi.profile(), w);
  ResidueTerm term;
  term.resonance = r;
  term.prefactor = analytic_prefactor(r, phi, w);
  const cd k = r.k.value();
  term.weight = std::abs(std::norm(term.prefactor) *
                         sine_overlap(std::conj(k), k, w.width));
  const double x_ref = 0.5 * w.width;
  const cd exact = term.at(x_ref);
  const cd numeric = residue_by_contour(r, x_ref, phi, w);
  term.contour_error = std::abs(exact - numeric) / std::max(std::abs(exact), 1e-300);
  if (term.contour_error > tolerance)
    throw ResidueMismatch("residue of pole " + std::to_string(r.index) +
                          " disagrees with its contour integral (relative " +
                          std::to_string(term.contour_error) + ")");
  return term;
}

cd residue_C(const Resonance &r, double x, const InitialProfile &p, const Well &w) {
  return make_residue(r, SpectralDensity(p), w).at(x);
}

Eigen::MatrixXcd residue_gram(const std::vector<ResidueTerm> &terms, const Well &w) {
  const Eigen::Index n = Eigen::Index(terms.size());
  Eigen::MatrixXcd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto &a = terms[std::size_t(i)];
      const auto &b = terms[std::size_t(j)];
      g(i, j) = std::conj(a.prefactor) * b.prefactor *
                sine_overlap(std::conj(a.resonance.k.value()), b.resonance.k.value(),
                             w.width) /
                std::sqrt(a.weight * b.weight);
    }
  return g;
}

namespace {

template <typename Basis>
KernelResult background_kernel(const SpectralDensity &phi, double t, const Well &w,
                               const RotatedOptions &opts, double x_max,
                               Eigen::Index points, Basis &&basis,
                               EvolutionDiagnostics *diag) {
  check_compatible(phi.profile(), w);
  if (!(t > 0.0))
    throw PreconditionViolated("the rotated contour needs t > 0");
  const double a = w.width;
  const double root_t = std::sqrt(t);
  const cd ray = std::polar(1.0, -pi / 4.0);

  // Phases along the ray turn at rate ~ (x + 2a)/sqrt(2) per unit s.
  const double s_max = opts.u_max / root_t;
  const int pieces =
      std::max(16, int(std::ceil(s_max * (x_max + 2.0 * a) / std::sqrt(2.0) / 2.0)));
  std::vector<double> edges(std::size_t(pieces) + 1);
  for (int i = 0; i <= pieces; ++i)
    edges[std::size_t(i)] = opts.u_max * double(i) / pieces;

  // At long times the integral is tiny; keep the tolerance relative to the
  // size of its leading small-k form.
  const double scale = std::abs(asymptotic_background(a, t, phi, w));
  const double tol =
      scale > 0.0 ? std::max(std::min(opts.abs_tol, opts.rel_tol * scale), 1e-200)
                  : opts.abs_tol;

  auto weight = [&](double u) -> KernelNode {
    const cd z = ray * (u / root_t);
    if (u == 0.0)
      return {0.0, z};
    const cd f = phi(z) * coefficient_A(z, w) * coefficient_A_bar(z, w) / (2.0 * pi);
    return {ray / root_t * std::exp(-u * u) * f, z};
  };
  auto r = integrate_kernel(weight, basis, points, std::span<const double>(edges),
                            tol, opts.max_depth);
  if (diag) {
    diag->k_cutoff = s_max;
    diag->quadrature_error = r.error;
    diag->evaluations = r.evaluations;
  }
  if (!r.converged)
    throw QuadratureNotConverged("rotated background integral", r.error);
  return r;
}

} // namespace

Eigen::VectorXcd background_integral(const SpectralDensity &phi, double t,
                                     std::span<const double> x, const Well &w,
                                     const RotatedOptions &opts,
                                     EvolutionDiagnostics *diag) {
  double x_max = 0.0;
  for (double xi : x)
    x_max = std::max(x_max, std::abs(xi));
  auto basis = [&](cd z, Eigen::Ref<Eigen::VectorXcd> out) {
    for (std::size_t j = 0; j < x.size(); ++j)
      out(Eigen::Index(j)) = std::sin(z * x[j]);
  };
  return background_kernel(phi, t, w, opts, x_max, Eigen::Index(x.size()), basis,
                           diag)
      .value;
}

Eigen::Vector2cd background_boundary_trace(const SpectralDensity &phi, double t,
                                           const Well &w,
                                           const RotatedOptions &opts) {
  const double a = w.width;
  auto basis = [a](cd z, Eigen::Ref<Eigen::VectorXcd> out) {
    out(0) = std::sin(z * a);
    out(1) = z * std::cos(z * a);
  };
  return background_kernel(phi, t, w, opts, a, 2, basis, nullptr).value;
}

cd background_integral(double x, double t, const InitialProfile &p, const Well &w) {
  const double xs[1] = {x};
  return background_integral(SpectralDensity(p), t, std::span<const double>(xs, 1), w)(0);
}

double rotated_pole_cutoff(const Well &w, double t, double decay_exponent) {
  if (!(t > 0.0))
    throw PreconditionViolated("pole cutoff needs t > 0");
  double k = 1.5 * pi / w.width;
  while (width_estimate(w, k) * t < decay_exponent && k < 1e7)
    k *= 1.25;
  return k;
}

GamowExpansion::GamowExpansion(const InitialProfile &p, const Well &w, double k_max,
                               const RotatedOptions &opts)
    : phi_(p), well_(w), opts_(opts), k_max_(k_max) {
  check_compatible(p, w);
  if (!(k_max > pi / w.width))
    throw PreconditionViolated("k_max must exceed pi / a");
  for (const auto &r : enumerate_poles(w, k_max)) {
    if (!in_rotation_sector(r.k.value()))
      continue;
    residues_.push_back(make_residue(r, phi_, w));
  }
  // The first pole beyond k_max is at least as wide as the estimate there.
  t_min_ = opts.decay_exponent / width_estimate(w, k_max);
}

GamowExpansion GamowExpansion::for_times(const InitialProfile &p, const Well &w,
                                         double t_min, const RotatedOptions &opts) {
  return GamowExpansion(p, w, rotated_pole_cutoff(w, t_min, opts.decay_exponent),
                        opts);
}

bool GamowExpansion::negligible(const ResidueTerm &term, double t) const {
  // |C(k_n, x)| e^{-Gamma_n t / 2} over [0, a], compared in logarithms.
  const double y = std::abs(term.resonance.k.imag()) * well_.width;
  const double log_size = std::log(std::abs(term.prefactor)) + y -
                          0.5 * term.resonance.width() * t;
  return log_size < std::log(1e-18);
}

double GamowExpansion::dropped_tail(double t) const {
  if (residues_.empty())
    return 0.0;
  const auto &last = residues_.back();
  const double y = std::abs(last.resonance.k.imag());
  const double scale = std::abs(last.prefactor) * std::cosh(y * well_.width);
  const double g = std::max(last.resonance.width(), width_estimate(well_, k_max_));
  return scale * std::exp(-0.5 * g * t);
}

RotatedDecomposition GamowExpansion::evaluate(double t,
                                              const Eigen::VectorXd &grid) const {
  if (!(t > 0.0))
    throw PreconditionViolated("the rotated representation needs t > 0");
  RotatedDecomposition out;
  out.residues = residues_;
  out.background.x = grid;
  out.background.t = t;
  out.background.method = Method::rotated;
  const std::span<const double> xs(grid.data(), std::size_t(grid.size()));
  out.background.psi =
      background_integral(phi_, t, xs, well_, opts_, &out.background.diagnostics);

  out.total = out.background;
  for (const auto &term : residues_) {
    const cd k = term.resonance.k.value();
    if (negligible(term, t))
      continue;
    const cd c = term.prefactor * std::exp(-I * k * k * t);
    for (Eigen::Index i = 0; i < grid.size(); ++i)
      out.total.psi(i) += c * std::sin(k * grid(i));
  }
  out.dropped_tail = dropped_tail(t);
  out.total.diagnostics.poles_used = int(residues_.size());
  out.total.diagnostics.truncation_estimate = out.dropped_tail;
  if (t < t_min_)
    out.total.diagnostics.warnings.push_back(
        "t below the range covered by the retained poles; dropped-tail "
        "estimate may be large");
  if (t < 0.02 * well_.width * well_.width)
    out.total.diagnostics.warnings.push_back(
        "t < 0.02 a^2: rotated contour is costly, direct method preferred");
  return out;
}

Eigen::Vector2cd GamowExpansion::boundary_trace(double t) const {
  if (!(t > 0.0))
    throw PreconditionViolated("the rotated representation needs t > 0");
  Eigen::Vector2cd v = background_boundary_trace(phi_, t, well_, opts_);
  const double a = well_.width;
  for (const auto &term : residues_) {
    if (negligible(term, t))
      continue;
    const cd k = term.resonance.k.value();
    const cd c = term.prefactor * std::exp(-I * k * k * t);
    v(0) += c * std::sin(k * a);
    v(1) += c * k * std::cos(k * a);
  }
  return v;
}

RotatedDecomposition evolve_rotated(const InitialProfile &p, double t,
                                    const Eigen::VectorXd &grid, const Well &w,
                                    double k_max, const RotatedOptions &opts) {
  if (!(t > 0.0))
    throw PreconditionViolated("evolve_rotated needs t > 0");
  if (k_max <= 0.0)
    return GamowExpansion::for_times(p, w, t, opts).evaluate(t, grid);
  return GamowExpansion(p, w, k_max, opts).evaluate(t, grid);
}

cd asymptotic_background(double x, double t, const SpectralDensity &phi,
                         const Well &w) {
  if (!(t > 0.0))
    throw PreconditionViolated("asymptotic background needs t > 0");
  const double lam = w.opacity;
  const double pref = phi.slope_at_zero() * 4.0 / ((1.0 + lam) * (1.0 + lam)) /
                      (2.0 * pi);
  return std::polar(1.0, -0.75 * pi) * pref * x * std::sqrt(pi) /
         (4.0 * std::pow(t, 1.5));
}

cd asymptotic_background(double x, double t, const InitialProfile &p, const Well &w) {
  return asymptotic_background(x, t, SpectralDensity(p), w);
}

double nonescape_asymptote(double t, const SpectralDensity &phi, const Well &w) {
  if (!(t > 0.0))
    throw PreconditionViolated("asymptote needs t > 0");
  const double lam = w.opacity;
  const double a = w.width;
  const double pref = phi.slope_at_zero() * 4.0 / ((1.0 + lam) * (1.0 + lam)) /
                      (2.0 * pi);
  return pref * pref * (a * a * a / 3.0) * pi / (16.0 * t * t * t);
}

double nonescape_asymptote(double t, const InitialProfile &p, const Well &w) {
  return nonescape_asymptote(t, SpectralDensity(p), w);
}

Crossover crossover_time(const InitialProfile &p, const Well &w) {
  check_compatible(p, w);
  if (!w.metastable())
    throw PreconditionViolated("crossover estimate needs lambda >= 10");
  const SpectralDensity phi(p);
  const auto poles = enumerate_poles(w, 1.5 * pi / w.width);
  if (poles.empty())
    throw NoCrossing("no resonance below 1.5 pi / a");
  const ResidueTerm first = make_residue(poles.front(), phi, w);
  Crossover c;
  c.tau1 = first.resonance.lifetime();
  c.c1 = first.weight;
  c.log_estimate = 10.0 * c.tau1 * std::log(w.opacity);
  // Difference of the logarithms: positive while the exponential dominates.
  auto g = [&](double t) {
    return std::log(c.c1) - t / c.tau1 - std::log(nonescape_asymptote(t, phi, w));
  };
  double lo = c.tau1, hi = 1e4 * c.tau1;
  if (!(g(lo) > 0.0 && g(hi) < 0.0))
    throw NoCrossing("exponential and power-law branches do not cross in "
                     "[tau_1, 1e4 tau_1]");
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  c.t_star = 0.5 * (lo + hi);
  return c;
}

} // namespace gamow
