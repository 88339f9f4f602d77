#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gamow/potential_model.hpp"
#include "gamow/profile.hpp"
#include "gamow/spectral_evolution.hpp"

namespace gamow {

// |A(k)|^2 is continued off the real axis as A(k) Abar(k), so the rotated
// contour only crosses the fourth-quadrant poles of A.

/// f(k, x) = (1/2 pi) phi(k) A(k) Abar(k) sin kx.
std::complex<double> integrand_f(std::complex<double> k, double x,
                                 const SpectralDensity &phi, const Well &w);
std::complex<double> integrand_f(std::complex<double> k, double x,
                                 const InitialProfile &p, const Well &w);

/// C(k_n, x) = prefactor * sin(k_n x).
struct ResidueTerm {
  Resonance resonance;
  std::complex<double> prefactor;
  double weight = 0.0;         ///< c_n = int_0^a |C(k_n, x)|^2 dx
  double contour_error = 0.0;  ///< relative mismatch against the circle integral

  std::complex<double> at(double x) const {
    return prefactor * std::sin(resonance.k.value() * x);
  }
};

/// Builds the residue term and checks it against a small-circle contour
/// integral of f; throws ResidueMismatch above `tolerance` (relative).
ResidueTerm make_residue(const Resonance &r, const SpectralDensity &phi,
                         const Well &w, double tolerance = 1e-6);

std::complex<double> residue_C(const Resonance &r, double x,
                               const InitialProfile &p, const Well &w);

/// C computed as -oint f dk on a circle of radius min(1e-3, |Im k_n|/10)
/// around k_n (trapezoid rule).
std::complex<double> residue_by_contour(const Resonance &r, double x,
                                        const SpectralDensity &phi,
                                        const Well &w, int points = 128);

/// int_0^a conj(C_n) C_m dx / sqrt(c_n c_m).
Eigen::MatrixXcd residue_gram(const std::vector<ResidueTerm> &terms,
                              const Well &w);

struct RotatedOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-8;       ///< relative to the leading small-k form
  double u_max = 8.0;          ///< ray parameter is u = s sqrt(t)
  double decay_exponent = 40.0; ///< poles kept while Gamma_n t / 2 < this
  int max_depth = 30;
};

/// e^{-i pi/4} int_0^inf e^{-s^2 t} f(e^{-i pi/4} s, x) ds at every x.
Eigen::VectorXcd background_integral(const SpectralDensity &phi, double t,
                                     std::span<const double> x, const Well &w,
                                     const RotatedOptions &opts = {},
                                     EvolutionDiagnostics *diag = nullptr);

std::complex<double> background_integral(double x, double t,
                                         const InitialProfile &p, const Well &w);

/// Background contribution to (psi(a), d psi/dx (a^-)).
Eigen::Vector2cd background_boundary_trace(const SpectralDensity &phi, double t,
                                           const Well &w,
                                           const RotatedOptions &opts = {});

/// Real part of the wavenumber beyond which every pole has decayed by
/// e^{-decay_exponent} at time t.
double rotated_pole_cutoff(const Well &w, double t, double decay_exponent = 40.0);

struct RotatedDecomposition {
  WaveState background;
  std::vector<ResidueTerm> residues;
  WaveState total;
  double dropped_tail = 0.0; ///< estimate of the omitted residue terms
};

/// Poles and residues computed once, evaluated at any t > 0.
class GamowExpansion {
public:
  /// Every pole with Re k < k_max.
  GamowExpansion(const InitialProfile &p, const Well &w, double k_max,
                 const RotatedOptions &opts = {});

  /// Enough poles that every omitted one has decayed by e^{-decay_exponent}
  /// at t_min.
  static GamowExpansion for_times(const InitialProfile &p, const Well &w,
                                  double t_min, const RotatedOptions &opts = {});

  RotatedDecomposition evaluate(double t, const Eigen::VectorXd &grid) const;

  /// (psi(a, t), d psi/dx (a^-, t)).
  Eigen::Vector2cd boundary_trace(double t) const;

  const std::vector<ResidueTerm> &residues() const { return residues_; }
  const SpectralDensity &density() const { return phi_; }
  const Well &well() const { return well_; }
  double k_max() const { return k_max_; }

  /// Smallest t for which the omitted poles meet the decay criterion.
  double t_min() const { return t_min_; }

  /// Bound on the omitted residue terms at time t (sup over [0, a]).
  double dropped_tail(double t) const;

private:
  bool negligible(const ResidueTerm &term, double t) const;

  SpectralDensity phi_;
  Well well_;
  RotatedOptions opts_;
  double k_max_ = 0.0;
  double t_min_ = 0.0;
  std::vector<ResidueTerm> residues_;
};

/// Background plus residues at time t > 0. k_max <= 0 picks the cutoff from t.
RotatedDecomposition evolve_rotated(const InitialProfile &p, double t,
                                    const Eigen::VectorXd &grid, const Well &w,
                                    double k_max = 0.0,
                                    const RotatedOptions &opts = {});

/// Leading small-k form of the background:
/// (e^{-3i pi/4}/2 pi) phi'(0) (4/(1+lambda)^2) x sqrt(pi) / (4 t^{3/2}).
std::complex<double> asymptotic_background(double x, double t,
                                           const SpectralDensity &phi,
                                           const Well &w);
std::complex<double> asymptotic_background(double x, double t,
                                           const InitialProfile &p, const Well &w);

/// int_0^a |asymptotic_background|^2 dx, an exact t^{-3} law.
double nonescape_asymptote(double t, const SpectralDensity &phi, const Well &w);
double nonescape_asymptote(double t, const InitialProfile &p, const Well &w);

struct Crossover {
  double t_star = 0.0;
  double log_estimate = 0.0; ///< 10 tau_1 ln lambda
  double tau1 = 0.0;
  double c1 = 0.0;
};

/// Solves c_1 e^{-t/tau_1} = P_asym(t) by bisection on [tau_1, 1e4 tau_1].
Crossover crossover_time(const InitialProfile &p, const Well &w);

} // namespace gamow
