#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gamow/potential_model.hpp"
#include "gamow/profile.hpp"

namespace gamow {

enum class Method { direct, rotated, asymptotic };

std::string to_string(Method m);

/// Bookkeeping attached to an evolved state.
struct EvolutionDiagnostics {
  double k_cutoff = 0.0;         ///< last wavenumber (or ray parameter) used
  double truncation_estimate = 0.0; ///< estimate of the dropped k-range
  double quadrature_error = 0.0; ///< summed Gauss-Kronrod error estimate
  long evaluations = 0;
  int poles_used = 0;
  std::vector<std::string> warnings;
};

/// psi(x_i, t) sampled on an ascending grid.
struct WaveState {
  Eigen::VectorXd x;
  Eigen::VectorXcd psi;
  double t = 0.0;
  Method method = Method::direct;
  EvolutionDiagnostics diagnostics;
};

/// `nodes` equally spaced points on [0, a] (both ends included).
Eigen::VectorXd well_grid(const Well &w, int nodes = 257);

/// The profile itself, i.e. the state at t = 0 by definition.
WaveState initial_state(const InitialProfile &p, const Eigen::VectorXd &grid);

/// Real-energy scattering eigenfunction phi_k(x), normalised to delta(k - k').
std::complex<double> continuum_eigenfunction(double k, double x, const Well &w);

struct DirectOptions {
  double abs_tol = 1e-10;     ///< sup-norm target for the k quadrature
  double tail_tol = 1e-9;     ///< target for the dropped-tail estimate at t = 0
  double k_cap = 2e5;         ///< hard ceiling for the cutoff (closed-form phi)
  double k_cap_quadrature = 4e3; ///< ceiling when phi needs quadrature
  int max_depth = 30;
  bool throw_on_failure = true;
};

/// Cutoff K and smooth-window length used by the direct method at time t.
struct DirectCutoff {
  double k_cut = 0.0;
  double window = 0.0;
  double truncation_estimate = 0.0;
};

DirectCutoff direct_cutoff(const SpectralDensity &phi, double t, const Well &w,
                           const DirectOptions &opts = {});

/// (1/2 pi) int_0^inf e^{-ik^2 t} phi(k) |A(k)|^2 sin(kx) dk for x in [0, a].
/// The sign of t is not restricted here.
Eigen::VectorXcd spectral_integral(const SpectralDensity &phi, double t,
                                   std::span<const double> x, const Well &w,
                                   const DirectOptions &opts = {},
                                   EvolutionDiagnostics *diag = nullptr);

/// (psi(a, t), d psi/dx (a^-, t)) from the same integral.
Eigen::Vector2cd boundary_trace_direct(const SpectralDensity &phi, double t,
                                       const Well &w, const DirectOptions &opts = {},
                                       EvolutionDiagnostics *diag = nullptr);

/// Exact evolution through the real-axis spectral integral (grid in [0, a]).
WaveState evolve_direct(const InitialProfile &p, double t,
                        const Eigen::VectorXd &grid, const Well &w,
                        const DirectOptions &opts = {});

/// Same integral through the exterior branch of the eigenfunctions (x >= a).
WaveState evolve_direct_exterior(const InitialProfile &p, double t,
                                 const Eigen::VectorXd &grid, const Well &w,
                                 const DirectOptions &opts = {});

/// int_0^a |psi|^2 dx over the grid nodes lying in [0, a].
double norm_inside(const WaveState &ws, const Well &w);

/// Throws InvalidParameters when the profile and well disagree on a.
void check_compatible(const InitialProfile &p, const Well &w);

} // namespace gamow
