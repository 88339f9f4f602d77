#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gamow/gamow_expansion.hpp"
#include "gamow/spectral_evolution.hpp"

namespace gamow {

enum class MethodPolicy { automatic, direct, rotated };

std::string to_string(MethodPolicy p);

/// P(t) samples with the method used at each time.
struct DecayCurve {
  std::vector<double> times;
  std::vector<double> probability;
  std::vector<Method> methods;
  Well well{1.0, 1.0};
  std::string profile;
  std::vector<std::string> warnings;

  std::size_t size() const { return times.size(); }
};

struct CurveOptions {
  MethodPolicy policy = MethodPolicy::automatic;
  double direct_below = 0.02; ///< automatic policy: direct for t < this * a^2
  double direct_limit = 50.0; ///< direct policy defers to rotated beyond this * a^2
  int nodes = 257;
  double refine_tol = 1e-8;   ///< relative change between grid doublings
  int max_nodes = 8193;
  double k_max = 0.0;         ///< rotated pole cutoff, <= 0 for automatic
  DirectOptions direct;
  RotatedOptions rotated;
};

/// Nonescape probability int_0^a |psi|^2 dx at each time (ascending, >= 0).
DecayCurve nonescape_curve(const InitialProfile &p, std::span<const double> times,
                           const Well &w, const CurveOptions &opts = {});

/// The closed-form t^{-3} law on the same times (t > 0).
DecayCurve asymptotic_curve(const InitialProfile &p, std::span<const double> times,
                            const Well &w);

/// `per_decade` geometric points from start to stop, both included.
std::vector<double> geometric_times(double start, double stop, int per_decade);

/// dP/dt = -2 Im[conj(psi) d psi/dx] at x = a from a one-sided fourth-order
/// stencil; the grid needs x = a and four uniform neighbours within a/512.
double flux_derivative(const WaveState &ws, const Well &w);

/// dP/dt from exact boundary values (psi(a), d psi/dx (a^-)).
double flux_from_trace(const Eigen::Vector2cd &trace);

struct NormAuditPoint {
  double t = 0.0;
  double inside = 0.0;  ///< int_0^a |psi|^2
  double escaped = 0.0; ///< time-integrated outgoing flux through x = a
  double total = 0.0;
};

/// Total probability inside plus escaped at each checkpoint (ascending, >= 0).
std::vector<NormAuditPoint> norm_audit(const InitialProfile &p, const Well &w,
                                       std::span<const double> checkpoints,
                                       const CurveOptions &opts = {});

struct ExponentialFit {
  double rate = 0.0;
  double intercept = 0.0;
  double residual = 0.0; ///< max |ln P - fit|
  int points = 0;
};

/// Least squares of ln P against t over the samples in [t_lo, t_hi].
ExponentialFit fit_exponential(const DecayCurve &curve, double t_lo, double t_hi);

struct TailFit {
  double exponent = 0.0;
  double half_width = 0.0; ///< two standard errors of the slope
  double amplitude = 0.0;
  double residual = 0.0;
  int points = 0;
};

/// Least squares of ln P against ln t over [t_lo, t_hi]. With a crossover
/// time given, windows starting before it are rejected.
TailFit fit_tail_exponent(const DecayCurve &curve, double t_lo, double t_hi,
                          std::optional<double> crossover = std::nullopt);

/// sum_n c_n Gamma_n, the initial slope -dP/dt the pure pole sum would give.
double exponential_start_rate(const GamowExpansion &expansion);

struct RegimeOptions {
  double exp_lo = 1.0;    ///< exponential window in units of tau_1
  double exp_hi = 5.0;
  double tail_lo = 10.0;  ///< tail window in units of the crossover time
  double tail_hi = 100.0;
  int per_decade = 25;
  CurveOptions curve;
};

struct RegimeReport {
  double gamma1_exact = 0.0;   ///< -2 Im k_1^2 of the refined pole
  double gamma1_formula = 0.0; ///< 4 pi^3 / (lambda a)^2
  double tau1 = 0.0;
  double c1 = 0.0;
  double start_rate = 0.0;     ///< sum c_n Gamma_n

  ExponentialFit exponential;
  double exp_lo = 0.0, exp_hi = 0.0;
  TailFit tail;
  double tail_lo = 0.0, tail_hi = 0.0;

  double t_star_theory = 0.0;   ///< c_1 e^{-t/tau_1} = P_asym(t)
  double t_star_measured = 0.0; ///< intersection of the fitted branches
  double log_estimate = 0.0;  ///< 10 tau_1 ln lambda
  double p_at_t_star = 0.0;
  double log10_lambda_power = 0.0; ///< -10 log10 lambda

  DecayCurve curve;
};

RegimeReport regime_report(const InitialProfile &p, const Well &w,
                           const RegimeOptions &opts = {});

} // namespace gamow
