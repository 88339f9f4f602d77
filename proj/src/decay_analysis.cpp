#include "gamow/decay_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "gamow/quadrature.hpp"

namespace gamow {

namespace {

constexpr double pi = std::numbers::pi;
using cd = std::complex<double>;

void check_times(std::span<const double> times) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || times[i] < 0.0)
      throw PreconditionViolated("times must be finite and >= 0");
    if (i > 0 && times[i] < times[i - 1])
      throw PreconditionViolated("times must be ascending");
  }
}

struct LineFit {
  double slope = 0.0, intercept = 0.0, slope_se = 0.0, residual = 0.0;
};

LineFit least_squares(const std::vector<double> &u, const std::vector<double> &v) {
  const Eigen::Index n = Eigen::Index(u.size());
  Eigen::MatrixXd m(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, 0) = 1.0;
    m(i, 1) = u[std::size_t(i)];
    y(i) = v[std::size_t(i)];
  }
  const Eigen::Vector2d c = m.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd r = y - m * c;
  LineFit f;
  f.intercept = c(0);
  f.slope = c(1);
  f.residual = r.cwiseAbs().maxCoeff();
  if (n > 2) {
    const double s2 = r.squaredNorm() / double(n - 2);
    const Eigen::Matrix2d cov = s2 * (m.transpose() * m).inverse();
    f.slope_se = std::sqrt(std::max(0.0, cov(1, 1)));
  }
  return f;
}

// int_0^a |psi|^2 by Simpson, doubling the grid until it settles.
template <typename Evaluate>
double settled_probability(Evaluate &&psi_on, const Well &w, const CurveOptions &o,
                           bool &settled) {
  int coarse = std::max(o.nodes, 3);
  if (coarse % 2 == 0)
    ++coarse;
  double prev = -1.0;
  settled = false;
  while (true) {
    const int fine = 2 * coarse - 1;
    const Eigen::VectorXd grid = well_grid(w, fine);
    const Eigen::VectorXd dens = psi_on(grid).cwiseAbs2();
    const double h = w.width / double(fine - 1);
    Eigen::VectorXd every_other(coarse);
    for (int i = 0; i < coarse; ++i)
      every_other(i) = dens(2 * i);
    const double pc = prev >= 0.0 ? prev : simpson(every_other, 2.0 * h);
    const double pf = simpson(dens, h);
    const double scale = std::max(std::abs(pf), 1e-300);
    if (std::abs(pf - pc) <= o.refine_tol * scale) {
      settled = true;
      return pf;
    }
    if (2 * fine - 1 > o.max_nodes)
      return pf;
    prev = pf;
    coarse = fine;
  }
}

} // namespace

std::string to_string(MethodPolicy p) {
  switch (p) {
  case MethodPolicy::automatic:
    return "auto";
  case MethodPolicy::direct:
    return "direct";
  case MethodPolicy::rotated:
    return "rotated";
  }
  return "unknown";
}

std::vector<double> geometric_times(double start, double stop, int per_decade) {
  if (!(start > 0.0) || !(stop >= start) || per_decade < 1)
    throw PreconditionViolated("geometric grid needs 0 < start <= stop and "
                               "points per decade >= 1");
  const double decades = std::log10(stop / start);
  const int steps = std::max(1, int(std::ceil(decades * per_decade - 1e-9)));
  std::vector<double> t(std::size_t(steps) + 1);
  for (int i = 0; i <= steps; ++i)
    t[std::size_t(i)] = start * std::pow(stop / start, double(i) / steps);
  t.front() = start;
  t.back() = stop;
  if (stop == start)
    t.resize(1);
  return t;
}

DecayCurve nonescape_curve(const InitialProfile &p, std::span<const double> times,
                           const Well &w, const CurveOptions &opts) {
  check_compatible(p, w);
  check_times(times);
  const double a2 = w.width * w.width;
  const SpectralDensity phi(p);

  DecayCurve curve;
  curve.well = w;
  curve.profile = p.descriptor();

  auto choose = [&](double t) {
    switch (opts.policy) {
    case MethodPolicy::automatic:
      return t < opts.direct_below * a2 ? Method::direct : Method::rotated;
    case MethodPolicy::direct:
      return t > opts.direct_limit * a2 ? Method::rotated : Method::direct;
    case MethodPolicy::rotated:
      return Method::rotated;
    }
    return Method::rotated;
  };

  double t_rot_min = 0.0;
  bool deferred = false;
  for (double t : times)
    if (t > 0.0 && choose(t) == Method::rotated) {
      if (t_rot_min == 0.0)
        t_rot_min = t;
      if (opts.policy == MethodPolicy::direct)
        deferred = true;
    }
  if (deferred)
    curve.warnings.push_back("direct policy: times beyond " +
                             std::to_string(opts.direct_limit) +
                             " a^2 use the rotated contour");
  std::unique_ptr<GamowExpansion> expansion;
  if (t_rot_min > 0.0)
    expansion = std::make_unique<GamowExpansion>(
        opts.k_max > 0.0
            ? GamowExpansion(p, w, opts.k_max, opts.rotated)
            : GamowExpansion::for_times(p, w, t_rot_min, opts.rotated));

  for (double t : times) {
    curve.times.push_back(t);
    if (t == 0.0) {
      curve.probability.push_back(1.0);
      curve.methods.push_back(Method::direct);
      continue;
    }
    const Method m = choose(t);
    bool settled = false;
    double prob = 0.0;
    if (m == Method::direct) {
      prob = settled_probability(
          [&](const Eigen::VectorXd &g) -> Eigen::VectorXcd {
            return spectral_integral(phi, t,
                                     std::span<const double>(g.data(), std::size_t(g.size())),
                                     w, opts.direct);
          },
          w, opts, settled);
    } else {
      prob = settled_probability(
          [&](const Eigen::VectorXd &g) -> Eigen::VectorXcd {
            return expansion->evaluate(t, g).total.psi;
          },
          w, opts, settled);
    }
    if (!settled)
      curve.warnings.push_back("spatial grid did not settle at t = " +
                               std::to_string(t));
    curve.probability.push_back(prob);
    curve.methods.push_back(m);
  }
  return curve;
}

DecayCurve asymptotic_curve(const InitialProfile &p, std::span<const double> times,
                            const Well &w) {
  check_compatible(p, w);
  check_times(times);
  const SpectralDensity phi(p);
  DecayCurve curve;
  curve.well = w;
  curve.profile = p.descriptor();
  for (double t : times) {
    if (t == 0.0)
      continue;
    curve.times.push_back(t);
    curve.probability.push_back(nonescape_asymptote(t, phi, w));
    curve.methods.push_back(Method::asymptotic);
  }
  return curve;
}

double flux_from_trace(const Eigen::Vector2cd &trace) {
  return -2.0 * std::imag(std::conj(trace(0)) * trace(1));
}

double flux_derivative(const WaveState &ws, const Well &w) {
  const double a = w.width;
  Eigen::Index j = -1;
  for (Eigen::Index i = 0; i < ws.x.size(); ++i)
    if (std::abs(ws.x(i) - a) <= 1e-12 * a)
      j = i;
  if (j < 4)
    throw GridTooCoarse("flux needs x = a and four nodes to its left");
  const double h = ws.x(j) - ws.x(j - 1);
  if (!(h > 0.0) || h > a / 512.0 * (1.0 + 1e-9))
    throw GridTooCoarse("flux needs neighbours of x = a within a/512");
  for (int m = 2; m <= 4; ++m)
    if (std::abs((ws.x(j - m + 1) - ws.x(j - m)) - h) > 1e-9 * h)
      throw GridTooCoarse("flux stencil needs uniform spacing near x = a");
  const Eigen::VectorXcd &f = ws.psi;
  const cd d = (25.0 * f(j) - 48.0 * f(j - 1) + 36.0 * f(j - 2) - 16.0 * f(j - 3) +
                3.0 * f(j - 4)) /
               (12.0 * h);
  return flux_from_trace(Eigen::Vector2cd(f(j), d));
}

namespace {

// Chebyshev points of the second kind on [t0, t1] with barycentric weights.
struct ChebyshevInterpolant {
  std::vector<double> nodes, weights;
  std::vector<Eigen::Vector2cd> values;

  ChebyshevInterpolant(double t0, double t1, int n) {
    for (int j = 0; j <= n; ++j) {
      nodes.push_back(0.5 * (t0 + t1) - 0.5 * (t1 - t0) * std::cos(std::numbers::pi * j / n));
      weights.push_back((j % 2 ? -1.0 : 1.0) * (j == 0 || j == n ? 0.5 : 1.0));
    }
  }

  Eigen::Vector2cd operator()(double t) const {
    Eigen::Vector2cd num = Eigen::Vector2cd::Zero();
    double den = 0.0;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const double d = t - nodes[j];
      if (d == 0.0)
        return values[j];
      num += (weights[j] / d) * values[j];
      den += weights[j] / d;
    }
    return num / den;
  }
};

// Escaped probability between t0 > 0 and t1 from the pole expansion. The
// background trace is smooth in t and interpolated; the pole sum carries the
// beats between resonances and is summed exactly on panels a few radians
// of the fastest live phase long.
double escaped_rotated(const InitialProfile &p, const SpectralDensity &phi,
                       const Well &w, double t0, double t1,
                       const RotatedOptions &opts) {
  const auto ex = GamowExpansion::for_times(p, w, t0, opts);
  ChebyshevInterpolant background(t0, t1, 24);
  for (double tn : background.nodes)
    background.values.push_back(background_boundary_trace(phi, tn, w, opts));

  const double a = w.width;
  struct Live {
    std::complex<double> k2, r, dr;
    double log_size, width;
  };
  std::vector<Live> terms;
  for (const auto &term : ex.residues()) {
    const std::complex<double> k = term.resonance.k.value();
    const double y = std::abs(k.imag()) * a;
    terms.push_back({k * k, term.prefactor * std::sin(k * a),
                     term.prefactor * k * std::cos(k * a),
                     std::log(std::abs(term.prefactor)) + y, term.resonance.width()});
  }
  auto alive = [](const Live &l, double t) {
    return l.log_size - 0.5 * l.width * t > std::log(1e-18);
  };

  const auto &rule = gauss_legendre(16);
  double sum = 0.0;
  double s = t0;
  while (s < t1) {
    double omega = 1.0;
    std::vector<const Live *> live;
    for (const auto &l : terms)
      if (alive(l, s)) {
        live.push_back(&l);
        omega = std::max(omega, std::abs(l.k2));
      }
    const double e = std::min(t1, s + 6.0 / omega);
    const double half = 0.5 * (e - s), mid = 0.5 * (e + s);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double tq = mid + half * rule.nodes[q];
      Eigen::Vector2cd v = background(tq);
      for (const Live *l : live) {
        const std::complex<double> ph = std::exp(std::complex<double>(0.0, -1.0) * l->k2 * tq);
        v(0) += l->r * ph;
        v(1) += l->dr * ph;
      }
      sum -= half * rule.weights[q] * flux_from_trace(v);
    }
    s = e;
  }
  return sum;
}

} // namespace

std::vector<NormAuditPoint> norm_audit(const InitialProfile &p, const Well &w,
                                       std::span<const double> checkpoints,
                                       const CurveOptions &opts) {
  check_compatible(p, w);
  check_times(checkpoints);
  // Outgoing current J = -dP/dt at x = a. Below t_switch it comes from the
  // real-axis integral, beyond it from the pole expansion.
  const double t_switch = std::min(opts.direct_below, 1e-3) * w.width * w.width;
  const SpectralDensity phi(p);
  const double t_last = checkpoints.empty() ? 0.0 : checkpoints.back();

  double tau = t_last;
  if (t_last > t_switch) {
    const GamowExpansion low(p, w, 1.5 * std::numbers::pi / w.width, opts.rotated);
    if (!low.residues().empty())
      tau = low.residues().front().resonance.lifetime();
  }

  // The derivative trace decays only like 1/k along the real axis, so the
  // direct tolerance is loosened and the recursion kept shallow.
  DirectOptions trace_opts = opts.direct;
  trace_opts.abs_tol = std::max(trace_opts.abs_tol, 1e-8);
  trace_opts.max_depth = std::min(trace_opts.max_depth, 12);
  trace_opts.throw_on_failure = false;

  const auto curve = nonescape_curve(p, checkpoints, w, opts);
  std::vector<NormAuditPoint> out;
  double escaped = 0.0;
  double reached = 0.0;
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    const double t = checkpoints[i];
    if (t > reached && reached < t_switch) {
      // J is smooth in s = sqrt(t) near t = 0; fixed Gauss-Legendre in s
      // keeps the number of (costly, slightly noisy) direct traces bounded.
      const double s0 = std::sqrt(reached), s1 = std::sqrt(std::min(t, t_switch));
      const auto &rule = gauss_legendre(16);
      const double half = 0.5 * (s1 - s0), mid = 0.5 * (s1 + s0);
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double sq = mid + half * rule.nodes[q];
        const double j = -flux_from_trace(boundary_trace_direct(phi, sq * sq, w, trace_opts));
        escaped += half * rule.weights[q] * j * 2.0 * sq;
      }
      reached = std::min(t, t_switch);
    }
    while (t > reached) {
      const double t1 = std::min(t, reached + std::min(reached, 0.25 * tau));
      escaped += escaped_rotated(p, phi, w, reached, t1, opts.rotated);
      reached = t1;
    }
    NormAuditPoint pt;
    pt.t = t;
    pt.inside = curve.probability[i];
    pt.escaped = escaped;
    pt.total = pt.inside + pt.escaped;
    out.push_back(pt);
  }
  return out;
}

ExponentialFit fit_exponential(const DecayCurve &curve, double t_lo, double t_hi) {
  std::vector<double> u, v;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double t = curve.times[i];
    if (t >= t_lo && t <= t_hi && curve.probability[i] > 1e-14) {
      u.push_back(t);
      v.push_back(std::log(curve.probability[i]));
    }
  }
  if (u.size() < 8)
    throw WindowTooSmall("exponential fit needs at least 8 points with P > 1e-14");
  const LineFit f = least_squares(u, v);
  ExponentialFit e;
  e.rate = -f.slope;
  e.intercept = std::exp(f.intercept);
  e.residual = f.residual;
  e.points = int(u.size());
  return e;
}

TailFit fit_tail_exponent(const DecayCurve &curve, double t_lo, double t_hi,
                          std::optional<double> crossover) {
  if (crossover && t_lo <= *crossover)
    throw WindowBeforeCrossover("tail window starts before the crossover time");
  std::vector<double> u, v;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double t = curve.times[i];
    if (t > 0.0 && t >= t_lo && t <= t_hi && curve.probability[i] > 0.0) {
      u.push_back(std::log(t));
      v.push_back(std::log(curve.probability[i]));
    }
  }
  if (u.size() < 8)
    throw WindowTooSmall("tail fit needs at least 8 points");
  const LineFit f = least_squares(u, v);
  TailFit tf;
  tf.exponent = f.slope;
  tf.half_width = 2.0 * f.slope_se;
  tf.amplitude = std::exp(f.intercept);
  tf.residual = f.residual;
  tf.points = int(u.size());
  return tf;
}

double exponential_start_rate(const GamowExpansion &expansion) {
  double s = 0.0;
  for (const auto &term : expansion.residues())
    s += term.weight * term.resonance.width();
  return s;
}

RegimeReport regime_report(const InitialProfile &p, const Well &w,
                           const RegimeOptions &opts) {
  check_compatible(p, w);
  if (!w.metastable())
    throw PreconditionViolated("regime report needs lambda >= 10");
  RegimeReport rep;
  const double a = w.width;
  const GamowExpansion low(p, w, std::max(40.0 / a, 1.5 * pi / a), opts.curve.rotated);
  if (low.residues().empty())
    throw NoCrossing("no resonance found");
  const ResidueTerm &first = low.residues().front();
  rep.gamma1_exact = first.resonance.width();
  rep.tau1 = first.resonance.lifetime();
  rep.gamma1_formula = 4.0 * pi * pi * pi / (w.opacity * a * w.opacity * a);
  rep.c1 = first.weight;
  rep.start_rate = exponential_start_rate(low);

  const Crossover cross = crossover_time(p, w);
  rep.t_star_theory = cross.t_star;
  rep.log_estimate = cross.log_estimate;
  rep.log10_lambda_power = -10.0 * std::log10(w.opacity);

  rep.exp_lo = opts.exp_lo * rep.tau1;
  rep.exp_hi = opts.exp_hi * rep.tau1;
  rep.tail_lo = opts.tail_lo * rep.t_star_theory;
  rep.tail_hi = opts.tail_hi * rep.t_star_theory;

  std::vector<double> times = geometric_times(rep.exp_lo, rep.tail_hi, opts.per_decade);
  for (double t : {0.0, rep.exp_hi, rep.tail_lo})
    times.push_back(t);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  rep.curve = nonescape_curve(p, times, w, opts.curve);

  rep.exponential = fit_exponential(rep.curve, rep.exp_lo, rep.exp_hi);
  rep.tail = fit_tail_exponent(rep.curve, rep.tail_lo, rep.tail_hi);

  const double lc = std::log(rep.exponential.intercept);
  const double la = std::log(rep.tail.amplitude);
  auto h = [&](double t) {
    return lc - rep.exponential.rate * t - (la + rep.tail.exponent * std::log(t));
  };
  double lo = rep.exp_lo, hi = rep.tail_hi;
  if (!(h(lo) > 0.0 && h(hi) < 0.0))
    throw NoCrossing("fitted exponential and tail branches do not cross");
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) > 0.0 ? lo : hi) = mid;
  }
  rep.t_star_measured = 0.5 * (lo + hi);
  rep.p_at_t_star =
      rep.exponential.intercept * std::exp(-rep.exponential.rate * rep.t_star_measured);
  if (rep.tail_lo <= rep.t_star_measured)
    throw WindowBeforeCrossover("tail window starts before the measured crossover");
  return rep;
}

} // namespace gamow
