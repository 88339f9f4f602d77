#include "gamow/spectral_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gamow/quadrature.hpp"

namespace gamow {

namespace {

constexpr double pi = std::numbers::pi;
using cd = std::complex<double>;

// C-infinity step from 1 (s <= 0) to 0 (s >= 1).
double smooth_window(double s) {
  if (s <= 0.0)
    return 1.0;
  if (s >= 1.0)
    return 0.0;
  const double l = std::exp(-1.0 / s);
  const double r = std::exp(-1.0 / (1.0 - s));
  return r / (l + r);
}

// |phi(k)| |A(k)|^2 / 2pi away from resonance peaks, for real k.
double off_resonance_envelope(const SpectralDensity &phi, double k, const Well &w) {
  const double ka = k * w.width;
  const double lam = w.opacity;
  const double amp = ka > 2.0 * lam ? (ka / (ka - lam)) * (ka / (ka - lam)) : 4.0;
  return phi.profile().envelope_constant() / (k * k) * 4.0 * amp / (2.0 * pi);
}

bool is_uniform_from_zero(std::span<const double> x, double &h) {
  if (x.size() < 2 || x[0] != 0.0)
    return false;
  h = x[1] - x[0];
  if (!(h > 0.0))
    return false;
  for (std::size_t i = 1; i < x.size(); ++i)
    if (std::abs(x[i] - double(i) * h) > 1e-12 * std::max(1.0, x[i]))
      return false;
  return true;
}

// out_j = sin(k x_j) for real k, by rotation when the grid is uniform.
struct SineBasis {
  std::span<const double> x;
  bool uniform = false;
  double h = 0.0;

  explicit SineBasis(std::span<const double> xs) : x(xs) {
    uniform = is_uniform_from_zero(x, h);
  }

  void operator()(cd kc, Eigen::Ref<Eigen::VectorXcd> out) const {
    const double k = kc.real();
    if (!uniform) {
      for (std::size_t j = 0; j < x.size(); ++j)
        out(Eigen::Index(j)) = std::sin(k * x[j]);
      return;
    }
    const cd step = std::polar(1.0, k * h);
    cd z = 1.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (j % 32 == 0)
        z = std::polar(1.0, k * double(j) * h);
      out(Eigen::Index(j)) = z.imag();
      z *= step;
    }
  }
};

// Breakpoints on [0, k_end]: resonance panels around sharp poles, then
// pieces short enough that the chirp and the sin(kx) factors turn by a few
// radians at most.
std::vector<double> direct_edges(const std::vector<Resonance> &poles, double k_end,
                                 double t, double x_span, const Well &w) {
  std::vector<double> marks{0.0, k_end};
  const double sharp = 0.25 * pi / w.width;
  for (const auto &r : poles) {
    const double re = r.k.real();
    const double g = std::abs(r.k.imag());
    if (re >= k_end)
      continue;
    if (50.0 * g < sharp) {
      for (double m : {1.0, 4.0, 16.0, 50.0}) {
        marks.push_back(re - m * g);
        marks.push_back(re + m * g);
      }
    }
    marks.push_back(re);
  }
  std::erase_if(marks, [&](double m) { return m < 0.0 || m > k_end; });
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

  const double base_rate = x_span + 4.0 * w.width;
  std::vector<double> edges;
  edges.reserve(marks.size() * 2);
  for (std::size_t i = 0; i + 1 < marks.size(); ++i) {
    double cur = marks[i];
    edges.push_back(cur);
    while (true) {
      double len = 6.0 / (2.0 * cur * std::abs(t) + base_rate);
      len = 6.0 / (2.0 * (cur + len) * std::abs(t) + base_rate);
      if (cur + len >= marks[i + 1] * (1.0 - 1e-14))
        break;
      cur += len;
      edges.push_back(cur);
    }
  }
  edges.push_back(marks.back());
  return edges;
}

void check_grid(const Eigen::VectorXd &grid, double lo, double hi) {
  if (grid.size() == 0)
    throw PreconditionViolated("empty spatial grid");
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    if (!(grid(i) >= lo - 1e-12 * std::max(1.0, hi) &&
          grid(i) <= hi + 1e-12 * std::max(1.0, hi)))
      throw PreconditionViolated("grid point outside the admissible range");
    if (i > 0 && !(grid(i) > grid(i - 1)))
      throw PreconditionViolated("grid must be strictly ascending");
  }
}

} // namespace

std::string to_string(Method m) {
  switch (m) {
  case Method::direct:
    return "direct";
  case Method::rotated:
    return "rotated";
  case Method::asymptotic:
    return "asymptotic";
  }
  return "unknown";
}

Eigen::VectorXd well_grid(const Well &w, int nodes) {
  if (nodes < 2)
    throw PreconditionViolated("grid needs at least two nodes");
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(nodes, 0.0, w.width);
  x(nodes - 1) = w.width;
  return x;
}

void check_compatible(const InitialProfile &p, const Well &w) {
  w.validate();
  if (std::abs(p.width() - w.width) > 1e-12 * w.width)
    throw InvalidParameters("profile width differs from the well width");
}

WaveState initial_state(const InitialProfile &p, const Eigen::VectorXd &grid) {
  WaveState ws;
  ws.x = grid;
  ws.psi = p.sample(grid);
  ws.t = 0.0;
  ws.method = Method::direct;
  return ws;
}

std::complex<double> continuum_eigenfunction(double k, double x, const Well &w) {
  if (!(k > 0.0))
    throw PreconditionViolated("continuum eigenfunction needs k > 0");
  if (x < 0.0)
    throw PreconditionViolated("x must be >= 0");
  const cd kc(k, 0.0);
  const double norm = 1.0 / std::sqrt(2.0 * pi);
  if (x < w.width)
    return norm * coefficient_A(kc, w) * std::sin(k * x);
  const cd i(0.0, 1.0);
  return norm * (std::exp(-i * k * x) + coefficient_B(kc, w) * std::exp(i * k * x));
}

DirectCutoff direct_cutoff(const SpectralDensity &phi, double t, const Well &w,
                           const DirectOptions &opts) {
  const double a = w.width;
  const double lam = w.opacity;
  const double cap = phi.profile().kind() == ProfileKind::box_mode
                         ? opts.k_cap
                         : opts.k_cap_quadrature;
  const double tt = std::abs(t);
  const double M = phi.profile().envelope_constant();
  DirectCutoff c;
  if (tt > 0.0) {
    // Components with 2kt < a few a are still inside the well at time t.
    c.k_cut = std::max({40.0 / a, 12.0 / std::sqrt(tt), 4.0 * a / tt});
    c.k_cut = std::min(c.k_cut, cap);
    c.window = 0.25 * c.k_cut;
    const double turn = 2.0 * c.k_cut * tt * c.window;
    if (turn > 50.0) {
      c.truncation_estimate = off_resonance_envelope(phi, c.k_cut, w) /
                              (2.0 * c.k_cut * tt) * std::exp(-std::sqrt(turn));
      return c;
    }
  }
  // Hard cutoff: int_K^inf of the envelope, (2M/pi) a / (Ka - lambda).
  c.window = 0.0;
  double K = std::max(40.0 / a, 2.0 * lam / a);
  auto bound = [&](double k) { return (2.0 * M / pi) * a / (k * a - lam); };
  while (bound(K) > opts.tail_tol && K < cap)
    K = std::min(cap, 1.25 * K);
  c.k_cut = K;
  c.truncation_estimate = bound(K);
  return c;
}

namespace {

template <typename Basis>
KernelResult direct_kernel(const SpectralDensity &phi, double t, const Well &w,
                           const DirectOptions &opts, double x_span,
                           Eigen::Index points, Basis &&basis,
                           EvolutionDiagnostics *diag) {
  check_compatible(phi.profile(), w);
  const DirectCutoff cut = direct_cutoff(phi, t, w, opts);
  const double k_end = cut.k_cut + cut.window;
  const double a = w.width;
  const double k_sharp = std::min(k_end, 3.0 * w.opacity / a + 40.0 / a);
  const auto poles = enumerate_poles(w, std::max(k_sharp, 1.01 * pi / a));
  const auto edges = direct_edges(poles, k_end, t, x_span, w);

  auto weight = [&](double k) -> KernelNode {
    const double chi = cut.window > 0.0
                           ? smooth_window((k - cut.k_cut) / cut.window)
                           : 1.0;
    if (chi == 0.0 || k == 0.0)
      return {0.0, k};
    const cd kc(k, 0.0);
    const double a2 = std::norm(coefficient_A(kc, w));
    const cd chirp = std::polar(1.0, -k * k * t);
    return {chirp * phi(kc) * (a2 * chi / (2.0 * pi)), kc};
  };
  auto r = integrate_kernel(weight, basis, points, std::span<const double>(edges),
                            opts.abs_tol, opts.max_depth);
  if (diag) {
    diag->k_cutoff = k_end;
    diag->truncation_estimate = cut.truncation_estimate;
    diag->quadrature_error = r.error;
    diag->evaluations = r.evaluations;
  }
  if (!r.converged && opts.throw_on_failure)
    throw QuadratureNotConverged("direct spectral integral", r.error);
  return r;
}

} // namespace

Eigen::VectorXcd spectral_integral(const SpectralDensity &phi, double t,
                                   std::span<const double> x, const Well &w,
                                   const DirectOptions &opts,
                                   EvolutionDiagnostics *diag) {
  double x_span = 0.0;
  for (double xi : x)
    x_span = std::max(x_span, std::abs(xi));
  return direct_kernel(phi, t, w, opts, x_span, Eigen::Index(x.size()),
                       SineBasis(x), diag)
      .value;
}

Eigen::Vector2cd boundary_trace_direct(const SpectralDensity &phi, double t,
                                       const Well &w, const DirectOptions &opts,
                                       EvolutionDiagnostics *diag) {
  const double a = w.width;
  auto basis = [a](cd kc, Eigen::Ref<Eigen::VectorXcd> out) {
    const double k = kc.real();
    out(0) = std::sin(k * a);
    out(1) = k * std::cos(k * a);
  };
  return direct_kernel(phi, t, w, opts, a, 2, basis, diag).value;
}

WaveState evolve_direct(const InitialProfile &p, double t,
                        const Eigen::VectorXd &grid, const Well &w,
                        const DirectOptions &opts) {
  check_compatible(p, w);
  if (!(t >= 0.0))
    throw PreconditionViolated("evolve_direct needs t >= 0");
  check_grid(grid, 0.0, w.width);
  WaveState ws;
  ws.x = grid;
  ws.t = t;
  ws.method = Method::direct;
  const SpectralDensity phi(p);
  ws.psi = spectral_integral(phi, t, std::span<const double>(grid.data(), grid.size()),
                             w, opts, &ws.diagnostics);
  if (t > 50.0 * w.width * w.width)
    ws.diagnostics.warnings.push_back(
        "direct method at t > 50 a^2: cost grows linearly in t, rotated "
        "contour preferred");
  return ws;
}

WaveState evolve_direct_exterior(const InitialProfile &p, double t,
                                 const Eigen::VectorXd &grid, const Well &w,
                                 const DirectOptions &opts) {
  check_compatible(p, w);
  if (!(t >= 0.0))
    throw PreconditionViolated("evolve_direct_exterior needs t >= 0");
  check_grid(grid, w.width, std::numeric_limits<double>::infinity());
  const SpectralDensity phi(p);
  const DirectCutoff cut = direct_cutoff(phi, t, w, opts);
  const double k_end = cut.k_cut + cut.window;
  const double a = w.width;
  const double k_sharp = std::min(k_end, 3.0 * w.opacity / a + 40.0 / a);
  const auto poles = enumerate_poles(w, std::max(k_sharp, 1.01 * pi / a));
  const std::span<const double> x(grid.data(), grid.size());
  const auto edges = direct_edges(poles, k_end, t, grid.maxCoeff(), w);

  // phi_k^*(x') integrated against psi(x', 0) gives conj(A(k)) phi(k) / sqrt(2 pi).
  auto weight = [&](double k) -> KernelNode {
    const double chi = cut.window > 0.0
                           ? smooth_window((k - cut.k_cut) / cut.window)
                           : 1.0;
    if (chi == 0.0 || k == 0.0)
      return {0.0, k};
    const cd kc(k, 0.0);
    const cd chirp = std::polar(1.0, -k * k * t);
    return {chirp * phi(kc) * std::conj(coefficient_A(kc, w)) * (chi / (2.0 * pi)),
            kc};
  };
  auto basis = [&](cd kc, Eigen::Ref<Eigen::VectorXcd> out) {
    const double k = kc.real();
    const cd b = coefficient_B(kc, w);
    for (std::size_t j = 0; j < x.size(); ++j)
      out(Eigen::Index(j)) = std::polar(1.0, -k * x[j]) + b * std::polar(1.0, k * x[j]);
  };
  auto r = integrate_kernel(weight, basis, Eigen::Index(x.size()),
                            std::span<const double>(edges), opts.abs_tol,
                            opts.max_depth);
  if (!r.converged && opts.throw_on_failure)
    throw QuadratureNotConverged("exterior spectral integral", r.error);
  WaveState ws;
  ws.x = grid;
  ws.t = t;
  ws.method = Method::direct;
  ws.psi = r.value;
  ws.diagnostics.k_cutoff = k_end;
  ws.diagnostics.truncation_estimate = cut.truncation_estimate;
  ws.diagnostics.quadrature_error = r.error;
  ws.diagnostics.evaluations = r.evaluations;
  return ws;
}

double norm_inside(const WaveState &ws, const Well &w) {
  const double a = w.width;
  std::vector<double> xs, dens;
  for (Eigen::Index i = 0; i < ws.x.size(); ++i) {
    if (ws.x(i) >= -1e-12 * a && ws.x(i) <= a * (1.0 + 1e-12)) {
      xs.push_back(ws.x(i));
      dens.push_back(std::norm(ws.psi(i)));
    }
  }
  if (xs.size() < 64)
    throw GridTooCoarse("norm_inside needs at least 64 nodes in [0, a]");
  if (xs.front() > 1e-12 * a || xs.back() < a * (1.0 - 1e-12))
    throw GridTooCoarse("grid does not cover [0, a]");
  const std::size_t n = xs.size();
  const double h = (xs.back() - xs.front()) / double(n - 1);
  bool uniform = true;
  for (std::size_t i = 1; i < n && uniform; ++i)
    uniform = std::abs((xs[i] - xs[i - 1]) - h) < 1e-9 * h;
  if (uniform && n % 2 == 1)
    return simpson(Eigen::Map<const Eigen::VectorXd>(dens.data(), Eigen::Index(n)), h);
  double s = 0.0;
  for (std::size_t i = 1; i < n; ++i)
    s += 0.5 * (xs[i] - xs[i - 1]) * (dens[i] + dens[i - 1]);
  return s;
}

} // namespace gamow
