#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace gamow {

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussLegendreRule &gauss_legendre(int n);

namespace gk15 {
// Kronrod abscissae (descending, last is the centre) and weights; the
// embedded 7-point Gauss rule uses the odd-indexed abscissae.
inline constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

/// QUADPACK-style error scaling of the raw Gauss/Kronrod difference.
inline double scaled_error(double raw, double resabs) {
  if (resabs <= 0.0 || raw == 0.0)
    return raw;
  return resabs * std::min(1.0, std::pow(200.0 * raw / resabs, 1.5));
}
} // namespace gk15

template <typename T> struct QuadratureResult {
  T value{};
  double error = 0.0;
  bool converged = true;
  long evaluations = 0;
};

namespace detail {

template <typename T, typename F>
void adaptive_gk15(F &f, double a, double b, double tol_density, int depth,
                   int max_depth, QuadratureResult<T> &out) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const T fc = f(centre);
  T kronrod = gk15::wgk[7] * fc;
  T gauss = gk15::wg[3] * fc;
  double resabs = gk15::wgk[7] * std::abs(fc);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * gk15::xgk[j];
    const T f1 = f(centre - dx);
    const T f2 = f(centre + dx);
    kronrod += gk15::wgk[j] * (f1 + f2);
    resabs += gk15::wgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1)
      gauss += gk15::wg[j / 2] * (f1 + f2);
  }
  out.evaluations += 15;
  kronrod *= half;
  gauss *= half;
  resabs *= std::abs(half);
  const double err = gk15::scaled_error(std::abs(kronrod - gauss), resabs);
  const double allowed = tol_density * std::abs(b - a);
  if (err <= allowed || depth >= max_depth) {
    out.value += kronrod;
    out.error += err;
    if (err > allowed)
      out.converged = false;
    return;
  }
  adaptive_gk15<T>(f, a, centre, tol_density, depth + 1, max_depth, out);
  adaptive_gk15<T>(f, centre, b, tol_density, depth + 1, max_depth, out);
}

} // namespace detail

/// Adaptive Gauss-Kronrod (7/15) for scalar or complex integrands over the
/// breakpoints `edges` (ascending). The absolute tolerance is shared among
/// panels in proportion to their length.
template <typename T, typename F>
QuadratureResult<T> integrate_adaptive(F &&f, std::span<const double> edges,
                                       double abs_tol, int max_depth = 40) {
  QuadratureResult<T> out;
  if (edges.size() < 2)
    return out;
  const double total = std::abs(edges.back() - edges.front());
  if (total == 0.0)
    return out;
  const double density = abs_tol / total;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    if (edges[i + 1] != edges[i])
      detail::adaptive_gk15<T>(f, edges[i], edges[i + 1], density, 0, max_depth,
                               out);
  return out;
}

template <typename T, typename F>
QuadratureResult<T> integrate_adaptive(F &&f, double a, double b,
                                       double abs_tol, int max_depth = 40) {
  const std::array<double, 2> edges{a, b};
  return integrate_adaptive<T>(std::forward<F>(f), std::span<const double>(edges),
                               abs_tol, max_depth);
}

/// Vector-valued integral  out_j = int w(u) basis_j(k(u)) du  over the
/// breakpoints `edges`, adaptive on the sup-norm over j.
///
/// `weight(u)` returns the complex weight at parameter u and the complex
/// wavenumber at which the basis is sampled; `basis(k, out)` fills out_j.
/// Panels between consecutive edges are grouped into fixed blocks whose
/// partial sums are added in order, so the result does not depend on the
/// number of worker threads.
struct KernelNode {
  std::complex<double> weight;
  std::complex<double> k;
};

struct KernelResult {
  Eigen::VectorXcd value;
  double error = 0.0;
  bool converged = true;
  long evaluations = 0;
};

namespace detail {

template <typename W, typename B>
void adaptive_kernel(W &weight, B &basis, double a, double b,
                     double tol_density, int depth, int max_depth,
                     KernelResult &out, Eigen::MatrixXcd &values) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<KernelNode, 15> nodes;
  Eigen::Matrix<double, 15, 1> wk, wg7;
  nodes[0] = weight(centre);
  wk(0) = gk15::wgk[7];
  wg7(0) = gk15::wg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * gk15::xgk[j];
    nodes[1 + 2 * j] = weight(centre - dx);
    nodes[2 + 2 * j] = weight(centre + dx);
    wk(1 + 2 * j) = wk(2 + 2 * j) = gk15::wgk[j];
    wg7(1 + 2 * j) = wg7(2 + 2 * j) = (j % 2 == 1) ? gk15::wg[j / 2] : 0.0;
  }
  out.evaluations += 15;

  Eigen::Matrix<std::complex<double>, 15, 1> ck, cg;
  double resabs = 0.0;
  for (int q = 0; q < 15; ++q) {
    if (nodes[q].weight == 0.0) {
      values.col(q).setZero();
    } else {
      basis(nodes[q].k, values.col(q));
    }
    ck(q) = wk(q) * nodes[q].weight * half;
    cg(q) = wg7(q) * nodes[q].weight * half;
    if (nodes[q].weight != 0.0)
      resabs += std::abs(ck(q)) * std::sqrt(values.col(q).cwiseAbs2().maxCoeff());
  }
  Eigen::VectorXcd kron = values * ck;
  const double raw = (kron - values * cg).cwiseAbs().maxCoeff();
  const double err = gk15::scaled_error(raw, resabs);
  const double allowed = tol_density * std::abs(b - a);
  if (err <= allowed || depth >= max_depth) {
    out.value += kron;
    out.error += err;
    if (err > allowed)
      out.converged = false;
    return;
  }
  adaptive_kernel(weight, basis, a, centre, tol_density, depth + 1, max_depth,
                  out, values);
  adaptive_kernel(weight, basis, centre, b, tol_density, depth + 1, max_depth,
                  out, values);
}

} // namespace detail

/// Runs `task(i)` for i in [0, n) on up to worker_count() threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &task);

template <typename W, typename B>
KernelResult integrate_kernel(W &&weight, B &&basis, Eigen::Index points,
                              std::span<const double> edges, double abs_tol,
                              int max_depth = 40) {
  KernelResult out;
  out.value = Eigen::VectorXcd::Zero(points);
  if (edges.size() < 2 || points == 0)
    return out;
  const double total = std::abs(edges.back() - edges.front());
  if (total == 0.0)
    return out;
  const double density = abs_tol / total;
  constexpr std::size_t block = 64;
  const std::size_t panels = edges.size() - 1;
  const std::size_t blocks = (panels + block - 1) / block;
  std::vector<KernelResult> partial(blocks);
  parallel_for(blocks, [&](std::size_t b) {
    KernelResult &r = partial[b];
    r.value = Eigen::VectorXcd::Zero(points);
    Eigen::MatrixXcd values(points, 15);
    const std::size_t last = std::min(panels, (b + 1) * block);
    for (std::size_t i = b * block; i < last; ++i)
      if (edges[i + 1] != edges[i])
        detail::adaptive_kernel(weight, basis, edges[i], edges[i + 1], density,
                                0, max_depth, r, values);
  });
  for (const auto &r : partial) {
    out.value += r.value;
    out.error += r.error;
    out.converged = out.converged && r.converged;
    out.evaluations += r.evaluations;
  }
  return out;
}

/// Number of worker threads: GAMOW_LAB_THREADS if set, else the hardware count.
int worker_count();

/// Composite Simpson on equally spaced samples (odd count >= 3).
template <typename Derived>
double simpson(const Eigen::DenseBase<Derived> &samples, double h) {
  const Eigen::Index n = samples.size();
  double s = samples(0) + samples(n - 1);
  for (Eigen::Index i = 1; i + 1 < n; ++i)
    s += (i % 2 == 1 ? 4.0 : 2.0) * samples(i);
  return s * h / 3.0;
}

} // namespace gamow
