#include "gamow/potential_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

namespace gamow {

namespace {

using cd = std::complex<double>;
constexpr double pi = std::numbers::pi;

class ZeroOnContour : public Error {
public:
  using Error::Error;
};

cd F(cd k, const Well &w) { return quantization_residual(k, w); }

Resonance make_resonance(cd k, const Well &w, int index) {
  if (!in_rotation_sector(k)) {
    std::string where = (k.real() < 0.0 && k.imag() < 0.0)
                            ? "third quadrant (growing state)"
                            : "outside -pi/4 < arg k < 0";
    throw WrongQuadrant("root k = (" + std::to_string(k.real()) + ", " +
                        std::to_string(k.imag()) + ") lies in the " + where);
  }
  Resonance r;
  r.index = index;
  r.k = ComplexWavenumber<double>(k);
  r.residual = std::abs(F(k, w));
  return r;
}

// Sum of arg increments of F along the straight segment z0 -> z1, bisecting
// until each sampled increment is below half a radian.
double arg_increment(const Well &w, cd z0, cd f0, cd z1, cd f1, double floor,
                     int depth) {
  const double d = std::arg(f1 / f0);
  if (std::abs(d) <= 0.5 || depth >= 52)
    return d;
  const cd zm = 0.5 * (z0 + z1);
  const cd fm = F(zm, w);
  if (std::abs(fm) < floor)
    throw ZeroOnContour("quantization function vanishes on the contour");
  return arg_increment(w, z0, f0, zm, fm, floor, depth + 1) +
         arg_increment(w, zm, fm, z1, f1, floor, depth + 1);
}

double path_winding(const Well &w, const std::vector<cd> &path, double floor) {
  double total = 0.0;
  std::vector<cd> values(path.size());
  for (std::size_t i = 0; i < path.size(); ++i) {
    values[i] = F(path[i], w);
    if (std::abs(values[i]) < floor)
      throw ZeroOnContour("quantization function vanishes on the contour");
  }
  for (std::size_t i = 0; i + 1 < path.size(); ++i)
    total += arg_increment(w, path[i], values[i], path[i + 1], values[i + 1],
                           floor, 0);
  return total;
}

void append_segment(std::vector<cd> &path, cd from, cd to, int points) {
  for (int j = 0; j < points; ++j)
    path.push_back(from + (to - from) * (double(j) / points));
}

// Counterclockwise boundary of [x0, x1] x [y0, y1] (y1 <= 0). When the
// rectangle touches the origin at its upper-left corner, the corner is
// replaced by a quarter circle of radius `indent` inside the fourth quadrant.
int rectangle_winding(const Well &w, double x0, double x1, double y0, double y1,
                      double indent, int total_points = 4096) {
  const bool at_origin = (x0 == 0.0 && y1 == 0.0);
  const double perimeter = 2.0 * ((x1 - x0) + (y1 - y0));
  // F turns like e^{ika} along the edges; coarser sampling aliases.
  total_points = std::max(total_points, int(std::ceil(8.0 * perimeter * w.width)));
  auto share = [&](double len) {
    return std::max(16, int(std::ceil(total_points * len / perimeter)));
  };
  std::vector<cd> path;
  path.reserve(total_points + 200);
  append_segment(path, {x0, y0}, {x1, y0}, share(x1 - x0));
  append_segment(path, {x1, y0}, {x1, y1}, share(y1 - y0));
  if (at_origin) {
    append_segment(path, {x1, 0.0}, {indent, 0.0}, share(x1 - x0));
    const int arc = 64;
    for (int j = 0; j < arc; ++j)
      path.push_back(std::polar(indent, -0.5 * pi * double(j) / arc));
    append_segment(path, {0.0, -indent}, {0.0, y0}, share(y1 - y0));
  } else {
    append_segment(path, {x1, y1}, {x0, y1}, share(x1 - x0));
    append_segment(path, {x0, y1}, {x0, y0}, share(y1 - y0));
  }
  path.push_back(path.front());

  // Floor for "F vanishes here"; F ~ (1+lambda) k a near the origin.
  const double floor = 1e-15 * std::max(1.0, (1.0 + w.opacity) * indent * w.width);
  const double turns = path_winding(w, path, floor) / (2.0 * pi);
  return int(std::lround(turns));
}

bool contains(const std::vector<cd> &roots, cd k) {
  return std::any_of(roots.begin(), roots.end(), [&](cd r) {
    return std::abs(r - k) < 1e-8 * std::max(1.0, std::abs(k));
  });
}

ComplexWavenumber<double> large_wavenumber_seed(int n, const Well &w) {
  // e^{2ika} ~ -2i ka / lambda once |Im ka| is large.
  cd ka((n - 0.25) * pi, 0.0);
  for (int it = 0; it < 4; ++it) {
    const double depth = std::max(0.1, std::log(2.0 * std::abs(ka) / w.opacity));
    ka = cd((n - 0.25) * pi, -0.5 * depth);
  }
  return ka / w.width;
}

std::optional<cd> newton_root(cd seed, const Well &w) {
  try {
    return refine_pole(seed, w).k.value();
  } catch (const NoConvergence &) {
    return std::nullopt;
  } catch (const WrongQuadrant &) {
    return std::nullopt;
  }
}

// Argument-principle bisection; appends zeros found in the rectangle.
void locate_by_subdivision(const Well &w, double x0, double x1, double y0,
                           double y1, double indent, std::vector<cd> &found,
                           int depth) {
  int count = 0;
  try {
    count = rectangle_winding(w, x0, x1, y0, y1, indent, 512);
  } catch (const ZeroOnContour &) {
    // Shift the box slightly and retry.
    const double dx = 1e-7 * (x1 - x0);
    locate_by_subdivision(w, x0, x1 + dx, y0 - dx, y1, indent, found, depth + 1);
    return;
  }
  if (count <= 0 || depth > 60)
    return;
  const double wx = x1 - x0, wy = y1 - y0;
  if (count == 1) {
    const cd centre(0.5 * (x0 + x1), 0.5 * (y0 + y1));
    if (auto r = newton_root(centre, w)) {
      const double mx = 1e-9 * std::max(1.0, wx), my = 1e-9 * std::max(1.0, wy);
      if (r->real() >= x0 - mx && r->real() <= x1 + mx && r->imag() >= y0 - my &&
          r->imag() <= y1 + my) {
        if (!contains(found, *r))
          found.push_back(*r);
        return;
      }
    }
  }
  if (wx >= wy) {
    const double xm = x0 + 0.47 * wx;
    locate_by_subdivision(w, x0, xm, y0, y1, indent, found, depth + 1);
    locate_by_subdivision(w, xm, x1, y0, y1, 0.0, found, depth + 1);
  } else {
    const double ym = y0 + 0.53 * wy;
    locate_by_subdivision(w, x0, x1, y0, ym, 0.0, found, depth + 1);
    locate_by_subdivision(w, x0, x1, ym, y1, indent, found, depth + 1);
  }
}

} // namespace

ComplexWavenumber<double> asymptotic_pole_seed(int n, const Well &w) {
  w.validate();
  if (n < 1)
    throw PreconditionViolated("pole index must be positive");
  const double npi = n * pi;
  if (!(npi < w.opacity))
    throw SeedOutOfRegime("asymptotic seed requires n*pi < opacity");
  const double re = npi * w.opacity / (1.0 + w.opacity);
  const double im = -(npi / w.opacity) * (npi / w.opacity);
  return ComplexWavenumber<double>(cd(re, im) / w.width);
}

Resonance refine_pole(ComplexWavenumber<double> seed, const Well &w, int index,
                      const NewtonOptions &opts) {
  w.validate();
  cd k = seed;
  cd f = F(k, w);
  auto converged = [&](cd kk, cd ff) {
    return std::abs(ff) < opts.tolerance * std::max(1.0, std::abs(kk * w.width));
  };
  int it = 0;
  while (!converged(k, f)) {
    if (it++ >= opts.max_iterations)
      throw NoConvergence("Newton refinement did not converge in " +
                          std::to_string(opts.max_iterations) + " iterations");
    const cd d = quantization_derivative(k, w);
    if (d == cd(0.0))
      throw NoConvergence("vanishing derivative during Newton refinement");
    const cd step = f / d;
    double damping = 1.0;
    cd kn = k - step;
    cd fn = F(kn, w);
    for (int h = 0; h < 30 && !(std::abs(fn) < std::abs(f)); ++h) {
      damping *= 0.5;
      kn = k - damping * step;
      fn = F(kn, w);
    }
    if (!std::isfinite(kn.real()) || !std::isfinite(kn.imag()))
      throw NoConvergence("Newton iterate left the finite plane");
    k = kn;
    f = fn;
  }
  return make_resonance(k, w, index);
}

double pole_depth_bound(const Well &w, double re_max) {
  // On F(k) = 0 with Im k = -y: |k|a >= lambda sinh(ya) e^{ya}, so
  // e^{2ya} <= 1 + 2|k|a/lambda.
  const double a = w.width;
  double y = 1.0 / a;
  for (int it = 0; it < 8; ++it)
    y = std::log1p(2.0 * (re_max + y) * a / w.opacity) / (2.0 * a);
  return y + 1.0 / a;
}

int quantization_winding_number(const Well &w, double re_max, double im_max,
                                double indent) {
  w.validate();
  try {
    return rectangle_winding(w, 0.0, re_max, -im_max, 0.0, indent);
  } catch (const ZeroOnContour &e) {
    throw CountMismatch(e.what());
  }
}

std::vector<Resonance> enumerate_poles(const Well &w, double k_max) {
  w.validate();
  const double a = w.width;
  // Below pi / a the list is simply empty (first pole near pi / a).
  if (!(k_max > 0.0) || !std::isfinite(k_max))
    throw PreconditionViolated("k_max must be finite and > 0");

  double re_max = k_max;
  double im_max = pole_depth_bound(w, re_max);
  int count = -1;
  for (int attempt = 0; attempt < 8 && count < 0; ++attempt) {
    try {
      count = rectangle_winding(w, 0.0, re_max, -im_max, 0.0, 1e-6);
    } catch (const ZeroOnContour &) {
      re_max *= 1.0 + 1e-7;
    }
  }
  if (count < 0)
    throw CountMismatch("argument-principle contour keeps hitting a zero");

  std::vector<cd> roots;
  const double spacing = pi * w.opacity / ((1.0 + w.opacity) * a);
  int failures = 0;
  for (int n = 1; n <= 4 * count + 16; ++n) {
    cd seed;
    if (n * pi < 0.5 * w.opacity)
      seed = asymptotic_pole_seed(n, w);
    else if (roots.size() >= 2)
      seed = 2.0 * roots[roots.size() - 1] - roots[roots.size() - 2];
    else if (roots.size() == 1)
      seed = roots.back() + spacing;
    else
      seed = large_wavenumber_seed(n, w);

    auto r = newton_root(seed, w);
    if (!r || contains(roots, *r)) {
      if (++failures > 3)
        break;
      continue;
    }
    roots.push_back(*r);
    if (r->real() >= re_max)
      break;
  }
  std::erase_if(roots, [&](cd k) { return !(k.real() < re_max); });

  if (int(roots.size()) != count) {
    std::vector<cd> found;
    locate_by_subdivision(w, 0.0, re_max, -im_max, 0.0, 1e-6, found, 0);
    for (cd k : found)
      if (k.real() < re_max && !contains(roots, k))
        roots.push_back(k);
  }
  if (int(roots.size()) != count)
    throw CountMismatch("argument principle counts " + std::to_string(count) +
                        " poles below Re k = " + std::to_string(k_max) +
                        ", found " + std::to_string(roots.size()));

  std::sort(roots.begin(), roots.end(),
            [](cd l, cd r) { return l.real() < r.real(); });
  std::vector<Resonance> out;
  out.reserve(roots.size());
  for (std::size_t i = 0; i < roots.size(); ++i)
    out.push_back(make_resonance(roots[i], w, int(i) + 1));
  return out;
}

} // namespace gamow
