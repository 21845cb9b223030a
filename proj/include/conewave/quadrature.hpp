#pragma once

// Riemann-sum spacetime norms: midpoint samples in time, the uniform
// sampler grid in space. Every norm in the library is defined by these sums.

#include <algorithm>
#include <cmath>
#include <optional>
#include <type_traits>
#include <utility>
#include <span>
#include <vector>

#include "conewave/errors.hpp"
#include "conewave/geometry.hpp"
#include "conewave/sampler.hpp"
#include "conewave/wave.hpp"

namespace conewave {

/// Time samples t_s = -T + (s + 1/2) dt covering [-T, T]; space sampled on
/// the M^n grid of the torus of side L.
template <int Dim>
struct QuadratureScheme {
  double window = 16.0;
  double dt = 0.25;
  double box_length = 64.0;
  int points = 256;

  void validate() const {
    if (!(dt > 0.0 && dt <= 0.25 + 1e-15)) throw Error("time step must lie in (0, 1/4]");
    if (!(window > 0.0)) throw Error("time window must be positive");
    const double steps = 2.0 * window / dt;
    if (std::abs(steps - std::round(steps)) > 1e-9)
      throw Error("time step must divide the window length");
    if (points < 2) throw Error("spatial grid too small");
  }

  int time_samples() const { return static_cast<int>(std::lround(2.0 * window / dt)); }
  double time(int s) const { return -window + (s + 0.5) * dt; }
  double step() const { return box_length / points; }
  double cell_volume() const { return std::pow(step(), Dim); }

  /// Scheme whose grid holds the products of waves with the given support
  /// spans exactly (M >= sum of spans) and has step <= max_step.
  static QuadratureScheme for_spans(double window, double dt, double box_length,
                                    int total_span, double max_step = 0.25) {
    QuadratureScheme q{window, dt, box_length,
                       fast_grid_points(box_length, max_step, total_span)};
    q.validate();
    return q;
  }
};

/// Scheme exact for |phi psi|^2 given the two waves.
template <int Dim>
QuadratureScheme<Dim> scheme_for(const SpectralWave<Dim>& phi, const SpectralWave<Dim>& psi,
                                 double window, double dt, double max_step = 0.25) {
  return QuadratureScheme<Dim>::for_spans(window, dt, phi.lattice().box_length(),
                                          support_span(phi) + support_span(psi), max_step);
}

/// Visits every grid point (flat index and position) of a sampler grid that
/// lies in the axis box [lo, hi] (positions, not wrapped), with wrap-around.
template <int Dim, class Fn>
void for_each_grid_point_in_box(const QuadratureScheme<Dim>& q, const Vec<Dim>& lo,
                                const Vec<Dim>& hi, Fn&& fn) {
  const double h = q.step();
  Index<Dim> a, b;
  for (int i = 0; i < Dim; ++i) {
    a[i] = static_cast<int>(std::ceil(lo[i] / h - 1e-9));
    b[i] = static_cast<int>(std::floor(hi[i] / h + 1e-9));
    if (b[i] - a[i] + 1 > q.points) {
      a[i] = 0;
      b[i] = q.points - 1;
    }
    if (b[i] < a[i]) return;
  }
  Index<Dim> j = a;
  while (true) {
    std::size_t flat = 0;
    Vec<Dim> x;
    for (int i = 0; i < Dim; ++i) {
      const int w = positive_mod(j[i], q.points);
      flat = flat * static_cast<std::size_t>(q.points) + static_cast<std::size_t>(w);
      x[i] = w * h;
    }
    fn(flat, x);
    int axis = Dim - 1;
    while (axis >= 0 && j[axis] == b[axis]) {
      j[axis] = a[axis];
      --axis;
    }
    if (axis < 0) break;
    ++j[axis];
  }
}

/// Calls fn(flat) for grid points of the slice at time t inside the tube.
template <int Dim, class Fn>
void for_each_tube_point(const QuadratureScheme<Dim>& q, const Tube<Dim>& tube, double t,
                         Fn&& fn) {
  if (tube.is_finite() && std::abs(t - tube.t0) > tube.half_length() + kGeometryTolerance) return;
  const Vec<Dim> c = tube.axis_point(t);
  const double r = tube.effective_radius();
  Vec<Dim> lo = c, hi = c;
  for (int i = 0; i < Dim; ++i) {
    lo[i] -= r;
    hi[i] += r;
  }
  const SpacetimePoint<Dim> base{t, {}};
  for_each_grid_point_in_box<Dim>(q, lo, hi, [&](std::size_t flat, const Vec<Dim>& x) {
    SpacetimePoint<Dim> p = base;
    p.x = x;
    if (tube_contains(tube, p, q.box_length)) fn(flat);
  });
}

/// 1 where the grid point of slice t lies in the region.
template <int Dim>
void rasterize_region(const QuadratureScheme<Dim>& q, const Region<Dim>& region, double t,
                      std::vector<unsigned char>& mask) {
  const std::size_t size = static_cast<std::size_t>(std::pow(q.points, Dim) + 0.5);
  mask.assign(size, 0);
  if (!region.contains_time(t)) return;
  if (region.cube) {
    const auto& cube = *region.cube;
    if (std::abs(t - cube.center.t) > 0.5 * cube.side + kGeometryTolerance) return;
    Vec<Dim> lo = cube.center.x, hi = cube.center.x;
    for (int i = 0; i < Dim; ++i) {
      lo[i] -= 0.5 * cube.side;
      hi[i] += 0.5 * cube.side;
    }
    for_each_grid_point_in_box<Dim>(q, lo, hi, [&](std::size_t flat, const Vec<Dim>& x) {
      if (cube_contains(cube, SpacetimePoint<Dim>{t, x}, q.box_length)) mask[flat] = 1;
    });
  } else {
    std::fill(mask.begin(), mask.end(), 1);
  }
  for (const auto& tube : region.excluded)
    for_each_tube_point<Dim>(q, tube, t, [&](std::size_t flat) { mask[flat] = 0; });
}

/// Per-slice spatial integrals
///   out[i][r][s] = h^n * sum_{x in R_r(t_s)} |phi(t_s, x)|^2 |psi_i(t_s, x)|^2.
/// phi is sampled once per slice and reused for every psi and region.
template <int Dim>
std::vector<std::vector<std::vector<double>>> product_slice_integrals(
    const SpectralWave<Dim>& phi, std::span<const SpectralWave<Dim>> psis,
    std::span<const Region<Dim>> regions, const QuadratureScheme<Dim>& q) {
  q.validate();
  const int slices = q.time_samples();
  std::vector<std::vector<std::vector<double>>> out(
      psis.size(), std::vector<std::vector<double>>(regions.size(), std::vector<double>(slices)));
  if (phi.is_zero()) return out;
  GridSampler<Dim> sampler(q.box_length, q.points);
  std::vector<double> phi2, psi2;
  std::vector<std::vector<unsigned char>> masks(regions.size());
  const double cell = q.cell_volume();
  for (int s = 0; s < slices; ++s) {
    const double t = q.time(s);
    bool any_time = false;
    for (std::size_t r = 0; r < regions.size(); ++r) {
      rasterize_region(q, regions[r], t, masks[r]);
      any_time = any_time || regions[r].contains_time(t);
    }
    if (!any_time) continue;
    sampler.intensity(phi, t, phi2);
    for (std::size_t i = 0; i < psis.size(); ++i) {
      if (psis[i].is_zero()) continue;
      sampler.intensity(psis[i], t, psi2);
      for (std::size_t r = 0; r < regions.size(); ++r) {
        const auto& m = masks[r];
        double acc = 0.0;
        for (std::size_t x = 0; x < psi2.size(); ++x)
          if (m[x]) acc += phi2[x] * psi2[x];
        out[i][r][s] = acc * cell;
      }
    }
  }
  return out;
}

/// ( dt * sum of slice integrals )^{1/2}.
inline double l2_from_slices(std::span<const double> slices, double dt) {
  double s = 0.0;
  for (double v : slices) s += v;
  return std::sqrt(s * dt);
}

/// || phi psi ||_{L^2(R)} by quadrature.
template <int Dim>
double product_l2(const SpectralWave<Dim>& phi, const SpectralWave<Dim>& psi,
                  const Region<Dim>& region, const QuadratureScheme<Dim>& q) {
  const auto r = product_slice_integrals<Dim>(phi, std::span(&psi, 1), std::span(&region, 1), q);
  return l2_from_slices(r[0][0], q.dt);
}

/// || phi psi ||_{L^p} over the whole window by quadrature.
template <int Dim>
double lp_product(const SpectralWave<Dim>& phi, const SpectralWave<Dim>& psi, double p,
                  const QuadratureScheme<Dim>& q) {
  if (p < 1.0) throw Error("L^p norms need p >= 1");
  q.validate();
  if (phi.is_zero() || psi.is_zero()) return 0.0;
  GridSampler<Dim> sampler(q.box_length, q.points);
  std::vector<double> a, b;
  double total = 0.0;
  for (int s = 0; s < q.time_samples(); ++s) {
    sampler.intensity(phi, q.time(s), a);
    sampler.intensity(psi, q.time(s), b);
    double acc = 0.0;
    for (std::size_t x = 0; x < a.size(); ++x) acc += std::pow(a[x] * b[x], 0.5 * p);
    total += acc;
  }
  return std::pow(total * q.cell_volume() * q.dt, 1.0 / p);
}

/// || phi psi ||_{L^2} and || phi psi ||_{L^p} over the whole window in one
/// pass.
template <int Dim>
std::pair<double, double> product_l2_and_lp(const SpectralWave<Dim>& phi,
                                            const SpectralWave<Dim>& psi, double p,
                                            const QuadratureScheme<Dim>& q) {
  if (p < 1.0) throw Error("L^p norms need p >= 1");
  q.validate();
  if (phi.is_zero() || psi.is_zero()) return {0.0, 0.0};
  GridSampler<Dim> sampler(q.box_length, q.points);
  std::vector<double> a, b;
  double s2 = 0.0, sp = 0.0;
  for (int s = 0; s < q.time_samples(); ++s) {
    sampler.intensity(phi, q.time(s), a);
    sampler.intensity(psi, q.time(s), b);
    for (std::size_t x = 0; x < a.size(); ++x) {
      const double v = a[x] * b[x];
      s2 += v;
      sp += std::pow(v, 0.5 * p);
    }
  }
  const double w = q.cell_volume() * q.dt;
  return {std::sqrt(s2 * w), std::pow(sp * w, 1.0 / p)};
}

/// Per-slice maxima of |phi| over the grid points of the tube (and region),
/// 0 for empty slices.
template <int Dim>
std::vector<double> tube_slice_maxima(const SpectralWave<Dim>& phi, const Tube<Dim>& tube,
                                      const QuadratureScheme<Dim>& q,
                                      const std::type_identity_t<std::optional<Region<Dim>>>& region = std::nullopt) {
  q.validate();
  std::vector<double> out(q.time_samples(), 0.0);
  if (phi.is_zero()) return out;
  GridSampler<Dim> sampler(q.box_length, q.points);
  std::vector<double> inten;
  std::vector<unsigned char> mask;
  for (int s = 0; s < q.time_samples(); ++s) {
    const double t = q.time(s);
    if (tube.is_finite() && std::abs(t - tube.t0) > tube.half_length()) continue;
    if (region && !region->contains_time(t)) continue;
    sampler.intensity(phi, t, inten);
    if (region) rasterize_region(q, *region, t, mask);
    double best = 0.0;
    for_each_tube_point<Dim>(q, tube, t, [&](std::size_t flat) {
      if (!region || mask[flat]) best = std::max(best, inten[flat]);
    });
    out[s] = std::sqrt(best);
  }
  return out;
}

/// || phi ||_{L^2_t L^inf_x(T cap region)}.
template <int Dim>
double l2t_linfx_on_tube(const SpectralWave<Dim>& phi, const Tube<Dim>& tube,
                         const QuadratureScheme<Dim>& q,
                         const std::type_identity_t<std::optional<Region<Dim>>>& region = std::nullopt) {
  double s = 0.0;
  for (double m : tube_slice_maxima(phi, tube, q, region)) s += m * m;
  return std::sqrt(s * q.dt);
}

}  // namespace conewave
