#pragma once

// Light-ray tubes, spacetime cubes, regions and the dyadic grid on the sphere.
// Spatial coordinates live on a torus of side L; time is never wrapped.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "conewave/errors.hpp"
#include "conewave/lattice.hpp"

namespace conewave {

inline constexpr double kGeometryTolerance = 1e-12;
/// Minimal separation |x - x'| + 2^k |omega - omega'| between family tubes.
inline constexpr double kSeparationMin = 0.5;

/// {(t, x): |t - t0| <= lambda 2^k, |x - x0 - omega (t - t0)| <= lambda r}.
/// Without k the tube spans the whole time window and lambda dilates only
/// the radius.
template <int Dim>
struct Tube {
  double t0 = 0.0;
  Vec<Dim> x0{};
  Vec<Dim> omega = unit_e1<Dim>();
  std::optional<int> k;
  double radius = 1.0;
  double lambda = 1.0;

  static Tube finite(double t0, Vec<Dim> x0, Vec<Dim> omega, int k) {
    return {t0, x0, omega, k, 1.0, 1.0};
  }
  static Tube window_spanning(double t0, Vec<Dim> x0, Vec<Dim> omega) {
    return {t0, x0, omega, std::nullopt, 1.0, 1.0};
  }

  bool is_finite() const { return k.has_value(); }
  double half_length() const {
    return k ? lambda * std::ldexp(1.0, *k) : std::numeric_limits<double>::infinity();
  }
  double effective_radius() const { return lambda * radius; }
  Vec<Dim> axis_point(double t) const { return x0 + (t - t0) * omega; }
};

template <int Dim>
void validate(const Tube<Dim>& tube) {
  if (std::abs(norm<Dim>(tube.omega) - 1.0) > 1e-9)
    throw Error("tube direction must be a unit vector");
  if (tube.radius < 1.0 - kGeometryTolerance) throw Error("tube radius must be >= 1");
  if (tube.lambda < 1.0 - kGeometryTolerance) throw Error("tube dilation must be >= 1");
}

template <int Dim>
bool tube_contains(const Tube<Dim>& tube, const SpacetimePoint<Dim>& p,
                   double period) {
  const double dt = p.t - tube.t0;
  if (tube.is_finite() && std::abs(dt) > tube.half_length() + kGeometryTolerance)
    return false;
  return torus_norm<Dim>(p.x - tube.axis_point(p.t), period) <=
         tube.effective_radius() + kGeometryTolerance;
}

template <int Dim>
Tube<Dim> dilate(const Tube<Dim>& tube, double factor) {
  if (factor < 1.0) throw Error("dilation factor must be >= 1");
  Tube<Dim> out = tube;
  out.lambda *= factor;
  return out;
}

/// Axis-parallel cube of spacetime.
template <int Dim>
struct Cube {
  SpacetimePoint<Dim> center;
  double side = 1.0;
};

template <int Dim>
Cube<Dim> shrink_cube(const Cube<Dim>& q, double c) {
  if (!(c > 0.0 && c < 1.0)) throw Error("shrink factor must lie in (0, 1)");
  return {q.center, (1.0 - c) * q.side};
}

template <int Dim>
bool cube_contains(const Cube<Dim>& q, const SpacetimePoint<Dim>& p, double period) {
  const double h = 0.5 * q.side + kGeometryTolerance;
  if (std::abs(p.t - q.center.t) > h) return false;
  const Vec<Dim> d = torus_displacement<Dim>(p.x - q.center.x, period);
  return std::all_of(d.begin(), d.end(), [h](double v) { return std::abs(v) <= h; });
}

/// Torus distance from x to the spatial face of a cube (0 inside).
template <int Dim>
double distance_to_box(const Vec<Dim>& x, const Vec<Dim>& center, double half_side,
                       double period) {
  const Vec<Dim> d = torus_displacement<Dim>(x - center, period);
  double s = 0.0;
  for (double v : d) {
    const double e = std::max(0.0, std::abs(v) - half_side);
    s += e * e;
  }
  return std::sqrt(s);
}

/// Whether the tube meets the cube, tested on a fine sweep of the cube's
/// time extent.
template <int Dim>
bool cube_touches_tube(const Cube<Dim>& q, const Tube<Dim>& tube, double period) {
  double lo = q.center.t - 0.5 * q.side;
  double hi = q.center.t + 0.5 * q.side;
  if (tube.is_finite()) {
    lo = std::max(lo, tube.t0 - tube.half_length());
    hi = std::min(hi, tube.t0 + tube.half_length());
  }
  if (lo > hi + kGeometryTolerance) return false;
  constexpr int kSweep = 64;
  for (int i = 0; i <= kSweep; ++i) {
    const double t = lo + (hi - lo) * i / kSweep;
    if (distance_to_box<Dim>(tube.axis_point(t), q.center.x, 0.5 * q.side, period) <=
        tube.effective_radius() + kGeometryTolerance)
      return true;
  }
  return false;
}

/// Unit cubes centred on the axis at unit time spacing.
template <int Dim>
std::vector<Cube<Dim>> axis_unit_cubes(const Tube<Dim>& tube) {
  if (!tube.is_finite()) throw Error("axis cubes need a finite tube");
  const int steps = static_cast<int>(std::ceil(tube.half_length() - 0.5 - 1e-12));
  std::vector<Cube<Dim>> out;
  for (int j = -steps; j <= steps; ++j) {
    const double t = tube.t0 + j;
    out.push_back({{t, tube.axis_point(t)}, 1.0});
  }
  return out;
}

/// Unit cubes whose union contains a finite tube: for every axis cube, the
/// ring of cubes at integer offsets up to ceil(radius) in each coordinate.
template <int Dim>
std::vector<Cube<Dim>> cover_tube_by_unit_cubes(const Tube<Dim>& tube) {
  const int reach = static_cast<int>(std::ceil(tube.effective_radius() - 1e-12));
  const int width = 2 * reach + 1;
  int offsets = 1;
  for (int i = 0; i < Dim; ++i) offsets *= width;
  std::vector<Cube<Dim>> out;
  for (const auto& axis : axis_unit_cubes(tube)) {
    for (int o = 0; o < offsets; ++o) {
      int code = o;
      Cube<Dim> q = axis;
      for (int i = 0; i < Dim; ++i) {
        q.center.x[i] += (code % width) - reach;
        code /= width;
      }
      out.push_back(q);
    }
  }
  return out;
}

/// A time interval of the window, minus a union of tubes, optionally
/// intersected with a cube.
template <int Dim>
struct Region {
  double t_begin = -std::numeric_limits<double>::infinity();
  double t_end = std::numeric_limits<double>::infinity();
  std::vector<Tube<Dim>> excluded;
  std::optional<Cube<Dim>> cube;
  bool empty = false;

  static Region everything() { return {}; }
  static Region nothing() {
    Region r;
    r.empty = true;
    return r;
  }
  static Region slab(double a, double b) {
    Region r;
    r.t_begin = a;
    r.t_end = b;
    return r;
  }
  static Region outside(std::vector<Tube<Dim>> tubes) {
    Region r;
    r.excluded = std::move(tubes);
    return r;
  }

  bool contains_time(double t) const { return !empty && t >= t_begin && t < t_end; }

  bool contains(const SpacetimePoint<Dim>& p, double period) const {
    if (!contains_time(p.t)) return false;
    if (cube && !cube_contains(*cube, p, period)) return false;
    return std::none_of(excluded.begin(), excluded.end(),
                        [&](const Tube<Dim>& T) { return tube_contains(T, p, period); });
  }
};

/// Separation predicate between two tubes of a covering family.
template <int Dim>
bool separated(const Tube<Dim>& a, const Tube<Dim>& b, int k, double period,
               double s_min = kSeparationMin) {
  return torus_norm<Dim>(a.x0 - b.x0, period) +
             std::ldexp(1.0, k) * norm<Dim>(a.omega - b.omega) >=
         s_min - kGeometryTolerance;
}

/// True when the two tubes share no point of [-window, window] x torus,
/// checked on time slices of spacing `step` with a radius slack of one
/// slice of travel.
template <int Dim>
bool tubes_disjoint(const Tube<Dim>& a, const Tube<Dim>& b, double window, double period,
                    double step = 0.125) {
  const double reach = a.effective_radius() + b.effective_radius() + step;
  for (double t = -window; t <= window + 1e-12; t += step) {
    if (a.is_finite() && std::abs(t - a.t0) > a.half_length() + step) continue;
    if (b.is_finite() && std::abs(t - b.t0) > b.half_length() + step) continue;
    if (torus_norm<Dim>(a.axis_point(t) - b.axis_point(t), period) <= reach) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Dyadic grid on S^{n-1}.
//
// The sphere is split into the closed hemisphere {omega_1 >= 0} (id 0) and the
// open hemisphere {omega_1 < 0} (id 1). Each is charted onto [-1, 1]^{n-1} by
// the azimuthal-equidistant map around +-e1 (angle from the pole scaled to
// the unit ball) followed by the radial stretch of the ball onto the cube.
// For n = 2 the chart is u = signed angle / (pi/2), so chart length and arc
// length agree up to the exact factor pi/2 in both directions.
// ---------------------------------------------------------------------------

template <int Dim>
struct SphereSquare {
  int hemisphere = 0;
  int level = 0;
  std::array<int, Dim - 1> coords{};

  bool operator==(const SphereSquare&) const = default;
  auto operator<=>(const SphereSquare&) const = default;

  SphereSquare parent() const {
    SphereSquare p = *this;
    p.level = level - 1;
    for (auto& c : p.coords) c >>= 1;
    return p;
  }

  bool contains_square(const SphereSquare& other) const {
    if (other.hemisphere != hemisphere || other.level < level) return false;
    for (int i = 0; i < Dim - 1; ++i)
      if ((other.coords[i] >> (other.level - level)) != coords[i]) return false;
    return true;
  }
};

template <int Dim>
struct SphereChart {
  int hemisphere = 0;
  std::array<double, Dim - 1> u{};
};

template <int Dim>
SphereChart<Dim> sphere_chart(const Vec<Dim>& omega_in) {
  const Vec<Dim> omega = normalized<Dim>(omega_in);
  SphereChart<Dim> c;
  c.hemisphere = omega[0] >= 0.0 ? 0 : 1;
  const double theta = std::acos(std::clamp(std::abs(omega[0]), 0.0, 1.0));
  double vnorm = 0.0;
  for (int i = 1; i < Dim; ++i) vnorm += omega[i] * omega[i];
  vnorm = std::sqrt(vnorm);
  if (vnorm == 0.0) return c;
  const double ball_radius = theta / (0.5 * kPi);
  double inf_norm = 0.0;
  for (int i = 1; i < Dim; ++i) inf_norm = std::max(inf_norm, std::abs(omega[i]) / vnorm);
  for (int i = 1; i < Dim; ++i)
    c.u[i - 1] = std::clamp(omega[i] / vnorm * ball_radius / inf_norm, -1.0, 1.0);
  return c;
}

template <int Dim>
Vec<Dim> sphere_chart_inverse(const SphereChart<Dim>& c) {
  double l2 = 0.0, linf = 0.0;
  for (double v : c.u) {
    l2 += v * v;
    linf = std::max(linf, std::abs(v));
  }
  l2 = std::sqrt(l2);
  Vec<Dim> omega{};
  const double pole = c.hemisphere == 0 ? 1.0 : -1.0;
  if (l2 == 0.0) {
    omega[0] = pole;
    return omega;
  }
  const double ball_radius = linf;  // |u|_inf after undoing the stretch
  const double theta = ball_radius * 0.5 * kPi;
  omega[0] = pole * std::cos(theta);
  for (int i = 1; i < Dim; ++i) omega[i] = std::sin(theta) * c.u[i - 1] / l2;
  return omega;
}

template <int Dim>
SphereSquare<Dim> sphere_square_of(const Vec<Dim>& omega, int level) {
  const SphereChart<Dim> c = sphere_chart<Dim>(omega);
  SphereSquare<Dim> q;
  q.hemisphere = c.hemisphere;
  q.level = level;
  const int cells = 1 << level;
  for (int i = 0; i < Dim - 1; ++i) {
    const int v = static_cast<int>(std::floor((c.u[i] + 1.0) * 0.5 * cells));
    q.coords[i] = std::clamp(v, 0, cells - 1);
  }
  return q;
}

template <int Dim>
Vec<Dim> sphere_square_center(const SphereSquare<Dim>& q) {
  SphereChart<Dim> c;
  c.hemisphere = q.hemisphere;
  const double cells = std::ldexp(1.0, q.level);
  for (int i = 0; i < Dim - 1; ++i) c.u[i] = -1.0 + (2.0 * q.coords[i] + 1.0) / cells;
  return sphere_chart_inverse<Dim>(c);
}

/// All 2 * 2^{j(n-1)} squares of level j.
template <int Dim>
std::vector<SphereSquare<Dim>> dyadic_sphere_grid(int level) {
  if (level < 0 || level > 20) throw Error("sphere grid level out of range");
  const int cells = 1 << level;
  int per_hemisphere = 1;
  for (int i = 0; i < Dim - 1; ++i) per_hemisphere *= cells;
  std::vector<SphereSquare<Dim>> out;
  out.reserve(2 * static_cast<std::size_t>(per_hemisphere));
  for (int h = 0; h < 2; ++h)
    for (int p = 0; p < per_hemisphere; ++p) {
      SphereSquare<Dim> q;
      q.hemisphere = h;
      q.level = level;
      int code = p;
      for (int i = 0; i < Dim - 1; ++i) {
        q.coords[i] = code % cells;
        code /= cells;
      }
      out.push_back(q);
    }
  return out;
}

}  // namespace conewave
