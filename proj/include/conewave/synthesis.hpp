#pragma once

// Constructors for red and blue waves with prescribed margin: smooth cube
// bumps, tube-concentrated blue packets, random-sign cube trains and random
// test waves.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "conewave/errors.hpp"
#include "conewave/geometry.hpp"
#include "conewave/lattice.hpp"
#include "conewave/wave.hpp"

namespace conewave {

/// C-infinity step: 0 for u <= 0, 1 for u >= 1.
inline double smooth_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

/// Smallest admissible points-per-axis whose lattice holds the frequency
/// annulus of scale 2^k on a torus of side L.
inline int lattice_points_for(double box_length, int k) {
  const int need = static_cast<int>(std::ceil(std::ldexp(2.0, k) * box_length)) + 1;
  int n = std::max({16, 2 * need, static_cast<int>(std::ceil(4.0 * box_length))});
  return n + (n % 2);
}

/// Calls fn(index, xi, d) for every lattice frequency whose rescaled margin
/// distance d = sector_margin_distance(2^{-k} xi) is strictly above
/// `min_distance`. Throws ResolutionError when such a frequency would fall
/// outside the lattice.
template <int Dim, class Fn>
void for_each_sector_index(const FrequencyLattice<Dim>& lattice, int k,
                           double min_distance, Fn&& fn) {
  const double L = lattice.box_length();
  const double scale = std::ldexp(1.0, k);
  const double outer = 2.0 * scale;
  Index<Dim> lo, hi;
  lo[0] = static_cast<int>(std::floor(scale * std::cos(kSectorAngle) * L));
  hi[0] = static_cast<int>(std::ceil(outer * L));
  const int side = static_cast<int>(std::ceil(outer * std::sin(kSectorAngle) * L));
  for (int i = 1; i < Dim; ++i) {
    lo[i] = -side;
    hi[i] = side;
  }
  Index<Dim> m = lo;
  const double inv = 1.0 / scale;
  while (true) {
    const Vec<Dim> xi = lattice.frequency(m);
    // lattice.frequency does no range check, so out-of-lattice points are
    // detected here.
    const double d = sector_margin_distance<Dim>(inv * xi);
    if (d > min_distance) {
      if (!lattice.contains(m))
        throw ResolutionError("frequency sector of exponent " + std::to_string(k) +
                              " exceeds the lattice Nyquist range");
      fn(m, xi, d);
    }
    int axis = Dim - 1;
    while (axis >= 0 && m[axis] == hi[axis]) {
      m[axis] = lo[axis];
      --axis;
    }
    if (axis < 0) break;
    ++m[axis];
  }
}

/// Red k = 0 wave of mass 1 concentrated near `center`: flat-top amplitude
/// in the margin distance, ramped over `taper` above m_min, modulated so all
/// phases align at (t_c, x_c).
template <int Dim>
SpectralWave<Dim> make_red_cube_bump(const FrequencyLattice<Dim>& lattice,
                                     const SpacetimePoint<Dim>& center,
                                     double m_min = 0.05, double taper = 0.1) {
  if (m_min < 0.05 - 1e-15) throw Error("cube bumps need margin at least 1/20");
  std::vector<Mode<Dim>> modes;
  for_each_sector_index<Dim>(lattice, 0, m_min, [&](const Index<Dim>& m, const Vec<Dim>& xi,
                                                     double d) {
    const double a = smooth_step((d - m_min) / taper);
    if (a == 0.0) return;
    const double phase = -2.0 * kPi * (dot<Dim>(center.x, xi) + center.t * norm<Dim>(xi));
    modes.push_back({m, a * std::polar(1.0, phase), Complex{}});
  });
  if (modes.empty())
    throw InfeasibleMargin("no lattice frequency has margin above " + std::to_string(m_min));
  return normalize_mass(SpectralWave<Dim>(lattice, Color::red, 0, std::move(modes)));
}

/// Angular half-width of the blue tube packet at frequency 2^k.
inline double blue_packet_aperture(int k) { return std::ldexp(1.0, -k); }

/// Blue wave of frequency 2^k and mass 1 whose Fourier support is the sector
/// {angle(xi, omega) <= 2^{-k}} of the annulus, phased to travel along the
/// tube through (t0, x0) in direction (1, omega).
template <int Dim>
SpectralWave<Dim> make_blue_tube_wave(const FrequencyLattice<Dim>& lattice, double t0,
                                      const Vec<Dim>& x0, const Vec<Dim>& omega_in, int k,
                                      double m_min = 0.05, double taper = 0.1) {
  const Vec<Dim> omega = normalized<Dim>(omega_in);
  if (angle_between<Dim>(omega, unit_e1<Dim>()) > kSectorAngle)
    throw Error("tube direction lies outside the blue sector");
  const double aperture = blue_packet_aperture(k);
  const double transverse = std::ldexp(1.0, k) * 1.5 * aperture;
  if (transverse < 2.0 / lattice.box_length())
    throw ResolutionError("tube sector narrower than the frequency cell");
  std::vector<Mode<Dim>> modes;
  for_each_sector_index<Dim>(lattice, k, m_min, [&](const Index<Dim>& m, const Vec<Dim>& xi,
                                                     double d) {
    const double s = angle_between<Dim>(xi, omega) / aperture;
    const double a = smooth_step((d - m_min) / taper) * smooth_step(2.0 * (1.0 - s));
    if (a == 0.0) return;
    const double phase = -2.0 * kPi * (dot<Dim>(x0, xi) - t0 * norm<Dim>(xi));
    modes.push_back({m, Complex{}, a * std::polar(1.0, phase)});
  });
  if (modes.empty())
    throw InfeasibleMargin("tube sector leaves no lattice frequency with margin " +
                           std::to_string(m_min));
  return normalize_mass(SpectralWave<Dim>(lattice, Color::blue, k, std::move(modes)));
}

/// Random-sign sum of cube bumps on the axis cubes of a finite tube:
/// sum_Q eps_Q c_Q phi_Q with eps_Q iid +-1 from `seed`. Not renormalized.
template <int Dim>
SpectralWave<Dim> make_red_cube_train(const FrequencyLattice<Dim>& lattice,
                                      const Tube<Dim>& tube, const std::vector<double>& coeffs,
                                      std::uint64_t seed, double m_min = 0.05) {
  const auto cubes = axis_unit_cubes(tube);
  if (coeffs.size() != cubes.size())
    throw Error("cube train needs one coefficient per axis cube (" +
                std::to_string(cubes.size()) + ")");
  std::mt19937_64 rng(seed);
  SpectralWave<Dim> out(lattice, Color::red, 0);
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    const double sign = (rng() >> 63) != 0 ? -1.0 : 1.0;
    out = out.plus_scaled(make_red_cube_bump(lattice, cubes[i].center, m_min), sign * coeffs[i]);
  }
  return out.with_metadata(Color::red, 0);
}

/// Equal coefficients with sum of squares 1 over the axis cubes of `tube`.
template <int Dim>
std::vector<double> uniform_train_coefficients(const Tube<Dim>& tube) {
  const std::size_t count = axis_unit_cubes(tube).size();
  return std::vector<double>(count, 1.0 / std::sqrt(static_cast<double>(count)));
}

/// Mass-1 wave with iid standard complex Gaussian coefficients on every
/// lattice frequency of margin distance >= m_min.
template <int Dim>
SpectralWave<Dim> random_colored_wave(const FrequencyLattice<Dim>& lattice, Color color, int k,
                                      double m_min, std::uint64_t seed) {
  if (color == Color::none) throw Error("random waves must be red or blue");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Mode<Dim>> modes;
  // The comparison in for_each_sector_index is strict; nudge so d == m_min
  // is admitted.
  for_each_sector_index<Dim>(lattice, k, std::nextafter(m_min, -1.0),
                             [&](const Index<Dim>& m, const Vec<Dim>&, double) {
                               const double re = gauss(rng);
                               const double im = gauss(rng);
                               const Complex c{re, im};
                               if (color == Color::red)
                                 modes.push_back({m, c, Complex{}});
                               else
                                 modes.push_back({m, Complex{}, c});
                             });
  if (modes.empty())
    throw InfeasibleMargin("no lattice frequency has margin " + std::to_string(m_min));
  return normalize_mass(SpectralWave<Dim>(lattice, color, k, std::move(modes)));
}

}  // namespace conewave
