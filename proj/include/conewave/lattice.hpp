#pragma once

// Frequency lattice of the n-torus and the small vector toolkit shared by
// every other header.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <type_traits>

#include "conewave/errors.hpp"

namespace conewave {

inline constexpr double kPi = std::numbers::pi;
/// Half-aperture of the red/blue frequency sectors around e1.
inline constexpr double kSectorAngle = kPi / 8.0;

// Non-deduced aliases: Dim is always taken from the wave, tube or explicit
// template argument, never from a std::array (whose extent is size_t).
template <int Dim>
using Vec = std::type_identity_t<std::array<double, Dim>>;

template <int Dim>
using Index = std::type_identity_t<std::array<int, Dim>>;

template <int Dim>
constexpr Vec<Dim> unit_e1() {
  Vec<Dim> e{};
  e[0] = 1.0;
  return e;
}

template <std::size_t N>
std::array<double, N> operator+(std::array<double, N> a, const std::array<double, N>& b) {
  for (std::size_t i = 0; i < N; ++i) a[i] += b[i];
  return a;
}

template <std::size_t N>
std::array<double, N> operator-(std::array<double, N> a, const std::array<double, N>& b) {
  for (std::size_t i = 0; i < N; ++i) a[i] -= b[i];
  return a;
}

template <std::size_t N>
std::array<double, N> operator*(double s, std::array<double, N> a) {
  for (auto& v : a) v *= s;
  return a;
}

template <int Dim>
double dot(const Vec<Dim>& a, const Vec<Dim>& b) {
  double s = 0.0;
  for (int i = 0; i < Dim; ++i) s += a[i] * b[i];
  return s;
}

template <int Dim>
double norm(const Vec<Dim>& a) {
  return std::sqrt(dot<Dim>(a, a));
}

template <int Dim>
Vec<Dim> normalized(const Vec<Dim>& a) {
  const double r = norm<Dim>(a);
  return (1.0 / r) * a;
}

/// Angle between two nonzero vectors, in [0, pi].
template <int Dim>
double angle_between(const Vec<Dim>& a, const Vec<Dim>& b) {
  const double c = dot<Dim>(a, b) / (norm<Dim>(a) * norm<Dim>(b));
  return std::acos(std::clamp(c, -1.0, 1.0));
}

/// Unit vector at polar angle `theta` from e1 in the (e1, e2) plane.
template <int Dim>
Vec<Dim> direction_from_angle(double theta) {
  static_assert(Dim >= 2);
  Vec<Dim> w{};
  w[0] = std::cos(theta);
  w[1] = std::sin(theta);
  return w;
}

/// Representative of `d` modulo `period` in [-period/2, period/2).
inline double wrap_centered(double d, double period) {
  return d - period * std::floor(d / period + 0.5);
}

/// Representative of `d` modulo `period` in [0, period).
inline double wrap_positive(double d, double period) {
  const double r = d - period * std::floor(d / period);
  return r >= period ? r - period : r;
}

template <int Dim>
Vec<Dim> torus_displacement(const Vec<Dim>& d, double period) {
  Vec<Dim> out;
  for (int i = 0; i < Dim; ++i) out[i] = wrap_centered(d[i], period);
  return out;
}

template <int Dim>
double torus_norm(const Vec<Dim>& d, double period) {
  return norm<Dim>(torus_displacement<Dim>(d, period));
}

inline int positive_mod(int a, int m) {
  const int r = a % m;
  return r < 0 ? r + m : r;
}

/// A point (t, x) of spacetime.
template <int Dim>
struct SpacetimePoint {
  double t = 0.0;
  Vec<Dim> x{};
};

/// Discretization of R^n by the n-torus of side L: the frequencies are
/// (1/L) * {-N/2, ..., N/2-1}^n and the spatial grid has step L/N.
template <int Dim>
class FrequencyLattice {
 public:
  static_assert(Dim >= 2, "waves live in dimension n >= 2");

  FrequencyLattice(int points_per_axis, double box_length)
      : n_points_(points_per_axis), box_length_(box_length) {
    if (n_points_ < 16 || n_points_ % 2 != 0)
      throw InvalidLattice("points per axis must be even and >= 16, got " +
                           std::to_string(n_points_));
    if (!(box_length_ > 0.0))
      throw InvalidLattice("box length must be positive");
    if (spatial_step() > 0.25 + 1e-15)
      throw InvalidLattice("spatial step L/N must be <= 1/4");
  }

  static constexpr int dimension() { return Dim; }
  int points_per_axis() const { return n_points_; }
  double box_length() const { return box_length_; }
  double frequency_step() const { return 1.0 / box_length_; }
  double spatial_step() const { return box_length_ / n_points_; }
  int min_index() const { return -n_points_ / 2; }
  int max_index() const { return n_points_ / 2 - 1; }
  /// Largest frequency magnitude representable along one axis.
  double axis_nyquist() const { return max_index() / box_length_; }

  /// L^{-n}, the weight turning coefficient sums into integrals.
  double measure_weight() const { return std::pow(box_length_, -Dim); }

  bool contains(const Index<Dim>& m) const {
    for (int v : m)
      if (v < min_index() || v > max_index()) return false;
    return true;
  }

  Vec<Dim> frequency(const Index<Dim>& m) const {
    Vec<Dim> xi;
    for (int i = 0; i < Dim; ++i) xi[i] = m[i] / box_length_;
    return xi;
  }

  std::size_t total_points() const {
    std::size_t t = 1;
    for (int i = 0; i < Dim; ++i) t *= static_cast<std::size_t>(n_points_);
    return t;
  }

  /// Row-major position of `m` in frequency-lexicographic order.
  std::size_t lexicographic_position(const Index<Dim>& m) const {
    std::size_t p = 0;
    for (int i = 0; i < Dim; ++i)
      p = p * n_points_ + static_cast<std::size_t>(m[i] - min_index());
    return p;
  }

  Index<Dim> index_at_position(std::size_t p) const {
    Index<Dim> m;
    for (int i = Dim - 1; i >= 0; --i) {
      m[i] = static_cast<int>(p % n_points_) + min_index();
      p /= n_points_;
    }
    return m;
  }

  bool operator==(const FrequencyLattice&) const = default;

 private:
  int n_points_;
  double box_length_;
};

}  // namespace conewave
