#pragma once

// Waves on the torus stored by their Fourier measure coefficients on the
// light cone: c_plus rides tau = +|xi|, c_minus rides tau = -|xi|.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "conewave/errors.hpp"
#include "conewave/lattice.hpp"

namespace conewave {

using Complex = std::complex<double>;

enum class Color : std::uint8_t { none = 0, red = 1, blue = 2 };

inline std::string to_string(Color c) {
  switch (c) {
    case Color::red: return "red";
    case Color::blue: return "blue";
    default: return "none";
  }
}

inline Color color_from_string(const std::string& s) {
  if (s == "red") return Color::red;
  if (s == "blue") return Color::blue;
  if (s == "none") return Color::none;
  throw FormatError("unknown color '" + s + "'");
}

/// Signed distance from a rescaled frequency zeta to the boundary of the
/// sector-annulus {angle(zeta, e1) <= pi/8, 1 <= |zeta| <= 2}. Nonnegative
/// exactly on the closed sector-annulus, negative outside.
template <int Dim>
double sector_margin_distance(const Vec<Dim>& zeta) {
  const double r = norm<Dim>(zeta);
  if (r == 0.0) return -1.0;
  const double theta = std::acos(std::clamp(zeta[0] / r, -1.0, 1.0));
  return std::min({r - 1.0, 2.0 - r, r * std::sin(kSectorAngle - theta)});
}

template <int Dim>
struct Mode {
  Index<Dim> index{};
  Complex plus{};
  Complex minus{};
};

template <int Dim>
class SpectralWave {
 public:
  using ModeT = Mode<Dim>;

  SpectralWave(FrequencyLattice<Dim> lattice, Color color, int k)
      : lattice_(lattice), color_(color), k_(k) {
    if (k_ < 0) throw Error("frequency exponent k must be >= 0");
  }

  SpectralWave(FrequencyLattice<Dim> lattice, Color color, int k,
               std::vector<ModeT> modes)
      : SpectralWave(lattice, color, k) {
    for (const auto& m : modes)
      if (!lattice_.contains(m.index))
        throw Error("mode index outside the frequency lattice");
    modes_ = std::move(modes);
    canonicalize();
  }

  const FrequencyLattice<Dim>& lattice() const { return lattice_; }
  Color color() const { return color_; }
  int k() const { return k_; }
  const std::vector<ModeT>& modes() const { return modes_; }
  bool is_zero() const { return modes_.empty(); }

  Vec<Dim> frequency(const ModeT& m) const { return lattice_.frequency(m.index); }

  /// True when every nonzero coefficient sits where the declared color and
  /// frequency exponent allow it.
  bool satisfies_color_invariant() const {
    if (color_ == Color::none) return true;
    const double scale = std::ldexp(1.0, -k_);
    for (const auto& m : modes_) {
      const bool wrong_side = color_ == Color::red ? m.minus != Complex{}
                                                   : m.plus != Complex{};
      if (wrong_side) return false;
      if (sector_margin_distance<Dim>(scale * frequency(m)) < 0.0) return false;
    }
    return true;
  }

  SpectralWave scaled(Complex s) const {
    SpectralWave out = *this;
    for (auto& m : out.modes_) {
      m.plus *= s;
      m.minus *= s;
    }
    out.canonicalize();
    return out;
  }

  /// this + s * other, merged over the union of supports.
  SpectralWave plus_scaled(const SpectralWave& other, Complex s) const {
    if (!(other.lattice_ == lattice_))
      throw Error("waves live on different lattices");
    std::vector<ModeT> merged;
    merged.reserve(modes_.size() + other.modes_.size());
    auto a = modes_.begin();
    auto b = other.modes_.begin();
    while (a != modes_.end() || b != other.modes_.end()) {
      if (b == other.modes_.end() || (a != modes_.end() && a->index < b->index)) {
        merged.push_back(*a++);
      } else if (a == modes_.end() || b->index < a->index) {
        merged.push_back({b->index, s * b->plus, s * b->minus});
        ++b;
      } else {
        merged.push_back({a->index, a->plus + s * b->plus, a->minus + s * b->minus});
        ++a;
        ++b;
      }
    }
    SpectralWave out(lattice_, color_ == other.color_ ? color_ : Color::none,
                     std::max(k_, other.k_));
    out.modes_ = std::move(merged);
    out.canonicalize();
    return out;
  }

  /// Same coefficients, re-declared on a lattice with the same box length
  /// and at least as many points (exact zero padding in frequency).
  SpectralWave on_lattice(const FrequencyLattice<Dim>& target) const {
    if (target.box_length() != lattice_.box_length())
      throw Error("refinement must keep the box length");
    for (const auto& m : modes_)
      if (!target.contains(m.index))
        throw Error("target lattice cannot hold the wave's support");
    SpectralWave out = *this;
    out.lattice_ = target;
    return out;
  }

  SpectralWave with_metadata(Color color, int k) const {
    SpectralWave out = *this;
    out.color_ = color;
    out.k_ = k;
    return out;
  }

 private:
  void canonicalize() {
    std::sort(modes_.begin(), modes_.end(),
              [](const ModeT& x, const ModeT& y) { return x.index < y.index; });
    std::vector<ModeT> out;
    out.reserve(modes_.size());
    for (const auto& m : modes_) {
      if (!out.empty() && out.back().index == m.index) {
        out.back().plus += m.plus;
        out.back().minus += m.minus;
      } else {
        out.push_back(m);
      }
    }
    std::erase_if(out, [](const ModeT& m) {
      return m.plus == Complex{} && m.minus == Complex{};
    });
    modes_ = std::move(out);
  }

  FrequencyLattice<Dim> lattice_;
  Color color_;
  int k_;
  std::vector<ModeT> modes_;
};

/// M(w) = L^{-n} * sum |c+|^2 + |c-|^2.
template <int Dim>
double mass(const SpectralWave<Dim>& w) {
  double s = 0.0;
  for (const auto& m : w.modes()) s += std::norm(m.plus) + std::norm(m.minus);
  return s * w.lattice().measure_weight();
}

/// Distance of the rescaled Fourier support to the boundary of the unit
/// sector-annulus. Infinite for the zero wave; clamped at 0 for supports
/// leaving the sector.
template <int Dim>
double margin(const SpectralWave<Dim>& w) {
  if (w.color() == Color::none)
    throw MarginUndefined("margin is defined only for red or blue waves");
  const double scale = std::ldexp(1.0, -w.k());
  double m = std::numeric_limits<double>::infinity();
  for (const auto& mode : w.modes())
    m = std::min(m, sector_margin_distance<Dim>(scale * w.frequency(mode)));
  return std::max(m, 0.0);
}

template <int Dim>
SpectralWave<Dim> normalize_mass(const SpectralWave<Dim>& w, double target = 1.0) {
  const double m = mass(w);
  if (m == 0.0) throw Error("cannot normalize the zero wave");
  return w.scaled(std::sqrt(target / m));
}

/// <a(t), b(t)>_{L^2_x}, computed on the Fourier side.
template <int Dim>
Complex inner_product(const SpectralWave<Dim>& a, const SpectralWave<Dim>& b,
                      double t = 0.0) {
  if (!(a.lattice() == b.lattice()))
    throw Error("waves live on different lattices");
  Complex s{};
  auto ia = a.modes().begin();
  auto ib = b.modes().begin();
  while (ia != a.modes().end() && ib != b.modes().end()) {
    if (ia->index < ib->index) {
      ++ia;
    } else if (ib->index < ia->index) {
      ++ib;
    } else {
      const double theta = 2.0 * kPi * t * norm<Dim>(a.frequency(*ia));
      const Complex p = std::polar(1.0, theta);
      const Complex va = ia->plus * p + ia->minus * std::conj(p);
      const Complex vb = ib->plus * p + ib->minus * std::conj(p);
      s += va * std::conj(vb);
      ++ia;
      ++ib;
    }
  }
  return s * a.lattice().measure_weight();
}

/// w(t, x) by direct summation over the support.
template <int Dim>
Complex point_value(const SpectralWave<Dim>& w, double t, const Vec<Dim>& x) {
  Complex s{};
  for (const auto& m : w.modes()) {
    const Vec<Dim> xi = w.frequency(m);
    const double r = norm<Dim>(xi);
    const double sx = 2.0 * kPi * dot<Dim>(x, xi);
    const double st = 2.0 * kPi * t * r;
    s += m.plus * std::polar(1.0, sx + st) + m.minus * std::polar(1.0, sx - st);
  }
  return s * w.lattice().measure_weight();
}

/// Smallest and largest lattice index along each axis over the support.
template <int Dim>
std::pair<Index<Dim>, Index<Dim>> support_box(const SpectralWave<Dim>& w) {
  Index<Dim> lo, hi;
  lo.fill(std::numeric_limits<int>::max());
  hi.fill(std::numeric_limits<int>::min());
  for (const auto& m : w.modes())
    for (int i = 0; i < Dim; ++i) {
      lo[i] = std::min(lo[i], m.index[i]);
      hi[i] = std::max(hi[i], m.index[i]);
    }
  return {lo, hi};
}

}  // namespace conewave
