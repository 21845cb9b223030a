#pragma once

// Bad unit cubes of a blue wave, its decomposition into unit frequency
// cells, the tube weights those cells induce, and the exceptional tubes
// produced by running the greedy cover on them slab by slab.

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "conewave/errors.hpp"
#include "conewave/geometry.hpp"
#include "conewave/quadrature.hpp"
#include "conewave/sampler.hpp"
#include "conewave/synthesis.hpp"
#include "conewave/tube_cover.hpp"
#include "conewave/wave.hpp"

namespace conewave {

template <int Dim>
struct CubeNorm {
  Cube<Dim> cube;
  double norm = 0.0;  // || psi ||_{L^2(q)}
};

/// L^2 norms of psi on every unit cube [a, a+1) x prod [b_i, b_i+1) tiling
/// window x torus. Needs integer L, M a multiple of L and 1/dt integer.
template <int Dim>
std::vector<CubeNorm<Dim>> unit_cube_norms(const SpectralWave<Dim>& psi,
                                           const QuadratureScheme<Dim>& q) {
  q.validate();
  const double L = q.box_length;
  const int cells = static_cast<int>(std::lround(L));
  if (std::abs(L - cells) > 1e-12 || q.points % cells != 0)
    throw Error("unit cube scan needs integer L and a grid refining the unit lattice");
  const int per_cell = q.points / cells;
  const double per_unit_time = 1.0 / q.dt;
  if (std::abs(per_unit_time - std::round(per_unit_time)) > 1e-9)
    throw Error("unit cube scan needs 1/dt integer");
  const int time_cells = static_cast<int>(std::lround(2.0 * q.window));
  std::size_t spatial = 1;
  for (int i = 0; i < Dim; ++i) spatial *= static_cast<std::size_t>(cells);
  std::vector<double> acc(static_cast<std::size_t>(time_cells) * spatial, 0.0);
  if (!psi.is_zero()) {
    GridSampler<Dim> sampler(L, q.points);
    std::vector<double> inten;
    for (int s = 0; s < q.time_samples(); ++s) {
      const double t = q.time(s);
      const int tc = std::clamp(static_cast<int>(std::floor(t + q.window)), 0, time_cells - 1);
      sampler.intensity(psi, t, inten);
      double* row = acc.data() + static_cast<std::size_t>(tc) * spatial;
      for (std::size_t f = 0; f < inten.size(); ++f) {
        const Index<Dim> j = sampler.grid_index(f);
        std::size_t c = 0;
        for (int i = 0; i < Dim; ++i) c = c * cells + static_cast<std::size_t>(j[i] / per_cell);
        row[c] += inten[f];
      }
    }
  }
  std::vector<CubeNorm<Dim>> out;
  out.reserve(acc.size());
  const double w = q.cell_volume() * q.dt;
  for (int tc = 0; tc < time_cells; ++tc)
    for (std::size_t c = 0; c < spatial; ++c) {
      CubeNorm<Dim> cn;
      cn.cube.side = 1.0;
      cn.cube.center.t = -q.window + tc + 0.5;
      std::size_t code = c;
      for (int i = Dim - 1; i >= 0; --i) {
        cn.cube.center.x[i] = static_cast<double>(code % cells) + 0.5;
        code /= cells;
      }
      cn.norm = std::sqrt(acc[static_cast<std::size_t>(tc) * spatial + c] * w);
      out.push_back(cn);
    }
  return out;
}

/// Grid for the unit-cube scan: h <= 1/8 and the whole-torus sum of |psi|^2
/// exact.
template <int Dim>
QuadratureScheme<Dim> cube_scan_scheme(const SpectralWave<Dim>& psi, double window, double dt) {
  QuadratureScheme<Dim> q{window, dt, psi.lattice().box_length(),
                          unit_grid_points(psi.lattice().box_length(), 0.125, support_span(psi))};
  q.validate();
  return q;
}

/// Exhaustive scan: unit cubes q with ||psi||_{L^2(q)} > delta * M(psi)^{1/2}.
template <int Dim>
std::vector<CubeNorm<Dim>> find_bad_cubes(const SpectralWave<Dim>& psi, double delta,
                                          const QuadratureScheme<Dim>& q) {
  std::vector<CubeNorm<Dim>> bad;
  if (psi.is_zero()) return bad;
  const double bar = delta * std::sqrt(mass(psi));
  for (const auto& c : unit_cube_norms(psi, q))
    if (c.norm > bar) bad.push_back(c);
  return bad;
}

// ---------------------------------------------------------------------------
// Partition of unity on the unit lattice: a(s) = 1 for |s| <= 1/4, 0 for
// |s| >= 3/4, and sum_{m in Z} a(s - m)^2 = 1 for every s.
// ---------------------------------------------------------------------------

inline double unity_profile(double s) {
  const double u = 2.0 * std::abs(s) - 0.5;
  if (u <= 0.0) return 1.0;
  if (u >= 1.0) return 0.0;
  return std::cos(0.5 * kPi * smooth_step(u));
}

template <int Dim>
double lattice_window(const Vec<Dim>& v) {
  double a = 1.0;
  for (double s : v) a *= unity_profile(s);
  return a;
}

template <int Dim>
struct SectorPiece {
  Index<Dim> cell{};  // xi_alpha in Z^n
  Vec<Dim> omega{};   // xi_alpha / |xi_alpha|
  SpectralWave<Dim> wave;
};

/// psi = sum_alpha psi_alpha with hat(psi_alpha) = chi_alpha hat(psi) and
/// chi_alpha(xi) = prod_i a(xi_i - alpha_i); sum_alpha chi_alpha^2 = 1 so the
/// masses add up exactly.
template <int Dim>
std::vector<SectorPiece<Dim>> sector_decomposition(const SpectralWave<Dim>& psi) {
  std::map<Index<Dim>, std::vector<Mode<Dim>>> cells;
  for (const auto& m : psi.modes()) {
    const Vec<Dim> xi = psi.frequency(m);
    Index<Dim> lo, hi;
    for (int i = 0; i < Dim; ++i) {
      lo[i] = static_cast<int>(std::ceil(xi[i] - 0.75));
      hi[i] = static_cast<int>(std::floor(xi[i] + 0.75));
    }
    Index<Dim> a = lo;
    while (true) {
      Vec<Dim> d;
      for (int i = 0; i < Dim; ++i) d[i] = xi[i] - a[i];
      const double chi = lattice_window<Dim>(d);
      if (chi > 0.0) cells[a].push_back({m.index, chi * m.plus, chi * m.minus});
      int axis = Dim - 1;
      while (axis >= 0 && a[axis] == hi[axis]) {
        a[axis] = lo[axis];
        --axis;
      }
      if (axis < 0) break;
      ++a[axis];
    }
  }
  std::vector<SectorPiece<Dim>> out;
  for (auto& [cell, modes] : cells) {
    Vec<Dim> c;
    for (int i = 0; i < Dim; ++i) c[i] = cell[i];
    if (norm<Dim>(c) == 0.0) continue;  // cannot occur for sector waves
    out.push_back({cell, normalized<Dim>(c),
                   SpectralWave<Dim>(psi.lattice(), psi.color(), psi.k(), std::move(modes))});
  }
  return out;
}

/// Direction bin of a cell direction: angular bins of width 0.51 * 2^{-k}
/// keep distinct bins separated (2^k |omega - omega'| >= 1/2).
template <int Dim>
struct DirectionBinning {
  int k = 0;
  double width() const { return 0.51 * std::ldexp(1.0, -k) * (Dim == 2 ? 1.0 : 1.5) / (0.5 * kPi); }

  std::array<int, Dim - 1> bin(const Vec<Dim>& omega) const {
    const auto c = sphere_chart<Dim>(omega);
    std::array<int, Dim - 1> b{};
    for (int i = 0; i < Dim - 1; ++i) b[i] = static_cast<int>(std::lround(c.u[i] / width()));
    return b;
  }

  Vec<Dim> direction(const std::array<int, Dim - 1>& b) const {
    SphereChart<Dim> c;
    c.hemisphere = 0;
    for (int i = 0; i < Dim - 1; ++i) c.u[i] = std::clamp(b[i] * width(), -1.0, 1.0);
    return sphere_chart_inverse<Dim>(c);
  }
};

template <int Dim>
struct SectorWeightOptions {
  /// Total weight that may be discarded, smallest weights first.
  double drop_budget = 0.0;
};

/// Weighted tube family of psi on the slab centred at t_c: for each
/// direction bin and unit lattice point beta, the tube through (t_c, beta)
/// in direction (1, omega_bin) weighs
///   c = sum_{alpha in bin} int prod_i a^2(x_i - beta_i) |psi_alpha(t_c, x)|^2 dx / M(psi).
template <int Dim>
WeightedTubeFamily<Dim> sector_weights(const SpectralWave<Dim>& psi, double t_c,
                                       const SectorWeightOptions<Dim>& opt = {}) {
  WeightedTubeFamily<Dim> F;
  F.k = psi.k();
  if (psi.is_zero()) return F;
  const double L = psi.lattice().box_length();
  const int cells = static_cast<int>(std::lround(L));
  if (std::abs(L - cells) > 1e-12) throw Error("sector weights need an integer box length");
  const double total_mass = mass(psi);
  const auto pieces = sector_decomposition(psi);
  const DirectionBinning<Dim> binning{psi.k()};

  int span = 0;
  for (const auto& p : pieces) span = std::max(span, support_span(p.wave));
  const int M = unit_grid_points(L, 0.25, 2 * span + 1);
  GridSampler<Dim> sampler(L, M);
  const double cell_volume = sampler.cell_volume();

  std::size_t beta_count = 1;
  for (int i = 0; i < Dim; ++i) beta_count *= static_cast<std::size_t>(cells);
  std::map<std::array<int, Dim - 1>, std::vector<double>> acc;
  std::vector<double> inten;
  for (const auto& piece : pieces) {
    sampler.intensity(piece.wave, t_c, inten);
    auto& per_beta = acc[binning.bin(piece.omega)];
    per_beta.resize(beta_count, 0.0);
    for (std::size_t f = 0; f < inten.size(); ++f) {
      if (inten[f] == 0.0) continue;
      const Vec<Dim> x = sampler.position(f);
      Index<Dim> lo;
      for (int i = 0; i < Dim; ++i) lo[i] = static_cast<int>(std::floor(x[i] - 0.75)) + 1;
      for (int o = 0; o < (1 << Dim); ++o) {
        Index<Dim> beta;
        Vec<Dim> d;
        for (int i = 0; i < Dim; ++i) {
          beta[i] = lo[i] + ((o >> i) & 1);
          d[i] = x[i] - beta[i];
        }
        const double a = lattice_window<Dim>(d);
        if (a == 0.0) continue;
        std::size_t code = 0;
        for (int b : beta) code = code * cells + static_cast<std::size_t>(positive_mod(b, cells));
        per_beta[code] += a * a * inten[f] * cell_volume;
      }
    }
  }

  struct Entry {
    double w;
    Tube<Dim> tube;
  };
  std::vector<Entry> entries;
  for (const auto& [bin, per_beta] : acc) {
    const Vec<Dim> omega = binning.direction(bin);
    for (std::size_t code = 0; code < per_beta.size(); ++code) {
      if (per_beta[code] == 0.0) continue;
      Vec<Dim> x0;
      std::size_t c = code;
      for (int i = Dim - 1; i >= 0; --i) {
        x0[i] = static_cast<double>(c % cells);
        c /= cells;
      }
      entries.push_back({per_beta[code] / total_mass, Tube<Dim>::finite(t_c, x0, omega, F.k)});
    }
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.w < b.w; });
  double dropped = 0.0;
  std::size_t first = 0;
  while (first < entries.size() && dropped + entries[first].w <= opt.drop_budget)
    dropped += entries[first++].w;
  double sum = 0.0;
  for (std::size_t i = first; i < entries.size(); ++i) sum += entries[i].w;
  const double scale = sum > 1.0 ? 1.0 / sum : 1.0;
  for (std::size_t i = first; i < entries.size(); ++i) {
    if (entries[i].w <= 0.0) continue;
    F.tubes.push_back(entries[i].tube);
    F.weights.push_back(entries[i].w * scale);
  }
  return F;
}

struct BlueOptions {
  double window = 16.0;
  double dt = 0.25;
  double c_exc = 1.0;       // greedy threshold c * delta^2
  double dilation = 4.0;    // C of the covering step
  double drop_fraction = 0.01;  // discarded weight, as a fraction of c * delta^2
};

template <int Dim>
struct BlueExceptionalResult {
  std::vector<Tube<Dim>> tubes;
  std::vector<double> slab_centres;
  std::vector<std::size_t> family_sizes;
  std::vector<int> iterations;
  bool search_resolution_warning = false;
};

/// Centres of the length-2^k slabs tiling [-window, window] (one slab when
/// 2^k exceeds the window).
inline std::vector<double> slab_centres(double window, int k) {
  const double len = std::ldexp(1.0, k);
  const int count = std::max(1, static_cast<int>(std::ceil(2.0 * window / len - 1e-9)));
  std::vector<double> out;
  if (count == 1) return {0.0};
  for (int s = 0; s < count; ++s) out.push_back(-window + (s + 0.5) * len);
  return out;
}

template <int Dim>
BlueExceptionalResult<Dim> exceptional_tubes_for_blue(const SpectralWave<Dim>& psi, double delta,
                                                      const BlueOptions& opt = {}) {
  if (psi.color() != Color::blue) throw Error("exceptional tubes need a blue wave");
  BlueExceptionalResult<Dim> out;
  if (psi.is_zero()) return out;
  const double threshold = opt.c_exc * delta * delta;
  CoverOptions cover;
  cover.dilation = opt.dilation;
  const double L = psi.lattice().box_length();
  for (double tc : slab_centres(opt.window, psi.k())) {
    SectorWeightOptions<Dim> sw;
    sw.drop_budget = opt.drop_fraction * threshold;
    const auto F = sector_weights(psi, tc, sw);
    const auto res = greedy_tube_cover(F, threshold, L, cover, Dim == 2);
    out.slab_centres.push_back(tc);
    out.family_sizes.push_back(F.tubes.size());
    out.iterations.push_back(res.iterations);
    out.search_resolution_warning = out.search_resolution_warning || res.search_resolution_warning;
    out.tubes.insert(out.tubes.end(), res.tubes.begin(), res.tubes.end());
  }
  return out;
}

/// Bad cubes that touch no 3-dilated exceptional tube.
template <int Dim>
std::vector<CubeNorm<Dim>> uncovered_cubes(const std::vector<CubeNorm<Dim>>& bad,
                                           const std::vector<Tube<Dim>>& tubes, double period,
                                           double dilation = 3.0) {
  std::vector<Tube<Dim>> grown;
  for (const auto& T : tubes) grown.push_back(dilate(T, dilation));
  std::vector<CubeNorm<Dim>> out;
  for (const auto& c : bad)
    if (std::none_of(grown.begin(), grown.end(),
                     [&](const Tube<Dim>& T) { return cube_touches_tube(c.cube, T, period); }))
      out.push_back(c);
  return out;
}

}  // namespace conewave
