#pragma once

// Concentration-driven mass removal for red waves: locate the window-spanning
// tube carrying the largest L^2_t L^inf_x norm, turn its pointwise maximisers
// into an extractor wave F, subtract the best multiple of F, repeat.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "conewave/errors.hpp"
#include "conewave/geometry.hpp"
#include "conewave/quadrature.hpp"
#include "conewave/sampler.hpp"
#include "conewave/synthesis.hpp"
#include "conewave/wave.hpp"

namespace conewave {

struct SearchOptions {
  double direction_step = 1.0 / 16.0;
  double offset_step = 0.5;
  double max_angle = kSectorAngle;
};

/// Directions within max_angle of e1 on a grid of spacing `step`: signed
/// angles j * step for n = 2, a square grid of tangent offsets otherwise.
template <int Dim>
std::vector<Vec<Dim>> search_directions(const SearchOptions& opt) {
  std::vector<Vec<Dim>> out;
  const int J = static_cast<int>(std::floor(opt.max_angle / opt.direction_step + 1e-9));
  if constexpr (Dim == 2) {
    for (int j = -J; j <= J; ++j) out.push_back(direction_from_angle<2>(j * opt.direction_step));
  } else {
    const int width = 2 * J + 1;
    int combos = 1;
    for (int i = 1; i < Dim; ++i) combos *= width;
    for (int c = 0; c < combos; ++c) {
      Vec<Dim> tangent{};
      int code = c;
      for (int i = 1; i < Dim; ++i) {
        tangent[i] = (code % width - J) * opt.direction_step;
        code /= width;
      }
      const double rho = norm<Dim>(tangent);
      if (rho > opt.max_angle + 1e-12) continue;
      Vec<Dim> w{};
      w[0] = std::cos(rho);
      if (rho > 0.0)
        for (int i = 1; i < Dim; ++i) w[i] = std::sin(rho) * tangent[i] / rho;
      out.push_back(w);
    }
  }
  return out;
}

template <int Dim>
struct TubeSearchResult {
  Tube<Dim> tube;
  double value = 0.0;  // || phi ||_{L^2_t L^inf_x(T)}
  std::size_t exact_evaluations = 0;
  std::size_t candidates = 0;
};

/// Scheme used by the extraction loop: h <= 1/4 with point values exact.
template <int Dim>
QuadratureScheme<Dim> extraction_scheme(const SpectralWave<Dim>& phi, double window, double dt) {
  QuadratureScheme<Dim> q{window, dt, phi.lattice().box_length(),
                          unit_grid_points(phi.lattice().box_length(), 0.25, 1)};
  q.validate();
  return q;
}

namespace detail {

/// Max of `in` over the axis-aligned square of half-width R (grid units),
/// periodic, separable.
template <int Dim>
void square_max_filter(const std::vector<double>& in, std::vector<float>& out, int M, int R) {
  std::vector<double> a = in, b(in.size());
  std::size_t stride = 1;
  for (int axis = Dim - 1; axis >= 0; --axis) {
    const std::size_t outer = a.size() / (stride * M);
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t s = 0; s < stride; ++s) {
        const std::size_t base = o * stride * M + s;
        for (int j = 0; j < M; ++j) {
          double m = 0.0;
          for (int d = -R; d <= R; ++d)
            m = std::max(m, a[base + static_cast<std::size_t>(positive_mod(j + d, M)) * stride]);
          b[base + static_cast<std::size_t>(j) * stride] = m;
        }
      }
    std::swap(a, b);
    stride *= M;
  }
  out.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    out[i] = std::nextafter(static_cast<float>(a[i]), std::numeric_limits<float>::max());
}

}  // namespace detail

/// Exact maximiser of || phi ||_{L^2_t L^inf_x(T)} over window-spanning unit
/// tubes with directions from search_directions and offsets x0 (at t = 0) on
/// the grid of spacing offset_step. Branch and bound: a square max-filter of
/// |phi|^2 bounds every candidate, candidates are evaluated exactly in
/// decreasing bound order until no bound can beat the incumbent. Ties go to
/// the first candidate in (direction, offset) order.
template <int Dim>
std::optional<TubeSearchResult<Dim>> best_tube(const SpectralWave<Dim>& phi,
                                               const QuadratureScheme<Dim>& q,
                                               const SearchOptions& opt = {}) {
  if (phi.is_zero()) return std::nullopt;
  q.validate();
  const int S = q.time_samples();
  const int M = q.points;
  const double h = q.step();
  const double L = q.box_length;
  GridSampler<Dim> sampler(L, M);
  std::vector<std::vector<double>> inten(S);
  std::vector<std::vector<float>> bound(S);
  const int R = static_cast<int>(std::ceil((1.0 + 0.5 * h * std::sqrt(Dim)) / h));
  for (int s = 0; s < S; ++s) {
    sampler.intensity(phi, q.time(s), inten[s]);
    detail::square_max_filter<Dim>(inten[s], bound[s], M, R);
  }

  const auto dirs = search_directions<Dim>(opt);
  const int per_axis = std::max(1, static_cast<int>(std::lround(L / opt.offset_step)));
  std::size_t offsets = 1;
  for (int i = 0; i < Dim; ++i) offsets *= static_cast<std::size_t>(per_axis);
  auto offset_point = [&](std::size_t o) {
    Vec<Dim> x;
    for (int i = Dim - 1; i >= 0; --i) {
      x[i] = static_cast<double>(o % per_axis) * opt.offset_step;
      o /= per_axis;
    }
    return x;
  };
  auto nearest_flat = [&](const Vec<Dim>& c) {
    std::size_t f = 0;
    for (int i = 0; i < Dim; ++i)
      f = f * M + static_cast<std::size_t>(positive_mod(static_cast<int>(std::lround(c[i] / h)), M));
    return f;
  };

  const std::size_t total = dirs.size() * offsets;
  std::vector<float> ub(total, 0.0f);
  for (std::size_t d = 0; d < dirs.size(); ++d)
    for (std::size_t o = 0; o < offsets; ++o) {
      const Vec<Dim> x0 = offset_point(o);
      double acc = 0.0;
      for (int s = 0; s < S; ++s) acc += bound[s][nearest_flat(x0 + q.time(s) * dirs[d])];
      ub[d * offsets + o] = std::nextafter(static_cast<float>(acc), std::numeric_limits<float>::max());
    }
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ub[a] > ub[b]; });

  TubeSearchResult<Dim> best;
  best.candidates = total;
  double best_sum = -1.0;
  std::size_t best_index = total;
  for (std::size_t idx : order) {
    if (ub[idx] < best_sum) break;
    const std::size_t d = idx / offsets;
    const Tube<Dim> T = Tube<Dim>::window_spanning(0.0, offset_point(idx % offsets), dirs[d]);
    double sum = 0.0;
    for (int s = 0; s < S; ++s) {
      double m = 0.0;
      for_each_tube_point<Dim>(q, T, q.time(s), [&](std::size_t f) { m = std::max(m, inten[s][f]); });
      sum += m;
    }
    ++best.exact_evaluations;
    if (sum > best_sum || (sum == best_sum && idx < best_index)) {
      best_sum = sum;
      best_index = idx;
      best.tube = T;
    }
  }
  best.value = std::sqrt(best_sum * q.dt);
  return best;
}

/// The best tube when its norm reaches `threshold`, otherwise nothing.
template <int Dim>
std::optional<TubeSearchResult<Dim>> find_concentrating_tube(const SpectralWave<Dim>& phi,
                                                             double threshold,
                                                             const QuadratureScheme<Dim>& q,
                                                             const SearchOptions& opt = {}) {
  auto r = best_tube(phi, q, opt);
  if (!r || r->value < threshold) return std::nullopt;
  return r;
}

template <int Dim>
struct DualWitness {
  std::vector<double> times;
  std::vector<Vec<Dim>> points;
  std::vector<Complex> f;       // unit L^2_t norm under dt weights
  std::vector<Complex> values;  // phi(t_i, x_i)
  double dt = 0.25;
  double norm = 0.0;            // || phi ||_{L^2_t L^inf_x(T)}

  /// sum_i dt phi(t_i, x_i) conj(f_i).
  Complex pairing() const {
    Complex s{};
    for (std::size_t i = 0; i < f.size(); ++i) s += dt * values[i] * std::conj(f[i]);
    return s;
  }
};

/// x(t_i): grid maximiser of |phi(t_i, .)| on the tube cross-section (first
/// in grid order on ties); f = g / ||g|| with g(t_i) = phi(t_i, x(t_i)).
template <int Dim>
DualWitness<Dim> dual_witness(const SpectralWave<Dim>& phi, const Tube<Dim>& tube,
                              const QuadratureScheme<Dim>& q) {
  q.validate();
  DualWitness<Dim> w;
  w.dt = q.dt;
  GridSampler<Dim> sampler(q.box_length, q.points);
  double sq = 0.0;
  for (int s = 0; s < q.time_samples(); ++s) {
    const double t = q.time(s);
    const auto v = sampler.sample(phi, t);
    double best = -1.0;
    std::size_t arg = 0;
    for_each_tube_point<Dim>(q, tube, t, [&](std::size_t f) {
      const double a = std::norm(v[f]);
      if (a > best || (a == best && f < arg)) {
        best = a;
        arg = f;
      }
    });
    if (best < 0.0) continue;
    w.times.push_back(t);
    w.points.push_back(sampler.position(arg));
    w.values.push_back(v[arg]);
    sq += q.dt * best;
  }
  w.norm = std::sqrt(sq);
  if (w.norm == 0.0) throw Error("tube norm vanishes; no dual witness");
  for (const auto& g : w.values) w.f.push_back(g / w.norm);
  return w;
}

/// Cutoff equal to 1 where the margin distance is >= inner and 0 below
/// target, smooth in between; the indicator of {d >= target} when
/// inner <= target.
inline double margin_cutoff(double d, double inner, double target) {
  if (d < target) return 0.0;
  if (inner <= target) return 1.0;
  return smooth_step((d - target) / (inner - target));
}

/// Red k = 0 extractor: c_plus(xi) = eta(xi) sum_i dt f_i e^{-2 pi i (t_i|xi| + x_i.xi)}.
template <int Dim>
SpectralWave<Dim> build_F(const DualWitness<Dim>& w, const FrequencyLattice<Dim>& lattice,
                          double margin_inner, double margin_target) {
  if (!(margin_target > 0.0)) throw InfeasibleMargin("extractor margin target must be positive");
  std::vector<Mode<Dim>> modes;
  for_each_sector_index<Dim>(lattice, 0, std::nextafter(margin_target, -1.0),
                             [&](const Index<Dim>& m, const Vec<Dim>& xi, double d) {
                               const double eta = margin_cutoff(d, margin_inner, margin_target);
                               if (eta == 0.0) return;
                               const double r = norm<Dim>(xi);
                               Complex s{};
                               for (std::size_t i = 0; i < w.f.size(); ++i) {
                                 const double ph = -2.0 * kPi * (w.times[i] * r + dot<Dim>(w.points[i], xi));
                                 s += w.f[i] * std::polar(1.0, ph);
                               }
                               modes.push_back({m, eta * w.dt * s, Complex{}});
                             });
  if (modes.empty()) throw InfeasibleMargin("no lattice frequency above the extractor margin");
  return SpectralWave<Dim>(lattice, Color::red, 0, std::move(modes));
}

struct MuResult {
  double mu = 0.0;
  double decrement = 0.0;
  bool clamped = false;
  double inner = 0.0;  // Re <phi, F>
  double mass_F = 0.0;
};

/// mu = clamp(Re<phi,F> / M(F), (0, 1]) and the exact mass decrement
/// M(phi) - M(phi - mu F) = 2 mu Re<phi,F> - mu^2 M(F).
template <int Dim>
MuResult optimal_mu(const SpectralWave<Dim>& phi, const SpectralWave<Dim>& F) {
  MuResult r;
  r.mass_F = mass(F);
  if (r.mass_F == 0.0) throw Error("extractor is the zero wave");
  r.inner = inner_product(phi, F).real();
  if (!(r.inner > 0.0)) throw NoDecrement("Re<phi, F> is not positive");
  r.mu = r.inner / r.mass_F;
  if (r.mu > 1.0) {
    r.mu = 1.0;
    r.clamped = true;
  }
  r.decrement = 2.0 * r.mu * r.inner - r.mu * r.mu * r.mass_F;
  return r;
}

template <int Dim>
struct TraceRecord {
  int iteration = 0;
  Tube<Dim> tube;          // undilated search tube
  double value = 0.0;      // tube norm of the current wave
  double inner = 0.0;      // Re <phi, F>
  double pairing = 0.0;    // time-domain pairing of the witness
  double mass_F = 0.0;
  double mu = 0.0;
  bool clamped = false;
  double mass_before = 0.0;
  double mass_after = 0.0;
  double decrement = 0.0;
  double margin_F = 0.0;
};

struct ExtractOptions {
  int max_iter = 200;
  double c_dilate = 0.5;   // recorded tubes are dilated by delta^{-c_dilate}
  double window = 16.0;
  double dt = 0.25;
  double margin_step = 0.0;  // 0: max(delta^10, 2/L)
  SearchOptions search;
};

template <int Dim>
struct ExtractionResult {
  std::vector<Tube<Dim>> tubes;  // dilated
  SpectralWave<Dim> remainder;
  std::vector<TraceRecord<Dim>> trace;
  std::vector<SpectralWave<Dim>> extractors;  // F_i before scaling by mu
  double final_concentration = 0.0;
  double threshold = 0.0;
  bool converged = true;  // false when max_iter stopped the loop
};

/// Iterated extraction until no search tube carries delta * M(phi)^{1/2}.
template <int Dim>
ExtractionResult<Dim> extract_profile(const SpectralWave<Dim>& phi, double delta,
                                      const ExtractOptions& opt = {}) {
  if (phi.color() != Color::red || phi.k() != 0)
    throw Error("extraction expects a red wave of frequency 1");
  ExtractionResult<Dim> out{{}, phi, {}, {}, 0.0, 0.0, true};
  if (phi.is_zero()) return out;
  const auto q = extraction_scheme(phi, opt.window, opt.dt);
  const double L = phi.lattice().box_length();
  const double step = opt.margin_step > 0.0 ? opt.margin_step
                                            : std::max(std::pow(delta, 10.0), 2.0 / L);
  const double m0 = margin(phi);
  const double target = m0 - step;
  if (!(target > 0.0)) throw InfeasibleMargin("wave margin too small for one margin step");
  out.threshold = delta * std::sqrt(mass(phi));
  const double lambda = std::pow(delta, -opt.c_dilate);

  SpectralWave<Dim> cur = phi;
  for (int it = 0;; ++it) {
    const auto found = best_tube(cur, q, opt.search);
    out.final_concentration = found ? found->value : 0.0;
    if (!found || found->value < out.threshold) break;
    if (it == opt.max_iter) {
      out.converged = false;
      break;
    }
    const auto w = dual_witness(cur, found->tube, q);
    const auto F = build_F(w, cur.lattice(), margin(cur), target);
    const auto mu = optimal_mu(cur, F);
    TraceRecord<Dim> rec;
    rec.iteration = it + 1;
    rec.tube = found->tube;
    rec.value = found->value;
    rec.inner = mu.inner;
    rec.pairing = w.pairing().real();
    rec.mass_F = mu.mass_F;
    rec.mu = mu.mu;
    rec.clamped = mu.clamped;
    rec.mass_before = mass(cur);
    rec.decrement = mu.decrement;
    rec.margin_F = margin(F);
    cur = cur.plus_scaled(F, -mu.mu).with_metadata(Color::red, 0);
    rec.mass_after = mass(cur);
    out.trace.push_back(rec);
    out.extractors.push_back(F);
    out.tubes.push_back(dilate(found->tube, lambda));
  }
  out.remainder = cur;
  return out;
}

}  // namespace conewave
