#pragma once

// End-to-end assembly: one tube family per red wave, reused for every blue
// wave; time-interval partitions; the matched train/tube sharpness table.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "conewave/extraction.hpp"
#include "conewave/geometry.hpp"
#include "conewave/quadrature.hpp"
#include "conewave/synthesis.hpp"
#include "conewave/wave.hpp"

namespace conewave {

struct ProfileOptions {
  double c_comp = 1.0;  // extraction runs at delta' = delta^c / c
  ExtractOptions extract;
};

inline double composed_delta(double delta, double c_comp) {
  return std::pow(delta, c_comp) / c_comp;
}

/// Tube family of phi alone (no blue wave enters).
template <int Dim>
ExtractionResult<Dim> universal_tube_family(const SpectralWave<Dim>& phi, double delta,
                                            const ProfileOptions& opt = {}) {
  return extract_profile(phi, composed_delta(delta, opt.c_comp), opt.extract);
}

/// A labelled blue wave of the test suite.
template <int Dim>
struct SuiteWave {
  std::string label;
  int k = 0;
  std::uint64_t seed = 0;
  bool adversarial = false;
  SpectralWave<Dim> wave;
};

/// Random blue waves: `per_k` seeds for each k, seeds base + 1000 k + i.
template <int Dim>
std::vector<SuiteWave<Dim>> random_blue_suite(const FrequencyLattice<Dim>& lattice,
                                              const std::vector<int>& ks, int per_k,
                                              std::uint64_t base_seed, double m_min = 0.05) {
  std::vector<SuiteWave<Dim>> out;
  for (int k : ks)
    for (int i = 0; i < per_k; ++i) {
      const std::uint64_t seed = base_seed + 1000u * static_cast<std::uint64_t>(k) + i;
      out.push_back({"random", k, seed, false,
                     random_colored_wave<Dim>(lattice, Color::blue, k, m_min, seed)});
    }
  return out;
}

/// Blue tube packets riding along the axis of `axis`: one per (k, t0), with
/// the packet centre moved to the axis point at t0.
template <int Dim>
std::vector<SuiteWave<Dim>> adversarial_blue_suite(
    const FrequencyLattice<Dim>& lattice, const Tube<Dim>& axis,
    const std::vector<std::pair<int, double>>& placements) {
  std::vector<SuiteWave<Dim>> out;
  for (const auto& [k, t0] : placements)
    out.push_back({"adversarial", k, 0, true,
                   make_blue_tube_wave<Dim>(lattice, t0, axis.axis_point(t0), axis.omega, k)});
  return out;
}

/// Placements used by the acceptance run: k = 2 at t = 0, k = 3 at t = -4, 0, 4.
inline std::vector<std::pair<int, double>> default_adversarial_placements() {
  return {{2, 0.0}, {3, -4.0}, {3, 0.0}, {3, 4.0}};
}

template <int Dim>
struct ProfileRecord {
  std::string label;
  int k = 0;
  std::uint64_t seed = 0;
  bool adversarial = false;
  double full_ratio = 0.0;     // ||phi psi||_{L^2} / (M M)^{1/2}
  double outside_ratio = 0.0;  // same outside the tubes
};

template <int Dim>
struct ProfileReport {
  double delta = 0.0;
  double bound = 0.0;  // C_v * delta
  std::vector<Tube<Dim>> tubes;
  std::vector<ProfileRecord<Dim>> records;
  bool passed = true;
};

/// Slice integrals of |phi psi|^2 for every suite wave and region; waves of
/// equal k share one quadrature grid. Result indexed [wave][region][slice].
template <int Dim>
std::vector<std::vector<std::vector<double>>> suite_slice_integrals(
    const SpectralWave<Dim>& phi, const std::vector<SuiteWave<Dim>>& suite,
    const std::vector<Region<Dim>>& regions, double window, double dt) {
  std::vector<std::vector<std::vector<double>>> out(suite.size());
  std::vector<int> ks;
  for (const auto& s : suite) ks.push_back(s.k);
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  for (int k : ks) {
    std::vector<std::size_t> idx;
    std::vector<SpectralWave<Dim>> waves;
    int span = 0;
    for (std::size_t i = 0; i < suite.size(); ++i)
      if (suite[i].k == k) {
        idx.push_back(i);
        waves.push_back(suite[i].wave);
        span = std::max(span, support_span(suite[i].wave));
      }
    const auto q = QuadratureScheme<Dim>::for_spans(window, dt, phi.lattice().box_length(),
                                                    span + support_span(phi));
    auto r = product_slice_integrals<Dim>(phi, waves, regions, q);
    for (std::size_t j = 0; j < idx.size(); ++j) out[idx[j]] = std::move(r[j]);
  }
  return out;
}

/// Ratios of every suite wave against phi over the whole window and outside
/// the given tubes.
template <int Dim>
ProfileReport<Dim> verify_profile(const SpectralWave<Dim>& phi, const std::vector<Tube<Dim>>& tubes,
                                  double delta, const std::vector<SuiteWave<Dim>>& suite,
                                  double c_v, double window, double dt) {
  ProfileReport<Dim> rep;
  rep.delta = delta;
  rep.bound = c_v * delta;
  rep.tubes = tubes;
  const std::vector<Region<Dim>> regions{Region<Dim>::everything(), Region<Dim>::outside(tubes)};
  const auto r = suite_slice_integrals(phi, suite, regions, window, dt);
  const double mphi = mass(phi);
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const auto& s = suite[i];
    ProfileRecord<Dim> rec{s.label, s.k, s.seed, s.adversarial, 0.0, 0.0};
    const double norm = std::sqrt(mphi * mass(s.wave));
    if (norm > 0.0) {
      rec.full_ratio = l2_from_slices(r[i][0], dt) / norm;
      rec.outside_ratio = l2_from_slices(r[i][1], dt) / norm;
    }
    rep.passed = rep.passed && rec.outside_ratio <= rep.bound;
    rep.records.push_back(rec);
  }
  return rep;
}

struct TimeInterval {
  int first_slice = 0;
  int end_slice = 0;  // exclusive
  double t_begin = 0.0;
  double t_end = 0.0;
  double integral = 0.0;  // int_I g
};

/// g(t_s) = sum_beta (max over the slice of T_beta of |phi(t_s, .)|)^2.
template <int Dim>
std::vector<double> tube_energy_profile(const SpectralWave<Dim>& phi,
                                        const std::vector<Tube<Dim>>& tubes,
                                        const QuadratureScheme<Dim>& q) {
  q.validate();
  std::vector<double> g(q.time_samples(), 0.0);
  if (phi.is_zero() || tubes.empty()) return g;
  GridSampler<Dim> sampler(q.box_length, q.points);
  std::vector<double> inten;
  for (int s = 0; s < q.time_samples(); ++s) {
    sampler.intensity(phi, q.time(s), inten);
    for (const auto& T : tubes) {
      double m = 0.0;
      for_each_tube_point<Dim>(q, T, q.time(s), [&](std::size_t f) { m = std::max(m, inten[f]); });
      g[s] += m;
    }
  }
  return g;
}

/// Left-to-right split of the window: an interval is closed as soon as the
/// next slice would push int_I g above delta^2; a slice that alone exceeds
/// delta^2 becomes a one-slice interval. Every two consecutive intervals
/// carry more than delta^2, so count <= 1 + 2 int g / delta^2.
inline std::vector<TimeInterval> partition_by_energy(const std::vector<double>& g, double dt,
                                                     double window, double delta) {
  const double cap = delta * delta;
  std::vector<TimeInterval> out;
  TimeInterval cur{0, 0, -window, -window, 0.0};
  const int S = static_cast<int>(g.size());
  for (int s = 0; s < S; ++s) {
    const double v = dt * g[s];
    if (cur.end_slice > cur.first_slice && cur.integral + v > cap) {
      out.push_back(cur);
      cur = {s, s, -window + s * dt, -window + s * dt, 0.0};
    }
    cur.integral += v;
    cur.end_slice = s + 1;
    cur.t_end = -window + (s + 1) * dt;
  }
  if (cur.end_slice > cur.first_slice || out.empty()) {
    if (out.empty()) cur.t_end = window;
    out.push_back(cur);
  }
  return out;
}

template <int Dim>
std::vector<TimeInterval> fungibility_partition(const SpectralWave<Dim>& phi,
                                                const std::vector<Tube<Dim>>& tubes, double delta,
                                                const QuadratureScheme<Dim>& q) {
  return partition_by_energy(tube_energy_profile(phi, tubes, q), q.dt, q.window, delta);
}

struct FungibilityRecord {
  std::string label;
  int k = 0;
  std::uint64_t seed = 0;
  double max_ratio = 0.0;  // over intervals
  int worst_interval = 0;
};

struct FungibilityReport {
  double bound = 0.0;
  std::vector<FungibilityRecord> records;
  bool passed = true;
};

/// Per interval I and suite wave, ||phi psi||_{L^2(I x torus)} / (M M)^{1/2}.
template <int Dim>
FungibilityReport verify_fungibility(const SpectralWave<Dim>& phi,
                                     const std::vector<TimeInterval>& intervals,
                                     const std::vector<SuiteWave<Dim>>& suite, double delta,
                                     double c_f, double window, double dt) {
  FungibilityReport rep;
  rep.bound = c_f * delta;
  const auto r = suite_slice_integrals(phi, suite, {Region<Dim>::everything()}, window, dt);
  const double mphi = mass(phi);
  for (std::size_t w = 0; w < suite.size(); ++w) {
    const auto& s = suite[w];
    FungibilityRecord rec{s.label, s.k, s.seed, 0.0, 0};
    const double norm = std::sqrt(mphi * mass(s.wave));
    if (norm > 0.0) {
      for (std::size_t i = 0; i < intervals.size(); ++i) {
        const auto& I = intervals[i];
        const std::span<const double> part(r[w][0].data() + I.first_slice,
                                           static_cast<std::size_t>(I.end_slice - I.first_slice));
        const double ratio = l2_from_slices(part, dt) / norm;
        if (ratio > rec.max_ratio) {
          rec.max_ratio = ratio;
          rec.worst_interval = static_cast<int>(i);
        }
      }
    }
    rep.passed = rep.passed && rec.max_ratio <= rep.bound;
    rep.records.push_back(rec);
  }
  return rep;
}

struct SharpnessRow {
  int k = 0;
  std::uint64_t seed = 0;
  double rho = 0.0;        // ||phi psi||_2 / (M M)^{1/2}
  double lp_ratio = 0.0;   // ||phi psi||_p / (M M)^{1/2}
  double lp_scaled = 0.0;  // lp_ratio * 2^{-k (1/p - 1/2)}
  double p = 0.0;
};

/// Matched constructions per k: the blue packet on the tube T(0, x0, omega, k)
/// and the normalized random-sign cube train on the same tube.
template <int Dim>
std::vector<SharpnessRow> sharpness_experiment(const std::vector<int>& ks,
                                               const std::vector<std::uint64_t>& seeds,
                                               double box_length, double window, double dt,
                                               const Vec<Dim>& omega) {
  const double p = (Dim + 3.0) / (Dim + 1.0);
  Vec<Dim> x0;
  x0.fill(0.5 * box_length);
  std::vector<SharpnessRow> rows;
  for (int k : ks) {
    const int N = lattice_points_for(box_length, k);
    const FrequencyLattice<Dim> lattice(N, box_length);
    const auto psi = make_blue_tube_wave<Dim>(lattice, 0.0, x0, omega, k);
    const auto tube = Tube<Dim>::finite(0.0, x0, omega, k);
    for (std::uint64_t seed : seeds) {
      const auto phi = normalize_mass(
          make_red_cube_train<Dim>(lattice, tube, uniform_train_coefficients(tube), seed));
      const auto q = scheme_for(phi, psi, window, dt);
      const auto [l2, lp] = product_l2_and_lp(phi, psi, p, q);
      const double norm = std::sqrt(mass(phi) * mass(psi));
      SharpnessRow row;
      row.k = k;
      row.seed = seed;
      row.p = p;
      row.rho = l2 / norm;
      row.lp_ratio = lp / norm;
      row.lp_scaled = row.lp_ratio * std::pow(2.0, -k * (1.0 / p - 0.5));
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace conewave
