// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Exit status 0 when every criterion passes, 1 otherwise.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "conewave/conewave.hpp"

using namespace conewave;
namespace cal = conewave::calibration;

namespace {

constexpr double kL = 64.0;
constexpr double kWindow = 16.0;
constexpr double kDt = 0.25;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

// Wall-clock limits in seconds, 0 where none applies.
constexpr double kBudget[11] = {0, 60, 0, 300, 0, 300, 0, 600, 600, 0, 0};

void verdict(int id, bool ok, double secs, const std::string& summary) {
  const bool in_time = kBudget[id] == 0 || secs < kBudget[id];
  std::printf("criterion %2d: %s  (%.1fs)  %s\n", id, ok && in_time ? "PASS" : "FAIL", secs,
              summary.c_str());
  if (!in_time) std::printf("    runtime %.1fs exceeds %.0fs\n", secs, kBudget[id]);
  if (!(ok && in_time)) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// 1. Mass conservation of the sampled L^2_x norm.
void conservation() {
  const auto t0 = Clock::now();
  const FrequencyLattice<2> lat(lattice_points_for(kL, 3), kL);
  const double times[] = {-16.0, -12.0, -8.0, -4.0, 0.0, 4.0, 8.0, 12.0, 16.0};
  double worst = 0.0;
  for (int s = 0; s < 100; ++s) {
    const int k = s % 4;
    const Color c = s % 2 == 0 ? Color::red : Color::blue;
    const auto w = random_colored_wave<2>(lat, c, c == Color::red ? 0 : k, 0.05, 5000 + s);
    GridSampler<2> sampler(kL, unit_grid_points(kL, 0.25, support_span(w)));
    const double m = mass(w);
    for (double t : times) {
      const double l2 = grid_l2_squared(sampler.sample(w, t), sampler.cell_volume());
      worst = std::max(worst, std::abs(l2 - m) / m);
    }
  }
  verdict(1, worst <= 1e-9, seconds_since(t0), fmt("max relative drift %.3e (bound 1e-9)", worst));
}

// 2. Spectral pairing <phi(0), F(0)> against the witness pairing.
void duality() {
  const auto t0 = Clock::now();
  const FrequencyLattice<2> lat(lattice_points_for(kL, 0), kL);
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto phi = random_colored_wave<2>(lat, Color::red, 0, 0.1, 6000 + i / 4);
    const auto q = extraction_scheme(phi, kWindow, kDt);
    const auto om = direction_from_angle<2>((2.0 * u(rng) - 1.0) * kSectorAngle);
    const auto T = Tube<2>::window_spanning(0.0, {u(rng) * kL, u(rng) * kL}, om);
    const auto w = dual_witness(phi, T, q);
    const auto F = build_F(w, lat, margin(phi), margin(phi) - 0.05);
    const Complex spectral = inner_product(phi, F);
    const Complex direct = w.pairing();
    worst = std::max(worst, std::abs(spectral - direct) / std::abs(direct));
  }
  verdict(2, worst <= 1e-6, seconds_since(t0), fmt("max relative mismatch %.3e (bound 1e-6)", worst));
}

// 3. Bilinear ratio uniform in k.
void bilinear_uniformity() {
  const auto t0 = Clock::now();
  const FrequencyLattice<2> lat(lattice_points_for(kL, 3), kL);
  double per_k[4] = {0, 0, 0, 0};
  for (int k = 0; k <= 3; ++k)
    for (int i = 0; i < 25; ++i) {
      const auto phi = random_colored_wave<2>(lat, Color::red, 0, 0.05, 7000 + 100 * k + i);
      const auto psi = random_colored_wave<2>(lat, Color::blue, k, 0.05, 8000 + 100 * k + i);
      const auto q = scheme_for(phi, psi, kWindow, kDt);
      const double r = product_l2(phi, psi, Region<2>::everything(), q) /
                       std::sqrt(mass(phi) * mass(psi));
      per_k[k] = std::max(per_k[k], r);
    }
  for (int k = 0; k <= 3; ++k) std::printf("    k=%d max ratio %.4f\n", k, per_k[k]);
  const double top = *std::max_element(per_k, per_k + 4);
  const bool ok = per_k[3] <= 2.0 * per_k[0] && top <= cal::C_star;
  char buf[160];
  std::snprintf(buf, sizeof buf, "ratio(k=3)/ratio(k=0) %.3f (bound 2), max %.4f (C* %.2f)",
                per_k[3] / per_k[0], top, cal::C_star);
  verdict(3, ok, seconds_since(t0), buf);
}

// 4. Sharpness of the bilinear estimate on the tube/train pair.
void sharpness() {
  const auto t0 = Clock::now();
  const auto rows = sharpness_experiment<2>({0, 1, 2, 3}, {1, 2, 3}, kL, kWindow, kDt,
                                            direction_from_angle<2>(12.0 * kPi / 180.0));
  double mean[4] = {0, 0, 0, 0}, floor = 1e300, lp = 0.0;
  for (const auto& r : rows) {
    mean[r.k] += r.rho / 3.0;
    floor = std::min(floor, r.rho);
    lp = std::max(lp, r.lp_scaled);
    std::printf("    k=%d seed=%llu rho %.4f lp %.4f scaled %.4f\n", r.k,
                static_cast<unsigned long long>(r.seed), r.rho, r.lp_ratio, r.lp_scaled);
  }
  const double spread = *std::max_element(mean, mean + 4) / *std::min_element(mean, mean + 4);
  const bool ok = spread <= 3.0 && floor >= cal::rho_min && lp <= cal::K_lp;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "rho spread %.3f (bound 3), min rho %.4f (floor %.2f), max scaled Lp %.4f (bound %.2f)",
                spread, floor, cal::rho_min, lp, cal::K_lp);
  verdict(4, ok, seconds_since(t0), buf);
}

// 5. Greedy tube cover.
void covering() {
  const auto t0 = Clock::now();
  bool ok = true;
  for (double delta : {0.5, 0.25, 0.1}) {
    int max_it = 0;
    std::size_t max_tubes = 0;
    double max_res = 0.0;
    for (int s = 0; s < 20; ++s) {
      const auto F = random_separated_family<2>(200, s % 4, kL, 9000 + s, 3 + s % 5);
      const auto r = greedy_tube_cover(F, delta, kL);
      const double res = verify_pointwise_bound(F, r.tubes, 100000, s, kL);
      max_it = std::max(max_it, r.iterations);
      max_tubes = std::max(max_tubes, r.tubes.size());
      max_res = std::max(max_res, res);
    }
    const int cap = static_cast<int>(std::ceil(2.0 / delta - 1e-12));
    const double budget = cal::K_cov * std::pow(delta, -3.0);
    const bool row = max_it <= cap && max_tubes <= budget && max_res <= delta;
    std::printf("    delta=%.2f iterations %d/%d tubes %zu/%.0f residual %.4f\n", delta, max_it, cap,
                max_tubes, budget, max_res);
    ok = ok && row;
  }
  verdict(5, ok, seconds_since(t0), "iterations, tube count and residual within bounds");
}

// 6. Exceptional tubes of blue waves cover every bad cube.
void exceptional() {
  const auto t0 = Clock::now();
  const FrequencyLattice<2> lat(lattice_points_for(kL, 3), kL);
  const Vec<2> x0{kL / 2, kL / 2};
  BlueOptions opt;
  opt.window = kWindow;
  opt.dt = kDt;
  const double deltas[] = {0.2, 0.1};
  std::size_t uncovered = 0, max_count[2] = {0, 0}, bad_total[2] = {0, 0};
  for (int s = 0; s < 24; ++s) {
    const auto psi = s < 20 ? random_colored_wave<2>(lat, Color::blue, s % 4, 0.05, 10000 + s)
                            : make_blue_tube_wave<2>(lat, 0.0, x0,
                                                     direction_from_angle<2>(0.1 * (s - 21)), s - 20);
    const auto norms = unit_cube_norms(psi, cube_scan_scheme(psi, kWindow, kDt));
    for (int d = 0; d < 2; ++d) {
      const double bar = deltas[d] * std::sqrt(mass(psi));
      std::vector<CubeNorm<2>> bad;
      for (const auto& c : norms)
        if (c.norm > bar) bad.push_back(c);
      const auto res = exceptional_tubes_for_blue(psi, deltas[d], opt);
      uncovered += uncovered_cubes(bad, res.tubes, kL).size();
      max_count[d] = std::max(max_count[d], res.tubes.size());
      bad_total[d] += bad.size();
    }
  }
  bool ok = uncovered == 0;
  for (int d = 0; d < 2; ++d) {
    const double budget = cal::K_exc * std::pow(deltas[d], -cal::K_e);
    std::printf("    delta=%.1f bad cubes %zu max tubes %zu (budget %.0f)\n", deltas[d], bad_total[d],
                max_count[d], budget);
    ok = ok && max_count[d] <= budget;
  }
  verdict(6, ok, seconds_since(t0), fmt("uncovered bad cubes %.0f", static_cast<double>(uncovered)));
}

struct TrainCase {
  FrequencyLattice<2> lattice{lattice_points_for(kL, 3), kL};
  Vec<2> x0{kL / 2, kL / 2};
  Vec<2> omega = direction_from_angle<2>(12.0 * kPi / 180.0);
  SpectralWave<2> phi = normalize_mass(make_red_cube_train<2>(
      lattice, Tube<2>::finite(0.0, x0, omega, 3),
      uniform_train_coefficients(Tube<2>::finite(0.0, x0, omega, 3)), 7));
};

// 7. Extraction on the cube-train wave.
ExtractionResult<2> extraction(const TrainCase& tc, double delta) {
  const auto t0 = Clock::now();
  ExtractOptions opt;
  opt.window = kWindow;
  opt.dt = kDt;
  opt.c_dilate = cal::c_dilate;
  const auto r = extract_profile(tc.phi, delta, opt);
  bool ok = !r.trace.empty() && r.converged;
  const double angle = ok ? angle_between<2>(r.trace.front().tube.omega, tc.omega) : 1.0;
  const double floor = cal::c_dec * delta * delta / std::log(1.0 / delta);
  const int cap = static_cast<int>(std::ceil(1.0 / (cal::c_dec * delta * delta * delta)));
  double min_dec = 1e300, max_mass_F = 0.0;
  for (const auto& t : r.trace) {
    min_dec = std::min(min_dec, t.decrement);
    max_mass_F = std::max(max_mass_F, t.mass_F);
    std::printf("    step %d angle %.4f value %.4f mu %.4f decrement %.5f mass(F) %.4f\n", t.iteration,
                std::atan2(t.tube.omega[1], t.tube.omega[0]), t.value, t.mu, t.decrement, t.mass_F);
  }
  // Off-tube smallness of each extractor on random probe tubes.
  const auto q = extraction_scheme(tc.phi, kWindow, kDt);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double off = 0.0;
  for (std::size_t i = 0; i < r.extractors.size(); ++i) {
    const double mf = std::sqrt(mass(r.extractors[i]));
    for (int got = 0; got < 20;) {
      const auto om = direction_from_angle<2>((2.0 * u(rng) - 1.0) * kSectorAngle);
      const auto P = Tube<2>::window_spanning(0.0, {u(rng) * kL, u(rng) * kL}, om);
      if (!tubes_disjoint(P, r.tubes[i], kWindow, kL)) continue;
      ++got;
      off = std::max(off, l2t_linfx_on_tube(r.extractors[i], P, q) / mf);
    }
  }
  const double mass_F_bound = cal::K_F * std::log(1.0 / delta);
  std::printf("    first-tube angle error %.4f (bound 1/16), min decrement %.5f (floor %.5f)\n", angle,
              min_dec, floor);
  std::printf("    steps %zu (cap %d), remainder concentration %.4f (threshold %.4f)\n", r.trace.size(),
              cap, r.final_concentration, r.threshold);
  std::printf("    max mass(F) %.4f (bound %.4f), off-tube ratio %.4f (bound %.2f)\n", max_mass_F,
              mass_F_bound, off, cal::eps_off);
  ok = ok && angle <= 1.0 / 16.0 && min_dec >= floor && static_cast<int>(r.trace.size()) <= cap &&
       r.final_concentration < r.threshold && max_mass_F <= mass_F_bound && off <= cal::eps_off;
  verdict(7, ok, seconds_since(t0), "direction, decrement floor, step cap, remainder");
  return r;
}

std::vector<SuiteWave<2>> profile_suite(const TrainCase& tc) {
  auto suite = random_blue_suite<2>(tc.lattice, {0, 1, 2, 3}, 10, 500);
  const auto adv = adversarial_blue_suite<2>(
      tc.lattice, Tube<2>::window_spanning(0.0, tc.x0, tc.omega), default_adversarial_placements());
  suite.insert(suite.end(), adv.begin(), adv.end());
  return suite;
}

// 8. Profile decomposition with the universal family.
void profile(const TrainCase& tc, const ExtractionResult<2>& fam, const std::vector<SuiteWave<2>>& suite,
             double delta, double extraction_secs) {
  const auto t0 = Clock::now();
  const auto rep = verify_profile(tc.phi, fam.tubes, delta, suite, cal::C_v, kWindow, kDt);
  double worst_random = 0.0, min_adv_full = 1e300;
  for (const auto& r : rep.records) {
    if (r.adversarial) {
      min_adv_full = std::min(min_adv_full, r.full_ratio);
      std::printf("    adversarial k=%d full %.4f outside %.4f\n", r.k, r.full_ratio, r.outside_ratio);
    } else {
      worst_random = std::max(worst_random, r.outside_ratio);
    }
  }
  bool near_axis = false;
  for (const auto& T : fam.tubes)
    near_axis = near_axis || (angle_between<2>(T.omega, tc.omega) <= 1.0 / 16.0 &&
                              torus_norm<2>(T.axis_point(0.0) - tc.x0, kL) <= 2.0);
  const double budget = cal::K_u * std::pow(delta, -cal::K_p);
  std::printf("    tubes %zu (budget %.0f), random max outside %.4f, bound %.3f\n", fam.tubes.size(),
              budget, worst_random, rep.bound);
  const bool ok = rep.passed && min_adv_full >= 5.0 * rep.bound && near_axis &&
                  fam.tubes.size() <= budget;
  verdict(8, ok, seconds_since(t0) + extraction_secs,
          fmt("outside ratios within C_v delta; adversarial full ratio min %.4f", min_adv_full));
}

// 9. Fungibility of the bilinear estimate.
void fungibility(const TrainCase& tc, const ExtractionResult<2>& fam,
                 const std::vector<SuiteWave<2>>& suite, double delta) {
  const auto t0 = Clock::now();
  const auto q = QuadratureScheme<2>::for_spans(kWindow, kDt, kL, support_span(tc.phi));
  const auto iv = fungibility_partition(tc.phi, fam.tubes, delta, q);
  double integral = 0.0;
  for (const auto& I : iv) integral += I.integral;
  const auto rep = verify_fungibility(tc.phi, iv, suite, delta, cal::C_f, kWindow, kDt);
  double worst = 0.0;
  for (const auto& r : rep.records) worst = std::max(worst, r.max_ratio);
  const double budget = cal::K_i * std::pow(delta, -cal::K_p);
  std::printf("    intervals %zu (budget %.0f, 1 + 2 int g / delta^2 = %.1f), int g %.4f\n", iv.size(),
              budget, 1.0 + 2.0 * integral / (delta * delta), integral);
  const bool ok = rep.passed && iv.size() <= budget;
  char buf[160];
  std::snprintf(buf, sizeof buf, "max interval ratio %.4f (bound %.3f)", worst, rep.bound);
  verdict(9, ok, seconds_since(t0), buf);
}

// 10. Wall clock and bit reproducibility.
void reproducibility(Clock::time_point start, const TrainCase& tc, const ExtractionResult<2>& fam,
                     double delta) {
  const auto t0 = Clock::now();
  bool same = true;
  const TrainCase again;
  same = same && encode_wave(again.phi) == encode_wave(tc.phi);
  const auto w1 = random_colored_wave<2>(tc.lattice, Color::blue, 2, 0.05, 4242);
  const auto w2 = random_colored_wave<2>(tc.lattice, Color::blue, 2, 0.05, 4242);
  same = same && encode_wave(w1) == encode_wave(w2);
  const auto F = random_separated_family<2>(200, 2, kL, 9003, 6);
  const auto c1 = greedy_tube_cover(F, 0.25, kL);
  const auto c2 = greedy_tube_cover(F, 0.25, kL);
  same = same && tubes_to_json(c1.tubes) == tubes_to_json(c2.tubes);
  ExtractOptions opt;
  opt.window = kWindow;
  opt.dt = kDt;
  opt.c_dilate = cal::c_dilate;
  const auto r = extract_profile(tc.phi, delta, opt);
  same = same && tubes_to_json(r.tubes) == tubes_to_json(fam.tubes) &&
         encode_wave(r.remainder) == encode_wave(fam.remainder);
  const double total = seconds_since(start);
  const bool ok = same && total < 1800.0;
  char buf[160];
  std::snprintf(buf, sizeof buf, "reruns %s, total wall clock %.1fs (bound 1800s)",
                same ? "bit-identical" : "DIFFER", total);
  verdict(10, ok, seconds_since(t0), buf);
}

}  // namespace

int main() {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  const auto start = Clock::now();
  const double delta = 0.2;
  conservation();
  duality();
  bilinear_uniformity();
  sharpness();
  covering();
  exceptional();
  const TrainCase tc;
  const auto te = Clock::now();
  const auto r7 = extraction(tc, delta);
  // The universal family runs at delta'; with c_comp = 1 that is delta itself.
  const double dprime = composed_delta(delta, cal::c_comp);
  ProfileOptions po;
  po.c_comp = cal::c_comp;
  po.extract.window = kWindow;
  po.extract.dt = kDt;
  po.extract.c_dilate = cal::c_dilate;
  const auto fam = dprime == delta ? r7 : universal_tube_family(tc.phi, delta, po);
  const double extraction_secs = seconds_since(te);
  const auto suite = profile_suite(tc);
  profile(tc, fam, suite, delta, extraction_secs);
  fungibility(tc, fam, suite, delta);
  reproducibility(start, tc, r7, delta);
  std::printf("%s: %d of 10 criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
