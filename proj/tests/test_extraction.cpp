#include <gtest/gtest.h>

#include <cmath>

#include "conewave/extraction.hpp"
#include "conewave/synthesis.hpp"

using namespace conewave;

namespace {

constexpr double kL = 16.0;

FrequencyLattice<2> lattice0() { return FrequencyLattice<2>(lattice_points_for(kL, 0), kL); }

QuadratureScheme<2> small_scheme(const SpectralWave<2>& phi) {
  return extraction_scheme(phi, 3.0, 0.25);
}

}  // namespace

TEST(Search, DirectionGrid) {
  const auto d2 = search_directions<2>({});
  EXPECT_EQ(d2.size(), 13u);  // |j| / 16 <= pi / 8
  for (const auto& w : d2) EXPECT_LE(angle_between<2>(w, unit_e1<2>()), kSectorAngle + 1e-12);
  const auto d3 = search_directions<3>({});
  for (const auto& w : d3) {
    EXPECT_NEAR(norm<3>(w), 1.0, 1e-14);
    EXPECT_LE(angle_between<3>(w, unit_e1<3>()), kSectorAngle + 1e-12);
  }
}

TEST(Search, ZeroWaveHasNoTube) {
  const SpectralWave<2> zero(lattice0(), Color::red, 0);
  EXPECT_FALSE(best_tube(zero, QuadratureScheme<2>{3.0, 0.25, kL, 64}).has_value());
}

// Oracle: exhaustive evaluation of every candidate tube.
TEST(Search, BranchAndBoundMatchesBruteForce) {
  for (std::uint64_t seed : {1u, 2u}) {
    const auto phi = random_colored_wave<2>(lattice0(), Color::red, 0, 0.05, seed)
                         .plus_scaled(make_red_cube_bump<2>(lattice0(), {0.5, {5.0, 9.0}}), 0.5)
                         .with_metadata(Color::red, 0);
    const auto q = small_scheme(phi);
    SearchOptions opt;
    opt.direction_step = 0.125;
    opt.offset_step = 1.0;
    const auto r = best_tube(phi, q, opt);
    ASSERT_TRUE(r.has_value());
    double brute = 0.0;
    for (const auto& w : search_directions<2>(opt))
      for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j)
          brute = std::max(brute, l2t_linfx_on_tube(
                                      phi, Tube<2>::window_spanning(0.0, {1.0 * i, 1.0 * j}, w), q));
    EXPECT_NEAR(r->value, brute, 1e-12);
    EXPECT_NEAR(l2t_linfx_on_tube(phi, r->tube, q), r->value, 1e-12);
    EXPECT_LT(r->exact_evaluations, r->candidates);
  }
}

TEST(Witness, PairingEqualsTubeNorm) {
  const auto phi = random_colored_wave<2>(lattice0(), Color::red, 0, 0.05, 4);
  const auto q = small_scheme(phi);
  const auto T = Tube<2>::window_spanning(0.0, {8.0, 8.0}, direction_from_angle<2>(-0.1));
  const auto w = dual_witness(phi, T, q);
  double fn = 0.0;
  for (const auto& f : w.f) fn += w.dt * std::norm(f);
  EXPECT_NEAR(fn, 1.0, 1e-12);
  EXPECT_NEAR(w.pairing().real(), w.norm, 1e-12);
  EXPECT_NEAR(w.pairing().imag(), 0.0, 1e-12);
  EXPECT_NEAR(w.norm, l2t_linfx_on_tube(phi, T, q), 1e-12);
  for (std::size_t i = 0; i < w.times.size(); ++i)
    EXPECT_TRUE(tube_contains(T, {w.times[i], w.points[i]}, kL));
}

TEST(Witness, PlaneWaveHasConstantModulus) {
  const SpectralWave<2> phi(lattice0(), Color::red, 0, {{{24, 2}, 5.0, 0.0}});
  const auto q = small_scheme(phi);
  const auto w = dual_witness(phi, Tube<2>::window_spanning(0.0, {3.0, 3.0}, unit_e1<2>()), q);
  for (const auto& f : w.f) EXPECT_NEAR(std::abs(f), std::abs(w.f.front()), 1e-12);
}

TEST(Witness, ZeroNormThrows) {
  const SpectralWave<2> zero(lattice0(), Color::red, 0);
  EXPECT_THROW(dual_witness(zero, Tube<2>::window_spanning(0.0, {}, unit_e1<2>()),
                            QuadratureScheme<2>{1.0, 0.25, kL, 64}),
               Error);
}

TEST(Extractor, SingleSpikeIsThePureCutoff) {
  DualWitness<2> w;
  w.dt = 0.25;
  w.times = {0.0};
  w.points = {Vec<2>{0.0, 0.0}};
  w.f = {Complex{2.0, 0.0}};
  w.values = {Complex{1.0, 0.0}};
  const auto lat = lattice0();
  const auto F = build_F(w, lat, 0.3, 0.1);
  EXPECT_GE(margin(F), 0.1);
  for (const auto& m : F.modes()) {
    const double d = sector_margin_distance<2>(lat.frequency(m.index));
    EXPECT_NEAR(std::abs(m.plus - 0.5 * margin_cutoff(d, 0.3, 0.1)), 0.0, 1e-15);
  }
  EXPECT_THROW(build_F(w, lat, 0.3, 0.0), InfeasibleMargin);
}

TEST(Extractor, MarginCutoff) {
  EXPECT_EQ(margin_cutoff(0.05, 0.2, 0.1), 0.0);
  EXPECT_EQ(margin_cutoff(0.25, 0.2, 0.1), 1.0);
  EXPECT_EQ(margin_cutoff(0.1, 0.1, 0.1), 1.0);
  EXPECT_GT(margin_cutoff(0.15, 0.2, 0.1), 0.0);
  EXPECT_LT(margin_cutoff(0.15, 0.2, 0.1), 1.0);
}

// Plancherel: spectral <phi(0), F(0)> against the time-domain pairing.
TEST(Extractor, SpectralPairingMatchesWitness) {
  for (std::uint64_t seed : {5u, 6u, 7u}) {
    const auto phi = random_colored_wave<2>(lattice0(), Color::red, 0, 0.1, seed);
    const auto q = small_scheme(phi);
    const auto w = dual_witness(phi, Tube<2>::window_spanning(0.0, {4.0, 11.0}, unit_e1<2>()), q);
    const auto F = build_F(w, phi.lattice(), margin(phi), margin(phi) - 0.05);
    const Complex spectral = inner_product(phi, F);
    const Complex time_domain = w.pairing();
    EXPECT_LE(std::abs(spectral - time_domain), 1e-6 * std::abs(time_domain));
  }
}

TEST(Mu, ClosedFormCases) {
  const FrequencyLattice<2> lat(16, 4.0);
  const SpectralWave<2> phi(lat, Color::red, 0, {{{6, 0}, std::sqrt(8.0), 0.0}});
  const SpectralWave<2> F(lat, Color::red, 0, {{{6, 0}, std::sqrt(32.0), 0.0}});
  const auto r = optimal_mu(phi, F);
  EXPECT_NEAR(r.inner, 1.0, 1e-14);
  EXPECT_NEAR(r.mass_F, 2.0, 1e-14);
  EXPECT_NEAR(r.mu, 0.5, 1e-14);
  EXPECT_NEAR(r.decrement, 0.5, 1e-14);
  EXPECT_NEAR(mass(phi) - mass(phi.plus_scaled(F, -r.mu)), r.decrement, 1e-14);
  const auto self = optimal_mu(phi, phi);
  EXPECT_DOUBLE_EQ(self.mu, 1.0);
  EXPECT_NEAR(mass(phi.plus_scaled(phi, -self.mu)), 0.0, 1e-30);
  EXPECT_THROW(optimal_mu(phi, phi.scaled(-1.0)), NoDecrement);
  const auto big = optimal_mu(phi, phi.scaled(0.5));
  EXPECT_TRUE(big.clamped);
  EXPECT_DOUBLE_EQ(big.mu, 1.0);
}

TEST(Extract, ZeroWave) {
  const SpectralWave<2> zero(lattice0(), Color::red, 0);
  const auto r = extract_profile(zero, 0.2);
  EXPECT_TRUE(r.tubes.empty());
  EXPECT_TRUE(r.trace.empty());
  EXPECT_TRUE(r.remainder.is_zero());
}

TEST(Extract, BlueWaveRejected) {
  const auto b = random_colored_wave<2>(lattice0(), Color::blue, 0, 0.05, 1);
  EXPECT_THROW(extract_profile(b, 0.2), Error);
}

TEST(Extract, CubeTrainOnSmallTorus) {
  const auto lat = lattice0();
  const auto om = direction_from_angle<2>(0.2);
  const auto train = Tube<2>::finite(0.0, {8.0, 8.0}, om, 3);
  const auto phi = normalize_mass(make_red_cube_train<2>(lat, train, uniform_train_coefficients(train), 3));
  ExtractOptions opt;
  opt.window = 4.0;
  opt.margin_step = 0.01;
  const double delta = 0.3;
  const auto r = extract_profile(phi, delta, opt);
  ASSERT_FALSE(r.trace.empty());
  EXPECT_TRUE(r.converged);
  // A train this short does not resolve direction; the first tube must pass
  // through the central cube.
  EXPECT_LE(torus_norm<2>(r.trace.front().tube.axis_point(0.0) - Vec<2>{8.0, 8.0}, kL), 1.5);
  const double m0 = margin(phi);
  const double step = opt.margin_step;
  for (const auto& t : r.trace) {
    EXPECT_GT(t.decrement, 0.0);
    EXPECT_NEAR(t.mass_before - t.mass_after, t.decrement, 1e-9);
    EXPECT_GT(t.mu, 0.0);
    EXPECT_LE(t.mu, 1.0);
    EXPECT_GE(t.margin_F, m0 - step - 1e-12);
  }
  for (std::size_t i = 1; i < r.trace.size(); ++i)
    EXPECT_NEAR(r.trace[i].mass_before, r.trace[i - 1].mass_after, 1e-12);
  const auto q = extraction_scheme(phi, opt.window, opt.dt);
  const auto after = best_tube(r.remainder, q, opt.search);
  EXPECT_LT(after ? after->value : 0.0, r.threshold);
  EXPECT_NEAR(after ? after->value : 0.0, r.final_concentration, 1e-12);
  for (const auto& T : r.tubes) EXPECT_NEAR(T.lambda, std::pow(delta, -opt.c_dilate), 1e-12);
}
