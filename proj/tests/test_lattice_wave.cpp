#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "conewave/sampler.hpp"
#include "conewave/synthesis.hpp"
#include "conewave/wave.hpp"

using namespace conewave;

namespace {

// Euclidean distance to the boundary of the sector-annulus by dense sampling
// of its four boundary arcs/segments (n = 2).
double boundary_distance_oracle(const Vec<2>& z) {
  double best = 1e300;
  const int n = 20000;
  auto upd = [&](double x, double y) {
    best = std::min(best, std::hypot(z[0] - x, z[1] - y));
  };
  for (int i = 0; i <= n; ++i) {
    const double a = -kSectorAngle + 2.0 * kSectorAngle * i / n;
    upd(std::cos(a), std::sin(a));
    upd(2.0 * std::cos(a), 2.0 * std::sin(a));
    const double r = 1.0 + static_cast<double>(i) / n;
    upd(r * std::cos(kSectorAngle), r * std::sin(kSectorAngle));
    upd(r * std::cos(kSectorAngle), -r * std::sin(kSectorAngle));
  }
  return best;
}

SpectralWave<2> single_mode(const FrequencyLattice<2>& lat, Index<2> m, Complex cp, Complex cm) {
  return SpectralWave<2>(lat, Color::none, 0, {{m, cp, cm}});
}

}  // namespace

TEST(Lattice, RejectsBadShapes) {
  EXPECT_THROW(FrequencyLattice<2>(15, 2.0), InvalidLattice);
  EXPECT_THROW(FrequencyLattice<2>(8, 1.0), InvalidLattice);
  EXPECT_THROW(FrequencyLattice<2>(16, 8.0), InvalidLattice);
  EXPECT_THROW(FrequencyLattice<2>(16, 0.0), InvalidLattice);
  EXPECT_NO_THROW(FrequencyLattice<2>(16, 4.0));
}

TEST(Lattice, IndexRangeAndPositions) {
  const FrequencyLattice<2> lat(16, 4.0);
  EXPECT_EQ(lat.min_index(), -8);
  EXPECT_EQ(lat.max_index(), 7);
  EXPECT_TRUE(lat.contains({-8, 7}));
  EXPECT_FALSE(lat.contains({8, 0}));
  for (std::size_t p = 0; p < lat.total_points(); p += 37)
    EXPECT_EQ(lat.lexicographic_position(lat.index_at_position(p)), p);
  EXPECT_DOUBLE_EQ(lat.frequency({4, -2})[0], 1.0);
  EXPECT_DOUBLE_EQ(lat.frequency({4, -2})[1], -0.5);
}

TEST(Lattice, TorusHelpers) {
  EXPECT_DOUBLE_EQ(wrap_centered(7.0, 8.0), -1.0);
  EXPECT_DOUBLE_EQ(wrap_positive(-1.0, 8.0), 7.0);
  EXPECT_EQ(positive_mod(-3, 5), 2);
  EXPECT_NEAR(torus_norm<2>({7.5, 0.0}, 8.0), 0.5, 1e-15);
}

TEST(Margin, MatchesBoundarySamplingInside) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> r(1.0, 2.0), a(-kSectorAngle, kSectorAngle);
  for (int i = 0; i < 200; ++i) {
    const double rr = r(rng), aa = a(rng);
    const Vec<2> z{rr * std::cos(aa), rr * std::sin(aa)};
    EXPECT_NEAR(sector_margin_distance<2>(z), boundary_distance_oracle(z), 2e-4);
  }
}

TEST(Margin, NegativeOutsideSector) {
  EXPECT_LT(sector_margin_distance<2>({0.5, 0.0}), 0.0);
  EXPECT_LT(sector_margin_distance<2>({2.5, 0.0}), 0.0);
  EXPECT_LT(sector_margin_distance<2>({1.0, 1.0}), 0.0);
  EXPECT_LT(sector_margin_distance<2>({0.0, 0.0}), 0.0);
}

TEST(Margin, WaveMarginConventions) {
  const FrequencyLattice<2> lat(64, 8.0);
  const SpectralWave<2> zero(lat, Color::red, 0);
  EXPECT_TRUE(std::isinf(margin(zero)));
  const SpectralWave<2> none(lat, Color::none, 0);
  EXPECT_THROW(margin(none), MarginUndefined);
  // xi = (12/8, 0): distance 1/2 to both radial boundaries, 1.5 sin(pi/8) angularly.
  const SpectralWave<2> w(lat, Color::red, 0, {{{12, 0}, 1.0, 0.0}});
  EXPECT_NEAR(margin(w), std::min(0.5, 1.5 * std::sin(kSectorAngle)), 1e-15);
  // Same frequency read at k = 1 rescales to 0.75: outside, clamped to 0.
  EXPECT_EQ(margin(w.with_metadata(Color::red, 1)), 0.0);
}

TEST(Wave, MassAndNormalization) {
  const FrequencyLattice<2> lat(32, 4.0);
  const SpectralWave<2> w(lat, Color::none, 0, {{{1, 2}, {3.0, 4.0}, 0.0}, {{-1, 0}, 0.0, 2.0}});
  EXPECT_NEAR(mass(w), (25.0 + 4.0) / 16.0, 1e-14);
  EXPECT_NEAR(mass(normalize_mass(w, 2.5)), 2.5, 1e-14);
  EXPECT_THROW(normalize_mass(SpectralWave<2>(lat, Color::red, 0)), Error);
}

TEST(Wave, CanonicalFormMergesAndDropsZeros) {
  const FrequencyLattice<2> lat(32, 4.0);
  const SpectralWave<2> w(lat, Color::none, 0,
                          {{{3, 0}, 1.0, 0.0}, {{1, 0}, 2.0, 0.0}, {{3, 0}, -1.0, 0.0}});
  ASSERT_EQ(w.modes().size(), 1u);
  EXPECT_EQ(w.modes()[0].index, (Index<2>{1, 0}));
  const auto d = w.plus_scaled(w, -1.0);
  EXPECT_TRUE(d.is_zero());
  EXPECT_THROW(SpectralWave<2>(lat, Color::none, 0, {{{16, 0}, 1.0, 0.0}}), Error);
}

TEST(Wave, ColorInvariant) {
  const FrequencyLattice<2> lat(64, 8.0);
  EXPECT_TRUE(SpectralWave<2>(lat, Color::red, 0, {{{12, 0}, 1.0, 0.0}}).satisfies_color_invariant());
  EXPECT_FALSE(SpectralWave<2>(lat, Color::red, 0, {{{12, 0}, 0.0, 1.0}}).satisfies_color_invariant());
  EXPECT_FALSE(SpectralWave<2>(lat, Color::blue, 0, {{{12, 0}, 1.0, 0.0}}).satisfies_color_invariant());
  EXPECT_FALSE(SpectralWave<2>(lat, Color::red, 0, {{{4, 0}, 1.0, 0.0}}).satisfies_color_invariant());
}

TEST(Wave, PlaneWaveClosedForm) {
  const double L = 4.0;
  const FrequencyLattice<2> lat(32, L);
  const Index<2> m{5, -2};
  const Complex cp{0.7, -0.2}, cm{0.1, 0.4};
  const auto w = single_mode(lat, m, cp, cm);
  const double xi0 = m[0] / L, xi1 = m[1] / L, r = std::hypot(xi0, xi1);
  for (double t : {-3.0, 0.0, 1.25}) {
    for (Vec<2> x : {Vec<2>{0.0, 0.0}, Vec<2>{1.3, 2.7}, Vec<2>{3.9, 0.1}}) {
      const double ph = 2.0 * kPi * (x[0] * xi0 + x[1] * xi1);
      const Complex exact =
          (cp * std::polar(1.0, ph + 2.0 * kPi * t * r) + cm * std::polar(1.0, ph - 2.0 * kPi * t * r)) /
          (L * L);
      EXPECT_NEAR(std::abs(point_value(w, t, x) - exact), 0.0, 1e-14);
    }
  }
}

TEST(Sampler, GridMatchesPointValues) {
  const FrequencyLattice<2> lat(64, 8.0);
  const auto w = random_colored_wave<2>(lat, Color::red, 0, 0.05, 11);
  for (int M : {16, 40, 64}) {
    GridSampler<2> s(8.0, M);
    const auto v = s.sample(w, 0.8);
    for (std::size_t f = 0; f < v.size(); f += 97)
      EXPECT_NEAR(std::abs(v[f] - point_value(w, 0.8, s.position(f))), 0.0, 1e-12);
  }
}

TEST(Sampler, ConservationOfOneSidedWaves) {
  const FrequencyLattice<2> lat(64, 8.0);
  for (Color c : {Color::red, Color::blue}) {
    const auto w = random_colored_wave<2>(lat, c, 0, 0.05, 5);
    GridSampler<2> s(8.0, unit_grid_points(8.0, 0.5, support_span(w)));
    for (double t : {-16.0, -3.3, 0.0, 7.1, 16.0}) {
      const double n2 = grid_l2_squared(s.sample(w, t), s.cell_volume());
      EXPECT_NEAR(n2 / mass(w), 1.0, 1e-9);
    }
  }
}

TEST(Sampler, TwoSidedWaveBoundedBySqrtTwo) {
  const FrequencyLattice<2> lat(64, 8.0);
  const auto r = random_colored_wave<2>(lat, Color::red, 0, 0.05, 1);
  const auto b = random_colored_wave<2>(lat, Color::blue, 0, 0.05, 2);
  const auto w = r.plus_scaled(b, 1.0);
  GridSampler<2> s(8.0, unit_grid_points(8.0, 0.5, support_span(w)));
  for (double t : {-5.0, 0.0, 2.2}) {
    const double n = std::sqrt(grid_l2_squared(s.sample(w, t), s.cell_volume()));
    EXPECT_LE(n, std::sqrt(2.0 * mass(w)) * (1 + 1e-9));
  }
}

TEST(Wave, InnerProductPlancherel) {
  const FrequencyLattice<2> lat(64, 8.0);
  const auto a = random_colored_wave<2>(lat, Color::red, 0, 0.05, 21);
  const auto b = random_colored_wave<2>(lat, Color::red, 0, 0.05, 22);
  GridSampler<2> s(8.0, unit_grid_points(8.0, 0.5, support_span(a.plus_scaled(b, 1.0))));
  for (double t : {0.0, 2.5}) {
    const auto va = s.sample(a, t);
    const std::vector<Complex> ca(va.begin(), va.end());
    const auto vb = s.sample(b, t);
    Complex grid{};
    for (std::size_t i = 0; i < ca.size(); ++i) grid += ca[i] * std::conj(vb[i]);
    grid *= s.cell_volume();
    EXPECT_NEAR(std::abs(inner_product(a, b, t) - grid), 0.0, 1e-12);
  }
  EXPECT_NEAR(inner_product(a, a).real(), mass(a), 1e-12);
}

TEST(Sampler, UnitGridPoints) {
  const int M = unit_grid_points(64.0, 0.25, 300);
  EXPECT_GE(M, 300);
  EXPECT_EQ(M % 64, 0);
  EXPECT_LE(64.0 / M, 0.25);
  EXPECT_EQ(unit_grid_points(64.0, 0.25, 1), 256);
}
