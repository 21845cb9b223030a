#pragma once

// Greedy covering of a separated weighted family of 1 x 2^k tubes: find
// O(delta^{-3}) tubes outside of which sum_beta c_beta 1_{T_beta} <= delta.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <unordered_map>
#include <vector>

#include "conewave/errors.hpp"
#include "conewave/geometry.hpp"

namespace conewave {

template <int Dim>
struct WeightedTubeFamily {
  std::vector<Tube<Dim>> tubes;
  std::vector<double> weights;
  int k = 0;

  double total_weight() const {
    double s = 0.0;
    for (double c : weights) s += c;
    return s;
  }
};

/// Throws InvalidFamily unless every tube is a unit 1 x 2^k tube with a
/// common centre time, weights are nonnegative with sum <= 1, and the family
/// is pairwise separated.
template <int Dim>
void validate_family(const WeightedTubeFamily<Dim>& F, double period, bool check_separation = true) {
  if (F.tubes.size() != F.weights.size()) throw InvalidFamily("one weight per tube required");
  for (double c : F.weights)
    if (!(c >= 0.0)) throw InvalidFamily("weights must be nonnegative");
  if (F.total_weight() > 1.0 + 1e-12) throw InvalidFamily("weights sum to more than 1");
  for (const auto& T : F.tubes) {
    if (!T.k || *T.k != F.k || T.lambda != 1.0 || T.radius != 1.0)
      throw InvalidFamily("family tubes must be unit 1 x 2^k tubes of the family's k");
    if (T.t0 != F.tubes.front().t0) throw InvalidFamily("family tubes must share their centre time");
  }
  if (!check_separation) return;
  // Only pairs with |x0 - x0'| < kSeparationMin can fail; hash centres into
  // cells at least that wide and compare neighbouring cells.
  const int grid = std::max(1, static_cast<int>(std::floor(period / kSeparationMin)));
  const double cell = period / grid;
  auto code_of = [&](const Index<Dim>& c) {
    std::size_t k = 0;
    for (int d = 0; d < Dim; ++d) k = k * static_cast<std::size_t>(grid) + positive_mod(c[d], grid);
    return k;
  };
  auto cell_of = [&](const Vec<Dim>& x) {
    Index<Dim> c;
    for (int d = 0; d < Dim; ++d)
      c[d] = std::min(grid - 1, static_cast<int>(wrap_positive(x[d], period) / cell));
    return c;
  };
  std::unordered_map<std::size_t, std::vector<std::size_t>> buckets;
  for (std::size_t a = 0; a < F.tubes.size(); ++a) buckets[code_of(cell_of(F.tubes[a].x0))].push_back(a);
  int combos = 1;
  for (int d = 0; d < Dim; ++d) combos *= 3;
  for (std::size_t a = 0; a < F.tubes.size(); ++a) {
    const Index<Dim> c0 = cell_of(F.tubes[a].x0);
    std::vector<std::size_t> seen;
    for (int o = 0; o < combos; ++o) {
      Index<Dim> c = c0;
      int code = o;
      for (int d = 0; d < Dim; ++d) {
        c[d] += code % 3 - 1;
        code /= 3;
      }
      const std::size_t key = code_of(c);
      if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
      seen.push_back(key);
      const auto it = buckets.find(key);
      if (it == buckets.end()) continue;
      for (std::size_t b : it->second)
        if (b > a && !separated(F.tubes[a], F.tubes[b], F.k, period))
          throw InvalidFamily("tubes " + std::to_string(a) + " and " + std::to_string(b) +
                              " violate the separation predicate");
    }
  }
}

struct CoverOptions {
  double dilation = 8.0;             // C: radius and length factor of emitted tubes
  double square_threshold = 1.0 / 16; // delta' = square_threshold * delta^2
  int extra_depth = 2;               // sphere grid depth k + extra_depth
  double axis_spacing = 0.5;         // witness candidates along each axis
};

template <int Dim>
struct CoverClass {
  SpacetimePoint<Dim> witness;
  std::vector<std::size_t> members;
  std::vector<SphereSquare<Dim>> minimal_squares;
  std::vector<Tube<Dim>> tubes;  // minimal-square tubes followed by the ball tube
};

template <int Dim>
struct CoverResult {
  std::vector<Tube<Dim>> tubes;
  std::vector<CoverClass<Dim>> classes;
  int iterations = 0;
  /// Candidates above delta/2 remained when the iteration cap was reached.
  bool search_resolution_warning = false;
};

namespace detail {

template <int Dim>
bool point_less(const SpacetimePoint<Dim>& a, const SpacetimePoint<Dim>& b) {
  if (a.t != b.t) return a.t < b.t;
  return a.x < b.x;
}

template <int Dim>
std::vector<SpacetimePoint<Dim>> axis_samples(const WeightedTubeFamily<Dim>& F, double spacing) {
  std::vector<SpacetimePoint<Dim>> pts;
  for (const auto& T : F.tubes) {
    const double H = T.half_length();
    const int steps = static_cast<int>(std::floor(H / spacing + 1e-9));
    for (int i = -steps; i <= steps; ++i) {
      const double t = T.t0 + i * spacing;
      pts.push_back({t, T.axis_point(t)});
    }
  }
  return pts;
}

/// Large squares (weight >= threshold) of every level 0..depth that have no
/// large child.
template <int Dim>
std::vector<SphereSquare<Dim>> minimal_large_squares(const std::vector<Vec<Dim>>& dirs,
                                                     const std::vector<double>& weights,
                                                     double threshold, int depth) {
  std::vector<std::map<SphereSquare<Dim>, double>> levels(depth + 1);
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    SphereSquare<Dim> q = sphere_square_of<Dim>(dirs[i], depth);
    for (int j = depth; j >= 0; --j) {
      levels[j][q] += weights[i];
      if (j > 0) q = q.parent();
    }
  }
  std::vector<SphereSquare<Dim>> out;
  for (int j = 0; j <= depth; ++j)
    for (const auto& [q, w] : levels[j]) {
      if (w < threshold) continue;
      bool has_large_child = false;
      if (j < depth)
        for (const auto& [c, wc] : levels[j + 1])
          if (wc >= threshold && q.contains_square(c)) {
            has_large_child = true;
            break;
          }
      if (!has_large_child) out.push_back(q);
    }
  return out;
}

/// Tubes containing each axis sample. All family tubes share t0 and k, so
/// sample p = b * S + i sits on tube b at time t0 + (i - S/2) * spacing and
/// only tubes whose axis passes within one unit cell at that time can
/// contain it.
template <int Dim>
struct Incidence {
  std::vector<std::size_t> offsets;  // CSR over samples
  std::vector<std::uint32_t> tubes;
  std::vector<std::vector<std::uint32_t>> passes;  // samples on each tube's support
};

/// Samples whose neighbourhood carries total weight <= `skip_at_most` can
/// never become witnesses and get no incidence.
template <int Dim>
Incidence<Dim> build_incidence(const WeightedTubeFamily<Dim>& F,
                               const std::vector<SpacetimePoint<Dim>>& cands,
                               std::size_t per_tube, double period, double skip_at_most = -1.0) {
  Incidence<Dim> inc;
  const std::size_t B = F.tubes.size();
  inc.passes.resize(B);
  inc.offsets.assign(cands.size() + 1, 0);
  const int grid = std::max(1, static_cast<int>(std::floor(period)));
  const double cell = period / grid;
  double max_radius = 0.0;
  for (const auto& T : F.tubes) max_radius = std::max(max_radius, T.effective_radius());
  const int reach = static_cast<int>(std::ceil(max_radius / cell));
  const int width = 2 * reach + 1;
  int combos = 1;
  for (int d = 0; d < Dim; ++d) combos *= width;
  std::size_t grid_cells = 1;
  for (int d = 0; d < Dim; ++d) grid_cells *= static_cast<std::size_t>(grid);
  auto cell_of = [&](const Vec<Dim>& x) {
    Index<Dim> c;
    for (int d = 0; d < Dim; ++d)
      c[d] = std::min(grid - 1, static_cast<int>(wrap_positive(x[d], period) / cell));
    return c;
  };
  auto key = [&](const Index<Dim>& c) {
    std::size_t k = 0;
    for (int d = 0; d < Dim; ++d) k = k * static_cast<std::size_t>(grid) + positive_mod(c[d], grid);
    return k;
  };
  std::vector<std::vector<std::uint32_t>> buckets(grid_cells);
  std::vector<double> bucket_weight(grid_cells);
  std::vector<std::size_t> used;
  std::vector<std::uint32_t> hits;
  std::vector<std::size_t> keys(combos);
  for (std::size_t i = 0; i < per_tube; ++i) {
    for (std::size_t u : used) {
      buckets[u].clear();
      bucket_weight[u] = 0.0;
    }
    used.clear();
    for (std::size_t b = 0; b < B; ++b)
      if (F.weights[b] > 0.0) {
        const std::size_t u = key(cell_of(cands[b * per_tube + i].x));
        if (buckets[u].empty()) used.push_back(u);
        buckets[u].push_back(static_cast<std::uint32_t>(b));
        bucket_weight[u] += F.weights[b];
      }
    for (std::size_t b = 0; b < B; ++b) {
      const std::size_t p = b * per_tube + i;
      const Index<Dim> c0 = cell_of(cands[p].x);
      double bound = 0.0;
      for (int o = 0; o < combos; ++o) {
        Index<Dim> c = c0;
        int code = o;
        for (int d = 0; d < Dim; ++d) {
          c[d] += code % width - reach;
          code /= width;
        }
        keys[o] = key(c);
        bound += bucket_weight[keys[o]];
      }
      if (bound <= skip_at_most) continue;
      hits.clear();
      for (int o = 0; o < combos; ++o)
        for (std::uint32_t other : buckets[keys[o]])
          if (tube_contains(F.tubes[other], cands[p], period)) hits.push_back(other);
      std::sort(hits.begin(), hits.end());
      hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
      for (std::uint32_t h : hits) {
        inc.tubes.push_back(h);
        inc.passes[h].push_back(static_cast<std::uint32_t>(p));
      }
      inc.offsets[p + 1] = hits.size();
    }
  }
  // offsets were filled per sample in time-major order; rebuild CSR in
  // sample order.
  std::vector<std::size_t> counts(cands.size());
  for (std::size_t p = 0; p < cands.size(); ++p) counts[p] = inc.offsets[p + 1];
  std::vector<std::uint32_t> ordered(inc.tubes.size());
  std::vector<std::size_t> start(cands.size() + 1, 0);
  for (std::size_t p = 0; p < cands.size(); ++p) start[p + 1] = start[p] + counts[p];
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < per_tube; ++i)
    for (std::size_t b = 0; b < B; ++b) {
      const std::size_t p = b * per_tube + i;
      std::copy_n(inc.tubes.begin() + cursor, counts[p], ordered.begin() + start[p]);
      cursor += counts[p];
    }
  inc.tubes = std::move(ordered);
  inc.offsets = std::move(start);
  return inc;
}

}  // namespace detail

/// Greedy covering: repeatedly pick the axis sample with the largest
/// residual weight above delta/2 (ties lexicographic in (t, x)), collect the
/// remaining tubes through it into a class, and cover each class by one
/// dilated tube per minimal large sphere square plus one ball tube.
template <int Dim>
CoverResult<Dim> greedy_tube_cover(const WeightedTubeFamily<Dim>& F, double delta, double period,
                                   const CoverOptions& opt = {}, bool check_separation = true) {
  if (!(delta > 0.0 && delta <= 1.0)) throw Error("delta must lie in (0, 1]");
  validate_family(F, period, check_separation);
  CoverResult<Dim> result;
  if (F.tubes.empty()) return result;

  const auto cands = detail::axis_samples(F, opt.axis_spacing);
  const std::size_t per_tube = cands.size() / F.tubes.size();
  const auto inc = detail::build_incidence(F, cands, per_tube, period, 0.5 * delta);
  std::vector<double> residual(cands.size(), 0.0);
  for (std::size_t p = 0; p < cands.size(); ++p)
    for (std::size_t e = inc.offsets[p]; e < inc.offsets[p + 1]; ++e)
      residual[p] += F.weights[inc.tubes[e]];

  // Lazy max-heap keyed by (residual desc, (t, x) asc).
  auto worse = [&](const std::pair<double, std::size_t>& a, const std::pair<double, std::size_t>& b) {
    if (a.first != b.first) return a.first < b.first;
    return detail::point_less(cands[b.second], cands[a.second]);
  };
  std::vector<std::pair<double, std::size_t>> heap;
  for (std::size_t p = 0; p < cands.size(); ++p)
    if (residual[p] > 0.5 * delta) heap.emplace_back(residual[p], p);
  std::make_heap(heap.begin(), heap.end(), worse);

  std::vector<bool> removed(F.tubes.size(), false);
  const int cap = static_cast<int>(std::ceil(2.0 / delta - 1e-12));
  const int depth = F.k + opt.extra_depth;
  const double threshold = opt.square_threshold * delta * delta;

  while (!heap.empty()) {
    std::pop_heap(heap.begin(), heap.end(), worse);
    const auto [value, best] = heap.back();
    heap.pop_back();
    if (value != residual[best]) continue;  // stale entry
    if (residual[best] <= 0.5 * delta) continue;
    if (result.iterations == cap) {
      result.search_resolution_warning = true;
      break;
    }
    ++result.iterations;

    CoverClass<Dim> cls;
    cls.witness = cands[best];
    std::vector<Vec<Dim>> dirs;
    std::vector<double> ws;
    std::vector<std::size_t> touched;
    for (std::size_t e = inc.offsets[best]; e < inc.offsets[best + 1]; ++e) {
      const std::size_t b = inc.tubes[e];
      if (removed[b]) continue;
      removed[b] = true;
      cls.members.push_back(b);
      dirs.push_back(F.tubes[b].omega);
      ws.push_back(F.weights[b]);
      for (std::uint32_t p : inc.passes[b]) {
        residual[p] -= F.weights[b];
        touched.push_back(p);
      }
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (std::size_t p : touched)
      if (residual[p] > 0.5 * delta) {
        heap.emplace_back(residual[p], p);
        std::push_heap(heap.begin(), heap.end(), worse);
      }
    cls.minimal_squares = detail::minimal_large_squares<Dim>(dirs, ws, threshold, depth);
    for (const auto& q : cls.minimal_squares) {
      Tube<Dim> T = Tube<Dim>::finite(cls.witness.t, cls.witness.x, sphere_square_center(q), F.k);
      cls.tubes.push_back(dilate(T, opt.dilation));
    }
    cls.tubes.push_back(
        dilate(Tube<Dim>::finite(cls.witness.t, cls.witness.x, unit_e1<Dim>(), 0), opt.dilation));
    result.tubes.insert(result.tubes.end(), cls.tubes.begin(), cls.tubes.end());
    result.classes.push_back(std::move(cls));
  }
  return result;
}

/// Random pairwise separated family of up to `count` unit 1 x 2^k tubes
/// centred at t = 0. Tubes are aimed through a few hub points so that many
/// of them overlap; weights are iid exponential, scaled to sum to 1.
template <int Dim>
WeightedTubeFamily<Dim> random_separated_family(std::size_t count, int k, double period,
                                                std::uint64_t seed, int hubs = 3) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double H = std::ldexp(1.0, k);
  std::vector<SpacetimePoint<Dim>> hub_points(static_cast<std::size_t>(std::max(1, hubs)));
  for (auto& h : hub_points) {
    h.t = (2.0 * unit(rng) - 1.0) * H;
    for (auto& v : h.x) v = period * unit(rng);
  }
  WeightedTubeFamily<Dim> F;
  F.k = k;
  for (std::size_t attempt = 0; F.tubes.size() < count && attempt < 50 * count; ++attempt) {
    Vec<Dim> om;
    do {
      for (auto& v : om) v = gauss(rng);
    } while (norm<Dim>(om) == 0.0);
    om = normalized<Dim>(om);
    if (om[0] < 0.0) om[0] = -om[0];
    if (angle_between<Dim>(om, unit_e1<Dim>()) > kSectorAngle) continue;
    const auto& h = hub_points[attempt % hub_points.size()];
    const double th = std::clamp(h.t + 0.5 * (2.0 * unit(rng) - 1.0), -H, H);
    Vec<Dim> x0 = h.x - th * om;
    for (auto& v : x0) v = wrap_positive(v + 0.4 * (2.0 * unit(rng) - 1.0), period);
    const auto T = Tube<Dim>::finite(0.0, x0, om, k);
    if (std::all_of(F.tubes.begin(), F.tubes.end(),
                    [&](const Tube<Dim>& o) { return separated(T, o, k, period); }))
      F.tubes.push_back(T);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < F.tubes.size(); ++i) {
    F.weights.push_back(expo(rng));
    total += F.weights.back();
  }
  for (auto& w : F.weights) w /= total;
  return F;
}

/// Points at which pointwise bounds are checked: every axis sample at
/// spacing 1/2, then Monte Carlo points drawn uniformly inside randomly
/// chosen input tubes (3/4) or in the family's bounding box (1/4).
template <int Dim>
std::vector<SpacetimePoint<Dim>> family_sample_points(const WeightedTubeFamily<Dim>& F,
                                                      std::size_t samples, std::uint64_t seed) {
  auto pts = detail::axis_samples(F, 0.5);
  if (F.tubes.empty()) return pts;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, F.tubes.size() - 1);
  Vec<Dim> lo, hi;
  lo.fill(1e300);
  hi.fill(-1e300);
  double tlo = 1e300, thi = -1e300;
  for (const auto& T : F.tubes) {
    for (double s : {-1.0, 1.0}) {
      const double t = T.t0 + s * T.half_length();
      const Vec<Dim> c = T.axis_point(t);
      for (int i = 0; i < Dim; ++i) {
        lo[i] = std::min(lo[i], c[i] - 1.0);
        hi[i] = std::max(hi[i], c[i] + 1.0);
      }
      tlo = std::min(tlo, t);
      thi = std::max(thi, t);
    }
  }
  while (pts.size() < samples) {
    if (unit(rng) < 0.75) {
      const auto& T = F.tubes[pick(rng)];
      const double t = T.t0 + (2.0 * unit(rng) - 1.0) * T.half_length();
      Vec<Dim> off;
      do {
        for (auto& v : off) v = 2.0 * unit(rng) - 1.0;
      } while (norm<Dim>(off) > 1.0);
      pts.push_back({t, T.axis_point(t) + T.effective_radius() * off});
    } else {
      SpacetimePoint<Dim> p;
      p.t = tlo + (thi - tlo) * unit(rng);
      for (int i = 0; i < Dim; ++i) p.x[i] = lo[i] + (hi[i] - lo[i]) * unit(rng);
      pts.push_back(p);
    }
  }
  return pts;
}

/// Max over sample points outside every exceptional tube of
/// sum_beta c_beta 1_{T_beta}, restricted to `members` when given.
template <int Dim>
double max_residual(const WeightedTubeFamily<Dim>& F, const std::vector<Tube<Dim>>& exceptional,
                    const std::vector<SpacetimePoint<Dim>>& points, double period,
                    const std::vector<std::size_t>* members = nullptr) {
  double worst = 0.0;
  std::vector<std::size_t> all;
  if (!members) {
    all.resize(F.tubes.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    members = &all;
  }
  for (const auto& p : points) {
    double r = 0.0;
    for (std::size_t b : *members)
      if (tube_contains(F.tubes[b], p, period)) r += F.weights[b];
    if (r <= worst) continue;
    const bool covered = std::any_of(exceptional.begin(), exceptional.end(),
                                     [&](const Tube<Dim>& T) { return tube_contains(T, p, period); });
    if (!covered) worst = r;
  }
  return worst;
}

/// Max residual of the whole family outside the exceptional tubes at
/// `samples` points (axis samples always included).
template <int Dim>
double verify_pointwise_bound(const WeightedTubeFamily<Dim>& F,
                              const std::vector<Tube<Dim>>& exceptional, std::size_t samples,
                              std::uint64_t seed, double period) {
  return max_residual(F, exceptional, family_sample_points(F, samples, seed), period);
}

}  // namespace conewave
