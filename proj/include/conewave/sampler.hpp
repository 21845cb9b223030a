#pragma once

// Spectral propagation: multiply each mode by its exact phase e^{+-2 pi i t|xi|}
// and sum the Fourier series on a uniform spatial grid with one inverse FFT.

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "conewave/lattice.hpp"
#include "conewave/wave.hpp"

namespace conewave {

/// Samples waves on the grid x_j = j * L / M, j in {0..M-1}^n, of a torus of
/// side L. Point values are exact for any M (modes are folded modulo M);
/// M >= the support width additionally makes the grid Plancherel exact.
template <int Dim>
class GridSampler {
 public:
  GridSampler(double box_length, int points_per_axis)
      : box_length_(box_length), points_(points_per_axis) {
    if (points_ < 2) throw Error("sampling grid needs at least 2 points per axis");
    size_ = 1;
    for (int i = 0; i < Dim; ++i) size_ *= static_cast<std::size_t>(points_);
    buffer_.reset(fftw_alloc_complex(size_));
    int dims[Dim];
    for (int& d : dims) d = points_;
    const unsigned flags = FFTW_ESTIMATE;
    full_ = fftw_plan_dft(Dim, dims, buffer_.get(), buffer_.get(), FFTW_BACKWARD, flags);
    if (Dim > 1) {
      const int inner = static_cast<int>(size_ / static_cast<std::size_t>(points_));
      // Slab starts keep the buffer alignment only for even slab sizes.
      const unsigned slab_flags = inner % 2 == 0 ? flags : flags | FFTW_UNALIGNED;
      slab_ = fftw_plan_dft(Dim - 1, dims + 1, buffer_.get(), buffer_.get(), FFTW_BACKWARD,
                            slab_flags);
      lead_ = fftw_plan_many_dft(1, dims, inner, buffer_.get(), nullptr, inner, 1, buffer_.get(),
                                 nullptr, inner, 1, FFTW_BACKWARD, flags);
    }
    if (full_ == nullptr || (Dim > 1 && (slab_ == nullptr || lead_ == nullptr)))
      throw Error("FFTW planning failed");
    occupied_.assign(static_cast<std::size_t>(points_), 0);
  }

  explicit GridSampler(const FrequencyLattice<Dim>& lattice)
      : GridSampler(lattice.box_length(), lattice.points_per_axis()) {}

  GridSampler(const GridSampler&) = delete;
  GridSampler& operator=(const GridSampler&) = delete;

  ~GridSampler() {
    for (auto p : {full_, slab_, lead_})
      if (p != nullptr) fftw_destroy_plan(p);
  }

  double box_length() const { return box_length_; }
  int points_per_axis() const { return points_; }
  double step() const { return box_length_ / points_; }
  std::size_t size() const { return size_; }
  double cell_volume() const { return std::pow(step(), Dim); }

  Index<Dim> grid_index(std::size_t flat) const {
    Index<Dim> j;
    for (int i = Dim - 1; i >= 0; --i) {
      j[i] = static_cast<int>(flat % points_);
      flat /= points_;
    }
    return j;
  }

  std::size_t flat_index(const Index<Dim>& j) const {
    std::size_t p = 0;
    for (int i = 0; i < Dim; ++i)
      p = p * points_ + static_cast<std::size_t>(positive_mod(j[i], points_));
    return p;
  }

  Vec<Dim> position(std::size_t flat) const {
    const Index<Dim> j = grid_index(flat);
    Vec<Dim> x;
    for (int i = 0; i < Dim; ++i) x[i] = j[i] * step();
    return x;
  }

  /// w(t, x_j) for every grid point, row-major. The span is invalidated by
  /// the next call.
  std::span<const Complex> sample(const SpectralWave<Dim>& w, double t) {
    if (w.lattice().box_length() != box_length_)
      throw Error("wave and sampling grid disagree on the box length");
    auto* data = reinterpret_cast<Complex*>(buffer_.get());
    std::fill(data, data + size_, Complex{});
    const double weight = w.lattice().measure_weight();
    std::fill(occupied_.begin(), occupied_.end(), 0);
    for (const auto& m : w.modes()) {
      const double r = norm<Dim>(w.frequency(m));
      const Complex p = std::polar(1.0, 2.0 * kPi * t * r);
      data[flat_index(m.index)] += weight * (m.plus * p + m.minus * std::conj(p));
      occupied_[positive_mod(m.index[0], points_)] = 1;
    }
    transform();
    return {data, size_};
  }

  /// |w(t, x_j)|^2 for every grid point.
  void intensity(const SpectralWave<Dim>& w, double t, std::vector<double>& out) {
    const auto values = sample(w, t);
    out.resize(size_);
    for (std::size_t i = 0; i < size_; ++i) out[i] = std::norm(values[i]);
  }

 private:
  struct FftwDeleter {
    void operator()(fftw_complex* p) const { fftw_free(p); }
  };

  // Sparse leading index: transform only the occupied (n-1)-dimensional
  // slabs, then every line along axis 0. Otherwise one full transform.
  void transform() {
    std::vector<int> rows;
    for (int v = 0; v < points_; ++v)
      if (occupied_[v]) rows.push_back(v);
    if (rows.empty()) return;
    if (Dim == 1 || 2 * rows.size() > static_cast<std::size_t>(points_)) {
      fftw_execute(full_);
      return;
    }
    const std::size_t slab = size_ / static_cast<std::size_t>(points_);
    for (int v : rows) {
      fftw_complex* p = buffer_.get() + static_cast<std::size_t>(v) * slab;
      fftw_execute_dft(slab_, p, p);
    }
    fftw_execute(lead_);
  }

  double box_length_;
  int points_;
  std::size_t size_ = 0;
  std::unique_ptr<fftw_complex, FftwDeleter> buffer_;
  fftw_plan full_ = nullptr;
  fftw_plan slab_ = nullptr;
  fftw_plan lead_ = nullptr;
  std::vector<unsigned char> occupied_;  // leading index values in use
};

/// The spatial field of `w` at time t on its own lattice grid (N^n points).
template <int Dim>
std::vector<Complex> evaluate(const SpectralWave<Dim>& w, double t) {
  GridSampler<Dim> sampler(w.lattice());
  const auto v = sampler.sample(w, t);
  return {v.begin(), v.end()};
}

/// Riemann sum of |u|^2 with cell volume `cell`.
inline double grid_l2_squared(std::span<const Complex> u, double cell) {
  double s = 0.0;
  for (const auto& v : u) s += std::norm(v);
  return s * cell;
}

inline bool fft_friendly(long v) {
  for (long p : {2L, 3L, 5L, 7L})
    while (v % p == 0) v /= p;
  return v == 1;
}

/// Smallest M free of prime factors above 7 with M >= min_points and step
/// L/M <= max_step. No alignment with unit cells.
inline int fast_grid_points(double box_length, double max_step, int min_points) {
  long M = std::max<long>(min_points, std::lround(std::ceil(box_length / max_step - 1e-9)));
  while (!fft_friendly(M)) ++M;
  return static_cast<int>(M);
}

/// Smallest M = L * m with m a positive integer (so unit cells hold a whole
/// number of samples when L is an integer), step L/M <= max_step,
/// M >= min_points, and M free of prime factors above 7 (fast FFT sizes).
inline int unit_grid_points(double box_length, double max_step, int min_points) {
  const long cells = std::max(1L, std::lround(box_length));
  for (long m = 1;; ++m) {
    const long M = cells * m;
    if (box_length / static_cast<double>(M) > max_step + 1e-15) continue;
    if (M < min_points) continue;
    if (fft_friendly(M)) return static_cast<int>(M);
  }
}

/// Width (in lattice indices) of the widest support axis, plus one.
template <int Dim>
int support_span(const SpectralWave<Dim>& w) {
  if (w.is_zero()) return 0;
  const auto [lo, hi] = support_box(w);
  int span = 0;
  for (int i = 0; i < Dim; ++i) span = std::max(span, hi[i] - lo[i] + 1);
  return span;
}

}  // namespace conewave
