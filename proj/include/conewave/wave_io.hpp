#pragma once

// CWAV1 binary wave files and their JSON sidecars.
//
// Layout (little endian): "CWAV1", uint32 n, uint32 N, float64 L, uint8 color,
// int32 k, then N^n complex64 values of c_plus followed by N^n of c_minus,
// both in frequency-lexicographic order.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "conewave/errors.hpp"
#include "conewave/wave.hpp"

namespace conewave {

namespace detail {

inline constexpr char kWaveMagic[5] = {'C', 'W', 'A', 'V', '1'};

template <class T>
void put_le(std::vector<unsigned char>& out, T value) {
  using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
            std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>;
  const U bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i)
    out.push_back(static_cast<unsigned char>((bits >> (8 * i)) & 0xFFu));
}

template <class T>
T get_le(const unsigned char*& p, const unsigned char* end) {
  using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
            std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>;
  if (end - p < static_cast<std::ptrdiff_t>(sizeof(T))) throw FormatError("truncated CWAV1 file");
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(p[i]) << (8 * i);
  p += sizeof(T);
  return std::bit_cast<T>(bits);
}

}  // namespace detail

template <int Dim>
std::vector<unsigned char> encode_wave(const SpectralWave<Dim>& w) {
  const auto& lat = w.lattice();
  const std::size_t total = lat.total_points();
  std::vector<std::complex<float>> plus(total), minus(total);
  for (const auto& m : w.modes()) {
    const std::size_t p = lat.lexicographic_position(m.index);
    plus[p] = std::complex<float>(m.plus);
    minus[p] = std::complex<float>(m.minus);
  }
  std::vector<unsigned char> out(std::begin(detail::kWaveMagic), std::end(detail::kWaveMagic));
  out.reserve(26 + 16 * total);
  detail::put_le<std::uint32_t>(out, Dim);
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(lat.points_per_axis()));
  detail::put_le<double>(out, lat.box_length());
  detail::put_le<std::uint8_t>(out, static_cast<std::uint8_t>(w.color()));
  detail::put_le<std::int32_t>(out, w.k());
  for (const auto* block : {&plus, &minus})
    for (const auto& c : *block) {
      detail::put_le<float>(out, c.real());
      detail::put_le<float>(out, c.imag());
    }
  return out;
}

template <int Dim>
SpectralWave<Dim> decode_wave(const std::vector<unsigned char>& bytes) {
  const unsigned char* p = bytes.data();
  const unsigned char* end = p + bytes.size();
  if (bytes.size() < 5 || std::memcmp(p, detail::kWaveMagic, 5) != 0)
    throw FormatError("missing CWAV1 magic");
  p += 5;
  const auto n = detail::get_le<std::uint32_t>(p, end);
  if (n != static_cast<std::uint32_t>(Dim))
    throw FormatError("wave file has dimension " + std::to_string(n));
  const auto N = detail::get_le<std::uint32_t>(p, end);
  const double L = detail::get_le<double>(p, end);
  const auto color_byte = detail::get_le<std::uint8_t>(p, end);
  if (color_byte > 2) throw FormatError("bad color byte");
  const auto k = detail::get_le<std::int32_t>(p, end);
  const FrequencyLattice<Dim> lat(static_cast<int>(N), L);
  const std::size_t total = lat.total_points();
  if (static_cast<std::size_t>(end - p) != 16 * total)
    throw FormatError("CWAV1 payload size does not match the header");
  std::vector<Complex> plus(total), minus(total);
  for (auto* block : {&plus, &minus})
    for (auto& c : *block) {
      const float re = detail::get_le<float>(p, end);
      const float im = detail::get_le<float>(p, end);
      c = Complex(re, im);
    }
  std::vector<Mode<Dim>> modes;
  for (std::size_t i = 0; i < total; ++i)
    if (plus[i] != Complex{} || minus[i] != Complex{})
      modes.push_back({lat.index_at_position(i), plus[i], minus[i]});
  return SpectralWave<Dim>(lat, static_cast<Color>(color_byte), k, std::move(modes));
}

template <int Dim>
nlohmann::json wave_sidecar(const SpectralWave<Dim>& w) {
  return {{"magic", "CWAV1"},
          {"n", Dim},
          {"N", w.lattice().points_per_axis()},
          {"L", w.lattice().box_length()},
          {"color", to_string(w.color())},
          {"k", w.k()},
          {"mass", mass(w)},
          {"nonzero_modes", w.modes().size()}};
}

/// Writes `path` and `path + ".json"`.
template <int Dim>
void save_wave(const SpectralWave<Dim>& w, const std::string& path) {
  const auto bytes = encode_wave(w);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  std::ofstream side(path + ".json");
  side << wave_sidecar(w).dump(2) << '\n';
  if (!f || !side) throw FormatError("failed writing " + path);
}

template <int Dim>
SpectralWave<Dim> load_wave(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
  return decode_wave<Dim>(bytes);
}

}  // namespace conewave
