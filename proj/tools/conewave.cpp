// conewave: command-line front end to the library.
// Exit status: 0 all asserted bounds hold, 1 a bound is violated, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "conewave/conewave.hpp"

namespace fs = std::filesystem;
using namespace conewave;
namespace cal = conewave::calibration;

namespace {

constexpr int kPass = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;

struct Global {
  int n = 2;
  int grid_N = 0;  // 0: smallest lattice holding the requested frequencies
  double box_L = 64.0;
  double window = 16.0;
  double dt = 0.25;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  double delta = 0.2;
};

struct GenWaveOpts {
  std::string kind = "random";  // random | bump | train | tube
  std::string color = "red";
  int k = 0;
  double m_min = 0.05;
  double angle_deg = 12.0;
  double t0 = 0.0;
  std::vector<double> x0;
  double heatmap_t = 0.0;
  std::string name = "wave";
};

struct CoverOpts {
  std::string family;  // JSON {k, tubes, weights}; empty: random family
  int count = 200;
  int k = 1;
  int hubs = 3;
  std::size_t samples = 100000;
};

struct BlueOpts {
  std::string wave;
  int k = 1;
};

struct ExtractCliOpts {
  std::string wave;
  int max_iter = 200;
  double c_dilate = cal::c_dilate;
  double margin_step = 0.0;  // 0: max(delta^10, 2/L)
};

struct ProfileCliOpts {
  std::string wave;
  double c_comp = cal::c_comp;
  int per_k = 10;
  double heatmap_t = 0.0;
  double margin_step = 0.0;
};

struct SharpOpts {
  std::vector<int> ks{0, 1, 2, 3};
  std::vector<std::uint64_t> seeds{1, 2, 3};
  double angle_deg = 12.0;
};

// ---------------------------------------------------------------------------
// Output helpers

fs::path out_path(const Global& g, const std::string& name) {
  fs::create_directories(g.out_dir);
  return fs::path(g.out_dir) / name;
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream f(p);
  if (!f) throw FormatError("cannot write " + p.string());
  f << s;
}

struct Rgb {
  unsigned char r, g, b;
};

// Piecewise-linear dark-blue to yellow ramp.
Rgb ramp(double v) {
  v = std::clamp(v, 0.0, 1.0);
  static const double stops[][3] = {{0.05, 0.03, 0.25}, {0.25, 0.20, 0.65}, {0.10, 0.65, 0.60},
                                    {0.55, 0.85, 0.25}, {1.0, 0.95, 0.20}};
  const double x = v * 4.0;
  const int i = std::min(3, static_cast<int>(x));
  const double f = x - i;
  Rgb c;
  unsigned char* out[3] = {&c.r, &c.g, &c.b};
  for (int j = 0; j < 3; ++j)
    *out[j] = static_cast<unsigned char>(255.0 * ((1 - f) * stops[i][j] + f * stops[i + 1][j]));
  return c;
}

// Binary PPM of a 2-D field (row = second axis, flipped so it grows upward),
// with optional overlay mask drawn in white.
void write_ppm(const fs::path& p, const std::vector<double>& field, int M,
               const std::vector<unsigned char>& overlay = {}) {
  const double top = *std::max_element(field.begin(), field.end());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw FormatError("cannot write " + p.string());
  f << "P6\n" << M << ' ' << M << "\n255\n";
  for (int row = M - 1; row >= 0; --row)
    for (int col = 0; col < M; ++col) {
      const std::size_t idx = static_cast<std::size_t>(col) * M + row;
      Rgb c = ramp(top > 0.0 ? std::sqrt(field[idx] / top) : 0.0);
      if (!overlay.empty() && overlay[idx]) c = {255, 255, 255};
      f.put(static_cast<char>(c.r)).put(static_cast<char>(c.g)).put(static_cast<char>(c.b));
    }
}

// Cross-section boundary of each tube at time t on an M x M grid.
std::vector<unsigned char> tube_outline(const std::vector<Tube<2>>& tubes, double L, int M, double t) {
  std::vector<unsigned char> inside(static_cast<std::size_t>(M) * M, 0), edge(inside.size(), 0);
  const double h = L / M;
  for (const auto& T : tubes) {
    std::fill(inside.begin(), inside.end(), 0);
    for (int a = 0; a < M; ++a)
      for (int b = 0; b < M; ++b)
        inside[static_cast<std::size_t>(a) * M + b] = tube_contains(T, {t, {a * h, b * h}}, L);
    for (int a = 0; a < M; ++a)
      for (int b = 0; b < M; ++b) {
        const auto at = [&](int i, int j) {
          return inside[static_cast<std::size_t>((i + M) % M) * M + (j + M) % M];
        };
        if (at(a, b) && (!at(a + 1, b) || !at(a - 1, b) || !at(a, b + 1) || !at(a, b - 1)))
          edge[static_cast<std::size_t>(a) * M + b] = 1;
      }
  }
  return edge;
}

template <int Dim>
Vec<Dim> centre(const Global& g, const std::vector<double>& given) {
  Vec<Dim> x;
  x.fill(0.5 * g.box_L);
  if (!given.empty()) {
    if (given.size() != Dim) throw Error("--x0 needs " + std::to_string(Dim) + " coordinates");
    std::copy(given.begin(), given.end(), x.begin());
  }
  return x;
}

template <int Dim>
Vec<Dim> direction_deg(double deg) {
  return direction_from_angle<Dim>(deg * kPi / 180.0);
}

template <int Dim>
FrequencyLattice<Dim> lattice_for(const Global& g, int k) {
  return FrequencyLattice<Dim>(g.grid_N > 0 ? g.grid_N : lattice_points_for(g.box_L, k), g.box_L);
}

template <int Dim>
SpectralWave<Dim> default_train(const Global& g, const FrequencyLattice<Dim>& lat) {
  const auto T = Tube<Dim>::finite(0.0, centre<Dim>(g, {}), direction_deg<Dim>(12.0), 3);
  return normalize_mass(make_red_cube_train<Dim>(lat, T, uniform_train_coefficients(T), g.seed));
}

template <int Dim>
SpectralWave<Dim> red_input(const Global& g, const std::string& path, int lattice_k) {
  if (!path.empty()) return load_wave<Dim>(path);
  return default_train<Dim>(g, lattice_for<Dim>(g, lattice_k));
}

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string s;
  for (const auto& c : cells) s += (s.empty() ? "" : ",") + c;
  return s + "\n";
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Subcommands

template <int Dim>
int gen_wave(const Global& g, const GenWaveOpts& o) {
  const Color color = color_from_string(o.color);
  const int k = o.kind == "random" || o.kind == "tube" ? o.k : 0;
  const auto lat = lattice_for<Dim>(g, k);
  const auto x0 = centre<Dim>(g, o.x0);
  const auto om = direction_deg<Dim>(o.angle_deg);
  SpectralWave<Dim> w(lat, color, k);
  if (o.kind == "random") {
    w = random_colored_wave<Dim>(lat, color, k, o.m_min, g.seed);
  } else if (o.kind == "bump") {
    w = make_red_cube_bump<Dim>(lat, {o.t0, x0}, o.m_min);
  } else if (o.kind == "train") {
    const auto T = Tube<Dim>::finite(o.t0, x0, om, o.k);
    w = normalize_mass(make_red_cube_train<Dim>(lat, T, uniform_train_coefficients(T), g.seed, o.m_min));
  } else if (o.kind == "tube") {
    w = make_blue_tube_wave<Dim>(lat, o.t0, x0, om, o.k, o.m_min);
  } else {
    throw CLI::ValidationError("--kind", "expected random, bump, train or tube");
  }
  const auto path = out_path(g, o.name + ".cwav");
  save_wave(w, path.string());
  std::printf("wrote %s (mass %.6f, margin %.4f, %zu modes)\n", path.c_str(), mass(w), margin(w),
              w.modes().size());
  if constexpr (Dim == 2) {
    GridSampler<2> s(g.box_L, unit_grid_points(g.box_L, 0.125, 1));
    std::vector<double> inten;
    s.intensity(w, o.heatmap_t, inten);
    const auto ppm = out_path(g, o.name + ".ppm");
    write_ppm(ppm, inten, s.points_per_axis());
    std::printf("wrote %s\n", ppm.c_str());
  }
  return kPass;
}

template <int Dim>
WeightedTubeFamily<Dim> load_family(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw FormatError("cannot open " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed family JSON: ") + e.what());
  }
  WeightedTubeFamily<Dim> F;
  F.k = j.at("k").get<int>();
  F.tubes = tubes_from_json<Dim>(j.at("tubes"));
  F.weights = j.at("weights").get<std::vector<double>>();
  if (F.weights.size() != F.tubes.size()) throw FormatError("one weight per tube expected");
  return F;
}

template <int Dim>
int cover(const Global& g, const CoverOpts& o) {
  const auto F = o.family.empty()
                     ? random_separated_family<Dim>(o.count, o.k, g.box_L, g.seed, o.hubs)
                     : load_family<Dim>(o.family);
  validate_family(F, g.box_L);
  const auto r = greedy_tube_cover(F, g.delta, g.box_L);
  const double residual = verify_pointwise_bound(F, r.tubes, o.samples, g.seed, g.box_L);
  const int cap = static_cast<int>(std::ceil(2.0 / g.delta - 1e-12));
  const double budget = cal::K_cov * std::pow(g.delta, -3.0);
  save_tubes(r.tubes, out_path(g, "cover_tubes.json").string());
  std::string csv = csv_row({"class", "witness_t", "members", "minimal_squares", "tubes"});
  for (std::size_t c = 0; c < r.classes.size(); ++c) {
    const auto& cl = r.classes[c];
    csv += csv_row({std::to_string(c), num(cl.witness.t), std::to_string(cl.members.size()),
                    std::to_string(cl.minimal_squares.size()), std::to_string(cl.tubes.size())});
  }
  write_text(out_path(g, "cover_classes.csv"), csv);
  const bool ok = r.iterations <= cap && r.tubes.size() <= budget && residual <= g.delta;
  std::printf("family %zu tubes; iterations %d (cap %d); output %zu tubes (budget %.0f); residual %.4f "
              "(delta %.3f)%s\n",
              F.tubes.size(), r.iterations, cap, r.tubes.size(), budget, residual, g.delta,
              r.search_resolution_warning ? "; search resolution warning" : "");
  return ok ? kPass : kViolation;
}

template <int Dim>
int blue_tubes(const Global& g, const BlueOpts& o) {
  const auto psi = o.wave.empty()
                       ? random_colored_wave<Dim>(lattice_for<Dim>(g, o.k), Color::blue, o.k, 0.05, g.seed)
                       : load_wave<Dim>(o.wave);
  BlueOptions opt;
  opt.window = g.window;
  opt.dt = g.dt;
  const auto res = exceptional_tubes_for_blue(psi, g.delta, opt);
  const auto bad = find_bad_cubes(psi, g.delta, cube_scan_scheme(psi, g.window, g.dt));
  const auto missed = uncovered_cubes(bad, res.tubes, g.box_L);
  save_tubes(res.tubes, out_path(g, "blue_tubes.json").string());
  std::string csv = csv_row({"t", "x", "norm", "covered"});
  for (const auto& c : bad) {
    const bool hit = std::none_of(missed.begin(), missed.end(), [&](const CubeNorm<Dim>& m) {
      return m.cube.center.t == c.cube.center.t && m.cube.center.x == c.cube.center.x;
    });
    std::string xs;
    for (int i = 0; i < Dim; ++i) xs += (i ? " " : "") + num(c.cube.center.x[i]);
    csv += csv_row({num(c.cube.center.t), xs, num(c.norm), hit ? "1" : "0"});
  }
  write_text(out_path(g, "bad_cubes.csv"), csv);
  const double budget = cal::K_exc * std::pow(g.delta, -cal::K_e);
  std::printf("k=%d: %zu exceptional tubes (budget %.0f), %zu bad cubes, %zu uncovered\n", psi.k(),
              res.tubes.size(), budget, bad.size(), missed.size());
  return missed.empty() && res.tubes.size() <= budget ? kPass : kViolation;
}

template <int Dim>
ExtractOptions extract_options(const Global& g, int max_iter, double c_dilate,
                               double margin_step = 0.0) {
  ExtractOptions opt;
  opt.margin_step = margin_step;
  opt.window = g.window;
  opt.dt = g.dt;
  opt.max_iter = max_iter;
  opt.c_dilate = c_dilate;
  return opt;
}

template <int Dim>
int extract(const Global& g, const ExtractCliOpts& o) {
  const auto phi = red_input<Dim>(g, o.wave, 0);
  const auto r = extract_profile(phi, g.delta, extract_options<Dim>(g, o.max_iter, o.c_dilate, o.margin_step));
  save_tubes(r.tubes, out_path(g, "extract_tubes.json").string());
  save_wave(r.remainder, out_path(g, "remainder.cwav").string());
  std::string csv = csv_row({"iteration", "value", "mu", "mass_before", "mass_after", "decrement", "mass_F"});
  for (const auto& t : r.trace)
    csv += csv_row({std::to_string(t.iteration), num(t.value), num(t.mu), num(t.mass_before),
                    num(t.mass_after), num(t.decrement), num(t.mass_F)});
  write_text(out_path(g, "trace.csv"), csv);
  const double floor = cal::c_dec * g.delta * g.delta / std::log(1.0 / g.delta);
  const bool decrements = std::all_of(r.trace.begin(), r.trace.end(),
                                      [&](const TraceRecord<Dim>& t) { return t.decrement >= floor; });
  std::printf("%zu steps, remainder concentration %.4f (threshold %.4f), converged %s\n", r.trace.size(),
              r.final_concentration, r.threshold, r.converged ? "yes" : "no");
  return r.converged && decrements && r.final_concentration < r.threshold ? kPass : kViolation;
}

template <int Dim>
struct ProfileSetup {
  SpectralWave<Dim> phi;
  ExtractionResult<Dim> family;
  std::vector<SuiteWave<Dim>> suite;
};

template <int Dim>
ProfileSetup<Dim> profile_setup(const Global& g, const ProfileCliOpts& o) {
  const auto phi = red_input<Dim>(g, o.wave, 3);
  ProfileOptions po;
  po.c_comp = o.c_comp;
  po.extract = extract_options<Dim>(g, 200, cal::c_dilate, o.margin_step);
  auto family = universal_tube_family(phi, g.delta, po);
  auto suite = random_blue_suite<Dim>(phi.lattice(), {0, 1, 2, 3}, o.per_k, g.seed + 500);
  if (o.wave.empty()) {
    const auto axis = Tube<Dim>::window_spanning(0.0, centre<Dim>(g, {}), direction_deg<Dim>(12.0));
    const auto adv = adversarial_blue_suite<Dim>(phi.lattice(), axis, default_adversarial_placements());
    suite.insert(suite.end(), adv.begin(), adv.end());
  }
  return {phi, std::move(family), std::move(suite)};
}

template <int Dim>
int profile(const Global& g, const ProfileCliOpts& o) {
  const auto s = profile_setup<Dim>(g, o);
  save_tubes(s.family.tubes, out_path(g, "profile_tubes.json").string());
  const auto rep = verify_profile(s.phi, s.family.tubes, g.delta, s.suite, cal::C_v, g.window, g.dt);
  std::string csv = csv_row({"label", "k", "seed", "full_ratio", "outside_ratio"});
  for (const auto& r : rep.records)
    csv += csv_row({r.label, std::to_string(r.k), std::to_string(r.seed), num(r.full_ratio),
                    num(r.outside_ratio)});
  write_text(out_path(g, "profile.csv"), csv);
  if constexpr (Dim == 2) {
    // |phi psi|^2 at the heatmap time for each adversarial wave, tube outlines on top.
    int written = 0;
    for (const auto& sw : s.suite) {
      if (!sw.adversarial) continue;
      const int M = unit_grid_points(g.box_L, 0.125, 1);
      GridSampler<2> sampler(g.box_L, M);
      std::vector<double> a, b;
      sampler.intensity(s.phi, o.heatmap_t, a);
      sampler.intensity(sw.wave, o.heatmap_t, b);
      for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
      const auto ppm = out_path(g, "product_adv" + std::to_string(written++) + ".ppm");
      write_ppm(ppm, a, M, tube_outline(s.family.tubes, g.box_L, M, o.heatmap_t));
    }
  }
  const double budget = cal::K_u * std::pow(g.delta, -cal::K_p);
  std::printf("%zu tubes (budget %.0f); %zu suite waves; outside bound %.4f; %s\n",
              s.family.tubes.size(), budget, rep.records.size(), rep.bound,
              rep.passed ? "all within bound" : "violation");
  return rep.passed && s.family.tubes.size() <= budget ? kPass : kViolation;
}

template <int Dim>
int fungibility(const Global& g, const ProfileCliOpts& o) {
  const auto s = profile_setup<Dim>(g, o);
  const auto q = QuadratureScheme<Dim>::for_spans(g.window, g.dt, g.box_L, support_span(s.phi));
  const auto iv = fungibility_partition(s.phi, s.family.tubes, g.delta, q);
  const auto rep = verify_fungibility(s.phi, iv, s.suite, g.delta, cal::C_f, g.window, g.dt);
  std::string csv = csv_row({"interval", "t_begin", "t_end", "integral_g"});
  for (std::size_t i = 0; i < iv.size(); ++i)
    csv += csv_row({std::to_string(i), num(iv[i].t_begin), num(iv[i].t_end), num(iv[i].integral)});
  write_text(out_path(g, "intervals.csv"), csv);
  csv = csv_row({"label", "k", "seed", "max_ratio", "worst_interval"});
  for (const auto& r : rep.records)
    csv += csv_row({r.label, std::to_string(r.k), std::to_string(r.seed), num(r.max_ratio),
                    std::to_string(r.worst_interval)});
  write_text(out_path(g, "fungibility.csv"), csv);
  const double budget = cal::K_i * std::pow(g.delta, -cal::K_p);
  std::printf("%zu intervals (budget %.0f); ratio bound %.4f; %s\n", iv.size(), budget, rep.bound,
              rep.passed ? "all within bound" : "violation");
  return rep.passed && iv.size() <= budget ? kPass : kViolation;
}

template <int Dim>
int sharpness(const Global& g, const SharpOpts& o) {
  const auto rows = sharpness_experiment<Dim>(o.ks, o.seeds, g.box_L, g.window, g.dt,
                                              direction_deg<Dim>(o.angle_deg));
  std::string csv = csv_row({"k", "seed", "rho", "lp_ratio", "lp_scaled", "p"});
  bool ok = true;
  for (const auto& r : rows) {
    csv += csv_row({std::to_string(r.k), std::to_string(r.seed), num(r.rho), num(r.lp_ratio),
                    num(r.lp_scaled), num(r.p)});
    ok = ok && r.rho >= cal::rho_min && r.lp_scaled <= cal::K_lp;
  }
  write_text(out_path(g, "sharpness.csv"), csv);
  std::printf("%zu rows written; %s\n", rows.size(), ok ? "within frozen bounds" : "violation");
  return ok ? kPass : kViolation;
}

template <int Dim, class Fn>
int dispatch_dim(Fn&& fn) {
  return fn(std::integral_constant<int, Dim>{});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conewave: red/blue wave synthesis, tube covers and profile experiments"};
  app.set_config("--config", "", "key=value configuration file mirroring the flags");
  app.require_subcommand(1);

  Global g;
  app.add_option("--n", g.n, "spatial dimension")->check(CLI::IsMember({2, 3}));
  app.add_option("--grid-N", g.grid_N, "frequency lattice points per axis (0: automatic)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--box-L", g.box_L, "torus side length")->check(CLI::PositiveNumber);
  app.add_option("--window", g.window, "half-length of the time window")->check(CLI::PositiveNumber);
  app.add_option("--dt", g.dt, "time step")->check(CLI::Range(1e-6, 0.25));
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--out-dir", g.out_dir, "output directory");
  app.add_option("--delta", g.delta, "concentration parameter")->check(CLI::Range(1e-6, 1.0));

  GenWaveOpts gw;
  auto* c_gen = app.add_subcommand("gen-wave", "synthesize a wave and write it as CWAV1");
  c_gen->add_option("--kind", gw.kind, "random | bump | train | tube")
      ->check(CLI::IsMember({"random", "bump", "train", "tube"}));
  c_gen->add_option("--color", gw.color, "red | blue")->check(CLI::IsMember({"red", "blue"}));
  c_gen->add_option("--k", gw.k, "frequency exponent, or tube exponent for train")->check(CLI::Range(0, 8));
  c_gen->add_option("--m-min", gw.m_min, "minimum margin")->check(CLI::Range(0.0, 1.0));
  c_gen->add_option("--angle", gw.angle_deg, "tube direction, degrees from e1");
  c_gen->add_option("--t0", gw.t0, "centre time");
  c_gen->add_option("--x0", gw.x0, "centre position (default: torus centre)");
  c_gen->add_option("--heatmap-t", gw.heatmap_t, "time of the |phi| heatmap");
  c_gen->add_option("--name", gw.name, "output file stem");

  CoverOpts co;
  auto* c_cover = app.add_subcommand("cover", "greedy cover of a weighted tube family");
  c_cover->add_option("--family", co.family, "family JSON {k, tubes, weights}; default random")
      ->check(CLI::ExistingFile);
  c_cover->add_option("--count", co.count, "random family size")->check(CLI::Range(1, 100000));
  c_cover->add_option("--k", co.k, "random family tube exponent")->check(CLI::Range(0, 8));
  c_cover->add_option("--hubs", co.hubs, "random family hub points")->check(CLI::Range(1, 1000));
  c_cover->add_option("--samples", co.samples, "residual sample points");

  BlueOpts bo;
  auto* c_blue = app.add_subcommand("blue-tubes", "exceptional tubes of a blue wave");
  c_blue->add_option("--wave", bo.wave, "blue CWAV1 file; default random")->check(CLI::ExistingFile);
  c_blue->add_option("--k", bo.k, "frequency exponent of the random wave")->check(CLI::Range(0, 8));

  ExtractCliOpts eo;
  auto* c_extract = app.add_subcommand("extract", "iterated tube extraction from a red wave");
  c_extract->add_option("--wave", eo.wave, "red CWAV1 file; default cube train")->check(CLI::ExistingFile);
  c_extract->add_option("--max-iter", eo.max_iter, "iteration cap")->check(CLI::Range(1, 100000));
  c_extract->add_option("--c-dilate", eo.c_dilate, "tube dilation exponent")->check(CLI::NonNegativeNumber);
  c_extract->add_option("--margin-step", eo.margin_step, "margin lost per step (0: automatic)")
      ->check(CLI::NonNegativeNumber);

  ProfileCliOpts po;
  auto* c_profile = app.add_subcommand("profile", "universal tube family checked against a blue suite");
  auto* c_fung = app.add_subcommand("fungibility", "time partition checked against a blue suite");
  for (auto* c : {c_profile, c_fung}) {
    c->add_option("--wave", po.wave, "red CWAV1 file; default cube train")->check(CLI::ExistingFile);
    c->add_option("--c-comp", po.c_comp, "delta' = delta^c / c")->check(CLI::PositiveNumber);
    c->add_option("--per-k", po.per_k, "random blue waves per k")->check(CLI::Range(0, 1000));
    c->add_option("--margin-step", po.margin_step, "margin lost per extraction step (0: automatic)")
        ->check(CLI::NonNegativeNumber);
  }
  c_profile->add_option("--heatmap-t", po.heatmap_t, "time of the |phi psi| heatmaps");

  SharpOpts so;
  auto* c_sharp = app.add_subcommand("sharpness", "tube packet against cube train, per k");
  c_sharp->add_option("--ks", so.ks, "frequency exponents")->check(CLI::Range(0, 8));
  c_sharp->add_option("--seeds", so.seeds, "train sign seeds");
  c_sharp->add_option("--angle", so.angle_deg, "tube direction, degrees from e1");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kUsage;
  }

  const auto run = [&](auto dim) -> int {
    constexpr int D = decltype(dim)::value;
    if (*c_gen) return gen_wave<D>(g, gw);
    if (*c_cover) return cover<D>(g, co);
    if (*c_blue) return blue_tubes<D>(g, bo);
    if (*c_extract) return extract<D>(g, eo);
    if (*c_profile) return profile<D>(g, po);
    if (*c_fung) return fungibility<D>(g, po);
    return sharpness<D>(g, so);
  };
  try {
    return g.n == 2 ? dispatch_dim<2>(run) : dispatch_dim<3>(run);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
}
