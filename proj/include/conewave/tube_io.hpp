#pragma once

// Tube lists as JSON arrays of
// {t0, x0:[...], omega:[...], halflength:"2^k"|"window", radius, lambda}.

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "conewave/errors.hpp"
#include "conewave/geometry.hpp"

namespace conewave {

template <int Dim>
nlohmann::json tube_to_json(const Tube<Dim>& t) {
  return {{"t0", t.t0},
          {"x0", t.x0},
          {"omega", t.omega},
          {"halflength", t.k ? "2^" + std::to_string(*t.k) : std::string("window")},
          {"radius", t.radius},
          {"lambda", t.lambda}};
}

template <int Dim>
Tube<Dim> tube_from_json(const nlohmann::json& j) {
  try {
    Tube<Dim> t;
    t.t0 = j.at("t0").get<double>();
    const auto x0 = j.at("x0").get<std::vector<double>>();
    const auto om = j.at("omega").get<std::vector<double>>();
    if (x0.size() != Dim || om.size() != Dim) throw FormatError("tube vector has wrong dimension");
    std::copy(x0.begin(), x0.end(), t.x0.begin());
    std::copy(om.begin(), om.end(), t.omega.begin());
    const auto hl = j.at("halflength").get<std::string>();
    if (hl == "window") {
      t.k.reset();
    } else if (hl.rfind("2^", 0) == 0) {
      t.k = std::stoi(hl.substr(2));
    } else {
      throw FormatError("bad halflength '" + hl + "'");
    }
    t.radius = j.value("radius", 1.0);
    t.lambda = j.value("lambda", 1.0);
    validate(t);
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad tube record: ") + e.what());
  }
}

template <int Dim>
nlohmann::json tubes_to_json(const std::vector<Tube<Dim>>& tubes) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : tubes) arr.push_back(tube_to_json(t));
  return arr;
}

template <int Dim>
std::vector<Tube<Dim>> tubes_from_json(const nlohmann::json& arr) {
  if (!arr.is_array()) throw FormatError("tube list must be a JSON array");
  std::vector<Tube<Dim>> out;
  for (const auto& j : arr) out.push_back(tube_from_json<Dim>(j));
  return out;
}

template <int Dim>
void save_tubes(const std::vector<Tube<Dim>>& tubes, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw FormatError("cannot open " + path + " for writing");
  f << tubes_to_json(tubes).dump(2) << '\n';
}

template <int Dim>
std::vector<Tube<Dim>> load_tubes(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw FormatError("cannot open " + path);
  try {
    return tubes_from_json<Dim>(nlohmann::json::parse(f));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("tube list is not valid JSON: ") + e.what());
  }
}

}  // namespace conewave
