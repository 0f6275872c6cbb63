#include "dipoleforge/montage.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dipoleforge/error.hpp"

namespace dipoleforge::montage {

namespace {

struct Entry {
  const char* label;
  double theta_deg;  // polar angle from the vertex
  double phi_deg;    // azimuth from +x (right ear) toward +y (nasion)
};

// Idealized spherical 10-10 positions; regenerate with tools/gen/montage_table.py.
constexpr Entry kTable1010[] = {
    {"Fp1", 90.0000000000, 108.0000000000},
    {"Fpz", 90.0000000000, 90.0000000000},
    {"Fp2", 90.0000000000, 72.0000000000},
    {"AF7", 90.0000000000, 126.0000000000},
    {"AF3", 73.8618318931, 111.7119685646},
    {"AFz", 67.5000000000, 90.0000000000},
    {"AF4", 73.8618318931, 68.2880314354},
    {"AF8", 90.0000000000, 54.0000000000},
    {"F7", 90.0000000000, 144.0000000000},
    {"F5", 73.9361779550, 138.6803655333},
    {"F3", 59.6763364175, 128.7715996475},
    {"F1", 49.0915663392, 112.4880121298},
    {"Fz", 45.0000000000, 90.0000000000},
    {"F2", 49.0915663392, 67.5119878702},
    {"F4", 59.6763364175, 51.2284003525},
    {"F6", 73.9361779550, 41.3196344667},
    {"F8", 90.0000000000, 36.0000000000},
    {"FT7", 90.0000000000, 162.0000000000},
    {"FC5", 69.1859004155, 158.8443179497},
    {"FC3", 49.1022196695, 151.4528221214},
    {"FC1", 31.3490181112, 133.5421142300},
    {"FCz", 22.5000000000, 90.0000000000},
    {"FC2", 31.3490181112, 46.4578857700},
    {"FC4", 49.1022196695, 28.5471778786},
    {"FC6", 69.1859004155, 21.1556820503},
    {"FT8", 90.0000000000, 18.0000000000},
    {"T7", 90.0000000000, 180.0000000000},
    {"C5", 67.5000000000, 180.0000000000},
    {"C3", 45.0000000000, 180.0000000000},
    {"C1", 22.5000000000, 180.0000000000},
    {"Cz", 0.0000000000, 0.0000000000},
    {"C2", 22.5000000000, 0.0000000000},
    {"C4", 45.0000000000, 0.0000000000},
    {"C6", 67.5000000000, 0.0000000000},
    {"T8", 90.0000000000, 0.0000000000},
    {"TP7", 90.0000000000, -162.0000000000},
    {"CP5", 69.1859004155, -158.8443179497},
    {"CP3", 49.1022196695, -151.4528221214},
    {"CP1", 31.3490181112, -133.5421142300},
    {"CPz", 22.5000000000, -90.0000000000},
    {"CP2", 31.3490181112, -46.4578857700},
    {"CP4", 49.1022196695, -28.5471778786},
    {"CP6", 69.1859004155, -21.1556820503},
    {"TP8", 90.0000000000, -18.0000000000},
    {"P7", 90.0000000000, -144.0000000000},
    {"P5", 73.9361779550, -138.6803655333},
    {"P3", 59.6763364175, -128.7715996475},
    {"P1", 49.0915663392, -112.4880121298},
    {"Pz", 45.0000000000, -90.0000000000},
    {"P2", 49.0915663392, -67.5119878702},
    {"P4", 59.6763364175, -51.2284003525},
    {"P6", 73.9361779550, -41.3196344667},
    {"P8", 90.0000000000, -36.0000000000},
    {"PO7", 90.0000000000, -126.0000000000},
    {"PO3", 73.8618318931, -111.7119685646},
    {"POz", 67.5000000000, -90.0000000000},
    {"PO4", 73.8618318931, -68.2880314354},
    {"PO8", 90.0000000000, -54.0000000000},
    {"O1", 90.0000000000, -108.0000000000},
    {"Oz", 90.0000000000, -90.0000000000},
    {"O2", 90.0000000000, -72.0000000000},
};

constexpr const char* k1020[] = {"Fp1", "Fp2", "F7", "F3", "Fz", "F4", "F8",
                                 "T7",  "C3",  "Cz", "C4", "T8", "P7", "P3",
                                 "Pz",  "P4",  "P8", "O1", "O2"};

const Entry* find_entry(std::string_view label) {
  for (const auto& e : kTable1010)
    if (label == e.label) return &e;
  return nullptr;
}

Eigen::Vector3d to_unit(const Entry& e) {
  const double t = e.theta_deg * std::numbers::pi / 180.0;
  const double p = e.phi_deg * std::numbers::pi / 180.0;
  return {std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t)};
}

}  // namespace

std::vector<std::string> labels(std::string_view montage_name) {
  std::vector<std::string> out;
  if (montage_name == "10-10-61") {
    for (const auto& e : kTable1010) out.emplace_back(e.label);
  } else if (montage_name == "10-20-19") {
    for (const char* l : k1020) out.emplace_back(l);
  } else {
    misconfigured("unknown montage '" + std::string(montage_name) +
                  "' (known: 10-20-19, 10-10-61)");
  }
  return out;
}

std::optional<Eigen::Vector3d> unit_position(std::string_view label) {
  const Entry* e = find_entry(label);
  if (e == nullptr) return std::nullopt;
  return to_unit(*e);
}

std::vector<std::string> standard_1020() { return labels("10-20-19"); }

}  // namespace dipoleforge::montage
