#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

// Built-in electrode montages. Axes: +x right, +y nasion, +z vertex.
namespace dipoleforge::montage {

/// Channel labels of a built-in montage ("10-20-19" or "10-10-61").
std::vector<std::string> labels(std::string_view montage_name);

/// Unit-sphere position of a 10-10 label, if known.
std::optional<Eigen::Vector3d> unit_position(std::string_view label);

/// The 19 standard 10-20 positions; default Laplacian centers.
std::vector<std::string> standard_1020();

}  // namespace dipoleforge::montage
