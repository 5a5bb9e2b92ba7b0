#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "phasespace/analysis.hpp"
#include "phasespace/grid.hpp"

namespace phasespace {

enum class Component { real, imag, abs2 };

std::string_view to_string(Component c);
Component parse_component(std::string_view s);

// Grid file layout:
//
//   "PSGRID1\n"
//   key=value lines (representation, component, nx, np, extents, time, hbar,
//   endianness, axis descriptions, normalization)
//   "\n"                       blank line ends the header
//   np·nx float64 values, little-endian, row-major (row = p or θ, column = x or λ)
struct GridFileHeader {
  Representation representation = Representation::W;
  Component component = Component::real;
  int nx = 0;
  int np = 0;
  double x_min = 0, x_max = 0, p_min = 0, p_max = 0;
  double time = 0.0;
  double hbar = 1.0;
};

struct GridFile {
  GridFileHeader header;
  Eigen::ArrayXXd values;  // (np, nx)

  PhaseGrid grid() const;
};

inline constexpr std::string_view kGridMagic = "PSGRID1\n";

Eigen::ArrayXXd component_values(const PhaseState& s, Component c);

std::string encode_grid_file(const PhaseState& s, Component c);
GridFile decode_grid_file(std::string_view bytes);

void write_grid_file(const std::filesystem::path& path, const PhaseState& s, Component c);
GridFile read_grid_file(const std::filesystem::path& path);

// Diagnostics CSV: one header line, then one row per snapshot, 17 significant digits.
std::string diagnostics_csv_header();
std::string diagnostics_csv_row(const DiagnosticsRecord& d);

std::string format_double(double v);

void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace phasespace
