#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "phasespace/grid.hpp"
#include "phasespace/propagator.hpp"
#include "phasespace/snapshot_io.hpp"

namespace phasespace {

enum class PotentialKind { inverted, harmonic, free, general };

struct RunConfig {
  // grid
  int nx = 512;
  int np = 512;
  double x_min = -16.0, x_max = 16.0;
  double p_min = -16.0, p_max = 16.0;

  // hamiltonian
  PotentialKind potential = PotentialKind::inverted;
  double m = 1.0;
  double omega = 1.0;
  double a = 0.0, b = 0.0, c = 0.0;  // used when potential = general
  double hbar = 1.0;

  // initial state: a Gaussian centre (possibly derived from energy_label) or a wavefunction
  std::optional<double> energy_label;
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  std::filesystem::path wavefunction;

  // propagation
  double dt = 0.01;
  double t_final = 1.5;
  std::vector<double> snapshot_times{0.0, 1.5};
  SplittingScheme scheme = SplittingScheme::exact_shear;

  // output
  std::filesystem::path output_dir = "out";
  std::vector<Representation> representations{Representation::W};
  std::vector<Component> components{Component::real};
  bool degenerate_pair = false;
  std::vector<double> contour_levels;  // empty: derived from the state energy
  std::uint64_t seed = 0;

  QuadraticHamiltonian hamiltonian() const;
  PhaseGrid grid() const;
  bool gaussian_initial() const { return wavefunction.empty(); }
};

/// Parses UTF-8 `key=value` lines ('#' starts a comment). Unknown or repeated keys and
/// invalid values raise ConfigError with the offending line number. Defaults: ħ = m = ω = 1,
/// inverted potential, t_final = 1.5, snapshots {0, t_final}; grid 512² on [−16,16)² when the
/// classical energy of the centre satisfies |E| ≤ 1, else 1024² on [−24,24)².
/// Relative wavefunction paths resolve against `base_dir`.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});

RunConfig load_config(const std::filesystem::path& path);

/// Fully resolved config in the same key=value syntax; parse_config accepts it back.
std::string resolved_config_text(const RunConfig& cfg);

/// Reads a wavefunction file: lines "x re im" on exactly the grid's x lattice.
Eigen::VectorXcd read_wavefunction(const std::filesystem::path& path, const PhaseGrid& grid);

}  // namespace phasespace
