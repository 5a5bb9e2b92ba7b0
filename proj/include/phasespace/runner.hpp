#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "phasespace/config.hpp"
#include "phasespace/propagator.hpp"

namespace phasespace {

/// Builds the time-0 W state described by the config (Gaussian or wavefunction file).
PhaseState initial_state(const RunConfig& cfg);

/// Seed points for the overlay dots: the centre plus rings at 1σ and 2σ of the
/// state's covariance (direct) or of its inverse (reciprocal, where |A| lives).
std::vector<Eigen::Vector2d> direct_seeds(const Eigen::Vector2d& mean, const Eigen::Matrix2d& cov);
std::vector<Eigen::Vector2d> reciprocal_seeds(const Eigen::Matrix2d& cov);

/// Level set {q²/2m + c·s² = e} clipped to the box, as polylines of (s, q) points.
using Polyline = std::vector<Eigen::Vector2d>;
std::vector<Polyline> conic_level_set(double m, double c, double e, Eigen::Vector2d s_range,
                                      Eigen::Vector2d q_range, int samples = 401);

struct RunResult {
  std::vector<Snapshot> snapshots;
  std::vector<std::filesystem::path> files;
  std::vector<std::string> warnings;
};

/// Propagates the configured state and writes, into `out_dir`:
///   snapNNN_<rep>_<component>.psgrid   one per snapshot, representation and component
///   diagnostics.csv                    one row per snapshot
///   snapNNN_dots_direct.txt            x p H of classical particles seeded at the state
///   snapNNN_dots_reciprocal.txt        λ θ ℍ of reciprocal particles
///   contours_direct.txt                level sets of H as blank-line separated polylines
///   contours_reciprocal.txt            level sets of ℍ
///   degenerate_pair.csv                max and L2 of A_{W'} − conj(A_W) (if requested)
///   resolved_config.txt
RunResult run(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream* log = nullptr);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Runs the config without writing files and evaluates the property suite on it:
/// conservation, Hudson positivity, oracle equivalence, quadrant stability, reciprocal
/// invariants, representation algebra and the degenerate-pair identity where applicable.
std::vector<CheckResult> verify(const RunConfig& cfg);

struct BatchEntry {
  std::filesystem::path config;
  std::filesystem::path output;
  int exit_code = 0;
  std::string message;
};

/// Runs every *.cfg file of `dir` concurrently, each into out_root/<stem>.
std::vector<BatchEntry> batch(const std::filesystem::path& dir, const std::filesystem::path& out_root);

/// Exit code for an exception thrown by parse/run: 2 config, 3 numerical or margin
/// failure, 4 I/O, 1 otherwise.
int exit_code_for(const std::exception& e);

}  // namespace phasespace
