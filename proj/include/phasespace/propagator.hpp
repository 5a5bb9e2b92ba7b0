#pragma once

#include <limits>
#include <vector>

#include "phasespace/analysis.hpp"
#include "phasespace/grid.hpp"

namespace phasespace {

/// How one time step is split into kick (x–θ multiplication) and drift (λ–p multiplication).
///   exact_shear: kick/drift/kick with effective times chosen so the composition is the
///                exact quadratic flow (tanh/sinh for c < 0, tan/sin for c > 0).
///   strang:      the plain second-order split, kick dt/2, drift dt.
enum class SplittingScheme { exact_shear, strang };

struct SplitTimes {
  double kick = 0.0;   // multiplies exp(+i·kick·V'(x)·θ)
  double drift = 0.0;  // multiplies exp(−i·drift·(p/m)·λ)
};

/// Throws ConfigError for exact_shear on a confining potential when ω·dt ≥ π.
SplitTimes split_times(const QuadraticHamiltonian& h, double dt, SplittingScheme scheme);

struct PropagationPlan {
  QuadraticHamiltonian hamiltonian;
  double dt = 0.01;
  double t_final = 0.0;
  std::vector<double> snapshot_times;  // sorted, within [0, t_final], always ends at t_final
  double hbar = 1.0;
  SplittingScheme scheme = SplittingScheme::exact_shear;
  // For each snapshot: length of the shortened step needed to land exactly on it
  // (0 when the snapshot lies on the dt lattice).
  std::vector<double> residues;
};

/// Validates 0 < dt ≤ t_final and snapshot ordering; adds t_final when missing.
PropagationPlan make_plan(const QuadraticHamiltonian& h, double dt, double t_final,
                          std::vector<double> snapshot_times, double hbar,
                          SplittingScheme scheme = SplittingScheme::exact_shear);

/// One full step: kick, drift, kick. Advances `time` by dt. Throws InstabilityError on
/// non-finite output.
PhaseState step(const PhaseState& w, const QuadraticHamiltonian& h, double dt,
                SplittingScheme scheme = SplittingScheme::exact_shear);

struct Snapshot {
  PhaseState state;
  DiagnosticsRecord diagnostics;
};

/// Runs the plan and returns one snapshot per plan.snapshot_times entry. Before running
/// it checks that the 5σ envelope, transported by the exact flow, stays inside the grid
/// up to t_final and throws StateError otherwise. Snapshots whose boundary band holds
/// more than kTruncationErrorMass raise StateError.
std::vector<Snapshot> propagate(const PhaseState& w, const PropagationPlan& plan);

/// First time in (0, t_max] at which the transported 5σ envelope of `envelope` leaves
/// the grid; +inf when it never does.
double support_limit_time(const PhaseGrid& grid, const GaussianWigner& envelope, const QuadraticHamiltonian& h,
                          double t_max, double resolution);

}  // namespace phasespace
