#pragma once

#include <Eigen/Dense>

#include <optional>

#include "phasespace/grid.hpp"

namespace phasespace {

// All functionals below take a W state and integrate with cell-area Riemann sums,
// which are spectrally accurate for smooth periodic lattice data.

double norm(const PhaseState& w);

/// 2πħ ∫ W² dx dp.
double purity(const PhaseState& w);

struct Moments {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();  // (σxx σxp; σxp σpp)
};

/// First and second central moments of W normalised by its norm.
Moments moments(const PhaseState& w);

/// ∫ H(x,p) W(x,p) dx dp.
double energy(const PhaseState& w, const QuadraticHamiltonian& h);

/// Lattice minimum of W (Hudson positivity check).
double hudson_check(const PhaseState& w);

struct UncertaintyCheck {
  Eigen::Matrix2d covariance;
  double determinant = 0.0;
  bool uncertainty_ok = false;  // det ≥ ħ²/4 − 1e-9
};

UncertaintyCheck covariance_and_uncertainty(const PhaseState& w, double hbar);

struct QuadrantWeights {
  double upper = 0.0;
  double lower = 0.0;
  double left = 0.0;
  double right = 0.0;

  double total() const { return upper + lower + left + right; }
};

/// Integrals of W over the four regions cut out by the separatrices p = ±mω(x − x_s).
/// Each row of the trigonometric interpolant is integrated exactly in x, the resulting
/// row profile with composite Gauss–Legendre in p (split at the saddle), so the wedge
/// edges cost no lattice-staircase error. Throws DomainError unless c < 0.
QuadrantWeights quadrant_decomposition(const PhaseState& w, const QuadraticHamiltonian& h);

enum class Incidence { from_left, from_right };

struct TransmissionReflection {
  double T = 0.0;        // over-barrier (H > 0) weight: upper + lower
  double R = 0.0;        // reflected weight on the incidence side
  double leakage = 0.0;  // weight on the far side below the barrier
};

/// T + R + leakage equals the quadrant total (= norm).
TransmissionReflection transmission_reflection(const QuadrantWeights& q, Incidence incidence);
TransmissionReflection transmission_reflection(const PhaseState& w, const QuadraticHamiltonian& h,
                                               Incidence incidence);

/// Σ|W| dx dp over the outer band of `band_fraction` of the extent on every side.
double mass_outside_margin(const PhaseState& w, double band_fraction = 1.0 / 32.0);

struct DiagnosticsRecord {
  double time = 0.0;
  double norm = 0.0;
  double purity = 0.0;
  double mean_x = 0.0;
  double mean_p = 0.0;
  double energy = 0.0;
  double sigma_xx = 0.0;
  double sigma_xp = 0.0;
  double sigma_pp = 0.0;
  double min_value = 0.0;
  double max_value = 0.0;
  std::optional<QuadrantWeights> quadrants;  // only for c < 0
  double T = 0.0;
  double R = 0.0;
  double leakage = 0.0;
  double mass_outside_margin = 0.0;
  bool truncation_warning = false;
  bool uncertainty_ok = false;
};

/// Every diagnostic for one snapshot. T/R use incidence from the side of the state's
/// mean position relative to the saddle.
DiagnosticsRecord diagnose(const PhaseState& w, const QuadraticHamiltonian& h);

constexpr double kTruncationWarnMass = 1e-9;
constexpr double kTruncationErrorMass = 1e-6;

}  // namespace phasespace
