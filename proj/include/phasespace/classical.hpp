#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "phasespace/grid.hpp"

namespace phasespace {

// ---------------------------------------------------------------------------
// Closed-form inverted-oscillator mechanics, templated on the scalar type.
// ---------------------------------------------------------------------------

/// Linear map (x0, p0) ↦ (x(t), p(t)) of H = p²/2m − ½mω²x².
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> io_flow_matrix(Scalar m, Scalar omega, Scalar t) {
  using std::cosh;
  using std::sinh;
  const Scalar ch = cosh(omega * t);
  const Scalar sh = sinh(omega * t);
  Eigen::Matrix<Scalar, 2, 2> M;
  M << ch, sh / (m * omega), m * omega * sh, ch;
  return M;
}

/// Linear map (λ0, θ0) ↦ (λ(t), θ(t)) of the reciprocal flow; the inverse transpose
/// of io_flow_matrix.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> io_reciprocal_flow_matrix(Scalar m, Scalar omega, Scalar t) {
  using std::cosh;
  using std::sinh;
  const Scalar ch = cosh(omega * t);
  const Scalar sh = sinh(omega * t);
  Eigen::Matrix<Scalar, 2, 2> M;
  M << ch, -m * omega * sh, -sh / (m * omega), ch;
  return M;
}

/// H(x,p) = p²/2m − ½mω²x².
template <typename Scalar>
Scalar hamiltonian_direct(Scalar x, Scalar p, Scalar m, Scalar omega) {
  return p * p / (Scalar(2) * m) - Scalar(0.5) * m * omega * omega * x * x;
}

/// ℍ(λ,θ) = λ²/2m − ½mω²θ².
template <typename Scalar>
Scalar hamiltonian_reciprocal(Scalar lambda, Scalar theta, Scalar m, Scalar omega) {
  return lambda * lambda / (Scalar(2) * m) - Scalar(0.5) * m * omega * omega * theta * theta;
}

enum class PhaseSpace { direct, reciprocal };

struct TrajectoryPoint {
  PhaseSpace space = PhaseSpace::direct;
  Eigen::Vector2d coords = Eigen::Vector2d::Zero();  // (x,p) or (λ,θ)
  double t = 0.0;
  double energy = 0.0;  // H for direct points, ℍ for reciprocal points
};

TrajectoryPoint newton_trajectory(double x0, double p0, double m, double omega, double t);
TrajectoryPoint reciprocal_trajectory(double lambda0, double theta0, double m, double omega, double t);

// ---------------------------------------------------------------------------
// General quadratic Hamiltonians.
// ---------------------------------------------------------------------------

/// z ↦ linear·z + offset.
struct AffineFlow {
  Eigen::Matrix2d linear = Eigen::Matrix2d::Identity();
  Eigen::Vector2d offset = Eigen::Vector2d::Zero();

  Eigen::Vector2d operator()(const Eigen::Vector2d& z) const { return linear * z + offset; }
  AffineFlow inverse() const;
  AffineFlow then(const AffineFlow& next) const;  // next ∘ this
};

/// Exact phase-space flow of H over time t. Throws DomainError when |ωt| > 30.
AffineFlow classical_flow(const QuadraticHamiltonian& h, double t);

/// Exact flow of the ambiguity-function characteristics, dλ/dt = 2cθ, dθ/dt = −λ/m;
/// conserves QuadraticHamiltonian::reciprocal_energy.
Eigen::Matrix2d reciprocal_flow(const QuadraticHamiltonian& h, double t);

/// Weighted ensemble of classical phase-space points; weights play the role of the
/// Liouville density |Ψ(x,p)|².
struct ClassicalEnsemble {
  std::vector<TrajectoryPoint> points;
  std::vector<double> weights;

  ClassicalEnsemble evolved(const QuadraticHamiltonian& h, double t) const;
};

/// Exact transport of an analytic initial density: W(z; t) = W0(flow(−t)(z)).
template <typename Density>
PhaseState characteristics_oracle(const Density& initial, const PhaseGrid& grid, const QuadraticHamiltonian& h,
                                  double t, double hbar) {
  const AffineFlow back = classical_flow(h, -t);
  PhaseState s{grid, Eigen::ArrayXXcd(grid.np(), grid.nx()), Representation::W, t, hbar};
  for (int j = 0; j < grid.nx(); ++j) {
    for (int i = 0; i < grid.np(); ++i) {
      const Eigen::Vector2d z0 = back(Eigen::Vector2d(grid.x(j), grid.p(i)));
      s.values(i, j) = initial(z0.x(), z0.y());
    }
  }
  return s;
}

/// Closed-form transport of a Gaussian: mean and covariance pushed through the flow.
GaussianWigner transported_gaussian(const GaussianWigner& g, const QuadraticHamiltonian& h, double t);

enum class Quadrant { upper, lower, left, right };

/// Separatrix quadrant of a point for c < 0, relative to the saddle. Points on a
/// separatrix count as upper/lower (over the barrier).
Quadrant classify(const QuadraticHamiltonian& h, double x, double p);

struct ConservationReport {
  double max_direct_deviation = 0.0;      // max |H(t) − H(0)| along direct trajectories
  double max_reciprocal_deviation = 0.0;  // max |ℍ(t) − ℍ(0)| along reciprocal trajectories
  std::size_t seeds = 0;
  std::size_t samples = 0;
};

/// Samples seeds from the state's own support (|W| on the direct lattice, |A| on the
/// reciprocal one) and follows them along both flows over `times`.
ConservationReport generator_conservation_check(const PhaseState& state, const QuadraticHamiltonian& h,
                                                std::span<const double> times, std::size_t n_seeds = 100,
                                                std::uint64_t seed = 0);

/// Same check for explicit seed lists.
ConservationReport generator_conservation_check(std::span<const Eigen::Vector2d> direct_seeds,
                                                std::span<const Eigen::Vector2d> reciprocal_seeds,
                                                const QuadraticHamiltonian& h, std::span<const double> times);

}  // namespace phasespace
