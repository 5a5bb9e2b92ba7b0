#pragma once

#include <Eigen/Dense>

#include "phasespace/grid.hpp"

namespace phasespace {

/// Re-express `state` in `target` via partial Fourier transforms along x ↔ λ and p ↔ θ:
///
///   Z(λ,p) = ∫ W(x,p) e^{−iλx} dx,   B(x,θ) = ∫ W(x,p) e^{−ipθ} dp,
///   A(λ,θ) = ∫∫ W(x,p) e^{−i(λx + pθ)} dx dp,
///
/// so W = (1/2π) ∫ B e^{ipθ} dθ. The axis transforms commute, so every path between
/// two representations gives the same result. Throws DomainError on non-finite input.
PhaseState to_representation(const PhaseState& state, Representation target);

/// Cell measure under which every representation change is an isometry:
/// dx or dλ/2π along columns times dp or dθ/2π along rows.
double cell_measure(const PhaseGrid& grid, Representation r);

/// sqrt(Σ |v|² · cell_measure).
double l2_norm(const PhaseState& state);

/// B(x,θ) = ψ(x − ħθ/2) ψ*(x + ħθ/2) for a pure state sampled on the x-lattice.
/// Shifted samples come from band-limited interpolation of ψ on a zero-padded lattice,
/// so shifts beyond the box read zeros rather than periodic images.
/// Throws NormalizationError unless Σ|ψ|²dx = 1 to 1e-6.
PhaseState blokhintsev_from_wavefunction(const Eigen::VectorXcd& psi, const PhaseGrid& grid, double hbar);

/// W from ψ through B; imaginary round-off dropped.
PhaseState wigner_from_wavefunction(const Eigen::VectorXcd& psi, const PhaseGrid& grid, double hbar);

/// Point-reflected partner W′(x,p) = W(−x,−p). Requires a W state on a symmetric grid.
PhaseState degenerate_partner(const PhaseState& w);

/// Keep only the real part (W is real by definition).
void project_real(PhaseState& w);

}  // namespace phasespace
