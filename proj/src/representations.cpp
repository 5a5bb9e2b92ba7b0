#include "phasespace/representations.hpp"

#include <cmath>
#include <numbers>

#include "phasespace/errors.hpp"
#include "phasespace/spectral.hpp"

namespace phasespace {

PhaseState to_representation(const PhaseState& state, Representation target) {
  if (!state.values.allFinite()) throw DomainError("cannot change representation of a non-finite state");
  PhaseState out = state;
  out.representation = target;
  if (target == state.representation) return out;

  const bool from_lambda = has_lambda_axis(state.representation);
  const bool to_lambda = has_lambda_axis(target);
  if (!from_lambda && to_lambda) spectral::forward_columns_axis(state.grid, out.values);
  if (from_lambda && !to_lambda) spectral::inverse_columns_axis(state.grid, out.values);

  const bool from_theta = has_theta_axis(state.representation);
  const bool to_theta = has_theta_axis(target);
  if (!from_theta && to_theta) spectral::forward_rows_axis(state.grid, out.values);
  if (from_theta && !to_theta) spectral::inverse_rows_axis(state.grid, out.values);
  return out;
}

double cell_measure(const PhaseGrid& grid, Representation r) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double col = has_lambda_axis(r) ? grid.dlambda() / two_pi : grid.dx();
  const double row = has_theta_axis(r) ? grid.dtheta() / two_pi : grid.dp();
  return col * row;
}

double l2_norm(const PhaseState& state) {
  return std::sqrt(state.values.abs2().sum() * cell_measure(state.grid, state.representation));
}

namespace {

// ψ evaluated at x_j + shift for every lattice j, by spectral interpolation of ψ on a
// lattice padded with zeros to `padded_n` points (same origin and spacing).
class ShiftInterpolator {
 public:
  ShiftInterpolator(const Eigen::VectorXcd& psi, double origin, double step, int padded_n)
      : n_(static_cast<int>(psi.size())), origin_(origin), step_(step) {
    Eigen::VectorXcd padded = Eigen::VectorXcd::Zero(padded_n);
    // Centre the box inside the padded lattice.
    offset_ = (padded_n - n_) / 2;
    padded.segment(offset_, n_) = psi;
    padded_origin_ = origin - offset_ * step;
    spectrum_ = spectral::forward(padded, padded_origin_, step);
    dk_ = 2.0 * std::numbers::pi / (padded_n * step);
  }

  Eigen::VectorXcd shifted(double shift) const {
    const int padded_n = static_cast<int>(spectrum_.size());
    Eigen::VectorXcd s(padded_n);
    for (int m = 0; m < padded_n; ++m) {
      const double k = (m - padded_n / 2) * dk_;
      s(m) = spectrum_(m) * std::polar(1.0, k * shift);
    }
    // Nyquist mode has no partner; drop it so real inputs stay real.
    s(0) = 0.0;
    Eigen::VectorXcd full = spectral::inverse(s, padded_origin_, step_);
    return full.segment(offset_, n_);
  }

 private:
  int n_;
  int offset_ = 0;
  double origin_;
  double step_;
  double padded_origin_ = 0.0;
  double dk_ = 0.0;
  Eigen::VectorXcd spectrum_;
};

}  // namespace

PhaseState blokhintsev_from_wavefunction(const Eigen::VectorXcd& psi, const PhaseGrid& grid, double hbar) {
  if (psi.size() != grid.nx()) throw DomainError("wavefunction length does not match grid nx");
  if (!psi.allFinite()) throw DomainError("wavefunction has non-finite samples");
  const double norm = psi.squaredNorm() * grid.dx();
  if (std::abs(norm - 1.0) > 1e-6)
    throw NormalizationError("wavefunction is not normalised: sum |psi|^2 dx = " + std::to_string(norm));

  // The largest shift is ħ·θ_max/2; pad so that shifted samples never wrap into the box.
  const double max_shift = 0.5 * hbar * std::abs(grid.theta(0));
  const long needed = grid.nx() + 2 * static_cast<long>(std::ceil(max_shift / grid.dx())) + 2;
  int padded_n = grid.nx();
  while (padded_n < needed) padded_n *= 2;
  const ShiftInterpolator interp(psi, grid.x_min(), grid.dx(), padded_n);

  PhaseState b{grid, Eigen::ArrayXXcd(grid.np(), grid.nx()), Representation::B, 0.0, hbar};
  for (int l = 0; l < grid.np(); ++l) {
    const double half = 0.5 * hbar * grid.theta(l);
    const Eigen::VectorXcd left = interp.shifted(-half);
    const Eigen::VectorXcd right = interp.shifted(half);
    b.values.row(l) = (left.array() * right.array().conjugate()).transpose();
  }
  return b;
}

PhaseState wigner_from_wavefunction(const Eigen::VectorXcd& psi, const PhaseGrid& grid, double hbar) {
  PhaseState w = to_representation(blokhintsev_from_wavefunction(psi, grid, hbar), Representation::W);
  project_real(w);
  return w;
}

PhaseState degenerate_partner(const PhaseState& w) {
  if (w.representation != Representation::W) throw DomainError("degenerate_partner expects a W state");
  if (!w.grid.symmetric()) throw DomainError("point reflection needs a grid symmetric about the origin");
  PhaseState out = w;
  const int nx = w.grid.nx();
  const int np = w.grid.np();
  for (int j = 0; j < nx; ++j) {
    for (int i = 0; i < np; ++i) out.values(i, j) = w.values((np - i) % np, (nx - j) % nx);
  }
  return out;
}

void project_real(PhaseState& w) { w.values = w.values.real().cast<Complex>(); }

}  // namespace phasespace
