#pragma once

#include <Eigen/Dense>

#include "phasespace/grid.hpp"

namespace phasespace::spectral {

// Continuous-transform convention on a uniform periodic lattice:
//
//   forward   F(k_m) = h · Σ_j f(s_j) · exp(−i k_m s_j)
//   inverse   f(s_j) = (dk / 2π) · Σ_m F(k_m) · exp(+i k_m s_j)
//
// with s_j = s_min + j·h and centred frequencies k_m = (m − n/2)·dk, dk = 2π/(n·h).
// Both directions are isometries between the measures h and dk/2π.

// Transforms along the column (position) axis: x ↔ λ, applied to every row.
void forward_columns_axis(const PhaseGrid& grid, Eigen::ArrayXXcd& values);
void inverse_columns_axis(const PhaseGrid& grid, Eigen::ArrayXXcd& values);

// Transforms along the row (momentum) axis: p ↔ θ, applied to every column.
void forward_rows_axis(const PhaseGrid& grid, Eigen::ArrayXXcd& values);
void inverse_rows_axis(const PhaseGrid& grid, Eigen::ArrayXXcd& values);

// One-dimensional versions on an arbitrary lattice (origin, step); used by
// wavefunction interpolation and tests.
Eigen::VectorXcd forward(const Eigen::VectorXcd& f, double origin, double step);
Eigen::VectorXcd inverse(const Eigen::VectorXcd& F, double origin, double step);

}  // namespace phasespace::spectral
