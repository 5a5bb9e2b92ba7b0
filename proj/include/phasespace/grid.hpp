#pragma once

#include <Eigen/Dense>

#include <complex>
#include <string_view>
#include <utility>

namespace phasespace {

using Complex = std::complex<double>;

/// Which pair of commuting phase-space variables labels the lattice.
///   W: (x, p)   Wigner function
///   B: (x, θ)   Blokhintsev / double-configuration function
///   Z: (λ, p)   double-momentum function
///   A: (λ, θ)   ambiguity function
enum class Representation { W, B, Z, A };

std::string_view to_string(Representation r);
Representation parse_representation(std::string_view s);

// Column axis of a representation is position-like (x or λ), row axis momentum-like (p or θ).
constexpr bool has_lambda_axis(Representation r) { return r == Representation::Z || r == Representation::A; }
constexpr bool has_theta_axis(Representation r) { return r == Representation::B || r == Representation::A; }

/// Uniform periodic (x, p) lattice together with its Fourier-conjugate (λ, θ) lattice.
///
/// The right endpoint of each extent is excluded, so dx = (x_max - x_min) / nx.
/// Conjugate lattices are stored centred and ascending, λ_k = (k - nx/2)·dλ with
/// dλ = 2π / (nx·dx); likewise for θ. Immutable once built.
class PhaseGrid {
 public:
  int nx() const { return nx_; }
  int np() const { return np_; }
  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  double p_min() const { return p_min_; }
  double p_max() const { return p_max_; }
  double dx() const { return dx_; }
  double dp() const { return dp_; }
  double dlambda() const { return dlambda_; }
  double dtheta() const { return dtheta_; }

  double x(int j) const { return x_min_ + j * dx_; }
  double p(int i) const { return p_min_ + i * dp_; }
  double lambda(int k) const { return (k - nx_ / 2) * dlambda_; }
  double theta(int l) const { return (l - np_ / 2) * dtheta_; }

  // Nearest lattice index, or -1 outside the lattice.
  int x_index(double x) const;
  int lambda_index(double lambda) const;

  const Eigen::ArrayXd& x_values() const { return x_values_; }
  const Eigen::ArrayXd& p_values() const { return p_values_; }
  const Eigen::ArrayXd& lambda_values() const { return lambda_values_; }
  const Eigen::ArrayXd& theta_values() const { return theta_values_; }

  double cell_area() const { return dx_ * dp_; }
  bool symmetric() const;

  friend bool operator==(const PhaseGrid& a, const PhaseGrid& b) {
    return a.nx_ == b.nx_ && a.np_ == b.np_ && a.x_min_ == b.x_min_ && a.x_max_ == b.x_max_ &&
           a.p_min_ == b.p_min_ && a.p_max_ == b.p_max_;
  }

 private:
  friend PhaseGrid make_grid(int, int, std::pair<double, double>, std::pair<double, double>);
  PhaseGrid() = default;

  int nx_ = 0;
  int np_ = 0;
  double x_min_ = 0, x_max_ = 0, p_min_ = 0, p_max_ = 0;
  double dx_ = 0, dp_ = 0, dlambda_ = 0, dtheta_ = 0;
  Eigen::ArrayXd x_values_, p_values_, lambda_values_, theta_values_;
};

/// Throws ConfigError unless nx, np are powers of two ≥ 8 and both extents are increasing.
PhaseGrid make_grid(int nx, int np, std::pair<double, double> x_extent, std::pair<double, double> p_extent);

constexpr bool is_power_of_two(long n) { return n > 0 && (n & (n - 1)) == 0; }

/// Complex field over a PhaseGrid in one of the four representations.
/// `values` has shape (np, nx): row index is the momentum-like axis (p or θ),
/// column index the position-like axis (x or λ).
struct PhaseState {
  PhaseGrid grid;
  Eigen::ArrayXXcd values;
  Representation representation = Representation::W;
  double time = 0.0;
  double hbar = 1.0;
};

/// H = p²/2m − a + b·x + c·x². The inverted oscillator is c = −½mω².
struct QuadraticHamiltonian {
  enum class Kind { inverted, confining, linear };

  double m = 1.0;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  static QuadraticHamiltonian inverted(double m, double omega);
  static QuadraticHamiltonian harmonic(double m, double omega);
  static QuadraticHamiltonian free_particle(double m);

  Kind kind() const;
  // ω = sqrt(2|c|/m); zero for the linear/free case.
  double omega() const;
  // Position of the saddle (c < 0) or minimum (c > 0).
  double stationary_x() const;
  double potential_gradient(double x) const { return b + 2.0 * c * x; }
  double energy(double x, double p) const { return p * p / (2.0 * m) - a + b * x + c * x * x; }
  // Conserved quantity of the reciprocal flow, λ²/2m + cθ².
  double reciprocal_energy(double lambda, double theta) const {
    return lambda * lambda / (2.0 * m) + c * theta * theta;
  }

  void validate() const;
};

/// Normalised Gaussian density on (x, p) with given mean and covariance; usable both
/// as an analytic function and as the source for lattice sampling.
struct GaussianWigner {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Identity();

  double operator()(double x, double p) const;
};

/// Minimum-uncertainty Gaussian of the form (1/πħ)·exp(−(mω²(x−x0)² + (p−p0)²/m)/(ħω)).
GaussianWigner coherent_gaussian(const QuadraticHamiltonian& h, Eigen::Vector2d center, double hbar);

/// Samples `g` on the lattice as a W state at time 0. Throws StateError naming the
/// violated boundary if any mean ± 5σ leaves the grid extent.
PhaseState sample_wigner(const PhaseGrid& grid, const GaussianWigner& g, double hbar);

/// Coherent Gaussian of H sampled on the grid (requires c ≠ 0 so that ω is defined).
PhaseState gaussian_wigner(const PhaseGrid& grid, const QuadraticHamiltonian& h, Eigen::Vector2d center,
                           double hbar);

void check_support_margin(const PhaseGrid& grid, const GaussianWigner& g, double n_sigma = 5.0);

}  // namespace phasespace
