#include "phasespace/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "phasespace/errors.hpp"

namespace phasespace {

std::string_view to_string(Representation r) {
  switch (r) {
    case Representation::W: return "W";
    case Representation::B: return "B";
    case Representation::Z: return "Z";
    case Representation::A: return "A";
  }
  return "?";
}

Representation parse_representation(std::string_view s) {
  if (s == "W") return Representation::W;
  if (s == "B") return Representation::B;
  if (s == "Z") return Representation::Z;
  if (s == "A") return Representation::A;
  throw ConfigError("unknown representation '" + std::string(s) + "' (expected W, B, Z or A)");
}

PhaseGrid make_grid(int nx, int np, std::pair<double, double> x_extent, std::pair<double, double> p_extent) {
  auto check_size = [](const char* name, int n) {
    if (n < 8 || !is_power_of_two(n)) {
      std::ostringstream os;
      os << name << "=" << n << " is not a power of two >= 8";
      throw ConfigError(os.str());
    }
  };
  check_size("nx", nx);
  check_size("np", np);
  auto check_extent = [](const char* name, std::pair<double, double> e) {
    if (!std::isfinite(e.first) || !std::isfinite(e.second) || !(e.first < e.second)) {
      std::ostringstream os;
      os << name << " extent [" << e.first << ", " << e.second << ") is empty or inverted";
      throw ConfigError(os.str());
    }
  };
  check_extent("x", x_extent);
  check_extent("p", p_extent);

  PhaseGrid g;
  g.nx_ = nx;
  g.np_ = np;
  g.x_min_ = x_extent.first;
  g.x_max_ = x_extent.second;
  g.p_min_ = p_extent.first;
  g.p_max_ = p_extent.second;
  g.dx_ = (g.x_max_ - g.x_min_) / nx;
  g.dp_ = (g.p_max_ - g.p_min_) / np;
  g.dlambda_ = 2.0 * std::numbers::pi / (nx * g.dx_);
  g.dtheta_ = 2.0 * std::numbers::pi / (np * g.dp_);

  g.x_values_.resize(nx);
  g.lambda_values_.resize(nx);
  for (int j = 0; j < nx; ++j) {
    g.x_values_(j) = g.x(j);
    g.lambda_values_(j) = g.lambda(j);
  }
  g.p_values_.resize(np);
  g.theta_values_.resize(np);
  for (int i = 0; i < np; ++i) {
    g.p_values_(i) = g.p(i);
    g.theta_values_(i) = g.theta(i);
  }
  return g;
}

int PhaseGrid::x_index(double x) const {
  const long j = std::lround((x - x_min_) / dx_);
  return (j >= 0 && j < nx_) ? static_cast<int>(j) : -1;
}

int PhaseGrid::lambda_index(double lambda) const {
  const long k = std::lround(lambda / dlambda_) + nx_ / 2;
  return (k >= 0 && k < nx_) ? static_cast<int>(k) : -1;
}

bool PhaseGrid::symmetric() const { return x_min_ == -x_max_ && p_min_ == -p_max_; }

QuadraticHamiltonian QuadraticHamiltonian::inverted(double m, double omega) {
  return {m, 0.0, 0.0, -0.5 * m * omega * omega};
}

QuadraticHamiltonian QuadraticHamiltonian::harmonic(double m, double omega) {
  return {m, 0.0, 0.0, 0.5 * m * omega * omega};
}

QuadraticHamiltonian QuadraticHamiltonian::free_particle(double m) { return {m, 0.0, 0.0, 0.0}; }

QuadraticHamiltonian::Kind QuadraticHamiltonian::kind() const {
  if (c < 0) return Kind::inverted;
  if (c > 0) return Kind::confining;
  return Kind::linear;
}

double QuadraticHamiltonian::omega() const { return std::sqrt(2.0 * std::abs(c) / m); }

double QuadraticHamiltonian::stationary_x() const {
  if (c == 0.0) throw DomainError("linear potential has no stationary point");
  return -b / (2.0 * c);
}

void QuadraticHamiltonian::validate() const {
  if (!(m > 0) || !std::isfinite(m)) throw ConfigError("mass must be positive and finite");
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c))
    throw ConfigError("hamiltonian coefficients must be finite");
}

double GaussianWigner::operator()(double x, double p) const {
  const Eigen::Vector2d d(x - mean.x(), p - mean.y());
  const double det = covariance.determinant();
  const Eigen::Matrix2d inv = covariance.inverse();
  return std::exp(-0.5 * d.dot(inv * d)) / (2.0 * std::numbers::pi * std::sqrt(det));
}

GaussianWigner coherent_gaussian(const QuadraticHamiltonian& h, Eigen::Vector2d center, double hbar) {
  h.validate();
  if (h.c == 0.0) throw DomainError("coherent Gaussian needs c != 0 so that omega is defined");
  if (!(hbar > 0)) throw ConfigError("hbar must be positive");
  const double w = h.omega();
  GaussianWigner g;
  g.mean = center;
  g.covariance = Eigen::Vector2d(hbar / (2.0 * h.m * w), hbar * h.m * w / 2.0).asDiagonal();
  return g;
}

void check_support_margin(const PhaseGrid& grid, const GaussianWigner& g, double n_sigma) {
  const double sx = n_sigma * std::sqrt(g.covariance(0, 0));
  const double sp = n_sigma * std::sqrt(g.covariance(1, 1));
  auto fail = [&](const char* boundary, double edge, double bound) {
    std::ostringstream os;
    os << "state support crosses " << boundary << ": " << n_sigma << "-sigma envelope reaches " << edge
       << " but the grid bound is " << bound;
    throw StateError(os.str());
  };
  if (g.mean.x() - sx < grid.x_min()) fail("x_min", g.mean.x() - sx, grid.x_min());
  if (g.mean.x() + sx > grid.x_max()) fail("x_max", g.mean.x() + sx, grid.x_max());
  if (g.mean.y() - sp < grid.p_min()) fail("p_min", g.mean.y() - sp, grid.p_min());
  if (g.mean.y() + sp > grid.p_max()) fail("p_max", g.mean.y() + sp, grid.p_max());
}

PhaseState sample_wigner(const PhaseGrid& grid, const GaussianWigner& g, double hbar) {
  check_support_margin(grid, g);
  const Eigen::Matrix2d inv = g.covariance.inverse();
  const double scale = 1.0 / (2.0 * std::numbers::pi * std::sqrt(g.covariance.determinant()));

  PhaseState s{grid, Eigen::ArrayXXcd(grid.np(), grid.nx()), Representation::W, 0.0, hbar};
  for (int j = 0; j < grid.nx(); ++j) {
    const double dx = grid.x(j) - g.mean.x();
    for (int i = 0; i < grid.np(); ++i) {
      const double dp = grid.p(i) - g.mean.y();
      const double q = inv(0, 0) * dx * dx + 2.0 * inv(0, 1) * dx * dp + inv(1, 1) * dp * dp;
      s.values(i, j) = scale * std::exp(-0.5 * q);
    }
  }
  return s;
}

PhaseState gaussian_wigner(const PhaseGrid& grid, const QuadraticHamiltonian& h, Eigen::Vector2d center,
                           double hbar) {
  return sample_wigner(grid, coherent_gaussian(h, center, hbar), hbar);
}

}  // namespace phasespace
