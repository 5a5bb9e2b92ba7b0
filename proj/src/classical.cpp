#include "phasespace/classical.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "phasespace/errors.hpp"
#include "phasespace/representations.hpp"

namespace phasespace {

namespace {

constexpr double kMaxHyperbolicArgument = 30.0;

Eigen::Matrix2d linear_part(const QuadraticHamiltonian& h, double t) {
  Eigen::Matrix2d M;
  if (h.c == 0.0) {
    M << 1.0, t / h.m, 0.0, 1.0;
    return M;
  }
  const double w = h.omega();
  if (std::abs(w * t) > kMaxHyperbolicArgument) {
    std::ostringstream os;
    os << "|omega t| = " << std::abs(w * t) << " exceeds " << kMaxHyperbolicArgument;
    throw DomainError(os.str());
  }
  if (h.c < 0) return io_flow_matrix(h.m, w, t);
  const double cs = std::cos(w * t);
  const double sn = std::sin(w * t);
  M << cs, sn / (h.m * w), -h.m * w * sn, cs;
  return M;
}

}  // namespace

TrajectoryPoint newton_trajectory(double x0, double p0, double m, double omega, double t) {
  const Eigen::Vector2d z = io_flow_matrix(m, omega, t) * Eigen::Vector2d(x0, p0);
  return {PhaseSpace::direct, z, t, hamiltonian_direct(z.x(), z.y(), m, omega)};
}

TrajectoryPoint reciprocal_trajectory(double lambda0, double theta0, double m, double omega, double t) {
  const Eigen::Vector2d z = io_reciprocal_flow_matrix(m, omega, t) * Eigen::Vector2d(lambda0, theta0);
  return {PhaseSpace::reciprocal, z, t, hamiltonian_reciprocal(z.x(), z.y(), m, omega)};
}

AffineFlow AffineFlow::inverse() const {
  AffineFlow inv;
  inv.linear = linear.inverse();
  inv.offset = -inv.linear * offset;
  return inv;
}

AffineFlow AffineFlow::then(const AffineFlow& next) const {
  return {next.linear * linear, next.linear * offset + next.offset};
}

AffineFlow classical_flow(const QuadraticHamiltonian& h, double t) {
  h.validate();
  AffineFlow f;
  f.linear = linear_part(h, t);
  if (h.c == 0.0) {
    f.offset = Eigen::Vector2d(-h.b * t * t / (2.0 * h.m), -h.b * t);
  } else {
    const Eigen::Vector2d e(h.stationary_x(), 0.0);
    f.offset = e - f.linear * e;
  }
  return f;
}

Eigen::Matrix2d reciprocal_flow(const QuadraticHamiltonian& h, double t) {
  h.validate();
  // det M = 1, so M^{-T} is a signed permutation of M; no cancellation in a determinant.
  const Eigen::Matrix2d M = linear_part(h, t);
  Eigen::Matrix2d R;
  R << M(1, 1), -M(1, 0), -M(0, 1), M(0, 0);
  return R;
}

ClassicalEnsemble ClassicalEnsemble::evolved(const QuadraticHamiltonian& h, double t) const {
  const AffineFlow direct = classical_flow(h, t);
  const Eigen::Matrix2d recip = reciprocal_flow(h, t);
  ClassicalEnsemble out = *this;
  for (auto& pt : out.points) {
    if (pt.space == PhaseSpace::direct) {
      pt.coords = direct(pt.coords);
      pt.energy = h.energy(pt.coords.x(), pt.coords.y());
    } else {
      pt.coords = recip * pt.coords;
      pt.energy = h.reciprocal_energy(pt.coords.x(), pt.coords.y());
    }
    pt.t += t;
  }
  return out;
}

GaussianWigner transported_gaussian(const GaussianWigner& g, const QuadraticHamiltonian& h, double t) {
  const AffineFlow f = classical_flow(h, t);
  GaussianWigner out;
  out.mean = f(g.mean);
  out.covariance = f.linear * g.covariance * f.linear.transpose();
  return out;
}

Quadrant classify(const QuadraticHamiltonian& h, double x, double p) {
  if (h.c >= 0) throw DomainError("quadrants need an inverted potential (c < 0)");
  const double u = x - h.stationary_x();
  const double slope = h.m * h.omega();
  if (std::abs(p) >= slope * std::abs(u)) return p >= 0 ? Quadrant::upper : Quadrant::lower;
  return u > 0 ? Quadrant::right : Quadrant::left;
}

ConservationReport generator_conservation_check(std::span<const Eigen::Vector2d> direct_seeds,
                                                std::span<const Eigen::Vector2d> reciprocal_seeds,
                                                const QuadraticHamiltonian& h, std::span<const double> times) {
  ConservationReport r;
  r.seeds = direct_seeds.size() + reciprocal_seeds.size();
  for (double t : times) {
    const AffineFlow direct = classical_flow(h, t);
    const Eigen::Matrix2d recip = reciprocal_flow(h, t);
    for (const auto& z0 : direct_seeds) {
      const Eigen::Vector2d z = direct(z0);
      r.max_direct_deviation =
          std::max(r.max_direct_deviation, std::abs(h.energy(z.x(), z.y()) - h.energy(z0.x(), z0.y())));
    }
    for (const auto& k0 : reciprocal_seeds) {
      const Eigen::Vector2d k = recip * k0;
      r.max_reciprocal_deviation = std::max(
          r.max_reciprocal_deviation,
          std::abs(h.reciprocal_energy(k.x(), k.y()) - h.reciprocal_energy(k0.x(), k0.y())));
    }
    r.samples += direct_seeds.size() + reciprocal_seeds.size();
  }
  return r;
}

ConservationReport generator_conservation_check(const PhaseState& state, const QuadraticHamiltonian& h,
                                                std::span<const double> times, std::size_t n_seeds,
                                                std::uint64_t seed) {
  const PhaseState w = to_representation(state, Representation::W);
  const PhaseState a = to_representation(state, Representation::A);
  std::mt19937_64 rng(seed);

  auto draw = [&](const PhaseState& s, bool reciprocal) {
    const Eigen::ArrayXXd weight = s.values.abs();
    std::discrete_distribution<Eigen::Index> pick(weight.data(), weight.data() + weight.size());
    std::vector<Eigen::Vector2d> seeds;
    seeds.reserve(n_seeds);
    for (std::size_t n = 0; n < n_seeds; ++n) {
      const Eigen::Index flat = pick(rng);
      const int i = static_cast<int>(flat % weight.rows());
      const int j = static_cast<int>(flat / weight.rows());
      seeds.emplace_back(reciprocal ? Eigen::Vector2d(s.grid.lambda(j), s.grid.theta(i))
                                    : Eigen::Vector2d(s.grid.x(j), s.grid.p(i)));
    }
    return seeds;
  };
  const auto direct_seeds = draw(w, false);
  const auto reciprocal_seeds = draw(a, true);
  return generator_conservation_check(direct_seeds, reciprocal_seeds, h, times);
}

}  // namespace phasespace
