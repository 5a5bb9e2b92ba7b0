#include "phasespace/analysis.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "phasespace/errors.hpp"
#include "phasespace/representations.hpp"

namespace phasespace {

namespace {

void require_wigner(const PhaseState& s) {
  if (s.representation != Representation::W) throw DomainError("diagnostic expects a W state");
}

Eigen::ArrayXXd real_values(const PhaseState& w) { return w.values.real(); }

// Row-broadcast x and column-broadcast p lattices shaped like values.
Eigen::ArrayXXd x_field(const PhaseGrid& g) { return g.x_values().transpose().replicate(g.np(), 1); }
Eigen::ArrayXXd p_field(const PhaseGrid& g) { return g.p_values().replicate(1, g.nx()); }

// 8-point Gauss–Legendre on [-1, 1].
constexpr std::array<double, 8> kGaussNodes = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                               -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                               0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGaussWeights = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                                 0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                                 0.2223810344533745, 0.1012285362903763};

struct Rule {
  Eigen::ArrayXd nodes;
  Eigen::ArrayXd weights;
};

// Composite rule on [lo, hi] with panels no wider than `max_panel`.
Rule composite_gauss(double lo, double hi, double max_panel) {
  const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_panel)));
  const double h = (hi - lo) / panels;
  Rule r;
  r.nodes.resize(panels * 8);
  r.weights.resize(panels * 8);
  for (int k = 0; k < panels; ++k) {
    const double mid = lo + (k + 0.5) * h;
    for (int q = 0; q < 8; ++q) {
      r.nodes(k * 8 + q) = mid + 0.5 * h * kGaussNodes[q];
      r.weights(k * 8 + q) = 0.5 * h * kGaussWeights[q];
    }
  }
  return r;
}

}  // namespace

double norm(const PhaseState& w) {
  require_wigner(w);
  return w.values.real().sum() * w.grid.cell_area();
}

double purity(const PhaseState& w) {
  require_wigner(w);
  return 2.0 * std::numbers::pi * w.hbar * w.values.real().square().sum() * w.grid.cell_area();
}

Moments moments(const PhaseState& w) {
  require_wigner(w);
  const Eigen::ArrayXXd f = real_values(w);
  const Eigen::ArrayXXd X = x_field(w.grid);
  const Eigen::ArrayXXd P = p_field(w.grid);
  const double n = f.sum();
  Moments m;
  m.mean = Eigen::Vector2d((f * X).sum() / n, (f * P).sum() / n);
  const Eigen::ArrayXXd dX = X - m.mean.x();
  const Eigen::ArrayXXd dP = P - m.mean.y();
  m.covariance(0, 0) = (f * dX.square()).sum() / n;
  m.covariance(1, 1) = (f * dP.square()).sum() / n;
  m.covariance(0, 1) = m.covariance(1, 0) = (f * dX * dP).sum() / n;
  return m;
}

double energy(const PhaseState& w, const QuadraticHamiltonian& h) {
  require_wigner(w);
  const Eigen::ArrayXXd X = x_field(w.grid);
  const Eigen::ArrayXXd P = p_field(w.grid);
  const Eigen::ArrayXXd H = P.square() / (2.0 * h.m) - h.a + h.b * X + h.c * X.square();
  return (H * w.values.real()).sum() * w.grid.cell_area();
}

double hudson_check(const PhaseState& w) {
  require_wigner(w);
  return w.values.real().minCoeff();
}

UncertaintyCheck covariance_and_uncertainty(const PhaseState& w, double hbar) {
  UncertaintyCheck u;
  u.covariance = moments(w).covariance;
  u.determinant = u.covariance.determinant();
  u.uncertainty_ok = u.determinant >= hbar * hbar / 4.0 - 1e-9;
  return u;
}

QuadrantWeights quadrant_decomposition(const PhaseState& w, const QuadraticHamiltonian& h) {
  require_wigner(w);
  if (h.c >= 0) throw DomainError("quadrant decomposition needs separatrices (c < 0)");
  const PhaseGrid& g = w.grid;
  const double xs = h.stationary_x();
  const double slope = h.m * h.omega();
  constexpr double two_pi = 2.0 * std::numbers::pi;

  // Ambiguity function: W(x,p) = Σ_kl (dλ/2π)(dθ/2π) A_kl e^{i(λ_k x + θ_l p)}.
  const Eigen::ArrayXXcd A = to_representation(w, Representation::A).values;

  // p-quadrature split at the saddle momentum p = 0 where the wedge limits have a kink.
  const double max_panel = 8.0 * g.dp();
  Rule rule;
  {
    const double split = std::clamp(0.0, g.p_min(), g.p_max());
    const Rule lo = composite_gauss(g.p_min(), split, max_panel);
    const Rule hi = composite_gauss(split, g.p_max(), max_panel);
    rule.nodes.resize(lo.nodes.size() + hi.nodes.size());
    rule.weights.resize(rule.nodes.size());
    rule.nodes << lo.nodes, hi.nodes;
    rule.weights << lo.weights, hi.weights;
  }
  const Eigen::Index nq = rule.nodes.size();

  // Z at the quadrature momenta: Zq = E · A with E(q,l) = (dθ/2π) e^{iθ_l p_q}.
  Eigen::MatrixXcd E(nq, g.np());
  for (Eigen::Index q = 0; q < nq; ++q)
    for (int l = 0; l < g.np(); ++l) E(q, l) = std::polar(g.dtheta() / two_pi, g.theta(l) * rule.nodes(q));
  const Eigen::MatrixXcd Zq = E * A.matrix();

  // ∫_lo^hi of one row of the interpolant.
  const Eigen::ArrayXd lambdas = g.lambda_values();
  auto row_integral = [&](Eigen::Index q, double lo, double hi) {
    lo = std::clamp(lo, g.x_min(), g.x_max());
    hi = std::clamp(hi, g.x_min(), g.x_max());
    if (hi <= lo) return 0.0;
    Complex sum = 0.0;
    for (int k = 0; k < g.nx(); ++k) {
      const double lam = lambdas(k);
      const Complex kernel = (lam == 0.0) ? Complex(hi - lo)
                                          : (std::polar(1.0, lam * hi) - std::polar(1.0, lam * lo)) /
                                                Complex(0.0, lam);
      sum += Zq(q, k) * kernel;
    }
    return (sum * (g.dlambda() / two_pi)).real();
  };

  QuadrantWeights out;
  for (Eigen::Index q = 0; q < nq; ++q) {
    const double p = rule.nodes(q);
    const double reach = std::abs(p) / slope;
    const double row_total = Zq(q, g.nx() / 2).real();  // λ = 0 column is ∫ W dx over the period
    const double right = row_integral(q, xs + reach, g.x_max());
    const double left = row_integral(q, g.x_min(), xs - reach);
    const double over = row_total - right - left;
    out.right += rule.weights(q) * right;
    out.left += rule.weights(q) * left;
    (p >= 0 ? out.upper : out.lower) += rule.weights(q) * over;
  }
  return out;
}

TransmissionReflection transmission_reflection(const QuadrantWeights& q, Incidence incidence) {
  TransmissionReflection tr;
  tr.T = q.upper + q.lower;
  tr.R = incidence == Incidence::from_right ? q.right : q.left;
  tr.leakage = incidence == Incidence::from_right ? q.left : q.right;
  return tr;
}

TransmissionReflection transmission_reflection(const PhaseState& w, const QuadraticHamiltonian& h,
                                               Incidence incidence) {
  return transmission_reflection(quadrant_decomposition(w, h), incidence);
}

double mass_outside_margin(const PhaseState& w, double band_fraction) {
  const PhaseGrid& g = w.grid;
  const int bx = std::max(1, static_cast<int>(std::lround(band_fraction * g.nx())));
  const int bp = std::max(1, static_cast<int>(std::lround(band_fraction * g.np())));
  const Eigen::ArrayXXd mag = w.values.abs();
  const double all = mag.sum();
  const double inner = mag.block(bp, bx, g.np() - 2 * bp, g.nx() - 2 * bx).sum();
  return (all - inner) * cell_measure(g, w.representation);
}

DiagnosticsRecord diagnose(const PhaseState& w, const QuadraticHamiltonian& h) {
  require_wigner(w);
  DiagnosticsRecord d;
  d.time = w.time;
  d.norm = norm(w);
  d.purity = purity(w);
  const Moments m = moments(w);
  d.mean_x = m.mean.x();
  d.mean_p = m.mean.y();
  d.energy = energy(w, h);
  d.sigma_xx = m.covariance(0, 0);
  d.sigma_xp = m.covariance(0, 1);
  d.sigma_pp = m.covariance(1, 1);
  d.min_value = w.values.real().minCoeff();
  d.max_value = w.values.real().maxCoeff();
  d.uncertainty_ok = m.covariance.determinant() >= w.hbar * w.hbar / 4.0 - 1e-9;
  if (h.c < 0) {
    const QuadrantWeights q = quadrant_decomposition(w, h);
    d.quadrants = q;
    const Incidence inc = d.mean_x >= h.stationary_x() ? Incidence::from_right : Incidence::from_left;
    const TransmissionReflection tr = transmission_reflection(q, inc);
    d.T = tr.T;
    d.R = tr.R;
    d.leakage = tr.leakage;
  } else {
    d.T = d.R = d.leakage = std::nan("");
  }
  d.mass_outside_margin = mass_outside_margin(w);
  d.truncation_warning = d.mass_outside_margin > kTruncationWarnMass;
  return d;
}

}  // namespace phasespace
