#include "phasespace/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "phasespace/classical.hpp"
#include "phasespace/errors.hpp"
#include "phasespace/representations.hpp"
#include "phasespace/spectral.hpp"

namespace phasespace {

SplitTimes split_times(const QuadraticHamiltonian& h, double dt, SplittingScheme scheme) {
  if (scheme == SplittingScheme::strang || h.c == 0.0) return {0.5 * dt, dt};
  const double w = h.omega();
  if (h.c < 0) return {std::tanh(0.5 * w * dt) / w, std::sinh(w * dt) / w};
  if (w * std::abs(dt) >= std::numbers::pi) {
    std::ostringstream os;
    os << "omega*dt = " << w * dt << " must stay below pi for the exact-shear split";
    throw ConfigError(os.str());
  }
  return {std::tan(0.5 * w * dt) / w, std::sin(w * dt) / w};
}

namespace {

// exp(+iτ·V'(x)·θ) on the (θ, x) lattice.
Eigen::ArrayXXcd kick_phase(const PhaseGrid& g, const QuadraticHamiltonian& h, double tau) {
  Eigen::ArrayXXcd phase(g.np(), g.nx());
  for (int j = 0; j < g.nx(); ++j) {
    const double force = tau * h.potential_gradient(g.x(j));
    for (int l = 0; l < g.np(); ++l) phase(l, j) = std::polar(1.0, force * g.theta(l));
  }
  return phase;
}

// exp(−iτ·(p/m)·λ) on the (p, λ) lattice.
Eigen::ArrayXXcd drift_phase(const PhaseGrid& g, const QuadraticHamiltonian& h, double tau) {
  Eigen::ArrayXXcd phase(g.np(), g.nx());
  for (int k = 0; k < g.nx(); ++k) {
    const double lam = g.lambda(k);
    for (int i = 0; i < g.np(); ++i) phase(i, k) = std::polar(1.0, -tau * g.p(i) / h.m * lam);
  }
  return phase;
}

// In-place kick: W(x,p) ← W(x, p + τ·V'(x)), done as a phase in (x,θ).
void kick(Eigen::ArrayXXcd& values, const PhaseGrid& g, const Eigen::ArrayXXcd& phase) {
  spectral::forward_rows_axis(g, values);
  values *= phase;
  spectral::inverse_rows_axis(g, values);
}

// In-place drift: W(x,p) ← W(x − τ·p/m, p), done as a phase in (λ,p).
void drift(Eigen::ArrayXXcd& values, const PhaseGrid& g, const Eigen::ArrayXXcd& phase) {
  spectral::forward_columns_axis(g, values);
  values *= phase;
  spectral::inverse_columns_axis(g, values);
}

// Phase arrays keyed by shear time; a run only ever needs a handful.
class ShearCache {
 public:
  ShearCache(const PhaseGrid& g, const QuadraticHamiltonian& h) : g_(g), h_(h) {}

  void kick(Eigen::ArrayXXcd& values, double tau) {
    if (tau != 0.0) phasespace::kick(values, g_, lookup(kicks_, tau, kick_phase));
  }
  void drift(Eigen::ArrayXXcd& values, double tau) {
    if (tau != 0.0) phasespace::drift(values, g_, lookup(drifts_, tau, drift_phase));
  }

 private:
  using Entries = std::vector<std::pair<double, Eigen::ArrayXXcd>>;

  template <typename Make>
  const Eigen::ArrayXXcd& lookup(Entries& entries, double tau, Make make) {
    for (const auto& [t, phase] : entries)
      if (t == tau) return phase;
    entries.emplace_back(tau, make(g_, h_, tau));
    return entries.back().second;
  }

  const PhaseGrid& g_;
  const QuadraticHamiltonian& h_;
  Entries kicks_, drifts_;
};

void require_finite(const Eigen::ArrayXXcd& values, long step_index) {
  if (!values.allFinite()) {
    std::ostringstream os;
    os << "non-finite values after step " << step_index;
    throw InstabilityError(os.str(), step_index);
  }
}

}  // namespace

PropagationPlan make_plan(const QuadraticHamiltonian& h, double dt, double t_final,
                          std::vector<double> snapshot_times, double hbar, SplittingScheme scheme) {
  h.validate();
  if (!(dt > 0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
  if (!(t_final >= dt) || !std::isfinite(t_final)) throw ConfigError("t_final must be at least dt");
  if (!(hbar > 0)) throw ConfigError("hbar must be positive");
  if (!std::is_sorted(snapshot_times.begin(), snapshot_times.end()))
    throw ConfigError("snapshot times must be sorted");
  for (double t : snapshot_times)
    if (t < 0 || t > t_final) throw ConfigError("snapshot time outside [0, t_final]");
  if (snapshot_times.empty() || snapshot_times.back() != t_final) snapshot_times.push_back(t_final);
  snapshot_times.erase(std::unique(snapshot_times.begin(), snapshot_times.end()), snapshot_times.end());
  split_times(h, dt, scheme);  // validates ω·dt for the confining case

  PropagationPlan plan{h, dt, t_final, std::move(snapshot_times), hbar, scheme, {}};
  double previous = 0.0;
  for (double t : plan.snapshot_times) {
    const double span = t - previous;
    const double rest = span - std::floor(span / dt + 1e-9) * dt;
    plan.residues.push_back(rest > 1e-12 * dt ? rest : 0.0);
    previous = t;
  }
  return plan;
}

PhaseState step(const PhaseState& w, const QuadraticHamiltonian& h, double dt, SplittingScheme scheme) {
  if (w.representation != Representation::W) throw DomainError("step expects a W state");
  const SplitTimes st = split_times(h, dt, scheme);
  PhaseState out = w;
  ShearCache shears(w.grid, h);
  shears.kick(out.values, st.kick);
  shears.drift(out.values, st.drift);
  shears.kick(out.values, st.kick);
  require_finite(out.values, 1);
  project_real(out);
  out.time += dt;
  return out;
}

double support_limit_time(const PhaseGrid& grid, const GaussianWigner& envelope, const QuadraticHamiltonian& h,
                          double t_max, double resolution) {
  const int samples = std::clamp(static_cast<int>(std::ceil(t_max / resolution)), 1, 4096);
  for (int n = 1; n <= samples; ++n) {
    const double t = t_max * n / samples;
    const GaussianWigner g = transported_gaussian(envelope, h, t);
    const double sx = 5.0 * std::sqrt(g.covariance(0, 0));
    const double sp = 5.0 * std::sqrt(g.covariance(1, 1));
    if (g.mean.x() - sx < grid.x_min() || g.mean.x() + sx > grid.x_max() || g.mean.y() - sp < grid.p_min() ||
        g.mean.y() + sp > grid.p_max())
      return t;
  }
  return std::numeric_limits<double>::infinity();
}

std::vector<Snapshot> propagate(const PhaseState& w, const PropagationPlan& plan) {
  if (w.representation != Representation::W) throw DomainError("propagate expects a W state");
  const QuadraticHamiltonian& h = plan.hamiltonian;
  const PhaseGrid& g = w.grid;

  if (mass_outside_margin(w) > kTruncationErrorMass)
    throw StateError("initial state already has mass in the boundary band");
  const Moments m0 = moments(w);
  GaussianWigner envelope;
  envelope.mean = m0.mean;
  envelope.covariance = m0.covariance;
  const double limit = support_limit_time(g, envelope, h, plan.t_final, plan.dt);
  if (limit < plan.t_final) {
    std::ostringstream os;
    os << "support reaches the grid boundary at t = " << limit << "; refusing t_final = " << plan.t_final;
    throw StateError(os.str());
  }

  std::vector<Snapshot> out;
  out.reserve(plan.snapshot_times.size());
  Eigen::ArrayXXcd values = w.values;
  ShearCache shears(g, h);
  double t = w.time;
  long step_index = 0;

  auto record = [&](double time) {
    PhaseState s{g, values, Representation::W, time, plan.hbar};
    project_real(s);
    DiagnosticsRecord d = diagnose(s, h);
    if (d.mass_outside_margin > kTruncationErrorMass) {
      std::ostringstream os;
      os << "mass " << d.mass_outside_margin << " reached the boundary band at t = " << time;
      throw StateError(os.str());
    }
    out.push_back({std::move(s), d});
  };

  for (double target : plan.snapshot_times) {
    const double span = target - (t - w.time);
    std::vector<double> steps(static_cast<std::size_t>(std::floor(span / plan.dt + 1e-9)), plan.dt);
    const double rest = span - static_cast<double>(steps.size()) * plan.dt;
    if (rest > 1e-12 * plan.dt) steps.push_back(rest);

    // Adjacent half-kicks of consecutive steps are merged into one kick.
    double pending_kick = 0.0;
    for (double dt : steps) {
      const SplitTimes st = split_times(h, dt, plan.scheme);
      shears.kick(values, pending_kick + st.kick);
      shears.drift(values, st.drift);
      pending_kick = st.kick;
      ++step_index;
      require_finite(values, step_index);
    }
    shears.kick(values, pending_kick);
    t = w.time + target;
    record(t);
  }
  return out;
}

}  // namespace phasespace
