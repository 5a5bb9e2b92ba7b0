#include "phasespace/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <numbers>
#include <ostream>
#include <sstream>

#include "phasespace/analysis.hpp"
#include "phasespace/classical.hpp"
#include "phasespace/errors.hpp"
#include "phasespace/representations.hpp"
#include "phasespace/snapshot_io.hpp"

namespace phasespace {

namespace fs = std::filesystem;

namespace {

constexpr int kRingPoints = 16;

std::vector<Eigen::Vector2d> rings(const Eigen::Vector2d& center, const Eigen::Matrix2d& cov) {
  const Eigen::Matrix2d L = cov.llt().matrixL();
  std::vector<Eigen::Vector2d> out{center};
  for (double r : {1.0, 2.0}) {
    for (int k = 0; k < kRingPoints; ++k) {
      const double phi = 2.0 * std::numbers::pi * k / kRingPoints;
      out.push_back(center + r * L * Eigen::Vector2d(std::cos(phi), std::sin(phi)));
    }
  }
  return out;
}

std::string snapshot_prefix(std::size_t k) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "snap%03zu", k);
  return buf;
}

double relative_l2(const Eigen::ArrayXXcd& a, const Eigen::ArrayXXcd& b) {
  return std::sqrt((a - b).abs2().sum() / b.abs2().sum());
}

// Splits a sampled curve into the runs that lie inside the box.
void append_clipped(const Polyline& curve, const Eigen::Vector2d& s_range, const Eigen::Vector2d& q_range,
                    std::vector<Polyline>& out) {
  Polyline run;
  for (const auto& pt : curve) {
    const bool inside = pt.x() >= s_range[0] && pt.x() <= s_range[1] && pt.y() >= q_range[0] && pt.y() <= q_range[1];
    if (inside) {
      run.push_back(pt);
    } else if (!run.empty()) {
      if (run.size() > 1) out.push_back(std::move(run));
      run.clear();
    }
  }
  if (run.size() > 1) out.push_back(std::move(run));
}

std::vector<double> default_levels(double extra) {
  std::vector<double> levels{-8, -4, -2, -1, -0.5, 0, 0.5, 1, 2, 4, 8};
  if (std::isfinite(extra)) levels.push_back(extra);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  return levels;
}

std::string contour_text(const std::vector<double>& levels, const char* symbol, const char* columns,
                         const std::function<std::vector<Polyline>(double)>& trace) {
  std::ostringstream os;
  os << "# level sets of " << symbol << "; columns: " << columns << "; polylines separated by blank lines\n";
  for (double e : levels) {
    for (const auto& line : trace(e)) {
      os << "# level=" << format_double(e) << '\n';
      for (const auto& pt : line) os << format_double(pt.x()) << ' ' << format_double(pt.y()) << '\n';
      os << '\n';
    }
  }
  return os.str();
}

Eigen::Vector2d reciprocal_extent(const Eigen::ArrayXd& values) {
  return {values(0), values(values.size() - 1)};
}

std::string direct_contours(const RunConfig& cfg, const QuadraticHamiltonian& h, const PhaseGrid& grid,
                            double state_energy) {
  const auto levels = cfg.contour_levels.empty() ? default_levels(state_energy) : cfg.contour_levels;
  const Eigen::Vector2d xr(grid.x_min(), grid.x_max());
  const Eigen::Vector2d pr(grid.p_min(), grid.p_max());
  return contour_text(levels, "H", "x p", [&](double e) {
    std::vector<Polyline> out;
    if (h.c != 0.0) {
      const double xs = h.stationary_x();
      const double e_rel = e - h.energy(xs, 0.0);
      for (auto line : conic_level_set(h.m, h.c, e_rel, xr.array() - xs, pr)) {
        for (auto& pt : line) pt.x() += xs;
        out.push_back(std::move(line));
      }
    } else if (h.b != 0.0) {
      Polyline curve;
      const int n = 401;
      for (int i = 0; i < n; ++i) {
        const double p = pr[0] + (pr[1] - pr[0]) * i / (n - 1);
        curve.emplace_back((e + h.a - p * p / (2.0 * h.m)) / h.b, p);
      }
      append_clipped(curve, xr, pr, out);
    } else {
      out = conic_level_set(h.m, 0.0, e + h.a, xr, pr);
    }
    return out;
  });
}

std::string reciprocal_contours(const RunConfig& cfg, const QuadraticHamiltonian& h, const PhaseGrid& grid) {
  const auto levels = cfg.contour_levels.empty() ? default_levels(NAN) : cfg.contour_levels;
  const Eigen::Vector2d lr = reciprocal_extent(grid.lambda_values());
  const Eigen::Vector2d tr = reciprocal_extent(grid.theta_values());
  return contour_text(levels, "reciprocal H", "lambda theta", [&](double e) {
    // ℍ = λ²/2m + cθ²: the conic in (s, q) = (θ, λ), written out as (λ, θ).
    auto lines = conic_level_set(h.m, h.c, e, tr, lr);
    for (auto& line : lines)
      for (auto& pt : line) pt = Eigen::Vector2d(pt.y(), pt.x());
    return lines;
  });
}

void write_dots(const fs::path& path, const char* columns, const std::vector<Eigen::Vector2d>& points,
                const std::function<double(const Eigen::Vector2d&)>& invariant, double t) {
  std::ostringstream os;
  os << "# t=" << format_double(t) << "; columns: " << columns << '\n';
  for (const auto& z : points)
    os << format_double(z.x()) << ' ' << format_double(z.y()) << ' ' << format_double(invariant(z)) << '\n';
  write_text_file(path, os.str());
}

}  // namespace

PhaseState initial_state(const RunConfig& cfg) {
  const PhaseGrid grid = cfg.grid();
  if (!cfg.gaussian_initial())
    return wigner_from_wavefunction(read_wavefunction(cfg.wavefunction, grid), grid, cfg.hbar);
  QuadraticHamiltonian shape = cfg.hamiltonian();
  // A free particle has no natural width; borrow the oscillator of the configured ω.
  if (shape.c == 0.0) shape = QuadraticHamiltonian::harmonic(cfg.m, cfg.omega);
  return sample_wigner(grid, coherent_gaussian(shape, cfg.center, cfg.hbar), cfg.hbar);
}

std::vector<Eigen::Vector2d> direct_seeds(const Eigen::Vector2d& mean, const Eigen::Matrix2d& cov) {
  return rings(mean, cov);
}

std::vector<Eigen::Vector2d> reciprocal_seeds(const Eigen::Matrix2d& cov) {
  return rings(Eigen::Vector2d::Zero(), cov.inverse());
}

std::vector<Polyline> conic_level_set(double m, double c, double e, Eigen::Vector2d s_range,
                                      Eigen::Vector2d q_range, int samples) {
  std::vector<Polyline> out;
  auto along = [&](const Eigen::Vector2d& range, auto&& point) {
    Polyline curve;
    for (int i = 0; i < samples; ++i) curve.push_back(point(range[0] + (range[1] - range[0]) * i / (samples - 1)));
    append_clipped(curve, s_range, q_range, out);
  };
  if (c < 0.0 && e >= 0.0) {
    for (double sign : {1.0, -1.0})
      along(s_range, [&](double s) { return Eigen::Vector2d(s, sign * std::sqrt(2.0 * m * (e - c * s * s))); });
  } else if (c < 0.0) {
    for (double sign : {1.0, -1.0})
      along(q_range, [&](double q) { return Eigen::Vector2d(sign * std::sqrt((e - q * q / (2.0 * m)) / c), q); });
  } else if (c > 0.0 && e > 0.0) {
    const double a_s = std::sqrt(e / c);
    const double a_q = std::sqrt(2.0 * m * e);
    along(Eigen::Vector2d(0.0, 2.0 * std::numbers::pi),
          [&](double phi) { return Eigen::Vector2d(a_s * std::cos(phi), a_q * std::sin(phi)); });
  } else if (c == 0.0 && e >= 0.0) {
    const double q = std::sqrt(2.0 * m * e);
    for (double sign : q > 0.0 ? std::vector<double>{1.0, -1.0} : std::vector<double>{1.0})
      along(s_range, [&](double s) { return Eigen::Vector2d(s, sign * q); });
  }
  return out;
}

RunResult run(const RunConfig& cfg, const fs::path& out_dir, std::ostream* log) {
  const QuadraticHamiltonian h = cfg.hamiltonian();
  const PhaseState w0 = initial_state(cfg);
  const PhaseGrid& grid = w0.grid;
  if (cfg.degenerate_pair && !grid.symmetric())
    throw ConfigError("degenerate_pair needs a grid symmetric about the origin");
  const PropagationPlan plan = make_plan(h, cfg.dt, cfg.t_final, cfg.snapshot_times, cfg.hbar, cfg.scheme);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir.string() + "': " + ec.message());

  RunResult result;
  auto emit = [&](const fs::path& name, const std::string& text) {
    write_text_file(out_dir / name, text);
    result.files.push_back(out_dir / name);
  };

  RunConfig resolved = cfg;
  resolved.output_dir = out_dir;
  emit("resolved_config.txt", resolved_config_text(resolved));

  result.snapshots = propagate(w0, plan);

  std::string csv = diagnostics_csv_header() + "\n";
  for (std::size_t k = 0; k < result.snapshots.size(); ++k) {
    const auto& snap = result.snapshots[k];
    csv += diagnostics_csv_row(snap.diagnostics) + "\n";
    if (snap.diagnostics.truncation_warning) {
      std::ostringstream msg;
      msg << "snapshot t=" << format_double(snap.state.time) << ": boundary band holds "
          << format_double(snap.diagnostics.mass_outside_margin);
      result.warnings.push_back(msg.str());
    }
    for (Representation r : cfg.representations) {
      const PhaseState s = to_representation(snap.state, r);
      // W is real; its only meaningful component is the real part.
      const std::vector<Component> comps = r == Representation::W ? std::vector<Component>{Component::real}
                                                                  : cfg.components;
      for (Component c : comps) {
        const fs::path name = snapshot_prefix(k) + "_" + std::string(to_string(r)) + "_" +
                              std::string(to_string(c)) + ".psgrid";
        write_grid_file(out_dir / name, s, c);
        result.files.push_back(out_dir / name);
      }
    }
  }
  emit("diagnostics.csv", csv);

  // Classical overlays.
  const Moments m0 = moments(w0);
  const auto dseeds = direct_seeds(m0.mean, m0.covariance);
  const auto rseeds = reciprocal_seeds(m0.covariance);
  for (std::size_t k = 0; k < result.snapshots.size(); ++k) {
    const double t = result.snapshots[k].state.time;
    const AffineFlow flow = classical_flow(h, t);
    const Eigen::Matrix2d rflow = reciprocal_flow(h, t);
    std::vector<Eigen::Vector2d> d, r;
    for (const auto& z : dseeds) d.push_back(flow(z));
    for (const auto& z : rseeds) r.push_back(rflow * z);
    const std::string prefix = snapshot_prefix(k);
    write_dots(out_dir / (prefix + "_dots_direct.txt"), "x p H", d,
               [&](const Eigen::Vector2d& z) { return h.energy(z.x(), z.y()); }, t);
    write_dots(out_dir / (prefix + "_dots_reciprocal.txt"), "lambda theta reciprocal_H", r,
               [&](const Eigen::Vector2d& z) { return h.reciprocal_energy(z.x(), z.y()); }, t);
    result.files.push_back(out_dir / (prefix + "_dots_direct.txt"));
    result.files.push_back(out_dir / (prefix + "_dots_reciprocal.txt"));
  }
  emit("contours_direct.txt", direct_contours(cfg, h, grid, h.energy(m0.mean.x(), m0.mean.y())));
  emit("contours_reciprocal.txt", reciprocal_contours(cfg, h, grid));

  if (cfg.degenerate_pair) {
    std::string text = "time,max_abs_diff,l2_diff\n";
    for (const auto& snap : result.snapshots) {
      const PhaseState a = to_representation(snap.state, Representation::A);
      const PhaseState a_partner = to_representation(degenerate_partner(snap.state), Representation::A);
      const Eigen::ArrayXXd diff2 = (a_partner.values - a.values.conjugate()).abs2();
      const double l2 = std::sqrt(diff2.sum() * cell_measure(grid, Representation::A));
      text += format_double(snap.state.time) + "," + format_double(std::sqrt(diff2.maxCoeff())) + "," +
              format_double(l2) + "\n";
    }
    emit("degenerate_pair.csv", text);
  }

  if (log) {
    for (const auto& w : result.warnings) *log << "warning: " << w << '\n';
    *log << "wrote " << result.files.size() << " files to " << out_dir.string() << '\n';
  }
  return result;
}

std::vector<CheckResult> verify(const RunConfig& cfg) {
  const QuadraticHamiltonian h = cfg.hamiltonian();
  const PhaseState w0 = initial_state(cfg);
  const PhaseGrid& grid = w0.grid;
  const PropagationPlan plan = make_plan(h, cfg.dt, cfg.t_final, cfg.snapshot_times, cfg.hbar, cfg.scheme);
  const auto snaps = propagate(w0, plan);
  const DiagnosticsRecord& d0 = snaps.front().diagnostics;

  std::vector<CheckResult> checks;
  auto add = [&](std::string name, bool ok, double value, double tol) {
    std::ostringstream os;
    os << "value=" << format_double(value) << " tol=" << format_double(tol);
    checks.push_back({std::move(name), ok, os.str()});
  };

  double norm_err = 0, purity_err = 0, energy_err = 0, hudson = 0;
  bool uncertainty = true;
  for (const auto& s : snaps) {
    const auto& d = s.diagnostics;
    norm_err = std::max(norm_err, std::abs(d.norm - 1.0));
    purity_err = std::max(purity_err, std::abs(d.purity - d0.purity));
    energy_err = std::max(energy_err, std::abs(d.energy - d0.energy));
    hudson = std::min(hudson, d.min_value / d.max_value);
    uncertainty = uncertainty && d.uncertainty_ok;
  }
  add("norm", norm_err <= 1e-8, norm_err, 1e-8);
  add("purity", purity_err <= 1e-8, purity_err, 1e-8);
  add("energy", energy_err <= 1e-4, energy_err, 1e-4);
  checks.push_back({"uncertainty", uncertainty, uncertainty ? "det >= hbar^2/4" : "violated"});

  if (cfg.gaussian_initial()) {
    add("hudson", hudson >= -1e-6, hudson, 1e-6);
    QuadraticHamiltonian shape = h;
    if (shape.c == 0.0) shape = QuadraticHamiltonian::harmonic(cfg.m, cfg.omega);
    const GaussianWigner g = coherent_gaussian(shape, cfg.center, cfg.hbar);
    double worst = 0.0;
    for (const auto& s : snaps) {
      const PhaseState oracle = characteristics_oracle(g, grid, h, s.state.time, cfg.hbar);
      worst = std::max(worst, relative_l2(s.state.values, oracle.values));
    }
    add("oracle", worst <= 1e-3, worst, 1e-3);
  }

  if (h.c < 0.0) {
    const auto& q0 = *d0.quadrants;
    double drift = 0.0, closure = 0.0;
    for (const auto& s : snaps) {
      const auto& q = *s.diagnostics.quadrants;
      drift = std::max({drift, std::abs(q.upper - q0.upper), std::abs(q.lower - q0.lower),
                        std::abs(q.left - q0.left), std::abs(q.right - q0.right), std::abs(s.diagnostics.T - d0.T),
                        std::abs(s.diagnostics.R - d0.R)});
      closure = std::max(closure, std::abs(s.diagnostics.T + s.diagnostics.R + s.diagnostics.leakage - q.total()));
    }
    add("quadrant_stability", drift <= 1e-3, drift, 1e-3);
    add("quadrant_closure", closure <= 1e-9, closure, 1e-9);
  }

  std::vector<double> times;
  const double t_cap = h.omega() > 0 ? std::min(3.0, 29.0 / h.omega()) : 3.0;
  for (int k = 1; k <= 30; ++k) times.push_back(t_cap * k / 30.0);
  const ConservationReport rep = generator_conservation_check(w0, h, times, 100, cfg.seed);
  const double gen = std::max(rep.max_direct_deviation, rep.max_reciprocal_deviation);
  add("generator_invariants", gen <= 1e-10, gen, 1e-10);

  const PhaseState& wf = snaps.back().state;
  const PhaseState b = to_representation(wf, Representation::B);
  const PhaseState z = to_representation(b, Representation::Z);
  const PhaseState a = to_representation(z, Representation::A);
  const PhaseState back = to_representation(a, Representation::W);
  const double roundtrip = (back.values - wf.values).abs().maxCoeff();
  add("representation_roundtrip", roundtrip <= 1e-12, roundtrip, 1e-12);
  const PhaseState a_via_b = to_representation(b, Representation::A);
  const PhaseState a_via_z = to_representation(to_representation(wf, Representation::Z), Representation::A);
  const double path = (a_via_b.values - a_via_z.values).abs().maxCoeff();
  add("path_independence", path <= 1e-10, path, 1e-10);
  const double origin = std::abs(a.values(grid.np() / 2, grid.nx() / 2) - norm(wf));
  add("ambiguity_origin", origin <= 1e-10, origin, 1e-10);

  if (grid.symmetric()) {
    const PhaseState ap = to_representation(degenerate_partner(wf), Representation::A);
    const double dp = (ap.values - a.values.conjugate()).abs().maxCoeff();
    add("degenerate_pair", dp <= 1e-10, dp, 1e-10);
  }
  return checks;
}

std::vector<BatchEntry> batch(const fs::path& dir, const fs::path& out_root) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("'" + dir.string() + "' is not a directory");
  std::vector<fs::path> configs;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".cfg") configs.push_back(entry.path());
  std::sort(configs.begin(), configs.end());

  std::vector<std::future<BatchEntry>> jobs;
  for (const auto& path : configs) {
    jobs.push_back(std::async(std::launch::async, [path, out_root] {
      BatchEntry e{path, out_root / path.stem(), 0, "ok"};
      try {
        run(load_config(path), e.output);
      } catch (const std::exception& ex) {
        e.exit_code = exit_code_for(ex);
        e.message = ex.what();
      }
      return e;
    }));
  }
  std::vector<BatchEntry> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const NormalizationError*>(&e) ||
      dynamic_cast<const DomainError*>(&e))
    return 2;
  if (dynamic_cast<const InstabilityError*>(&e) || dynamic_cast<const StateError*>(&e)) return 3;
  if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const fs::filesystem_error*>(&e)) return 4;
  return 1;
}

}  // namespace phasespace
