#include "phasespace/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "phasespace/errors.hpp"

namespace phasespace {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = s.find(',', pos);
    const auto item = trim(s.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

class Parser {
 public:
  explicit Parser(int line) : line_(line) {}

  // Line 0 marks a problem with a defaulted (absent) key.
  [[noreturn]] void fail(const std::string& msg) const {
    if (line_ == 0) throw ConfigError(msg);
    throw ConfigError("line " + std::to_string(line_) + ": " + msg);
  }

  double number(std::string_view s) const {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
      fail("'" + std::string(s) + "' is not a finite number");
    return v;
  }

  long integer(std::string_view s) const {
    long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) fail("'" + std::string(s) + "' is not an integer");
    return v;
  }

  bool boolean(std::string_view s) const {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    fail("'" + std::string(s) + "' is not a boolean");
  }

 private:
  int line_;
};

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_double(v[i]);
  }
  return s;
}

std::string_view potential_name(PotentialKind k) {
  switch (k) {
    case PotentialKind::inverted: return "inverted";
    case PotentialKind::harmonic: return "harmonic";
    case PotentialKind::free: return "free";
    case PotentialKind::general: return "general";
  }
  return "?";
}

// Centre of a Gaussian whose classical energy is `e`, placed on the x axis below the
// barrier (or on the p axis above it).
Eigen::Vector2d center_for_energy(const QuadraticHamiltonian& h, double e) {
  if (h.c == 0.0) {
    if (h.b != 0.0) return Eigen::Vector2d((e + h.a) / h.b, 0.0);
    if (e + h.a < 0) throw ConfigError("energy_label below the free-particle minimum");
    return Eigen::Vector2d(0.0, std::sqrt(2.0 * h.m * (e + h.a)));
  }
  const double xs = h.stationary_x();
  const double rel = e - h.energy(xs, 0.0);
  if (h.c > 0 && rel < 0) throw ConfigError("energy_label below the oscillator minimum");
  if (rel == 0.0) return Eigen::Vector2d(xs, 0.0);
  if (rel / h.c > 0) return Eigen::Vector2d(xs + std::sqrt(rel / h.c), 0.0);
  return Eigen::Vector2d(xs, std::sqrt(2.0 * h.m * rel));
}

}  // namespace

QuadraticHamiltonian RunConfig::hamiltonian() const {
  switch (potential) {
    case PotentialKind::inverted: return QuadraticHamiltonian::inverted(m, omega);
    case PotentialKind::harmonic: return QuadraticHamiltonian::harmonic(m, omega);
    case PotentialKind::free: return QuadraticHamiltonian::free_particle(m);
    case PotentialKind::general: return {m, a, b, c};
  }
  return {};
}

PhaseGrid RunConfig::grid() const { return make_grid(nx, np, {x_min, x_max}, {p_min, p_max}); }

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  std::map<std::string, std::pair<std::string, int>> kv;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() : eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) Parser(line_no).fail("expected key=value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) Parser(line_no).fail("empty key");
    if (kv.count(key)) Parser(line_no).fail("duplicate key '" + key + "'");
    kv[key] = {value, line_no};
  }

  static const std::set<std::string> known = {
      "nx",        "np",           "x_min",          "x_max",      "p_min",           "p_max",
      "potential", "m",            "omega",          "a",          "b",               "c",
      "hbar",      "energy_label", "center_x",       "center_p",   "wavefunction",    "dt",
      "t_final",   "snapshot_times", "scheme",       "output_dir", "representations", "components",
      "degenerate_pair", "contour_levels", "seed"};
  for (const auto& [key, entry] : kv)
    if (!known.count(key)) Parser(entry.second).fail("unknown key '" + key + "'");

  RunConfig cfg;
  auto has = [&](const char* k) { return kv.count(k) > 0; };
  auto get_number = [&](const char* k, double& out) {
    if (auto it = kv.find(k); it != kv.end()) out = Parser(it->second.second).number(it->second.first);
  };
  auto line_of = [&](const char* k) { return kv.count(k) ? kv.at(k).second : 0; };

  if (auto it = kv.find("potential"); it != kv.end()) {
    const std::string& v = it->second.first;
    if (v == "inverted") cfg.potential = PotentialKind::inverted;
    else if (v == "harmonic") cfg.potential = PotentialKind::harmonic;
    else if (v == "free") cfg.potential = PotentialKind::free;
    else if (v == "general") cfg.potential = PotentialKind::general;
    else Parser(it->second.second).fail("unknown potential '" + v + "'");
  }
  get_number("m", cfg.m);
  get_number("omega", cfg.omega);
  get_number("hbar", cfg.hbar);
  for (const char* k : {"a", "b", "c"}) {
    if (has(k) && cfg.potential != PotentialKind::general)
      Parser(line_of(k)).fail(std::string("'") + k + "' is only used with potential=general");
  }
  if (cfg.potential == PotentialKind::general) {
    for (const char* k : {"a", "b", "c"})
      if (!has(k)) throw ConfigError(std::string("potential=general requires '") + k + "'");
    if (has("omega")) Parser(line_of("omega")).fail("'omega' is derived from c for potential=general");
    get_number("a", cfg.a);
    get_number("b", cfg.b);
    get_number("c", cfg.c);
  }
  if (!(cfg.m > 0)) Parser(line_of("m")).fail("m must be positive");
  if (!(cfg.omega > 0)) Parser(line_of("omega")).fail("omega must be positive");
  if (!(cfg.hbar > 0)) Parser(line_of("hbar")).fail("hbar must be positive");
  const QuadraticHamiltonian h = cfg.hamiltonian();

  // Initial state.
  const bool by_energy = has("energy_label");
  const bool by_center = has("center_x") || has("center_p");
  const bool by_wavefunction = has("wavefunction");
  if (by_energy + by_center + by_wavefunction == 0)
    throw ConfigError("no initial state: give energy_label, center_x/center_p or wavefunction");
  if (by_energy + by_center + by_wavefunction > 1)
    throw ConfigError("initial state given more than once: choose one of energy_label, center, wavefunction");
  double classical_energy = 0.0;
  if (by_energy) {
    double e = 0.0;
    get_number("energy_label", e);
    cfg.energy_label = e;
    try {
      cfg.center = center_for_energy(h, e);
    } catch (const ConfigError& err) {
      Parser(line_of("energy_label")).fail(err.what());
    }
    classical_energy = e;
  } else if (by_center) {
    get_number("center_x", cfg.center.x());
    get_number("center_p", cfg.center.y());
    classical_energy = h.energy(cfg.center.x(), cfg.center.y());
  } else {
    std::filesystem::path p = kv.at("wavefunction").first;
    cfg.wavefunction = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  }

  // Grid: defaults depend on the state energy, explicit keys override.
  if (std::abs(classical_energy) > 1.0) {
    cfg.nx = cfg.np = 1024;
    cfg.x_min = cfg.p_min = -24.0;
    cfg.x_max = cfg.p_max = 24.0;
  }
  for (const char* k : {"nx", "np"}) {
    if (auto it = kv.find(k); it != kv.end()) {
      const long n = Parser(it->second.second).integer(it->second.first);
      if (n < 8 || !is_power_of_two(n))
        Parser(it->second.second).fail(std::string(k) + "=" + it->second.first + " is not a power of two >= 8");
      (std::string(k) == "nx" ? cfg.nx : cfg.np) = static_cast<int>(n);
    }
  }
  get_number("x_min", cfg.x_min);
  get_number("x_max", cfg.x_max);
  get_number("p_min", cfg.p_min);
  get_number("p_max", cfg.p_max);
  (void)cfg.grid();  // validates extents

  // Propagation.
  get_number("dt", cfg.dt);
  get_number("t_final", cfg.t_final);
  if (!(cfg.dt > 0)) Parser(line_of("dt")).fail("dt must be positive");
  if (!(cfg.t_final >= cfg.dt)) Parser(line_of("t_final")).fail("t_final must be at least dt");
  cfg.snapshot_times = {0.0, cfg.t_final};
  if (auto it = kv.find("snapshot_times"); it != kv.end()) {
    const Parser p(it->second.second);
    cfg.snapshot_times.clear();
    for (auto item : split_list(it->second.first)) cfg.snapshot_times.push_back(p.number(item));
    if (cfg.snapshot_times.empty()) p.fail("snapshot_times is empty");
    if (!std::is_sorted(cfg.snapshot_times.begin(), cfg.snapshot_times.end())) p.fail("snapshot_times must be sorted");
    if (cfg.snapshot_times.front() < 0 || cfg.snapshot_times.back() > cfg.t_final)
      p.fail("snapshot_times must lie in [0, t_final]");
  }
  if (auto it = kv.find("scheme"); it != kv.end()) {
    if (it->second.first == "exact") cfg.scheme = SplittingScheme::exact_shear;
    else if (it->second.first == "strang") cfg.scheme = SplittingScheme::strang;
    else Parser(it->second.second).fail("scheme must be 'exact' or 'strang'");
  }
  try {
    split_times(h, cfg.dt, cfg.scheme);
  } catch (const ConfigError& err) {
    Parser(line_of("dt")).fail(err.what());
  }

  // Output.
  if (auto it = kv.find("output_dir"); it != kv.end()) cfg.output_dir = it->second.first;
  if (auto it = kv.find("representations"); it != kv.end()) {
    cfg.representations.clear();
    for (auto item : split_list(it->second.first)) {
      try {
        cfg.representations.push_back(parse_representation(item));
      } catch (const ConfigError& err) {
        Parser(it->second.second).fail(err.what());
      }
    }
    if (cfg.representations.empty()) Parser(it->second.second).fail("representations is empty");
  }
  if (auto it = kv.find("components"); it != kv.end()) {
    cfg.components.clear();
    for (auto item : split_list(it->second.first)) {
      try {
        cfg.components.push_back(parse_component(item));
      } catch (const ConfigError& err) {
        Parser(it->second.second).fail(err.what());
      }
    }
    if (cfg.components.empty()) Parser(it->second.second).fail("components is empty");
  }
  if (auto it = kv.find("degenerate_pair"); it != kv.end())
    cfg.degenerate_pair = Parser(it->second.second).boolean(it->second.first);
  if (auto it = kv.find("contour_levels"); it != kv.end()) {
    const Parser p(it->second.second);
    for (auto item : split_list(it->second.first)) cfg.contour_levels.push_back(p.number(item));
  }
  if (auto it = kv.find("seed"); it != kv.end()) {
    const long s = Parser(it->second.second).integer(it->second.first);
    if (s < 0) Parser(it->second.second).fail("seed must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

std::string resolved_config_text(const RunConfig& cfg) {
  std::ostringstream os;
  os << "# resolved configuration\n";
  os << "nx=" << cfg.nx << "\nnp=" << cfg.np << '\n';
  os << "x_min=" << format_double(cfg.x_min) << "\nx_max=" << format_double(cfg.x_max) << '\n';
  os << "p_min=" << format_double(cfg.p_min) << "\np_max=" << format_double(cfg.p_max) << '\n';
  os << "potential=" << potential_name(cfg.potential) << '\n';
  os << "m=" << format_double(cfg.m) << '\n';
  if (cfg.potential == PotentialKind::general) {
    os << "a=" << format_double(cfg.a) << "\nb=" << format_double(cfg.b) << "\nc=" << format_double(cfg.c) << '\n';
  } else {
    os << "omega=" << format_double(cfg.omega) << '\n';
  }
  os << "hbar=" << format_double(cfg.hbar) << '\n';
  if (cfg.gaussian_initial()) {
    os << "center_x=" << format_double(cfg.center.x()) << "\ncenter_p=" << format_double(cfg.center.y()) << '\n';
  } else {
    os << "wavefunction=" << cfg.wavefunction.string() << '\n';
  }
  os << "dt=" << format_double(cfg.dt) << "\nt_final=" << format_double(cfg.t_final) << '\n';
  os << "snapshot_times=" << join(cfg.snapshot_times) << '\n';
  os << "scheme=" << (cfg.scheme == SplittingScheme::exact_shear ? "exact" : "strang") << '\n';
  os << "output_dir=" << cfg.output_dir.string() << '\n';
  os << "representations=";
  for (std::size_t i = 0; i < cfg.representations.size(); ++i)
    os << (i ? "," : "") << to_string(cfg.representations[i]);
  os << "\ncomponents=";
  for (std::size_t i = 0; i < cfg.components.size(); ++i) os << (i ? "," : "") << to_string(cfg.components[i]);
  os << "\ndegenerate_pair=" << (cfg.degenerate_pair ? "true" : "false") << '\n';
  if (!cfg.contour_levels.empty()) os << "contour_levels=" << join(cfg.contour_levels) << '\n';
  os << "seed=" << cfg.seed << '\n';
  return os.str();
}

Eigen::VectorXcd read_wavefunction(const std::filesystem::path& path, const PhaseGrid& grid) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open wavefunction file '" + path.string() + "'");
  Eigen::VectorXcd psi(grid.nx());
  std::string line;
  int line_no = 0;
  int count = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    double x = 0, re = 0, im = 0;
    if (!(ls >> x)) continue;
    if (!(ls >> re >> im))
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected 'x re im'");
    if (count >= grid.nx()) throw ConfigError(path.string() + ": more samples than nx");
    if (std::abs(x - grid.x(count)) > 1e-9 * std::max(1.0, std::abs(grid.x(count))))
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": x does not match the grid lattice");
    psi(count++) = Complex(re, im);
  }
  if (count != grid.nx()) throw ConfigError(path.string() + ": expected " + std::to_string(grid.nx()) + " samples");
  return psi;
}

}  // namespace phasespace
