#include "phasespace/snapshot_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "phasespace/errors.hpp"

namespace phasespace {

std::string_view to_string(Component c) {
  switch (c) {
    case Component::real: return "real";
    case Component::imag: return "imag";
    case Component::abs2: return "abs2";
  }
  return "?";
}

Component parse_component(std::string_view s) {
  if (s == "real") return Component::real;
  if (s == "imag") return Component::imag;
  if (s == "abs2") return Component::abs2;
  throw ConfigError("unknown component '" + std::string(s) + "' (expected real, imag or abs2)");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

PhaseGrid GridFile::grid() const {
  return make_grid(header.nx, header.np, {header.x_min, header.x_max}, {header.p_min, header.p_max});
}

Eigen::ArrayXXd component_values(const PhaseState& s, Component c) {
  switch (c) {
    case Component::real: return s.values.real();
    case Component::imag: return s.values.imag();
    case Component::abs2: return s.values.abs2();
  }
  return {};
}

std::string encode_grid_file(const PhaseState& s, Component c) {
  const PhaseGrid& g = s.grid;
  const bool lam = has_lambda_axis(s.representation);
  const bool th = has_theta_axis(s.representation);
  std::ostringstream os;
  os << kGridMagic;
  os << "representation=" << to_string(s.representation) << '\n'
     << "component=" << to_string(c) << '\n'
     << "nx=" << g.nx() << '\n'
     << "np=" << g.np() << '\n'
     << "x_min=" << format_double(g.x_min()) << '\n'
     << "x_max=" << format_double(g.x_max()) << '\n'
     << "p_min=" << format_double(g.p_min()) << '\n'
     << "p_max=" << format_double(g.p_max()) << '\n'
     << "time=" << format_double(s.time) << '\n'
     << "hbar=" << format_double(s.hbar) << '\n'
     << "endianness=little\n"
     << "layout=row-major float64, rows=np, cols=nx\n"
     << "col_axis=" << (lam ? "lambda" : "x") << '\n'
     << "col_start=" << format_double(lam ? g.lambda(0) : g.x(0)) << '\n'
     << "col_step=" << format_double(lam ? g.dlambda() : g.dx()) << '\n'
     << "row_axis=" << (th ? "theta" : "p") << '\n'
     << "row_start=" << format_double(th ? g.theta(0) : g.p(0)) << '\n'
     << "row_step=" << format_double(th ? g.dtheta() : g.dp()) << '\n'
     << "normalization=forward F(k)=h*sum f(s)exp(-iks), inverse f(s)=(dk/2pi)*sum F(k)exp(iks)\n"
     << '\n';

  const Eigen::ArrayXXd v = component_values(s, c);
  std::string out = os.str();
  const std::size_t header_size = out.size();
  out.resize(header_size + static_cast<std::size_t>(v.size()) * 8);
  std::size_t pos = header_size;
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      const auto bits = std::bit_cast<std::uint64_t>(v(i, j));
      for (int b = 0; b < 8; ++b) out[pos++] = static_cast<char>((bits >> (8 * b)) & 0xFF);
    }
  }
  return out;
}

namespace {

double parse_header_double(const std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw IoError("grid file header lacks '" + key + "'");
  double v = 0.0;
  const auto& s = it->second;
  if (s == "nan") return std::nan("");
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw IoError("bad value for '" + key + "': " + s);
  return v;
}

}  // namespace

GridFile decode_grid_file(std::string_view bytes) {
  if (bytes.substr(0, kGridMagic.size()) != kGridMagic) throw IoError("not a PSGRID1 file");
  std::size_t pos = kGridMagic.size();
  std::map<std::string, std::string> kv;
  while (true) {
    const std::size_t eol = bytes.find('\n', pos);
    if (eol == std::string_view::npos) throw IoError("unterminated grid file header");
    const std::string_view line = bytes.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty()) break;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw IoError("malformed header line: " + std::string(line));
    kv[std::string(line.substr(0, eq))] = std::string(line.substr(eq + 1));
  }
  if (kv["endianness"] != "little") throw IoError("unsupported endianness '" + kv["endianness"] + "'");

  GridFile f;
  try {
    f.header.representation = parse_representation(kv["representation"]);
    f.header.component = parse_component(kv["component"]);
  } catch (const ConfigError& e) {
    throw IoError(e.what());
  }
  f.header.nx = static_cast<int>(parse_header_double(kv, "nx"));
  f.header.np = static_cast<int>(parse_header_double(kv, "np"));
  f.header.x_min = parse_header_double(kv, "x_min");
  f.header.x_max = parse_header_double(kv, "x_max");
  f.header.p_min = parse_header_double(kv, "p_min");
  f.header.p_max = parse_header_double(kv, "p_max");
  f.header.time = parse_header_double(kv, "time");
  f.header.hbar = parse_header_double(kv, "hbar");
  if (f.header.nx <= 0 || f.header.np <= 0) throw IoError("grid file has non-positive dimensions");

  const std::size_t count = static_cast<std::size_t>(f.header.nx) * static_cast<std::size_t>(f.header.np);
  if (bytes.size() - pos != count * 8) throw IoError("grid file payload size does not match nx*np");
  f.values.resize(f.header.np, f.header.nx);
  for (int i = 0; i < f.header.np; ++i) {
    for (int j = 0; j < f.header.nx; ++j) {
      std::uint64_t bits = 0;
      for (int b = 0; b < 8; ++b) bits |= std::uint64_t(static_cast<unsigned char>(bytes[pos++])) << (8 * b);
      f.values(i, j) = std::bit_cast<double>(bits);
    }
  }
  return f;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_grid_file(const std::filesystem::path& path, const PhaseState& s, Component c) {
  write_text_file(path, encode_grid_file(s, c));
}

GridFile read_grid_file(const std::filesystem::path& path) { return decode_grid_file(read_text_file(path)); }

std::string diagnostics_csv_header() {
  return "time,norm,purity,mean_x,mean_p,energy,sigma_xx,sigma_xp,sigma_pp,min_value,max_value,"
         "quadrant_upper,quadrant_lower,quadrant_left,quadrant_right,T,R,leakage,mass_outside_margin,"
         "truncation_warning,uncertainty_ok";
}

std::string diagnostics_csv_row(const DiagnosticsRecord& d) {
  const double nan = std::nan("");
  const QuadrantWeights q = d.quadrants.value_or(QuadrantWeights{nan, nan, nan, nan});
  const double fields[] = {d.time,     d.norm,     d.purity,    d.mean_x,  d.mean_p,   d.energy,
                           d.sigma_xx, d.sigma_xp, d.sigma_pp,  d.min_value, d.max_value, q.upper,
                           q.lower,    q.left,     q.right,     d.T,       d.R,        d.leakage,
                           d.mass_outside_margin};
  std::string row;
  for (double v : fields) {
    row += format_double(v);
    row += ',';
  }
  row += d.truncation_warning ? "1" : "0";
  row += ',';
  row += d.uncertainty_ok ? "1" : "0";
  return row;
}

}  // namespace phasespace
