#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "phasespace/config.hpp"
#include "phasespace/errors.hpp"
#include "phasespace/representations.hpp"
#include "phasespace/runner.hpp"
#include "phasespace/snapshot_io.hpp"

using namespace phasespace;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

const auto io = QuadraticHamiltonian::inverted(1.0, 1.0);

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "phasespace_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string error_of(std::string_view text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

int cli(const std::string& args) {
  const std::string cmd = std::string(PHASESPACE_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

constexpr const char* kSmall =
    "energy_label=-0.5\nnx=128\nnp=128\nt_final=0.3\nsnapshot_times=0,0.15\n"
    "representations=W,A,B\ncomponents=real,imag,abs2\ndegenerate_pair=true\n";

}  // namespace

TEST_CASE("grid files round-trip bit for bit") {
  const PhaseGrid g = make_grid(64, 32, {-8, 8}, {-6, 6});
  PhaseState a = to_representation(gaussian_wigner(g, io, {1.0, 0.5}, 1.0), Representation::A);
  a.time = 0.75;
  for (Component c : {Component::real, Component::imag, Component::abs2}) {
    const std::string bytes = encode_grid_file(a, c);
    CHECK(bytes.substr(0, kGridMagic.size()) == kGridMagic);
    const GridFile f = decode_grid_file(bytes);
    CHECK(f.header.representation == Representation::A);
    CHECK(f.header.component == c);
    CHECK(f.header.nx == 64);
    CHECK(f.header.np == 32);
    CHECK(f.header.p_min == -6.0);
    CHECK(f.header.time == 0.75);
    CHECK(f.grid() == g);
    const Eigen::ArrayXXd expected = component_values(a, c);
    CHECK(std::memcmp(f.values.data(), expected.data(), sizeof(double) * expected.size()) == 0);
  }
  CHECK((component_values(a, Component::abs2) - a.values.abs2()).abs().maxCoeff() == 0.0);

  const fs::path dir = scratch("gridfile");
  write_grid_file(dir / "a.psgrid", a, Component::imag);
  const GridFile back = read_grid_file(dir / "a.psgrid");
  CHECK((back.values - a.values.imag()).abs().maxCoeff() == 0.0);
  CHECK(read_text_file(dir / "a.psgrid") == encode_grid_file(a, Component::imag));
}

TEST_CASE("grid file header is textual and little-endian") {
  const PhaseGrid g = make_grid(8, 8, {-1, 1}, {-1, 1});
  const PhaseState w = gaussian_wigner(g, QuadraticHamiltonian::harmonic(1, 1), {0, 0}, 0.01);
  const std::string bytes = encode_grid_file(w, Component::real);
  const auto end = bytes.find("\n\n");
  REQUIRE(end != std::string::npos);
  const std::string header = bytes.substr(0, end);
  CHECK(header.find("representation=W") != std::string::npos);
  CHECK(header.find("endianness=little") != std::string::npos);
  CHECK(header.find("hbar=0.01") != std::string::npos);
  CHECK(bytes.size() == end + 2 + 64 * sizeof(double));
  double first = 0.0;
  std::memcpy(&first, bytes.data() + end + 2, sizeof first);
  CHECK(first == w.values(0, 0).real());
}

TEST_CASE("corrupt grid files are rejected") {
  const PhaseGrid g = make_grid(8, 8, {-4, 4}, {-4, 4});
  const std::string good = encode_grid_file(gaussian_wigner(g, io, {0, 0}, 1.0), Component::real);
  CHECK_THROWS_AS(decode_grid_file("PSGRID2\n" + good.substr(8)), IoError);
  CHECK_THROWS_AS(decode_grid_file(good.substr(0, good.size() - 3)), IoError);
  CHECK_THROWS_AS(decode_grid_file(good + "xx"), IoError);
  std::string bad_nx = good;
  bad_nx.replace(bad_nx.find("nx=8"), 4, "nx=9");
  CHECK_THROWS_AS(decode_grid_file(bad_nx), IoError);
  CHECK_THROWS_AS(read_grid_file("/nonexistent/dir/file.psgrid"), IoError);
}

TEST_CASE("diagnostics csv columns") {
  const PhaseGrid g = make_grid(128, 128, {-16, 16}, {-16, 16});
  const PhaseState w = gaussian_wigner(g, io, {1.0, 0.0}, 1.0);
  const std::string header = diagnostics_csv_header();
  const std::string row = diagnostics_csv_row(diagnose(w, io));
  auto columns = [](const std::string& s) { return std::count(s.begin(), s.end(), ',') + 1; };
  CHECK(columns(header) == 21);
  CHECK(columns(row) == 21);
  CHECK(header.substr(0, 16) == "time,norm,purity");
  const std::string ho_row = diagnostics_csv_row(diagnose(w, QuadraticHamiltonian::harmonic(1, 1)));
  CHECK(ho_row.find("nan") != std::string::npos);
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(std::numbers::pi)) == std::numbers::pi);
}

TEST_CASE("config defaults and energy labels") {
  const RunConfig near = parse_config("energy_label=-0.5\n");
  CHECK(near.hbar == 1.0);
  CHECK(near.m == 1.0);
  CHECK(near.omega == 1.0);
  CHECK(near.center == Eigen::Vector2d(1.0, 0.0));
  CHECK(near.t_final == 1.5);
  CHECK(near.dt == 0.01);
  CHECK(near.snapshot_times == std::vector<double>{0.0, 1.5});
  CHECK(near.nx == 512);
  CHECK(near.x_max == 16.0);
  CHECK(near.hamiltonian().c == -0.5);

  const RunConfig deep = parse_config("# deep state\nenergy_label = -8\n");
  CHECK(deep.center == Eigen::Vector2d(4.0, 0.0));
  CHECK(deep.nx == 1024);
  CHECK(deep.p_min == -24.0);

  const RunConfig above = parse_config("energy_label=2\nnx=256\nnp=256\n");
  CHECK(above.center.x() == 0.0);
  CHECK(above.center.y() == Approx(2.0));
  CHECK(above.nx == 256);

  const RunConfig custom = parse_config(
      "potential=general\na=0\nb=1\nc=-0.5\nm=2\nhbar=0.5\ncenter_x=3\ncenter_p=0.25\nscheme=strang\n"
      "snapshot_times=0.5, 1.0\nt_final=1.0\ncontour_levels=-1,0,1\nseed=9\n");
  CHECK(custom.potential == PotentialKind::general);
  CHECK(custom.hamiltonian().b == 1.0);
  CHECK(custom.scheme == SplittingScheme::strang);
  CHECK(custom.snapshot_times == std::vector<double>{0.5, 1.0});
  CHECK(custom.contour_levels.size() == 3);
  CHECK(custom.seed == 9);
}

TEST_CASE("config errors carry line numbers") {
  CHECK(error_of("").find("no initial state") != std::string::npos);
  CHECK(error_of("# only a comment\n").find("no initial state") != std::string::npos);
  const std::string nx = error_of("energy_label=-0.5\nnx=500\n");
  CHECK(nx.find("line 2") != std::string::npos);
  CHECK(nx.find("not a power of two") != std::string::npos);
  CHECK(error_of("energy_label=-0.5\n\nfoo=1\n").find("line 3: unknown key 'foo'") != std::string::npos);
  CHECK(error_of("energy_label=-0.5\nenergy_label=-8\n").find("line 2: duplicate") != std::string::npos);
  CHECK(error_of("energy_label=abc\n").find("line 1") != std::string::npos);
  CHECK(error_of("energy_label=-0.5\nsnapshot_times=1,0.5\n").find("sorted") != std::string::npos);
  CHECK(error_of("energy_label=-0.5\nsnapshot_times=2\n").find("[0, t_final]") != std::string::npos);
  CHECK(error_of("energy_label=-0.5\ncenter_x=1\n").find("more than once") != std::string::npos);
  CHECK(error_of("energy_label=-0.5\nrepresentations=W,Q\n").find("line 2") != std::string::npos);
  CHECK(error_of("energy_label=-0.5\nx_min=3\nx_max=-3\n") != "");
  CHECK(error_of("center_x=1\npotential=harmonic\ndt=4\nt_final=10\n").find("line 3") != std::string::npos);
  CHECK(error_of("center_x=1\nb=2\n").find("potential=general") != std::string::npos);
  CHECK(error_of("energy_label=-0.5\nscheme=rk4\n").find("line 2") != std::string::npos);
  CHECK(error_of("no equals sign\n").find("line 1: expected key=value") != std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/run.cfg"), IoError);
}

TEST_CASE("resolved config parses back to the same run") {
  const RunConfig cfg = parse_config(kSmall);
  const RunConfig again = parse_config(resolved_config_text(cfg));
  CHECK(again.center == cfg.center);
  CHECK(again.nx == cfg.nx);
  CHECK(again.snapshot_times == cfg.snapshot_times);
  CHECK(again.representations == cfg.representations);
  CHECK(again.components == cfg.components);
  CHECK(again.degenerate_pair);
  CHECK(resolved_config_text(again) == resolved_config_text(cfg));
}

TEST_CASE("wavefunction initial state") {
  const fs::path dir = scratch("wavefunction");
  const PhaseGrid g = make_grid(128, 128, {-12, 12}, {-12, 12});
  {
    std::ofstream out(dir / "psi.txt");
    out << "# x re im\n";
    for (int j = 0; j < g.nx(); ++j) {
      const double x = g.x(j);
      const double a = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * (x - 1.0) * (x - 1.0));
      out << format_double(x) << ' ' << format_double(a * std::cos(0.5 * x)) << ' '
          << format_double(a * std::sin(0.5 * x)) << '\n';
    }
  }
  write_text_file(dir / "run.cfg", "wavefunction=psi.txt\nnx=128\nnp=128\nx_min=-12\nx_max=12\np_min=-12\np_max=12\n");
  const RunConfig cfg = load_config(dir / "run.cfg");
  CHECK(cfg.wavefunction == dir / "psi.txt");
  const PhaseState w = initial_state(cfg);
  const GaussianWigner exact = coherent_gaussian(io, {1.0, 0.5}, 1.0);
  CHECK(std::abs(w.values(64, 72).real() - exact(g.x(72), g.p(64))) < 1e-12);

  write_text_file(dir / "bad.txt", "0 1\n");
  CHECK_THROWS_AS(read_wavefunction(dir / "bad.txt", g), ConfigError);
  CHECK_THROWS_AS(read_wavefunction(dir / "missing.txt", g), IoError);
}

TEST_CASE("conic level sets") {
  const Eigen::Vector2d box(-5, 5);
  for (double e : {-2.0, 0.0, 1.5}) {
    const auto lines = conic_level_set(1.0, -0.5, e, box, box);
    CHECK(lines.size() == 2);
    for (const auto& line : lines)
      for (const auto& pt : line) CHECK(pt.y() * pt.y() / 2.0 - 0.5 * pt.x() * pt.x() == Approx(e));
  }
  const auto ellipse = conic_level_set(1.0, 0.5, 2.0, box, box);
  REQUIRE(ellipse.size() == 1);
  CHECK((ellipse[0].front() - ellipse[0].back()).norm() < 1e-12);
  CHECK(conic_level_set(1.0, 0.5, -1.0, box, box).empty());
  // Partly outside the box: only the inner arcs survive.
  for (const auto& line : conic_level_set(1.0, 0.5, 18.0, box, box))
    for (const auto& pt : line) CHECK(pt.cwiseAbs().maxCoeff() <= 5.0);
}

TEST_CASE("run writes reproducible artifacts") {
  const fs::path dir = scratch("run");
  const RunConfig cfg = parse_config(kSmall);
  const RunResult r1 = run(cfg, dir / "a");
  const RunResult r2 = run(cfg, dir / "b");
  REQUIRE(r1.snapshots.size() == 3);
  CHECK(r1.files.size() == r2.files.size());
  for (const char* name : {"diagnostics.csv", "contours_direct.txt", "contours_reciprocal.txt", "degenerate_pair.csv",
                           "snap000_W_real.psgrid", "snap002_A_abs2.psgrid", "snap001_B_imag.psgrid",
                           "snap002_dots_direct.txt", "snap002_dots_reciprocal.txt", "resolved_config.txt"}) {
    REQUIRE(fs::exists(dir / "a" / name));
    if (std::string(name) != "resolved_config.txt")
      CHECK(read_text_file(dir / "a" / name) == read_text_file(dir / "b" / name));
  }
  CHECK_FALSE(fs::exists(dir / "a" / "snap000_W_imag.psgrid"));

  // Grid files hold exactly the in-memory snapshot.
  const GridFile f = read_grid_file(dir / "a" / "snap002_W_real.psgrid");
  CHECK((f.values - r1.snapshots[2].state.values.real()).abs().maxCoeff() == 0.0);
  CHECK(f.header.time == 0.3);

  std::istringstream csv(read_text_file(dir / "a" / "diagnostics.csv"));
  std::string line;
  int lines = 0;
  while (std::getline(csv, line)) ++lines;
  CHECK(lines == 4);

  std::istringstream pair(read_text_file(dir / "a" / "degenerate_pair.csv"));
  std::getline(pair, line);
  while (std::getline(pair, line)) CHECK(std::stod(line.substr(line.find(',') + 1)) < 1e-10);

  // Dots keep the energy of their seeds.
  std::istringstream d0(read_text_file(dir / "a" / "snap000_dots_direct.txt"));
  std::istringstream d2(read_text_file(dir / "a" / "snap002_dots_direct.txt"));
  std::getline(d0, line);
  std::getline(d2, line);
  double x0, p0, e0, x2, p2, e2;
  int seeds = 0;
  while (d0 >> x0 >> p0 >> e0 && d2 >> x2 >> p2 >> e2) {
    CHECK(e2 == Approx(e0).epsilon(1e-12));
    ++seeds;
  }
  CHECK(seeds == 33);
  CHECK(read_text_file(dir / "a" / "contours_direct.txt").find("# level=-0.5") != std::string::npos);
}

TEST_CASE("verify passes on a small run") {
  for (const auto& c : verify(parse_config(kSmall))) {
    INFO(c.name << " " << c.detail);
    CHECK(c.passed);
  }
}

TEST_CASE("command line exit codes") {
  const fs::path dir = scratch("cli");
  write_text_file(dir / "ok.cfg", kSmall);
  write_text_file(dir / "bad.cfg", "energy_label=-0.5\nnx=500\n");
  write_text_file(dir / "long.cfg", "energy_label=-0.5\nnx=128\nnp=128\nt_final=5\n");
  CHECK(cli("run " + (dir / "ok.cfg").string() + " --out " + (dir / "out").string()) == 0);
  CHECK(fs::exists(dir / "out" / "diagnostics.csv"));
  CHECK(cli("run " + (dir / "bad.cfg").string() + " --out " + (dir / "bad").string()) == 2);
  CHECK(cli("run " + (dir / "missing.cfg").string()) == 4);
  CHECK(cli("run " + (dir / "long.cfg").string() + " --out " + (dir / "long").string()) == 3);
  CHECK(cli("run " + (dir / "ok.cfg").string() + " --out /proc/forbidden") == 4);
  CHECK(cli("verify " + (dir / "ok.cfg").string() + " --seed 3") == 0);
  CHECK(cli("frobnicate") == 2);

  const fs::path batch_dir = scratch("batch");
  write_text_file(batch_dir / "one.cfg", kSmall);
  write_text_file(batch_dir / "two.cfg", std::string(kSmall) + "hbar=1\n");
  CHECK(cli("batch " + batch_dir.string() + " --out " + (batch_dir / "out").string()) == 0);
  CHECK(fs::exists(batch_dir / "out" / "one" / "diagnostics.csv"));
  CHECK(fs::exists(batch_dir / "out" / "two" / "diagnostics.csv"));
  write_text_file(batch_dir / "three.cfg", "nx=500\n");
  const auto entries = batch(batch_dir, batch_dir / "out2");
  REQUIRE(entries.size() == 3);
  CHECK(entries[0].config.filename() == "one.cfg");
  CHECK(entries[1].exit_code == 2);
}
