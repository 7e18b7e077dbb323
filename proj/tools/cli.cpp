#include "cli.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "output.hpp"
#include "qdist/bose_hubbard.hpp"
#include "qdist/chaos.hpp"
#include "qdist/metrics.hpp"
#include "qdist/ot.hpp"
#include "qdist/rotor.hpp"
#include "qdist/xxz.hpp"

namespace qdist::cli {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Globals {
  unsigned threads = 1;
  std::string out_dir;
  bool timing = false;
};

struct OtArgs {
  std::string p_file, q_file, metric = "line", metric_file, plan_file;
  double period = 0.0;
  int lambda = 1;
};

struct RotorEvolveArgs {
  double K = 0.3;
  int m = 30;
  double q1 = 4.7, p1 = 3.0;
  std::optional<double> q2, p2;
  int kicks = 50;
  int lambda = 1;
};

struct RotorScanArgs {
  double K = 4.7;
  int m = 20;
  int lambda = 1;
  bool log = false;
};

struct BHCommon {
  double c_over_c0 = 2.0;
  double E = 0.8;
  double n2 = 0.2475;
};

struct BHSectionArgs {
  BHCommon bh;
  std::vector<std::string> seeds{"0.22,0.8", "0.42,0.8"};
  double t_max = 1000.0;
  double dt = 1e-3;
};

struct BHChaosArgs {
  BHCommon bh;
  int L = 6;
  double grid_step = 0.0;
  double min_r2 = 0.95;
  int lambda = 1;
  bool log = false;
};

struct SpinArgs {
  SpinChainParams params;
  double edge = 0.1;
};

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

double parse_double(const std::string& s, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(trim(s), &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(where + ": not a number: '" + s + "'");
  }
  if (used != trim(s).size() || !std::isfinite(v)) throw std::invalid_argument(where + ": not a number: '" + s + "'");
  return v;
}

std::uint64_t parse_index(const std::string& s, const std::string& where) {
  const std::string t = trim(s);
  if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument(where + ": bad index '" + s + "'");
  return std::stoull(t);
}

std::vector<std::string> content_lines(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot read " + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(f, line)) {
    line = trim(line);
    if (!line.empty() && line[0] != '#') out.push_back(line);
  }
  return out;
}

// "index,weight" rows; a first row that does not start with a digit is a header.
std::map<std::uint64_t, double> read_weights(const std::string& path) {
  std::map<std::uint64_t, double> w;
  const auto lines = content_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i == 0 && !std::isdigit(static_cast<unsigned char>(lines[i][0]))) continue;
    const auto f = split(lines[i], ',');
    const std::string where = path + ":" + std::to_string(i + 1);
    if (f.size() != 2) throw std::invalid_argument(where + ": expected index,weight");
    const auto idx = parse_index(f[0], where);
    if (!w.emplace(idx, parse_double(f[1], where)).second) throw std::invalid_argument(where + ": duplicate index");
  }
  if (w.empty()) throw std::invalid_argument(path + ": no weights");
  return w;
}

Matrix read_matrix(const std::string& path) {
  const auto lines = content_lines(path);
  const auto n = static_cast<Eigen::Index>(lines.size());
  Matrix d(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto f = split(lines[r], ',');
    if (static_cast<Eigen::Index>(f.size()) != n) throw std::invalid_argument(path + ": distance matrix is not square");
    for (Eigen::Index c = 0; c < n; ++c) d(r, c) = parse_double(f[c], path);
  }
  return d;
}

fs::path output_path(const Globals& g, const std::string& name) {
  fs::path dir(g.out_dir.empty() ? "." : g.out_dir);
  fs::create_directories(dir);
  return dir / name;
}

RunHeader make_header(const std::string& command, const Globals& g, std::map<std::string, std::string> config,
                      Clock::time_point start) {
  RunHeader h;
  h.command = command;
  h.config = std::move(config);
  if (g.timing) h.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
  return h;
}

std::string num(double v) { return format_number(v); }

DistanceConfig distance_config(int lambda) {
  DistanceConfig cfg;
  cfg.order = lambda;
  return cfg;
}

int cmd_ot(const OtArgs& a, const Globals&, std::ostream& out) {
  const auto wp = read_weights(a.p_file), wq = read_weights(a.q_file);
  std::set<std::uint64_t> support_set;
  for (const auto& [k, v] : wp) support_set.insert(k);
  for (const auto& [k, v] : wq) support_set.insert(k);
  const std::vector<std::uint64_t> support(support_set.begin(), support_set.end());
  const auto n = static_cast<Eigen::Index>(support.size());

  Matrix d(n, n);
  Matrix file;
  if (a.metric == "file") {
    if (a.metric_file.empty()) throw std::invalid_argument("ot: --metric file needs --metric-file");
    file = read_matrix(a.metric_file);
    if (support.back() >= static_cast<std::uint64_t>(file.rows()))
      throw std::invalid_argument("ot: index outside the distance matrix");
  }
  if (a.metric == "torus" && !(a.period > 0.0)) throw std::invalid_argument("ot: --metric torus needs --period > 0");
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto x = support[i], y = support[j];
      const double diff = std::abs(static_cast<double>(x) - static_cast<double>(y));
      if (a.metric == "line") {
        d(i, j) = diff;
      } else if (a.metric == "torus") {
        const double r = std::fmod(diff, a.period);
        d(i, j) = std::min(r, a.period - r);
      } else if (a.metric == "hamming") {
        d(i, j) = std::popcount(x ^ y);
      } else {
        d(i, j) = file(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
      }
    }
  const MetricSpace space = MetricSpace::from_matrix(std::move(d));

  std::vector<double> p(support.size(), 0.0), q(support.size(), 0.0);
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (auto it = wp.find(support[i]); it != wp.end()) p[i] = it->second;
    if (auto it = wq.find(support[i]); it != wq.end()) q[i] = it->second;
  }
  const auto P = Distribution::from_weights(p), Q = Distribution::from_weights(q);
  const DistanceConfig cfg = distance_config(a.lambda);
  const TransportPlan plan = transport_plan(P, Q, space, cfg);
  out << format_number(std::pow(plan.cost, 1.0 / cfg.order)) << '\n';

  if (!a.plan_file.empty()) {
    std::vector<Row> rows;
    for (const auto& e : plan.entries)
      rows.push_back({std::to_string(support[e.source]), std::to_string(support[e.target]), num(e.mass)});
    RunHeader h;
    h.command = "ot";
    h.config = {{"p", a.p_file}, {"q", a.q_file}, {"metric", a.metric}, {"lambda", std::to_string(a.lambda)},
                {"cost", num(plan.cost)}};
    write_csv(a.plan_file, h, {"source", "target", "mass"}, rows);
  }
  return 0;
}

int cmd_rotor_evolve(const RotorEvolveArgs& a, const Globals& g, std::ostream& out) {
  const auto start = Clock::now();
  const RotorParams params{a.K, a.m};
  params.validate();
  const ClassicalPoint s1{a.q1, a.p1};
  ClassicalPoint s2 = neighbour_start(params, s1);
  if (a.q2) s2.q = *a.q2;
  if (a.p2) s2.p = *a.p2;
  const auto r = three_distance_experiment(params, s1, s2, a.kicks, distance_config(a.lambda));

  std::map<std::string, std::string> cfg{{"K", num(a.K)},         {"m", std::to_string(a.m)},
                                         {"hbar_eff", num(params.hbar())},
                                         {"start1", num(s1.q) + " " + num(s1.p)},
                                         {"start2", num(s2.q) + " " + num(s2.p)},
                                         {"kicks", std::to_string(a.kicks)}, {"lambda", std::to_string(a.lambda)}};
  DistanceSeries series;
  for (std::size_t k = 0; k < r.kick.size(); ++k) {
    series.times.push_back(r.kick[k]);
    series.values.push_back(r.physical[k]);
  }
  const double diameter = kPi * std::sqrt(2.0);
  try {
    const auto window = ehrenfest_window(series, diameter);
    const auto fit = lyapunov_exponent(series, window);
    cfg["gamma_q"] = num(fit.gamma);
    cfg["fit_window"] = num(window.t_start) + " " + num(window.t_end);
  } catch (const std::invalid_argument& e) {
    cfg["gamma_q"] = std::string("not-fitted (") + e.what() + ")";
  }
  std::vector<Row> rows;
  for (std::size_t k = 0; k < r.kick.size(); ++k)
    rows.push_back({std::to_string(r.kick[k]), num(r.classical[k]), num(r.physical[k]), num(r.expectation[k]),
                    num(r.overlap[k])});
  const auto path = output_path(g, "rotor_evolve.csv");
  write_csv(path.string(), make_header("rotor-evolve", g, cfg, start),
            {"kick", "classical", "physical", "expectation", "overlap"}, rows);
  out << "gamma_q: " << cfg["gamma_q"] << '\n' << "wrote " << path.string() << '\n';
  return 0;
}

int cmd_rotor_scan(const RotorScanArgs& a, const Globals& g, std::ostream& out) {
  const auto start = Clock::now();
  const RotorParams params{a.K, a.m};
  RotorScanOptions opt;
  opt.threads = g.threads;
  opt.cfg = distance_config(a.lambda);
  const auto scan = chaos_scan(params, opt);
  std::vector<Row> rows;
  for (std::size_t i = 0; i < scan.values.size(); ++i) {
    const auto c = rotor_cell_center(a.m, i);
    rows.push_back({std::to_string(i / a.m), std::to_string(i % a.m), num(c.x), num(c.p), num(*scan.values[i])});
  }
  auto cfg = scan.metadata;
  cfg["median"] = num(*scan.median());
  cfg["min"] = num(*scan.min());
  cfg["max"] = num(*scan.max());
  const auto header = make_header("rotor-scan", g, cfg, start);
  const auto csv = output_path(g, "rotor_scan.csv"), pgm = output_path(g, "rotor_scan.pgm");
  write_csv(csv.string(), header, {"ell", "theta", "x", "p", "upsilon"}, rows);
  write_pgm(pgm.string(), header, scan, a.log);
  out << "median upsilon: " << cfg["median"] << '\n' << "wrote " << csv.string() << ", " << pgm.string() << '\n';
  return 0;
}

BHParams bh_params(const BHCommon& b, int L) { return BHParams::for_resolution(L, 1.0, b.c_over_c0); }

SectionSpec section_spec(const BHCommon& b) {
  SectionSpec s;
  s.energy = b.E;
  s.n2_plane = b.n2;
  s.validate();
  return s;
}

int cmd_bh_section(const BHSectionArgs& a, const Globals& g, std::ostream& out) {
  const auto start = Clock::now();
  const BHParams params{1.0, a.bh.c_over_c0, 35};  // N does not enter the mean-field flow
  const SectionSpec spec = section_spec(a.bh);
  std::vector<std::array<double, 2>> seeds;
  for (const auto& s : a.seeds) {
    const auto f = split(s, ',');
    if (f.size() != 2) throw std::invalid_argument("bh-section: seed must be n1,theta1_over_pi");
    seeds.push_back({parse_double(f[0], "seed n1"), kPi * parse_double(f[1], "seed theta1")});
  }
  SectionOptions opt;
  opt.t_max = a.t_max;
  opt.dt = a.dt;
  opt.threads = g.threads;
  const auto orbits = poincare_section(spec, params, seeds, opt);

  std::map<std::string, std::string> cfg{{"c_over_c0", num(a.bh.c_over_c0)}, {"E", num(a.bh.E)},
                                         {"n2_plane", num(a.bh.n2)},        {"direction", "+1"},
                                         {"t_max", num(a.t_max)},           {"dt", num(a.dt)},
                                         {"theta_convention", "arg a3 = 0"}};
  std::vector<Row> rows;
  for (std::size_t i = 0; i < orbits.size(); ++i) {
    const std::string key = "seed" + std::to_string(i);
    const std::string label = num(orbits[i].seed_n1) + " " + num(orbits[i].seed_theta1 / kPi) + "pi";
    if (!orbits[i].reachable) {
      cfg[key] = label + " unreachable";
      out << "seed " << label << ": unreachable\n";
      continue;
    }
    const double disp = point_set_dispersion(orbits[i].points);
    cfg[key] = label + " points " + std::to_string(orbits[i].points.size()) + " dispersion " + num(disp);
    out << "seed " << label << ": " << orbits[i].points.size() << " crossings, dispersion " << num(disp) << '\n';
    for (const auto& p : orbits[i].points) rows.push_back({std::to_string(i), num(p.n1), num(p.theta1), num(p.time)});
  }
  const auto path = output_path(g, "bh_section.csv");
  write_csv(path.string(), make_header("bh-section", g, cfg, start), {"seed", "n1", "theta1", "time"}, rows);
  out << "wrote " << path.string() << '\n';
  return 0;
}

int cmd_bh_chaos(const BHChaosArgs& a, const Globals& g, std::ostream& out) {
  const auto start = Clock::now();
  const BoseHubbardModel model(bh_params(a.bh, a.L));
  BHChaosOptions opt;
  opt.grid_step = a.grid_step;
  opt.threads = g.threads;
  opt.cfg = distance_config(a.lambda);
  opt.shell.min_r2 = a.min_r2;
  const auto map = bh_chaos_map(model, section_spec(a.bh), opt);

  std::vector<Row> rows;
  for (std::size_t r = 0; r < map.scan.rows(); ++r)
    for (std::size_t c = 0; c < map.scan.cols(); ++c) {
      const auto& v = map.scan.at(r, c);
      rows.push_back({num(map.scan.x[c]), num(map.scan.y[r]), v ? num(*v) : std::string("NA")});
    }
  auto cfg = map.scan.metadata;
  cfg["missing"] = std::to_string(map.scan.missing());
  const auto header = make_header("bh-chaos", g, cfg, start);
  const auto csv = output_path(g, "bh_chaos.csv"), pgm = output_path(g, "bh_chaos.pgm"),
             env = output_path(g, "bh_envelope.csv");
  write_csv(csv.string(), header, {"n1", "theta1", "upsilon"}, rows);
  write_pgm(pgm.string(), header, map.scan, a.log);
  std::vector<Row> env_rows;
  const auto& sh = map.shell;
  for (std::size_t k = 0; k < sh.energies.size(); ++k) {
    const double fit = sh.amplitude * std::exp(-std::pow(sh.energies[k] - sh.mu, 2) / (2 * sh.sigma * sh.sigma));
    env_rows.push_back({std::to_string(k), num(sh.energies[k]), num(sh.envelope[k]), num(fit)});
  }
  write_csv(env.string(), header, {"level", "energy", "envelope", "gaussian"}, env_rows);
  out << "shell: mu " << num(sh.mu) << " sigma " << num(sh.sigma) << " R2 " << num(sh.r2) << " captured "
      << num(sh.captured_fraction) << '\n'
      << "wrote " << csv.string() << ", " << pgm.string() << ", " << env.string() << '\n';
  return 0;
}

int cmd_spin(const SpinArgs& a, const Globals& g, std::ostream& out) {
  const auto start = Clock::now();
  a.params.validate();
  auto eig = std::make_shared<const Eigensystem>(diagonalize(build_xxz_hamiltonian(a.params)));
  const auto stats = level_spacing_statistics(*eig, a.edge);
  const auto chaos = spin_chaos_measure(a.params, eig, g.threads);

  double mean = 0.0;
  for (double u : chaos.upsilon) mean += u;
  mean /= static_cast<double>(chaos.upsilon.size());
  const auto& p = a.params;
  const std::map<std::string, std::string> cfg{
      {"n_sites", std::to_string(p.n_sites)}, {"n_up", std::to_string(p.n_up)},
      {"J1", num(p.J1)},                      {"J2", num(p.J2)},
      {"eps", num(p.eps)},                    {"defect_site", std::to_string(p.defect_site)},
      {"edge_fraction", num(a.edge)},         {"levels_used", std::to_string(stats.levels_used)},
      {"ks_poisson", num(stats.ks_poisson)},  {"ks_wigner", num(stats.ks_wigner)},
      {"mean_upsilon", num(mean)},            {"metric", "occupied positions"},
      {"reference", "uniform"}};
  const auto header = make_header("spin", g, cfg, start);

  std::vector<Row> ev, sp, up;
  for (Eigen::Index k = 0; k < eig->values.size(); ++k) ev.push_back({std::to_string(k), num(eig->values(k))});
  for (std::size_t k = 0; k < stats.bin_centers.size(); ++k)
    sp.push_back({num(stats.bin_centers[k]), num(stats.density[k]), num(stats.poisson[k]), num(stats.wigner[k])});
  for (std::size_t k = 0; k < chaos.states.size(); ++k)
    up.push_back({std::to_string(chaos.states[k]), std::to_string(std::countr_zero(chaos.states[k])),
                  num(chaos.upsilon[k])});
  const auto f1 = output_path(g, "spin_eigenvalues.csv"), f2 = output_path(g, "spin_spacing.csv"),
             f3 = output_path(g, "spin_upsilon.csv");
  write_csv(f1.string(), header, {"index", "energy"}, ev);
  write_csv(f2.string(), header, {"s", "density", "poisson", "wigner"}, sp);
  write_csv(f3.string(), header, {"state", "first_up", "upsilon"}, up);
  out << "KS poisson " << num(stats.ks_poisson) << " wigner " << num(stats.ks_wigner) << ", mean upsilon "
      << num(mean) << '\n'
      << "wrote " << f1.string() << ", " << f2.string() << ", " << f3.string() << '\n';
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Physical (Wasserstein) distances between quantum states and chaos diagnostics", "qdist");
  app.set_config("--config", "", "key=value file; options of a subcommand go under [subcommand]");
  app.set_version_flag("--version", QDIST_VERSION);
  app.require_subcommand(1);

  Globals g;
  if (const char* env = std::getenv("QDIST_OUTPUT_DIR")) g.out_dir = env;
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::Range(1u, 256u));
  app.add_option("--out-dir", g.out_dir, "output directory (default $QDIST_OUTPUT_DIR or .)");
  app.add_flag("--timing", g.timing, "record wall time in output headers");

  const std::vector<int> lambdas{1, 2};

  OtArgs ot;
  auto* s_ot = app.add_subcommand("ot", "distance between two weight files");
  s_ot->add_option("--p", ot.p_file, "CSV of index,weight")->required()->check(CLI::ExistingFile);
  s_ot->add_option("--q", ot.q_file, "CSV of index,weight")->required()->check(CLI::ExistingFile);
  s_ot->add_option("--metric", ot.metric, "line | torus | hamming | file")
      ->check(CLI::IsMember({"line", "torus", "hamming", "file"}));
  s_ot->add_option("--period", ot.period, "circumference for --metric torus");
  s_ot->add_option("--metric-file", ot.metric_file, "square CSV distance matrix")->check(CLI::ExistingFile);
  s_ot->add_option("--lambda", ot.lambda, "Wasserstein order")->check(CLI::IsMember(lambdas));
  s_ot->add_option("--plan", ot.plan_file, "write the optimal plan to this CSV");

  RotorEvolveArgs re;
  auto* s_re = app.add_subcommand("rotor-evolve", "three distances for a kicked-rotor packet pair");
  s_re->add_option("--K", re.K, "kick strength");
  s_re->add_option("--m", re.m, "resolution (m^2 states)");
  s_re->add_option("--q1", re.q1);
  s_re->add_option("--p1", re.p1);
  s_re->add_option("--q2", re.q2, "default q1 + 2 pi / m");
  s_re->add_option("--p2", re.p2, "default p1 + 2 pi / m");
  s_re->add_option("--kicks", re.kicks);
  s_re->add_option("--lambda", re.lambda)->check(CLI::IsMember(lambdas));

  RotorScanArgs rs;
  auto* s_rs = app.add_subcommand("rotor-scan", "chaos measure over all kicked-rotor cells");
  s_rs->add_option("--K", rs.K, "kick strength");
  s_rs->add_option("--m", rs.m, "resolution (m^2 states)");
  s_rs->add_option("--lambda", rs.lambda)->check(CLI::IsMember(lambdas));
  s_rs->add_flag("--log", rs.log, "log10 grayscale");

  auto add_bh = [](CLI::App* s, BHCommon& b) {
    s->add_option("--c-over-c0", b.c_over_c0, "interaction c / c0");
    s->add_option("--E", b.E, "section energy in units of c0");
    s->add_option("--n2", b.n2, "section plane n2");
  };
  BHSectionArgs bs;
  auto* s_bs = app.add_subcommand("bh-section", "mean-field Poincare section");
  add_bh(s_bs, bs.bh);
  s_bs->add_option("--seed", bs.seeds, "n1,theta1/pi (repeatable)");
  s_bs->add_option("--t-max", bs.t_max, "integration time per seed");
  s_bs->add_option("--dt", bs.dt, "RK4 step");

  BHChaosArgs bc;
  auto* s_bc = app.add_subcommand("bh-chaos", "chaos measure over the Bose-Hubbard section plane");
  add_bh(s_bc, bc.bh);
  s_bc->add_option("--L", bc.L, "resolution, N = L^2 - 1");
  s_bc->add_option("--grid-step", bc.grid_step, "sampling step (default 1 / (3 L))");
  s_bc->add_option("--min-r2", bc.min_r2, "reject the shell fit below this R^2");
  s_bc->add_option("--lambda", bc.lambda)->check(CLI::IsMember(lambdas));
  s_bc->add_flag("--log", bc.log, "log10 grayscale");

  SpinArgs sa;
  auto* s_sp = app.add_subcommand("spin", "XXZ chain level statistics and chaos measure");
  s_sp->add_option("--n-sites", sa.params.n_sites);
  s_sp->add_option("--n-up", sa.params.n_up);
  s_sp->add_option("--J1", sa.params.J1);
  s_sp->add_option("--J2", sa.params.J2);
  s_sp->add_option("--eps", sa.params.eps, "defect field");
  s_sp->add_option("--defect", sa.params.defect_site, "defect site (0-based)");
  s_sp->add_option("--edge", sa.edge, "fraction of levels dropped at each spectrum edge");

  std::vector<char*> argv;
  std::vector<std::string> copy = args;
  if (copy.empty()) copy.push_back("qdist");
  for (auto& s : copy) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (s_ot->parsed()) return cmd_ot(ot, g, out);
    if (s_re->parsed()) return cmd_rotor_evolve(re, g, out);
    if (s_rs->parsed()) return cmd_rotor_scan(rs, g, out);
    if (s_bs->parsed()) return cmd_bh_section(bs, g, out);
    if (s_bc->parsed()) return cmd_bh_chaos(bc, g, out);
    if (s_sp->parsed()) return cmd_spin(sa, g, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ResourceError& e) {
    err << "resource limit: " << e.what() << '\n';
    return 3;
  } catch (const ConvergenceError& e) {
    err << "no convergence: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace qdist::cli
