// Command-line front end: writes CSV tables plus a JSON metadata sidecar per run.
// Exit codes: 0 success, 1 numeric failure, 2 usage error.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "clevo/clevo.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitNumeric = 1;
constexpr int kExitUsage = 2;

struct Failure {
  int exit_code;
  std::string message;
};

void check(clevo_status s) {
  if (s == CLEVO_OK) return;
  const bool usage = s == CLEVO_ERR_INVALID_ARGUMENT || s == CLEVO_ERR_DOMAIN || s == CLEVO_ERR_SIZE_GUARD;
  throw Failure{usage ? kExitUsage : kExitNumeric, std::string(clevo_status_name(s)) + ": " + clevo_last_error()};
}

[[noreturn]] void usage_error(const std::string& msg) { throw Failure{kExitUsage, msg}; }

// RAII holders for library handles.
struct TableHandle {
  clevo_table* p = nullptr;
  ~TableHandle() { clevo_table_destroy(p); }
};
struct GridHandle {
  clevo_grid* p = nullptr;
  ~GridHandle() { clevo_grid_destroy(p); }
};

double table_value(const clevo_table* t, size_t row, size_t col) {
  double v = 0.0;
  check(clevo_table_get(t, row, col, &v));
  return v;
}

size_t column_index(const clevo_table* t, const std::string& name) {
  for (size_t c = 0; c < clevo_table_columns(t); ++c)
    if (name == clevo_table_column_name(t, c)) return c;
  throw Failure{kExitNumeric, "missing column " + name};
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{kExitNumeric, "cannot write " + path.string()};
  out << j.dump(2) << '\n';
  if (!out) throw Failure{kExitNumeric, "cannot write " + path.string()};
}

json base_metadata(const std::string& subcommand) {
  json j;
  j["artifact"] = "clevo";
  j["version"] = clevo_version();
  j["subcommand"] = subcommand;
  return j;
}

// "2,3,...,10" style lists; "..." continues the step of the two preceding entries.
std::vector<size_t> parse_k_list(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (!item.empty()) parts.push_back(item);
  }
  std::vector<size_t> out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (parts[i] == "...") {
      if (out.empty() || i + 1 >= parts.size()) usage_error("'...' needs entries on both sides in --K");
      const long step = out.size() >= 2 ? long(out.back()) - long(out[out.size() - 2]) : 1;
      if (step <= 0) usage_error("'...' needs an increasing sequence in --K");
      size_t end = 0;
      try {
        end = std::stoull(parts[i + 1]);
      } catch (const std::exception&) {
        usage_error("bad --K entry '" + parts[i + 1] + "'");
      }
      for (size_t k = out.back() + size_t(step); k < end; k += size_t(step)) out.push_back(k);
      continue;
    }
    size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(parts[i], &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != parts[i].size() || v == 0) usage_error("bad --K entry '" + parts[i] + "'");
    out.push_back(size_t(v));
  }
  if (out.empty()) usage_error("--K is empty");
  return out;
}

std::vector<double> linspace(double lo, double hi, size_t n) {
  std::vector<double> v(n);
  for (size_t i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * double(i) / double(n - 1);
  return v;
}

// ---- kerr ------------------------------------------------------------------

struct KerrArgs {
  std::string mode;
  double alpha0 = 3.0;
  double omega = 1.0;
  double kappa = 0.1;
  double t_over_kappa = std::numbers::pi;
  clevo_grid_geometry grid{};
  size_t cutoff = 60;
  size_t samples = 256;
  bool lab_frame = false;
};

int run_kerr(const KerrArgs& a, const fs::path& out_dir) {
  static const std::vector<std::string> modes{"cc", "qc", "cq", "qq"};
  const auto it = std::find(modes.begin(), modes.end(), a.mode);
  if (it == modes.end()) usage_error("--mode must be one of cc, qc, cq, qq");
  if (!(a.kappa > 0)) usage_error("--kappa must be positive");
  clevo_kerr_config cfg;
  clevo_kerr_config_default(&cfg);
  cfg.alpha0_re = a.alpha0;
  cfg.alpha0_im = 0.0;
  cfg.omega = a.omega;
  cfg.kappa = a.kappa;
  cfg.time = a.t_over_kappa / a.kappa;
  cfg.cutoff = a.cutoff;
  cfg.trajectory_samples = a.samples;
  cfg.co_rotating = a.lab_frame ? 0 : 1;

  GridHandle grid;
  TableHandle traj;
  check(clevo_kerr_render(&cfg, clevo_kerr_mode(it - modes.begin()), &a.grid, &grid.p, &traj.p));
  const fs::path wig = out_dir / ("wigner_" + a.mode + ".csv");
  const fs::path trj = out_dir / ("traj_" + a.mode + ".csv");
  check(clevo_grid_write_csv(grid.p, wig.c_str()));
  check(clevo_table_write_csv(traj.p, trj.c_str()));

  json j = base_metadata("kerr");
  j["parameters"] = {{"mode", a.mode},
                     {"alpha0", a.alpha0},
                     {"omega", a.omega},
                     {"kappa", a.kappa},
                     {"t_over_kappa", a.t_over_kappa},
                     {"time", cfg.time},
                     {"cutoff", a.cutoff},
                     {"trajectory_samples", a.samples},
                     {"frame", a.lab_frame ? "lab" : "co-rotating"},
                     {"grid",
                      {{"convention", "x = Re alpha, p = Im alpha"},
                       {"x_min", a.grid.x_min},
                       {"x_max", a.grid.x_max},
                       {"p_min", a.grid.p_min},
                       {"p_max", a.grid.p_max},
                       {"nx", a.grid.nx},
                       {"np", a.grid.np}}}};
  j["summary"] = {{"w_min", clevo_grid_min(grid.p)},
                  {"w_max", clevo_grid_max(grid.p)},
                  {"integral", clevo_grid_integral(grid.p)}};
  json warnings = json::array();
  for (size_t i = 0; i < clevo_grid_warning_count(grid.p); ++i) warnings.push_back(clevo_grid_warning(grid.p, i));
  j["warnings"] = warnings;
  j["outputs"] = {wig.filename().string(), trj.filename().string()};
  write_json(out_dir / ("kerr_" + a.mode + ".json"), j);
  std::cout << "kerr " << a.mode << ": min " << clevo_grid_min(grid.p) << ", integral " << clevo_grid_integral(grid.p)
            << '\n';
  return 0;
}

// ---- jc ----------------------------------------------------------------------

struct JcArgs {
  std::string solver = "numeric";
  double omega = 10.0;
  double kappa = 1.0;
  double kt_max = 10.0;
  double kt_step = 0.01;
  std::vector<double> t;  // explicit sample times, overriding the grid
  bool compare = false;
};

// kappa t in [0, kt_max] with the given step, plus every multiple of pi/4.
std::vector<double> jc_times(const JcArgs& a) {
  if (!a.t.empty()) {
    std::vector<double> ts = a.t;
    std::sort(ts.begin(), ts.end());
    if (std::adjacent_find(ts.begin(), ts.end()) != ts.end()) usage_error("--t values must be distinct");
    return ts;
  }
  if (!(a.kt_max >= 0) || !(a.kt_step > 0)) usage_error("--kt-max must be >= 0 and --kt-step > 0");
  std::vector<double> kts;
  const auto n = static_cast<size_t>(std::floor(a.kt_max / a.kt_step + 1e-9));
  for (size_t i = 0; i <= n; ++i) kts.push_back(a.kt_step * double(i));
  for (size_t m = 1; std::numbers::pi / 4 * double(m) <= a.kt_max; ++m) kts.push_back(std::numbers::pi / 4 * double(m));
  std::sort(kts.begin(), kts.end());
  std::vector<double> ts;
  for (double kt : kts)
    if (ts.empty() || kt / a.kappa - ts.back() > 1e-12 * std::max(1.0, kt / a.kappa)) ts.push_back(kt / a.kappa);
  return ts;
}

int run_jc(const JcArgs& a, const fs::path& out_dir) {
  clevo_jc_solver solver;
  if (a.solver == "numeric") solver = CLEVO_JC_NUMERIC;
  else if (a.solver == "analytic") solver = CLEVO_JC_ANALYTIC;
  else if (a.solver == "quantum") solver = CLEVO_JC_QUANTUM;
  else usage_error("--solver must be one of numeric, analytic, quantum");
  if (!(a.kappa > 0)) usage_error("--kappa must be positive");
  const auto ts = jc_times(a);

  json j = base_metadata("jc");
  j["parameters"] = {{"solver", a.solver}, {"omega", a.omega}, {"kappa", a.kappa}, {"samples", ts.size()}};
  if (a.t.empty()) {
    j["parameters"]["kt_max"] = a.kt_max;
    j["parameters"]["kt_step"] = a.kt_step;
    j["parameters"]["extra_samples"] = "multiples of pi/4 in kappa t";
  } else {
    j["parameters"]["t"] = a.t;
  }
  json outputs = json::array();

  TableHandle traj;
  check(clevo_jc_trajectory(a.omega, a.kappa, ts.data(), ts.size(), solver, &traj.p));
  const fs::path csv = out_dir / ("jc_" + a.solver + ".csv");
  check(clevo_table_write_csv(traj.p, csv.c_str()));
  outputs.push_back(csv.filename().string());

  if (a.compare) {
    clevo_jc_comparison cmp{};
    check(clevo_jc_compare(a.omega, a.kappa, ts.data(), ts.size(), &cmp));
    j["comparison"] = {{"max_deviation", cmp.max_deviation},
                       {"energy_drift", cmp.energy_drift},
                       {"atom_norm_drift", cmp.norm_drift},
                       {"excitation_drift", cmp.excitation_drift}};
    std::cout << "jc compare: max deviation " << cmp.max_deviation << '\n';
  }
  j["outputs"] = outputs;
  write_json(out_dir / ("jc_" + a.solver + ".json"), j);
  if (solver == CLEVO_JC_QUANTUM) {
    const size_t col = column_index(traj.p, "entropy");
    double smax = 0.0;
    for (size_t r = 0; r < clevo_table_rows(traj.p); ++r) smax = std::max(smax, table_value(traj.p, r, col));
    std::cout << "jc quantum: max entropy " << smax << '\n';
  }
  return 0;
}

// ---- ensemble --------------------------------------------------------------

struct EnsembleArgs {
  size_t n = 3628800;
  std::string k = "2,3,...,10";
  double r = 1e-6;
  double beta = 1.0;
  double tau_max = 10.0;
  size_t tau_n = 1001;
  bool oracle = false;
};

int run_ensemble(const EnsembleArgs& a, const fs::path& out_dir) {
  const auto ks = parse_k_list(a.k);
  if (a.n == 0) usage_error("--N must be positive");
  for (size_t k : ks) {
    if (a.n % k == 0) continue;
    size_t count = 0;
    check(clevo_ensemble_valid_k(a.n, nullptr, 0, &count));
    std::vector<size_t> valid(count);
    check(clevo_ensemble_valid_k(a.n, valid.data(), valid.size(), &count));
    std::ostringstream os;
    os << "K=" << k << " does not divide N=" << a.n << "; valid K:";
    for (size_t i = 0; i < valid.size(); ++i) os << (i ? "," : " ") << valid[i];
    usage_error(os.str());
  }
  if (a.oracle && a.n > 256) usage_error("--oracle is limited to N <= 256");
  if (a.tau_n < 1 || !(a.tau_max >= 0)) usage_error("--tau-n must be >= 1 and --tau-max >= 0");
  if (a.tau_n > 1 && !(a.tau_max > 0)) usage_error("--tau-max must be positive for more than one sample");
  const auto taus = linspace(0.0, a.tau_max, a.tau_n);

  TableHandle rows, curves;
  check(clevo_ensemble_sweep(a.n, ks.data(), ks.size(), a.r, a.beta, taus.data(), taus.size(), &rows.p, &curves.p));
  const fs::path sweep = out_dir / "ensemble_sweep.csv";
  const fs::path curve = out_dir / "ensemble_curves.csv";
  check(clevo_table_write_csv(rows.p, sweep.c_str()));
  check(clevo_table_write_csv(curves.p, curve.c_str()));

  json j = base_metadata("ensemble");
  j["parameters"] = {{"N", a.n}, {"K", ks}, {"R", a.r}, {"beta", a.beta}, {"tau_max", a.tau_max},
                     {"tau_n", a.tau_n}, {"oracle", a.oracle}};
  json cj = json::array();
  for (size_t r = 0; r < clevo_table_rows(curves.p); ++r) {
    json c;
    for (size_t col = 0; col < clevo_table_columns(curves.p); ++col)
      c[clevo_table_column_name(curves.p, col)] = table_value(curves.p, r, col);
    c["K"] = static_cast<size_t>(c["K"].get<double>());
    cj.push_back(c);
  }
  j["curves"] = cj;
  if (a.oracle) {
    json rep = json::array();
    double worst = 0.0;
    for (size_t k : ks) {
      double dev = 0.0;
      check(clevo_ensemble_oracle_deviation(a.n, k, a.r, a.beta, taus.data(), taus.size(), &dev));
      rep.push_back({{"K", k}, {"max_elementwise_deviation", dev}});
      worst = std::max(worst, dev);
    }
    j["oracle"] = {{"per_K", rep}, {"max_elementwise_deviation", worst}};
    std::cout << "ensemble oracle: max elementwise deviation " << worst << '\n';
  }
  j["outputs"] = {sweep.filename().string(), curve.filename().string()};
  write_json(out_dir / "ensemble.json", j);
  std::cout << "ensemble: " << ks.size() << " curves\n";
  return 0;
}

// ---- engine ------------------------------------------------------------------

struct EngineArgs {
  std::string model = "harmonic";
  double omega = 1.0;
  double kappa = 0.1;
  double alpha_re = 3.0;
  double alpha_im = 0.0;
  size_t dim = 4;
  unsigned long long seed = 1;
  double t_max = 10.0;
  size_t t_n = 101;
  bool fd = false;
};

int run_engine(const EngineArgs& a, const fs::path& out_dir) {
  static const std::vector<std::string> models{"harmonic", "kerr", "jc", "schrodinger"};
  const auto it = std::find(models.begin(), models.end(), a.model);
  if (it == models.end()) usage_error("--model must be one of harmonic, kerr, jc, schrodinger");
  if (a.t_n < 1 || !(a.t_max >= 0) || (a.t_n > 1 && !(a.t_max > 0))) usage_error("bad time grid");
  clevo_engine_config cfg;
  clevo_engine_config_default(&cfg);
  cfg.model = clevo_engine_model(it - models.begin());
  cfg.omega = a.omega;
  cfg.kappa = a.kappa;
  cfg.alpha_re = a.alpha_re;
  cfg.alpha_im = a.alpha_im;
  cfg.dim = a.dim;
  cfg.seed = a.seed;
  cfg.finite_difference = a.fd ? 1 : 0;
  const auto ts = linspace(0.0, a.t_max, a.t_n);

  TableHandle t;
  clevo_engine_report rep{};
  check(clevo_engine_run(&cfg, ts.data(), ts.size(), &t.p, &rep));
  const fs::path csv = out_dir / ("engine_" + a.model + ".csv");
  check(clevo_table_write_csv(t.p, csv.c_str()));
  json j = base_metadata("engine");
  j["parameters"] = {{"model", a.model}, {"omega", a.omega}, {"kappa", a.kappa}, {"alpha_re", a.alpha_re},
                     {"alpha_im", a.alpha_im}, {"dim", a.dim}, {"seed", a.seed}, {"t_max", a.t_max},
                     {"t_n", a.t_n}, {"finite_difference", a.fd}};
  j["report"] = {{"energy_drift", rep.energy_drift},
                 {"norm_drift", rep.norm_drift},
                 {"max_reference_deviation", rep.max_reference_deviation},
                 {"accepted_steps", rep.accepted_steps},
                 {"rejected_steps", rep.rejected_steps}};
  j["outputs"] = {csv.filename().string()};
  write_json(out_dir / ("engine_" + a.model + ".json"), j);
  std::cout << "engine " << a.model << ": max deviation from closed form " << rep.max_reference_deviation << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained classical evolution experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", clevo_version());
  std::string out = ".";
  int threads = 0;
  app.add_option("-o,--out", out, "Output directory")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads (default: CLEVO_NUM_THREADS or runtime default)");

  KerrArgs ka;
  clevo_grid_geometry_default(&ka.grid);
  auto* kerr = app.add_subcommand("kerr", "Kerr-medium Wigner panel and mean trajectory");
  kerr->add_option("--mode", ka.mode, "cc | qc | cq | qq (initial state, dynamics)")->required();
  kerr->add_option("--alpha0", ka.alpha0, "Coherent amplitude")->capture_default_str();
  kerr->add_option("--omega", ka.omega)->capture_default_str();
  kerr->add_option("--kappa", ka.kappa)->capture_default_str();
  kerr->add_option("--t-over-kappa", ka.t_over_kappa, "Evolution time in units of 1/kappa")->capture_default_str();
  kerr->add_option("--x-min", ka.grid.x_min)->capture_default_str();
  kerr->add_option("--x-max", ka.grid.x_max)->capture_default_str();
  kerr->add_option("--p-min", ka.grid.p_min)->capture_default_str();
  kerr->add_option("--p-max", ka.grid.p_max)->capture_default_str();
  kerr->add_option("--nx", ka.grid.nx)->capture_default_str();
  kerr->add_option("--np", ka.grid.np)->capture_default_str();
  kerr->add_option("--cutoff", ka.cutoff, "Fock cutoff")->capture_default_str();
  kerr->add_option("--samples", ka.samples, "Mean-trajectory samples")->capture_default_str();
  kerr->add_flag("--lab-frame", ka.lab_frame, "Keep the free rotation");

  JcArgs ja;
  auto* jc = app.add_subcommand("jc", "Jaynes-Cummings trajectories");
  jc->add_option("--solver", ja.solver, "numeric | analytic | quantum")->capture_default_str();
  jc->add_option("--omega", ja.omega)->capture_default_str();
  jc->add_option("--kappa", ja.kappa)->capture_default_str();
  jc->add_option("--kt-max", ja.kt_max)->capture_default_str();
  jc->add_option("--kt-step", ja.kt_step)->capture_default_str();
  jc->add_option("--t", ja.t, "Explicit sample times");
  jc->add_flag("--compare", ja.compare, "Report numeric vs closed-form deviation");

  EnsembleArgs ea;
  auto* ens = app.add_subcommand("ensemble", "K-separable variance sweep");
  ens->add_option("--N", ea.n)->capture_default_str();
  ens->add_option("--K", ea.k, "Comma list, '...' continues a progression")->capture_default_str();
  ens->add_option("--R", ea.r)->capture_default_str();
  ens->add_option("--beta", ea.beta)->capture_default_str();
  ens->add_option("--tau-max", ea.tau_max)->capture_default_str();
  ens->add_option("--tau-n", ea.tau_n)->capture_default_str();
  ens->add_flag("--oracle", ea.oracle, "Cross-check against the dense covariance integration");

  EngineArgs ga;
  auto* eng = app.add_subcommand("engine", "Generic constrained evolution");
  eng->add_option("--model", ga.model, "harmonic | kerr | jc | schrodinger")->capture_default_str();
  eng->add_option("--omega", ga.omega)->capture_default_str();
  eng->add_option("--kappa", ga.kappa)->capture_default_str();
  eng->add_option("--alpha-re", ga.alpha_re)->capture_default_str();
  eng->add_option("--alpha-im", ga.alpha_im)->capture_default_str();
  eng->add_option("--dim", ga.dim)->capture_default_str();
  eng->add_option("--seed", ga.seed)->capture_default_str();
  eng->add_option("--t-max", ga.t_max)->capture_default_str();
  eng->add_option("--t-n", ga.t_n)->capture_default_str();
  eng->add_flag("--fd", ga.fd, "Finite-difference gradients");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (threads == 0) {
      if (const char* env = std::getenv("CLEVO_NUM_THREADS")) {
        try {
          threads = std::stoi(env);
        } catch (const std::exception&) {
          usage_error("CLEVO_NUM_THREADS must be an integer");
        }
      }
    }
    if (threads > 0) clevo_set_num_threads(threads);
    const fs::path out_dir(out);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (!fs::is_directory(out_dir)) usage_error("output directory " + out + " is not usable");

    if (*kerr) return run_kerr(ka, out_dir);
    if (*jc) return run_jc(ja, out_dir);
    if (*ens) return run_ensemble(ea, out_dir);
    return run_engine(ga, out_dir);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.exit_code;
  }
}
