#include "clevo/clevo.h"

#include <cmath>
#include <exception>
#include <new>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "clevo/errors.hpp"
#include "clevo/jaynes_cummings.hpp"
#include "clevo/kerr.hpp"
#include "clevo/manifold.hpp"
#include "clevo/parallel.hpp"
#include "clevo/phasespace.hpp"
#include "clevo/separable.hpp"
#include "clevo/table.hpp"

struct clevo_table {
  clevo::Table table;
};

struct clevo_grid {
  clevo::WignerGrid grid;
};

namespace {

thread_local std::string last_error;

clevo_status set_error(clevo_status s, const char* what) {
  last_error = what;
  return s;
}

template <class F>
clevo_status guarded(F&& f) {
  last_error.clear();
  try {
    f();
    return CLEVO_OK;
  } catch (const clevo::Error& e) {
    return set_error(static_cast<clevo_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(CLEVO_ERR_INTERNAL, "out of memory");
  } catch (const std::invalid_argument& e) {
    return set_error(CLEVO_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::out_of_range& e) {
    return set_error(CLEVO_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return set_error(CLEVO_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(CLEVO_ERR_INTERNAL, "unknown failure");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw clevo::InvalidArgument(what);
}

std::span<const double> span_of(const double* p, std::size_t n) {
  require(p != nullptr || n == 0, "null array");
  return {p, n};
}

clevo::GridGeometry to_geometry(const clevo_grid_geometry* g) {
  clevo::GridGeometry out;
  if (g) {
    out.x_min = g->x_min;
    out.x_max = g->x_max;
    out.p_min = g->p_min;
    out.p_max = g->p_max;
    out.nx = g->nx;
    out.np = g->np;
  }
  out.validate();
  return out;
}

clevo_table* wrap(clevo::Table t) { return new clevo_table{std::move(t)}; }

std::vector<clevo::cplx> random_hermitian(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::MatrixXcd a(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) a(i, j) = {nd(rng), nd(rng)};
  const Eigen::MatrixXcd h = 0.5 * (a + a.adjoint());
  std::vector<clevo::cplx> out(dim * dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) out[i * dim + j] = h(i, j);
  return out;
}

}  // namespace

extern "C" {

const char* clevo_version(void) { return CLEVO_VERSION_STRING; }
const char* clevo_last_error(void) { return last_error.c_str(); }

const char* clevo_status_name(clevo_status status) {
  switch (status) {
    case CLEVO_OK: return "ok";
    case CLEVO_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case CLEVO_ERR_NUMERIC_DOMAIN: return "numeric_domain";
    case CLEVO_ERR_INTEGRATION: return "integration_failure";
    case CLEVO_ERR_TRUNCATION: return "truncation";
    case CLEVO_ERR_DEGENERATE_STATE: return "degenerate_state";
    case CLEVO_ERR_FLOW_CONSISTENCY: return "flow_consistency";
    case CLEVO_ERR_SIZE_GUARD: return "size_guard";
    case CLEVO_ERR_IO: return "io";
    case CLEVO_ERR_DOMAIN: return "domain";
    case CLEVO_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void clevo_set_num_threads(int n) { clevo::set_num_threads(n); }
int clevo_num_threads(void) { return clevo::num_threads(); }

size_t clevo_table_rows(const clevo_table* t) { return t ? t->table.rows.size() : 0; }
size_t clevo_table_columns(const clevo_table* t) { return t ? t->table.columns.size() : 0; }

const char* clevo_table_column_name(const clevo_table* t, size_t column) {
  if (!t || column >= t->table.columns.size()) return nullptr;
  return t->table.columns[column].c_str();
}

clevo_status clevo_table_get(const clevo_table* t, size_t row, size_t column, double* value) {
  return guarded([&] {
    require(t && value, "null argument");
    require(row < t->table.rows.size() && column < t->table.columns.size(), "table index out of range");
    *value = t->table.rows[row][column];
  });
}

clevo_status clevo_table_write_csv(const clevo_table* t, const char* path) {
  return guarded([&] {
    require(t && path, "null argument");
    clevo::write_text_file(path, t->table.to_csv());
  });
}

void clevo_table_destroy(clevo_table* t) { delete t; }

void clevo_grid_geometry_default(clevo_grid_geometry* g) {
  if (!g) return;
  const clevo::GridGeometry d;
  *g = {d.x_min, d.x_max, d.p_min, d.p_max, d.nx, d.np};
}

clevo_status clevo_grid_geometry_get(const clevo_grid* grid, clevo_grid_geometry* g) {
  return guarded([&] {
    require(grid && g, "null argument");
    const auto& d = grid->grid.geometry();
    *g = {d.x_min, d.x_max, d.p_min, d.p_max, d.nx, d.np};
  });
}

clevo_status clevo_grid_value(const clevo_grid* grid, size_t i, size_t j, double* value) {
  return guarded([&] {
    require(grid && value, "null argument");
    const auto& d = grid->grid.geometry();
    require(i < d.nx && j < d.np, "grid index out of range");
    *value = grid->grid.at(i, j);
  });
}

double clevo_grid_min(const clevo_grid* grid) { return grid ? grid->grid.min() : std::nan(""); }
double clevo_grid_max(const clevo_grid* grid) { return grid ? grid->grid.max() : std::nan(""); }
double clevo_grid_integral(const clevo_grid* grid) { return grid ? grid->grid.integral() : std::nan(""); }
size_t clevo_grid_warning_count(const clevo_grid* grid) { return grid ? grid->grid.warnings().size() : 0; }

const char* clevo_grid_warning(const clevo_grid* grid, size_t index) {
  if (!grid || index >= grid->grid.warnings().size()) return nullptr;
  return grid->grid.warnings()[index].c_str();
}

clevo_status clevo_grid_write_csv(const clevo_grid* grid, const char* path) {
  return guarded([&] {
    require(grid && path, "null argument");
    clevo::write_text_file(path, clevo::wigner_to_csv(grid->grid));
  });
}

clevo_status clevo_grid_write_json(const clevo_grid* grid, const char* path) {
  return guarded([&] {
    require(grid && path, "null argument");
    clevo::write_text_file(path, clevo::wigner_to_json(grid->grid));
  });
}

void clevo_grid_destroy(clevo_grid* grid) { delete grid; }

void clevo_kerr_config_default(clevo_kerr_config* c) {
  if (!c) return;
  *c = {3.0, 0.0, 1.0, 0.1, std::numbers::pi / 0.1, 60, 256, 1};
}

clevo_status clevo_kerr_render(const clevo_kerr_config* c, clevo_kerr_mode mode, const clevo_grid_geometry* geometry,
                               clevo_grid** grid, clevo_table** trajectory) {
  return guarded([&] {
    require(c && grid, "null argument");
    require(mode >= CLEVO_KERR_CC && mode <= CLEVO_KERR_QQ, "unknown Kerr mode");
    const clevo::kerr::KerrParams params(c->omega, c->kappa);
    const clevo::GridGeometry geom = to_geometry(geometry);
    const clevo::cplx a0(c->alpha0_re, c->alpha0_im);
    const bool cat_initial = mode == CLEVO_KERR_QC || mode == CLEVO_KERR_QQ;
    const bool quantum = mode == CLEVO_KERR_CQ || mode == CLEVO_KERR_QQ;

    clevo::kerr::PanelSpec spec;
    if (cat_initial) {
      const double r = std::abs(a0);
      spec.initial = clevo::kerr::CatInitial{std::polar(r, -std::numbers::pi / 4), std::polar(r, std::numbers::pi / 4),
                                             -1};
    } else {
      spec.initial = clevo::kerr::CoherentInitial{a0};
    }
    spec.dynamics = quantum ? clevo::kerr::Dynamics::quantum : clevo::kerr::Dynamics::classical;
    spec.time = c->time;
    spec.co_rotating = c->co_rotating != 0;
    spec.trajectory_samples = c->trajectory_samples;
    spec.cutoff = c->cutoff;

    auto result = clevo::kerr::render_panel(spec, params, geom);
    clevo::Table t;
    t.columns = {"t", "re_mean", "im_mean"};
    for (std::size_t i = 0; i < result.times.size(); ++i)
      t.add_row({result.times[i], result.mean[i].real(), result.mean[i].imag()});
    auto* g = new clevo_grid{std::move(result.grid)};
    if (trajectory) {
      try {
        *trajectory = wrap(std::move(t));
      } catch (...) {
        delete g;
        throw;
      }
    }
    *grid = g;
  });
}

clevo_status clevo_kerr_classical_flow(double re, double im, double omega, double kappa, double t, double* out_re,
                                       double* out_im) {
  return guarded([&] {
    require(out_re && out_im, "null argument");
    const auto z = clevo::kerr::classical_flow({re, im}, clevo::kerr::KerrParams(omega, kappa), t);
    *out_re = z.real();
    *out_im = z.imag();
  });
}

clevo_status clevo_kerr_quantum_mean(double re, double im, double omega, double kappa, double t, double* out_re,
                                     double* out_im) {
  return guarded([&] {
    require(out_re && out_im, "null argument");
    const auto z = clevo::kerr::quantum_mean_coherent({re, im}, clevo::kerr::KerrParams(omega, kappa), t);
    *out_re = z.real();
    *out_im = z.imag();
  });
}

clevo_status clevo_jc_trajectory(double omega, double kappa, const double* times, size_t n, clevo_jc_solver solver,
                                 clevo_table** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    const auto ts = span_of(times, n);
    require(n > 0, "empty time grid");
    const clevo::jc::JCParams params(omega, kappa);
    clevo::Table t;
    auto add_semiclassical = [&](double time, const clevo::jc::SemiClassicalState& s) {
      t.add_row({time, kappa * time, s.alpha.real(), s.alpha.imag(), s.g.real(), s.g.imag(), s.e.real(), s.e.imag(),
                 s.atom_norm(), s.excitation()});
    };
    switch (solver) {
      case CLEVO_JC_NUMERIC: {
        t.columns = {"t", "kappa_t", "re_alpha", "im_alpha", "re_g", "im_g", "re_e", "im_e", "atom_norm", "excitation"};
        const auto traj = clevo::jc::integrate_semiclassical(clevo::jc::reference_initial_state(), params, ts);
        for (std::size_t i = 0; i < n; ++i) add_semiclassical(traj.times[i], traj.states[i]);
        break;
      }
      case CLEVO_JC_ANALYTIC: {
        t.columns = {"t", "kappa_t", "re_alpha", "im_alpha", "re_g", "im_g", "re_e", "im_e", "atom_norm", "excitation"};
        const auto states = clevo::jc::analytic_semiclassical(ts, params);
        for (std::size_t i = 0; i < n; ++i) add_semiclassical(ts[i], states[i]);
        break;
      }
      case CLEVO_JC_QUANTUM: {
        t.columns = {"t", "kappa_t", "re_alpha", "im_alpha", "p_g", "p_e", "excitation", "entropy", "residual"};
        for (double time : ts) {
          const auto psi = clevo::jc::exact_quantum_solution(time, params);
          const auto rho = psi.reduced_atom();
          const auto a = psi.mean_field();
          t.add_row({time, kappa * time, a.real(), a.imag(), rho(0, 0).real(), rho(1, 1).real(), psi.excitation(),
                     clevo::jc::entanglement_entropy(psi), clevo::jc::schrodinger_residual(time, params)});
        }
        break;
      }
      default:
        throw clevo::InvalidArgument("unknown JC solver");
    }
    *out = wrap(std::move(t));
  });
}

clevo_status clevo_jc_compare(double omega, double kappa, const double* times, size_t n, clevo_jc_comparison* out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    const auto ts = span_of(times, n);
    require(n > 0, "empty time grid");
    const clevo::jc::JCParams params(omega, kappa);
    const auto traj = clevo::jc::integrate_semiclassical(clevo::jc::reference_initial_state(), params, ts);
    const auto exact = clevo::jc::analytic_semiclassical(ts, params);
    double dev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = traj.states[i];
      const auto& b = exact[i];
      dev = std::max({dev, std::abs(a.alpha - b.alpha), std::abs(a.g - b.g), std::abs(a.e - b.e)});
    }
    *out = {dev, traj.energy_drift, traj.norm_drift, traj.excitation_drift};
  });
}

clevo_status clevo_jc_entropy(double omega, double kappa, double t, double* entropy) {
  return guarded([&] {
    require(entropy != nullptr, "null argument");
    *entropy = clevo::jc::entanglement_entropy(clevo::jc::exact_quantum_solution(t, clevo::jc::JCParams(omega, kappa)));
  });
}

clevo_status clevo_jacobi_theta(double x, double* theta) {
  return guarded([&] {
    require(theta != nullptr, "null argument");
    *theta = clevo::jc::jacobi_theta(x);
  });
}

double clevo_theta_quarter_period(void) { return clevo::jc::theta_quarter_period(); }

clevo_status clevo_ensemble_valid_k(size_t n, size_t* out, size_t capacity, size_t* count) {
  return guarded([&] {
    require(count != nullptr && (out != nullptr || capacity == 0), "null argument");
    const auto ds = clevo::separable::divisors(n);
    for (std::size_t i = 0; i < ds.size() && i < capacity; ++i) out[i] = ds[i];
    *count = ds.size();
  });
}

clevo_status clevo_ensemble_sweep(size_t n, const size_t* k_list, size_t k_count, double r, double beta,
                                  const double* tau, size_t tau_count, clevo_table** rows, clevo_table** curves) {
  return guarded([&] {
    require(rows != nullptr && (k_list != nullptr || k_count == 0), "null argument");
    const auto res = clevo::separable::variance_ratio_sweep(n, {k_list, k_count}, r, span_of(tau, tau_count), beta);
    clevo::Table rt;
    rt.columns = {"tau", "K", "ratio"};
    for (const auto& row : res.rows) rt.add_row({row.tau, double(row.K), row.ratio});
    clevo::Table ct;
    ct.columns = {"K", "r_K", "max_ratio", "tau_at_max", "half_period"};
    for (const auto& c : res.curves) ct.add_row({double(c.K), c.r_K, c.max_ratio, c.tau_at_max, c.half_period});
    clevo_table* rows_handle = wrap(std::move(rt));
    if (curves) {
      try {
        *curves = wrap(std::move(ct));
      } catch (...) {
        delete rows_handle;
        throw;
      }
    }
    *rows = rows_handle;
  });
}

clevo_status clevo_ensemble_variance(size_t n, size_t k, double r, double beta, double tau, double* variance) {
  return guarded([&] {
    require(variance != nullptr, "null argument");
    *variance = clevo::separable::variance_mean_momentum(clevo::separable::Partition::balanced(n, k), r, beta, tau);
  });
}

clevo_status clevo_ensemble_oracle_deviation(size_t n, size_t k, double r, double beta, const double* tau,
                                             size_t tau_count, double* max_deviation) {
  namespace sep = clevo::separable;
  return guarded([&] {
    require(max_deviation != nullptr, "null argument");
    const auto taus = span_of(tau, tau_count);
    require(tau_count > 0, "empty tau grid");
    if (n > sep::kDenseOracleMaxModes)
      throw clevo::SizeGuardError("dense oracle is limited to N <= " + std::to_string(sep::kDenseOracleMaxModes));
    const auto part = sep::Partition::balanced(n, k);
    const auto blocks0 = sep::thermal_covariance(beta, part);
    const auto dense = sep::dense_oracle(sep::assemble(blocks0, part), sep::separable_G(part, r), taus);
    double dev = 0.0;
    for (std::size_t i = 0; i < tau_count; ++i) {
      std::vector<sep::StructuredBlock> blocks;
      for (std::size_t j = 0; j < part.blocks(); ++j) blocks.push_back(sep::propagate_block(blocks0[j], j, part, r, taus[i]));
      const auto structured = sep::assemble(blocks, part);
      dev = std::max(dev, (structured.matrix() - dense[i].matrix()).cwiseAbs().maxCoeff());
    }
    *max_deviation = dev;
  });
}

void clevo_engine_config_default(clevo_engine_config* c) {
  if (!c) return;
  *c = {CLEVO_ENGINE_HARMONIC, 1.0, 0.1, 3.0, 0.0, 4, 1, 0};
}

clevo_status clevo_engine_run(const clevo_engine_config* c, const double* times, size_t n, clevo_table** out,
                              clevo_engine_report* report) {
  return guarded([&] {
    require(c != nullptr && out != nullptr, "null argument");
    const auto ts = span_of(times, n);
    require(n > 0, "empty time grid");
    const clevo::cplx a0(c->alpha_re, c->alpha_im);

    clevo::HamiltonianModel model;
    clevo::ClassicalParameter zeta0;
    std::function<std::vector<clevo::cplx>(double)> reference;
    switch (c->model) {
      case CLEVO_ENGINE_HARMONIC: {
        require(std::isfinite(c->omega), "omega must be finite");
        model = clevo::harmonic_model(c->omega);
        zeta0 = clevo::ClassicalParameter({a0}, {"alpha"});
        const double w = c->omega;
        reference = [=](double t) { return std::vector<clevo::cplx>{std::exp(clevo::cplx(0.0, -w * t)) * a0}; };
        break;
      }
      case CLEVO_ENGINE_KERR: {
        const clevo::kerr::KerrParams params(c->omega, c->kappa);
        model = clevo::kerr::model(params);
        zeta0 = clevo::ClassicalParameter({a0}, {"alpha"});
        reference = [=](double t) { return std::vector<clevo::cplx>{clevo::kerr::classical_flow(a0, params, t)}; };
        break;
      }
      case CLEVO_ENGINE_JC: {
        const clevo::jc::JCParams params(c->omega, c->kappa);
        model = clevo::jc::model(params);
        zeta0 = clevo::jc::to_parameter(clevo::jc::reference_initial_state());
        reference = [=](double t) {
          const auto s = clevo::jc::analytic_semiclassical(t, params);
          return std::vector<clevo::cplx>{s.alpha, s.g, s.e};
        };
        break;
      }
      case CLEVO_ENGINE_SCHRODINGER: {
        require(c->dim >= 1 && c->dim <= 64, "dimension must be in [1, 64]");
        const std::size_t dim = c->dim;
        std::mt19937_64 rng(c->seed);
        auto h = random_hermitian(dim, rng);
        std::normal_distribution<double> nd(0.0, 1.0);
        Eigen::VectorXcd psi(dim);
        for (std::size_t i = 0; i < dim; ++i) psi(i) = {nd(rng), nd(rng)};
        psi.normalize();
        Eigen::MatrixXcd hm(dim, dim);
        for (std::size_t i = 0; i < dim; ++i)
          for (std::size_t j = 0; j < dim; ++j) hm(i, j) = h[i * dim + j];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hm);
        const Eigen::MatrixXcd v = es.eigenvectors();
        const Eigen::VectorXd lam = es.eigenvalues();
        const Eigen::VectorXcd coeff = v.adjoint() * psi;
        model = clevo::schrodinger_model(std::move(h), dim);
        std::vector<clevo::cplx> z(psi.data(), psi.data() + dim);
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < dim; ++i) labels.push_back("psi" + std::to_string(i));
        zeta0 = clevo::ClassicalParameter(std::move(z), std::move(labels), {{0, dim}});
        reference = [=](double t) {
          Eigen::VectorXcd phase(lam.size());
          for (Eigen::Index i = 0; i < lam.size(); ++i) phase(i) = std::exp(clevo::cplx(0.0, -lam(i) * t)) * coeff(i);
          const Eigen::VectorXcd out = v * phase;
          return std::vector<clevo::cplx>(out.data(), out.data() + out.size());
        };
        break;
      }
      default:
        throw clevo::InvalidArgument("unknown engine model");
    }
    if (c->finite_difference) model.gradient = nullptr;

    const auto rec = clevo::evolve_constrained(model, zeta0, ts);
    clevo::Table t;
    t.columns = {"t", "energy"};
    for (std::size_t k = 0; k < zeta0.dimension(); ++k) {
      t.columns.push_back("re_z" + std::to_string(k));
      t.columns.push_back("im_z" + std::to_string(k));
    }
    double dev = 0.0;
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
      std::vector<double> row{rec.times[i], rec.energies[i]};
      const auto ref = reference(rec.times[i]);
      for (std::size_t k = 0; k < zeta0.dimension(); ++k) {
        const auto z = rec.states[i][k];
        row.push_back(z.real());
        row.push_back(z.imag());
        dev = std::max(dev, std::abs(z - ref[k]));
      }
      t.add_row(std::move(row));
    }
    if (report)
      *report = {rec.energy_drift, rec.norm_drift, dev, rec.step_stats.accepted, rec.step_stats.rejected};
    *out = wrap(std::move(t));
  });
}

}  // extern "C"
