#include "clevo/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "clevo/errors.hpp"

namespace clevo {

ClassicalParameter::ClassicalParameter(std::vector<cplx> values, std::vector<std::string> labels,
                                       std::vector<NormalizedGroup> groups)
    : values_(std::move(values)), labels_(std::move(labels)), groups_(std::move(groups)) {
  if (values_.empty()) throw InvalidArgument("classical parameter must have dimension >= 1");
  if (!labels_.empty() && labels_.size() != values_.size())
    throw InvalidArgument("one label per parameter entry is required");
  if (labels_.empty()) labels_.assign(values_.size(), "");
  for (const auto& g : groups_) {
    if (g.length == 0 || g.offset + g.length > values_.size())
      throw InvalidArgument("normalized group out of range");
  }
}

ClassicalParameter ClassicalParameter::with_values(std::vector<cplx> values) const {
  if (values.size() != values_.size()) throw InvalidArgument("dimension is fixed along a trajectory");
  ClassicalParameter out = *this;
  out.values_ = std::move(values);
  return out;
}

double ClassicalParameter::norm_defect() const {
  double worst = 0.0;
  for (const auto& g : groups_) {
    double s = 0.0;
    for (std::size_t k = g.offset; k < g.offset + g.length; ++k) s += std::norm(values_[k]);
    worst = std::max(worst, std::abs(std::sqrt(s) - 1.0));
  }
  return worst;
}

std::vector<cplx> wirtinger_gradient(const HamiltonianModel& model, std::span<const cplx> zeta, double h) {
  if (!(h > 0)) throw InvalidArgument("finite-difference step must be positive");
  std::vector<cplx> probe(zeta.begin(), zeta.end());
  std::vector<cplx> grad(zeta.size());
  auto energy_at = [&](std::size_t k) {
    const double e = model.energy(probe);
    if (!std::isfinite(e)) {
      std::ostringstream os;
      os << "non-finite energy while differentiating component " << k;
      throw NumericDomainError(os.str(), k);
    }
    return e;
  };
  for (std::size_t k = 0; k < zeta.size(); ++k) {
    const double step = h * std::max(1.0, std::abs(zeta[k]));
    const cplx z = zeta[k];
    probe[k] = z + step;
    const double ep = energy_at(k);
    probe[k] = z - step;
    const double em = energy_at(k);
    probe[k] = z + cplx(0, step);
    const double eip = energy_at(k);
    probe[k] = z - cplx(0, step);
    const double eim = energy_at(k);
    probe[k] = z;
    const double d_re = (ep - em) / (2 * step);
    const double d_im = (eip - eim) / (2 * step);
    grad[k] = 0.5 * cplx(d_re, d_im);
  }
  return grad;
}

std::vector<cplx> model_gradient(const HamiltonianModel& model, std::span<const cplx> zeta) {
  if (!model.gradient) return wirtinger_gradient(model, zeta);
  std::vector<cplx> g(zeta.size());
  model.gradient(zeta, g);
  return g;
}

namespace {

std::span<const cplx> as_complex(std::span<const double> y) {
  return {reinterpret_cast<const cplx*>(y.data()), y.size() / 2};
}
std::span<cplx> as_complex(std::span<double> y) { return {reinterpret_cast<cplx*>(y.data()), y.size() / 2}; }

}  // namespace

TrajectoryRecord evolve_constrained(const HamiltonianModel& model, const ClassicalParameter& zeta0,
                                    std::span<const double> t_grid, const EvolveOptions& opts) {
  if (!model.energy) throw InvalidArgument("model has no energy function");
  if (!(model.hbar > 0)) throw InvalidArgument("hbar must be positive");
  const double e0 = model.energy(zeta0.values());
  if (!std::isfinite(e0)) throw NumericDomainError("energy is not finite at the initial parameter");

  const std::size_t d = zeta0.dimension();
  const double inv_hbar = 1.0 / model.hbar;
  std::vector<cplx> grad(d);
  std::vector<cplx> work(d);
  ode::Rhs rhs = [&](double, std::span<const double> y, std::span<double> dydt) {
    auto z = as_complex(y);
    auto dz = as_complex(dydt);
    if (model.gradient) {
      model.gradient(z, grad);
    } else {
      grad = wirtinger_gradient(model, z);
    }
    // i dz/dt = g / hbar  =>  dz/dt = -i g / hbar
    for (std::size_t k = 0; k < d; ++k) dz[k] = cplx(grad[k].imag(), -grad[k].real()) * inv_hbar;
  };

  TrajectoryRecord rec;
  rec.times.assign(t_grid.begin(), t_grid.end());
  rec.states.reserve(t_grid.size());
  rec.energies.reserve(t_grid.size());
  const double scale = std::max(1.0, std::abs(e0));

  std::vector<double> y(2 * d);
  std::copy(zeta0.values().begin(), zeta0.values().end(), as_complex(std::span<double>(y)).begin());

  ClassicalParameter scratch = zeta0;
  auto observer = [&](std::size_t, double, std::span<const double> yy) {
    auto z = as_complex(yy);
    rec.states.push_back(zeta0.with_values(std::vector<cplx>(z.begin(), z.end())));
    rec.energies.push_back(model.energy(z));
  };
  auto hook = [&](double t, std::span<const double> yy) {
    auto z = as_complex(yy);
    const double e = model.energy(z);
    const double drift = std::abs(e - e0) / scale;
    if (!std::isfinite(drift)) throw IntegrationError("energy became non-finite", t);
    rec.energy_drift = std::max(rec.energy_drift, drift);
    if (!zeta0.normalized_groups().empty()) {
      std::copy(z.begin(), z.end(), work.begin());
      scratch = zeta0.with_values(work);
      rec.norm_drift = std::max(rec.norm_drift, scratch.norm_defect());
    }
    if (opts.enforce_conservation) {
      if (rec.energy_drift > opts.energy_tolerance) {
        std::ostringstream os;
        os << "energy drift " << rec.energy_drift << " exceeds tolerance " << opts.energy_tolerance;
        throw IntegrationError(os.str(), t);
      }
      if (rec.norm_drift > opts.norm_tolerance) {
        std::ostringstream os;
        os << "normalized sub-vector drift " << rec.norm_drift << " exceeds tolerance " << opts.norm_tolerance;
        throw IntegrationError(os.str(), t);
      }
    }
  };
  rec.norm_drift = zeta0.norm_defect();
  rec.step_stats = ode::integrate(rhs, y, t_grid, observer, opts.integrator, hook);
  return rec;
}

MixedEnsemble::MixedEnsemble(std::vector<double> weights, std::vector<ClassicalParameter> members,
                             bool signed_weights)
    : weights_(std::move(weights)), members_(std::move(members)), signed_(signed_weights) {
  if (weights_.size() != members_.size()) throw InvalidArgument("one weight per ensemble member is required");
  if (members_.empty()) throw InvalidArgument("ensemble must have at least one member");
  double total = 0.0;
  for (double p : weights_) {
    if (!std::isfinite(p)) throw InvalidArgument("ensemble weights must be finite");
    if (!signed_ && p < 0) throw InvalidArgument("negative weight in an unsigned ensemble");
    total += p;
  }
  if (!signed_ && std::abs(total - 1.0) > 1e-12) throw InvalidArgument("ensemble weights must sum to 1");
  for (const auto& m : members_) {
    if (m.dimension() != members_.front().dimension())
      throw InvalidArgument("ensemble members must share a dimension");
  }
}

MixedEnsemble MixedEnsemble::with_members(std::vector<ClassicalParameter> members) const {
  if (members.size() != members_.size()) throw InvalidArgument("member count is fixed");
  MixedEnsemble out = *this;
  out.members_ = std::move(members);
  return out;
}

std::vector<MixedEnsemble> evolve_ensemble(const HamiltonianModel& model, const MixedEnsemble& ensemble,
                                           std::span<const double> t_grid, const EvolveOptions& opts) {
  const std::size_t m = ensemble.size();
  std::vector<TrajectoryRecord> runs(m);
  std::vector<std::string> failures(m);
  std::vector<double> fail_time(m, 0.0);
  std::vector<char> failed(m, 0);

  const long long count = static_cast<long long>(m);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < count; ++i) {
    try {
      runs[i] = evolve_constrained(model, ensemble.members()[i], t_grid, opts);
    } catch (const IntegrationError& e) {
      failed[i] = 1;
      failures[i] = e.what();
      fail_time[i] = e.last_good_time();
    } catch (const std::exception& e) {
      failed[i] = 1;
      failures[i] = e.what();
      fail_time[i] = t_grid.empty() ? 0.0 : t_grid.front();
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (failed[i]) {
      std::ostringstream os;
      os << "ensemble member " << i << ": " << failures[i];
      throw EnsembleMemberError(os.str(), fail_time[i], i);
    }
  }

  std::vector<MixedEnsemble> snapshots;
  snapshots.reserve(t_grid.size());
  for (std::size_t s = 0; s < t_grid.size(); ++s) {
    std::vector<ClassicalParameter> members;
    members.reserve(m);
    for (std::size_t i = 0; i < m; ++i) members.push_back(runs[i].states[s]);
    snapshots.push_back(ensemble.with_members(std::move(members)));
  }
  return snapshots;
}

cplx ensemble_expectation(const MixedEnsemble& ensemble, const Observable& f) {
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const cplx v = f(ensemble.members()[i]);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      std::ostringstream os;
      os << "observable is not finite on member " << i;
      throw NumericDomainError(os.str(), i);
    }
    acc += ensemble.weights()[i] * v;
  }
  return acc;
}

HamiltonianModel harmonic_model(double omega, double hbar) {
  HamiltonianModel m;
  m.name = "harmonic";
  m.hbar = hbar;
  m.energy = [omega, hbar](std::span<const cplx> z) {
    double s = 0;
    for (const auto& v : z) s += std::norm(v);
    return hbar * omega * s;
  };
  m.gradient = [omega, hbar](std::span<const cplx> z, std::span<cplx> g) {
    for (std::size_t k = 0; k < z.size(); ++k) g[k] = hbar * omega * z[k];
  };
  return m;
}

HamiltonianModel schrodinger_model(std::vector<cplx> h, std::size_t dim, double hbar) {
  if (dim == 0 || h.size() != dim * dim) throw InvalidArgument("Hamilton matrix must be dim x dim");
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      if (std::abs(h[i * dim + j] - std::conj(h[j * dim + i])) > 1e-12 * (1 + std::abs(h[i * dim + j])))
        throw InvalidArgument("Hamilton matrix is not Hermitian");
    }
  }
  HamiltonianModel m;
  m.name = "schrodinger";
  m.hbar = hbar;
  auto apply = [h, dim](std::span<const cplx> psi, std::span<cplx> out) {
    for (std::size_t i = 0; i < dim; ++i) {
      cplx acc{0, 0};
      for (std::size_t j = 0; j < dim; ++j) acc += h[i * dim + j] * psi[j];
      out[i] = acc;
    }
  };
  m.energy = [apply, dim](std::span<const cplx> psi) {
    std::vector<cplx> hp(dim);
    apply(psi, hp);
    cplx e{0, 0};
    for (std::size_t i = 0; i < dim; ++i) e += std::conj(psi[i]) * hp[i];
    return e.real();
  };
  m.gradient = apply;
  return m;
}

}  // namespace clevo
