#pragma once

// Constrained classical evolution on a parametrized family of states.
//
// A family |psi_zeta> is described by its complex parameter vector zeta and the
// energy H(zeta) = <psi_zeta|H|psi_zeta>. Trajectories solve
//
//     i dzeta/dt = (1/hbar) dH/dzeta^*
//
// where the Wirtinger derivative treats Re zeta_k and Im zeta_k as the
// canonical pair, dH/dzeta^* = (dH/dRe + i dH/dIm) / 2.

#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clevo/ode.hpp"

namespace clevo {

using cplx = std::complex<double>;

// Contiguous run of entries that form a unit vector (e.g. the atom ket).
struct NormalizedGroup {
  std::size_t offset = 0;
  std::size_t length = 0;
};

class ClassicalParameter {
 public:
  ClassicalParameter() = default;
  explicit ClassicalParameter(std::vector<cplx> values, std::vector<std::string> labels = {},
                              std::vector<NormalizedGroup> groups = {});

  std::size_t dimension() const noexcept { return values_.size(); }
  std::span<const cplx> values() const noexcept { return values_; }
  const cplx& operator[](std::size_t k) const { return values_[k]; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<NormalizedGroup>& normalized_groups() const noexcept { return groups_; }

  // Same metadata, new values (dimension must match).
  ClassicalParameter with_values(std::vector<cplx> values) const;

  // max over groups of | ||sub|| - 1 |; 0 when there are no groups.
  double norm_defect() const;

 private:
  std::vector<cplx> values_;
  std::vector<std::string> labels_;
  std::vector<NormalizedGroup> groups_;
};

using EnergyFn = std::function<double(std::span<const cplx>)>;
using GradientFn = std::function<void(std::span<const cplx>, std::span<cplx>)>;

struct HamiltonianModel {
  EnergyFn energy;
  GradientFn gradient;  // dH/dzeta^*; empty selects finite differences
  double hbar = 1.0;
  std::string name;
};

/// Central-difference Wirtinger gradient. Each component is perturbed by
/// h * max(1, |zeta_k|) along its real and imaginary axes.
std::vector<cplx> wirtinger_gradient(const HamiltonianModel& model, std::span<const cplx> zeta,
                                     double h = 1e-6);

// Analytic gradient when the model has one, finite differences otherwise.
std::vector<cplx> model_gradient(const HamiltonianModel& model, std::span<const cplx> zeta);

struct EvolveOptions {
  ode::Options integrator{};
  double energy_tolerance = 1e-8;  // relative to max(1, |H(0)|)
  double norm_tolerance = 1e-8;    // per normalized group
  bool enforce_conservation = true;
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<ClassicalParameter> states;
  std::vector<double> energies;  // H at each sample
  double energy_drift = 0.0;     // max |H(t) - H(0)| / max(1, |H(0)|) over accepted steps
  double norm_drift = 0.0;       // max norm defect over accepted steps
  ode::StepStats step_stats{};
};

/// Integrates the constrained equation of motion, sampling exactly at t_grid.
/// Normalized groups are never projected back; drift beyond the configured
/// tolerances is an IntegrationError when enforce_conservation is set.
TrajectoryRecord evolve_constrained(const HamiltonianModel& model, const ClassicalParameter& zeta0,
                                    std::span<const double> t_grid, const EvolveOptions& opts = {});

class MixedEnsemble {
 public:
  MixedEnsemble() = default;
  // Unsigned ensembles need p_n >= 0 with sum 1 (within 1e-12); signed
  // (quasiprobability) ensembles only need finite weights.
  MixedEnsemble(std::vector<double> weights, std::vector<ClassicalParameter> members, bool signed_weights = false);

  std::span<const double> weights() const noexcept { return weights_; }
  const std::vector<ClassicalParameter>& members() const noexcept { return members_; }
  bool signed_weights() const noexcept { return signed_; }
  std::size_t size() const noexcept { return members_.size(); }

  MixedEnsemble with_members(std::vector<ClassicalParameter> members) const;

 private:
  std::vector<double> weights_;
  std::vector<ClassicalParameter> members_;
  bool signed_ = false;
};

/// Evolves every member independently; one snapshot per entry of t_grid.
/// Weights are copied, never recomputed. A failing member raises
/// EnsembleMemberError with the lowest failing index.
std::vector<MixedEnsemble> evolve_ensemble(const HamiltonianModel& model, const MixedEnsemble& ensemble,
                                           std::span<const double> t_grid, const EvolveOptions& opts = {});

using Observable = std::function<cplx(const ClassicalParameter&)>;

cplx ensemble_expectation(const MixedEnsemble& ensemble, const Observable& f);

// Shipped generic models.
HamiltonianModel harmonic_model(double omega, double hbar = 1.0);
// H = psi^dagger H psi for a Hermitian matrix given row-major (dim x dim).
HamiltonianModel schrodinger_model(std::vector<cplx> hermitian_row_major, std::size_t dim, double hbar = 1.0);

}  // namespace clevo
