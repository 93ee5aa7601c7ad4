#pragma once

// Resonant Jaynes–Cummings model
//   H / hbar = omega a^dag a + omega |e><e| + i kappa a |e><g| - i kappa a^dag |g><e|
// with a coherent (classical) field and a quantum two-level atom, against the
// exact entangled solution. Atom vectors are ordered (g, e).

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "clevo/manifold.hpp"

namespace clevo::jc {

class JCParams {
 public:
  JCParams(double omega, double kappa);
  double omega() const noexcept { return omega_; }
  double kappa() const noexcept { return kappa_; }

 private:
  double omega_, kappa_;
};

struct SemiClassicalState {
  cplx alpha{0.0, 0.0};
  cplx g{1.0, 0.0};
  cplx e{0.0, 0.0};

  double atom_norm() const { return std::sqrt(std::norm(g) + std::norm(e)); }
  double excitation() const { return std::norm(alpha) + std::norm(e); }
};

// alpha(0) = 0, phi(0) = (|g> + |e>)/sqrt(2)
SemiClassicalState reference_initial_state();

ClassicalParameter to_parameter(const SemiClassicalState& s);
SemiClassicalState from_parameter(const ClassicalParameter& zeta);

// zeta = (alpha, phi_g, phi_e); H/hbar = omega|alpha|^2 + omega|phi_e|^2
//   + i kappa alpha conj(phi_e) phi_g - i kappa conj(alpha) conj(phi_g) phi_e
HamiltonianModel model(const JCParams& params);

struct SemiClassicalTrajectory {
  std::vector<double> times;
  std::vector<SemiClassicalState> states;
  double energy_drift = 0.0;      // relative, over accepted steps
  double norm_drift = 0.0;        // atom norm, over accepted steps
  double excitation_drift = 0.0;  // max |n(t) - n(0)| over samples
  ode::StepStats step_stats{};
};

SemiClassicalTrajectory integrate_semiclassical(const SemiClassicalState& s0, const JCParams& params,
                                                std::span<const double> t_grid, const EvolveOptions& opts = {});

/// theta(x) solving d theta/dx = sqrt(1 + sin^2 theta), theta(0) = 0, i.e. the
/// Jacobi amplitude at parameter m = -1; odd in x. Absolute accuracy ~1e-10.
double jacobi_theta(double x);
// Batch evaluation in a single integration pass; any order, any sign.
std::vector<double> jacobi_theta(std::span<const double> xs);
// x at which theta reaches pi/2.
double theta_quarter_period();

// Closed-form semi-classical solution for the reference initial state.
SemiClassicalState analytic_semiclassical(double t, const JCParams& params);
std::vector<SemiClassicalState> analytic_semiclassical(std::span<const double> times, const JCParams& params);

class JointFockAtomState {
 public:
  // (cutoff + 1) x 2 amplitudes, columns (g, e); global norm 1 within 1e-10.
  explicit JointFockAtomState(Eigen::MatrixXcd amplitudes);
  const Eigen::MatrixXcd& amplitudes() const noexcept { return amp_; }
  std::size_t cutoff() const noexcept { return static_cast<std::size_t>(amp_.rows()) - 1; }
  cplx operator()(std::size_t n, int level) const { return amp_(static_cast<Eigen::Index>(n), level); }

  cplx mean_field() const;   // <a>
  double excitation() const; // <a^dag a> + P_e
  // Reduced atom density matrix in (g, e) order.
  Eigen::Matrix2cd reduced_atom() const;

 private:
  Eigen::MatrixXcd amp_;
};

inline constexpr int kGround = 0;
inline constexpr int kExcited = 1;

JointFockAtomState exact_quantum_solution(double t, const JCParams& params, std::size_t cutoff = 2);

// (H / hbar) psi on the truncated space (a^dag past the cutoff is dropped).
Eigen::MatrixXcd apply_hamiltonian(const Eigen::MatrixXcd& psi, const JCParams& params);

// || i d/dt psi - (H/hbar) psi || with a centered difference of step h.
double schrodinger_residual(double t, const JCParams& params, double h = 1e-5);

// Base-2 von Neumann entropy of the reduced atom state.
double entanglement_entropy(const JointFockAtomState& state);

}  // namespace clevo::jc
