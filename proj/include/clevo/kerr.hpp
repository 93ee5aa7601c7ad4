#pragma once

// Single-mode Kerr medium, H = hbar omega a^dag a + (hbar kappa / 2) a^dag^2 a^2.

#include <complex>
#include <string>
#include <variant>
#include <vector>

#include "clevo/manifold.hpp"
#include "clevo/phasespace.hpp"

namespace clevo::kerr {

class KerrParams {
 public:
  KerrParams(double omega, double kappa);
  double omega() const noexcept { return omega_; }
  double kappa() const noexcept { return kappa_; }
  double chi() const noexcept { return chi_; }  // kappa / omega

 private:
  double omega_, kappa_, chi_;
};

// alpha(t) = exp(-i t (omega + kappa |alpha0|^2)) alpha0
cplx classical_flow(cplx alpha0, const KerrParams& params, double t);
// Inverse map: alpha -> exp(+i t (omega + kappa |alpha|^2)) alpha (|alpha| is conserved).
cplx classical_flow_inverse(cplx alpha, const KerrParams& params, double t);

// <alpha0| a(t) |alpha0> = exp(-i omega t + (exp(-i kappa t) - 1)|alpha0|^2) alpha0
cplx quantum_mean_coherent(cplx alpha0, const KerrParams& params, double t);

// c_n -> exp(-i t (omega n + kappa n (n-1) / 2)) c_n
FockVector quantum_evolve_fock(const FockVector& state, const KerrParams& params, double t);

// Classical Kerr flow; with `co_rotating` the free rotation e^{-i omega t} is removed.
FlowMap flow_map(const KerrParams& params, bool co_rotating = false);

// H(alpha) = omega |alpha|^2 + (kappa/2) |alpha|^4 (hbar = 1) with analytic gradient.
HamiltonianModel model(const KerrParams& params);

// One term Omega_{k,l} a^dag^k a^l of a normally ordered operator (or its
// symbol Omega_{k,l} conj(alpha)^k alpha^l).
struct NormalOrderedTerm {
  int k = 0;
  int l = 0;
  double coefficient = 0.0;
};

std::vector<NormalOrderedTerm> hamiltonian_terms(const KerrParams& params);  // in units of hbar
// d/d(conj alpha) of the classical symbol, term by term: k Omega_{k,l} conj(alpha)^{k-1} alpha^l.
std::vector<NormalOrderedTerm> classical_vector_field(const std::vector<NormalOrderedTerm>& h);
// [a, H] / hbar using [a, a^dag^k] = k a^dag^{k-1}, in normal order.
std::vector<NormalOrderedTerm> heisenberg_vector_field(const std::vector<NormalOrderedTerm>& h);
cplx evaluate_symbol(const std::vector<NormalOrderedTerm>& terms, cplx alpha);

enum class Dynamics { classical, quantum };

struct CoherentInitial {
  cplx alpha0{3.0, 0.0};
};
struct CatInitial {
  cplx alpha1, alpha2;
  int rel_sign = -1;
};
using InitialState = std::variant<CoherentInitial, CatInitial>;

struct PanelSpec {
  InitialState initial = CoherentInitial{};
  Dynamics dynamics = Dynamics::classical;
  double time = 0.0;
  bool co_rotating = true;
  std::size_t trajectory_samples = 256;
  std::size_t cutoff = 60;

  // Two letters: initial state class then dynamics class, C or Q.
  std::string label() const;
};

// The superposition |3e^{-i pi/4}> - |3e^{i pi/4}>.
CatInitial reference_cat();
PanelSpec make_panel(const std::string& label, const KerrParams& params, double time);

struct PanelResult {
  WignerGrid grid;
  std::vector<double> times;
  std::vector<cplx> mean;  // <a>, times e^{i omega t} in the co-rotating frame
};

PanelResult render_panel(const PanelSpec& spec, const KerrParams& params, const GridGeometry& geometry);

}  // namespace clevo::kerr
