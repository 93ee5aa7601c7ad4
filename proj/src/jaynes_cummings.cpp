#include "clevo/jaynes_cummings.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "clevo/errors.hpp"

namespace clevo::jc {

JCParams::JCParams(double omega, double kappa) : omega_(omega), kappa_(kappa) {
  if (!(omega > 0) || !std::isfinite(omega)) throw InvalidArgument("JC omega must be positive and finite");
  if (!(kappa >= 0) || !std::isfinite(kappa)) throw InvalidArgument("JC kappa must be non-negative and finite");
}

SemiClassicalState reference_initial_state() {
  const double h = 1.0 / std::numbers::sqrt2;
  return {cplx(0.0, 0.0), cplx(h, 0.0), cplx(h, 0.0)};
}

ClassicalParameter to_parameter(const SemiClassicalState& s) {
  return ClassicalParameter({s.alpha, s.g, s.e}, {"coherent amplitude", "atom ket component g", "atom ket component e"},
                            {NormalizedGroup{1, 2}});
}

SemiClassicalState from_parameter(const ClassicalParameter& zeta) {
  if (zeta.dimension() != 3) throw InvalidArgument("semi-classical JC parameter has dimension 3");
  return {zeta[0], zeta[1], zeta[2]};
}

HamiltonianModel model(const JCParams& params) {
  const double w = params.omega();
  const double k = params.kappa();
  HamiltonianModel m;
  m.name = "jaynes-cummings";
  m.energy = [w, k](std::span<const cplx> z) {
    const cplx a = z[0], g = z[1], e = z[2];
    const cplx coupling = cplx(0.0, k) * a * std::conj(e) * g;
    return w * std::norm(a) + w * std::norm(e) + 2.0 * coupling.real();
  };
  m.gradient = [w, k](std::span<const cplx> z, std::span<cplx> grad) {
    const cplx a = z[0], g = z[1], e = z[2];
    const cplx ik(0.0, k);
    grad[0] = w * a - ik * std::conj(g) * e;
    grad[1] = -ik * std::conj(a) * e;
    grad[2] = w * e + ik * a * g;
  };
  return m;
}

SemiClassicalTrajectory integrate_semiclassical(const SemiClassicalState& s0, const JCParams& params,
                                                std::span<const double> t_grid, const EvolveOptions& opts) {
  const auto rec = evolve_constrained(model(params), to_parameter(s0), t_grid, opts);
  SemiClassicalTrajectory out;
  out.times = rec.times;
  out.energy_drift = rec.energy_drift;
  out.norm_drift = rec.norm_drift;
  out.step_stats = rec.step_stats;
  out.states.reserve(rec.states.size());
  const double n0 = s0.excitation();
  for (const auto& z : rec.states) {
    out.states.push_back(from_parameter(z));
    out.excitation_drift = std::max(out.excitation_drift, std::abs(out.states.back().excitation() - n0));
  }
  return out;
}

std::vector<double> jacobi_theta(std::span<const double> xs) {
  std::vector<double> out(xs.size(), 0.0);
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  for (double x : xs) {
    if (!std::isfinite(x)) throw InvalidArgument("jacobi_theta argument must be finite");
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return std::abs(xs[a]) < std::abs(xs[b]); });

  // Distinct |x| values, starting at 0.
  std::vector<double> grid{0.0};
  std::vector<std::size_t> slot(xs.size());
  for (std::size_t idx : order) {
    const double ax = std::abs(xs[idx]);
    if (ax > grid.back()) grid.push_back(ax);
    slot[idx] = grid.size() - 1;
  }
  std::vector<double> values(grid.size(), 0.0);
  if (grid.size() > 1) {
    ode::Options opt;
    opt.rtol = 1e-13;
    opt.atol = 1e-15;
    double y0 = 0.0;
    ode::integrate(
        [](double, std::span<const double> y, std::span<double> dy) {
          const double s = std::sin(y[0]);
          dy[0] = std::sqrt(1.0 + s * s);
        },
        std::span<double>(&y0, 1), grid, [&](std::size_t i, double, std::span<const double> y) { values[i] = y[0]; },
        opt);
  }
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = std::copysign(values[slot[i]], xs[i]);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] == 0.0) out[i] = 0.0;
  }
  return out;
}

double jacobi_theta(double x) {
  const double xs[1] = {x};
  return jacobi_theta(std::span<const double>(xs, 1)).front();
}

double theta_quarter_period() {
  static const double quarter = [] {
    // Newton on theta(x) = pi/2 with theta'(x) = sqrt(1 + sin^2 theta).
    double x = std::numbers::pi / 2 / 1.2;
    for (int it = 0; it < 50; ++it) {
      const double th = jacobi_theta(x);
      const double s = std::sin(th);
      const double dx = (th - std::numbers::pi / 2) / std::sqrt(1.0 + s * s);
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    return x;
  }();
  return quarter;
}

std::vector<SemiClassicalState> analytic_semiclassical(std::span<const double> times, const JCParams& params) {
  std::vector<double> xs(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) xs[i] = params.kappa() * times[i] / std::numbers::sqrt2;
  const auto theta = jacobi_theta(xs);
  std::vector<SemiClassicalState> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double s = std::sin(theta[i]);
    const double c = std::cos(theta[i]);
    const cplx rot = std::polar(1.0, -params.omega() * times[i]);
    out[i].alpha = -rot * s / std::numbers::sqrt2;
    out[i].g = std::sqrt(1.0 + s * s) / std::numbers::sqrt2;
    out[i].e = rot * c / std::numbers::sqrt2;
  }
  return out;
}

SemiClassicalState analytic_semiclassical(double t, const JCParams& params) {
  const double ts[1] = {t};
  return analytic_semiclassical(std::span<const double>(ts, 1), params).front();
}

JointFockAtomState::JointFockAtomState(Eigen::MatrixXcd amplitudes) : amp_(std::move(amplitudes)) {
  if (amp_.rows() < 1 || amp_.cols() != 2) throw InvalidArgument("joint state needs (cutoff+1) x 2 amplitudes");
  if (std::abs(amp_.squaredNorm() - 1.0) > 1e-10) throw InvalidArgument("joint state is not normalized");
}

cplx JointFockAtomState::mean_field() const {
  cplx acc{0, 0};
  for (Eigen::Index n = 0; n + 1 < amp_.rows(); ++n) {
    for (int l = 0; l < 2; ++l) acc += std::sqrt(double(n + 1)) * std::conj(amp_(n, l)) * amp_(n + 1, l);
  }
  return acc;
}

double JointFockAtomState::excitation() const {
  double s = 0.0;
  for (Eigen::Index n = 0; n < amp_.rows(); ++n) s += double(n) * amp_.row(n).squaredNorm();
  return s + amp_.col(kExcited).squaredNorm();
}

Eigen::Matrix2cd JointFockAtomState::reduced_atom() const { return (amp_.adjoint() * amp_).transpose(); }

JointFockAtomState exact_quantum_solution(double t, const JCParams& params, std::size_t cutoff) {
  if (cutoff < 1) throw InvalidArgument("exact solution needs cutoff >= 1");
  Eigen::MatrixXcd amp = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(cutoff + 1), 2);
  const cplx rot = std::polar(1.0, -params.omega() * t);
  const double kt = params.kappa() * t;
  amp(0, kGround) = 1.0 / std::numbers::sqrt2;
  amp(1, kGround) = -rot * std::sin(kt) / std::numbers::sqrt2;
  amp(0, kExcited) = rot * std::cos(kt) / std::numbers::sqrt2;
  return JointFockAtomState(std::move(amp));
}

Eigen::MatrixXcd apply_hamiltonian(const Eigen::MatrixXcd& psi, const JCParams& params) {
  const double w = params.omega();
  const double k = params.kappa();
  const Eigen::Index rows = psi.rows();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rows, 2);
  for (Eigen::Index n = 0; n < rows; ++n) {
    const double nn = double(n);
    out(n, kGround) += w * nn * psi(n, kGround);
    out(n, kExcited) += (w * nn + w) * psi(n, kExcited);
    // -i kappa a^dag |g><e| : |n-1, e> -> sqrt(n) |n, g>
    if (n >= 1) out(n, kGround) += cplx(0.0, -k) * std::sqrt(nn) * psi(n - 1, kExcited);
    // +i kappa a |e><g| : |n+1, g> -> sqrt(n+1) |n, e>
    if (n + 1 < rows) out(n, kExcited) += cplx(0.0, k) * std::sqrt(nn + 1.0) * psi(n + 1, kGround);
  }
  return out;
}

double schrodinger_residual(double t, const JCParams& params, double h) {
  const auto plus = exact_quantum_solution(t + h, params).amplitudes();
  const auto minus = exact_quantum_solution(t - h, params).amplitudes();
  const auto here = exact_quantum_solution(t, params).amplitudes();
  const Eigen::MatrixXcd lhs = cplx(0.0, 1.0) * (plus - minus) / (2.0 * h);
  return (lhs - apply_hamiltonian(here, params)).norm();
}

double entanglement_entropy(const JointFockAtomState& state) {
  const auto& c = state.amplitudes();
  const double trace = c.squaredNorm();
  // det(rho_A) by the Cauchy–Binet sum, free of cancellation near product states.
  double det = 0.0;
  for (Eigen::Index n = 0; n < c.rows(); ++n) {
    for (Eigen::Index m = n + 1; m < c.rows(); ++m)
      det += std::norm(c(n, kGround) * c(m, kExcited) - c(m, kGround) * c(n, kExcited));
  }
  const double disc = std::sqrt(std::max(0.0, trace * trace - 4.0 * det));
  const double lmax = 0.5 * (trace + disc) / trace;
  const double lmin = (det / trace) / (0.5 * (trace + disc));
  double s = 0.0;
  for (double l : {lmax, lmin}) {
    if (l > 0.0) s -= l * std::log2(l);
  }
  return s;
}

}  // namespace clevo::jc
