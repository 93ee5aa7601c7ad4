#include "clevo/kerr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>

#include "clevo/errors.hpp"

namespace clevo::kerr {

KerrParams::KerrParams(double omega, double kappa) : omega_(omega), kappa_(kappa), chi_(kappa / omega) {
  if (!(omega > 0) || !std::isfinite(omega)) throw InvalidArgument("Kerr omega must be positive and finite");
  if (!(kappa >= 0) || !std::isfinite(kappa)) throw InvalidArgument("Kerr kappa must be non-negative and finite");
}

cplx classical_flow(cplx alpha0, const KerrParams& params, double t) {
  return std::polar(1.0, -t * (params.omega() + params.kappa() * std::norm(alpha0))) * alpha0;
}

cplx classical_flow_inverse(cplx alpha, const KerrParams& params, double t) {
  return std::polar(1.0, t * (params.omega() + params.kappa() * std::norm(alpha))) * alpha;
}

cplx quantum_mean_coherent(cplx alpha0, const KerrParams& params, double t) {
  const cplx exponent = cplx(0.0, -params.omega() * t) + (std::polar(1.0, -params.kappa() * t) - 1.0) * std::norm(alpha0);
  return std::exp(exponent) * alpha0;
}

FockVector quantum_evolve_fock(const FockVector& state, const KerrParams& params, double t) {
  std::vector<cplx> c = state.coeffs();
  for (std::size_t n = 0; n < c.size(); ++n) {
    const double nn = double(n);
    const double phase = -(params.omega() * t * nn + 0.5 * params.kappa() * t * nn * (nn - 1.0));
    c[n] *= std::polar(1.0, phase);
  }
  return FockVector(std::move(c), false);
}

FlowMap flow_map(const KerrParams& params, bool co_rotating) {
  const double omega = co_rotating ? 0.0 : params.omega();
  const double kappa = params.kappa();
  FlowMap f;
  f.forward = [omega, kappa](cplx a, double t) { return std::polar(1.0, -t * (omega + kappa * std::norm(a))) * a; };
  f.inverse = [omega, kappa](cplx a, double t) { return std::polar(1.0, t * (omega + kappa * std::norm(a))) * a; };
  return f;
}

HamiltonianModel model(const KerrParams& params) {
  HamiltonianModel m;
  m.name = "kerr";
  const double omega = params.omega();
  const double kappa = params.kappa();
  m.energy = [omega, kappa](std::span<const cplx> z) {
    const double n = std::norm(z[0]);
    return omega * n + 0.5 * kappa * n * n;
  };
  m.gradient = [omega, kappa](std::span<const cplx> z, std::span<cplx> g) {
    g[0] = (omega + kappa * std::norm(z[0])) * z[0];
  };
  return m;
}

std::vector<NormalOrderedTerm> hamiltonian_terms(const KerrParams& params) {
  return {{1, 1, params.omega()}, {2, 2, 0.5 * params.kappa()}};
}

namespace {

std::vector<NormalOrderedTerm> lower_creation_power(const std::vector<NormalOrderedTerm>& h) {
  std::map<std::pair<int, int>, double> acc;
  for (const auto& t : h) {
    if (t.k == 0) continue;
    acc[{t.k - 1, t.l}] += t.k * t.coefficient;
  }
  std::vector<NormalOrderedTerm> out;
  for (const auto& [kl, c] : acc) out.push_back({kl.first, kl.second, c});
  return out;
}

}  // namespace

std::vector<NormalOrderedTerm> classical_vector_field(const std::vector<NormalOrderedTerm>& h) {
  return lower_creation_power(h);
}

std::vector<NormalOrderedTerm> heisenberg_vector_field(const std::vector<NormalOrderedTerm>& h) {
  // [a, a^dag^k a^l] = k a^dag^{k-1} a^l, already normally ordered.
  return lower_creation_power(h);
}

cplx evaluate_symbol(const std::vector<NormalOrderedTerm>& terms, cplx alpha) {
  cplx s{0, 0};
  for (const auto& t : terms) s += t.coefficient * std::pow(std::conj(alpha), t.k) * std::pow(alpha, t.l);
  return s;
}

std::string PanelSpec::label() const {
  std::string s;
  s += std::holds_alternative<CoherentInitial>(initial) ? 'C' : 'Q';
  s += dynamics == Dynamics::classical ? 'C' : 'Q';
  return s;
}

CatInitial reference_cat() {
  return {std::polar(3.0, -std::numbers::pi / 4), std::polar(3.0, std::numbers::pi / 4), -1};
}

PanelSpec make_panel(const std::string& label, const KerrParams&, double time) {
  std::string up = label;
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (up.size() != 2 || (up[0] != 'C' && up[0] != 'Q') || (up[1] != 'C' && up[1] != 'Q'))
    throw InvalidArgument("panel label must be one of CC, QC, CQ, QQ");
  PanelSpec spec;
  spec.initial = up[0] == 'C' ? InitialState{CoherentInitial{}} : InitialState{reference_cat()};
  spec.dynamics = up[1] == 'C' ? Dynamics::classical : Dynamics::quantum;
  spec.time = time;
  return spec;
}

namespace {

InitialWigner to_wigner(const InitialState& s) {
  if (const auto* c = std::get_if<CoherentInitial>(&s)) return CoherentWigner{c->alpha0};
  const auto& cat = std::get<CatInitial>(s);
  return CatWigner{cat.alpha1, cat.alpha2, cat.rel_sign};
}

// Mean of a classically transported distribution, integral Phi_t(b) W_0(b) d^2b
// over the window (change of variables; the Kerr flow preserves area).
std::vector<cplx> transported_means(const InitialWigner& w0, const FlowMap& flow, std::span<const double> times,
                                    const GridGeometry& g) {
  std::vector<double> weights(g.nx * g.np);
  std::vector<cplx> nodes(g.nx * g.np);
  double norm = 0.0;
  for (std::size_t i = 0; i < g.nx; ++i) {
    for (std::size_t j = 0; j < g.np; ++j) {
      const double tw = ((i == 0 || i + 1 == g.nx) ? 0.5 : 1.0) * ((j == 0 || j + 1 == g.np) ? 0.5 : 1.0);
      const cplx b(g.x(i), g.p(j));
      nodes[i * g.np + j] = b;
      weights[i * g.np + j] = tw * evaluate(w0, b);
      norm += weights[i * g.np + j];
    }
  }
  std::vector<cplx> out(times.size());
  const long long count = static_cast<long long>(times.size());
#pragma omp parallel for schedule(static)
  for (long long s = 0; s < count; ++s) {
    cplx acc{0, 0};
    for (std::size_t q = 0; q < nodes.size(); ++q) acc += weights[q] * flow.forward(nodes[q], times[s]);
    out[static_cast<std::size_t>(s)] = acc / norm;
  }
  return out;
}

}  // namespace

PanelResult render_panel(const PanelSpec& spec, const KerrParams& params, const GridGeometry& geometry) {
  geometry.validate();
  if (!std::isfinite(spec.time) || spec.time < 0) throw InvalidArgument("panel time must be finite and >= 0");
  const InitialWigner w0 = to_wigner(spec.initial);
  const double t = spec.time;

  const std::size_t samples = spec.time > 0 ? std::max<std::size_t>(spec.trajectory_samples, 2) : 1;
  std::vector<double> times(samples);
  for (std::size_t s = 0; s < samples; ++s) times[s] = samples == 1 ? 0.0 : t * double(s) / double(samples - 1);
  times.back() = t;

  auto frame = [&](double tt) { return spec.co_rotating ? std::polar(1.0, params.omega() * tt) : cplx(1.0, 0.0); };

  std::optional<WignerGrid> grid;
  std::vector<cplx> mean(samples);
  if (spec.dynamics == Dynamics::classical) {
    const FlowMap flow = flow_map(params, spec.co_rotating);
    grid = wigner_pullback(w0, flow, t, geometry);
    if (const auto* c = std::get_if<CoherentInitial>(&spec.initial)) {
      for (std::size_t s = 0; s < samples; ++s) mean[s] = classical_flow(c->alpha0, params, times[s]) * frame(times[s]);
    } else {
      const FlowMap lab = flow_map(params, false);
      mean = transported_means(w0, lab, times, geometry);
      for (std::size_t s = 0; s < samples; ++s) mean[s] *= frame(times[s]);
    }
  } else {
    const FockVector psi0 = to_fock(w0, spec.cutoff);
    FockVector psi_t = quantum_evolve_fock(psi0, params, t);
    if (spec.co_rotating) {
      // e^{i omega t n} rotates the Wigner function by +omega t.
      std::vector<cplx> c = psi_t.coeffs();
      for (std::size_t n = 0; n < c.size(); ++n) c[n] *= std::polar(1.0, params.omega() * t * double(n));
      psi_t = FockVector(std::move(c), false);
    }
    grid = wigner_of_density(FockDensity::pure(psi_t), geometry);
    if (const auto* c = std::get_if<CoherentInitial>(&spec.initial)) {
      for (std::size_t s = 0; s < samples; ++s)
        mean[s] = quantum_mean_coherent(c->alpha0, params, times[s]) * frame(times[s]);
    } else {
      for (std::size_t s = 0; s < samples; ++s)
        mean[s] = quantum_evolve_fock(psi0, params, times[s]).mean_annihilation() * frame(times[s]);
    }
  }
  return PanelResult{std::move(*grid), std::move(times), std::move(mean)};
}

}  // namespace clevo::kerr
