#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "clevo/errors.hpp"
#include "clevo/kerr.hpp"

using namespace clevo;
using namespace clevo::kerr;

TEST_SUITE("kerr") {
  TEST_CASE("classical flow conserves |alpha| and inverts") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-4.0, 4.0), tt(0.0, 40.0);
    const KerrParams p(1.0, 0.1);
    for (int i = 0; i < 200; ++i) {
      const cplx a(u(rng), u(rng));
      const double t = tt(rng);
      const cplx b = classical_flow(a, p, t);
      CHECK(std::abs(std::abs(b) - std::abs(a)) < 1e-12);
      CHECK(std::abs(classical_flow_inverse(b, p, t) - a) < 1e-11);
    }
  }

  TEST_CASE("classical flow solves the constrained equation of motion") {
    const KerrParams p(1.0, 0.3);
    const ClassicalParameter z0({cplx(1.5, -0.5)});
    std::vector<double> ts{0.0, 0.7, 2.0, 6.0};
    const auto rec = evolve_constrained(model(p), z0, ts);
    for (std::size_t i = 0; i < ts.size(); ++i)
      CHECK(std::abs(rec.states[i][0] - classical_flow(z0[0], p, ts[i])) < 1e-9);
  }

  TEST_CASE("Fock evolution reproduces the quantum mean") {
    const KerrParams p(1.0, 0.1);
    const cplx a0(3.0, 0.0);
    const auto psi0 = coherent_fock(a0, 60);
    for (double kt : {0.05, 0.1, 0.5, 1.0, 2.0, std::numbers::pi / 2, 5.0, 2 * std::numbers::pi}) {
      const double t = kt / p.kappa();
      CHECK(std::abs(quantum_evolve_fock(psi0, p, t).mean_annihilation() - quantum_mean_coherent(a0, p, t)) < 1e-8);
    }
  }

  TEST_CASE("quantum and classical means agree to second order at small times") {
    const KerrParams p(1.0, 0.1);
    const cplx a0(3.0, 0.0);
    auto gap = [&](double kt) {
      const double t = kt / p.kappa();
      return std::abs(classical_flow(a0, p, t) - quantum_mean_coherent(a0, p, t));
    };
    // Leading term |a0|^3 (kappa t)^2 / 2.
    CHECK(gap(1e-4) / (13.5 * 1e-8) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(gap(1e-3) / gap(1e-4) == doctest::Approx(100.0).epsilon(1e-2));
  }

  TEST_CASE("state revives at kappa t = 2 pi") {
    const KerrParams p(1.3, 0.25);
    const auto psi0 = coherent_fock(cplx(2.0, 1.0), 60);
    const double t = 2 * std::numbers::pi / p.kappa();
    auto psi = quantum_evolve_fock(psi0, p, t);
    std::vector<cplx> c = psi.coeffs();
    for (std::size_t n = 0; n < c.size(); ++n) c[n] *= std::exp(cplx(0.0, p.omega() * t * double(n)));
    CHECK(std::norm(psi0.inner(FockVector(c))) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("classical and Heisenberg vector fields share one symbol") {
    const KerrParams p(1.0, 0.1);
    const auto h = hamiltonian_terms(p);
    const auto cl = classical_vector_field(h);
    const auto qu = heisenberg_vector_field(h);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 100; ++i) {
      const cplx a(u(rng), u(rng));
      const cplx ref = (p.omega() + p.kappa() * std::norm(a)) * a;
      CHECK(std::abs(evaluate_symbol(cl, a) - ref) < 1e-12);
      CHECK(std::abs(evaluate_symbol(qu, a) - ref) < 1e-12);
    }
  }

  TEST_CASE("energy symbol matches the model") {
    const KerrParams p(0.7, 0.4);
    const auto m = model(p);
    const cplx a(1.1, -0.3);
    const std::vector<cplx> z{a};
    CHECK(m.energy(z) == doctest::Approx(evaluate_symbol(hamiltonian_terms(p), a).real()));
  }

  TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(KerrParams(0.0, 0.1), InvalidArgument);
    CHECK_THROWS_AS(KerrParams(1.0, -0.1), InvalidArgument);
    CHECK(KerrParams(2.0, 0.5).chi() == 0.25);
    CHECK_THROWS_AS(make_panel("XQ", KerrParams(1.0, 0.1), 1.0), InvalidArgument);
    CHECK(make_panel("qc", KerrParams(1.0, 0.1), 1.0).label() == "QC");
  }

  TEST_CASE("panels at t = 0 agree between classical and quantum dynamics") {
    const KerrParams p(1.0, 0.1);
    GridGeometry g;
    g.nx = g.np = 81;
    for (const char* init : {"C", "Q"}) {
      const auto c = render_panel(make_panel(std::string(init) + "C", p, 0.0), p, g);
      const auto q = render_panel(make_panel(std::string(init) + "Q", p, 0.0), p, g);
      double worst = 0.0;
      for (std::size_t k = 0; k < c.grid.values().size(); ++k)
        worst = std::max(worst, std::abs(c.grid.values()[k] - q.grid.values()[k]));
      CHECK(worst < 1e-8);
      REQUIRE(c.mean.size() == 1);
      CHECK(std::abs(c.mean[0] - q.mean[0]) < 1e-8);
    }
  }

  TEST_CASE("reference panels: sign structure and normalization") {
    const KerrParams p(1.0, 0.1);
    GridGeometry g;
    g.nx = g.np = 151;
    const double t = std::numbers::pi / p.kappa();
    const auto cc = render_panel(make_panel("CC", p, t), p, g);
    const auto cq = render_panel(make_panel("CQ", p, t), p, g);
    CHECK(cc.grid.min() >= -1e-9);
    CHECK(cq.grid.min() < -0.01 * kWignerBound);
    CHECK(std::abs(cq.grid.integral() - 1.0) < 1e-3);
    // Quantum mean at kappa t = pi: exp(-2 |alpha|^2) alpha0 in the co-rotating frame.
    CHECK(std::abs(cq.mean.back() - std::exp(-18.0) * 3.0) < 1e-9);
    // Classical mean of a transported Gaussian decays but stays a real rotation average.
    CHECK(std::abs(cc.mean.front() - cplx(3.0, 0.0)) < 1e-6);
  }
}
