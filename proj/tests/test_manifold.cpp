#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "clevo/errors.hpp"
#include "clevo/jaynes_cummings.hpp"
#include "clevo/kerr.hpp"
#include "clevo/manifold.hpp"

using namespace clevo;

namespace {

std::vector<cplx> random_vector(std::mt19937_64& rng, std::size_t n, double scale) {
  std::normal_distribution<double> nd(0.0, scale);
  std::vector<cplx> v(n);
  for (auto& z : v) z = {nd(rng), nd(rng)};
  return v;
}

Eigen::MatrixXcd to_matrix(const std::vector<cplx>& row_major, std::size_t dim) {
  Eigen::MatrixXcd m(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) m(i, j) = row_major[i * dim + j];
  return m;
}

std::vector<cplx> random_hermitian(std::mt19937_64& rng, std::size_t dim) {
  auto a = random_vector(rng, dim * dim, 1.0);
  std::vector<cplx> h(dim * dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) h[i * dim + j] = 0.5 * (a[i * dim + j] + std::conj(a[j * dim + i]));
  return h;
}

// exp(-i H t) psi through the spectral decomposition.
Eigen::VectorXcd propagate(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& psi, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  Eigen::VectorXcd c = es.eigenvectors().adjoint() * psi;
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::exp(cplx(0.0, -es.eigenvalues()(i) * t));
  return es.eigenvectors() * c;
}

}  // namespace

TEST_SUITE("manifold") {
  TEST_CASE("finite-difference Wirtinger gradient matches analytic gradients") {
    std::mt19937_64 rng(11);
    const auto kerr = kerr::model(kerr::KerrParams(1.3, 0.2));
    const auto jcm = jc::model(jc::JCParams(10.0, 1.0));
    const auto h = random_hermitian(rng, 4);
    const auto sch = schrodinger_model(h, 4);
    double worst = 0.0;
    for (int probe = 0; probe < 150; ++probe) {
      for (const auto* m : {&kerr, &jcm, &sch}) {
        const std::size_t dim = m == &kerr ? 1 : (m == &jcm ? 3 : 4);
        const auto z = random_vector(rng, dim, 1.5);
        const auto fd = wirtinger_gradient(*m, z);
        std::vector<cplx> an(dim);
        m->gradient(z, an);
        for (std::size_t k = 0; k < dim; ++k)
          worst = std::max(worst, std::abs(fd[k] - an[k]) / std::max(1.0, std::abs(an[k])));
      }
    }
    CHECK(worst < 1e-7);
  }

  TEST_CASE("Schrodinger model gradient is H psi") {
    std::mt19937_64 rng(3);
    const auto h = random_hermitian(rng, 5);
    const auto model = schrodinger_model(h, 5);
    const auto psi = random_vector(rng, 5, 1.0);
    std::vector<cplx> g(5);
    model.gradient(psi, g);
    const Eigen::VectorXcd ref = to_matrix(h, 5) * Eigen::Map<const Eigen::VectorXcd>(psi.data(), 5);
    for (int k = 0; k < 5; ++k) CHECK(std::abs(g[k] - ref(k)) < 1e-12);
  }

  TEST_CASE("harmonic evolution is a pure rotation") {
    const auto model = harmonic_model(2.0);
    const ClassicalParameter z0({cplx(1.0, 0.5)}, {"alpha"});
    std::vector<double> ts{0.0, 0.3, 1.0, 4.0};
    const auto rec = evolve_constrained(model, z0, ts);
    for (std::size_t i = 0; i < ts.size(); ++i)
      CHECK(std::abs(rec.states[i][0] - std::exp(cplx(0.0, -2.0 * ts[i])) * z0[0]) < 1e-10);
    CHECK(rec.energy_drift < 1e-10);
  }

  TEST_CASE("hbar scales the evolution rate") {
    const auto model = harmonic_model(1.0, 2.0);  // H = 2 |alpha|^2, rate H / hbar = 1
    const ClassicalParameter z0({cplx(1.0, 0.0)});
    std::vector<double> ts{0.0, 1.0};
    const auto rec = evolve_constrained(model, z0, ts);
    CHECK(std::abs(rec.states[1][0] - std::exp(cplx(0.0, -1.0))) < 1e-10);
  }

  TEST_CASE("Schrodinger recovery on random Hermitian matrices") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 10; ++trial) {
      const std::size_t dim = 2 + trial % 4;
      const auto h = random_hermitian(rng, dim);
      auto psi = random_vector(rng, dim, 1.0);
      Eigen::Map<Eigen::VectorXcd> pv(psi.data(), static_cast<Eigen::Index>(dim));
      pv.normalize();
      const Eigen::VectorXcd psi0 = pv;
      const ClassicalParameter z0(psi, {}, {{0, dim}});
      std::vector<double> ts{0.0, 0.5, 2.0, 5.0};
      const auto rec = evolve_constrained(schrodinger_model(h, dim), z0, ts);
      for (std::size_t i = 0; i < ts.size(); ++i) {
        const auto ref = propagate(to_matrix(h, dim), psi0, ts[i]);
        for (std::size_t k = 0; k < dim; ++k) CHECK(std::abs(rec.states[i][k] - ref(k)) < 1e-8);
      }
      CHECK(rec.norm_drift < 1e-9);
    }
  }

  TEST_CASE("finite-difference models evolve like analytic ones") {
    const auto analytic = kerr::model(kerr::KerrParams(1.0, 0.1));
    auto fd = analytic;
    fd.gradient = nullptr;
    const ClassicalParameter z0({cplx(3.0, 0.0)});
    std::vector<double> ts{0.0, 1.0, 3.0};
    const auto a = evolve_constrained(analytic, z0, ts);
    const auto b = evolve_constrained(fd, z0, ts);
    for (std::size_t i = 0; i < ts.size(); ++i) CHECK(std::abs(a.states[i][0] - b.states[i][0]) < 1e-6);
  }

  TEST_CASE("energy is conserved on random Kerr and JC trajectories") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
      const auto model = kerr::model(kerr::KerrParams(u(rng), u(rng)));
      const ClassicalParameter z0(random_vector(rng, 1, 1.0));
      std::vector<double> ts{0.0, 2.0};
      const auto rec = evolve_constrained(model, z0, ts);
      CHECK(std::abs(rec.energies[1] - rec.energies[0]) <= 1e-8 * std::max(1.0, std::abs(rec.energies[0])));
      CHECK(std::abs(std::abs(rec.states[1][0]) - std::abs(z0[0])) < 1e-9);
    }
  }

  TEST_CASE("non-finite energies are reported with the component") {
    HamiltonianModel bad;
    bad.energy = [](std::span<const cplx> z) { return std::abs(z[1]) > 0.5 ? std::nan("") : std::norm(z[0]); };
    const std::vector<cplx> z{cplx(1.0, 0.0), cplx(0.5, 0.0)};
    try {
      wirtinger_gradient(bad, z);
      FAIL("expected NumericDomainError");
    } catch (const NumericDomainError& e) {
      CHECK(e.component() == 1);
    }
  }

  TEST_CASE("conservation violations raise IntegrationError") {
    // A non-Hermitian "Hamiltonian" gradient breaks norm conservation.
    HamiltonianModel leaky;
    leaky.energy = [](std::span<const cplx> z) { return std::norm(z[0]); };
    leaky.gradient = [](std::span<const cplx> z, std::span<cplx> g) { g[0] = cplx(1.0, -0.5) * z[0]; };
    const ClassicalParameter z0({cplx(1.0, 0.0)}, {}, {{0, 1}});
    std::vector<double> ts{0.0, 5.0};
    CHECK_THROWS_AS(evolve_constrained(leaky, z0, ts), IntegrationError);
    EvolveOptions lax;
    lax.enforce_conservation = false;
    const auto rec = evolve_constrained(leaky, z0, ts, lax);
    CHECK(rec.norm_drift > 0.1);
  }

  TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(ClassicalParameter({cplx(1.0)}, {"a", "b"}), InvalidArgument);
    CHECK_THROWS_AS(ClassicalParameter({cplx(1.0)}, {}, {{0, 2}}), InvalidArgument);
    const ClassicalParameter z({cplx(0.6), cplx(0.8)}, {"g", "e"}, {{0, 2}});
    CHECK(z.norm_defect() < 1e-15);
    CHECK_THROWS_AS(z.with_values({cplx(1.0)}), InvalidArgument);
  }

  TEST_CASE("ensembles evolve member-wise and keep their weights") {
    const auto model = harmonic_model(1.0);
    std::vector<ClassicalParameter> members{ClassicalParameter({cplx(1.0)}), ClassicalParameter({cplx(0.0, 2.0)})};
    const MixedEnsemble ens({0.25, 0.75}, members);
    std::vector<double> ts{0.0, 1.0};
    const auto snaps = evolve_ensemble(model, ens, ts);
    REQUIRE(snaps.size() == 2);
    CHECK(snaps[1].weights()[0] == 0.25);
    const cplx mean = ensemble_expectation(snaps[1], [](const ClassicalParameter& z) { return z[0]; });
    const cplx ref = std::exp(cplx(0.0, -1.0)) * (0.25 * cplx(1.0) + 0.75 * cplx(0.0, 2.0));
    CHECK(std::abs(mean - ref) < 1e-10);
  }

  TEST_CASE("ensemble weight validation") {
    std::vector<ClassicalParameter> members{ClassicalParameter({cplx(1.0)}), ClassicalParameter({cplx(2.0)})};
    CHECK_THROWS_AS(MixedEnsemble({0.5, 0.6}, members), InvalidArgument);
    CHECK_THROWS_AS(MixedEnsemble({-0.5, 1.5}, members), InvalidArgument);
    CHECK_NOTHROW(MixedEnsemble({-0.5, 1.5}, members, true));
    CHECK_THROWS_AS(MixedEnsemble({1.0}, members), InvalidArgument);
  }

  TEST_CASE("a failing member is reported by its lowest index") {
    HamiltonianModel model;
    model.energy = [](std::span<const cplx> z) { return std::norm(z[0]) * std::norm(z[0]); };
    // |alpha|^4 makes large amplitudes spin too fast for the step budget.
    std::vector<ClassicalParameter> members{ClassicalParameter({cplx(0.1)}), ClassicalParameter({cplx(1e3)}),
                                            ClassicalParameter({cplx(2e3)})};
    const MixedEnsemble ens({0.2, 0.3, 0.5}, members);
    EvolveOptions o;
    o.integrator.max_steps = 2000;
    std::vector<double> ts{0.0, 10.0};
    try {
      evolve_ensemble(model, ens, ts, o);
      FAIL("expected EnsembleMemberError");
    } catch (const EnsembleMemberError& e) {
      CHECK(e.member() == 1);
    }
  }
}
