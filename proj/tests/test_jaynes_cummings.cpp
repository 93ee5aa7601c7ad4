#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "clevo/errors.hpp"
#include "clevo/jaynes_cummings.hpp"

using namespace clevo;
using namespace clevo::jc;

namespace {

double quarter_period_oracle() {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 61>::integrate(
      [](double th) { return 1.0 / std::sqrt(1.0 + std::sin(th) * std::sin(th)); }, 0.0, std::numbers::pi / 2, 15,
      1e-15);
}

std::vector<double> grid(double kt_max, std::size_t n, double kappa) {
  std::vector<double> ts(n);
  for (std::size_t i = 0; i < n; ++i) ts[i] = kt_max * double(i) / double(n - 1) / kappa;
  return ts;
}

double state_distance(const SemiClassicalState& a, const SemiClassicalState& b) {
  return std::max({std::abs(a.alpha - b.alpha), std::abs(a.g - b.g), std::abs(a.e - b.e)});
}

}  // namespace

TEST_SUITE("jaynes_cummings") {
  TEST_CASE("quarter period against quadrature") {
    const double k = theta_quarter_period();
    CHECK(std::abs(k - quarter_period_oracle()) < 1e-10);
    CHECK(std::abs(jacobi_theta(k) - std::numbers::pi / 2) < 1e-10);
    CHECK(std::round(std::numbers::pi / (2 * k) * 1e6) / 1e6 == doctest::Approx(1.198140).epsilon(1e-12));
  }

  TEST_CASE("theta solves its differential equation and is odd") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-8.0, 8.0);
    const double h = 1e-4;
    for (int i = 0; i < 100; ++i) {
      const double x = u(rng);
      const double th = jacobi_theta(x);
      const double d = (jacobi_theta(x + h) - jacobi_theta(x - h)) / (2 * h);
      CHECK(std::abs(d - std::sqrt(1.0 + std::sin(th) * std::sin(th))) < 1e-6);
      CHECK(std::abs(jacobi_theta(-x) + th) < 1e-12);
    }
    CHECK(jacobi_theta(0.0) == 0.0);
  }

  TEST_CASE("batch theta equals scalar theta") {
    std::vector<double> xs{3.0, -1.0, 0.0, 7.5, 0.25, -6.0};
    const auto batch = jacobi_theta(xs);
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(std::abs(batch[i] - jacobi_theta(xs[i])) < 1e-10);
  }

  TEST_CASE("initial state: vacuum field and balanced atom") {
    const JCParams p(10.0, 1.0);
    const auto s = analytic_semiclassical(0.0, p);
    CHECK(std::abs(s.alpha) == 0.0);
    CHECK(std::abs(s.g - (1.0 / std::numbers::sqrt2)) < 1e-15);
    CHECK(std::abs(s.e - (1.0 / std::numbers::sqrt2)) < 1e-15);
  }

  TEST_CASE("closed form satisfies the semi-classical equations") {
    const JCParams p(10.0, 1.0);
    const auto m = model(p);
    const double h = 1e-5;
    for (double t : {0.3, 1.0, 2.5, 7.0}) {
      const auto s = analytic_semiclassical(t, p);
      const auto sp = analytic_semiclassical(t + h, p);
      const auto sm = analytic_semiclassical(t - h, p);
      const std::vector<cplx> z{s.alpha, s.g, s.e};
      std::vector<cplx> g(3);
      m.gradient(z, g);
      const cplx da = (sp.alpha - sm.alpha) / (2 * h), dg = (sp.g - sm.g) / (2 * h), de = (sp.e - sm.e) / (2 * h);
      CHECK(std::abs(cplx(0, 1) * da - g[0]) < 1e-6);
      CHECK(std::abs(cplx(0, 1) * dg - g[1]) < 1e-6);
      CHECK(std::abs(cplx(0, 1) * de - g[2]) < 1e-6);
    }
  }

  TEST_CASE("integrated trajectory matches the closed form") {
    for (double omega : {0.5, 1.0, 10.0}) {
      const JCParams p(omega, 1.0);
      const auto ts = grid(10.0, 401, 1.0);
      const auto traj = integrate_semiclassical(reference_initial_state(), p, ts);
      const auto exact = analytic_semiclassical(ts, p);
      double worst = 0.0;
      for (std::size_t i = 0; i < ts.size(); ++i) worst = std::max(worst, state_distance(traj.states[i], exact[i]));
      CHECK(worst < 1e-6);
      CHECK(traj.norm_drift < 1e-9);
      CHECK(traj.excitation_drift < 1e-9);
      CHECK(traj.energy_drift < 1e-8);
    }
  }

  TEST_CASE("excitation is conserved from random initial states") {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> nd(0.0, 1.0);
    const JCParams p(2.0, 0.7);
    for (int trial = 0; trial < 20; ++trial) {
      SemiClassicalState s{{nd(rng), nd(rng)}, {nd(rng), nd(rng)}, {nd(rng), nd(rng)}};
      const double n = s.atom_norm();
      s.g /= n;
      s.e /= n;
      const auto traj = integrate_semiclassical(s, p, grid(5.0, 11, 0.7));
      CHECK(traj.excitation_drift < 1e-9);
    }
  }

  TEST_CASE("exact solution solves the Schrodinger equation") {
    const JCParams p(10.0, 1.0);
    for (double t : {0.0, 0.4, 1.3, 2.9, 9.0}) CHECK(schrodinger_residual(t, p) < 1e-6);
    const auto psi = exact_quantum_solution(0.0, p);
    CHECK(std::abs(psi(0, kGround) - (1.0 / std::numbers::sqrt2)) < 1e-15);
    CHECK(std::abs(psi(0, kExcited) - (1.0 / std::numbers::sqrt2)) < 1e-15);
  }

  TEST_CASE("truncated Hamiltonian is Hermitian") {
    const JCParams p(3.0, 0.8);
    std::mt19937_64 rng(6);
    std::normal_distribution<double> nd(0.0, 1.0);
    auto rnd = [&] {
      Eigen::MatrixXcd m(4, 2);
      for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = {nd(rng), nd(rng)};
      return m;
    };
    for (int i = 0; i < 20; ++i) {
      const auto x = rnd(), y = rnd();
      const cplx lhs = (x.conjugate().cwiseProduct(apply_hamiltonian(y, p))).sum();
      const cplx rhs = (apply_hamiltonian(x, p).conjugate().cwiseProduct(y)).sum();
      CHECK(std::abs(lhs - rhs) < 1e-12);
    }
  }

  TEST_CASE("entanglement entropy against the reduced-state spectrum") {
    const JCParams p(10.0, 1.0);
    for (double kt : {0.1, 0.5, std::numbers::pi / 4, 1.2, 2.0, 3.0}) {
      const auto psi = exact_quantum_solution(kt, p);
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(psi.reduced_atom());
      double s = 0.0;
      for (int i = 0; i < 2; ++i) {
        const double l = es.eigenvalues()(i);
        if (l > 1e-300) s -= l * std::log2(l);
      }
      CHECK(std::abs(entanglement_entropy(psi) - s) < 1e-10);
    }
    CHECK(entanglement_entropy(exact_quantum_solution(0.0, p)) < 1e-10);
    CHECK(entanglement_entropy(exact_quantum_solution(std::numbers::pi, p)) < 1e-10);
    CHECK(entanglement_entropy(exact_quantum_solution(std::numbers::pi / 4, p)) > 0.1);
  }

  TEST_CASE("quantum excitation is conserved") {
    const JCParams p(10.0, 1.0);
    const double n0 = exact_quantum_solution(0.0, p).excitation();
    for (double t : {0.5, 1.5, 4.0}) CHECK(std::abs(exact_quantum_solution(t, p).excitation() - n0) < 1e-12);
  }

  TEST_CASE("joint state validation") {
    Eigen::MatrixXcd amp = Eigen::MatrixXcd::Zero(3, 2);
    amp(0, 0) = 1.0;
    amp(1, 1) = 1.0;
    CHECK_THROWS_AS(JointFockAtomState{amp}, InvalidArgument);
    CHECK_THROWS_AS(JCParams(1.0, -1.0), InvalidArgument);
  }
}
