#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "clevo/errors.hpp"
#include "clevo/ode.hpp"

using namespace clevo;

namespace {

// y'' = -w^2 y as a first-order system.
ode::Rhs oscillator(double w) {
  return [w](double, std::span<const double> y, std::span<double> dy) {
    dy[0] = y[1];
    dy[1] = -w * w * y[0];
  };
}

}  // namespace

TEST_SUITE("ode") {
  TEST_CASE("oscillator matches the exact solution at every requested time") {
    std::vector<double> times;
    for (int i = 0; i <= 40; ++i) times.push_back(0.25 * i);
    const double w = 1.7;
    std::vector<double> y{1.0, 0.0};
    std::vector<double> seen;
    double worst = 0.0;
    ode::integrate(oscillator(w), y, times, [&](std::size_t, double t, std::span<const double> s) {
      seen.push_back(t);
      worst = std::max(worst, std::abs(s[0] - std::cos(w * t)));
      worst = std::max(worst, std::abs(s[1] + w * std::sin(w * t)));
    });
    CHECK(seen == times);
    CHECK(worst < 1e-10);
    CHECK(y[0] == doctest::Approx(std::cos(w * 10.0)).epsilon(1e-10));
  }

  TEST_CASE("dense output agrees with grid hitting") {
    std::vector<double> times;
    for (int i = 0; i <= 100; ++i) times.push_back(0.1 * i);
    ode::Options dense;
    dense.sampling = ode::SampleMode::dense_output;
    dense.rtol = 1e-10;
    dense.atol = 1e-12;
    std::vector<double> y{0.0, 1.0};
    double worst = 0.0;
    ode::integrate(oscillator(1.0), y, times, [&](std::size_t, double t, std::span<const double> s) {
      worst = std::max(worst, std::abs(s[0] - std::sin(t)));
    }, dense);
    CHECK(worst < 1e-7);
  }

  TEST_CASE("exponential growth across random grids") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> rate(-2.0, 2.0), gap(0.01, 0.7);
    for (int trial = 0; trial < 50; ++trial) {
      const double k = rate(rng);
      std::vector<double> times{0.0};
      for (int i = 0; i < 8; ++i) times.push_back(times.back() + gap(rng));
      std::vector<double> y{1.0};
      double worst = 0.0;
      ode::integrate([k](double, std::span<const double> s, std::span<double> d) { d[0] = k * s[0]; }, y, times,
                     [&](std::size_t, double t, std::span<const double> s) {
                       worst = std::max(worst, std::abs(s[0] - std::exp(k * t)) / std::exp(k * t));
                     });
      CHECK(worst < 1e-10);
    }
  }

  TEST_CASE("single time only reports the initial state") {
    std::vector<double> y{2.0, 3.0};
    std::vector<double> times{1.5};
    int calls = 0;
    const auto stats = ode::integrate(oscillator(1.0), y, times, [&](std::size_t i, double t, std::span<const double>) {
      ++calls;
      CHECK(i == 0);
      CHECK(t == 1.5);
    });
    CHECK(calls == 1);
    CHECK(stats.accepted == 0);
    CHECK(y[0] == 2.0);
  }

  TEST_CASE("invalid grids are rejected") {
    std::vector<double> y{1.0, 0.0};
    std::vector<double> bad{0.0, 1.0, 1.0};
    CHECK_THROWS_AS(ode::integrate(oscillator(1.0), y, bad, {}), InvalidArgument);
    std::vector<double> empty;
    CHECK_THROWS_AS(ode::integrate(oscillator(1.0), y, empty, {}), InvalidArgument);
  }

  TEST_CASE("step budget exhaustion reports the last good time") {
    std::vector<double> y{1.0, 0.0};
    std::vector<double> times{0.0, 100.0};
    ode::Options o;
    o.max_steps = 10;
    try {
      ode::integrate(oscillator(1.0), y, times, {}, o);
      FAIL("expected IntegrationError");
    } catch (const IntegrationError& e) {
      CHECK(e.last_good_time() > 0.0);
      CHECK(e.last_good_time() < 100.0);
    }
  }

  TEST_CASE("blow-up fails instead of looping") {
    std::vector<double> y{1.0};
    std::vector<double> times{0.0, 2.0};
    // y' = y^2 escapes at t = 1.
    CHECK_THROWS_AS(ode::integrate([](double, std::span<const double> s, std::span<double> d) { d[0] = s[0] * s[0]; },
                                   y, times, {}),
                    IntegrationError);
  }

  TEST_CASE("step hook sees every accepted step") {
    std::vector<double> y{1.0, 0.0};
    std::vector<double> times{0.0, 5.0};
    std::size_t hooks = 0;
    double last = 0.0;
    const auto stats = ode::integrate(oscillator(1.0), y, times, {}, {}, [&](double t, std::span<const double>) {
      CHECK(t > last);
      last = t;
      ++hooks;
    });
    CHECK(hooks == stats.accepted);
    CHECK(last == 5.0);
  }
}
