#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>

namespace clevo::ode {

enum class SampleMode {
  hit_grid,      // steps are clipped so every requested time is a step endpoint
  dense_output,  // free stepping, samples from the 4th-order continuous extension
};

struct Options {
  double rtol = 1e-12;
  double atol = 1e-14;
  double initial_step = 0.0;  // 0 selects the step automatically
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 50'000'000;
  SampleMode sampling = SampleMode::hit_grid;
};

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
};

// dy/dt = f(t, y); implementations write into `dydt`, which has y's length.
using Rhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;
// Called once per requested time, in order, with the sample index.
using Observer = std::function<void(std::size_t index, double t, std::span<const double> y)>;
// Called after every accepted step.
using StepHook = std::function<void(double t, std::span<const double> y)>;

/// Dormand–Prince 5(4) with FSAL and PI-free standard step control.
///
/// `y` holds the state at times[0] on entry and the state at times.back() on
/// return. `times` must be non-empty and strictly increasing. Throws
/// IntegrationError (with the last accepted time) when the step size
/// underflows or max_steps is exhausted.
StepStats integrate(const Rhs& rhs, std::span<double> y, std::span<const double> times,
                    const Observer& observer, const Options& options = {},
                    const StepHook& on_step = {});

}  // namespace clevo::ode
