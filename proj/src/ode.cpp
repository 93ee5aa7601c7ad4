#include "clevo/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "clevo/errors.hpp"

namespace clevo::ode {
namespace {

// Dormand & Prince (1980) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Continuous extension (Hairer, Norsett & Wanner, DOPRI5 "contd5").
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;

class Stepper {
 public:
  Stepper(const Rhs& rhs, std::size_t n, const Options& opt)
      : rhs_(rhs), opt_(opt), k1_(n), k2_(n), k3_(n), k4_(n), k5_(n), k6_(n), k7_(n), tmp_(n), ynew_(n),
        cont_(5 * n) {}

  void eval(double t, std::span<const double> y, std::vector<double>& out) {
    rhs_(t, y, out);
    ++stats.rhs_evaluations;
  }

  double initial_step(double t, std::span<const double> y, double direction_span) {
    // Hairer's starting-step heuristic.
    const std::size_t n = y.size();
    double d0 = 0, d1n = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sc = opt_.atol + opt_.rtol * std::abs(y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      d1n += (k1_[i] / sc) * (k1_[i] / sc);
    }
    d0 = std::sqrt(d0 / n);
    d1n = std::sqrt(d1n / n);
    double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h0 = std::min(h0, direction_span);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h0 * k1_[i];
    eval(t + h0, tmp_, k2_);
    double d2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sc = opt_.atol + opt_.rtol * std::abs(y[i]);
      d2 += ((k2_[i] - k1_[i]) / sc) * ((k2_[i] - k1_[i]) / sc);
    }
    d2 = std::sqrt(d2 / n) / h0;
    const double dmax = std::max(d1n, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 1.0 / 5.0);
    return std::min({100 * h0, h1, direction_span, opt_.max_step});
  }

  // One trial step from (t, y) with size h; k1_ must hold f(t, y). Returns the
  // scaled error norm; the candidate lives in ynew_ and k7_.
  double trial(double t, std::span<const double> y, double h) {
    const std::size_t n = y.size();
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * a21 * k1_[i];
    eval(t + c2 * h, tmp_, k2_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
    eval(t + c3 * h, tmp_, k3_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
    eval(t + c4 * h, tmp_, k4_);
    for (std::size_t i = 0; i < n; ++i)
      tmp_[i] = y[i] + h * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
    eval(t + c5 * h, tmp_, k5_);
    for (std::size_t i = 0; i < n; ++i)
      tmp_[i] = y[i] + h * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] + a65 * k5_[i]);
    eval(t + h, tmp_, k6_);
    for (std::size_t i = 0; i < n; ++i)
      ynew_[i] = y[i] + h * (a71 * k1_[i] + a73 * k3_[i] + a74 * k4_[i] + a75 * k5_[i] + a76 * k6_[i]);
    eval(t + h, ynew_, k7_);

    double err = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ei =
          h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] + e6 * k6_[i] + e7 * k7_[i]);
      const double sc = opt_.atol + opt_.rtol * std::max(std::abs(y[i]), std::abs(ynew_[i]));
      err += (ei / sc) * (ei / sc);
    }
    err = std::sqrt(err / n);
    return std::isfinite(err) ? err : std::numeric_limits<double>::infinity();
  }

  void prepare_dense(std::span<const double> y, double h) {
    const std::size_t n = y.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double dy = ynew_[i] - y[i];
      const double bspl = h * k1_[i] - dy;
      cont_[i] = y[i];
      cont_[n + i] = dy;
      cont_[2 * n + i] = bspl;
      cont_[3 * n + i] = dy - h * k7_[i] - bspl;
      cont_[4 * n + i] =
          h * (d1 * k1_[i] + d3 * k3_[i] + d4 * k4_[i] + d5 * k5_[i] + d6 * k6_[i] + d7 * k7_[i]);
    }
  }

  void dense(double theta, std::span<double> out) const {
    const std::size_t n = out.size();
    const double theta1 = 1.0 - theta;
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = cont_[i] +
               theta * (cont_[n + i] +
                        theta1 * (cont_[2 * n + i] + theta * (cont_[3 * n + i] + theta1 * cont_[4 * n + i])));
    }
  }

  const Rhs& rhs_;
  const Options& opt_;
  std::vector<double> k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, ynew_, cont_;
  StepStats stats;
};

[[noreturn]] void fail(const std::string& why, double t) {
  std::ostringstream os;
  os << "integration failed at t=" << t << ": " << why;
  throw IntegrationError(os.str(), t);
}

}  // namespace

StepStats integrate(const Rhs& rhs, std::span<double> y, std::span<const double> times,
                    const Observer& observer, const Options& options, const StepHook& on_step) {
  if (times.empty()) throw InvalidArgument("time grid is empty");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw InvalidArgument("time grid must be strictly increasing");
  }
  if (!(options.rtol > 0) || !(options.atol >= 0)) throw InvalidArgument("tolerances must be positive");

  const std::size_t n = y.size();
  Stepper st(rhs, n, options);
  double t = times.front();
  const double t_end = times.back();
  if (observer) observer(0, t, y);
  if (times.size() == 1) return st.stats;

  const double span = t_end - t;
  const double h_floor_scale = 16 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), std::abs(t_end));

  st.eval(t, y, st.k1_);
  double h = options.initial_step > 0 ? std::min(options.initial_step, span) : st.initial_step(t, y, span);
  std::size_t next = 1;
  std::vector<double> sample(n);

  while (next < times.size()) {
    if (st.stats.accepted + st.stats.rejected >= options.max_steps) fail("maximum step count exceeded", t);
    h = std::min(h, options.max_step);
    const double h_natural = h;
    bool clipped = false;
    double target = t_end;
    if (options.sampling == SampleMode::hit_grid) target = times[next];
    if (t + h >= target || target - (t + h) < h_floor_scale) {
      h = target - t;
      clipped = true;
    }
    if (h < h_floor_scale || !(h > 0)) fail("step size underflow", t);

    const double err = st.trial(t, y, h);
    if (err <= 1.0) {
      const double t_new = clipped ? target : t + h;
      if (options.sampling == SampleMode::dense_output) {
        st.prepare_dense(y, h);
        while (next < times.size() && times[next] <= t_new) {
          if (times[next] == t_new) {
            if (observer) observer(next, t_new, st.ynew_);
          } else {
            st.dense((times[next] - t) / h, sample);
            if (observer) observer(next, times[next], sample);
          }
          ++next;
        }
      }
      std::copy(st.ynew_.begin(), st.ynew_.end(), y.begin());
      std::swap(st.k1_, st.k7_);
      t = t_new;
      ++st.stats.accepted;
      if (on_step) on_step(t, y);
      if (options.sampling == SampleMode::hit_grid && clipped) {
        if (observer) observer(next, t, y);
        ++next;
      }
      const double fac = err == 0.0 ? kMaxFactor : std::clamp(kSafety * std::pow(err, -0.2), kMinFactor, kMaxFactor);
      // An accepted clipped step keeps the step size proposed before clipping.
      h = clipped ? std::max(h_natural, h * fac) : h * fac;
    } else {
      ++st.stats.rejected;
      const double fac = std::isfinite(err) ? std::max(kMinFactor, kSafety * std::pow(err, -0.2)) : kMinFactor;
      h *= fac;
    }
  }
  return st.stats;
}

}  // namespace clevo::ode
