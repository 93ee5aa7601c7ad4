#include "clevo/phasespace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "clevo/errors.hpp"
#include "clevo/table.hpp"

namespace clevo {

// ---------------------------------------------------------------- Fock states

FockVector::FockVector(std::vector<cplx> coeffs, bool normalized) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw InvalidArgument("Fock vector needs at least one coefficient");
  if (normalized && std::abs(norm_squared() - 1.0) > 1e-10) throw InvalidArgument("Fock vector is not normalized");
}

double FockVector::norm_squared() const {
  double s = 0.0;
  for (const auto& c : coeffs_) s += std::norm(c);
  return s;
}

cplx FockVector::mean_annihilation() const {
  cplx acc{0, 0};
  for (std::size_t n = 0; n + 1 < coeffs_.size(); ++n)
    acc += std::sqrt(double(n + 1)) * std::conj(coeffs_[n]) * coeffs_[n + 1];
  return acc;
}

double FockVector::tail_mass() const {
  double s = 0.0;
  const std::size_t first = coeffs_.size() > 5 ? coeffs_.size() - 5 : 0;
  for (std::size_t n = first; n < coeffs_.size(); ++n) s += std::norm(coeffs_[n]);
  return s;
}

cplx FockVector::inner(const FockVector& other) const {
  const std::size_t n = std::min(coeffs_.size(), other.coeffs_.size());
  cplx acc{0, 0};
  for (std::size_t k = 0; k < n; ++k) acc += std::conj(coeffs_[k]) * other.coeffs_[k];
  return acc;
}

FockDensity::FockDensity(Eigen::MatrixXcd rho) : rho_(std::move(rho)) {
  if (rho_.rows() == 0 || rho_.rows() != rho_.cols()) throw InvalidArgument("density matrix must be square");
  if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > 1e-12) throw InvalidArgument("density matrix is not Hermitian");
  if (std::abs(rho_.trace() - cplx(1.0, 0.0)) > 1e-10) throw InvalidArgument("density matrix trace is not 1");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10) throw InvalidArgument("density matrix is not positive semidefinite");
}

FockDensity FockDensity::pure(const FockVector& psi) {
  Eigen::Map<const Eigen::VectorXcd> c(psi.coeffs().data(), static_cast<Eigen::Index>(psi.size()));
  Eigen::MatrixXcd rho = c * c.adjoint();
  // Outer products are Hermitian and positive by construction.
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return FockDensity(std::move(rho), Unchecked{});
}

namespace {

// log of e^{-|a|^2} |a|^{2n} / n!
double log_poisson(double mean, std::size_t n) {
  if (mean == 0.0) return n == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return -mean + double(n) * std::log(mean) - std::lgamma(double(n) + 1.0);
}

// Untruncated coherent coefficients e^{-|a|^2/2} a^n / sqrt(n!), n <= cutoff.
std::vector<cplx> coherent_coefficients(cplx alpha, std::size_t cutoff) {
  std::vector<cplx> c(cutoff + 1);
  const double r = std::abs(alpha);
  const double theta = std::arg(alpha);
  for (std::size_t n = 0; n <= cutoff; ++n) {
    const double mag = std::exp(0.5 * log_poisson(r * r, n));
    c[n] = std::polar(mag, double(n) * theta);
  }
  return c;
}

}  // namespace

std::size_t required_cutoff(cplx alpha, double budget) {
  const double mean = std::norm(alpha);
  const std::size_t horizon = static_cast<std::size_t>(mean + 40.0 * std::sqrt(mean + 1.0) + 80.0);
  std::vector<double> p(horizon + 1);
  for (std::size_t n = 0; n <= horizon; ++n) p[n] = std::exp(log_poisson(mean, n));
  // suffix[n] = sum_{k >= n} p_k, accumulated from the small end.
  std::vector<double> suffix(horizon + 2, 0.0);
  for (std::size_t n = horizon + 1; n-- > 0;) suffix[n] = suffix[n + 1] + p[n];
  for (std::size_t cut = 0; cut <= horizon; ++cut) {
    const double beyond = suffix[cut + 1];
    const std::size_t first = cut >= 4 ? cut - 4 : 0;
    const double last_five = suffix[first] - suffix[cut + 1];
    if (beyond < budget && last_five < budget && cut >= 5) return cut;
  }
  return horizon;
}

FockVector coherent_fock(cplx alpha, std::size_t cutoff) {
  const std::size_t need = required_cutoff(alpha);
  if (cutoff < need) {
    std::ostringstream os;
    os << "cutoff " << cutoff << " too small for |alpha|=" << std::abs(alpha) << "; need at least " << need;
    throw TruncationError(os.str(), need);
  }
  auto c = coherent_coefficients(alpha, cutoff);
  double s = 0.0;
  for (const auto& v : c) s += std::norm(v);
  const double inv = 1.0 / std::sqrt(s);
  for (auto& v : c) v *= inv;
  return FockVector(std::move(c));
}

cplx coherent_overlap(cplx alpha1, cplx alpha2) {
  return std::exp(-0.5 * (std::norm(alpha1) + std::norm(alpha2)) + std::conj(alpha1) * alpha2);
}

FockVector cat_fock(cplx alpha1, cplx alpha2, int rel_sign, std::size_t cutoff) {
  if (rel_sign != 1 && rel_sign != -1) throw InvalidArgument("relative sign must be +1 or -1");
  const std::size_t need = std::max(required_cutoff(alpha1), required_cutoff(alpha2));
  if (cutoff < need) {
    std::ostringstream os;
    os << "cutoff " << cutoff << " too small for the cat branches; need at least " << need;
    throw TruncationError(os.str(), need);
  }
  const double norm2 = 2.0 + 2.0 * rel_sign * coherent_overlap(alpha1, alpha2).real();
  if (norm2 < 1e-12) throw DegenerateStateError("cat branches cancel (norm^2 < 1e-12)");
  auto c1 = coherent_coefficients(alpha1, cutoff);
  auto c2 = coherent_coefficients(alpha2, cutoff);
  double s = 0.0;
  for (std::size_t n = 0; n <= cutoff; ++n) {
    c1[n] += double(rel_sign) * c2[n];
    s += std::norm(c1[n]);
  }
  if (s < 1e-12) throw DegenerateStateError("cat branches cancel (norm^2 < 1e-12)");
  const double inv = 1.0 / std::sqrt(s);
  for (auto& v : c1) v *= inv;
  return FockVector(std::move(c1));
}

// ---------------------------------------------------------------- grids

void GridGeometry::validate() const {
  if (nx < 2 || np < 2) throw InvalidArgument("grid needs at least 2 nodes per axis");
  if (!(x_max > x_min) || !(p_max > p_min)) throw InvalidArgument("grid window is empty");
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !std::isfinite(p_min) || !std::isfinite(p_max))
    throw InvalidArgument("grid window must be finite");
}

WignerGrid::WignerGrid(GridGeometry geometry, std::vector<double> values, std::vector<std::string> warnings)
    : geom_(geometry), values_(std::move(values)), warnings_(std::move(warnings)) {
  geom_.validate();
  if (values_.size() != geom_.nx * geom_.np) throw InvalidArgument("grid value count does not match geometry");
}

double WignerGrid::min() const { return *std::min_element(values_.begin(), values_.end()); }
double WignerGrid::max() const { return *std::max_element(values_.begin(), values_.end()); }

namespace {

double trapezoid_weight(std::size_t i, std::size_t n) { return (i == 0 || i + 1 == n) ? 0.5 : 1.0; }

}  // namespace

double WignerGrid::integral() const {
  double s = 0.0;
  for (std::size_t i = 0; i < geom_.nx; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < geom_.np; ++j) row += trapezoid_weight(j, geom_.np) * at(i, j);
    s += trapezoid_weight(i, geom_.nx) * row;
  }
  return s * geom_.dx() * geom_.dp();
}

cplx mean_from_grid(const WignerGrid& grid) {
  const auto& g = grid.geometry();
  const double norm = grid.integral();
  if (std::abs(norm - 1.0) > 1e-2) throw InvalidArgument("grid is not normalized on its window (|int W - 1| > 1e-2)");
  cplx s{0, 0};
  for (std::size_t i = 0; i < g.nx; ++i) {
    for (std::size_t j = 0; j < g.np; ++j) {
      const double w = trapezoid_weight(i, g.nx) * trapezoid_weight(j, g.np) * grid.at(i, j);
      s += w * cplx(g.x(i), g.p(j));
    }
  }
  return s * g.dx() * g.dp() / norm;
}

// ---------------------------------------------------------------- Fock-basis Wigner

namespace {

constexpr double kLogUnderflow = -700.0;

class KernelEvaluator {
 public:
  explicit KernelEvaluator(std::size_t dim) : dim_(dim), sqrt_(2 * dim + 2) {
    for (std::size_t i = 0; i < sqrt_.size(); ++i) sqrt_[i] = std::sqrt(double(i));
  }

  // sum over elements rho_{n+k, n} for all k, n; returns W and sets the
  // underflow flag when an occupied diagonal starts below the exp range.
  double evaluate(const Eigen::MatrixXcd& rho, cplx alpha, bool& underflow) const {
    const double r2 = std::norm(alpha);
    const double r = std::sqrt(r2);
    const double x = 4.0 * r2;
    const double theta = std::arg(alpha);
    const double log2r = r > 0 ? std::log(2.0 * r) : -std::numeric_limits<double>::infinity();
    double total = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) {
      const double log_l0 = (k == 0 ? 0.0 : double(k) * log2r) - 2.0 * r2 - 0.5 * std::lgamma(double(k) + 1.0);
      if (log_l0 < kLogUnderflow) {
        if (r > 0 && diagonal_occupied(rho, k)) underflow = true;
        continue;
      }
      // Scaled, normalized Laguerre functions
      //   l_n = (2|a|)^k e^{-2|a|^2} sqrt(n!/(n+k)!) L_n^k(4|a|^2)
      // by upward recurrence in n.
      double l_prev = 0.0;
      double l_cur = std::exp(log_l0);
      cplx acc = rho(static_cast<Eigen::Index>(k), 0) * l_cur;
      double sign = 1.0;
      for (std::size_t n = 0; n + k + 1 < dim_; ++n) {
        const double l_next = ((2.0 * n + 1.0 + k - x) * l_cur - sqrt_[n] * sqrt_[n + k] * l_prev) /
                              (sqrt_[n + 1] * sqrt_[n + k + 1]);
        l_prev = l_cur;
        l_cur = l_next;
        sign = -sign;
        acc += rho(static_cast<Eigen::Index>(n + 1 + k), static_cast<Eigen::Index>(n + 1)) * (sign * l_cur);
      }
      if (k == 0) {
        total += acc.real();
      } else {
        total += 2.0 * (std::polar(1.0, -double(k) * theta) * acc).real();
      }
    }
    return kWignerBound * total;
  }

 private:
  static bool diagonal_occupied(const Eigen::MatrixXcd& rho, std::size_t k) {
    for (Eigen::Index n = 0; n + static_cast<Eigen::Index>(k) < rho.rows(); ++n) {
      if (std::abs(rho(n + static_cast<Eigen::Index>(k), n)) > 1e-300) return true;
    }
    return false;
  }

  std::size_t dim_;
  std::vector<double> sqrt_;
};

}  // namespace

cplx wigner_kernel(std::size_t m, std::size_t n, cplx alpha) {
  if (m < n) return std::conj(wigner_kernel(n, m, alpha));
  Eigen::MatrixXcd unit = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(m + 1), static_cast<Eigen::Index>(m + 1));
  unit(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) = 1.0;
  // The evaluator returns 2 Re(.) for off-diagonal elements; recover the
  // complex kernel from two real projections.
  KernelEvaluator ev(m + 1);
  bool uf = false;
  const double re = ev.evaluate(unit, alpha, uf);
  if (m == n) return {re, 0.0};
  unit(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) = cplx(0.0, 1.0);
  const double im_part = ev.evaluate(unit, alpha, uf);
  // 2 Re(K) = re, 2 Re(i K) = -2 Im(K) = im_part
  return {0.5 * re, -0.5 * im_part};
}

double wigner_at(const FockDensity& rho, cplx alpha) {
  KernelEvaluator ev(rho.cutoff() + 1);
  bool uf = false;
  return ev.evaluate(rho.matrix(), alpha, uf);
}

WignerGrid wigner_of_density(const FockDensity& rho, const GridGeometry& geometry) {
  geometry.validate();
  const KernelEvaluator ev(rho.cutoff() + 1);
  std::vector<double> values(geometry.nx * geometry.np);
  std::vector<char> underflow(geometry.nx, 0);
  const long long nx = static_cast<long long>(geometry.nx);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < nx; ++i) {
    bool uf = false;
    for (std::size_t j = 0; j < geometry.np; ++j) {
      values[static_cast<std::size_t>(i) * geometry.np + j] =
          ev.evaluate(rho.matrix(), cplx(geometry.x(static_cast<std::size_t>(i)), geometry.p(j)), uf);
    }
    underflow[static_cast<std::size_t>(i)] = uf;
  }
  std::vector<std::string> warnings;
  if (std::any_of(underflow.begin(), underflow.end(), [](char c) { return c != 0; })) {
    warnings.emplace_back(
        "Wigner kernel underflow inside the window: the Fock cutoff cannot resolve the outer grid region");
  }
  return WignerGrid(geometry, std::move(values), std::move(warnings));
}

// ---------------------------------------------------------------- closed-form initial states

namespace {

// Wigner function of |a><b| at beta: (2/pi) <b|a> exp(-2 (beta - a)(conj(beta) - conj(b))).
cplx coherent_cross_wigner(cplx a, cplx b, cplx beta) {
  const cplx log_overlap = -0.5 * (std::norm(a) + std::norm(b)) + std::conj(b) * a;
  return kWignerBound * std::exp(log_overlap - 2.0 * (beta - a) * (std::conj(beta) - std::conj(b)));
}

struct Evaluate {
  cplx beta;
  double operator()(const CoherentWigner& w) const { return kWignerBound * std::exp(-2.0 * std::norm(beta - w.alpha0)); }
  double operator()(const CatWigner& w) const {
    const double norm2 = 2.0 + 2.0 * w.rel_sign * coherent_overlap(w.alpha1, w.alpha2).real();
    const double diag = kWignerBound * (std::exp(-2.0 * std::norm(beta - w.alpha1)) + std::exp(-2.0 * std::norm(beta - w.alpha2)));
    const double cross = 2.0 * w.rel_sign * coherent_cross_wigner(w.alpha1, w.alpha2, beta).real();
    return (diag + cross) / norm2;
  }
};

}  // namespace

double evaluate(const InitialWigner& w0, cplx alpha) { return std::visit(Evaluate{alpha}, w0); }

FockVector to_fock(const InitialWigner& w0, std::size_t cutoff) {
  if (const auto* c = std::get_if<CoherentWigner>(&w0)) return coherent_fock(c->alpha0, cutoff);
  const auto& cat = std::get<CatWigner>(w0);
  return cat_fock(cat.alpha1, cat.alpha2, cat.rel_sign, cutoff);
}

void check_flow(const FlowMap& flow, double t, const GridGeometry& g) {
  if (!flow.forward || !flow.inverse) throw FlowConsistencyError("flow map needs forward and inverse");
  constexpr int kProbes = 7;
  for (int a = 0; a < kProbes; ++a) {
    for (int b = 0; b < kProbes; ++b) {
      // Slightly irrational offsets keep probes off symmetry axes.
      const double u = (a + 0.5 + 0.1 * std::numbers::sqrt2) / (kProbes + 1.0);
      const double v = (b + 0.5 + 0.1 * std::numbers::sqrt3) / (kProbes + 1.0);
      const cplx probe(g.x_min + u * (g.x_max - g.x_min), g.p_min + v * (g.p_max - g.p_min));
      const cplx back = flow.inverse(flow.forward(probe, t), t);
      if (!(std::abs(back - probe) <= 1e-10 * std::max(1.0, std::abs(probe)))) {
        std::ostringstream os;
        os << "flow inverse does not undo forward at alpha=" << probe << " (t=" << t << ")";
        throw FlowConsistencyError(os.str());
      }
    }
  }
}

namespace {

// Centres of the Gaussian envelopes bounding |W_0| (the cross term of a cat
// sits at the midpoint) and the sample spacing that resolves W_0: its
// Gaussians have width 1/2 and cat fringes wavenumber 2|alpha1 - alpha2|.
struct Envelope {
  std::vector<cplx> centers;
  double spacing = 0.35;
};

Envelope envelope_of(const InitialWigner& w0) {
  if (const auto* c = std::get_if<CoherentWigner>(&w0)) return {{c->alpha0}, 0.35};
  const auto& cat = std::get<CatWigner>(w0);
  const double sep = std::abs(cat.alpha1 - cat.alpha2);
  return {{cat.alpha1, cat.alpha2, 0.5 * (cat.alpha1 + cat.alpha2)}, 0.35 / (1.0 + 0.25 * sep)};
}

double distance_to(const Envelope& env, cplx beta) {
  double d = std::numeric_limits<double>::infinity();
  for (const cplx& c : env.centers) d = std::min(d, std::abs(beta - c));
  return d;
}

constexpr std::size_t kMaxSubsamples = 256;
// exp(-2 d^2) < 1e-15 beyond this distance from every envelope centre.
constexpr double kNegligibleDistance = 4.2;

double pulled_value(const InitialWigner& w0, const Envelope& env, const FlowMap& flow, double t, cplx center,
                    double hx, double hp) {
  const cplx pre = flow.inverse(center, t);
  const double point = evaluate(w0, pre);
  // Local stretching of the inverse flow from a central-difference Jacobian.
  const double fd = 1e-6 * std::max(1.0, std::abs(center));
  const cplx jx = (flow.inverse(center + cplx(fd, 0.0), t) - flow.inverse(center - cplx(fd, 0.0), t)) / (2.0 * fd);
  const cplx jp = (flow.inverse(center + cplx(0.0, fd), t) - flow.inverse(center - cplx(0.0, fd), t)) / (2.0 * fd);
  const double m11 = std::norm(jx), m22 = std::norm(jp);
  const double m12 = jx.real() * jp.real() + jx.imag() * jp.imag();
  const double sigma_max = std::sqrt(0.5 * (m11 + m22 + std::hypot(m11 - m22, 2.0 * m12)));
  const double h = std::max(hx, hp);
  const double want = std::ceil(h * (sigma_max - 1.0) / env.spacing);
  if (!(want > 1.0)) return point;
  const auto s = static_cast<std::size_t>(std::min(want, double(kMaxSubsamples)));

  // Skip cells whose preimage stays far from every envelope: walk the cell
  // along the most-stretched direction, which traces the preimage strip.
  const double angle = 0.5 * std::atan2(2.0 * m12, m11 - m22);
  const cplx dir = std::polar(1.0, angle);
  double nearest = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= s; ++k) {
    const double u = (double(k) / double(s) - 0.5) * std::numbers::sqrt2 * h;
    nearest = std::min(nearest, distance_to(env, flow.inverse(center + u * dir, t)));
  }
  const double margin = 2.0 * h + env.spacing;
  if (nearest - margin > kNegligibleDistance) return point;

  double sum = 0.0;
  for (std::size_t a = 0; a < s; ++a) {
    const double dx = ((double(a) + 0.5) / double(s) - 0.5) * hx;
    for (std::size_t b = 0; b < s; ++b) {
      const double dp = ((double(b) + 0.5) / double(s) - 0.5) * hp;
      sum += evaluate(w0, flow.inverse(center + cplx(dx, dp), t));
    }
  }
  return sum / double(s * s);
}

}  // namespace

WignerGrid wigner_pullback(const InitialWigner& w0, const FlowMap& flow, double t, const GridGeometry& geometry) {
  geometry.validate();
  check_flow(flow, t, geometry);
  const Envelope env = envelope_of(w0);
  const double hx = geometry.nx > 1 ? geometry.dx() : 0.0;
  const double hp = geometry.np > 1 ? geometry.dp() : 0.0;
  std::vector<double> values(geometry.nx * geometry.np);
  const long long nx = static_cast<long long>(geometry.nx);
#pragma omp parallel for schedule(dynamic, 4)
  for (long long i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < geometry.np; ++j) {
      const cplx alpha(geometry.x(static_cast<std::size_t>(i)), geometry.p(j));
      values[static_cast<std::size_t>(i) * geometry.np + j] = pulled_value(w0, env, flow, t, alpha, hx, hp);
    }
  }
  return WignerGrid(geometry, std::move(values));
}

// ---------------------------------------------------------------- serialization

std::string wigner_to_csv(const WignerGrid& grid) {
  const auto& g = grid.geometry();
  std::string out = "x,p,w\n";
  out.reserve(out.size() + g.nx * g.np * 40);
  for (std::size_t i = 0; i < g.nx; ++i) {
    const std::string xs = format_double(g.x(i));
    for (std::size_t j = 0; j < g.np; ++j) {
      out += xs;
      out += ',';
      out += format_double(g.p(j));
      out += ',';
      out += format_double(grid.at(i, j));
      out += '\n';
    }
  }
  return out;
}

std::string wigner_to_json(const WignerGrid& grid) {
  const auto& g = grid.geometry();
  nlohmann::ordered_json j;
  j["format"] = "clevo.wigner_grid";
  j["convention"] = "x = Re(alpha), p = Im(alpha), d2alpha = dx dp";
  j["x_range"] = {g.x_min, g.x_max};
  j["p_range"] = {g.p_min, g.p_max};
  j["nx"] = g.nx;
  j["np"] = g.np;
  j["layout"] = "row-major, x outer, p inner";
  j["values"] = grid.values();
  j["warnings"] = grid.warnings();
  return j.dump() + "\n";
}

WignerGrid wigner_from_csv(const std::string& text) {
  const Table t = Table::from_csv(text);
  if (t.columns != std::vector<std::string>{"x", "p", "w"}) throw IoError("Wigner CSV header must be x,p,w");
  if (t.rows.size() < 4) throw IoError("Wigner CSV has too few rows");
  std::size_t np = 1;
  while (np < t.rows.size() && t.rows[np][0] == t.rows[0][0]) ++np;
  if (t.rows.size() % np != 0) throw IoError("Wigner CSV is not a rectangular grid");
  GridGeometry g;
  g.np = np;
  g.nx = t.rows.size() / np;
  g.x_min = t.rows.front()[0];
  g.x_max = t.rows.back()[0];
  g.p_min = t.rows.front()[1];
  g.p_max = t.rows[np - 1][1];
  std::vector<double> values;
  values.reserve(t.rows.size());
  for (const auto& r : t.rows) values.push_back(r[2]);
  return WignerGrid(g, std::move(values));
}

}  // namespace clevo
