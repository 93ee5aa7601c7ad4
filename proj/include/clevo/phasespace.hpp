#pragma once

// Single-mode phase space.
//
// Grid coordinates are x = Re(alpha), p = Im(alpha) and the quadrature measure
// is d^2 alpha = dx dp, so a normalized Wigner function integrates to 1 and is
// bounded by 2/pi in modulus. The vacuum is (2/pi) exp(-2|alpha|^2).

#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace clevo {

using cplx = std::complex<double>;

inline constexpr double kWignerBound = 0.63661977236758134308;  // 2/pi

class FockVector {
 public:
  FockVector() = default;
  // Coefficients c_0..c_nmax; `normalized` asserts sum |c_n|^2 = 1 (1e-10).
  explicit FockVector(std::vector<cplx> coeffs, bool normalized = true);

  std::size_t cutoff() const noexcept { return coeffs_.size() - 1; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  const std::vector<cplx>& coeffs() const noexcept { return coeffs_; }
  const cplx& operator[](std::size_t n) const { return coeffs_[n]; }

  double norm_squared() const;
  // <a> = sum_n sqrt(n+1) conj(c_n) c_{n+1}
  cplx mean_annihilation() const;
  // mass in the last five levels
  double tail_mass() const;
  cplx inner(const FockVector& other) const;  // <this|other>

 private:
  std::vector<cplx> coeffs_;
};

class FockDensity {
 public:
  // Validates Hermiticity (1e-12), unit trace (1e-10) and positivity (-1e-10).
  explicit FockDensity(Eigen::MatrixXcd rho);
  static FockDensity pure(const FockVector& psi);

  const Eigen::MatrixXcd& matrix() const noexcept { return rho_; }
  std::size_t cutoff() const noexcept { return static_cast<std::size_t>(rho_.rows()) - 1; }

 private:
  struct Unchecked {};
  FockDensity(Eigen::MatrixXcd rho, Unchecked) : rho_(std::move(rho)) {}
  Eigen::MatrixXcd rho_;
};

inline constexpr double kTruncationBudget = 1e-10;

// Truncated coherent state, renormalized; TruncationError (with the required
// cutoff) when the Poisson tail past the cutoff or in the last five levels
// exceeds 1e-10.
FockVector coherent_fock(cplx alpha, std::size_t cutoff);

// <a1|a2> = exp(-(|a1|^2 + |a2|^2)/2 + conj(a1) a2)
cplx coherent_overlap(cplx alpha1, cplx alpha2);

// (|a1> + sign |a2>) normalized; DegenerateStateError when the norm^2 < 1e-12.
FockVector cat_fock(cplx alpha1, cplx alpha2, int rel_sign, std::size_t cutoff);

// Smallest cutoff meeting the truncation budget for |alpha>.
std::size_t required_cutoff(cplx alpha, double budget = kTruncationBudget);

struct GridGeometry {
  double x_min = -6.0, x_max = 6.0;
  double p_min = -6.0, p_max = 6.0;
  std::size_t nx = 301, np = 301;

  void validate() const;
  double x(std::size_t i) const { return nx == 1 ? x_min : x_min + (x_max - x_min) * i / double(nx - 1); }
  double p(std::size_t j) const { return np == 1 ? p_min : p_min + (p_max - p_min) * j / double(np - 1); }
  double dx() const { return (x_max - x_min) / double(nx - 1); }
  double dp() const { return (p_max - p_min) / double(np - 1); }
};

class WignerGrid {
 public:
  WignerGrid(GridGeometry geometry, std::vector<double> values, std::vector<std::string> warnings = {});

  const GridGeometry& geometry() const noexcept { return geom_; }
  // Row-major: index = i * np + j for x index i and p index j.
  const std::vector<double>& values() const noexcept { return values_; }
  double at(std::size_t i, std::size_t j) const { return values_[i * geom_.np + j]; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  double min() const;
  double max() const;
  // Trapezoidal estimate of the integral of W over the window.
  double integral() const;

 private:
  GridGeometry geom_;
  std::vector<double> values_;
  std::vector<std::string> warnings_;
};

// Wigner function of |m><n| at alpha (kernel of the Fock-basis expansion).
cplx wigner_kernel(std::size_t m, std::size_t n, cplx alpha);

// Point evaluation of the Wigner function of rho.
double wigner_at(const FockDensity& rho, cplx alpha);

// W over the grid; warnings report kernel underflow for occupied elements.
WignerGrid wigner_of_density(const FockDensity& rho, const GridGeometry& geometry);

// Closed-form initial Wigner functions.
struct CoherentWigner {
  cplx alpha0;
};
struct CatWigner {
  cplx alpha1, alpha2;
  int rel_sign = 1;
};
using InitialWigner = std::variant<CoherentWigner, CatWigner>;

double evaluate(const InitialWigner& w0, cplx alpha);
// Fock-basis counterpart of a closed-form initial state.
FockVector to_fock(const InitialWigner& w0, std::size_t cutoff);

struct FlowMap {
  std::function<cplx(cplx, double)> forward;
  std::function<cplx(cplx, double)> inverse;
};

// Checks inverse(forward(a, t), t) == a within 1e-10 on deterministic probes
// covering the window; FlowConsistencyError otherwise.
void check_flow(const FlowMap& flow, double t, const GridGeometry& geometry);

// W_t(alpha) = W_0(inverse(alpha, t)). Where the inverse flow stretches a grid
// cell beyond the length scale of W_0, the node holds the average of W_t over
// its cell (midpoint sub-sampling) so that thin filaments are not aliased;
// elsewhere it is the point value.
WignerGrid wigner_pullback(const InitialWigner& w0, const FlowMap& flow, double t, const GridGeometry& geometry);

// integral(alpha W) / integral(W); requires |integral(W) - 1| <= 1e-2.
cplx mean_from_grid(const WignerGrid& grid);

// CSV: header `x,p,w`, row-major, shortest round-trip decimals.
std::string wigner_to_csv(const WignerGrid& grid);
// JSON envelope with geometry metadata and the row-major values.
std::string wigner_to_json(const WignerGrid& grid);
WignerGrid wigner_from_csv(const std::string& text);

}  // namespace clevo
