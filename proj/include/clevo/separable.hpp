#pragma once

// Covariance dynamics of N all-to-all coupled oscillators in natural units,
//
//   eta = pi^T pi / 2 + (1 + R N)/2 xi^T xi - R/2 xi^T n n^T xi,
//
// restricted to K-separable states. Each partition block j evolves under
// G_j = (1 + R N) E_j - R n_j n_j^T. Every quadrant of a block covariance that
// starts as a E_j + b n_j n_j^T / N_j stays in that two-dimensional
// commutative algebra: G_j, its square root and S_j(tau) all live there, and
// products and transposes of algebra elements do too. Propagation therefore
// reduces to 2x2 rotations on the two eigenspaces (along n_j and orthogonal
// to it), independent of N_j.
//
// Canonical ordering is (xi_1..xi_N, pi_1..pi_N) with J = [[0, E], [-E, 0]].

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "clevo/ode.hpp"

namespace clevo::separable {

class Partition {
 public:
  Partition(std::size_t n_total, std::vector<std::size_t> sizes);
  // N / K oscillators per block; DomainError unless K divides N.
  static Partition balanced(std::size_t n_total, std::size_t k);

  std::size_t total() const noexcept { return n_; }
  std::size_t blocks() const noexcept { return sizes_.size(); }
  std::size_t size(std::size_t j) const { return sizes_.at(j); }
  std::size_t offset(std::size_t j) const { return offsets_.at(j); }
  const std::vector<std::size_t>& sizes() const noexcept { return sizes_; }
  bool is_balanced() const;

 private:
  std::size_t n_;
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
};

// Divisors of n, ascending (the admissible K for balanced partitions).
std::vector<std::size_t> divisors(std::size_t n);

struct NaturalUnits {
  double R = 0.0;     // kappa / (m omega^2)
  double beta = 1.0;  // hbar omega / (k_B T)
  double tau = 0.0;   // omega t
  void validate() const;
};

// a E + b n n^T / N_j. Eigenvalues: a orthogonal to n_j, a + b along n_j.
struct AlgebraElement {
  double a = 0.0;
  double b = 0.0;

  double perpendicular() const { return a; }
  double parallel() const { return a + b; }
  static AlgebraElement from_eigenvalues(double perpendicular, double parallel) {
    return {perpendicular, parallel - perpendicular};
  }
  Eigen::MatrixXd dense(std::size_t size) const;
};

struct StructuredBlock {
  AlgebraElement xx, xp, pp;
  std::size_t size = 1;

  // 2 N_j x 2 N_j block, ordered (xi_j, pi_j).
  Eigen::MatrixXd dense() const;
  // Exact decomposition when the matrix lies in the algebra (within tol),
  // nullopt otherwise.
  static std::optional<StructuredBlock> from_dense(const Eigen::MatrixXd& block, double tol = 1e-12);
};

class DenseCovariance {
 public:
  explicit DenseCovariance(Eigen::MatrixXd matrix);
  const Eigen::MatrixXd& matrix() const noexcept { return c_; }
  std::size_t modes() const noexcept { return static_cast<std::size_t>(c_.rows()) / 2; }
  // Smallest eigenvalue of C + iJ/2 (>= 0 for physical states).
  double uncertainty_margin() const;

 private:
  Eigen::MatrixXd c_;
};

// sigma = 1/2 + e^{-beta} / (1 - e^{-beta}); DomainError for beta <= 0.
double thermal_variance(double beta);
std::vector<StructuredBlock> thermal_covariance(double beta, const Partition& partition);

AlgebraElement g_block(std::size_t j, const Partition& partition, double R);
// G_j^{1/2} = sqrt(1 + R N)(E - P) + sqrt(1 + R (N - N_j)) P
AlgebraElement sqrt_G(std::size_t j, const Partition& partition, double R);

// C_j(tau) = S_j(tau) C_j(0) S_j(tau)^T inside the algebra.
StructuredBlock propagate_block(const StructuredBlock& c0, std::size_t j, const Partition& partition, double R,
                                double tau);
// Same map for an arbitrary symmetric block; structured when the block lies
// in the algebra, dense S C S^T otherwise.
Eigen::MatrixXd propagate_block(const Eigen::MatrixXd& c0, std::size_t j, const Partition& partition, double R,
                                double tau);

// Full covariance with the given blocks on the diagonal and zero cross terms.
DenseCovariance assemble(const std::vector<StructuredBlock>& blocks, const Partition& partition);

// Coupling matrices: block-diagonal G_j (separable) and (1 + R N) E - R n n^T.
Eigen::MatrixXd separable_G(const Partition& partition, double R);
Eigen::MatrixXd entangled_G(std::size_t n, double R);

// S(tau) for a symmetric positive definite G, by eigendecomposition.
Eigen::MatrixXd symplectic_propagator(const Eigen::MatrixXd& G, double tau);
Eigen::MatrixXd symplectic_form(std::size_t n);

inline constexpr std::size_t kDenseOracleMaxModes = 256;

inline ode::Options dense_oracle_options() {
  ode::Options o;
  o.rtol = 1e-13;
  o.atol = 1e-15;
  return o;
}

/// Integrates dC/dtau = A C + C A^T, A = J diag(G, E), with the adaptive
/// integrator. SizeGuardError for more than 256 modes.
std::vector<DenseCovariance> dense_oracle(const DenseCovariance& c0, const Eigen::MatrixXd& G,
                                          std::span<const double> tau_grid,
                                          const ode::Options& opts = dense_oracle_options());

struct FirstMoments {
  Eigen::VectorXd xi;
  Eigen::VectorXd pi;
};

// First moments follow the full-system generator regardless of the partition.
FirstMoments mean_propagation(const FirstMoments& m0, const Partition& partition, double R, double tau);

// r_K = R N (1 - 1/K)
double amplitude_rK(const Partition& balanced, double R);

// V_Pi(tau) = (sigma/N) [1 + r_K sin^2(sqrt(1 + r_K) tau)] for balanced partitions.
double variance_mean_momentum(const Partition& partition, double R, double beta, double tau);
// Prefactor hbar m omega restored.
double variance_mean_momentum_physical(const Partition& partition, double R, double beta, double tau, double hbar,
                                       double mass, double omega);
// n-projection of propagated blocks, valid for any partition.
double variance_mean_momentum(const std::vector<StructuredBlock>& blocks, const Partition& partition);

struct SweepRow {
  double tau;
  std::size_t K;
  double ratio;
};

struct SweepCurveSummary {
  std::size_t K;
  double r_K;
  double max_ratio;    // 1 + r_K
  double tau_at_max;   // pi / (2 sqrt(1 + r_K))
  double half_period;  // pi / sqrt(1 + r_K): period of the ratio curve
};

struct SweepResult {
  std::size_t N;
  double R;
  double beta;
  std::vector<SweepRow> rows;
  std::vector<SweepCurveSummary> curves;
};

// V(tau)/V(0) per K. The ratio is recomputed at a second temperature and
// must agree within 1e-12.
SweepResult variance_ratio_sweep(std::size_t N, std::span<const std::size_t> K_list, double R, std::span<const double> tau_grid,
                       double beta = 1.0);

}  // namespace clevo::separable
