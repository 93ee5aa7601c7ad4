#include "clevo/separable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "clevo/errors.hpp"

namespace clevo::separable {

Partition::Partition(std::size_t n_total, std::vector<std::size_t> sizes) : n_(n_total), sizes_(std::move(sizes)) {
  if (n_ == 0) throw InvalidArgument("partition needs N >= 1");
  if (sizes_.empty()) throw InvalidArgument("partition needs K >= 1 blocks");
  std::size_t sum = 0;
  offsets_.reserve(sizes_.size());
  for (std::size_t s : sizes_) {
    if (s == 0) throw InvalidArgument("partition blocks must be non-empty");
    offsets_.push_back(sum);
    sum += s;
  }
  if (sum != n_) throw InvalidArgument("partition block sizes must sum to N");
}

std::vector<std::size_t> divisors(std::size_t n) {
  std::vector<std::size_t> lo, hi;
  for (std::size_t d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      lo.push_back(d);
      if (d != n / d) hi.push_back(n / d);
    }
  }
  lo.insert(lo.end(), hi.rbegin(), hi.rend());
  return lo;
}

Partition Partition::balanced(std::size_t n_total, std::size_t k) {
  if (k == 0 || n_total == 0 || n_total % k != 0) {
    std::ostringstream os;
    os << "K=" << k << " does not divide N=" << n_total << "; valid K:";
    const auto ds = divisors(n_total);
    for (std::size_t i = 0; i < ds.size() && i < 64; ++i) os << (i ? "," : " ") << ds[i];
    if (ds.size() > 64) os << ",...";
    throw DomainError(os.str());
  }
  return Partition(n_total, std::vector<std::size_t>(k, n_total / k));
}

bool Partition::is_balanced() const {
  return std::all_of(sizes_.begin(), sizes_.end(), [&](std::size_t s) { return s == sizes_.front(); });
}

void NaturalUnits::validate() const {
  if (!std::isfinite(R) || !std::isfinite(beta) || !std::isfinite(tau)) throw DomainError("natural units must be finite");
  if (!(beta > 0)) throw DomainError("beta must be positive");
  if (R < 0) throw DomainError("coupling R must be non-negative");
}

Eigen::MatrixXd AlgebraElement::dense(std::size_t size) const {
  const auto n = static_cast<Eigen::Index>(size);
  return a * Eigen::MatrixXd::Identity(n, n) + (b / double(size)) * Eigen::MatrixXd::Ones(n, n);
}

Eigen::MatrixXd StructuredBlock::dense() const {
  const auto n = static_cast<Eigen::Index>(size);
  Eigen::MatrixXd m(2 * n, 2 * n);
  m.topLeftCorner(n, n) = xx.dense(size);
  m.topRightCorner(n, n) = xp.dense(size);
  m.bottomLeftCorner(n, n) = xp.dense(size);
  m.bottomRightCorner(n, n) = pp.dense(size);
  return m;
}

namespace {

std::optional<AlgebraElement> decompose(const Eigen::MatrixXd& q, double tol) {
  const auto n = q.rows();
  AlgebraElement e;
  if (n == 1) {
    e = {q(0, 0), 0.0};
  } else {
    e = {q(0, 0) - q(0, 1), double(n) * q(0, 1)};
  }
  const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
  if ((e.dense(static_cast<std::size_t>(n)) - q).cwiseAbs().maxCoeff() > tol * scale) return std::nullopt;
  return e;
}

// (xx, xp, pp) on one eigenspace of G_j with eigenfrequency w.
Eigen::Matrix2d rotate(const Eigen::Matrix2d& c, double w, double tau) {
  const double cs = std::cos(w * tau);
  const double sn = std::sin(w * tau);
  Eigen::Matrix2d s;
  s << cs, sn / w, -w * sn, cs;
  return s * c * s.transpose();
}

}  // namespace

std::optional<StructuredBlock> StructuredBlock::from_dense(const Eigen::MatrixXd& block, double tol) {
  if (block.rows() != block.cols() || block.rows() % 2 != 0 || block.rows() == 0) return std::nullopt;
  const auto n = block.rows() / 2;
  auto xx = decompose(block.topLeftCorner(n, n), tol);
  auto xp = decompose(block.topRightCorner(n, n), tol);
  auto px = decompose(block.bottomLeftCorner(n, n), tol);
  auto pp = decompose(block.bottomRightCorner(n, n), tol);
  if (!xx || !xp || !px || !pp) return std::nullopt;
  if (std::abs(xp->a - px->a) > tol * std::max(1.0, std::abs(xp->a)) ||
      std::abs(xp->b - px->b) > tol * std::max(1.0, std::abs(xp->b)))
    return std::nullopt;
  return StructuredBlock{*xx, *xp, *pp, static_cast<std::size_t>(n)};
}

DenseCovariance::DenseCovariance(Eigen::MatrixXd matrix) : c_(std::move(matrix)) {
  if (c_.rows() == 0 || c_.rows() != c_.cols() || c_.rows() % 2 != 0)
    throw InvalidArgument("covariance must be 2N x 2N");
  const double scale = std::max(1.0, c_.cwiseAbs().maxCoeff());
  if ((c_ - c_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw InvalidArgument("covariance is not symmetric");
}

Eigen::MatrixXd symplectic_form(std::size_t n) {
  const auto m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  j.topRightCorner(m, m).setIdentity();
  j.bottomLeftCorner(m, m) = -Eigen::MatrixXd::Identity(m, m);
  return j;
}

double DenseCovariance::uncertainty_margin() const {
  const Eigen::MatrixXcd m = c_.cast<std::complex<double>>() + std::complex<double>(0.0, 0.5) * symplectic_form(modes()).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double thermal_variance(double beta) {
  if (!(beta > 0) || !std::isfinite(beta)) throw DomainError("beta must be positive and finite");
  // e^{-b} / (1 - e^{-b}) = 1 / (e^b - 1)
  return 0.5 + 1.0 / std::expm1(beta);
}

std::vector<StructuredBlock> thermal_covariance(double beta, const Partition& partition) {
  const double sigma = thermal_variance(beta);
  std::vector<StructuredBlock> blocks;
  blocks.reserve(partition.blocks());
  for (std::size_t j = 0; j < partition.blocks(); ++j)
    blocks.push_back(StructuredBlock{{sigma, 0.0}, {0.0, 0.0}, {sigma, 0.0}, partition.size(j)});
  return blocks;
}

AlgebraElement g_block(std::size_t j, const Partition& partition, double R) {
  if (!(R >= 0) || !std::isfinite(R)) throw DomainError("coupling R must be non-negative and finite");
  const double n = double(partition.total());
  return AlgebraElement::from_eigenvalues(1.0 + R * n, 1.0 + R * (n - double(partition.size(j))));
}

AlgebraElement sqrt_G(std::size_t j, const Partition& partition, double R) {
  const AlgebraElement g = g_block(j, partition, R);
  return AlgebraElement::from_eigenvalues(std::sqrt(g.perpendicular()), std::sqrt(g.parallel()));
}

StructuredBlock propagate_block(const StructuredBlock& c0, std::size_t j, const Partition& partition, double R,
                                double tau) {
  if (c0.size != partition.size(j)) throw InvalidArgument("block size does not match the partition");
  const AlgebraElement w = sqrt_G(j, partition, R);
  Eigen::Matrix2d perp, par;
  perp << c0.xx.perpendicular(), c0.xp.perpendicular(), c0.xp.perpendicular(), c0.pp.perpendicular();
  par << c0.xx.parallel(), c0.xp.parallel(), c0.xp.parallel(), c0.pp.parallel();
  const Eigen::Matrix2d perp_t = rotate(perp, w.perpendicular(), tau);
  const Eigen::Matrix2d par_t = rotate(par, w.parallel(), tau);
  StructuredBlock out;
  out.size = c0.size;
  out.xx = AlgebraElement::from_eigenvalues(perp_t(0, 0), par_t(0, 0));
  out.xp = AlgebraElement::from_eigenvalues(perp_t(0, 1), par_t(0, 1));
  out.pp = AlgebraElement::from_eigenvalues(perp_t(1, 1), par_t(1, 1));
  return out;
}

Eigen::MatrixXd propagate_block(const Eigen::MatrixXd& c0, std::size_t j, const Partition& partition, double R,
                                double tau) {
  const std::size_t nj = partition.size(j);
  if (c0.rows() != static_cast<Eigen::Index>(2 * nj) || c0.cols() != c0.rows())
    throw InvalidArgument("block size does not match the partition");
  if (auto s = StructuredBlock::from_dense(c0)) return propagate_block(*s, j, partition, R, tau).dense();
  const AlgebraElement w = sqrt_G(j, partition, R);
  auto scalar = [&](auto f) {
    return AlgebraElement::from_eigenvalues(f(w.perpendicular()), f(w.parallel())).dense(nj);
  };
  const auto n = static_cast<Eigen::Index>(nj);
  Eigen::MatrixXd s(2 * n, 2 * n);
  s.topLeftCorner(n, n) = scalar([&](double x) { return std::cos(x * tau); });
  s.topRightCorner(n, n) = scalar([&](double x) { return std::sin(x * tau) / x; });
  s.bottomLeftCorner(n, n) = scalar([&](double x) { return -x * std::sin(x * tau); });
  s.bottomRightCorner(n, n) = s.topLeftCorner(n, n);
  return s * c0 * s.transpose();
}

DenseCovariance assemble(const std::vector<StructuredBlock>& blocks, const Partition& partition) {
  if (blocks.size() != partition.blocks()) throw InvalidArgument("one block per partition part is required");
  const auto n = static_cast<Eigen::Index>(partition.total());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    const auto o = static_cast<Eigen::Index>(partition.offset(j));
    const auto nj = static_cast<Eigen::Index>(partition.size(j));
    if (blocks[j].size != partition.size(j)) throw InvalidArgument("block size does not match the partition");
    c.block(o, o, nj, nj) = blocks[j].xx.dense(blocks[j].size);
    c.block(o, n + o, nj, nj) = blocks[j].xp.dense(blocks[j].size);
    c.block(n + o, o, nj, nj) = blocks[j].xp.dense(blocks[j].size);
    c.block(n + o, n + o, nj, nj) = blocks[j].pp.dense(blocks[j].size);
  }
  return DenseCovariance(std::move(c));
}

Eigen::MatrixXd separable_G(const Partition& partition, double R) {
  const auto n = static_cast<Eigen::Index>(partition.total());
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t j = 0; j < partition.blocks(); ++j) {
    const auto o = static_cast<Eigen::Index>(partition.offset(j));
    const auto nj = static_cast<Eigen::Index>(partition.size(j));
    g.block(o, o, nj, nj) = g_block(j, partition, R).dense(partition.size(j));
  }
  return g;
}

Eigen::MatrixXd entangled_G(std::size_t n, double R) {
  const auto m = static_cast<Eigen::Index>(n);
  return (1.0 + R * double(n)) * Eigen::MatrixXd::Identity(m, m) - R * Eigen::MatrixXd::Ones(m, m);
}

Eigen::MatrixXd symplectic_propagator(const Eigen::MatrixXd& G, double tau) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  const Eigen::VectorXd w = es.eigenvalues().cwiseSqrt();
  if (es.eigenvalues().minCoeff() <= 0) throw DomainError("G must be positive definite");
  const Eigen::MatrixXd& v = es.eigenvectors();
  const Eigen::VectorXd cs = (w * tau).array().cos();
  const Eigen::VectorXd sn = (w * tau).array().sin();
  const auto n = G.rows();
  Eigen::MatrixXd s(2 * n, 2 * n);
  s.topLeftCorner(n, n) = v * cs.asDiagonal() * v.transpose();
  s.topRightCorner(n, n) = v * sn.cwiseQuotient(w).asDiagonal() * v.transpose();
  s.bottomLeftCorner(n, n) = -(v * sn.cwiseProduct(w).asDiagonal() * v.transpose());
  s.bottomRightCorner(n, n) = s.topLeftCorner(n, n);
  return s;
}

std::vector<DenseCovariance> dense_oracle(const DenseCovariance& c0, const Eigen::MatrixXd& G,
                                          std::span<const double> tau_grid, const ode::Options& opts) {
  const std::size_t n = c0.modes();
  if (n > kDenseOracleMaxModes) {
    std::ostringstream os;
    os << "dense oracle is limited to N <= " << kDenseOracleMaxModes << " (got " << n << ")";
    throw SizeGuardError(os.str());
  }
  if (G.rows() != static_cast<Eigen::Index>(n) || G.cols() != G.rows()) throw InvalidArgument("G must be N x N");
  const auto m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  a.topRightCorner(m, m).setIdentity();
  a.bottomLeftCorner(m, m) = -G;

  std::vector<double> y(c0.matrix().data(), c0.matrix().data() + c0.matrix().size());
  std::vector<DenseCovariance> out;
  out.reserve(tau_grid.size());
  Eigen::MatrixXd ac(2 * m, 2 * m);
  ode::integrate(
      [&](double, std::span<const double> yy, std::span<double> dy) {
        Eigen::Map<const Eigen::MatrixXd> c(yy.data(), 2 * m, 2 * m);
        Eigen::Map<Eigen::MatrixXd> dc(dy.data(), 2 * m, 2 * m);
        ac.noalias() = a * c;
        dc = ac + ac.transpose();
      },
      y, tau_grid,
      [&](std::size_t, double, std::span<const double> yy) {
        Eigen::Map<const Eigen::MatrixXd> c(yy.data(), 2 * m, 2 * m);
        // Symmetrize away rounding asymmetry before validation.
        out.emplace_back(Eigen::MatrixXd(0.5 * (c + c.transpose())));
      },
      opts);
  return out;
}

FirstMoments mean_propagation(const FirstMoments& m0, const Partition& partition, double R, double tau) {
  const auto n = static_cast<Eigen::Index>(partition.total());
  if (m0.xi.size() != n || m0.pi.size() != n) throw InvalidArgument("first moments must have N entries");
  if (!(R >= 0)) throw DomainError("coupling R must be non-negative");
  // Full-system G = (1 + R N) E - R n n^T: frequency 1 along n, sqrt(1 + R N) orthogonal.
  const double w_perp = std::sqrt(1.0 + R * double(n));
  const double xi_mean = m0.xi.mean();
  const double pi_mean = m0.pi.mean();
  const Eigen::VectorXd xi_perp = m0.xi.array() - xi_mean;
  const Eigen::VectorXd pi_perp = m0.pi.array() - pi_mean;
  const double cp = std::cos(tau), sp = std::sin(tau);
  const double cq = std::cos(w_perp * tau), sq = std::sin(w_perp * tau);
  FirstMoments out;
  out.xi = (cq * xi_perp + (sq / w_perp) * pi_perp).array() + (cp * xi_mean + sp * pi_mean);
  out.pi = (-w_perp * sq * xi_perp + cq * pi_perp).array() + (-sp * xi_mean + cp * pi_mean);
  return out;
}

double amplitude_rK(const Partition& balanced, double R) {
  if (!balanced.is_balanced()) throw DomainError("r_K needs a balanced partition");
  return R * double(balanced.total()) * (1.0 - 1.0 / double(balanced.blocks()));
}

double variance_mean_momentum(const Partition& partition, double R, double beta, double tau) {
  if (!partition.is_balanced())
    throw DomainError("closed-form variance needs a balanced partition; use propagate_block for unbalanced ones");
  if (!(R >= 0) || !std::isfinite(R)) throw DomainError("coupling R must be non-negative and finite");
  const double sigma = thermal_variance(beta);
  const double r = amplitude_rK(partition, R);
  const double s = std::sin(std::sqrt(1.0 + r) * tau);
  return sigma / double(partition.total()) * (1.0 + r * s * s);
}

double variance_mean_momentum_physical(const Partition& partition, double R, double beta, double tau, double hbar,
                                       double mass, double omega) {
  return hbar * mass * omega * variance_mean_momentum(partition, R, beta, tau);
}

double variance_mean_momentum(const std::vector<StructuredBlock>& blocks, const Partition& partition) {
  if (blocks.size() != partition.blocks()) throw InvalidArgument("one block per partition part is required");
  // n_j^T (a E + b n_j n_j^T / N_j) n_j = N_j (a + b)
  double s = 0.0;
  for (std::size_t j = 0; j < blocks.size(); ++j) s += double(partition.size(j)) * blocks[j].pp.parallel();
  const double n = double(partition.total());
  return s / (n * n);
}

SweepResult variance_ratio_sweep(std::size_t N, std::span<const std::size_t> K_list, double R, std::span<const double> tau_grid,
                       double beta) {
  SweepResult res{N, R, beta, {}, {}};
  const double beta_check = 2.0 * beta + 1.0;
  for (std::size_t K : K_list) {
    const Partition part = Partition::balanced(N, K);
    const double v0 = variance_mean_momentum(part, R, beta, 0.0);
    const double v0_check = variance_mean_momentum(part, R, beta_check, 0.0);
    for (double tau : tau_grid) {
      const double ratio = variance_mean_momentum(part, R, beta, tau) / v0;
      const double ratio_check = variance_mean_momentum(part, R, beta_check, tau) / v0_check;
      if (std::abs(ratio - ratio_check) > 1e-12) {
        std::ostringstream os;
        os << "ratio depends on temperature at K=" << K << ", tau=" << tau;
        throw NumericDomainError(os.str());
      }
      res.rows.push_back({tau, K, ratio});
    }
    const double r = amplitude_rK(part, R);
    const double q = std::sqrt(1.0 + r);
    res.curves.push_back({K, r, 1.0 + r, std::numbers::pi / (2.0 * q), std::numbers::pi / q});
  }
  return res;
}

}  // namespace clevo::separable
