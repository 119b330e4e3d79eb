#include "recov/states.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace recov {

namespace {

constexpr double kHermitianTol = 1e-8;
constexpr double kNegativeEigTol = 1e-10;
constexpr double kTraceTol = 1e-8;
// Renormalizing a trace that is already 1 to rounding would perturb the bits
// of every stored state; leave those alone.
constexpr double kRenormalizeAbove = 1e-12;

}  // namespace

DensityMatrix::DensityMatrix(ComplexMatrix m, DimVector dims)
    : matrix_(std::move(m)), dims_(std::move(dims))
{
}

DensityMatrix DensityMatrix::marginal(std::vector<std::size_t> keep) const
{
  std::sort(keep.begin(), keep.end());
  DimVector kept;
  for (std::size_t k : keep)
    kept.push_back(dims_.at(k));
  return new_density(partial_trace(matrix_, dims_, keep), kept);
}

DensityMatrix DensityMatrix::permuted(const std::vector<std::size_t>& perm) const
{
  return DensityMatrix(permute_subsystems(matrix_, dims_, perm), permute_dims(dims_, perm));
}

DensityMatrix new_density(const ComplexMatrix& m, DimVector dims)
{
  require_square(m, "new_density");
  if (m.rows() != dim_product(dims))
    throw std::invalid_argument("new_density: dims do not match matrix size");
  if (!all_finite(m))
    throw std::domain_error("new_density: non-finite entries");
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol)
    throw std::domain_error("new_density: matrix is not Hermitian");

  ComplexMatrix h = hermitian_part(m);
  const double tr = h.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol)
    throw std::domain_error("new_density: trace deviates from 1 by " +
                            std::to_string(std::abs(tr - 1.0)));
  if (std::abs(tr - 1.0) > kRenormalizeAbove)
    h /= tr;

  const auto s = herm_eig(h);
  if (s.size() > 0 && s.values(s.size() - 1) < -kNegativeEigTol)
    throw std::domain_error("new_density: matrix is not positive semidefinite (eigenvalue " +
                            std::to_string(s.values(s.size() - 1)) + ")");
  return DensityMatrix(std::move(h), std::move(dims));
}

void TripartiteLabels::validate(std::size_t n) const
{
  std::vector<int> hits(n, 0);
  for (const auto* part : {&a, &b, &c}) {
    if (part->empty())
      throw std::invalid_argument("TripartiteLabels: empty part");
    for (std::size_t k : *part) {
      if (k >= n)
        throw std::invalid_argument("TripartiteLabels: index out of range");
      ++hits[k];
    }
  }
  for (int h : hits)
    if (h != 1)
      throw std::invalid_argument("TripartiteLabels: parts must be disjoint and cover all subsystems");
}

std::vector<std::size_t> TripartiteLabels::ab() const
{
  std::vector<std::size_t> out(a);
  out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> TripartiteLabels::bc() const
{
  std::vector<std::size_t> out(b);
  out.insert(out.end(), c.begin(), c.end());
  std::sort(out.begin(), out.end());
  return out;
}

DensityMatrix random_density(const DimVector& dims, Index rank, Rng& rng)
{
  const Index n = dim_product(dims);
  if (rank < 1 || rank > n)
    throw std::invalid_argument("random_density: rank out of range");
  // A Ginibre n x rank matrix is the coefficient matrix of a Gaussian vector on
  // system (x) ancilla; normalizing G G^dagger gives the induced measure.
  const ComplexMatrix g = ginibre(n, rank, rng);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return new_density(rho, dims);
}

DensityMatrix random_density(const DimVector& dims, Index rank, std::uint64_t seed)
{
  Rng rng(seed);
  return random_density(dims, rank, rng);
}

DensityMatrix appendix_f_state()
{
  ComplexMatrix rho = ComplexMatrix::Zero(8, 8);
  ComplexMatrix zero = ComplexMatrix::Zero(2, 2);
  zero(0, 0) = 1.0;
  ComplexMatrix one = ComplexMatrix::Zero(2, 2);
  one(1, 1) = 1.0;
  rho += 0.5 * tensor(tensor(zero, zero), zero);
  rho += 0.125 * tensor(one, identity<double>(4));
  return new_density(rho, {2, 2, 2});
}

DensityMatrix qcq_state(const std::vector<double>& probabilities,
                        const std::vector<DensityMatrix>& rho_ac)
{
  const auto dim_b = static_cast<Index>(probabilities.size());
  if (dim_b == 0 || rho_ac.size() != probabilities.size())
    throw std::invalid_argument("qcq_state: need one A(x)C block per classical value");
  double total = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0))
      throw std::invalid_argument("qcq_state: negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-10)
    throw std::invalid_argument("qcq_state: probabilities do not sum to 1");
  const DimVector ac_dims = rho_ac.front().dims();
  if (ac_dims.size() != 2)
    throw std::invalid_argument("qcq_state: blocks must be bipartite A(x)C states");
  for (const auto& r : rho_ac)
    if (r.dims() != ac_dims)
      throw std::invalid_argument("qcq_state: block dimension mismatch");

  const Index n_ac = dim_product(ac_dims);
  ComplexMatrix bac = ComplexMatrix::Zero(dim_b * n_ac, dim_b * n_ac);
  for (Index b = 0; b < dim_b; ++b)
    bac.block(b * n_ac, b * n_ac, n_ac, n_ac) = probabilities[b] * rho_ac[b].matrix();
  const DimVector bac_dims{dim_b, ac_dims[0], ac_dims[1]};
  // B (x) A (x) C -> A (x) B (x) C
  const std::vector<std::size_t> perm{1, 0, 2};
  return new_density(permute_subsystems(bac, bac_dims, perm), permute_dims(bac_dims, perm));
}

namespace {

std::vector<double> random_distribution(Index n, Rng& rng)
{
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> p(static_cast<std::size_t>(n));
  double total = 0.0;
  for (double& x : p)
    total += (x = expo(rng));
  for (double& x : p)
    x /= total;
  return p;
}

void require_tripartite(const DimVector& dims, const char* what)
{
  if (dims.size() != 3 || dim_product(dims) < 1)
    throw std::invalid_argument(std::string(what) + ": expected dims (dA, dB, dC)");
}

}  // namespace

DensityMatrix random_markov_state(const DimVector& dims, Rng& rng)
{
  require_tripartite(dims, "random_markov_state");
  const auto p = random_distribution(dims[1], rng);
  std::vector<DensityMatrix> blocks;
  for (Index b = 0; b < dims[1]; ++b) {
    const DensityMatrix a = random_density({dims[0]}, dims[0], rng);
    const DensityMatrix c = random_density({dims[2]}, dims[2], rng);
    blocks.push_back(new_density(tensor(a.matrix(), c.matrix()), {dims[0], dims[2]}));
  }
  return qcq_state(p, blocks);
}

DensityMatrix random_classical_chain(const DimVector& dims, Rng& rng)
{
  require_tripartite(dims, "random_classical_chain");
  const auto pb = random_distribution(dims[1], rng);
  ComplexMatrix m = ComplexMatrix::Zero(dim_product(dims), dim_product(dims));
  for (Index b = 0; b < dims[1]; ++b) {
    const auto pa = random_distribution(dims[0], rng);
    const auto pc = random_distribution(dims[2], rng);
    for (Index a = 0; a < dims[0]; ++a)
      for (Index c = 0; c < dims[2]; ++c) {
        const Index k = (a * dims[1] + b) * dims[2] + c;
        m(k, k) = pb[static_cast<std::size_t>(b)] * pa[static_cast<std::size_t>(a)] *
                  pc[static_cast<std::size_t>(c)];
      }
  }
  return new_density(m, dims);
}

DensityMatrix flag_extension(const DensityMatrix& rho0, const DensityMatrix& rho1, double p)
{
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("flag_extension: p outside [0, 1]");
  if (rho0.dims() != rho1.dims())
    throw std::invalid_argument("flag_extension: dimension mismatch");
  ComplexMatrix f0 = ComplexMatrix::Zero(2, 2);
  f0(0, 0) = 1.0;
  ComplexMatrix f1 = ComplexMatrix::Zero(2, 2);
  f1(1, 1) = 1.0;
  const ComplexMatrix m = (1.0 - p) * tensor(f0, rho0.matrix()) + p * tensor(f1, rho1.matrix());
  DimVector dims{2};
  dims.insert(dims.end(), rho0.dims().begin(), rho0.dims().end());
  return new_density(m, dims);
}

DensityMatrix purify(const DensityMatrix& rho, Index ancilla_dim)
{
  const auto s = rho.spectrum();
  const Index rank = std::max<Index>(support_rank(s), 1);
  const Index anc = ancilla_dim == 0 ? rank : ancilla_dim;
  if (anc < rank)
    throw std::invalid_argument("purify: ancilla dimension below the rank");
  const Index n = rho.size();
  // |psi> = sum_k sqrt(lambda_k) |v_k> (x) |k>
  ComplexVector psi = ComplexVector::Zero(n * anc);
  for (Index k = 0; k < rank; ++k) {
    const double lambda = std::max(s.values(k), 0.0);
    for (Index i = 0; i < n; ++i)
      psi(i * anc + k) = std::sqrt(lambda) * s.vectors(i, k);
  }
  psi.normalize();
  DimVector dims = rho.dims();
  dims.push_back(anc);
  return new_density(psi * psi.adjoint(), dims);
}

DensityMatrix random_extension(const DensityMatrix& rho_bc, Index dim_a, Rng& rng)
{
  if (rho_bc.num_subsystems() != 2)
    throw std::invalid_argument("random_extension: expected a bipartite B(x)C marginal");
  if (dim_a < 1)
    throw std::invalid_argument("random_extension: dim_a must be >= 1");
  const DensityMatrix pure = purify(rho_bc);
  const Index e = pure.dims().back();
  const Index n_bc = rho_bc.size();
  // dim(A (x) E') >= dim(E) for any dim_a >= 1
  const Index e2 = e;
  const ComplexMatrix v = haar_isometry(dim_a * e2, e, rng);
  const ComplexMatrix lifted = tensor(identity<double>(n_bc), v);
  const ComplexMatrix full = lifted * pure.matrix() * lifted.adjoint();
  const DimVector dims{rho_bc.dims()[0], rho_bc.dims()[1], dim_a, e2};
  const ComplexMatrix bca = partial_trace(full, dims, {0, 1, 2});
  const DimVector bca_dims{rho_bc.dims()[0], rho_bc.dims()[1], dim_a};
  const std::vector<std::size_t> perm{2, 0, 1};
  return new_density(permute_subsystems(bca, bca_dims, perm), permute_dims(bca_dims, perm));
}

bool is_pure(const DensityMatrix& rho, double tol)
{
  const double purity = (rho.matrix() * rho.matrix()).trace().real();
  return std::abs(purity - 1.0) <= tol;
}

ComplexMatrix direct_sum(const ComplexMatrix& a, const ComplexMatrix& b)
{
  ComplexMatrix out = ComplexMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

}  // namespace recov
