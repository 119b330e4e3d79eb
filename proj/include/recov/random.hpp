#ifndef RECOV_RANDOM_HPP
#define RECOV_RANDOM_HPP

#include <cstdint>
#include <random>

#include "recov/linalg.hpp"

namespace recov {

using Rng = std::mt19937_64;

/// Independent stream seed for sample `index` of a campaign seeded with `master`.
/// Streams do not depend on evaluation order, so samples may run in any order.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index)
{
  // splitmix64 finalizer over a golden-ratio stride
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Matrix of i.i.d. standard complex Gaussians (Ginibre ensemble).
template <typename Real = double>
CMatrix<Real> ginibre(Index rows, Index cols, Rng& rng)
{
  std::normal_distribution<Real> normal(Real(0), Real(1));
  CMatrix<Real> g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const Real re = normal(rng);
      const Real im = normal(rng);
      g(i, j) = std::complex<Real>(re, im);
    }
  return g;
}

/// Haar-distributed isometry with `cols` orthonormal columns in dimension `rows`.
template <typename Real = double>
CMatrix<Real> haar_isometry(Index rows, Index cols, Rng& rng)
{
  if (cols > rows)
    throw std::invalid_argument("haar_isometry: more columns than rows");
  const CMatrix<Real> g = ginibre<Real>(rows, cols, rng);
  Eigen::HouseholderQR<CMatrix<Real>> qr(g);
  CMatrix<Real> q = qr.householderQ() * CMatrix<Real>::Identity(rows, cols);
  const CMatrix<Real> r = qr.matrixQR();
  // fix column phases so the distribution is exactly Haar
  for (Index k = 0; k < cols; ++k) {
    const std::complex<Real> d = r(k, k);
    const Real a = std::abs(d);
    if (a > Real(0))
      q.col(k) *= d / a;
  }
  return q;
}

template <typename Real = double>
CMatrix<Real> haar_unitary(Index n, Rng& rng)
{
  return haar_isometry<Real>(n, n, rng);
}

}  // namespace recov

#endif  // RECOV_RANDOM_HPP
