#ifndef RECOV_LINALG_HPP
#define RECOV_LINALG_HPP

// Dense complex kernel: Hermitian spectra, matrix functions restricted to
// supports, tensor structure (Kronecker products, partial traces, subsystem
// permutations), trace norm and fidelity.
//
// Subsystem ordering is big-endian throughout: in A (x) B the A index is the
// most significant digit of the composite index.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

namespace recov {

using Index = Eigen::Index;

template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using ComplexMatrix = CMatrix<double>;
using ComplexVector = CVector<double>;
using RealVector = RVector<double>;
using Complex = std::complex<double>;

/// Ordered subsystem dimensions of a composite Hilbert space.
using DimVector = std::vector<Index>;

/// Eigenvalues at or below rank_tol * lambda_max are treated as zero.
inline constexpr double kDefaultRankTol = 1e-10;

inline Index dim_product(const DimVector& dims)
{
  Index n = 1;
  for (Index d : dims) {
    if (d < 1)
      throw std::invalid_argument("subsystem dimension must be >= 1");
    n *= d;
  }
  return n;
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m)
{
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) {
      const auto v = m(i, j);
      if (!std::isfinite(std::real(v)) || !std::isfinite(std::imag(v)))
        return false;
    }
  return true;
}

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& m, const char* what)
{
  if (m.rows() != m.cols())
    throw std::invalid_argument(std::string(what) + ": matrix is not square");
}

template <typename Derived>
auto hermitian_part(const Eigen::MatrixBase<Derived>& m)
{
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  CMatrix<Real> h = (m.template cast<std::complex<Real>>() +
                     m.template cast<std::complex<Real>>().adjoint()) /
                    Real(2);
  return h;
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues in descending order.
template <typename Real>
struct Spectrum {
  RVector<Real> values;
  CMatrix<Real> vectors;  ///< column k belongs to values(k)

  Index size() const { return values.size(); }

  CMatrix<Real> reconstruct() const
  {
    return vectors * values.template cast<std::complex<Real>>().asDiagonal() *
           vectors.adjoint();
  }

  Real max_abs() const { return size() == 0 ? Real(0) : values.cwiseAbs().maxCoeff(); }
};

template <typename Derived>
auto herm_eig(const Eigen::MatrixBase<Derived>& h)
{
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  require_square(h, "herm_eig");
  if (!all_finite(h))
    throw std::domain_error("herm_eig: non-finite entries");

  const CMatrix<Real> sym = hermitian_part(h);
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> solver(sym);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("herm_eig: eigensolver did not converge");

  const Index n = sym.rows();
  Spectrum<Real> s;
  s.values.resize(n);
  s.vectors.resize(n, n);
  // Eigen returns ascending order
  for (Index k = 0; k < n; ++k) {
    s.values(k) = solver.eigenvalues()(n - 1 - k);
    s.vectors.col(k) = solver.eigenvectors().col(n - 1 - k);
  }
  return s;
}

/// Number of eigenvalues strictly above rank_tol * lambda_max.
template <typename Real>
Index support_rank(const Spectrum<Real>& s, Real rank_tol = Real(kDefaultRankTol))
{
  const Real cut = rank_tol * s.max_abs();
  Index r = 0;
  for (Index k = 0; k < s.size(); ++k)
    if (s.values(k) > cut)
      ++r;
  return r;
}

/// Applies f to the eigenvalues of a PSD matrix on its support only.
///
/// Eigenvalues at or below rank_tol * lambda_max contribute nothing,
/// whatever f would return there; eigenvalues below -rank_tol * lambda_max
/// mean the input is not PSD and raise std::domain_error.
template <typename Real, typename Func>
CMatrix<Real> matrix_func_on_support(const Spectrum<Real>& s, Func&& f,
                                     Real rank_tol = Real(kDefaultRankTol))
{
  const Index n = s.size();
  const Real scale = s.max_abs();
  const Real cut = rank_tol * scale;
  CVector<Real> fvals = CVector<Real>::Zero(n);
  for (Index k = 0; k < n; ++k) {
    const Real lambda = s.values(k);
    if (lambda < -cut)
      throw std::domain_error("matrix_func_on_support: matrix is not positive semidefinite");
    if (lambda <= cut)
      continue;
    const std::complex<Real> v(f(lambda));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::domain_error("matrix_func_on_support: function is not finite on the support");
    fvals(k) = v;
  }
  return s.vectors * fvals.asDiagonal() * s.vectors.adjoint();
}

template <typename Derived, typename Func>
auto matrix_func_on_support(const Eigen::MatrixBase<Derived>& h, Func&& f,
                            typename Eigen::NumTraits<typename Derived::Scalar>::Real rank_tol =
                                kDefaultRankTol)
{
  return matrix_func_on_support(herm_eig(h), std::forward<Func>(f), rank_tol);
}

/// Orthogonal projector onto the support of a PSD matrix.
template <typename Real>
CMatrix<Real> support_projector(const Spectrum<Real>& s, Real rank_tol = Real(kDefaultRankTol))
{
  return matrix_func_on_support(s, [](Real) { return Real(1); }, rank_tol);
}

template <typename Real>
CMatrix<Real> sqrt_psd(const Spectrum<Real>& s, Real rank_tol = Real(kDefaultRankTol))
{
  return matrix_func_on_support(s, [](Real x) { return std::sqrt(x); }, rank_tol);
}

template <typename Derived>
auto sqrt_psd(const Eigen::MatrixBase<Derived>& h)
{
  return sqrt_psd(herm_eig(h));
}

/// H^z on the support of H for a complex exponent z (covers H^{-1/2} and H^{it}).
template <typename Real>
CMatrix<Real> power_on_support(const Spectrum<Real>& s, std::complex<Real> z,
                               Real rank_tol = Real(kDefaultRankTol))
{
  return matrix_func_on_support(
      s, [z](Real x) { return std::exp(z * std::log(x)); }, rank_tol);
}

/// Kronecker product; the left factor is the more significant index.
template <typename DerivedA, typename DerivedB>
auto tensor(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b)
{
  using Scalar = typename DerivedA::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
      Eigen::kroneckerProduct(a.derived(), b.template cast<Scalar>().eval());
  return out;
}

template <typename Real>
CMatrix<Real> identity(Index n)
{
  return CMatrix<Real>::Identity(n, n);
}

namespace detail {

inline std::vector<Index> strides_of(const DimVector& dims)
{
  std::vector<Index> strides(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;)
    strides[k - 1] = strides[k] * dims[k];
  return strides;
}

// Composite index of the digits selected by `which` (big-endian).
inline Index sub_index(Index full, const DimVector& dims, const std::vector<Index>& strides,
                       const std::vector<std::size_t>& which)
{
  Index out = 0;
  for (std::size_t k : which)
    out = out * dims[k] + (full / strides[k]) % dims[k];
  return out;
}

}  // namespace detail

/// Partial trace keeping the subsystems listed in `keep` (in their original order).
template <typename Derived>
auto partial_trace(const Eigen::MatrixBase<Derived>& m, const DimVector& dims,
                   std::vector<std::size_t> keep)
{
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  require_square(m, "partial_trace");
  const Index n = dim_product(dims);
  if (m.rows() != n)
    throw std::invalid_argument("partial_trace: dims do not match matrix size");
  std::sort(keep.begin(), keep.end());
  if (std::adjacent_find(keep.begin(), keep.end()) != keep.end())
    throw std::invalid_argument("partial_trace: repeated subsystem index");
  for (std::size_t k : keep)
    if (k >= dims.size())
      throw std::invalid_argument("partial_trace: subsystem index out of range");

  std::vector<std::size_t> traced;
  for (std::size_t k = 0; k < dims.size(); ++k)
    if (!std::binary_search(keep.begin(), keep.end(), k))
      traced.push_back(k);

  Index dk = 1;
  for (std::size_t k : keep)
    dk *= dims[k];

  const auto strides = detail::strides_of(dims);
  Mat out = Mat::Zero(dk, dk);
  // Each full index splits into (kept, traced) digits; accumulate diagonal
  // blocks in the traced digits.
  std::vector<Index> kept_of(n), traced_of(n);
  for (Index i = 0; i < n; ++i) {
    kept_of[i] = detail::sub_index(i, dims, strides, keep);
    traced_of[i] = detail::sub_index(i, dims, strides, traced);
  }
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i)
      if (traced_of[i] == traced_of[j])
        out(kept_of[i], kept_of[j]) += m(i, j);
  return out;
}

/// Reorders tensor factors: output factor k is input factor perm[k].
template <typename Derived>
auto permute_subsystems(const Eigen::MatrixBase<Derived>& m, const DimVector& dims,
                        const std::vector<std::size_t>& perm)
{
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  require_square(m, "permute_subsystems");
  const Index n = dim_product(dims);
  if (m.rows() != n || perm.size() != dims.size())
    throw std::invalid_argument("permute_subsystems: inconsistent dims");
  std::vector<bool> seen(dims.size(), false);
  for (std::size_t p : perm) {
    if (p >= dims.size() || seen[p])
      throw std::invalid_argument("permute_subsystems: not a permutation");
    seen[p] = true;
  }
  const auto strides = detail::strides_of(dims);
  std::vector<Index> target(n);
  for (Index i = 0; i < n; ++i)
    target[i] = detail::sub_index(i, dims, strides, perm);
  Mat out(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i)
      out(target[i], target[j]) = m(i, j);
  return out;
}

inline DimVector permute_dims(const DimVector& dims, const std::vector<std::size_t>& perm)
{
  DimVector out;
  out.reserve(perm.size());
  for (std::size_t p : perm)
    out.push_back(dims.at(p));
  return out;
}

/// Sum of singular values.
template <typename Derived>
auto trace_norm(const Eigen::MatrixBase<Derived>& m)
{
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  using Mat = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (m.size() == 0)
    return Real(0);
  Eigen::JacobiSVD<Mat> svd(m.derived().eval());
  return static_cast<Real>(svd.singularValues().sum());
}

/// Fidelity ||sqrt(rho) sqrt(sigma)||_1 of two PSD operators (not necessarily normalized).
template <typename DerivedA, typename DerivedB>
auto fidelity(const Eigen::MatrixBase<DerivedA>& rho, const Eigen::MatrixBase<DerivedB>& sigma)
{
  require_square(rho, "fidelity");
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
    throw std::invalid_argument("fidelity: size mismatch");
  const auto a = sqrt_psd(herm_eig(rho));
  const auto b = sqrt_psd(herm_eig(sigma));
  return trace_norm(a * b);
}

}  // namespace recov

#endif  // RECOV_LINALG_HPP
