#ifndef RECOV_ENTROPY_HPP
#define RECOV_ENTROPY_HPP

#include <cstdint>
#include <limits>

#include "recov/states.hpp"

namespace recov {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Entropies (bits) entering I(A:C|B) = H(AB) + H(BC) - H(B) - H(ABC).
struct EntropyReport {
  double h_ab = 0.0;
  double h_bc = 0.0;
  double h_b = 0.0;
  double h_abc = 0.0;
  double cmi = 0.0;
};

/// -tr(rho log2 rho); eigenvalues clamped at zero, 0 log 0 = 0.
double von_neumann(const DensityMatrix& rho);
double von_neumann(const ComplexMatrix& psd);

EntropyReport cmi(const DensityMatrix& rho, const TripartiteLabels& labels = {});

/// Umegaki relative entropy in bits; +infinity unless supp(rho) is inside supp(sigma).
double relative_entropy(const DensityMatrix& rho, const ComplexMatrix& sigma);

struct MeasuredRelEntOptions {
  double tolerance = 1e-7;  ///< stop once the Newton decrement falls below this (bits)
  int max_iterations = 200;
};

struct MeasuredRelEntResult {
  double value = 0.0;       ///< bits; a certified lower bound on D_M
  double omega_value = 0.0; ///< variational objective at the final omega (bits)
  double basis_value = 0.0; ///< classical divergence measured in omega's eigenbasis (bits)
  double decrement = 0.0;   ///< final Newton decrement (bits)
  int iterations = 0;
  bool converged = false;
};

/// Measured relative entropy via sup_{omega > 0} tr(rho ln omega) + 1 - tr(sigma omega),
/// optimized over omega by damped Newton. The reported value is the larger
/// of the variational objective and the divergence of the projective measurement in
/// the eigenbasis of the optimal omega; both are achievable lower bounds on D_M.
MeasuredRelEntResult measured_relative_entropy_detail(const DensityMatrix& rho,
                                                      const ComplexMatrix& sigma,
                                                      const MeasuredRelEntOptions& opts = {});

inline double measured_relative_entropy(const DensityMatrix& rho, const ComplexMatrix& sigma,
                                        const MeasuredRelEntOptions& opts = {})
{
  return measured_relative_entropy_detail(rho, sigma, opts).value;
}

/// Classical relative entropy (bits) of the outcome distributions of the
/// projective measurement onto the columns of `basis`.
double measured_in_basis(const ComplexMatrix& rho, const ComplexMatrix& sigma,
                         const ComplexMatrix& basis);

/// Monte-Carlo lower bound on D_M: best of n_samples Haar-random orthonormal
/// bases plus the eigenbases of rho and sigma.
double measured_rel_ent_lower(const DensityMatrix& rho, const ComplexMatrix& sigma,
                              int n_samples, std::uint64_t seed);

/// Kullback-Leibler divergence of two distributions in bits.
double classical_kl(const RealVector& p, const RealVector& q);

}  // namespace recov

#endif  // RECOV_ENTROPY_HPP
