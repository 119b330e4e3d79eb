#ifndef RECOV_STATES_HPP
#define RECOV_STATES_HPP

#include <cstdint>
#include <vector>

#include "recov/linalg.hpp"
#include "recov/random.hpp"

namespace recov {

/// Hermitian, positive semidefinite, unit-trace matrix with its subsystem dimensions.
///
/// Instances only come out of new_density() (or constructors built on it), so
/// every DensityMatrix satisfies: Hermitian, eigenvalues >= -1e-10, |tr - 1| <= 1e-10.
class DensityMatrix {
 public:
  const ComplexMatrix& matrix() const { return matrix_; }
  const DimVector& dims() const { return dims_; }
  Index size() const { return matrix_.rows(); }
  std::size_t num_subsystems() const { return dims_.size(); }

  /// Reduced state on the listed subsystems (kept in original order).
  DensityMatrix marginal(std::vector<std::size_t> keep) const;

  /// Reorders subsystems; output subsystem k is input subsystem perm[k].
  DensityMatrix permuted(const std::vector<std::size_t>& perm) const;

  Spectrum<double> spectrum() const { return herm_eig(matrix_); }

 private:
  friend DensityMatrix new_density(const ComplexMatrix& m, DimVector dims);
  DensityMatrix(ComplexMatrix m, DimVector dims);

  ComplexMatrix matrix_;
  DimVector dims_;
};

/// Validates and wraps a matrix as a density operator.
///
/// The input is Hermitized; a trace within 1e-8 of one is renormalized.
/// Throws std::domain_error for eigenvalues below -1e-10, a larger trace
/// deviation, non-finite entries, or a non-Hermitian input (beyond 1e-8).
DensityMatrix new_density(const ComplexMatrix& m, DimVector dims);

/// Subsystem index sets of a tripartite split A:B:C; A may group several factors.
struct TripartiteLabels {
  std::vector<std::size_t> a{0};
  std::vector<std::size_t> b{1};
  std::vector<std::size_t> c{2};

  /// Throws std::invalid_argument unless the sets are disjoint and cover [0, n).
  void validate(std::size_t n) const;

  std::vector<std::size_t> ab() const;
  std::vector<std::size_t> bc() const;
};

/// Haar-purification ensemble: partial trace of a Haar-random pure state on
/// system (x) ancilla(rank). Deterministic in the generator state.
DensityMatrix random_density(const DimVector& dims, Index rank, Rng& rng);
DensityMatrix random_density(const DimVector& dims, Index rank, std::uint64_t seed);

inline DensityMatrix random_pure_state(const DimVector& dims, Rng& rng)
{
  return random_density(dims, 1, rng);
}

/// 1/2 |000><000| + 1/8 |1><1|_A (x) id_BC on three qubits.
DensityMatrix appendix_f_state();

/// sum_b P(b) |b><b|_B (x) rho_AC[b], stored in A (x) B (x) C order.
DensityMatrix qcq_state(const std::vector<double>& probabilities,
                        const std::vector<DensityMatrix>& rho_ac);

/// qcq state whose blocks are products rho_A[b] (x) rho_C[b], all random:
/// a quantum Markov chain A - B - C.
DensityMatrix random_markov_state(const DimVector& dims, Rng& rng);

/// Diagonal state p(b) p(a|b) p(c|b) with random conditionals.
DensityMatrix random_classical_chain(const DimVector& dims, Rng& rng);

/// (1 - p) |0><0| (x) rho0 + p |1><1| (x) rho1 with the flag as leftmost factor.
DensityMatrix flag_extension(const DensityMatrix& rho0, const DensityMatrix& rho1, double p);

/// Labels for a flag_extension output of a tripartite state: flag joins A.
inline TripartiteLabels flagged_labels()
{
  return TripartiteLabels{{0, 1}, {2}, {3}};
}

/// Pure state on system (x) ancilla reproducing rho as its marginal.
/// The ancilla dimension defaults to the rank of rho; a larger value pads with
/// unused levels.
DensityMatrix purify(const DensityMatrix& rho, Index ancilla_dim = 0);

/// Extension rho_ABC of a fixed rho_BC: a purification of rho_BC has a Haar-random
/// isometry E -> A (x) E' applied to its purifying system, and E' is traced out.
DensityMatrix random_extension(const DensityMatrix& rho_bc, Index dim_a, Rng& rng);

bool is_pure(const DensityMatrix& rho, double tol = 1e-9);

/// Block-diagonal direct sum a (+) b.
ComplexMatrix direct_sum(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace recov

#endif  // RECOV_STATES_HPP
