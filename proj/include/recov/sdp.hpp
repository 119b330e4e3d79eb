#ifndef RECOV_SDP_HPP
#define RECOV_SDP_HPP

// Small dense semidefinite programming.
//
// Standard form over a product of real symmetric PSD blocks:
//
//   primal:  minimize <C, X>  subject to  <A_i, X> = b_i,  X >= 0
//   dual:    maximize b^T y   subject to  C - sum_i y_i A_i = Z >= 0
//
// Coefficient matrices are given as entry lists and act through
// <A, X> = sum over entries of value * X(row, col), i.e. only their symmetric
// part matters.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "recov/linalg.hpp"

namespace recov {

struct SdpEntry {
  std::size_t block = 0;
  Index row = 0;
  Index col = 0;
  double value = 0.0;
};

struct SdpConstraint {
  std::vector<SdpEntry> entries;
  double rhs = 0.0;
};

struct SdpProblem {
  std::vector<Index> blocks;          ///< side length of each PSD block
  std::vector<SdpEntry> objective;    ///< C
  std::vector<SdpConstraint> constraints;

  Index total_dimension() const;
  /// Throws std::invalid_argument on out-of-range entries or non-finite data.
  void validate() const;
};

enum class SdpStatus {
  kOptimal,
  kInfeasible,      ///< primal infeasible (dual improving ray found)
  kDualInfeasible,  ///< primal unbounded (primal improving ray found)
  kMaxIter,         ///< iteration limit or stalled before the tolerances were met
};

std::string to_string(SdpStatus s);

struct SdpIterate {
  int iteration = 0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_infeasibility = 0.0;  ///< ||b - A(X)|| / (1 + ||b||)
  double dual_infeasibility = 0.0;    ///< ||C - Z - A^T y||_F / (1 + ||C||_F)
  double complementarity = 0.0;       ///< <X, Z>
  double step_primal = 0.0;
  double step_dual = 0.0;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::kMaxIter;
  std::vector<Eigen::MatrixXd> primal;  ///< X, one matrix per block
  std::vector<Eigen::MatrixXd> slack;   ///< Z, one matrix per block
  Eigen::VectorXd dual;                 ///< y
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;               ///< |<C,X> - b^T y|
  double primal_residual = 0.0;   ///< ||b - A(X)||
  double dual_residual = 0.0;     ///< ||C - Z - A^T y||_F
  int iterations = 0;
  int dropped_constraints = 0;    ///< linearly dependent constraints removed in presolve
  std::vector<SdpIterate> history;
};

struct SdpOptions {
  int max_iterations = 100;
  double gap_tol = 1e-10;       ///< relative duality gap target
  double feasibility_tol = 1e-10;
  double step_fraction = 0.98;  ///< fraction of the distance to the cone boundary
};

/// Primal-dual interior-point method with Nesterov-Todd scaling and a
/// Mehrotra predictor-corrector. Starts from scaled identities, so the result
/// is a deterministic function of the problem and options.
SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& opts = {});

/// Builder for SDPs over complex Hermitian PSD blocks.
///
/// Each n x n Hermitian block is realized as a 2n x 2n real symmetric block
/// Y ~ [[Re X, -Im X], [Im X, Re X]]; a Hermitian coefficient H enters as
/// [[Re H, -Im H], [Im H, Re H]] / 2 so that <coef, Y> = tr(H X).
class HermitianSdp {
 public:
  std::size_t add_block(Index n);

  /// Adds tr(H X_block) to the minimized objective.
  void add_objective(std::size_t block, const ComplexMatrix& h);

  /// sum_k tr(H_k X_{block_k}) = rhs, each H_k Hermitian.
  void add_constraint(const std::vector<std::pair<std::size_t, ComplexMatrix>>& terms, double rhs);

  /// Equality constraints fixing X_block[rows, cols] sub-block entries (p <= q real
  /// and imaginary parts) to the Hermitian matrix `value`.
  void fix_principal_block(std::size_t block, Index offset, const ComplexMatrix& value);

  const SdpProblem& problem() const { return problem_; }
  std::size_t num_blocks() const { return sides_.size(); }

  /// Hermitian block recovered from a real solution (projection onto the embedding).
  ComplexMatrix value(const SdpSolution& sol, std::size_t block) const;

 private:
  void append_terms(std::vector<SdpEntry>& out, std::size_t block, const ComplexMatrix& h) const;

  std::vector<Index> sides_;
  SdpProblem problem_;
};

/// Hermitian matrices selecting the real and imaginary parts of entry (p, q):
/// tr(H X) = Re X_pq or Im X_pq.
ComplexMatrix select_real(Index n, Index p, Index q);
ComplexMatrix select_imag(Index n, Index p, Index q);

}  // namespace recov

#endif  // RECOV_SDP_HPP
