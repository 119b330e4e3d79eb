#ifndef RECOV_RECOVERY_HPP
#define RECOV_RECOVERY_HPP

#include <optional>
#include <vector>

#include "recov/entropy.hpp"
#include "recov/states.hpp"

namespace recov {

/// Linear map between operator spaces stored as its Choi matrix
/// J = sum_ij |i><j| (x) Phi(|i><j|) on in (x) out.
///
/// `out_dims` records how the output factorizes (e.g. {d_B, d_C}); apply()
/// splices these factors in place of the subsystem it acts on.
class Channel {
 public:
  Channel(ComplexMatrix choi, Index dim_in, DimVector out_dims);

  const ComplexMatrix& choi() const { return choi_; }
  Index dim_in() const { return dim_in_; }
  Index dim_out() const { return dim_out_; }
  const DimVector& out_dims() const { return out_dims_; }

  /// Phi(|i><j|).
  ComplexMatrix block(Index i, Index j) const
  {
    return choi_.block(i * dim_out_, j * dim_out_, dim_out_, dim_out_);
  }

  /// Phi(X) for an operator X on the input space.
  ComplexMatrix operator()(const ComplexMatrix& x) const;

 private:
  ComplexMatrix choi_;
  Index dim_in_;
  Index dim_out_;
  DimVector out_dims_;
};

/// Choi matrix of an arbitrary linear map given by its action.
template <typename Map>
ComplexMatrix choi_of(Map&& map, Index dim_in, Index dim_out)
{
  ComplexMatrix choi = ComplexMatrix::Zero(dim_in * dim_out, dim_in * dim_out);
  for (Index i = 0; i < dim_in; ++i)
    for (Index j = 0; j < dim_in; ++j) {
      ComplexMatrix e = ComplexMatrix::Zero(dim_in, dim_in);
      e(i, j) = 1.0;
      choi.block(i * dim_out, j * dim_out, dim_out, dim_out) = map(e);
    }
  return choi;
}

/// Throws std::invalid_argument for an empty list, inconsistent shapes, or
/// sum K^dagger K != id beyond 1e-8.
Channel channel_from_kraus(const std::vector<ComplexMatrix>& kraus, DimVector out_dims = {});

Channel identity_channel(Index dim);

/// Applies the channel to subsystem `target`; the output carries the channel's
/// out_dims in place of the target factor.
DensityMatrix apply(const Channel& chan, const DensityMatrix& rho, std::size_t target);

/// Same, on an arbitrary operator (no state validation).
ComplexMatrix apply_to_operator(const Channel& chan, const ComplexMatrix& m, const DimVector& dims,
                                std::size_t target);

/// Petz transpose map X -> rho_BC^{1/2} (rho_B^{-1/2} X rho_B^{-1/2} (x) id_C) rho_BC^{1/2}.
/// Weight of X outside supp(rho_B) is sent to rho_BC, so the map is TPCP everywhere.
Channel petz_transpose(const DensityMatrix& rho_bc);

/// Rotated Petz map
/// X -> rho_BC^{1/2+it} (rho_B^{-1/2-it} X rho_B^{-1/2+it} (x) id_C) rho_BC^{1/2-it},
/// with the same off-support completion as petz_transpose.
Channel rotated_petz(const DensityMatrix& rho_bc, double t);

/// Probability measure on rotation parameters, as quadrature nodes.
struct AveragingScheme {
  std::vector<double> nodes;    ///< rotated_petz parameters
  std::vector<double> weights;  ///< non-negative, summing to 1

  enum class Weights { kCosh, kUniform };

  /// Uniform grid s in [-halfwidth, halfwidth] with `count` nodes. kCosh weights
  /// are proportional to (pi/2) / (cosh(pi s) + 1); each node s is realized as
  /// rotated_petz(s / 2), i.e. rho^{(1 + i s)/2} rotations.
  static AveragingScheme grid(int count = 41, double halfwidth = 8.0, Weights w = Weights::kCosh);

  static AveragingScheme single(double t) { return AveragingScheme{{t}, {1.0}}; }

  /// Throws std::invalid_argument unless weights are >= 0 and normalized to 1e-12.
  void validate() const;
};

/// Convex mixture sum_k w_k rotated_petz(t_k).
Channel averaged_rotated_petz(const DensityMatrix& rho_bc, const AveragingScheme& scheme);

struct TpcpReport {
  double min_choi_eigenvalue = 0.0;
  double tp_error = 0.0;  ///< Frobenius norm of tr_out(J) - id
  bool completely_positive = false;
  bool trace_preserving = false;
  bool ok() const { return completely_positive && trace_preserving; }
};

TpcpReport validate_tpcp(const Channel& chan, double tol = 1e-8);

/// Bound check for one channel on one state (all entropic quantities in bits).
struct RecoveryReport {
  double cmi_bits = 0.0;
  double fid = 0.0;
  double neg2logF = 0.0;  ///< +infinity when fid == 0
  std::optional<double> dm_bits;
  double delta_thm1 = 0.0;  ///< I - (-2 log2 F)
  std::optional<double> delta_meas;  ///< I - D_M(rho || R(rho_AB))
  double delta_cor3 = 0.0;  ///< F - 1 + (ln 2 / 2) I
};

/// R(rho_AB) for a recovery channel B -> BC, returned on the subsystem layout of rho.
ComplexMatrix recovered_state(const DensityMatrix& rho, const TripartiteLabels& labels,
                              const Channel& chan);

RecoveryReport recovery_report(const DensityMatrix& rho, const TripartiteLabels& labels,
                               const Channel& chan, bool with_dm = false);

/// Recovery report fields from an already computed fidelity (e.g. an SDP optimum).
RecoveryReport report_from_fidelity(double cmi_bits, double fid);

/// The map of the mixed-state counterexample:
/// |0><0| -> |00><00|, |1><1| -> (|01><01| + |10><10| + |11><11|) / 3,
/// measuring B in the computational basis first.
Channel appendix_f_recovery_map();

/// Inner map of the unital representation R(X) = rho_BC^{1/2} U(rho_B^{-1/2} X rho_B^{-1/2} (x) id_C) rho_BC^{1/2}:
/// returns U(Y (x) id_C) = rho_BC^{-1/2} R(rho_B^{1/2} Y rho_B^{1/2}) rho_BC^{-1/2}.
ComplexMatrix unital_inner_map(const Channel& chan, const DensityMatrix& rho_bc,
                               const ComplexMatrix& y_b);

}  // namespace recov

#endif  // RECOV_RECOVERY_HPP
