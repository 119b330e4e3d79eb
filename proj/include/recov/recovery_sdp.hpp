#ifndef RECOV_RECOVERY_SDP_HPP
#define RECOV_RECOVERY_SDP_HPP

// Fidelity and fidelity of recovery as semidefinite programs.

#include <stdexcept>
#include <string>

#include "recov/recovery.hpp"
#include "recov/sdp.hpp"

namespace recov {

/// Thrown when the solver ends without an optimal status.
class SdpFailure : public std::runtime_error {
 public:
  SdpFailure(const std::string& what, SdpStatus status)
      : std::runtime_error(what + ": solver status " + to_string(status)), status_(status)
  {
  }
  SdpStatus status() const { return status_; }

 private:
  SdpStatus status_;
};

/// max Re tr X subject to [[rho, X], [X^dagger, sigma]] >= 0, with both states
/// compressed to their supports first.
double fidelity_sdp(const DensityMatrix& rho, const DensityMatrix& sigma,
                    const SdpOptions& opts = {});

struct RecoveryOptimum {
  double value = 0.0;        ///< primal optimum
  double upper_bound = 0.0;  ///< dual bound, >= value up to the gap
  double witness_fidelity = 0.0;
  Channel witness;           ///< TPCP map B -> BC attaining the value
  SdpProblem problem;
  SdpSolution solution;
};

struct UnitalRecoveryOptimum : RecoveryOptimum {
  Channel inner;  ///< unital TP map on BC
};

/// sup over recovery channels B -> BC of F(rho, R(rho_AB)).
/// Requires single B and C subsystems with d_B^2 d_C <= 128.
RecoveryOptimum fidelity_of_recovery(const DensityMatrix& rho, const TripartiteLabels& labels = {},
                                     const SdpOptions& opts = {});

/// Same supremum restricted to channels
/// R(X) = rho_BC^{1/2} U(rho_B^{-1/2} X rho_B^{-1/2} (x) id_C) rho_BC^{1/2}
/// on supp(rho_B), with U unital, trace preserving and completely positive.
/// Requires (d_B d_C)^2 <= 128.
UnitalRecoveryOptimum fidelity_of_recovery_unital_form(const DensityMatrix& rho,
                                                       const TripartiteLabels& labels = {},
                                                       const SdpOptions& opts = {});

/// Choi matrix symmetrized, clamped to PSD and rescaled to be trace preserving:
/// J -> (T^{-1/2} (x) 1) J (T^{-1/2} (x) 1) with T = tr_out J.
ComplexMatrix project_to_tpcp(const ComplexMatrix& choi, Index dim_in, Index dim_out);

}  // namespace recov

#endif  // RECOV_RECOVERY_SDP_HPP
