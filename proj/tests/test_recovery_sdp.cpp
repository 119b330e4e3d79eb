#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "recov/recovery_sdp.hpp"

using namespace recov;

namespace {

double petz_fidelity(const DensityMatrix& rho)
{
  return recovery_report(rho, {}, petz_transpose(rho.marginal({1, 2}))).fid;
}

TEST(FidelitySdp, Examples)
{
  Rng rng(1);
  const DensityMatrix rho = random_density({3}, 3, rng);
  EXPECT_NEAR(fidelity_sdp(rho, rho), 1.0, 1e-7);
  const DensityMatrix e0 = new_density(oracle::diag({1.0, 0.0}), {2});
  const DensityMatrix e1 = new_density(oracle::diag({0.0, 1.0}), {2});
  const DensityMatrix mixed = new_density(oracle::diag({0.5, 0.5}), {2});
  EXPECT_NEAR(fidelity_sdp(e0, e1), 0.0, 1e-7);
  EXPECT_NEAR(fidelity_sdp(e0, mixed), 1.0 / std::sqrt(2.0), 1e-7);
}

TEST(FidelitySdp, MatchesClosedForm)
{
  Rng rng(2);
  for (Index n = 2; n <= 4; ++n)
    for (int trial = 0; trial < 100; ++trial) {
      const DensityMatrix r = random_density({n}, 1 + trial % n, rng);
      const DensityMatrix s = random_density({n}, 1 + (trial / n) % n, rng);
      EXPECT_NEAR(fidelity_sdp(r, s), oracle::fidelity(r.matrix(), s.matrix()), 1e-6)
          << "n=" << n << " trial=" << trial;
    }
}

TEST(FidelityOfRecovery, MarkovChainsAreRecoverable)
{
  Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const DensityMatrix rho = random_markov_state({2, 2, 2}, rng);
    const auto opt = fidelity_of_recovery(rho);
    EXPECT_NEAR(opt.value, 1.0, 1e-6);
  }
}

TEST(FidelityOfRecovery, CounterexampleBeatsTranspose)
{
  const DensityMatrix rho = appendix_f_state();
  const double f_given = recovery_report(rho, {}, appendix_f_recovery_map()).fid;
  const double f_petz = petz_fidelity(rho);
  EXPECT_GT(f_given, 0.9829);
  EXPECT_LT(std::sqrt(f_petz), 0.9696);
  const auto opt = fidelity_of_recovery(rho);
  EXPECT_GE(opt.value, f_given - 1e-7);
  EXPECT_GE(opt.value, f_petz);
  EXPECT_LE(opt.value, 1.0 + 1e-9);
}

TEST(FidelityOfRecovery, WitnessAttainsValue)
{
  Rng rng(4);
  for (const DimVector dims : {DimVector{2, 2, 2}, DimVector{2, 3, 2}, DimVector{3, 2, 3}}) {
    const DensityMatrix rho = random_density(dims, 2, rng);
    const auto opt = fidelity_of_recovery(rho);
    EXPECT_TRUE(validate_tpcp(opt.witness).ok());
    EXPECT_NEAR(opt.witness_fidelity, opt.value, 1e-6);
    EXPECT_NEAR(recovery_report(rho, {}, opt.witness).fid, opt.witness_fidelity, 1e-12);
    EXPECT_GE(opt.upper_bound, opt.value - 1e-7);
    EXPECT_LE(opt.upper_bound - opt.value, 1e-6);
  }
}

TEST(FidelityOfRecovery, DominatesPetzFamily)
{
  Rng rng(5);
  for (int trial = 0; trial < 8; ++trial) {
    const DensityMatrix rho = random_density({2, 2, 2}, 1 + trial % 4, rng);
    const DensityMatrix bc = rho.marginal({1, 2});
    const double f = fidelity_of_recovery(rho).value;
    EXPECT_GE(f, petz_fidelity(rho) - 1e-7);
    EXPECT_GE(f, recovery_report(rho, {}, rotated_petz(bc, 0.7)).fid - 1e-7);
    EXPECT_GE(f, recovery_report(rho, {}, averaged_rotated_petz(bc, AveragingScheme::grid())).fid -
                     1e-7);
  }
}

TEST(FidelityOfRecovery, CmiBoundsAtOptimum)
{
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const DensityMatrix rho = random_density({2, 2, 2}, 1 + trial % 8, rng);
    const double i = cmi(rho).cmi;
    const double f = fidelity_of_recovery(rho).value;
    EXPECT_GE(i + 2.0 * std::log2(f), -1e-6);
    EXPECT_GE(1.0 - f, -1e-9);
    EXPECT_LE(1.0 - f, std::numbers::ln2 / 2.0 * i + 1e-6);
  }
}

TEST(FidelityOfRecovery, PureStatesObeyBarnumKnill)
{
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const DensityMatrix rho = random_pure_state({2, 2, 2}, rng);
    const double ft = petz_fidelity(rho);
    const double f = fidelity_of_recovery(rho).value;
    EXPECT_GE(f, ft - 1e-6);
    EXPECT_LE(f, std::sqrt(ft) + 1e-6);
  }
}

TEST(FidelityOfRecovery, RelabelingIsInvariant)
{
  Rng rng(8);
  const DensityMatrix rho = random_density({2, 3, 2}, 3, rng);
  // C B A order with labels pointing at the moved subsystems
  const DensityMatrix swapped = rho.permuted({2, 1, 0});
  const TripartiteLabels labels{{2}, {1}, {0}};
  EXPECT_NEAR(fidelity_of_recovery(swapped, labels).value, fidelity_of_recovery(rho).value, 1e-7);
}

TEST(FidelityOfRecovery, RejectsLargeProblems)
{
  Rng rng(9);
  EXPECT_THROW(fidelity_of_recovery(random_density({2, 4, 9}, 2, rng)), std::invalid_argument);
  EXPECT_THROW(fidelity_of_recovery_unital_form(random_density({2, 3, 4}, 2, rng)),
               std::invalid_argument);
}

TEST(UnitalForm, BetweenTransposeAndGeneralOptimum)
{
  Rng rng(10);
  for (int trial = 0; trial < 4; ++trial) {
    const DensityMatrix rho = random_density({2, 2, 2}, 1 + 2 * trial, rng);
    const DensityMatrix bc = rho.marginal({1, 2});
    const auto general = fidelity_of_recovery(rho);
    const auto unital = fidelity_of_recovery_unital_form(rho);
    EXPECT_LE(unital.value, general.value + 1e-6);
    EXPECT_GE(unital.value, petz_fidelity(rho) - 1e-6);
    EXPECT_TRUE(validate_tpcp(unital.witness).ok());
    EXPECT_NEAR(unital.witness_fidelity, unital.value, 1e-6);

    // the witness sends rho_B to rho_BC, like every map of this form
    const ComplexMatrix rb = rho.marginal({1}).matrix();
    EXPECT_LT((unital.witness(rb) - bc.matrix()).norm(), 1e-7);

    // inner map is unital and trace preserving
    const Channel& u = unital.inner;
    EXPECT_TRUE(validate_tpcp(u, 1e-7).ok());
    const ComplexMatrix id = ComplexMatrix::Identity(u.dim_in(), u.dim_in());
    EXPECT_LT((u(id) - id).norm(), 1e-7);
  }
}

TEST(UnitalForm, CounterexampleOrdering)
{
  const DensityMatrix rho = appendix_f_state();
  const double f_petz = petz_fidelity(rho);
  const auto unital = fidelity_of_recovery_unital_form(rho);
  const auto general = fidelity_of_recovery(rho);
  EXPECT_GE(unital.value, f_petz - 1e-6);
  EXPECT_LE(unital.value, general.value + 1e-6);
}

TEST(UnitalForm, MarkovChainsAreRecoverable)
{
  Rng rng(11);
  for (int trial = 0; trial < 3; ++trial)
    EXPECT_NEAR(fidelity_of_recovery_unital_form(random_markov_state({2, 2, 2}, rng)).value, 1.0,
                1e-6);
}

TEST(ProjectToTpcp, FixesValidChannelsAndRepairsNoise)
{
  const Channel given = appendix_f_recovery_map();
  const ComplexMatrix same = project_to_tpcp(given.choi(), given.dim_in(), given.dim_out());
  EXPECT_LT((same - given.choi()).norm(), 1e-12);

  Rng rng(12);
  ComplexMatrix noisy = given.choi() + 1e-4 * ginibre<double>(8, 8, rng);
  const Channel repaired(project_to_tpcp(noisy, 2, 4), 2, {2, 2});
  EXPECT_TRUE(validate_tpcp(repaired, 1e-10).ok());
  EXPECT_LT((repaired.choi() - given.choi()).norm(), 1e-2);
}

}  // namespace
