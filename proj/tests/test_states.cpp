#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "recov/entropy.hpp"
#include "recov/states.hpp"

using namespace recov;

namespace {

TEST(NewDensity, MaximallyMixed)
{
  const DensityMatrix rho = new_density(ComplexMatrix::Identity(4, 4) / 4.0, {2, 2});
  EXPECT_EQ(rho.dims(), (DimVector{2, 2}));
  EXPECT_EQ(rho.size(), 4);
}

TEST(NewDensity, Rejections)
{
  EXPECT_THROW(new_density(oracle::diag({1.001, -1e-3}), {2}), std::domain_error);
  EXPECT_THROW(new_density(oracle::diag({0.5, 0.4}), {2}), std::domain_error);
  EXPECT_THROW(new_density(ComplexMatrix::Identity(4, 4) / 4.0, {2, 3}), std::invalid_argument);
  ComplexMatrix skew = oracle::diag({0.5, 0.5});
  skew(0, 1) = 0.1;
  EXPECT_THROW(new_density(skew, {2}), std::domain_error);
}

TEST(NewDensity, RenormalizesSmallTraceErrors)
{
  const DensityMatrix rho = new_density(oracle::diag({0.5, 0.5 + 5e-9}), {2});
  EXPECT_NEAR(rho.matrix().trace().real(), 1.0, 1e-15);
}

TEST(NewDensity, CounterexampleMatrix)
{
  const DensityMatrix rho = new_density(
      oracle::diag({0.5, 0, 0, 0, 1.0 / 8, 1.0 / 8, 1.0 / 8, 1.0 / 8}), {2, 2, 2});
  EXPECT_EQ(rho.num_subsystems(), 3u);
}

TEST(RandomDensity, PureQubit)
{
  Rng rng(1);
  const DensityMatrix rho = random_density({2}, 1, rng);
  EXPECT_TRUE(is_pure(rho));
}

TEST(RandomDensity, ReproducibleAndNormalized)
{
  const DensityMatrix a = random_density({2, 2, 2}, 8, 42);
  const DensityMatrix b = random_density({2, 2, 2}, 8, 42);
  EXPECT_TRUE(a.matrix() == b.matrix());
  EXPECT_NEAR(a.spectrum().values.sum(), 1.0, 1e-12);
  EXPECT_EQ(support_rank(a.spectrum()), 8);
  const DensityMatrix c = random_density({2, 2, 2}, 8, 43);
  EXPECT_FALSE(a.matrix() == c.matrix());
}

TEST(RandomDensity, RankAndMarginals)
{
  Rng rng(2);
  for (Index rank = 1; rank <= 6; ++rank) {
    const DensityMatrix rho = random_density({2, 3}, rank, rng);
    EXPECT_EQ(support_rank(rho.spectrum()), rank);
    EXPECT_NEAR(rho.marginal({0}).matrix().trace().real(), 1.0, 1e-12);
    EXPECT_NEAR(rho.marginal({1}).matrix().trace().real(), 1.0, 1e-12);
  }
  EXPECT_THROW(random_density({2, 3}, 0, rng), std::invalid_argument);
  EXPECT_THROW(random_density({2, 3}, 7, rng), std::invalid_argument);
}

TEST(CounterexampleState, DiagonalAndMarginals)
{
  const DensityMatrix rho = appendix_f_state();
  EXPECT_EQ(rho.dims(), (DimVector{2, 2, 2}));
  EXPECT_TRUE(rho.matrix() ==
              oracle::diag({0.5, 0, 0, 0, 1.0 / 8, 1.0 / 8, 1.0 / 8, 1.0 / 8}));
  EXPECT_NEAR(rho.matrix().trace().real(), 1.0, 1e-15);
  EXPECT_LE((rho.marginal({1}).matrix() - oracle::diag({0.75, 0.25})).norm(), 1e-15);
  EXPECT_LE((rho.marginal({1, 2}).matrix() - oracle::diag({5.0 / 8, 1.0 / 8, 1.0 / 8, 1.0 / 8})).norm(),
            1e-15);
}

TEST(QcqState, DeterministicBProducesProduct)
{
  const DensityMatrix mixed = new_density(ComplexMatrix::Identity(4, 4) / 4.0, {2, 2});
  const DensityMatrix rho = qcq_state({1.0, 0.0}, {mixed, mixed});
  const ComplexMatrix expected =
      tensor(tensor(ComplexMatrix(ComplexMatrix::Identity(2, 2) / 2.0), oracle::diag({1.0, 0.0})),
             ComplexMatrix(ComplexMatrix::Identity(2, 2) / 2.0));
  EXPECT_LE((rho.matrix() - expected).norm(), 1e-15);
}

TEST(QcqState, CorrelatedBlocksHaveZeroCmi)
{
  const DensityMatrix r00 = new_density(oracle::diag({1, 0, 0, 0}), {2, 2});
  const DensityMatrix r11 = new_density(oracle::diag({0, 0, 0, 1}), {2, 2});
  const DensityMatrix rho = qcq_state({0.5, 0.5}, {r00, r11});
  EXPECT_NEAR(cmi(rho).cmi, 0.0, 1e-12);
  // B marginal diagonal
  const ComplexMatrix rb = rho.marginal({1}).matrix();
  EXPECT_EQ(rb(0, 1), Complex(0.0));
}

TEST(QcqState, ClassicalCopyChain)
{
  const DensityMatrix rho = new_density(oracle::diag({0.5, 0, 0, 0, 0, 0, 0, 0.5}), {2, 2, 2});
  const EntropyReport e = cmi(rho);
  EXPECT_NEAR(e.h_ab, 1.0, 1e-12);
  EXPECT_NEAR(e.h_bc, 1.0, 1e-12);
  EXPECT_NEAR(e.h_b, 1.0, 1e-12);
  EXPECT_NEAR(e.h_abc, 1.0, 1e-12);
  EXPECT_NEAR(e.cmi, 0.0, 1e-12);
}

TEST(QcqState, Errors)
{
  const DensityMatrix m = new_density(ComplexMatrix::Identity(4, 4) / 4.0, {2, 2});
  EXPECT_THROW(qcq_state({0.5, 0.6}, {m, m}), std::invalid_argument);
  EXPECT_THROW(qcq_state({1.0}, {m, m}), std::invalid_argument);
  const DensityMatrix other = new_density(ComplexMatrix::Identity(6, 6) / 6.0, {2, 3});
  EXPECT_THROW(qcq_state({0.5, 0.5}, {m, other}), std::invalid_argument);
}

TEST(MarkovEnsembles, ZeroCmi)
{
  Rng rng(3);
  for (int k = 0; k < 10; ++k) {
    EXPECT_LE(std::abs(cmi(random_markov_state({2, 3, 2}, rng)).cmi), 1e-10);
    EXPECT_LE(std::abs(cmi(random_classical_chain({3, 2, 2}, rng)).cmi), 1e-10);
  }
}

TEST(FlagExtension, Endpoints)
{
  Rng rng(4);
  const DensityMatrix r0 = random_density({2, 2}, 4, rng);
  const DensityMatrix r1 = random_density({2, 2}, 4, rng);
  const ComplexMatrix f0 = tensor(oracle::diag({1, 0}), r0.matrix());
  const ComplexMatrix f1 = tensor(oracle::diag({0, 1}), r1.matrix());
  EXPECT_LE((flag_extension(r0, r1, 0.0).matrix() - f0).norm(), 1e-15);
  EXPECT_LE((flag_extension(r0, r1, 1.0).matrix() - f1).norm(), 1e-15);
  EXPECT_EQ(flag_extension(r0, r1, 0.3).dims(), (DimVector{2, 2, 2}));
  EXPECT_THROW(flag_extension(r0, r1, 1.5), std::invalid_argument);
  EXPECT_THROW(flag_extension(r0, random_density({4}, 4, rng), 0.5), std::invalid_argument);
}

TEST(FlagExtension, CmiIsAverageForSharedMarginal)
{
  Rng rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const DensityMatrix rho_bc = random_density({2, 2}, 4, rng);
    const DensityMatrix r0 = random_extension(rho_bc, 2, rng);
    const DensityMatrix r1 = random_extension(rho_bc, 2, rng);
    const double p = trial == 0 ? 0.5 : unit(rng);
    const DensityMatrix flagged = flag_extension(r0, r1, p);
    const double expected = (1 - p) * cmi(r0).cmi + p * cmi(r1).cmi;
    EXPECT_NEAR(cmi(flagged, flagged_labels()).cmi, expected, 1e-8);
  }
  // same state in both branches
  const DensityMatrix rho = random_density({2, 2, 2}, 8, rng);
  EXPECT_NEAR(cmi(flag_extension(rho, rho, 0.5), flagged_labels()).cmi, cmi(rho).cmi, 1e-8);
}

TEST(Purify, PureInputGetsTrivialAncilla)
{
  Rng rng(6);
  const DensityMatrix psi = random_pure_state({2, 2}, rng);
  const DensityMatrix out = purify(psi);
  EXPECT_EQ(out.dims(), (DimVector{2, 2, 1}));
  EXPECT_LE((out.matrix() - psi.matrix()).norm(), 1e-10);
}

TEST(Purify, MaximallyMixedQubitGivesBellState)
{
  const DensityMatrix mixed = new_density(ComplexMatrix::Identity(2, 2) / 2.0, {2});
  const DensityMatrix out = purify(mixed);
  EXPECT_TRUE(is_pure(out));
  EXPECT_LE((out.marginal({0}).matrix() - mixed.matrix()).norm(), 1e-10);
  EXPECT_NEAR(von_neumann(out.marginal({1})), 1.0, 1e-10);
}

TEST(Purify, CounterexampleStateBothAncillaSizes)
{
  const DensityMatrix rho = appendix_f_state();
  const DensityMatrix tight = purify(rho);
  EXPECT_EQ(tight.dims(), (DimVector{2, 2, 2, 5}));
  const DensityMatrix padded = purify(rho, 8);
  EXPECT_EQ(padded.dims(), (DimVector{2, 2, 2, 8}));
  for (const auto& p : {tight, padded}) {
    EXPECT_TRUE(is_pure(p));
    EXPECT_LE((p.marginal({0, 1, 2}).matrix() - rho.matrix()).norm(), 1e-10);
  }
  EXPECT_THROW(purify(rho, 4), std::invalid_argument);
}

TEST(Purify, RoundTripRandom)
{
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const DensityMatrix rho = random_density({2, 3}, 1 + trial % 6, rng);
    EXPECT_LE((purify(rho).marginal({0, 1}).matrix() - rho.matrix()).norm(), 1e-10);
  }
}

TEST(RandomExtension, KeepsTheMarginal)
{
  Rng rng(8);
  const DensityMatrix rho_bc = random_density({2, 3}, 5, rng);
  for (Index da : {1, 2, 3}) {
    const DensityMatrix ext = random_extension(rho_bc, da, rng);
    EXPECT_EQ(ext.dims(), (DimVector{da, 2, 3}));
    EXPECT_LE((ext.marginal({1, 2}).matrix() - rho_bc.matrix()).norm(), 1e-10);
  }
}

TEST(TripartiteLabels, Validation)
{
  TripartiteLabels l;
  EXPECT_NO_THROW(l.validate(3));
  EXPECT_THROW(l.validate(4), std::invalid_argument);
  EXPECT_THROW((TripartiteLabels{{0}, {0}, {1}}.validate(2)), std::invalid_argument);
  EXPECT_THROW((TripartiteLabels{{}, {0}, {1}}.validate(2)), std::invalid_argument);
  EXPECT_NO_THROW(flagged_labels().validate(4));
}

TEST(DensityMatrix, PermutedAndMarginalsAgreeWithOracle)
{
  Rng rng(9);
  const DensityMatrix rho = random_density({2, 3, 2}, 12, rng);
  EXPECT_LE((rho.marginal({0, 2}).matrix() - oracle::reduce(rho.matrix(), rho.dims(), {0, 2})).norm(),
            1e-12);
  const DensityMatrix p = rho.permuted({2, 0, 1});
  EXPECT_EQ(p.dims(), (DimVector{2, 2, 3}));
  EXPECT_LE((p.marginal({1}).matrix() - rho.marginal({0}).matrix()).norm(), 1e-12);
}

}  // namespace
