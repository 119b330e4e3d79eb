// One PASS/FAIL line per acceptance criterion; exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "recov/harness.hpp"
#include "recov/recovery_sdp.hpp"

using namespace recov;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args)
{
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const TripartiteLabels kLabels{};

double petz_fidelity(const DensityMatrix& rho)
{
  return recovery_report(rho, kLabels, petz_transpose(rho.marginal({1, 2}))).fid;
}

Outcome ac1()
{
  const auto t0 = Clock::now();
  const DensityMatrix rho = appendix_f_state();
  const double f_given = recovery_report(rho, kLabels, appendix_f_recovery_map()).fid;
  const double sqrt_ft = std::sqrt(petz_fidelity(rho));
  const double runtime = seconds_since(t0);
  const bool pass = f_given > 0.9829 && f_given < 1.0 && sqrt_ft > 0.0 && sqrt_ft < 0.9696 &&
                    f_given > sqrt_ft && runtime < 1.0;
  return {pass, fmt("F(R_given)=%.8f sqrt(F(T))=%.8f runtime=%.3fs", f_given, sqrt_ft, runtime)};
}

Outcome ac2()
{
  const Channel t = petz_transpose(appendix_f_state().marginal({1, 2}));
  const ComplexMatrix out0 = t(oracle::diag({1.0, 0.0}));
  const ComplexMatrix out1 = t(oracle::diag({0.0, 1.0}));
  const ComplexMatrix want0 = oracle::diag({5.0 / 6.0, 1.0 / 6.0, 0.0, 0.0});
  const ComplexMatrix want1 = oracle::diag({0.0, 0.0, 0.5, 0.5});
  const double err =
      std::max((out0 - want0).cwiseAbs().maxCoeff(), (out1 - want1).cwiseAbs().maxCoeff());
  return {err <= 1e-12, fmt("max entry error=%.2e", err)};
}

Outcome ac3()
{
  const auto t0 = Clock::now();
  double lowest = kInfinity;
  int count = 0;
  for (const auto& [dims, n] : {std::pair{DimVector{2, 2, 2}, 500}, {DimVector{2, 3, 2}, 200}}) {
    const Index d = dim_product(dims);
    for (int i = 0; i < n; ++i) {
      Rng rng(stream_seed(3, static_cast<std::uint64_t>(count)));
      lowest = std::min(lowest, cmi(random_density(dims, 1 + i % d, rng)).cmi);
      ++count;
    }
  }
  const double runtime = seconds_since(t0);
  return {lowest >= -1e-9 && runtime < 30.0,
          fmt("%d states, min I=%.3e runtime=%.2fs", count, lowest, runtime)};
}

Outcome ac4()
{
  double max_i = -kInfinity, min_f = kInfinity;
  for (int i = 0; i < 50; ++i) {
    Rng rng(stream_seed(4, static_cast<std::uint64_t>(i)));
    const DimVector dims{2 + i % 2, 2 + (i / 2) % 2, 2};
    const DensityMatrix rho =
        i < 25 ? random_markov_state(dims, rng) : random_classical_chain(dims, rng);
    max_i = std::max(max_i, cmi(rho).cmi);
    min_f = std::min(min_f, petz_fidelity(rho));
  }
  return {max_i <= 1e-8 && min_f >= 1.0 - 1e-8,
          fmt("25 qcq + 25 classical chains, max I=%.2e min F(T)=%.12f", max_i, min_f)};
}

Outcome ac5()
{
  const auto t0 = Clock::now();
  double min_thm1 = kInfinity, min_cor3 = kInfinity;
  int failures = 0;
  for (int i = 0; i < 100; ++i) {
    Rng rng(stream_seed(5, static_cast<std::uint64_t>(i)));
    const DensityMatrix rho = random_density({2, 2, 2}, 1 + i % 8, rng);
    try {
      const RecoveryReport r = report_from_fidelity(cmi(rho).cmi, fidelity_of_recovery(rho).value);
      min_thm1 = std::min(min_thm1, r.delta_thm1);
      min_cor3 = std::min(min_cor3, r.delta_cor3);
    } catch (const SdpFailure&) {
      ++failures;
    }
  }
  const double runtime = seconds_since(t0);
  return {failures == 0 && min_thm1 >= -1e-6 && min_cor3 >= -1e-6 && runtime < 600.0,
          fmt("min I+2log2F=%.3e min linearized=%.3e solver failures=%d runtime=%.1fs", min_thm1,
              min_cor3, failures, runtime)};
}

Outcome ac6()
{
  double lower = kInfinity, upper = kInfinity;
  int failures = 0;
  for (int i = 0; i < 100; ++i) {
    Rng rng(stream_seed(6, static_cast<std::uint64_t>(i)));
    const DensityMatrix rho = random_pure_state({2, 2, 2}, rng);
    const double ft = petz_fidelity(rho);
    try {
      const double f = fidelity_of_recovery(rho).value;
      lower = std::min(lower, f - ft);
      upper = std::min(upper, std::sqrt(ft) - f);
    } catch (const SdpFailure&) {
      ++failures;
    }
  }
  return {failures == 0 && lower >= -1e-6 && upper >= -1e-6,
          fmt("min F-F(T)=%.3e min sqrt(F(T))-F=%.3e solver failures=%d", lower, upper, failures)};
}

Outcome ac7()
{
  double worst = 0.0;
  for (int m = 0; m < 10; ++m) {
    Rng rng(stream_seed(7, static_cast<std::uint64_t>(m)));
    const Index db = 2 + m % 2, dc = 2 + (m / 2) % 2;
    const DensityMatrix rb = random_density({db}, 1 + m % db, rng);
    const DensityMatrix rc = random_density({dc}, dc, rng);
    const DensityMatrix bc = new_density(tensor(rb.matrix(), rc.matrix()), {db, dc});
    const Channel t = petz_transpose(bc);
    for (int e = 0; e < 20; ++e) {
      const DensityMatrix rho = random_extension(bc, 2 + e % 2, rng);
      const double d = relative_entropy(rho, hermitian_part(recovered_state(rho, kLabels, t)));
      worst = std::max(worst, std::abs(cmi(rho).cmi - d));
    }
  }
  return {worst <= 1e-7, fmt("200 extensions, max |I - D(rho||T(rho_AB))|=%.2e", worst)};
}

Outcome ac8()
{
  double chain_lo = kInfinity, chain_hi = kInfinity, commuting = 0.0;
  for (int i = 0; i < 50; ++i) {
    Rng rng(stream_seed(8, static_cast<std::uint64_t>(i)));
    const DensityMatrix rho = random_density({2, 2}, 4, rng);
    const ComplexMatrix sigma = random_density({2, 2}, 4, rng).matrix();
    const double dm = measured_relative_entropy(rho, sigma);
    const double lower = -2.0 * std::log2(oracle::fidelity(rho.matrix(), sigma));
    chain_lo = std::min(chain_lo, dm + 1e-5 - lower);
    chain_hi = std::min(chain_hi, relative_entropy(rho, sigma) + 2e-5 - (dm + 1e-5));
  }
  for (int i = 0; i < 20; ++i) {
    Rng rng(stream_seed(80, static_cast<std::uint64_t>(i)));
    const ComplexMatrix u = haar_unitary<double>(4, rng);
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    std::vector<double> p(4), q(4);
    double sp = 0.0, sq = 0.0;
    for (int k = 0; k < 4; ++k) {
      p[k] = unit(rng);
      q[k] = unit(rng);
      sp += p[k];
      sq += q[k];
    }
    for (int k = 0; k < 4; ++k) {
      p[k] /= sp;
      q[k] /= sq;
    }
    const DensityMatrix rho = new_density(u * oracle::diag(p) * u.adjoint(), {2, 2});
    const ComplexMatrix sigma = u * oracle::diag(q) * u.adjoint();
    commuting =
        std::max(commuting, std::abs(measured_relative_entropy(rho, sigma) - oracle::classical_kl(p, q)));
  }
  return {chain_lo >= 0.0 && chain_hi >= 0.0 && commuting <= 1e-5,
          fmt("min slack lower=%.2e upper=%.2e, commuting max |D_M-D|=%.2e", chain_lo, chain_hi,
              commuting)};
}

Outcome ac9()
{
  double worst = 0.0;
  int failures = 0;
  for (Index n = 2; n <= 4; ++n)
    for (int i = 0; i < 100; ++i) {
      Rng rng(stream_seed(9 + static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(i)));
      const DensityMatrix r = random_density({n}, 1 + i % n, rng);
      const DensityMatrix s = random_density({n}, 1 + (i / n) % n, rng);
      try {
        worst = std::max(worst,
                         std::abs(fidelity_sdp(r, s) - oracle::fidelity(r.matrix(), s.matrix())));
      } catch (const SdpFailure&) {
        ++failures;
      }
    }
  return {failures == 0 && worst <= 1e-6,
          fmt("300 pairs, max error=%.2e solver failures=%d", worst, failures)};
}

Outcome ac10()
{
  ExperimentConfig c;
  c.samples = 50;
  c.seed = 10;
  c.compute_dm = true;
  const CampaignReport r = cmd_universal(c);
  const auto& m = r.minima.at("averaged");
  const double meas = m.delta_meas.value_or(-kInfinity);
  return {meas >= -1e-3,
          fmt("41-node cosh scheme, 50 extensions: min I-D_M=%.3e min I+2log2F=%.3e", meas,
              m.delta_thm1.value_or(-kInfinity))};
}

Outcome ac11()
{
  int channels = 0, tpcp_fail = 0;
  double marginal_err = 0.0, t0_err = 0.0;
  auto check = [&](const Channel& ch) {
    ++channels;
    if (!validate_tpcp(ch, 1e-8).ok())
      ++tpcp_fail;
  };
  auto check_family = [&](const Channel& ch, const DensityMatrix& bc) {
    check(ch);
    const ComplexMatrix rb = bc.marginal({0}).matrix();
    marginal_err = std::max(marginal_err, (ch(rb) - bc.matrix()).cwiseAbs().maxCoeff());
  };

  int k = 0;
  for (const DimVector dims : {DimVector{2, 2}, DimVector{2, 3}, DimVector{3, 2}})
    for (const Index rank : {Index{1}, Index{2}, dim_product(dims)}) {
      Rng rng(stream_seed(11, static_cast<std::uint64_t>(k++)));
      const DensityMatrix bc = random_density(dims, rank, rng);
      check_family(petz_transpose(bc), bc);
      for (double t : {-3.0, -0.5, 0.25, 2.0})
        check_family(rotated_petz(bc, t), bc);
      check_family(averaged_rotated_petz(bc, AveragingScheme::grid()), bc);
      check_family(
          averaged_rotated_petz(bc, AveragingScheme::grid(9, 2.0, AveragingScheme::Weights::kUniform)),
          bc);
      t0_err = std::max(t0_err, (rotated_petz(bc, 0.0).choi() - petz_transpose(bc).choi())
                                    .cwiseAbs()
                                    .maxCoeff());
    }
  check(appendix_f_recovery_map());
  for (int i = 0; i < 3; ++i) {
    Rng rng(stream_seed(111, static_cast<std::uint64_t>(i)));
    const DensityMatrix rho = random_density({2, 2, 2}, 2 + i, rng);
    check(fidelity_of_recovery(rho).witness);
    const auto unital = fidelity_of_recovery_unital_form(rho);
    check_family(unital.witness, rho.marginal({1, 2}));
  }
  return {tpcp_fail == 0 && marginal_err <= 1e-8 && t0_err <= 1e-12,
          fmt("%d channels, TPCP failures=%d, max |R(rho_B)-rho_BC|=%.2e, |J(R_0)-J(T)|=%.2e",
              channels, tpcp_fail, marginal_err, t0_err)};
}

}  // namespace

int main()
{
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4},  {"AC5", ac5},  {"AC6", ac6},
      {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}, {"AC10", ac10}, {"AC11", ac11}};
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %s %s\n", name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
