// recovery: seeded checks of recovery-map bounds on random and fixed states.

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "recov/harness.hpp"
#include "recov/recovery_sdp.hpp"

using namespace recov;

namespace {

struct Flags {
  std::vector<Index> dims{2, 2, 2};
  int samples = 100;
  std::uint64_t seed = 1;
  double tol = 1e-6;
  bool dm = false;
  int avg_nodes = 41;
  double avg_halfwidth = 8.0;
  std::string avg_weights = "cosh";
  std::string ensemble = "random";
  std::string out;
  std::string state;
  SweepConfig sweep;
  std::string sdp_dump;
};

void add_common(CLI::App* cmd, Flags& f)
{
  cmd->add_option("--dims", f.dims, "subsystem dimensions dA,dB,dC")->delimiter(',')->expected(3);
  cmd->add_option("--samples", f.samples, "number of samples");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--tol", f.tol, "violation tolerance");
  cmd->add_flag("--dm", f.dm, "also compute the measured relative entropy bound");
  cmd->add_option("--avg-nodes", f.avg_nodes, "quadrature nodes of the averaged map");
  cmd->add_option("--avg-halfwidth", f.avg_halfwidth, "half-width of the quadrature grid");
  cmd->add_option("--avg-weights", f.avg_weights, "quadrature weights")
      ->check(CLI::IsMember({"cosh", "uniform"}));
  cmd->add_option("--out", f.out, "write the JSON report (CSV for sweep) here");
  cmd->add_option("--state", f.state, "input state JSON {dims, matrix}");
}

ExperimentConfig to_config(const Flags& f)
{
  ExperimentConfig c;
  c.dims = DimVector(f.dims.begin(), f.dims.end());
  c.samples = f.samples;
  c.seed = f.seed;
  c.tolerance = f.tol;
  c.compute_dm = f.dm;
  c.avg_nodes = f.avg_nodes;
  c.avg_halfwidth = f.avg_halfwidth;
  c.avg_weights =
      f.avg_weights == "uniform" ? AveragingScheme::Weights::kUniform : AveragingScheme::Weights::kCosh;
  c.ensemble = f.ensemble == "markov" ? Ensemble::kMarkov : Ensemble::kRandom;
  c.out = f.out;
  c.state_path = f.state;
  c.validate();
  return c;
}

std::string fmt(const std::optional<double>& x)
{
  if (!x)
    return "n/a";
  std::ostringstream s;
  s << std::setprecision(6) << *x;
  return s.str();
}

void print_summary(const CampaignReport& r)
{
  std::cout << r.command << ": " << r.samples.size() << " sample(s), " << r.violations
            << " violation(s), " << r.failures << " solver failure(s), " << std::fixed
            << std::setprecision(2) << r.runtime_seconds << " s\n";
  std::cout.unsetf(std::ios::floatfield);
  for (const auto& [name, m] : r.minima)
    std::cout << "  " << name << ": min delta_thm1 " << fmt(m.delta_thm1) << ", min delta_cor3 "
              << fmt(m.delta_cor3) << ", min delta_meas " << fmt(m.delta_meas) << '\n';
  for (const auto& w : r.warnings)
    std::cerr << "warning: " << w << '\n';
}

void write_report(const CampaignReport& r, const std::string& out)
{
  if (!out.empty())
    write_text_file(out, campaign_to_json(r).dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Recovery maps and conditional mutual information bounds"};
  app.require_subcommand(1);
  Flags f;

  auto* verify = app.add_subcommand("verify", "recovery bounds on random states, incl. the SDP optimum");
  add_common(verify, f);
  verify->add_option("--ensemble", f.ensemble, "state ensemble")
      ->check(CLI::IsMember({"random", "markov"}));
  auto* universal = app.add_subcommand("universal", "one averaged rotated-Petz map on many extensions");
  add_common(universal, f);
  auto* counter = app.add_subcommand("counterexample", "mixed-state counterexample to the square-root bound");
  add_common(counter, f);
  counter->add_option("--sdp-dump", f.sdp_dump, "write the fidelity-of-recovery SDP as JSON");
  auto* sweep = app.add_subcommand("sweep", "fidelity of rotated Petz maps over t");
  add_common(sweep, f);
  sweep->add_option("--t-min", f.sweep.t_min, "first t");
  sweep->add_option("--t-max", f.sweep.t_max, "last t");
  sweep->add_option("--steps", f.sweep.steps, "grid points");
  auto* bk = app.add_subcommand("bk", "pure-state sandwich F(T) <= F(A;C|B) <= sqrt F(T)");
  add_common(bk, f);

  CLI11_PARSE(app, argc, argv);

  try {
    const ExperimentConfig config = to_config(f);
    CampaignReport report;
    if (*verify) {
      report = cmd_verify(config);
    } else if (*universal) {
      report = cmd_universal(config);
    } else if (*counter) {
      report = cmd_counterexample(config);
      const auto& v = report.samples.front().values;
      std::cout << std::fixed << std::setprecision(8);
      std::cout << "F(rho, R_given(rho_AB))   = " << v.at("f_given") << '\n';
      std::cout << "F(rho, T(rho_AB))         = " << v.at("f_transpose") << '\n';
      std::cout << "sqrt F(rho, T(rho_AB))    = " << v.at("sqrt_f_transpose") << '\n';
      if (v.count("fidelity_of_recovery")) {
        std::cout << "F(A;C|B)                  = " << v.at("fidelity_of_recovery") << '\n';
        std::cout << "unital-form optimum       = " << v.at("unital_form") << '\n';
      }
      std::cout << "F(R_given) > sqrt F(T)    : "
                << (report.extra.at("ordering_holds").get<bool>() ? "yes" : "NO") << '\n';
      std::cout.unsetf(std::ios::floatfield);
      if (!f.sdp_dump.empty()) {
        const RecoveryOptimum opt = fidelity_of_recovery(appendix_f_state());
        write_text_file(f.sdp_dump, sdp_to_json(opt.problem, opt.solution).dump() + "\n");
      }
    } else if (*sweep) {
      std::vector<SweepRow> rows;
      report = cmd_sweep(config, f.sweep, &rows);
      const std::string csv = sweep_csv(rows);
      if (f.out.empty())
        std::cout << csv;
      else
        write_text_file(f.out, csv);
      std::cout << "sweep: " << rows.size() << " row(s), " << report.violations
                << " row(s) above the optimum\n";
      for (const auto& w : report.warnings)
        std::cerr << "warning: " << w << '\n';
      return report.ok() ? 0 : 1;
    } else if (*bk) {
      report = cmd_bk(config);
    }
    print_summary(report);
    write_report(report, f.out);
    return report.ok() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
