#include "recov/harness.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "recov/recovery_sdp.hpp"

namespace recov {

void ExperimentConfig::validate() const
{
  if (dims.size() != 3)
    throw std::invalid_argument("config: dims must be dA,dB,dC");
  for (Index d : dims)
    if (d < 1)
      throw std::invalid_argument("config: dimensions must be >= 1");
  if (samples < 1)
    throw std::invalid_argument("config: samples must be >= 1");
  if (!(tolerance > 0.0))
    throw std::invalid_argument("config: tolerance must be > 0");
  scheme().validate();
}

AveragingScheme ExperimentConfig::scheme() const
{
  return AveragingScheme::grid(avg_nodes, avg_halfwidth, avg_weights);
}

void aggregate(CampaignReport& report)
{
  report.minima.clear();
  auto lower = [](std::optional<double>& slot, double x) {
    slot = slot ? std::min(*slot, x) : x;
  };
  for (const auto& s : report.samples) {
    if (s.status != "ok")
      continue;
    for (const auto& [name, r] : s.reports) {
      Minima& m = report.minima[name];
      lower(m.delta_thm1, r.delta_thm1);
      lower(m.delta_cor3, r.delta_cor3);
      if (r.delta_meas)
        lower(m.delta_meas, *r.delta_meas);
    }
  }
}

namespace {

using Clock = std::chrono::steady_clock;

const TripartiteLabels kLabels{};

bool below(double delta, double tol)
{
  return delta < -tol;
}

bool violates_bounds(const RecoveryReport& r, double tol)
{
  return below(r.delta_thm1, tol) || below(r.delta_cor3, tol) ||
         (r.delta_meas && below(*r.delta_meas, tol));
}

DensityMatrix sample_state(const ExperimentConfig& c, Rng& rng)
{
  if (c.ensemble == Ensemble::kMarkov)
    return random_markov_state(c.dims, rng);
  return random_density(c.dims, dim_product(c.dims), rng);
}

int sample_count(const ExperimentConfig& c, CampaignReport& report)
{
  if (c.state_path.empty())
    return c.samples;
  if (c.samples > 1)
    report.warnings.push_back("--state given: evaluating the single input state");
  return 1;
}

DensityMatrix input_state(const ExperimentConfig& c)
{
  DensityMatrix rho = load_state(c.state_path);
  if (rho.num_subsystems() != 3)
    throw std::invalid_argument("input state must have three subsystems A, B, C");
  return rho;
}

CampaignReport new_report(const char* command, const ExperimentConfig& config)
{
  CampaignReport report;
  report.command = command;
  report.config = config;
  return report;
}

void finish(CampaignReport& report, Clock::time_point start)
{
  aggregate(report);
  report.violations = 0;
  report.failures = 0;
  for (const auto& s : report.samples) {
    report.violations += s.violation ? 1 : 0;
    report.failures += s.status == "solver-failure" ? 1 : 0;
  }
  report.runtime_seconds = std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

CampaignReport cmd_verify(const ExperimentConfig& config)
{
  config.validate();
  const auto start = Clock::now();
  CampaignReport report = new_report("verify", config);
  const AveragingScheme scheme = config.scheme();
  const int n = sample_count(config, report);

  for (int i = 0; i < n; ++i) {
    SampleRecord rec;
    rec.index = i;
    rec.seed = stream_seed(config.seed, static_cast<std::uint64_t>(i));
    Rng rng(rec.seed);
    const DensityMatrix rho = config.state_path.empty() ? sample_state(config, rng) : input_state(config);
    const DensityMatrix rho_bc = rho.marginal({1, 2});

    rec.reports["transpose"] = recovery_report(rho, kLabels, petz_transpose(rho_bc), config.compute_dm);
    rec.reports["averaged"] =
        recovery_report(rho, kLabels, averaged_rotated_petz(rho_bc, scheme), config.compute_dm);
    try {
      const RecoveryOptimum opt = fidelity_of_recovery(rho, kLabels);
      rec.reports["optimal"] = report_from_fidelity(rec.reports["transpose"].cmi_bits, opt.value);
      rec.values["optimal_upper_bound"] = opt.upper_bound;
      rec.values["optimal_witness_fidelity"] = opt.witness_fidelity;
      // informational only: the fidelity-optimal map need not minimize D_M
      if (config.compute_dm)
        rec.values["optimal_witness_dm_bits"] =
            *recovery_report(rho, kLabels, opt.witness, true).dm_bits;
      rec.violation = violates_bounds(rec.reports["optimal"], config.tolerance);
    } catch (const SdpFailure& e) {
      rec.status = "solver-failure";
      rec.note = e.what();
    }
    report.samples.push_back(std::move(rec));
  }
  finish(report, start);
  return report;
}

CampaignReport cmd_universal(const ExperimentConfig& config)
{
  config.validate();
  const auto start = Clock::now();
  CampaignReport report = new_report("universal", config);
  const AveragingScheme scheme = config.scheme();

  Rng marginal_rng(stream_seed(config.seed, 0));
  DensityMatrix rho_bc = config.state_path.empty()
                             ? random_density({config.dims[1], config.dims[2]},
                                              config.dims[1] * config.dims[2], marginal_rng)
                             : input_state(config).marginal({1, 2});
  if (!config.state_path.empty() && rho_bc.dims() != DimVector{config.dims[1], config.dims[2]}) {
    report.warnings.push_back("--dims B,C replaced by the input state's marginal dimensions");
  }
  const Channel averaged = averaged_rotated_petz(rho_bc, scheme);
  const Channel transpose = petz_transpose(rho_bc);
  const TpcpReport tpcp = validate_tpcp(averaged);
  report.extra["rho_bc"] = state_to_json(rho_bc);
  report.extra["averaged_min_choi_eigenvalue"] = real_to_json(tpcp.min_choi_eigenvalue);
  report.extra["averaged_tp_error"] = real_to_json(tpcp.tp_error);

  for (int i = 0; i < config.samples; ++i) {
    SampleRecord rec;
    rec.index = i;
    rec.seed = stream_seed(config.seed, static_cast<std::uint64_t>(i) + 1);
    Rng rng(rec.seed);
    const DensityMatrix rho = random_extension(rho_bc, config.dims[0], rng);
    rec.reports["averaged"] = recovery_report(rho, kLabels, averaged, config.compute_dm);
    rec.reports["transpose"] = recovery_report(rho, kLabels, transpose, config.compute_dm);
    rec.values["d_transpose_bits"] =
        relative_entropy(rho, hermitian_part(recovered_state(rho, kLabels, transpose)));
    rec.violation = violates_bounds(rec.reports["averaged"], config.tolerance);
    report.samples.push_back(std::move(rec));
  }
  finish(report, start);
  return report;
}

CampaignReport cmd_counterexample(const ExperimentConfig& config)
{
  const auto start = Clock::now();
  CampaignReport report = new_report("counterexample", config);
  const DensityMatrix rho = appendix_f_state();
  const DensityMatrix rho_bc = rho.marginal({1, 2});
  const Channel transpose = petz_transpose(rho_bc);

  SampleRecord rec;
  rec.reports["given"] = recovery_report(rho, kLabels, appendix_f_recovery_map());
  rec.reports["transpose"] = recovery_report(rho, kLabels, transpose);
  const double f_given = rec.reports["given"].fid;
  const double f_transpose = rec.reports["transpose"].fid;
  rec.values["f_given"] = f_given;
  rec.values["f_transpose"] = f_transpose;
  rec.values["sqrt_f_transpose"] = std::sqrt(f_transpose);
  const bool ordering = f_given > std::sqrt(f_transpose);
  rec.violation = !ordering;
  try {
    const RecoveryOptimum opt = fidelity_of_recovery(rho, kLabels);
    const UnitalRecoveryOptimum unital = fidelity_of_recovery_unital_form(rho, kLabels);
    const double i_bits = rec.reports["given"].cmi_bits;
    rec.reports["optimal"] = report_from_fidelity(i_bits, opt.value);
    rec.reports["unital"] = report_from_fidelity(i_bits, unital.value);
    rec.values["fidelity_of_recovery"] = opt.value;
    rec.values["unital_form"] = unital.value;
    rec.violation = rec.violation || f_given > opt.value + config.tolerance;
  } catch (const SdpFailure& e) {
    rec.status = "solver-failure";
    rec.note = e.what();
  }

  ComplexMatrix e0 = ComplexMatrix::Zero(2, 2);
  e0(0, 0) = 1.0;
  ComplexMatrix e1 = ComplexMatrix::Zero(2, 2);
  e1(1, 1) = 1.0;
  report.extra["transpose_of_0"] = matrix_to_json(transpose(e0));
  report.extra["transpose_of_1"] = matrix_to_json(transpose(e1));
  report.extra["ordering_holds"] = ordering;
  report.samples.push_back(std::move(rec));
  finish(report, start);
  return report;
}

CampaignReport cmd_sweep(const ExperimentConfig& config, const SweepConfig& sweep,
                         std::vector<SweepRow>* rows_out)
{
  config.validate();
  if (config.state_path.empty())
    throw std::invalid_argument("sweep: --state is required");
  if (sweep.steps < 1 || !(sweep.t_max >= sweep.t_min))
    throw std::invalid_argument("sweep: need steps >= 1 and t_max >= t_min");
  const auto start = Clock::now();
  CampaignReport report = new_report("sweep", config);
  const DensityMatrix rho = input_state(config);
  const DensityMatrix rho_bc = rho.marginal({1, 2});

  std::vector<SweepRow> rows;
  for (int k = 0; k < sweep.steps; ++k) {
    const double t = sweep.steps == 1 ? sweep.t_min
                                      : sweep.t_min + (sweep.t_max - sweep.t_min) * k /
                                                          static_cast<double>(sweep.steps - 1);
    rows.push_back({"rotated", t, recovery_report(rho, kLabels, rotated_petz(rho_bc, t)).fid});
  }
  rows.push_back(
      {"averaged", std::nullopt,
       recovery_report(rho, kLabels, averaged_rotated_petz(rho_bc, config.scheme())).fid});

  SampleRecord rec;
  const Index db = rho.dims()[1];
  if (db * db * rho.dims()[2] <= 128) {
    try {
      const double best = fidelity_of_recovery(rho, kLabels).value;
      for (const auto& row : rows)
        rec.violation = rec.violation || row.fidelity > best + config.tolerance;
      rows.push_back({"optimal", std::nullopt, best});
    } catch (const SdpFailure& e) {
      rec.status = "solver-failure";
      rec.note = e.what();
    }
  } else {
    report.warnings.push_back("B and C too large for the optimal-map row");
  }
  Json table = Json::array();
  for (const auto& row : rows)
    table.push_back(Json{{"map", row.map},
                         {"t", row.t ? real_to_json(*row.t) : Json(nullptr)},
                         {"fidelity", real_to_json(row.fidelity)}});
  report.extra["rows"] = table;
  report.samples.push_back(std::move(rec));
  finish(report, start);
  if (rows_out)
    *rows_out = std::move(rows);
  return report;
}

std::string sweep_csv(const std::vector<SweepRow>& rows)
{
  std::ostringstream out;
  out << std::setprecision(17);
  out << "map,t,fidelity\n";
  for (const auto& row : rows) {
    out << row.map << ',';
    if (row.t)
      out << *row.t;
    out << ',' << row.fidelity << '\n';
  }
  return out.str();
}

CampaignReport cmd_bk(const ExperimentConfig& config)
{
  config.validate();
  const auto start = Clock::now();
  CampaignReport report = new_report("bk", config);
  const int n = sample_count(config, report);

  for (int i = 0; i < n; ++i) {
    SampleRecord rec;
    rec.index = i;
    rec.seed = stream_seed(config.seed, static_cast<std::uint64_t>(i));
    Rng rng(rec.seed);
    const DensityMatrix rho =
        config.state_path.empty() ? random_pure_state(config.dims, rng) : input_state(config);
    if (!is_pure(rho)) {
      rec.status = "skipped";
      rec.note = "input state is not pure";
      report.warnings.push_back("sample " + std::to_string(i) + ": not pure, excluded");
      report.samples.push_back(std::move(rec));
      continue;
    }
    rec.reports["transpose"] = recovery_report(rho, kLabels, petz_transpose(rho.marginal({1, 2})));
    const double f_t = rec.reports["transpose"].fid;
    try {
      const double best = fidelity_of_recovery(rho, kLabels).value;
      rec.reports["optimal"] = report_from_fidelity(rec.reports["transpose"].cmi_bits, best);
      rec.values["f_transpose"] = f_t;
      rec.values["sqrt_f_transpose"] = std::sqrt(f_t);
      rec.values["fidelity_of_recovery"] = best;
      rec.values["lower_gap"] = best - f_t;
      rec.values["upper_gap"] = std::sqrt(f_t) - best;
      rec.violation = below(best - f_t, config.tolerance) ||
                      below(std::sqrt(f_t) - best, config.tolerance);
    } catch (const SdpFailure& e) {
      rec.status = "solver-failure";
      rec.note = e.what();
    }
    report.samples.push_back(std::move(rec));
  }
  finish(report, start);
  return report;
}

namespace {

std::string utc_timestamp()
{
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

Json config_to_json(const ExperimentConfig& c)
{
  return Json{{"dims", c.dims},
              {"samples", c.samples},
              {"seed", c.seed},
              {"tolerance", c.tolerance},
              {"compute_dm", c.compute_dm},
              {"avg_nodes", c.avg_nodes},
              {"avg_halfwidth", c.avg_halfwidth},
              {"avg_weights", c.avg_weights == AveragingScheme::Weights::kCosh ? "cosh" : "uniform"},
              {"ensemble", c.ensemble == Ensemble::kMarkov ? "markov" : "random"},
              {"state", c.state_path}};
}

Json optional_real(const std::optional<double>& x)
{
  return x ? real_to_json(*x) : Json(nullptr);
}

}  // namespace

Json campaign_to_json(const CampaignReport& report)
{
  Json samples = Json::array();
  for (const auto& s : report.samples) {
    Json reports = Json::object();
    for (const auto& [name, r] : s.reports)
      reports[name] = report_to_json(r);
    Json values = Json::object();
    for (const auto& [name, v] : s.values)
      values[name] = real_to_json(v);
    samples.push_back(Json{{"index", s.index},
                           {"seed", s.seed},
                           {"status", s.status},
                           {"note", s.note},
                           {"violation", s.violation},
                           {"reports", reports},
                           {"values", values}});
  }
  Json minima = Json::object();
  for (const auto& [name, m] : report.minima)
    minima[name] = Json{{"delta_thm1", optional_real(m.delta_thm1)},
                        {"delta_meas", optional_real(m.delta_meas)},
                        {"delta_cor3", optional_real(m.delta_cor3)}};
  return Json{{"command", report.command},
              {"config", config_to_json(report.config)},
              {"samples", samples},
              {"minima", minima},
              {"violations", report.violations},
              {"failures", report.failures},
              {"warnings", report.warnings},
              {"extra", report.extra},
              {"timing", Json{{"timestamp", utc_timestamp()},
                              {"runtime_seconds", report.runtime_seconds}}}};
}

}  // namespace recov
