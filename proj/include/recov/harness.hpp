#ifndef RECOV_HARNESS_HPP
#define RECOV_HARNESS_HPP

// Seeded experiment campaigns behind the command-line tool.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "recov/io.hpp"
#include "recov/recovery.hpp"

namespace recov {

enum class Ensemble {
  kRandom,  ///< full-rank Hilbert-Schmidt random states
  kMarkov,  ///< random quantum Markov chains (qcq with product blocks)
};

struct ExperimentConfig {
  DimVector dims{2, 2, 2};
  int samples = 100;
  std::uint64_t seed = 1;
  double tolerance = 1e-6;
  bool compute_dm = false;
  int avg_nodes = 41;
  double avg_halfwidth = 8.0;
  AveragingScheme::Weights avg_weights = AveragingScheme::Weights::kCosh;
  Ensemble ensemble = Ensemble::kRandom;
  std::string out;         ///< output path; empty means none
  std::string state_path;  ///< input state; empty means sample states

  /// Throws std::invalid_argument on dims < 1, samples < 1, tolerance <= 0 or
  /// a bad averaging scheme.
  void validate() const;
  AveragingScheme scheme() const;
};

/// Reports for the maps evaluated on one sample, keyed by map name
/// ("transpose", "averaged", "optimal", ...).
struct SampleRecord {
  int index = 0;
  std::uint64_t seed = 0;
  std::string status = "ok";  ///< "ok", "skipped" or "solver-failure"
  std::string note;
  std::map<std::string, RecoveryReport> reports;
  std::map<std::string, double> values;  ///< extra per-sample numbers
  bool violation = false;
};

struct Minima {
  std::optional<double> delta_thm1;
  std::optional<double> delta_meas;
  std::optional<double> delta_cor3;
};

struct CampaignReport {
  std::string command;
  ExperimentConfig config;
  std::vector<SampleRecord> samples;
  std::map<std::string, Minima> minima;  ///< per map, over samples with status "ok"
  int violations = 0;
  int failures = 0;
  std::vector<std::string> warnings;
  Json extra = Json::object();  ///< command-specific results
  double runtime_seconds = 0.0;

  bool ok() const { return violations == 0 && failures == 0; }
};

/// Recomputes `minima` from the stored per-sample reports.
void aggregate(CampaignReport& report);

/// Random states; I >= -2 log2 F and its linearized form checked at the SDP optimum.
CampaignReport cmd_verify(const ExperimentConfig& config);

/// One averaged rotated-Petz map from a fixed rho_BC, evaluated on many extensions.
CampaignReport cmd_universal(const ExperimentConfig& config);

/// The mixed-state counterexample to the square-root bound.
CampaignReport cmd_counterexample(const ExperimentConfig& config = {});

/// F(rho, R_t(rho_AB)) over a grid of t, plus the averaged and optimal maps.
struct SweepRow {
  std::string map;  ///< "rotated", "averaged" or "optimal"
  std::optional<double> t;
  double fidelity = 0.0;
};

struct SweepConfig {
  double t_min = -5.0;
  double t_max = 5.0;
  int steps = 21;
};

CampaignReport cmd_sweep(const ExperimentConfig& config, const SweepConfig& sweep,
                         std::vector<SweepRow>* rows = nullptr);

std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Random pure states; F(T) <= F(A;C|B) <= sqrt(F(T)).
CampaignReport cmd_bk(const ExperimentConfig& config);

/// Report as JSON. Everything except the "timing" object is a deterministic
/// function of the configuration.
Json campaign_to_json(const CampaignReport& report);

}  // namespace recov

#endif  // RECOV_HARNESS_HPP
