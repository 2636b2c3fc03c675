#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mlsa/engine.hpp"
#include "mlsa/models.hpp"
#include "mlsa/tuning.hpp"

namespace mlsa {

// Bad or inconsistent experiment configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

double rmse(std::span<const double> estimates, double truth);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// OLS of ln(y) on ln(x); needs >= 3 strictly positive points.
SlopeFit fit_loglog_slope(std::span<const double> xs, std::span<const double> ys);

struct ScheduleSpec {
  double gamma1 = 1.0;
  double beta = 1.0;
  double offset = 0.0;

  StepSchedule make() const { return StepSchedule(gamma1, beta, offset); }
};

enum class Target { Var, Es };

std::string target_name(Target t);

// Per-accuracy override of the schedule and (for MLSA) the ladder base.
struct CellSpec {
  double eps = 0.0;
  std::int64_t k0 = 0;  // MLSA only: level-0 inner sample count (h0 = 1/k0)
  ScheduleSpec sched;
  std::optional<double> calibration;
  EstimatePair init{};
};

struct TargetSpec {
  ScheduleSpec sched;
  double calibration = 1.0;   // MLSA budget scale
  std::int64_t k0 = 0;        // MLSA default ladder base; 0 = per-cell only
  EstimatePair init{};        // chain starting point, default (0, 0)
  std::vector<CellSpec> cells;

  const CellSpec* cell_for(double eps) const;
};

struct ExperimentConfig {
  std::shared_ptr<const LossModel> model;
  EstimatePair truth;
  std::uint64_t seed = 0;
  int replications = 200;
  int m = 2;
  Scenario scenario = Scenario::lipschitz();
  std::vector<double> epsilons;
  // algorithm ("sa" | "nsa" | "mlsa") -> target ("var" | "es") -> spec
  std::map<std::string, std::map<std::string, TargetSpec>> algorithms;

  static ExperimentConfig load_file(const std::string& path);
  static ExperimentConfig parse(const std::string& text, const std::string& origin);

  const TargetSpec& spec_for(const std::string& algo, Target t) const;
};

struct CellResult {
  std::vector<SARunResult> runs;  // converged replications only
  int diverged = 0;
  std::int64_t analytic_cost = 0;  // n (SA), n*K (NSA), sum N_l*K*M^l (MLSA)
};

// R replications of one (algorithm, target, epsilon) cell; streams are keyed
// by (seed, cell, replication), so results are order-independent.
CellResult run_replications(const ExperimentConfig& cfg, const std::string& algo,
                            Target t, double eps);

struct BiasRow {
  double h = 0.0;
  double var_err = 0.0;  // mean terminal xi minus true VaR
  double es_err = 0.0;
  double var_rescaled = 0.0;  // err / h
  double es_rescaled = 0.0;
  int diverged = 0;
};

// NSA weak-error study: for each K runs `reps` chains of n steps and reports
// centered and h-rescaled mean terminal errors.
std::vector<BiasRow> bias_study(const LossModel& model,
                                const std::vector<std::int64_t>& inner_counts,
                                std::int64_t n, const ScheduleSpec& sched,
                                int reps, std::uint64_t seed);

std::string bias_table_csv(const std::vector<BiasRow>& rows);

struct BenchRecord {
  std::string algorithm;
  std::string target;
  double epsilon = 0.0;
  double rmse_value = 0.0;
  double mean_runtime_s = 0.0;
  double mean_cost = 0.0;
  int replications = 0;
  int diverged = 0;
  bool empty = false;  // every replication diverged
};

struct CompareOutput {
  std::vector<BenchRecord> records;
  std::string csv;     // fixed columns: algorithm,target,epsilon,rmse,mean_runtime_s,mean_cost,replications
  std::string report;  // slope fits + divergence warnings, human-readable
  bool any_cell_empty = false;
};

// Full complexity study over every configured (algorithm, target, epsilon).
// With `timing` false the runtime column is zeroed so output is byte-stable.
CompareOutput compare_command(const ExperimentConfig& cfg, bool timing);

}  // namespace mlsa
