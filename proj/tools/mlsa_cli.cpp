#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mlsa/bench.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
  std::vector<double> eps;
  std::string algo;
  std::string out_dir = ".";
  bool no_timing = false;
};

mlsa::ExperimentConfig load(const CommonOpts& o) {
  mlsa::ExperimentConfig cfg = mlsa::ExperimentConfig::load_file(o.config_path);
  if (o.seed) cfg.seed = *o.seed;
  if (o.reps) cfg.replications = *o.reps;
  if (!o.eps.empty()) {
    cfg.epsilons = o.eps;
    for (std::size_t i = 1; i < cfg.epsilons.size(); i++)
      if (!(cfg.epsilons[i] < cfg.epsilons[i - 1]))
        throw mlsa::ConfigError("--eps list must be strictly decreasing");
  }
  if (!o.algo.empty()) {
    auto it = cfg.algorithms.find(o.algo);
    if (it == cfg.algorithms.end())
      throw mlsa::ConfigError("--algo '" + o.algo + "' not present in config");
    auto keep = *it;
    cfg.algorithms.clear();
    cfg.algorithms.insert(keep);
  }
  return cfg;
}

void write_file(const std::string& dir, const std::string& name,
                const std::string& content) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir + "/" + name, std::ios::binary);
  if (!out) throw mlsa::ConfigError("cannot write to " + dir + "/" + name);
  out << content;
}

int cmd_estimate(const CommonOpts& o, const std::string& target_name) {
  mlsa::ExperimentConfig cfg = load(o);
  if (cfg.algorithms.size() != 1)
    throw mlsa::ConfigError("estimate: pick one algorithm with --algo");
  const std::string algo = cfg.algorithms.begin()->first;
  double eps = cfg.epsilons.front();
  mlsa::Target t = target_name == "es" ? mlsa::Target::Es : mlsa::Target::Var;

  auto saved_reps = cfg.replications;
  cfg.replications = 1;
  mlsa::CellResult cell = mlsa::run_replications(cfg, algo, t, eps);
  (void)saved_reps;
  if (cell.runs.empty()) {
    std::fprintf(stderr, "run diverged\n");
    return kExitDiverged;
  }
  const mlsa::SARunResult& r = cell.runs.front();
  std::printf("algorithm: %s  target: %s  eps: %.10g\n", algo.c_str(),
              target_name.c_str(), eps);
  std::printf("var: %.10g\nes: %.10g\n", r.estimate.xi, r.estimate.chi);
  std::printf("iterations: %lld  cost: %lld draws", (long long)r.iterations,
              (long long)r.inner_draws);
  if (!o.no_timing) std::printf("  wall: %.4gs", r.wall_time_s);
  std::printf("\n");
  auto truth = cfg.model->analytic_truth();
  if (truth)
    std::printf("benchmark var: %.10g  es: %.10g\n", truth->xi, truth->chi);
  return kExitOk;
}

int cmd_tune(const CommonOpts& o) {
  mlsa::ExperimentConfig cfg = load(o);
  std::string csv = "algorithm,target,eps,level,h,n,cost_share\n";
  for (double eps : cfg.epsilons) {
    auto [bias, n] = mlsa::nsa_tuning(eps, 1.0);
    std::printf("eps=%-12.6g nsa: K=%lld n=%lld cost=%lld\n", eps,
                (long long)bias.k, (long long)n, (long long)(bias.k * n));
    csv += "nsa,both," + std::to_string(eps) + ",0," +
           std::to_string(bias.h()) + "," + std::to_string(n) + ",1\n";
    auto it = cfg.algorithms.find("mlsa");
    if (it == cfg.algorithms.end()) continue;
    for (const auto& [tname, ts] : it->second) {
      const mlsa::CellSpec* cell = ts.cell_for(eps);
      std::int64_t k0 = cell && cell->k0 > 0 ? cell->k0 : ts.k0;
      if (k0 < 1) continue;
      double cal = cell && cell->calibration ? *cell->calibration : ts.calibration;
      double gamma1 = (cell ? cell->sched : ts.sched).gamma1;
      int levels = mlsa::level_count(mlsa::BiasParam(k0), cfg.m, eps);
      mlsa::LevelLadder ladder(mlsa::BiasParam(k0), cfg.m, levels);
      mlsa::Allocation alloc =
          tname == "var"
              ? mlsa::var_allocation(eps, 1.0, ladder, cfg.scenario, gamma1, cal)
              : mlsa::es_allocation(eps, ladder, cal);
      double total = static_cast<double>(alloc.cost());
      std::printf("eps=%-12.6g mlsa/%s: h0=1/%lld L=%d cost=%lld%s\n", eps,
                  tname.c_str(), (long long)k0, levels, (long long)alloc.cost(),
                  alloc.nonmonotone ? "  [warning: budgets not non-increasing]" : "");
      for (int ell = 0; ell <= ladder.l; ell++) {
        double share = static_cast<double>(alloc.budgets[(std::size_t)ell] *
                                           ladder.inner_count(ell)) / total;
        std::printf("  level %d  h=%-12.6g N=%-10lld share=%.3f\n", ell,
                    ladder.h(ell), (long long)alloc.budgets[(std::size_t)ell], share);
        csv += "mlsa," + tname + "," + std::to_string(eps) + "," +
               std::to_string(ell) + "," + std::to_string(ladder.h(ell)) + "," +
               std::to_string(alloc.budgets[(std::size_t)ell]) + "," +
               std::to_string(share) + "\n";
      }
    }
  }
  write_file(o.out_dir, "tune.csv", csv);
  return kExitOk;
}

int cmd_bias_study(const CommonOpts& o) {
  std::ifstream in(o.config_path);
  if (!in) throw mlsa::ConfigError("cannot open config file: " + o.config_path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw mlsa::ConfigError(o.config_path + ": " + std::string(e.what()));
  }
  mlsa::ExperimentConfig cfg = load(o);
  if (!j.contains("bias_study"))
    throw mlsa::ConfigError(o.config_path + ": missing bias_study section");
  const nlohmann::json& b = j.at("bias_study");
  std::vector<std::int64_t> ks = b.at("inner_counts").get<std::vector<std::int64_t>>();
  auto n = b.at("iterations").get<std::int64_t>();
  int reps = o.reps ? *o.reps : b.value("replications", cfg.replications);
  mlsa::ScheduleSpec sched;
  sched.gamma1 = b.value("gamma1", 1.0);
  sched.beta = b.value("beta", 1.0);
  sched.offset = b.value("offset", 0.0);

  auto rows = mlsa::bias_study(*cfg.model, ks, n, sched, reps, cfg.seed);
  std::string csv = mlsa::bias_table_csv(rows);
  std::fputs(csv.c_str(), stdout);
  write_file(o.out_dir, "bias.csv", csv);
  for (const auto& r : rows)
    if (r.diverged > 0)
      std::fprintf(stderr, "warning: %d divergent replication(s) at h=%g\n",
                   r.diverged, r.h);
  return kExitOk;
}

int cmd_compare(const CommonOpts& o) {
  mlsa::ExperimentConfig cfg = load(o);
  mlsa::CompareOutput out = mlsa::compare_command(cfg, !o.no_timing);
  std::fputs(out.csv.c_str(), stdout);
  std::fputs(out.report.c_str(), stderr);
  write_file(o.out_dir, "compare.csv", out.csv);
  write_file(o.out_dir, "report.txt", out.report);
  return out.any_cell_empty ? kExitDiverged : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"VaR/ES stochastic-approximation benchmark"};
  app.require_subcommand(1);

  CommonOpts o;
  std::string target = "var";

  auto add_common = [&](CLI::App* sub, bool need_config = true) {
    auto* c = sub->add_option("--config", o.config_path, "experiment config (JSON)");
    if (need_config) c->required();
    sub->add_option("--seed", o.seed, "master seed override");
    sub->add_option("--out", o.out_dir, "output directory");
    sub->add_option("--algo", o.algo, "restrict to one algorithm: sa|nsa|mlsa");
    sub->add_option("--eps", o.eps, "accuracy grid override (decreasing)");
    sub->add_option("--reps", o.reps, "replication count override");
    sub->add_flag("--no-timing", o.no_timing, "suppress wall-clock columns");
  };

  CLI::App* est = app.add_subcommand("estimate", "single run of one scheme");
  add_common(est);
  est->add_option("--target", target, "var|es (selects the tuned schedule)");

  CLI::App* tune = app.add_subcommand("tune", "print closed-form parameter choices");
  add_common(tune);

  CLI::App* bias = app.add_subcommand("bias-study", "NSA weak-error study over an h grid");
  add_common(bias);

  CLI::App* cmp = app.add_subcommand("compare", "RMSE-vs-runtime complexity benchmark");
  add_common(cmp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (est->parsed()) return cmd_estimate(o, target);
    if (tune->parsed()) return cmd_tune(o);
    if (bias->parsed()) return cmd_bias_study(o);
    if (cmp->parsed()) return cmd_compare(o);
  } catch (const mlsa::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return kExitOk;
}
